use super::{pathwise_scl_solve, ConservedField, Flux};
use crate::error::{arg, Result};
use crate::paths::Path;
use crate::scalar::Real;

/// Two data driven by (possibly) two paths.
#[derive(Clone, Debug)]
pub struct ContractionCase<T> {
    pub u1: ConservedField<T>,
    pub u2: ConservedField<T>,
    pub path1: Path<T>,
    pub path2: Path<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionRecord<T> {
    pub l1_initial: T,
    pub l1_final: T,
    /// `‖u(T)‖_p − ‖u0‖_p` for `p = 1, 2, ∞`, worst of the two solutions.
    pub lp_growth: [T; 3],
    /// `TV(u(T)) − TV(u0)`, worst of the two.
    pub tv_growth: T,
    /// `‖a‖ (|u₁₀|_BV + |u₂₀|_BV) |ΔB(T)|`.
    pub endpoint_term: T,
    /// `(sup|ΔB| ‖a'‖ (‖u₁₀‖₂² + ‖u₂₀‖₂²))^{1/2}`.
    pub sup_term: T,
    /// `(l1_final − l1_initial)₊ / (endpoint_term + sup_term)`; `None` for equal paths.
    pub constant: Option<T>,
}

impl<T: Real> ContractionRecord<T> {
    pub fn gap(&self) -> T {
        self.l1_final - self.l1_initial
    }
}

/// Runs every case to `t_end` and measures contraction, `Lᵖ` and TV bounds and the
/// path-stability ratio.
pub fn contraction_suite<T: Real>(
    flux: &Flux<T>,
    cases: &[ContractionCase<T>],
    t_end: T,
) -> Result<Vec<ContractionRecord<T>>> {
    let two = T::two();
    cases
        .iter()
        .map(|c| {
            if c.u1.len() != c.u2.len() || c.u1.h != c.u2.h {
                return arg("paired data must share the mesh");
            }
            let v1 = pathwise_scl_solve(flux, &c.path1, &c.u1, t_end)?;
            let v2 = pathwise_scl_solve(flux, &c.path2, &c.u2, t_end)?;
            let ps = [T::one(), two, T::infinity()];
            let mut lp_growth = [T::neg_infinity(); 3];
            for (g, &p) in lp_growth.iter_mut().zip(&ps) {
                *g = (v1.lp_norm(p) - c.u1.lp_norm(p)).max(v2.lp_norm(p) - c.u2.lp_norm(p));
            }
            let tv_growth =
                (v1.total_variation() - c.u1.total_variation()).max(v2.total_variation() - c.u2.total_variation());
            let lo = c.u1.min().min(c.u2.min());
            let hi = c.u1.max().max(c.u2.max());
            let a = flux.max_speed(lo, hi)?;
            let da = flux.max_curvature(lo, hi);
            let end_gap = (c.path1.eval(0, t_end)? - c.path2.eval(0, t_end)?).abs();
            let sup_gap = c.path1.restrict(t_end)?.sup_distance(&c.path2.restrict(t_end)?);
            let endpoint_term = a * (c.u1.total_variation() + c.u2.total_variation()) * end_gap;
            let sup_term = (sup_gap * da * (c.u1.lp_norm(two).powi(2) + c.u2.lp_norm(two).powi(2))).sqrt();
            let l1_initial = c.u1.l1_distance(&c.u2)?;
            let l1_final = v1.l1_distance(&v2)?;
            let denom = endpoint_term + sup_term;
            let constant = if sup_gap == T::zero() {
                None
            } else if denom > T::zero() {
                Some((l1_final - l1_initial).pos() / denom)
            } else {
                Some(T::infinity())
            };
            Ok(ContractionRecord { l1_initial, l1_final, lp_growth, tv_growth, endpoint_term, sup_term, constant })
        })
        .collect()
}
