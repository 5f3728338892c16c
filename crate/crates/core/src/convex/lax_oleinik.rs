use super::{legendre_at, SENTINEL};
use crate::error::{arg, pre, Result};
use crate::grid::GridFn1;
use crate::hamiltonian::Hamiltonian;
use crate::scalar::Real;

// Points used to tabulate H when its conjugate has no closed form.
const TABLE_POINTS: usize = 4097;

/// Penalty kernel `K(z) = t·H*(z/t)` for convex `H`, on the offsets `z = k·h`.
enum Kernel<T> {
    /// `H*` is the indicator of `[lo, hi]`: optimise over the window `z ∈ [t·lo, t·hi]`.
    Window { lo: T, hi: T },
    /// Finite penalty `c[k + K]` at offset `k ∈ [−K, K]`.
    Table { reach: isize, cost: Vec<T> },
}

fn kernel<T: Real>(h: &Hamiltonian<T>, grad_bound: T, step: T, t: T) -> Result<Kernel<T>> {
    if let Some((lo, hi)) = h.indicator_conjugate() {
        return Ok(Kernel::Window { lo: lo * t, hi: hi * t });
    }
    let speed = h.lipschitz(grad_bound);
    if !speed.is_finite() {
        return pre("Hamiltonian is not Lipschitz on the gradient range");
    }
    let reach = (t * speed / step).ceil().to_isize().unwrap_or(0) + 2;
    let qs: Vec<T> = (-reach..=reach).map(|k| T::lit(k as f64) * step / t).collect();
    let conj: Vec<T> = if h.closed_conjugate(T::zero()).is_some() {
        qs.iter().map(|&q| h.closed_conjugate(q).unwrap()).collect()
    } else {
        // H restricted to the reachable gradients has the same optimisers
        let r = grad_bound + step;
        let table = h.sample(-r, r, TABLE_POINTS)?;
        legendre_at(&table, &qs)
    };
    Ok(Kernel::Table { reach, cost: conj.into_iter().map(|c| c * t).collect() })
}

/// `sup_y [u(y) − K(y − x)]` on the grid of `u`.
fn sup_convolve<T: Real>(u: &GridFn1<T>, k: &Kernel<T>) -> GridFn1<T> {
    let n = u.len() as isize;
    let h = u.step;
    let out = match k {
        Kernel::Window { lo, hi } => {
            let a = (*lo / h).ceil().to_isize().unwrap_or(0);
            let b = (*hi / h).floor().to_isize().unwrap_or(0);
            (0..n)
                .map(|i| {
                    let x = u.x(i as usize);
                    let mut best = u.eval(x + *lo).max(u.eval(x + *hi));
                    for j in a..=b {
                        best = best.max(u.get(i + j));
                    }
                    best
                })
                .collect()
        }
        Kernel::Table { reach, cost } => (0..n)
            .map(|i| {
                let mut best = T::neg_infinity();
                for j in -*reach..=*reach {
                    let v = u.get(i + j) - cost[(j + reach) as usize];
                    if v > best {
                        best = v;
                    }
                }
                best
            })
            .collect(),
    };
    u.with_values(out)
}

fn mirrored<T: Real>(k: Kernel<T>) -> Kernel<T> {
    match k {
        Kernel::Window { lo, hi } => Kernel::Window { lo: -hi, hi: -lo },
        Kernel::Table { reach, mut cost } => {
            cost.reverse();
            Kernel::Table { reach, cost }
        }
    }
}

/// Solution operator `S_H(t)` of `u_t = H(Du)` for convex or concave `H`, `t > 0`.
///
/// Convex `H`: `u(x) = sup_y [u0(y) − t·H*((y − x)/t)]`.
/// Concave `H = −G`: `u(x) = inf_y [u0(y) + t·G*((x − y)/t)]`.
pub fn lax_oleinik_solve<T: Real>(h: &Hamiltonian<T>, u0: &GridFn1<T>, t: T) -> Result<GridFn1<T>> {
    if !(t > T::zero()) {
        return arg("Lax–Oleinik time must be positive");
    }
    if u0.values.iter().any(|v| !v.is_finite() || v.abs() >= T::lit(SENTINEL * 0.5)) {
        return arg("initial data must be finite");
    }
    let class = h.convexity();
    let lip = u0.lipschitz();
    if class.is_convex() {
        Ok(sup_convolve(u0, &kernel(h, lip, u0.step, t)?))
    } else if class.is_concave() {
        let g = h.negated();
        let k = mirrored(kernel(&g, lip, u0.step, t)?);
        Ok(sup_convolve(&u0.map(|v| -v), &k).map(|v| -v))
    } else {
        pre(format!("H = {} is neither convex nor concave; use a scheme", h.describe()))
    }
}

/// Exact operator for one path increment: `S_H(dξ)` if `dξ ≥ 0`, else `S_{−H}(|dξ|)`.
pub fn apply_segment<T: Real>(h: &Hamiltonian<T>, u: &GridFn1<T>, dxi: T) -> Result<GridFn1<T>> {
    if dxi == T::zero() {
        Ok(u.clone())
    } else if dxi > T::zero() {
        lax_oleinik_solve(h, u, dxi)
    } else {
        lax_oleinik_solve(&h.negated(), u, -dxi)
    }
}
