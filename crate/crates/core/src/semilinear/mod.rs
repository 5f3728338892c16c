//! Semilinear equations `du = F(D²u, Du) dt + H(u)·dB` in one space dimension.
//!
//! With `Φ̂` the flow of `H`, `u = Φ̂(v, B(t))` where `v` solves the deterministic equation
//! `v_t = F̃(v_xx, v_x, v, t)`, `F̃(X, p, v, t) = F(Φ̂'X + Φ̂''p², Φ̂'p) / Φ̂'` evaluated at
//! `(v, B(t))`. The path only enters through lookups into the flow table.

mod flow;
mod operator;

pub use flow::{flow_solve, FlowSlice, FlowTable, NoiseCoefficient};
pub use operator::{structure_audit, LinearForm, Operator, StructureAudit};

use crate::error::{arg, pre, Error, Result};
use crate::grid::{Boundary, GridFn1};
use crate::paths::Path;
use crate::scalar::Real;

/// Operator, flow and the audit of the one-sided structure condition.
#[derive(Clone, Debug)]
pub struct TransformedProblem<T> {
    pub operator: Operator<T>,
    pub flow: FlowTable<T>,
    pub audit: StructureAudit<T>,
}

impl<T: Real> TransformedProblem<T> {
    /// `F̃(X, p, v)` at flow time `s`.
    pub fn eval(&self, x: T, p: T, v: T, s: T) -> Result<T> {
        let (_, d1, d2) = self.flow.slice(s)?.eval(v)?;
        Ok(transformed(&self.operator, x, p, d1, d2))
    }
}

fn transformed<T: Real>(op: &Operator<T>, x: T, p: T, d1: T, d2: T) -> T {
    op.eval(d1 * x + d2 * p * p, d1 * p) / d1
}

/// Box radius and lattice size of the structure audit run by [`transform`].
pub const AUDIT_RADIUS: f64 = 10.0;
pub const AUDIT_SAMPLES: usize = 41;

/// Attaches the operator to a flow. The audit is reported, never enforced.
pub fn transform<T: Real>(op: &Operator<T>, flow: FlowTable<T>) -> Result<TransformedProblem<T>> {
    op.validate()?;
    let audit = structure_audit(op, T::lit(AUDIT_RADIUS), AUDIT_SAMPLES);
    Ok(TransformedProblem { operator: *op, flow, audit })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemilinearMesh<T> {
    /// Time step; `None` picks half the monotonicity limit estimated from `u0` and the flow table.
    pub dt: Option<T>,
    /// RK4 step of the flow table in `s`.
    pub flow_step: T,
    /// Lattice size of the flow table in `v`.
    pub flow_nodes: usize,
    /// `v` range of the flow table; `None` pads the range of `u0` by 10%. Runs that are to be
    /// compared exactly should share it.
    pub v_range: Option<(T, T)>,
}

impl<T: Real> Default for SemilinearMesh<T> {
    fn default() -> Self {
        Self { dt: None, flow_step: T::lit(1e-3), flow_nodes: 257, v_range: None }
    }
}

/// Every time level of a run, already mapped back to `u`.
#[derive(Clone, Debug)]
pub struct SemilinearRun<T> {
    pub times: Vec<T>,
    pub u: Vec<GridFn1<T>>,
    pub problem: TransformedProblem<T>,
    pub dt: T,
}

impl<T: Real> SemilinearRun<T> {
    pub fn last(&self) -> &GridFn1<T> {
        self.u.last().expect("a run records at least the initial datum")
    }

    /// `sup` over all recorded `(x, t)` of `|u − w|`; both runs must share grid and time levels.
    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        if self.times.len() != other.times.len() {
            return arg("runs with different time levels");
        }
        self.u.iter().zip(&other.u).try_fold(T::zero(), |m, (a, b)| Ok(m.max(a.sup_diff(b)?)))
    }
}

/// `r·p²` discretised monotonically from one-sided differences.
fn upwind_square<T: Real>(r: T, pm: T, pp: T) -> T {
    let z = T::zero();
    if r >= z {
        r * pp.max(z).powi(2).max(pm.min(z).powi(2))
    } else {
        r * pm.max(z).powi(2).max(pp.min(z).powi(2))
    }
}

/// `u(·, T)`; see [`semilinear_run`].
pub fn solve_semilinear<T: Real>(
    op: &Operator<T>,
    h: &NoiseCoefficient<T>,
    path: &Path<T>,
    u0: &GridFn1<T>,
    t_end: T,
    mesh: &SemilinearMesh<T>,
) -> Result<GridFn1<T>> {
    Ok(semilinear_run(op, h, path, u0, t_end, mesh)?.last().clone())
}

/// Solves for `v` with an explicit monotone scheme on a periodic grid and maps every level
/// back through `Φ̂(·, B(t) − B(0))`.
///
/// Per piece `aX + bp + c` of `F̃`: centred second difference, upwind drift, the curvature
/// term `a(Φ̂''/Φ̂')p²` from one-sided differences, and `c/Φ̂'`. A step is refused with
/// [`Error::Cfl`] when `dt` times the local monotonicity rate exceeds 0.9.
pub fn semilinear_run<T: Real>(
    op: &Operator<T>,
    h: &NoiseCoefficient<T>,
    path: &Path<T>,
    u0: &GridFn1<T>,
    t_end: T,
    mesh: &SemilinearMesh<T>,
) -> Result<SemilinearRun<T>> {
    if u0.boundary != Boundary::Periodic {
        return pre("the semilinear solver needs a periodic grid");
    }
    if path.components() != 1 {
        return arg("the semilinear solver takes a scalar path");
    }
    if !(t_end > T::zero()) || t_end > path.horizon() {
        return arg(format!("horizon {t_end} outside (0, {}]", path.horizon()));
    }
    op.validate()?;
    let b0 = path.eval(0, T::zero())?;
    let (bmax, bmin) = path.running_extrema(t_end)?;
    let pad = |lo: T, hi: T, floor: T| {
        let w = (hi - lo) * T::lit(0.1) + floor;
        (lo - w, hi + w)
    };
    let s_range = pad(bmin - b0, bmax - b0, mesh.flow_step);
    let v_range = mesh.v_range.unwrap_or_else(|| pad(u0.min(), u0.max(), T::lit(1e-3) * (T::one() + u0.sup_norm())));
    let flow = flow_solve(h, v_range, mesh.flow_nodes.max(2), s_range, mesh.flow_step)?;
    let problem = transform(op, flow)?;

    let (pieces, is_max) = op.pieces();
    let dx = u0.step;
    let dt = match mesh.dt {
        Some(dt) if dt > T::zero() => dt,
        Some(_) => return arg("time step must be positive"),
        None => {
            // half the monotonicity margin, with room for the slope of v to double
            let (r, lr, w) = problem.flow.ratio_bounds();
            let slope = u0.lipschitz() * T::two();
            let rate = pieces.iter().fold(T::zero(), |m, f| {
                m.max(
                    T::two() * f.a / (dx * dx)
                        + f.b.abs() / dx
                        + T::two() * f.a * r * slope / dx
                        + f.a * lr * slope * slope
                        + f.c.abs() * r * w,
                )
            });
            if rate > T::zero() {
                T::lit(0.45) / rate
            } else {
                t_end
            }
        }
    };
    let steps = (t_end / dt).ceil().to_usize().unwrap_or(1).max(1);
    let dt = t_end / T::from_usize_lossy(steps);
    let time = |k: usize| if k == steps { t_end } else { dt * T::from_usize_lossy(k) };
    let slice_at = |k: usize| -> Result<FlowSlice<T>> { problem.flow.slice(path.eval(0, time(k))? - b0) };

    let n = u0.len();
    let limit = T::lit(crate::schemes::CFL_SAFETY) * (T::one() + T::lit(1e-12));
    let mut v = u0.values.clone();
    let mut run = SemilinearRun { times: vec![T::zero()], u: vec![u0.clone()], problem: problem.clone(), dt };
    let mut slice = slice_at(0)?;
    for k in 0..steps {
        let coef: Vec<(T, T)> =
            v.iter().map(|&vi| slice.eval(vi).map(|(_, d1, d2)| (d2 / d1, T::one() / d1))).collect::<Result<_>>()?;
        let lr = slice.ratio_lipschitz();
        let mut next = Vec::with_capacity(n);
        let mut worst = T::zero();
        for i in 0..n {
            let (l, c, r) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            let (pm, pp) = ((c - l) / dx, (r - c) / dx);
            let xx = (r - c * T::two() + l) / (dx * dx);
            let (ratio, w) = coef[i];
            let big_p = pm.abs().max(pp.abs());
            let mut g = if is_max { T::neg_infinity() } else { T::infinity() };
            for f in &pieces {
                let drift = if f.b > T::zero() { f.b * pp } else { f.b * pm };
                let val = f.a * xx + f.a * upwind_square(ratio, pm, pp) + drift + f.c * w;
                g = if is_max { g.max(val) } else { g.min(val) };
                let rate = T::two() * f.a / (dx * dx)
                    + f.b.abs() / dx
                    + T::two() * f.a * ratio.abs() * big_p / dx
                    + f.a * lr * big_p * big_p
                    + f.c.abs() * ratio.abs() * w;
                worst = worst.max(rate);
            }
            next.push(c + dt * g);
        }
        if dt * worst > limit {
            return Err(Error::Cfl {
                block: k,
                detail: format!("dt·rate = {} > {}", (dt * worst).as_f64(), crate::schemes::CFL_SAFETY),
            });
        }
        v = next;
        slice = slice_at(k + 1)?;
        let u: Vec<T> = v.iter().map(|&vi| slice.eval(vi).map(|e| e.0)).collect::<Result<_>>()?;
        run.times.push(time(k + 1));
        run.u.push(u0.with_values(u));
    }
    Ok(run)
}

/// `‖Du(·, t)‖∞` along a run and the uniform bound it attains.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzAudit<T> {
    pub times: Vec<T>,
    pub lipschitz: Vec<T>,
    pub bound: T,
}

impl<T: Real> LipschitzAudit<T> {
    /// Nonincreasing up to a relative rounding allowance `tol`.
    pub fn is_nonincreasing(&self, tol: T) -> bool {
        self.lipschitz.windows(2).all(|w| w[1] <= w[0] * (T::one() + tol))
    }
}

pub fn lipschitz_bound_audit<T: Real>(run: &SemilinearRun<T>) -> LipschitzAudit<T> {
    let lipschitz: Vec<T> = run.u.iter().map(|u| u.lipschitz()).collect();
    let bound = lipschitz.iter().fold(T::zero(), |m, &l| m.max(l));
    LipschitzAudit { times: run.times.clone(), lipschitz, bound }
}

#[cfg(test)]
mod tests;
