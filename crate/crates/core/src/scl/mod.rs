//! Scalar conservation laws `du + A(u)_x·dB = 0` driven by a continuous path.
//!
//! On a segment where the path moves by `d`, the solution is the entropy solution of
//! `u_t + sign(d)·A(u)_x = 0` run for time `|d|`; segments are composed in order.

mod contraction;
mod field;
mod flux;
mod kinetic;

pub use contraction::{contraction_suite, ContractionCase, ContractionRecord};
pub use field::{CellBoundary, ConservedField};
pub use flux::Flux;
pub use kinetic::{
    chi, defect_estimate, kinetic_density, kinetic_transport_check, DefectEstimate, Kernel, KineticDensity,
    TransportReport, XiGrid,
};

use crate::error::{arg, Error, Result};
use crate::paths::Path;
use crate::scalar::Real;
use crate::semilinear::NoiseCoefficient;

/// Where the rough signal enters the equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SclNoise<T> {
    /// `du + A(u)_x·dB = 0`.
    Flux,
    /// `du + A(u)_x dt = Φ(u)·dB`; refused, see [`check_noise`].
    Source(NoiseCoefficient<T>),
}

/// Only flux noise is supported. With a source term the change of unknown `u = Ψ(v, t)` does
/// not preserve shocks: for Burgers with Heaviside data and `Φ(0) = Φ(1) = 0`, `Φ > 0` on
/// `(0, 1)`, the transformed shock travels at `∫₀¹Ψ(w, t)dw > 1/2` instead of `1/2`.
pub fn check_noise<T: Real>(noise: &SclNoise<T>) -> Result<()> {
    match noise {
        SclNoise::Flux => Ok(()),
        SclNoise::Source(phi) => Err(Error::Precondition(format!(
            "source noise Φ(u)·dB with Φ = {} is not supported: the Doss–Sussman change of unknown \
             does not preserve shock waves for conservation laws",
            phi.describe()
        ))),
    }
}

/// One Engquist–Osher step for `u_t + orientation·A(u)_x = 0`.
///
/// Refuses with [`Error::Cfl`] unless `dt·max|A'| ≤ h` over the range of `u`.
pub fn entropy_step<T: Real>(
    flux: &Flux<T>,
    u: &ConservedField<T>,
    dt: T,
    orientation: i8,
) -> Result<ConservedField<T>> {
    if orientation != 1 && orientation != -1 {
        return arg("orientation must be +1 or -1");
    }
    if !(dt >= T::zero()) {
        return arg("time step must be nonnegative");
    }
    let speed = flux.max_speed(u.min(), u.max())?;
    if dt * speed > u.h * (T::one() + T::lit(1e-12)) {
        return Err(Error::Cfl { block: 0, detail: format!("dt·max|A'| = {} exceeds h = {}", dt * speed, u.h) });
    }
    Ok(step_unchecked(flux, u, dt, orientation))
}

fn step_unchecked<T: Real>(flux: &Flux<T>, u: &ConservedField<T>, dt: T, orientation: i8) -> ConservedField<T> {
    let n = u.len();
    let num = |l: T, r: T| {
        if orientation > 0 {
            flux.plus(l) + flux.minus(r)
        } else {
            -(flux.minus(l) + flux.plus(r))
        }
    };
    // interface k sits between cells k−1 and k, k = 0..=n
    let faces: Vec<T> = (0..=n as isize).map(|k| num(u.ghost(k - 1), u.ghost(k))).collect();
    let lam = dt / u.h;
    let mut out = u.clone();
    for i in 0..n {
        out.u[i] = u.u[i] - lam * (faces[i + 1] - faces[i]);
    }
    out.t = u.t + dt;
    out
}

/// Fraction of the hyperbolic CFL limit used by the pathwise solver.
pub const SCL_CFL: f64 = 0.9;

/// Every substep of a pathwise run, stamped with path time.
#[derive(Clone, Debug)]
pub struct SclRun<T> {
    pub fields: Vec<ConservedField<T>>,
    pub substeps: Vec<usize>,
}

impl<T: Real> SclRun<T> {
    pub fn last(&self) -> &ConservedField<T> {
        self.fields.last().expect("a run records the initial datum")
    }
}

/// Composes entropy steps along the segments of `path` up to `t_end`.
pub fn pathwise_scl_run<T: Real>(
    flux: &Flux<T>,
    path: &Path<T>,
    u0: &ConservedField<T>,
    t_end: T,
) -> Result<SclRun<T>> {
    if path.components() != 1 {
        return arg("conservation laws take a scalar path");
    }
    if !(t_end > T::zero()) || t_end > path.horizon() {
        return arg(format!("horizon {t_end} outside (0, {}]", path.horizon()));
    }
    let path = path.restrict(t_end)?;
    // the maximum principle keeps every later state in the initial range
    let speed = flux.max_speed(u0.min(), u0.max())?;
    let mut u = u0.clone();
    u.t = T::zero();
    let mut run = SclRun { fields: vec![u.clone()], substeps: vec![] };
    let times = path.times();
    for (k, inc) in path.increments().iter().enumerate() {
        let d = inc[0];
        if d == T::zero() || speed == T::zero() {
            run.substeps.push(0);
            u.t = times[k + 1];
            continue;
        }
        let orient = if d > T::zero() { 1 } else { -1 };
        let m = (d.abs() * speed / (T::lit(SCL_CFL) * u0.h)).ceil().to_usize().unwrap_or(1).max(1);
        let dt = d.abs() / T::from_usize_lossy(m);
        let (t0, t1) = (times[k], times[k + 1]);
        for j in 0..m {
            u = step_unchecked(flux, &u, dt, orient);
            u.t = if j + 1 == m { t1 } else { t0 + (t1 - t0) * T::from_usize_lossy(j + 1) / T::from_usize_lossy(m) };
            run.fields.push(u.clone());
        }
        run.substeps.push(m);
    }
    if run.fields.last().map(|f| f.t) != Some(t_end) {
        u.t = t_end;
        run.fields.push(u);
    }
    Ok(run)
}

/// `u(·, T)`; see [`pathwise_scl_run`].
pub fn pathwise_scl_solve<T: Real>(
    flux: &Flux<T>,
    path: &Path<T>,
    u0: &ConservedField<T>,
    t_end: T,
) -> Result<ConservedField<T>> {
    Ok(pathwise_scl_run(flux, path, u0, t_end)?.last().clone())
}

#[cfg(test)]
mod tests;
