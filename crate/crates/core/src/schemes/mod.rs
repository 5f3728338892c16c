//! Monotone Lax–Friedrichs type schemes for `du = Σᵢ Hⁱ(Du)·dBᵢ (+ F(D²u)·dt)` driven by
//! regularized piecewise-linear paths on path-adapted partitions.

mod harness;
mod partition;

pub use harness::{
    consistency_probe, gassiat_experiment, rate_harness, solve_by_scheme, DrivingPath, GassiatReport, RateProblem,
    RateReport, RateRow,
};
pub use partition::{
    build_partition_brownian, build_partition_cts, build_partition_with_modulus, build_random_walk, empirical_modulus,
};

use crate::error::{arg, Error, Result};
use crate::grid::{Boundary, GridFn1, GridFn2};
use crate::hamiltonian::{Hamiltonian, Hamiltonian2};
use crate::paths::Path;
use crate::scalar::Real;

/// Every CFL bound is multiplied by this factor before use.
pub const CFL_SAFETY: f64 = 0.9;

/// Scheme parameters together with the partition and the path driving it.
#[derive(Clone, Debug)]
pub struct SchemeConfig<T> {
    pub h: T,
    pub theta: T,
    /// Realized `λ` (`ρ_h`-formula value) at the chosen `ρ_h`.
    pub cfl: T,
    /// Artificial viscosity `ε_h = h·‖Ḃ_h‖` for the second-order step.
    pub eps: T,
    /// Strictly increasing times from 0 to the horizon.
    pub partition: Vec<T>,
    /// Piecewise-linear approximating path, linear on every partition cell.
    pub path_h: Path<T>,
    pub dim: usize,
    pub boundary: Boundary,
    /// Bound on `|Hⁱ'|` used by the CFL test.
    pub lipschitz: T,
    pub rho: T,
    /// `M_h`: partition cells per block of the approximating path.
    pub block_cells: usize,
}

impl<T: Real> SchemeConfig<T> {
    pub fn horizon(&self) -> T {
        *self.partition.last().expect("validated partition")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > T::zero() && self.theta <= T::one()) {
            return arg(format!("θ = {} outside (0, 1]", self.theta));
        }
        if !(self.h > T::zero()) {
            return arg("h must be positive");
        }
        if self.dim != 1 && self.dim != 2 {
            return arg("dim must be 1 or 2");
        }
        if self.partition.len() < 2 || self.partition[0] != T::zero() {
            return arg("partition must start at 0 and have at least one cell");
        }
        if self.partition.windows(2).any(|w| !(w[1] > w[0])) {
            return arg("partition must be strictly increasing");
        }
        if self.path_h.horizon() < self.horizon() {
            return arg("approximating path ends before the partition");
        }
        Ok(())
    }

    /// Largest admissible `Σ|dBᵢ|` for one first-order step.
    pub fn increment_bound(&self) -> T {
        let l = if self.lipschitz > T::zero() { self.lipschitz } else { T::min_positive_value() };
        T::lit(CFL_SAFETY) * self.theta * self.h / (l * T::from_usize_lossy(self.dim))
    }

    /// Splits every partition cell whose increment breaks the CFL bound into equal subcells.
    ///
    /// The path is linear on each cell, so this only refines time and leaves `path_h` intact.
    pub fn refine_for_cfl(&mut self) {
        let bound = self.increment_bound();
        let mut out = vec![self.partition[0]];
        for w in self.partition.windows(2) {
            let d = increment(&self.path_h, w[0], w[1]).iter().fold(T::zero(), |s, v| s + v.abs());
            let q = if d > bound { (d / bound).ceil().to_usize().unwrap_or(1).max(1) } else { 1 };
            for j in 1..=q {
                out.push(if j == q {
                    w[1]
                } else {
                    w[0] + (w[1] - w[0]) * T::from_usize_lossy(j) / T::from_usize_lossy(q)
                });
            }
        }
        self.partition = out;
    }

    /// Same partition re-checked for a `dim`-dimensional grid.
    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self.refine_for_cfl();
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }
}

pub(crate) fn increment<T: Real>(p: &Path<T>, s: T, t: T) -> Vec<T> {
    (0..p.components()).map(|c| p.eval_clamped(c, t) - p.eval_clamped(c, s)).collect()
}

fn check_cfl<T: Real>(cfg: &SchemeConfig<T>, db: &[T], block: usize) -> Result<T> {
    let total = db.iter().fold(T::zero(), |s, v| s + v.abs());
    let bound = cfg.increment_bound();
    if total > bound * (T::one() + T::lit(1e-12)) {
        return Err(Error::Cfl {
            block,
            detail: format!(
                "Σ|dB| = {total} exceeds {bound} (θ = {}, h = {}, L = {})",
                cfg.theta, cfg.h, cfg.lipschitz
            ),
        });
    }
    Ok(T::one() - total / bound * T::lit(CFL_SAFETY))
}

fn check_step<T: Real>(cfg: &SchemeConfig<T>, step: T) -> Result<()> {
    if (step - cfg.h).abs() > T::lit(1e-9) * cfg.h {
        return arg(format!("grid step {step} differs from scheme h = {}", cfg.h));
    }
    Ok(())
}

/// `u + Σᵢ Hⁱ(central slope)·dBᵢ + (θ/2)(u(x+h) + u(x−h) − 2u(x))`.
///
/// The increment is formed from differences only, so adding a constant to `u` commutes
/// with the step whenever the arithmetic is exact.
pub fn lf_step_first_order<T: Real>(
    u: &GridFn1<T>,
    hs: &[Hamiltonian<T>],
    db: &[T],
    cfg: &SchemeConfig<T>,
) -> Result<GridFn1<T>> {
    if hs.len() != db.len() {
        return arg("one increment per Hamiltonian");
    }
    check_step(cfg, u.step)?;
    check_cfl(cfg, db, 0)?;
    Ok(first_order_unchecked(u, hs, db, cfg.theta, cfg.h))
}

fn first_order_unchecked<T: Real>(u: &GridFn1<T>, hs: &[Hamiltonian<T>], db: &[T], theta: T, h: T) -> GridFn1<T> {
    let n = u.len();
    let two_h = T::two() * h;
    let half_theta = theta * T::half();
    let v = &u.values;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let c = v[i];
        let (l, r) =
            if i > 0 && i + 1 < n { (v[i - 1], v[i + 1]) } else { (u.get(i as isize - 1), u.get(i as isize + 1)) };
        let dr = r - c;
        let dl = l - c;
        let p = (dr - dl) / two_h;
        let mut inc = half_theta * (dr + dl);
        for (hh, &d) in hs.iter().zip(db) {
            if d != T::zero() {
                inc += hh.eval(p) * d;
            }
        }
        out.push(c + inc);
    }
    u.with_values(out)
}

/// One-dimensional nondecreasing diffusion `F(u_xx)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Diffusion<T> {
    Zero,
    /// `F(r) = ν·r`, `ν ≥ 0`.
    Linear {
        nu: T,
    },
}

impl<T: Real> Diffusion<T> {
    pub fn eval(&self, r: T) -> T {
        match *self {
            Self::Zero => T::zero(),
            Self::Linear { nu } => nu * r,
        }
    }

    /// `‖F'‖∞`.
    pub fn lipschitz(&self) -> T {
        match *self {
            Self::Zero => T::zero(),
            Self::Linear { nu } => nu.abs(),
        }
    }
}

/// `u + Σᵢ Hⁱ(central slope)·dBᵢ + [F(D²u) + ε_h·D²u]·dt` with `ε_h = cfg.eps`.
///
/// Refuses unless `2(‖F'‖ + ε_h)·dt/h² ≤ 0.9`.
pub fn lf_step_second_order<T: Real>(
    u: &GridFn1<T>,
    hs: &[Hamiltonian<T>],
    db: &[T],
    dt: T,
    f: Diffusion<T>,
    cfg: &SchemeConfig<T>,
) -> Result<GridFn1<T>> {
    if hs.len() != db.len() {
        return arg("one increment per Hamiltonian");
    }
    if dt < T::zero() {
        return arg("dt must be nonnegative");
    }
    check_step(cfg, u.step)?;
    let h2 = cfg.h * cfg.h;
    let ratio = T::two() * (f.lipschitz() + cfg.eps) * dt / h2;
    if ratio > T::lit(CFL_SAFETY) {
        return Err(Error::Cfl {
            block: 0,
            detail: format!("parabolic ratio 2(‖F'‖+ε)dt/h² = {ratio} exceeds {CFL_SAFETY}"),
        });
    }
    let n = u.len();
    let two_h = T::two() * cfg.h;
    let v = &u.values;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let c = v[i];
        let (l, r) =
            if i > 0 && i + 1 < n { (v[i - 1], v[i + 1]) } else { (u.get(i as isize - 1), u.get(i as isize + 1)) };
        let dr = r - c;
        let dl = l - c;
        let p = (dr - dl) / two_h;
        let lap = (dr + dl) / h2;
        let mut inc = (f.eval(lap) + cfg.eps * lap) * dt;
        for (hh, &d) in hs.iter().zip(db) {
            if d != T::zero() {
                inc += hh.eval(p) * d;
            }
        }
        out.push(c + inc);
    }
    Ok(u.with_values(out))
}

/// Two-dimensional first-order step with per-axis central slopes and viscosity `θ/4` per axis.
pub fn lf_step_2d<T: Real>(u: &GridFn2<T>, h2: &Hamiltonian2<T>, db: T, cfg: &SchemeConfig<T>) -> Result<GridFn2<T>> {
    if cfg.dim != 2 {
        return arg("2D step needs a config with dim = 2");
    }
    check_step(cfg, u.step.0)?;
    check_step(cfg, u.step.1)?;
    check_cfl(cfg, &[db], 0)?;
    Ok(step_2d_unchecked(u, h2, db, cfg.theta, cfg.h))
}

fn step_2d_unchecked<T: Real>(u: &GridFn2<T>, h2: &Hamiltonian2<T>, db: T, theta: T, h: T) -> GridFn2<T> {
    let (nx, ny) = (u.nx, u.ny);
    let v = &u.values;
    let two_h = T::two() * h;
    let quarter = theta * T::lit(0.25);
    let mut out = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let c = v[i * ny + j];
            let inner = i > 0 && i + 1 < nx && j > 0 && j + 1 < ny;
            let (w, e, s, n) = if inner {
                (v[(i - 1) * ny + j], v[(i + 1) * ny + j], v[i * ny + j - 1], v[i * ny + j + 1])
            } else {
                let (ii, jj) = (i as isize, j as isize);
                (u.get(ii - 1, jj), u.get(ii + 1, jj), u.get(ii, jj - 1), u.get(ii, jj + 1))
            };
            let (de, dw, dn, ds) = (e - c, w - c, n - c, s - c);
            let p = (de - dw) / two_h;
            let q = (dn - ds) / two_h;
            let mut inc = quarter * ((de + dw) + (dn + ds));
            if db != T::zero() {
                inc += h2.eval(p, q) * db;
            }
            out.push(c + inc);
        }
    }
    u.with_values(out)
}

/// Output of [`evolve`].
#[derive(Clone, Debug)]
pub struct SchemeRun<T> {
    pub config: SchemeConfig<T>,
    pub u0: GridFn1<T>,
    /// At every block boundary of the approximating path and at the final time.
    pub snapshots: Vec<(T, GridFn1<T>)>,
    /// `Σᵢ|dBᵢ|` per step.
    pub increments: Vec<T>,
    /// Smallest relative CFL slack `1 − Σ|dB|/(θh/(L·dim))` over all steps.
    pub monotonicity_margin: T,
}

impl<T: Real> SchemeRun<T> {
    pub fn last(&self) -> &GridFn1<T> {
        &self.snapshots.last().expect("at least one snapshot").1
    }
}

/// Steps the first-order scheme across the partition up to `t_end`.
pub fn evolve<T: Real>(
    cfg: &SchemeConfig<T>,
    hs: &[Hamiltonian<T>],
    u0: &GridFn1<T>,
    t_end: T,
) -> Result<SchemeRun<T>> {
    cfg.validate()?;
    check_step(cfg, u0.step)?;
    if hs.len() != cfg.path_h.components() {
        return arg("one Hamiltonian per path component");
    }
    if t_end > cfg.horizon() || t_end < T::zero() {
        return arg(format!("time {t_end} outside the partition [0, {}]", cfg.horizon()));
    }
    let mut u = u0.clone();
    let mut run = SchemeRun {
        config: cfg.clone(),
        u0: u0.clone(),
        snapshots: vec![(T::zero(), u0.clone())],
        increments: Vec::new(),
        monotonicity_margin: T::one(),
    };
    let block_len = cfg.rho * T::from_usize_lossy(cfg.block_cells.max(1));
    let mut next_block = block_len;
    for (k, w) in cfg.partition.windows(2).enumerate() {
        if w[0] >= t_end {
            break;
        }
        let b = w[1].min(t_end);
        let db = increment(&cfg.path_h, w[0], b);
        let margin = check_cfl(cfg, &db, k)?;
        run.monotonicity_margin = run.monotonicity_margin.min(margin);
        run.increments.push(db.iter().fold(T::zero(), |s, v| s + v.abs()));
        u = first_order_unchecked(&u, hs, &db, cfg.theta, cfg.h);
        let tol = T::lit(1e-12) * cfg.horizon();
        if b >= next_block - tol || b >= t_end {
            run.snapshots.push((b, u.clone()));
            while next_block <= b + tol {
                next_block += block_len;
            }
        }
    }
    if run.snapshots.last().map(|s| s.0) != Some(t_end) && t_end > T::zero() {
        run.snapshots.push((t_end, u));
    }
    Ok(run)
}

/// Two-dimensional analogue of [`evolve`]; returns the field at `t_end`.
///
/// Cells over which the path does not move are skipped rather than smoothed, so a
/// stationary path leaves the data untouched.
pub fn evolve_2d<T: Real>(
    cfg: &SchemeConfig<T>,
    h2: &Hamiltonian2<T>,
    u0: &GridFn2<T>,
    t_end: T,
) -> Result<GridFn2<T>> {
    cfg.validate()?;
    if cfg.dim != 2 {
        return arg("2D evolution needs a config with dim = 2");
    }
    check_step(cfg, u0.step.0)?;
    let mut u = u0.clone();
    for (k, w) in cfg.partition.windows(2).enumerate() {
        if w[0] >= t_end {
            break;
        }
        let db = increment(&cfg.path_h, w[0], w[1].min(t_end))[0];
        if db == T::zero() {
            continue;
        }
        check_cfl(cfg, &[db], k)?;
        u = step_2d_unchecked(&u, h2, db, cfg.theta, cfg.h);
    }
    Ok(u)
}
