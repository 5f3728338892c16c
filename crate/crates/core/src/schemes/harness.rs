//! Error harnesses around [`evolve`]: convergence rates, consistency defects, the 2D
//! nonconvex propagation experiment, and the scheme fallback of the exact solver.

use super::partition::empirical_modulus;
use super::{
    build_partition_brownian, build_partition_cts, build_random_walk, evolve, evolve_2d, first_order_unchecked,
    increment, SchemeConfig,
};
use crate::error::{arg, pre, Result};
use crate::grid::{Boundary, GridFn1, GridFn2};
use crate::hamiltonian::{Hamiltonian, Hamiltonian2};
use crate::paths::{sample_path, HoelderConstruction, Path, PathEnsembleSpec, PathKind};
use crate::scalar::{fit_loglog, median, Real};

/// Driving signal of a rate study.
#[derive(Clone, Debug, PartialEq)]
pub enum DrivingPath<T> {
    /// Fixed Lipschitz zigzag through `(0,0) (.3,.3) (.55,.05) (.8,.3) (1,.1)`, times scaled to the horizon.
    Zigzag,
    /// Takagi-type path of exponent `alpha`.
    Hoelder {
        alpha: T,
    },
    /// Sampled per seed, with the Brownian partition rule.
    Brownian,
    /// Scaled simple random walk per seed; errors against the exact solution driven by the walk itself.
    RandomWalk,
    Given(Path<T>),
}

/// `H = |p|`, `u0 = |x|` on `[−half_width, half_width]`, driven by `driver` up to `horizon`.
#[derive(Clone, Debug)]
pub struct RateProblem<T> {
    pub driver: DrivingPath<T>,
    pub theta: T,
    pub horizon: T,
    pub half_width: T,
    /// Knots of sampled drivers.
    pub resolution: usize,
}

impl<T: Real> RateProblem<T> {
    pub fn abs_cone(driver: DrivingPath<T>) -> Self {
        Self { driver, theta: T::one(), horizon: T::one(), half_width: T::two(), resolution: 1 << 14 }
    }

    fn path(&self, seed: u64) -> Result<Path<T>> {
        let big_t = self.horizon;
        match &self.driver {
            DrivingPath::Zigzag => {
                let k = [(0.0, 0.0), (0.3, 0.3), (0.55, 0.05), (0.8, 0.3), (1.0, 0.1)];
                Path::from_knots(&k.map(|(t, v)| (T::lit(t) * big_t, T::lit(v))))
            }
            DrivingPath::Hoelder { alpha } => sample_path(&PathEnsembleSpec::new(
                seed,
                big_t,
                self.resolution,
                PathKind::Hoelder { alpha: *alpha, construction: HoelderConstruction::Takagi },
            )),
            DrivingPath::Brownian | DrivingPath::RandomWalk => {
                sample_path(&PathEnsembleSpec::new(seed, big_t, self.resolution, PathKind::Brownian))
            }
            DrivingPath::Given(p) => Ok(p.clone()),
        }
    }

    fn is_random(&self) -> bool {
        matches!(self.driver, DrivingPath::Brownian | DrivingPath::RandomWalk)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateRow<T> {
    pub h: T,
    pub seed: u64,
    pub rho_h: T,
    pub sup_error: T,
    /// Error over `h^{1/3}|log h|^{1/3}` for random drivers, over `ω(ρ_h^{1/2})` otherwise.
    pub normalized_error: T,
    /// `u_h(0, T)`.
    pub value_at_origin: T,
}

#[derive(Clone, Debug)]
pub struct RateReport<T> {
    pub rows: Vec<RateRow<T>>,
    /// `(h, median sup error, median normalized error)` per level, in input order.
    pub levels: Vec<(T, T, T)>,
    /// Log-log slope of the median error against `h`.
    pub slope: T,
    /// For random walks: quantiles (10, 25, 50, 75, 90 %) of `u_h(0,T)` at the finest `h`
    /// and of the exact value under Brownian paths of the same seeds.
    pub quantiles: Option<(Vec<T>, Vec<T>)>,
}

impl<T: Real> RateReport<T> {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,rho_h,sup_error,normalized_error\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{:e},{:e},{:e},{:e}\n",
                r.h.as_f64(),
                r.rho_h.as_f64(),
                r.sup_error.as_f64(),
                r.normalized_error.as_f64()
            ));
        }
        s
    }
}

/// Runs the scheme for `H = |p|` and returns `sup |u_h − u|` over every partition time and
/// grid point, with `u = max[(|x| + ξ(t))₊, (max_{s≤t} ξ)₊]`, plus the final field.
fn sup_error_along_partition<T: Real>(
    cfg: &SchemeConfig<T>,
    u0: &GridFn1<T>,
    path: &Path<T>,
) -> Result<(T, GridFn1<T>)> {
    cfg.validate()?;
    let hams = [Hamiltonian::abs()];
    let xs = u0.xs();
    let (ts, vs) = (path.times(), path.values(0));
    let mut knot = 0;
    let mut running = T::zero();
    let mut u = u0.clone();
    let mut err = T::zero();
    for w in cfg.partition.windows(2) {
        let db = increment(&cfg.path_h, w[0], w[1]);
        if db[0].abs() > cfg.increment_bound() * (T::one() + T::lit(1e-12)) {
            return Err(crate::Error::Cfl { block: 0, detail: format!("increment {} at t = {}", db[0], w[0]) });
        }
        u = first_order_unchecked(&u, &hams, &db, cfg.theta, cfg.h);
        while knot < ts.len() && ts[knot] <= w[1] {
            running = running.max(vs[knot]);
            knot += 1;
        }
        let xi = path.eval_clamped(0, w[1]);
        let m = running.max(xi);
        for (x, v) in xs.iter().zip(&u.values) {
            err = err.max((*v - (x.abs() + xi).max(m)).abs());
        }
    }
    Ok((err, u))
}

fn quantiles<T: Real>(mut v: Vec<T>) -> Vec<T> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    [0.1, 0.25, 0.5, 0.75, 0.9]
        .iter()
        .map(|q| {
            let pos = T::lit(*q) * T::from_usize_lossy(v.len() - 1);
            let i = pos.floor().to_usize().unwrap_or(0).min(v.len() - 1);
            let j = (i + 1).min(v.len() - 1);
            let f = pos - T::from_usize_lossy(i);
            v[i] + (v[j] - v[i]) * f
        })
        .collect()
}

/// Sup errors of the first-order scheme on the `|x|` problem over an `h` grid and seeds.
pub fn rate_harness<T: Real>(problem: &RateProblem<T>, hs: &[T], seeds: &[u64]) -> Result<RateReport<T>> {
    if hs.len() < 3 {
        return arg("a rate fit needs at least three h values");
    }
    let seeds: Vec<u64> = if problem.is_random() {
        if seeds.is_empty() {
            return arg("random drivers need at least one seed");
        }
        seeds.to_vec()
    } else {
        vec![seeds.first().copied().unwrap_or(0)]
    };
    let big_t = problem.horizon;
    let mut rows = Vec::new();
    for &h in hs {
        let half = (problem.half_width / h).round().to_usize().unwrap_or(1).max(1);
        let a = h * T::from_usize_lossy(half);
        let u0 = GridFn1::from_fn(-a, h, 2 * half + 1, Boundary::LinearExtension, |x| x.abs())?;
        for &seed in &seeds {
            let path = problem.path(seed)?;
            let cfg = match problem.driver {
                DrivingPath::Brownian => build_partition_brownian(&path, h, problem.theta, T::one())?,
                DrivingPath::RandomWalk => build_random_walk(seed, h, problem.theta, T::one(), big_t)?,
                _ => build_partition_cts(&path, h, problem.theta, T::one())?,
            };
            let reference = if problem.driver == DrivingPath::RandomWalk { &cfg.path_h } else { &path };
            let (err, last) = sup_error_along_partition(&cfg, &u0, reference)?;
            let norm = if problem.is_random() {
                (h * (-h.ln())).powf(T::one() / T::lit(3.0))
            } else {
                empirical_modulus(&path)(cfg.rho.sqrt())
            };
            let normalized = if norm > T::zero() { err / norm } else { T::zero() };
            rows.push(RateRow {
                h,
                seed,
                rho_h: cfg.rho,
                sup_error: err,
                normalized_error: normalized,
                value_at_origin: last.eval(T::zero()),
            });
        }
    }
    let levels: Vec<(T, T, T)> = hs
        .iter()
        .map(|&h| {
            let e: Vec<T> = rows.iter().filter(|r| r.h == h).map(|r| r.sup_error).collect();
            let n: Vec<T> = rows.iter().filter(|r| r.h == h).map(|r| r.normalized_error).collect();
            (h, median(&e), median(&n))
        })
        .collect();
    let (slope, _) =
        fit_loglog(&levels.iter().map(|l| l.0).collect::<Vec<_>>(), &levels.iter().map(|l| l.1).collect::<Vec<_>>());
    let quantiles = if problem.driver == DrivingPath::RandomWalk {
        let finest = hs.iter().copied().fold(T::infinity(), T::min);
        let scheme: Vec<T> = rows.iter().filter(|r| r.h == finest).map(|r| r.value_at_origin).collect();
        let mut exact = Vec::new();
        for &seed in &seeds {
            let p = problem.path(seed)?;
            let xi = p.eval(0, big_t)?;
            let m = p.running_extrema(big_t)?.0.pos();
            exact.push(xi.pos().max(m));
        }
        Some((quantiles(scheme), quantiles(exact)))
    } else {
        None
    };
    Ok(RateReport { rows, levels, slope, quantiles })
}

/// `max |(S_h(t,s)Φ_s − Φ_t)/(t − s)|` over interior grid points, for `F ≡ 0`.
///
/// `s` and `t` must be partition times; every cell between them is stepped.
pub fn consistency_probe<T: Real>(
    cfg: &SchemeConfig<T>,
    hs: &[Hamiltonian<T>],
    phi_s: &GridFn1<T>,
    phi_t: &GridFn1<T>,
    s: T,
    t: T,
) -> Result<T> {
    cfg.validate()?;
    if !(t > s) {
        return arg("probe needs s < t");
    }
    let tol = T::lit(1e-12) * cfg.horizon();
    let find = |x: T| cfg.partition.iter().position(|&p| (p - x).abs() <= tol);
    let (a, b) = match (find(s), find(t)) {
        (Some(a), Some(b)) => (a, b),
        _ => return arg("probe times must lie on the partition"),
    };
    let mut u = phi_s.clone();
    for k in a..b {
        let db = increment(&cfg.path_h, cfg.partition[k], cfg.partition[k + 1]);
        u = first_order_unchecked(&u, hs, &db, cfg.theta, cfg.h);
    }
    let n = u.len();
    if n < 5 || !u.same_grid(phi_t) {
        return arg("probe grids must match and have at least five points");
    }
    let mut worst = T::zero();
    for i in 2..n - 2 {
        worst = worst.max(((u.values[i] - phi_t.values[i]) / (t - s)).abs());
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GassiatReport<T> {
    /// `u(0, 0, T)`.
    pub value: T,
    /// `u(0, 0, T)` of the same run with the plateau removed (pure scheme smoothing of `|x − y|`).
    pub baseline: T,
    /// `value − baseline`.
    pub excess: T,
    pub total_variation: T,
    /// Monotone pieces of the path.
    pub pieces: usize,
    /// `((TV − R)/pieces)₊ ∧ 1`.
    pub lower_bound: T,
}

fn monotone_pieces<T: Real>(p: &Path<T>) -> usize {
    let mut pieces = 0;
    let mut last = 0i8;
    for inc in p.increments() {
        let s = if inc[0] > T::zero() {
            1
        } else if inc[0] < T::zero() {
            -1
        } else {
            0
        };
        if s != 0 && s != last {
            pieces += 1;
            last = s;
        }
    }
    pieces
}

/// `du = (|u_x| − |u_y|)·dξ`, `u0 = |x − y| + Θ` with `Θ = R` where `min(x, y) ≥ R`,
/// ramping to 0 over two cells below, on `[−a, a]²` with `a = max(TV(ξ), R) + 0.6`.
pub fn gassiat_experiment<T: Real>(r: T, path: &Path<T>, h: T, theta: T) -> Result<GassiatReport<T>> {
    if !(r > T::zero()) {
        return arg("plateau height R must be positive");
    }
    let big_t = path.horizon();
    let tv = path.total_variation(T::zero(), big_t)?;
    let half = ((tv.max(r) + T::lit(0.6)) / h).ceil().to_usize().unwrap_or(1);
    let a = h * T::from_usize_lossy(half);
    let n = 2 * half + 1;
    let ham = Hamiltonian2::gassiat();
    let (lx, ly) = ham.lipschitz(T::one());
    let mut cfg = SchemeConfig {
        h,
        theta,
        cfl: T::zero(),
        eps: T::zero(),
        partition: path.times().to_vec(),
        path_h: path.clone(),
        dim: 2,
        boundary: Boundary::LinearExtension,
        lipschitz: lx.max(ly),
        rho: big_t,
        block_cells: 1,
    };
    cfg.refine_for_cfl();
    let width = T::two() * h;
    let plateau = |x: T, y: T| r * ((x.min(y) - r) / width + T::one()).max(T::zero()).min(T::one());
    let origin = (-a, -a);
    let u0 = GridFn2::from_fn(origin, (h, h), n, n, Boundary::LinearExtension, |x, y| (x - y).abs() + plateau(x, y))?;
    let v0 = GridFn2::from_fn(origin, (h, h), n, n, Boundary::LinearExtension, |x, y| (x - y).abs())?;
    let value = evolve_2d(&cfg, &ham, &u0, big_t)?.at(half, half);
    let baseline = evolve_2d(&cfg, &ham, &v0, big_t)?.at(half, half);
    let pieces = monotone_pieces(path);
    let lower_bound =
        if pieces == 0 { T::zero() } else { ((tv - r) / T::from_usize_lossy(pieces)).pos().min(T::one()) };
    Ok(GassiatReport { value, baseline, excess: value - baseline, total_variation: tv, pieces, lower_bound })
}

/// First-order scheme on the empirical-modulus partition with `θ = 1`; the fallback of
/// the exact solver for Hamiltonians without a convex splitting.
pub fn solve_by_scheme<T: Real>(
    hs: &[Hamiltonian<T>],
    path: &Path<T>,
    u0: &GridFn1<T>,
    t_end: T,
) -> Result<GridFn1<T>> {
    let grad = u0.lipschitz();
    let lip = hs.iter().map(|h| h.lipschitz(grad)).fold(T::zero(), T::max);
    if !lip.is_finite() {
        return pre("the scheme needs Lipschitz Hamiltonians on the range of slopes of u0");
    }
    let p = if t_end < path.horizon() { path.restrict(t_end)? } else { path.clone() };
    let cfg = build_partition_cts(&p, u0.step, T::one(), lip)?.with_boundary(u0.boundary);
    Ok(evolve(&cfg, hs, u0, p.horizon())?.last().clone())
}
