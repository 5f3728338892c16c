//! Path-adapted partitions `{nρ_h ∧ T}` and block-interpolated approximating paths.

use super::{SchemeConfig, CFL_SAFETY};
use crate::error::{arg, Error, Result};
use crate::grid::Boundary;
use crate::paths::sample::signs;
use crate::paths::Path;
use crate::scalar::Real;
use std::collections::VecDeque;

const MAX_CELLS: usize = 20_000_000;

/// `sup_{|t−s|≤r} |ξ(t) − ξ(s)|` over all components, exact for piecewise-linear paths.
///
/// The window oscillation is convex in the window position between knot events, so it
/// suffices to scan windows with one edge on a knot.
pub(crate) fn window_oscillation<T: Real>(p: &Path<T>, r: T) -> T {
    let ts = p.times();
    let n = ts.len();
    let mut best = T::zero();
    for c in 0..p.components() {
        let vs = p.values(c);
        // windows [t_i, t_i + r]
        let (mut hi, mut lo): (VecDeque<usize>, VecDeque<usize>) = (VecDeque::new(), VecDeque::new());
        let mut j = 0;
        for i in 0..n {
            while j < n && ts[j] - ts[i] <= r {
                while hi.back().is_some_and(|&k| vs[k] <= vs[j]) {
                    hi.pop_back();
                }
                hi.push_back(j);
                while lo.back().is_some_and(|&k| vs[k] >= vs[j]) {
                    lo.pop_back();
                }
                lo.push_back(j);
                j += 1;
            }
            while hi.front().is_some_and(|&k| k < i) {
                hi.pop_front();
            }
            while lo.front().is_some_and(|&k| k < i) {
                lo.pop_front();
            }
            let e = p.eval_clamped(c, ts[i] + r);
            let mx = vs[*hi.front().unwrap()].max(e);
            let mn = vs[*lo.front().unwrap()].min(e);
            best = best.max(mx - mn);
        }
        // windows [t_j − r, t_j]
        let (mut hi, mut lo): (VecDeque<usize>, VecDeque<usize>) = (VecDeque::new(), VecDeque::new());
        let mut i = 0;
        for j in 0..n {
            while hi.back().is_some_and(|&k| vs[k] <= vs[j]) {
                hi.pop_back();
            }
            hi.push_back(j);
            while lo.back().is_some_and(|&k| vs[k] >= vs[j]) {
                lo.pop_back();
            }
            lo.push_back(j);
            while ts[j] - ts[i] > r {
                i += 1;
            }
            while hi.front().is_some_and(|&k| k < i) {
                hi.pop_front();
            }
            while lo.front().is_some_and(|&k| k < i) {
                lo.pop_front();
            }
            let e = p.eval_clamped(c, ts[j] - r);
            let mx = vs[*hi.front().unwrap()].max(e);
            let mn = vs[*lo.front().unwrap()].min(e);
            best = best.max(mx - mn);
        }
    }
    best
}

/// Upper envelope of the modulus of continuity from exact values at dyadic lags `T·2^{−j}`.
///
/// Between lags the value of the next larger lag is used; below the finest lag (which lies
/// under the smallest knot spacing) the modulus is exactly linear.
pub fn empirical_modulus<T: Real>(p: &Path<T>) -> impl Fn(T) -> T {
    let big_t = p.horizon();
    let min_gap = p.times().windows(2).fold(big_t, |m, w| m.min(w[1] - w[0]));
    let mut lags = vec![big_t];
    let mut omegas = vec![window_oscillation(p, big_t)];
    while *lags.last().unwrap() > min_gap && lags.len() < 60 {
        let r = *lags.last().unwrap() * T::half();
        lags.push(r);
        omegas.push(window_oscillation(p, r));
    }
    move |r: T| {
        if r <= T::zero() {
            return T::zero();
        }
        let k = lags.len() - 1;
        if r <= lags[k] {
            return omegas[k] * r / lags[k];
        }
        // lags decrease; find the smallest lag ≥ r
        let mut j = 0;
        while j + 1 < lags.len() && lags[j + 1] >= r {
            j += 1;
        }
        omegas[j]
    }
}

/// Largest `ρ ∈ (0, cap]` with `g(ρ) ≤ target` for nondecreasing `g`, by bisection in `log ρ`.
fn largest_admissible<T: Real>(g: impl Fn(T) -> T, target: T, cap: T) -> Option<T> {
    if g(cap) <= target {
        return Some(cap);
    }
    let mut lo = cap * T::lit(1e-18);
    if g(lo) > target {
        return None;
    }
    let mut hi = cap;
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

fn block_cells<T: Real>(rho: T) -> usize {
    (T::one() / rho.sqrt()).floor().to_usize().unwrap_or(1).max(1)
}

/// Partition `{nρ ∧ T}` with `path_h` given at block ends `k·M_h·ρ`.
fn assemble<T: Real>(
    h: T,
    theta: T,
    lip: T,
    rho: T,
    lambda: T,
    big_t: T,
    block_value: impl Fn(usize, T) -> Vec<T>,
) -> Result<SchemeConfig<T>> {
    let cells = (big_t / rho).ceil().to_usize().unwrap_or(usize::MAX);
    if cells > MAX_CELLS {
        return Err(Error::Precondition(format!(
            "ρ_h = {rho} needs {cells} steps at h = {h}; a coarser h or a smaller θ/L ratio is required"
        )));
    }
    let m = block_cells(rho);
    let mut partition: Vec<T> = (0..cells).map(|n| T::from_usize_lossy(n) * rho).filter(|&t| t < big_t).collect();
    partition.push(big_t);
    let mut knots = Vec::new();
    let mut k = 0;
    loop {
        let t = T::from_usize_lossy(k * m) * rho;
        if t >= big_t {
            break;
        }
        knots.push(t);
        k += 1;
    }
    knots.push(big_t);
    let comps = block_value(0, T::zero()).len();
    let mut values = vec![Vec::with_capacity(knots.len()); comps];
    for (k, &t) in knots.iter().enumerate() {
        for (c, v) in block_value(k, t).into_iter().enumerate() {
            values[c].push(v);
        }
    }
    let path_h = Path::new(knots, values)?;
    let eps = {
        let mut s = T::zero();
        for (k, w) in path_h.times().windows(2).enumerate() {
            let tot = (0..comps).fold(T::zero(), |a, c| a + (path_h.values(c)[k + 1] - path_h.values(c)[k]).abs());
            s = s.max(tot / (w[1] - w[0]));
        }
        h * s
    };
    let mut cfg = SchemeConfig {
        h,
        theta,
        cfl: lambda,
        eps,
        partition,
        path_h,
        dim: 1,
        boundary: Boundary::LinearExtension,
        lipschitz: lip,
        rho,
        block_cells: m,
    };
    cfg.refine_for_cfl();
    Ok(cfg)
}

fn check_common<T: Real>(h: T, theta: T, lip: T) -> Result<()> {
    if !(h > T::zero()) {
        return arg("h must be positive");
    }
    if !(theta > T::zero() && theta <= T::one()) {
        return arg("θ must lie in (0, 1]");
    }
    if !(lip >= T::zero()) || !lip.is_finite() {
        return arg("L must be finite and nonnegative");
    }
    Ok(())
}

/// `ρ_h` from `ρ^{1/2}·ω(ρ^{1/2})/h ≤ 0.9θ/L` for a supplied modulus `ω`.
pub fn build_partition_with_modulus<T: Real>(
    path: &Path<T>,
    h: T,
    theta: T,
    lip: T,
    omega: impl Fn(T) -> T,
) -> Result<SchemeConfig<T>> {
    check_common(h, theta, lip)?;
    let big_t = path.horizon();
    let target = T::lit(CFL_SAFETY) * theta / lip.max(T::min_positive_value());
    let g = |rho: T| rho.sqrt() * omega(rho.sqrt()) / h;
    let rho = largest_admissible(g, target, big_t)
        .ok_or_else(|| Error::Precondition(format!("no ρ_h satisfies the CFL bound at h = {h}; try a larger h")))?;
    assemble(h, theta, lip, rho, g(rho), big_t, |_, t| path.eval_all(t.min(big_t)).expect("inside the path"))
}

/// [`build_partition_with_modulus`] with the empirical modulus of the path.
pub fn build_partition_cts<T: Real>(path: &Path<T>, h: T, theta: T, lip: T) -> Result<SchemeConfig<T>> {
    let omega = empirical_modulus(path);
    build_partition_with_modulus(path, h, theta, lip, omega)
}

/// `ρ_h` from `ρ^{3/4}|log ρ|^{1/2}/h ≤ 0.9θ/L`, searched on `(0, min(T, e^{−2/3})]` where the
/// left side is increasing.
pub fn build_partition_brownian<T: Real>(path: &Path<T>, h: T, theta: T, lip: T) -> Result<SchemeConfig<T>> {
    check_common(h, theta, lip)?;
    let big_t = path.horizon();
    let target = T::lit(CFL_SAFETY) * theta / lip.max(T::min_positive_value());
    let g = |rho: T| rho.powf(T::lit(0.75)) * (-rho.ln()).sqrt() / h;
    let cap = big_t.min(T::lit((-2.0f64 / 3.0).exp()));
    let rho = largest_admissible(g, target, cap)
        .ok_or_else(|| Error::Precondition(format!("no ρ_h satisfies the CFL bound at h = {h}")))?;
    assemble(h, theta, lip, rho, g(rho), big_t, |_, t| path.eval_all(t.min(big_t)).expect("inside the path"))
}

/// Scaled simple random walk: `ρ_h = (0.9θh/L)^{4/3}` and blocks of length `M_hρ_h` with
/// slopes `±(M_hρ_h)^{−1/2}` from the seed.
pub fn build_random_walk<T: Real>(seed: u64, h: T, theta: T, lip: T, big_t: T) -> Result<SchemeConfig<T>> {
    check_common(h, theta, lip)?;
    if !(big_t > T::zero()) {
        return arg("horizon must be positive");
    }
    let target = T::lit(CFL_SAFETY) * theta / lip.max(T::min_positive_value());
    let rho = (target * h).powf(T::lit(4.0 / 3.0)).min(big_t);
    let m = block_cells(rho);
    let block = T::from_usize_lossy(m) * rho;
    let blocks = (big_t / block).ceil().to_usize().unwrap_or(1).max(1);
    let s = signs(seed, 0, blocks);
    let amp = block.sqrt();
    let mut levels = vec![T::zero()];
    for (k, &sg) in s.iter().enumerate() {
        let start = T::from_usize_lossy(k * m) * rho;
        let len = (T::from_usize_lossy((k + 1) * m) * rho).min(big_t) - start;
        let d = if len < block { T::lit(sg as f64) * len / amp } else { T::lit(sg as f64) * amp };
        levels.push(levels[k] + d);
    }
    let lambda = rho.powf(T::lit(0.75)) / h;
    assemble(h, theta, lip, rho, lambda, big_t, |k, _| vec![levels[k.min(levels.len() - 1)]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{modulus, sample_path, PathEnsembleSpec, PathKind};

    #[test]
    fn oscillation_matches_knot_scan() {
        let p = sample_path(&PathEnsembleSpec::new(5, 1.0f64, 300, PathKind::Brownian)).unwrap();
        for r in [0.001, 0.01, 0.07, 0.3, 1.0] {
            let a = window_oscillation(&p, r);
            let b = modulus(&p, r);
            assert!((a - b).abs() < 1e-12, "{r}: {a} {b}");
        }
    }

    #[test]
    fn lipschitz_path_rho() {
        // ω(r) = K r  ⇒  ρ = λh/K
        let p: Path<f64> = Path::from_knots(&[(0.0, 0.0), (1.0, 2.0)]).unwrap();
        let h = 1.0 / 256.0;
        let cfg = build_partition_with_modulus(&p, h, 1.0, 1.0, |r| 2.0 * r).unwrap();
        assert!((cfg.rho - 0.9 * h / 2.0).abs() < 1e-12 * cfg.rho);
        let emp = build_partition_cts(&p, h, 1.0, 1.0).unwrap();
        assert!((emp.rho - cfg.rho).abs() < 1e-12 * cfg.rho);
    }

    #[test]
    fn constant_path_single_block() {
        let p = Path::zero(1.0f64, 1).unwrap();
        let cfg = build_partition_cts(&p, 0.01, 1.0, 1.0).unwrap();
        assert_eq!(cfg.rho, 1.0);
        assert_eq!(cfg.partition, vec![0.0, 1.0]);
    }

    #[test]
    fn hoelder_rho_scaling() {
        // ω(r) = r^α  ⇒  ρ ∝ h^{2/(1+α)}
        let p = Path::zero(1.0f64, 1).unwrap();
        for alpha in [0.5, 0.75] {
            let r = |h: f64| build_partition_with_modulus(&p, h, 1.0, 1.0, |r: f64| r.powf(alpha)).unwrap().rho;
            let s = (r(1e-3).ln() - r(1e-4).ln()) / (1e-3f64.ln() - 1e-4f64.ln());
            assert!((s - 2.0 / (1.0 + alpha)).abs() < 1e-6, "{alpha}: {s}");
        }
    }

    fn brownian(seed: u64) -> Path<f64> {
        sample_path(&PathEnsembleSpec::new(seed, 1.0, 4096, PathKind::Brownian)).unwrap()
    }

    #[test]
    fn brownian_rho_against_independent_solve() {
        let p = brownian(3);
        let h = 2f64.powi(-8);
        let cfg = build_partition_brownian(&p, h, 0.9, 1.0).unwrap();
        // Newton on y = ln ρ for 0.75y + 0.5 ln(−y) = ln(0.81h)
        let target = (0.9 * 0.9 * h).ln();
        let mut y = -8.0f64;
        for _ in 0..100 {
            let f = 0.75 * y + 0.5 * (-y).ln() - target;
            let df = 0.75 + 0.5 / y;
            y -= f / df;
        }
        assert!((cfg.rho - y.exp()).abs() < 1e-12, "{} {}", cfg.rho, y.exp());
    }

    #[test]
    fn brownian_rho_monotone_in_h_and_theta() {
        let p = brownian(4);
        let mut last = f64::INFINITY;
        for k in 5..10 {
            let r = build_partition_brownian(&p, 2f64.powi(-k), 1.0, 1.0).unwrap().rho;
            assert!(r < last);
            last = r;
        }
        let by_theta: Vec<f64> =
            [1.0, 0.1, 0.01].iter().map(|&th| build_partition_brownian(&p, 0.01, th, 1.0).unwrap().rho).collect();
        assert!(by_theta.windows(2).all(|w| w[1] < w[0] / 10.0));
    }

    #[test]
    fn block_interpolation_and_cfl() {
        let p = brownian(9);
        let cfg = build_partition_brownian(&p, 2f64.powi(-7), 1.0, 1.0).unwrap();
        let block = cfg.rho * cfg.block_cells as f64;
        for (k, &t) in cfg.path_h.times().iter().enumerate() {
            if k + 1 < cfg.path_h.len() {
                assert!((t - k as f64 * block).abs() < 1e-12);
            }
            assert_eq!(cfg.path_h.values(0)[k], p.eval(0, t).unwrap());
        }
        let bound = cfg.increment_bound();
        for w in cfg.partition.windows(2) {
            let d = (cfg.path_h.eval(0, w[1]).unwrap() - cfg.path_h.eval(0, w[0]).unwrap()).abs();
            assert!(d <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn random_walk_construction() {
        let cfg = build_random_walk(11, 2f64.powi(-6), 1.0, 1.0, 1.0).unwrap();
        let block = cfg.rho * cfg.block_cells as f64;
        let amp = block.sqrt();
        let vs = cfg.path_h.values(0);
        for k in 0..vs.len() - 2 {
            assert!(((vs[k + 1] - vs[k]).abs() - amp).abs() < 1e-12);
        }
        let again = build_random_walk(11, 2f64.powi(-6), 1.0, 1.0, 1.0).unwrap();
        assert_eq!(again.path_h, cfg.path_h);
        // a single block is one linear piece
        let one = build_random_walk(1, 0.5, 1.0, 1.0, 0.2).unwrap();
        assert_eq!(one.path_h.len(), 2);
    }

    #[test]
    fn random_walk_ensemble_mean() {
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|s| *build_random_walk(s as u64, 0.1, 1.0, 1.0, 1.0).unwrap().path_h.values(0).last().unwrap())
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() <= 0.03, "{mean}");
    }
}
