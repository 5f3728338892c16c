//! Cancellation, finite-speed, stability and regularity checks built on [`solve_exact`].

use super::{solve_exact, Method, PathwiseSolveSpec};
use crate::convex::apply_segment;
use crate::error::{arg, pre, Result};
use crate::grid::{Boundary, GridFn1};
use crate::hamiltonian::Hamiltonian;
use crate::paths::{reduce_path, Path};
use crate::scalar::Real;

/// `(max(S_H(a)S_{−H}(a)u0 − u0), min(S_{−H}(a)S_H(a)u0 − u0))`; contract: first ≤ tol, second ≥ −tol.
pub fn cancellation_check<T: Real>(h: &Hamiltonian<T>, u0: &GridFn1<T>, a: T) -> Result<(T, T)> {
    if a < T::zero() {
        return arg("cancellation time must be nonnegative");
    }
    let open = apply_segment(h, &apply_segment(h, u0, -a)?, a)?;
    let close = apply_segment(h, &apply_segment(h, u0, a)?, -a)?;
    let lhs = open.max_diff(u0)?;
    let rhs = -u0.max_diff(&close)?;
    Ok((lhs, rhs))
}

/// `sup|S_H(c)S_{−H}(b)S_H(a)u0 − S_H(a + c − b)u0|` for `b ≤ min(a, c)`.
pub fn composition_identity_check<T: Real>(h: &Hamiltonian<T>, u0: &GridFn1<T>, a: T, b: T, c: T) -> Result<T> {
    if a < T::zero() || b < T::zero() || c < T::zero() {
        return arg("durations must be nonnegative");
    }
    if b > a.min(c) {
        return arg("composition identity needs b ≤ min(a, c)");
    }
    let lhs = apply_segment(h, &apply_segment(h, &apply_segment(h, u0, a)?, -b)?, c)?;
    let rhs = apply_segment(h, u0, a + c - b)?;
    lhs.sup_diff(&rhs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSpeedReport<T> {
    /// Largest `r` (grid resolution) with `u(·, t) ≡ plateau value` on `B(0, r)`.
    pub radius: T,
    /// `R − L(M(t) − m(t))`.
    pub bound: T,
    pub lipschitz: T,
    /// The bound is nonpositive, so there is nothing to check.
    pub vacuous: bool,
    /// `A + H(0)·ξ(t)`: where the plateau value is transported.
    pub plateau_value: T,
}

/// Measures the surviving plateau of `u0 ≡ A` on `B(0, R)` under `du = H(Du)·dξ`.
pub fn finite_speed_check<T: Real>(
    h: &Hamiltonian<T>,
    u0: &GridFn1<T>,
    plateau: T,
    radius: T,
    path: &Path<T>,
    t: T,
) -> Result<FiniteSpeedReport<T>> {
    let (h1, h2) = h
        .decompose()
        .ok_or_else(|| crate::Error::Precondition("finite speed needs a difference-of-convex Hamiltonian".into()))?;
    let grad = u0.lipschitz();
    let lip = h1.lipschitz(grad).max(h2.lipschitz(grad));
    let (m_hi, m_lo) = path.running_extrema(t)?;
    let bound = radius - lip * (m_hi - m_lo);
    let spec = PathwiseSolveSpec {
        hamiltonians: vec![h.clone()],
        path: path.clone(),
        u0: u0.clone(),
        horizon: t,
        method: Method::ExactComposition,
    };
    let u = solve_exact(&spec)?;
    let value = plateau + h.eval(T::zero()) * path.eval(0, t)?;
    let tol = T::lit(1e-9) * (T::one() + value.abs());
    // walk outwards from the grid point nearest 0
    let centre = (-u.origin / u.step).round().to_isize().unwrap_or(0);
    let n = u.len() as isize;
    let mut r = T::neg_infinity();
    let mut k = 0isize;
    loop {
        let (l, rr) = (centre - k, centre + k);
        if l < 0 || rr >= n {
            break;
        }
        let ok = (u.values[l as usize] - value).abs() <= tol && (u.values[rr as usize] - value).abs() <= tol;
        if !ok {
            break;
        }
        r = u.x(rr as usize).abs().min(u.x(l as usize).abs());
        k += 1;
    }
    Ok(FiniteSpeedReport {
        radius: r.max(T::zero()),
        bound,
        lipschitz: lip,
        vacuous: !(bound > T::zero()),
        plateau_value: value,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport<T> {
    pub measured: T,
    pub bound: T,
    pub constant: T,
}

/// Compares two solutions against `C·maxᵢ sup_s|B¹ᵢ − B²ᵢ| + sup|u¹₀ − u²₀|`, `C = m·maxᵢ max_{|p|≤L}|Hⁱ(p)|`.
pub fn path_stability_check<T: Real>(
    hs: &[Hamiltonian<T>],
    u01: &GridFn1<T>,
    u02: &GridFn1<T>,
    p1: &Path<T>,
    p2: &Path<T>,
    t: T,
) -> Result<StabilityReport<T>> {
    let lip = u01.lipschitz().max(u02.lipschitz());
    let m = T::from_usize_lossy(hs.len());
    let constant = m * hs.iter().map(|h| h.sup_abs(lip)).fold(T::zero(), T::max);
    let solve = |u0: &GridFn1<T>, p: &Path<T>| {
        solve_exact(&PathwiseSolveSpec {
            hamiltonians: hs.to_vec(),
            path: p.clone(),
            u0: u0.clone(),
            horizon: t,
            method: Method::ExactComposition,
        })
    };
    let a = solve(u01, p1)?;
    let b = solve(u02, p2)?;
    let dp = p1.restrict(t)?.sup_distance(&p2.restrict(t)?);
    Ok(StabilityReport { measured: a.sup_diff(&b)?, bound: constant * dp + u01.sup_diff(u02)?, constant })
}

/// `sup|solve_exact(ξ) − solve_exact(R(ξ))|` at time `t` for scalar convex `H`.
pub fn reduced_equivalence_check<T: Real>(h: &Hamiltonian<T>, u0: &GridFn1<T>, path: &Path<T>, t: T) -> Result<T> {
    if !(h.convexity().is_convex() || h.convexity().is_concave()) {
        return pre("reduced-path equivalence is a statement about convex Hamiltonians");
    }
    let full =
        solve_exact(&PathwiseSolveSpec { horizon: t, ..PathwiseSolveSpec::new(h.clone(), path.clone(), u0.clone()) })?;
    let red = reduce_path(path, t)?;
    let short = solve_exact(&PathwiseSolveSpec::new(h.clone(), red, u0.clone()))?;
    full.sup_diff(&short)
}

/// Lower and upper bounds `S_{−H}(−m(t))u0 ≤ u(·, t) ≤ S_H(M(t))u0` for scalar convex `H ≥ 0`
/// with `min H = 0`.
pub fn sandwich_bounds<T: Real>(
    h: &Hamiltonian<T>,
    u0: &GridFn1<T>,
    path: &Path<T>,
    t: T,
) -> Result<(GridFn1<T>, GridFn1<T>)> {
    if h.min_value() != Some(T::zero()) || !h.convexity().is_convex() {
        return pre("sandwich bounds need a convex Hamiltonian with minimum 0");
    }
    let (hi, lo) = path.running_extrema(t)?;
    Ok((apply_segment(h, u0, lo)?, apply_segment(h, u0, hi)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayRecord<T> {
    pub t: T,
    pub measured: T,
    /// `None` when `M(t) = m(t)`: the bound is infinite and the check is skipped.
    pub bound: Option<T>,
}

/// Measured `‖Du(·, t)‖` against `sqrt(2‖u(·, t)‖/(θ(M(t) − m(t))))` for uniformly convex `H`.
pub fn lipschitz_decay_check<T: Real>(
    h: &Hamiltonian<T>,
    u0: &GridFn1<T>,
    path: &Path<T>,
    times: &[T],
) -> Result<Vec<DecayRecord<T>>> {
    let theta = h
        .uniform_convexity()
        .ok_or_else(|| crate::Error::Precondition("Lipschitz decay needs a uniformly convex Hamiltonian".into()))?;
    if u0.boundary != Boundary::Periodic {
        return pre("Lipschitz decay check runs on periodic grids");
    }
    let mut out = Vec::new();
    for &t in times {
        let (hi, lo) = path.running_extrema(t)?;
        let u = if t > T::zero() {
            solve_exact(&PathwiseSolveSpec {
                horizon: t,
                ..PathwiseSolveSpec::new(h.clone(), path.clone(), u0.clone())
            })?
        } else {
            u0.clone()
        };
        let measured = u.lipschitz();
        let bound = (hi > lo).then(|| (T::two() * u.sup_norm() / (theta * (hi - lo))).sqrt());
        out.push(DecayRecord { t, measured, bound });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct LongtimeTrajectory<T> {
    pub times: Vec<T>,
    pub max: Vec<T>,
    pub min: Vec<T>,
    pub osc: Vec<T>,
    pub last: GridFn1<T>,
}

/// Runs `H = |p|` from the 2-periodic tent `1 − |x − 1|` on `n` periodic points of `[0, 2)`,
/// recording extrema after every piece of at most `dt` path time.
pub fn longtime_experiment<T: Real>(path: &Path<T>, end: T, n: usize, dt: T) -> Result<LongtimeTrajectory<T>> {
    if !(dt > T::zero()) {
        return arg("sampling interval must be positive");
    }
    let u0 = GridFn1::on_interval(T::zero(), T::two(), n, Boundary::Periodic, |x| T::one() - (x - T::one()).abs())?;
    let path = if end < path.horizon() { path.restrict(end)? } else { path.clone() };
    let h = Hamiltonian::abs();
    let mut u = u0;
    let mut tr = LongtimeTrajectory {
        times: vec![T::zero()],
        max: vec![u.max()],
        min: vec![u.min()],
        osc: vec![u.max() - u.min()],
        last: u.clone(),
    };
    let ts = path.times();
    for k in 0..ts.len() - 1 {
        let pieces = ((ts[k + 1] - ts[k]) / dt).ceil().to_usize().unwrap_or(1).max(1);
        let mut prev = path.values(0)[k];
        for j in 1..=pieces {
            let t = if j == pieces {
                ts[k + 1]
            } else {
                ts[k] + (ts[k + 1] - ts[k]) * T::from_usize_lossy(j) / T::from_usize_lossy(pieces)
            };
            let v = path.eval_clamped(0, t);
            u = apply_segment(&h, &u, v - prev)?;
            prev = v;
            tr.times.push(t);
            tr.max.push(u.max());
            tr.min.push(u.min());
            tr.osc.push(u.max() - u.min());
        }
    }
    tr.last = u;
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::oracle_abs;

    fn grid(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> GridFn1<f64> {
        GridFn1::on_interval(lo, hi, n, Boundary::LinearExtension, f).unwrap()
    }

    #[test]
    fn cancellation_zero_time_and_cone() {
        let u0 = grid(-3.0, 3.0, 301, f64::abs);
        assert_eq!(cancellation_check(&Hamiltonian::abs(), &u0, 0.0).unwrap(), (0.0, 0.0));
        let (l, r) = cancellation_check(&Hamiltonian::abs(), &u0, 1.0).unwrap();
        assert!(l.abs() < 1e-12 && r <= 1e-12, "{l} {r}");
    }

    #[test]
    fn cancellation_quadratic_bump() {
        let u0 = grid(-4.0, 4.0, 401, |x| (-x * x).exp());
        let (l, r) = cancellation_check(&Hamiltonian::quadratic(), &u0, 0.5).unwrap();
        let lip = u0.lipschitz();
        assert!(l <= 3.0 * lip * u0.step && r >= -3.0 * lip * u0.step, "{l} {r}");
    }

    #[test]
    fn composition_identity_cases() {
        let u0 = grid(-4.0, 4.0, 401, |x| (2.0 * x).sin() + 0.2 * x);
        let h = Hamiltonian::abs();
        assert!(composition_identity_check(&h, &u0, 0.6, 0.0, 0.3).unwrap() < 1e-12);
        assert!(composition_identity_check(&h, &u0, 0.5, 0.5, 0.5).unwrap() < 3.0 * u0.step * u0.lipschitz());
        let g = composition_identity_check(&h, &u0, 1.0, 0.5, 0.7).unwrap();
        assert!(g <= 3.0 * u0.step * u0.lipschitz(), "{g}");
        assert!(composition_identity_check(&h, &u0, 0.3, 0.5, 0.7).is_err());
    }

    #[test]
    fn finite_speed_examples() {
        let u0 = grid(-6.0, 6.0, 1201, |x| (x.abs() - 2.0).max(0.0));
        let zero = Path::zero(1.0, 1).unwrap();
        let r = finite_speed_check(&Hamiltonian::abs(), &u0, 0.0, 2.0, &zero, 1.0).unwrap();
        assert!((r.radius - 2.0).abs() < 1e-9);
        let zig = Path::from_knots(&[(0.0, 0.0), (0.3, 0.6), (0.6, -0.4), (1.0, 0.1)]).unwrap();
        let r = finite_speed_check(&Hamiltonian::abs(), &u0, 0.0, 2.0, &zig, 1.0).unwrap();
        assert!((r.bound - 1.0).abs() < 1e-12);
        assert!(r.radius >= r.bound - 1e-9, "{r:?}");
        let wild = Path::from_knots(&[(0.0, 0.0), (0.5, 1.5), (1.0, -1.0)]).unwrap();
        assert!(finite_speed_check(&Hamiltonian::abs(), &u0, 0.0, 2.0, &wild, 1.0).unwrap().vacuous);
    }

    #[test]
    fn stability_examples() {
        let u0 = grid(-3.0, 3.0, 301, |x| (2.0 * x).sin());
        let hs = vec![Hamiltonian::quadratic()];
        let p = Path::from_knots(&[(0.0, 0.0), (0.5, 0.4), (1.0, -0.2)]).unwrap();
        let same = path_stability_check(&hs, &u0, &u0, &p, &p, 1.0).unwrap();
        assert_eq!(same.measured, 0.0);
        let shifted = u0.map(|v| v + 0.3);
        let c = path_stability_check(&hs, &u0, &shifted, &p, &p, 1.0).unwrap();
        assert!((c.measured - 0.3).abs() < 1e-12);
        let q = p.combine(1.0, &Path::linear(0.05, 1.0).unwrap(), 1.0).unwrap();
        let d = path_stability_check(&hs, &u0, &u0, &p, &q, 1.0).unwrap();
        assert!(d.measured <= d.bound + 2.0 * u0.step, "{d:?}");
    }

    #[test]
    fn reduced_equivalence_examples() {
        let u0 = grid(-3.0, 3.0, 301, |x| (1.7 * x).cos());
        let h = Hamiltonian::quadratic();
        let red = Path::from_knots(&[(0.0, 0.0), (0.3, 0.5), (0.6, -0.2), (1.0, 0.3)]).unwrap();
        assert_eq!(reduced_equivalence_check(&h, &u0, &red, 1.0).unwrap(), 0.0);
        let wiggly =
            Path::from_knots(&[(0.0, 0.0), (0.2, 0.5), (0.3, 0.2), (0.4, 0.4), (0.6, -0.2), (1.0, 0.3)]).unwrap();
        let g = reduced_equivalence_check(&h, &u0, &wiggly, 1.0).unwrap();
        assert!(g <= 3.0 * u0.lipschitz() * u0.step, "{g}");
        let mono = Path::from_knots(&[(0.0, 0.0), (0.4, 0.2), (1.0, 0.6)]).unwrap();
        assert!(reduced_equivalence_check(&h, &u0, &mono, 1.0).unwrap() <= 2.0 * u0.lipschitz() * u0.step);
    }

    #[test]
    fn sandwich_holds() {
        let u0 = grid(-3.0, 3.0, 301, |x| (1.3 * x).sin());
        let h = Hamiltonian::quadratic();
        let p = Path::from_knots(&[(0.0, 0.0), (0.2, 0.4), (0.5, -0.5), (1.0, 0.1)]).unwrap();
        let u = solve_exact(&PathwiseSolveSpec::new(h.clone(), p.clone(), u0.clone())).unwrap();
        let (lo, hi) = sandwich_bounds(&h, &u0, &p, 1.0).unwrap();
        let tol = 3.0 * u0.step;
        assert!(lo.max_diff(&u).unwrap() <= tol);
        assert!(u.max_diff(&hi).unwrap() <= tol);
    }

    #[test]
    fn decay_skips_degenerate_times() {
        let u0 = GridFn1::on_interval(0.0, 1.0, 200, Boundary::Periodic, |x: f64| 0.5 - (x - 0.5).abs()).unwrap();
        let p = Path::linear(1.0, 1.0).unwrap();
        let recs = lipschitz_decay_check(&Hamiltonian::quadratic(), &u0, &p, &[0.0, 0.25, 0.5, 1.0]).unwrap();
        assert!(recs[0].bound.is_none());
        for w in recs[1..].windows(2) {
            assert!(w[1].measured <= w[0].measured + 1e-12);
            assert!(w[1].bound.unwrap() <= w[0].bound.unwrap() * 1.5);
        }
        for r in &recs[1..] {
            assert!(r.measured <= r.bound.unwrap() * 1.1, "{r:?}");
        }
    }

    #[test]
    fn longtime_linear_paths() {
        let n = 400;
        let up = longtime_experiment(&Path::linear(1.0, 2.0).unwrap(), 2.0, n, 0.1).unwrap();
        assert!(up.last.values.iter().all(|v: &f64| (v - 1.0).abs() < 1e-12));
        let down = longtime_experiment(&Path::linear(-1.0, 2.0).unwrap(), 2.0, n, 0.1).unwrap();
        assert!(down.last.values.iter().all(|v: &f64| v.abs() < 1e-12));
        for tr in [&up, &down] {
            assert!(tr.max.windows(2).all(|w| w[1] <= w[0] + 1e-15));
            assert!(tr.min.windows(2).all(|w| w[1] >= w[0] - 1e-15));
        }
    }

    #[test]
    fn oracle_agrees_with_composition_on_dip() {
        let u0 = grid(-3.0, 3.0, 301, f64::abs);
        let dip = Path::from_knots(&[(0.0, 0.0), (0.5, -1.0), (1.0, 0.0)]).unwrap();
        let u = solve_exact(&PathwiseSolveSpec::new(Hamiltonian::abs(), dip.clone(), u0.clone())).unwrap();
        let i = 175; // x = 0.5
        assert!((u.x(i) - 0.5).abs() < 1e-12);
        assert!((u.values[i] - oracle_abs(&dip, 0.5, 1.0).unwrap()).abs() < 1e-12);
    }
}
