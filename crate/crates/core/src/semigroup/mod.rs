//! Exact pathwise solution operators for spatially homogeneous Hamiltonians, built by
//! composing Lax–Oleinik operators along the monotone segments of a piecewise-linear path.

mod checks;

pub use checks::{
    cancellation_check, composition_identity_check, finite_speed_check, lipschitz_decay_check, longtime_experiment,
    path_stability_check, reduced_equivalence_check, sandwich_bounds, DecayRecord, FiniteSpeedReport,
    LongtimeTrajectory, StabilityReport,
};

use crate::convex::apply_segment;
use crate::error::{arg, pre, Result};
use crate::grid::GridFn1;
use crate::hamiltonian::Hamiltonian;
use crate::paths::Path;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Composition of exact operators; needs convex, concave or difference-of-convex `Hⁱ`.
    ExactComposition,
    /// Monotone finite-difference scheme with a continuous-path partition.
    SchemeFallback,
}

/// Data of `du = Σᵢ Hⁱ(Du)·dξᵢ`, `u(·, 0) = u0`.
#[derive(Clone, Debug)]
pub struct PathwiseSolveSpec<T> {
    pub hamiltonians: Vec<Hamiltonian<T>>,
    pub path: Path<T>,
    pub u0: GridFn1<T>,
    pub horizon: T,
    pub method: Method,
}

impl<T: Real> PathwiseSolveSpec<T> {
    pub fn new(h: Hamiltonian<T>, path: Path<T>, u0: GridFn1<T>) -> Self {
        let horizon = path.horizon();
        Self { hamiltonians: vec![h], path, u0, horizon, method: Method::ExactComposition }
    }
}

/// One exact operator `S_H` driven by `sign·ξ_component`.
struct Factor<T> {
    h: Hamiltonian<T>,
    component: usize,
    sign: T,
}

fn factors<T: Real>(hs: &[Hamiltonian<T>]) -> Result<Vec<Factor<T>>> {
    let mut out = Vec::new();
    for (c, h) in hs.iter().enumerate() {
        let class = h.convexity();
        if class.is_convex() || class.is_concave() {
            out.push(Factor { h: h.clone(), component: c, sign: T::one() });
        } else if let Some((h1, h2)) = h.decompose() {
            // H dξ = H₁ dξ + H₂ d(−ξ)
            out.push(Factor { h: h1, component: c, sign: T::one() });
            out.push(Factor { h: h2, component: c, sign: -T::one() });
        } else {
            return pre(format!(
                "H = {} is not a difference of convex functions; use the scheme fallback",
                h.describe()
            ));
        }
    }
    Ok(out)
}

/// `+1` when `S_H(dξ)` is a sup-convolution (effective Hamiltonian convex), `−1` when an inf-convolution.
fn orientation<T: Real>(h: &Hamiltonian<T>, d: T) -> i8 {
    let c = h.convexity();
    if d == T::zero() || c == crate::hamiltonian::Convexity::Affine {
        0
    } else if (d > T::zero()) == c.is_convex() {
        1
    } else {
        -1
    }
}

/// Solution at `spec.horizon` by segment-wise composition of exact operators.
///
/// On each segment, factors whose effective Hamiltonians share a curvature sign compose
/// exactly; mixed signs (several components or a convex splitting) are interleaved in
/// substeps whose increments do not exceed one grid step.
pub fn solve_exact<T: Real>(spec: &PathwiseSolveSpec<T>) -> Result<GridFn1<T>> {
    if spec.hamiltonians.len() != spec.path.components() {
        return arg(format!(
            "{} Hamiltonians for a path with {} components",
            spec.hamiltonians.len(),
            spec.path.components()
        ));
    }
    if spec.method == Method::SchemeFallback {
        return crate::schemes::solve_by_scheme(&spec.hamiltonians, &spec.path, &spec.u0, spec.horizon);
    }
    let fs = factors(&spec.hamiltonians)?;
    let path = if spec.horizon < spec.path.horizon() { spec.path.restrict(spec.horizon)? } else { spec.path.clone() };
    let mut u = spec.u0.clone();
    for inc in path.increments() {
        let ds: Vec<T> = fs.iter().map(|f| f.sign * inc[f.component]).collect();
        let mut kinds = fs.iter().zip(&ds).map(|(f, &d)| orientation(&f.h, d)).filter(|&o| o != 0);
        let first = kinds.next();
        let mixed = kinds.any(|o| Some(o) != first);
        let substeps = if mixed {
            let big = ds.iter().fold(T::zero(), |m, d| m.max(d.abs()));
            (big / u.step).ceil().to_usize().unwrap_or(1).max(1)
        } else {
            1
        };
        let frac = T::one() / T::from_usize_lossy(substeps);
        for _ in 0..substeps {
            for (f, &d) in fs.iter().zip(&ds) {
                u = apply_segment(&f.h, &u, d * frac)?;
            }
        }
    }
    Ok(u)
}

/// `max[(|x| + ξ(t))₊, (max_{s≤t} ξ(s))₊]`: the solution for `H = |p|`, `u0 = |x|`.
pub fn oracle_abs<T: Real>(path: &Path<T>, x: T, t: T) -> Result<T> {
    let xi = path.eval(0, t)?;
    let (m, _) = path.running_extrema(t)?;
    Ok((x.abs() + xi).pos().max(m.pos()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;
    use crate::paths::{sample_path, PathEnsembleSpec, PathKind};

    fn grid(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> GridFn1<f64> {
        GridFn1::on_interval(lo, hi, n, Boundary::LinearExtension, f).unwrap()
    }

    #[test]
    fn zero_path_is_identity() {
        let u0 = grid(-2.0, 2.0, 81, |x| (2.0 * x).sin());
        let spec = PathwiseSolveSpec::new(Hamiltonian::quadratic(), Path::zero(1.0, 1).unwrap(), u0.clone());
        assert_eq!(solve_exact(&spec).unwrap(), u0);
    }

    #[test]
    fn matches_explicit_abs_formula() {
        let u0 = grid(-4.0, 4.0, 801, f64::abs);
        for seed in 0..3 {
            let p: Path<f64> = sample_path(&PathEnsembleSpec::new(seed, 1.0, 64, PathKind::Brownian)).unwrap();
            let u = solve_exact(&PathwiseSolveSpec::new(Hamiltonian::abs(), p.clone(), u0.clone())).unwrap();
            for i in 0..u0.len() {
                let o = oracle_abs(&p, u0.x(i), 1.0).unwrap();
                assert!((u.values[i] - o).abs() <= u0.step, "seed {seed} x={} {} {}", u0.x(i), u.values[i], o);
            }
        }
    }

    #[test]
    fn oracle_examples() {
        let zero: Path<f64> = Path::zero(1.0, 1).unwrap();
        assert_eq!(oracle_abs(&zero, -0.3, 1.0).unwrap(), 0.3);
        assert_eq!(oracle_abs(&Path::linear(1.0, 1.0).unwrap(), 0.0, 1.0).unwrap(), 1.0);
        let dip = Path::from_knots(&[(0.0, 0.0), (0.5, -1.0), (1.0, 0.0)]).unwrap();
        assert_eq!(oracle_abs(&dip, 0.5, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn constants_ride_the_path() {
        let u0 = grid(-1.0, 1.0, 21, |_| 2.0);
        let hs = vec![
            Hamiltonian::tabulate(-2.0, 2.0, 41, |p: f64| p * p + 0.5).unwrap(),
            Hamiltonian::Abs { scale: 1.0 }.negated(),
        ];
        let path = Path::new(vec![0.0, 0.5, 1.0], vec![vec![0.0, 0.7, 0.2], vec![0.0, -0.3, 0.4]]).unwrap();
        let spec = PathwiseSolveSpec { hamiltonians: hs, path, u0, horizon: 1.0, method: Method::ExactComposition };
        let u = solve_exact(&spec).unwrap();
        assert!(u.values.iter().all(|v| (v - (2.0 + 0.5 * 0.2)).abs() < 1e-9));
    }

    #[test]
    fn same_sign_components_compose_like_the_sum() {
        // |p| driven by t and p²/2 driven by t equals H = |p| + p²/2 driven by t
        let u0 = grid(-3.0, 3.0, 301, |x| (1.5 * x).sin());
        let path = Path::new(vec![0.0, 0.4], vec![vec![0.0, 0.4], vec![0.0, 0.4]]).unwrap();
        let spec = PathwiseSolveSpec {
            hamiltonians: vec![Hamiltonian::abs(), Hamiltonian::quadratic()],
            path,
            u0: u0.clone(),
            horizon: 0.4,
            method: Method::ExactComposition,
        };
        let a = solve_exact(&spec).unwrap();
        let sum = Hamiltonian::Sum(vec![Hamiltonian::abs(), Hamiltonian::quadratic()]);
        let b = crate::convex::lax_oleinik_solve(&sum, &u0, 0.4).unwrap();
        let err = (50..250).map(|i| (a.values[i] - b.values[i]).abs()).fold(0.0, f64::max);
        assert!(err < 3.0 * u0.step, "{err}");
    }

    #[test]
    fn nonconvex_without_splitting_is_refused() {
        let u0 = grid(-1.0, 1.0, 21, |x| x);
        let spec = PathwiseSolveSpec::new(Hamiltonian::power(0.5), Path::linear(1.0, 1.0).unwrap(), u0);
        assert!(matches!(solve_exact(&spec), Err(crate::Error::Precondition(_))));
    }

    #[test]
    fn difference_of_convex_by_staircase_is_consistent() {
        // H = p²/2 − |p|/2 with a monotone path: compare against a fine scheme-free reference
        let h = Hamiltonian::Sum(vec![Hamiltonian::quadratic(), Hamiltonian::abs().negated().scaled(0.5)]);
        let u0c = grid(-3.0, 3.0, 301, |x| (2.0 * x).cos());
        let u0f = grid(-3.0, 3.0, 1201, |x| (2.0 * x).cos());
        let path = Path::from_knots(&[(0.0, 0.0), (0.2, 0.2), (0.3, 0.1)]).unwrap();
        let c = solve_exact(&PathwiseSolveSpec::new(h.clone(), path.clone(), u0c.clone())).unwrap();
        let f = solve_exact(&PathwiseSolveSpec::new(h, path, u0f.clone())).unwrap();
        let err = (60..240).map(|i| (c.values[i] - f.eval(c.x(i))).abs()).fold(0.0, f64::max);
        assert!(err < 5.0 * u0c.step, "{err}");
    }
}
