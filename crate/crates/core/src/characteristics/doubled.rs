//! The doubled characteristics of `H(p) + F(x)` started from `P = Q = λ(x − y)`.

use super::Potential;
use crate::error::{arg, Result};
use crate::hamiltonian::Hamiltonian;
use crate::scalar::{fit_loglog, Real};

type State<T> = [T; 4];

fn rhs<T: Real>(h: &Hamiltonian<T>, f: &Potential<T>, s: State<T>) -> State<T> {
    [-h.deriv(s[2]), -h.deriv(s[3]), f.deriv(s[0]), f.deriv(s[1])]
}

fn rk4<T: Real>(h: &Hamiltonian<T>, f: &Potential<T>, s: State<T>, dt: T) -> State<T> {
    let add = |a: State<T>, k: State<T>, c: T| [0, 1, 2, 3].map(|i| a[i] + c * k[i]);
    let k1 = rhs(h, f, s);
    let k2 = rhs(h, f, add(s, k1, dt * T::half()));
    let k3 = rhs(h, f, add(s, k2, dt * T::half()));
    let k4 = rhs(h, f, add(s, k3, dt));
    let six = T::lit(6.0);
    [0, 1, 2, 3].map(|i| s[i] + dt / six * (k1[i] + T::two() * (k2[i] + k3[i]) + k4[i]))
}

/// `min` over the sample points of the Jacobian of `(x, y) ↦ (X, Y)` after each of `steps`
/// RK4 steps of size `dt` (entry 0 is time 0). Derivatives are central differences across
/// trajectories started `δ = 10⁻⁴/max(λ, 1)` apart.
pub fn doubled_jacobian<T: Real>(
    h: &Hamiltonian<T>,
    f: &Potential<T>,
    lambda: T,
    samples: &[(T, T)],
    dt: T,
    steps: usize,
) -> Vec<T> {
    let d = T::lit(1e-4) / lambda.max(T::one());
    let init = |x: T, y: T| [x, y, lambda * (x - y), lambda * (x - y)];
    let mut states: Vec<[State<T>; 4]> =
        samples.iter().map(|&(x, y)| [init(x + d, y), init(x - d, y), init(x, y + d), init(x, y - d)]).collect();
    let det = |st: &[State<T>; 4]| {
        let two_d = T::two() * d;
        let xx = (st[0][0] - st[1][0]) / two_d;
        let yx = (st[0][1] - st[1][1]) / two_d;
        let xy = (st[2][0] - st[3][0]) / two_d;
        let yy = (st[2][1] - st[3][1]) / two_d;
        xx * yy - xy * yx
    };
    let min_det = |all: &[[State<T>; 4]]| all.iter().map(det).fold(T::infinity(), T::min);
    let mut out = vec![min_det(&states)];
    for _ in 0..steps {
        for st in states.iter_mut() {
            for s in st.iter_mut() {
                *s = rk4(h, f, *s, dt);
            }
        }
        out.push(min_det(&states));
    }
    out
}

/// Sample `x` uniform over one period of `F` (32 points), `y = x − s/λ` with `s ∈ [−6, 6]` (49 points).
fn default_samples<T: Real>(f: &Potential<T>, lambda: T) -> Vec<(T, T)> {
    let period = match *f {
        Potential::Cos { freq, .. } if freq != T::zero() => T::lit(2.0 * std::f64::consts::PI) / freq.abs(),
        _ => T::lit(2.0 * std::f64::consts::PI),
    };
    let mut out = Vec::with_capacity(32 * 49);
    for i in 0..32 {
        let x = period * T::from_usize_lossy(i) / T::lit(32.0);
        for j in 0..49 {
            let s = T::lit(-6.0) + T::lit(0.25) * T::from_usize_lossy(j);
            out.push((x, x - s / lambda));
        }
    }
    out
}

/// First time the sampled Jacobian reaches 1/2 (interpolated), or `horizon`.
pub fn doubled_window<T: Real>(h: &Hamiltonian<T>, f: &Potential<T>, lambda: T, horizon: T, dt: T) -> Result<T> {
    if !(dt > T::zero() && horizon > T::zero() && lambda > T::zero()) {
        return arg("λ, horizon and step must be positive");
    }
    let steps = (horizon / dt).ceil().to_usize().unwrap_or(0);
    let js = doubled_jacobian(h, f, lambda, &default_samples(f, lambda), dt, steps);
    let half = T::half();
    for k in 1..js.len() {
        if js[k] <= half {
            let t0 = dt * T::from_usize_lossy(k - 1);
            let frac = if js[k - 1] > js[k] { (js[k - 1] - half) / (js[k - 1] - js[k]) } else { T::one() };
            return Ok((t0 + dt * frac).min(horizon));
        }
    }
    Ok(horizon)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowScaling<T> {
    pub lambdas: Vec<T>,
    pub t_star: Vec<T>,
    /// Same windows recomputed with half the step.
    pub t_star_half_step: Vec<T>,
    /// Fitted exponent of `t*_λ` against `λ`.
    pub slope: T,
    /// Fitted prefactor `c` in `t* ≈ c·λ^slope`.
    pub constant: T,
}

/// Invertibility windows over a `λ` grid and the log-log fit of `t*_λ`.
pub fn window_scaling_experiment<T: Real>(
    h: &Hamiltonian<T>,
    f: &Potential<T>,
    lambdas: &[T],
    horizon: T,
    dt: T,
) -> Result<WindowScaling<T>> {
    if lambdas.len() < 2 {
        return arg("a scaling fit needs at least two values of λ");
    }
    let t_star = lambdas.iter().map(|&l| doubled_window(h, f, l, horizon, dt)).collect::<Result<Vec<T>>>()?;
    let t_star_half_step =
        lambdas.iter().map(|&l| doubled_window(h, f, l, horizon, dt * T::half())).collect::<Result<Vec<T>>>()?;
    let (slope, intercept) = fit_loglog(lambdas, &t_star);
    Ok(WindowScaling { lambdas: lambdas.to_vec(), t_star, t_star_half_step, slope, constant: intercept.exp() })
}
