//! Characteristics of `u_t = H(Du)·ξ̇` and of autonomous `u_t = H(Du, x)`, with Jacobians
//! from neighbouring trajectories, smooth pre-shock solutions, and the invertibility window
//! of the doubled separated system.

mod doubled;

pub use doubled::{doubled_jacobian, doubled_window, window_scaling_experiment, WindowScaling};

use crate::error::{arg, pre, Error, Result};
use crate::grid::GridFn1;
use crate::hamiltonian::Hamiltonian;
use crate::paths::Path;
use crate::scalar::Real;

/// Trajectories `(X, P, U)` and Jacobian `J = ∂X/∂x`, stored as `[time index][grid point]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharField<T> {
    /// Initial data the field was started from (grid and boundary rule are reused on output).
    pub u0: GridFn1<T>,
    pub times: Vec<T>,
    pub x: Vec<Vec<T>>,
    pub p: Vec<Vec<T>>,
    pub u: Vec<Vec<T>>,
    pub jac: Vec<Vec<T>>,
}

impl<T: Real> CharField<T> {
    pub fn horizon(&self) -> T {
        *self.times.last().expect("nonempty field")
    }

    pub fn x0(&self) -> Vec<T> {
        self.u0.xs()
    }
}

/// `(u(x+h) − u(x−h))/(2h)` with the grid's boundary continuation.
fn central_slopes<T: Real>(u: &GridFn1<T>) -> Vec<T> {
    (0..u.len() as isize).map(|i| (u.get(i + 1) - u.get(i - 1)) / (T::two() * u.step)).collect()
}

/// `∂X/∂x` by central differences across neighbouring trajectories, one-sided at the ends.
fn jacobian<T: Real>(x0: &[T], xs: &[T]) -> Vec<T> {
    let n = xs.len();
    (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (xs[b] - xs[a]) / (x0[b] - x0[a])
        })
        .collect()
}

/// Closed-form characteristics for spatially homogeneous `Hⁱ`:
/// `X = x − Σᵢ Hⁱ'(p)Bᵢ(t)`, `P = p = Du0(x)`, `U = u0(x) + Σᵢ (Hⁱ(p) − p·Hⁱ'(p))Bᵢ(t)`.
pub fn integrate_homogeneous<T: Real>(
    hs: &[Hamiltonian<T>],
    u0: &GridFn1<T>,
    path: &Path<T>,
    times: &[T],
) -> Result<CharField<T>> {
    if hs.len() != path.components() {
        return arg("one Hamiltonian per path component");
    }
    if times.is_empty() || times[0] != T::zero() || times.windows(2).any(|w| !(w[1] > w[0])) {
        return arg("sample times must start at 0 and increase");
    }
    let x0 = u0.xs();
    let p0 = central_slopes(u0);
    let dh: Vec<Vec<T>> = hs.iter().map(|h| p0.iter().map(|&p| h.deriv(p)).collect()).collect();
    let legendre: Vec<Vec<T>> =
        hs.iter().zip(&dh).map(|(h, d)| p0.iter().zip(d).map(|(&p, &dp)| h.eval(p) - p * dp).collect()).collect();
    let mut field = CharField { u0: u0.clone(), times: times.to_vec(), x: vec![], p: vec![], u: vec![], jac: vec![] };
    for &t in times {
        let b = path.eval_all(t)?;
        let x: Vec<T> =
            (0..x0.len()).map(|i| x0[i] - (0..hs.len()).fold(T::zero(), |s, c| s + dh[c][i] * b[c])).collect();
        let u: Vec<T> = (0..x0.len())
            .map(|i| u0.values[i] + (0..hs.len()).fold(T::zero(), |s, c| s + legendre[c][i] * b[c]))
            .collect();
        field.jac.push(jacobian(&x0, &x));
        field.x.push(x);
        field.p.push(p0.clone());
        field.u.push(u);
    }
    Ok(field)
}

/// Hamiltonian depending on position, with both partial derivatives.
pub trait PhaseHamiltonian<T> {
    fn eval(&self, p: T, x: T) -> T;
    fn dp(&self, p: T, x: T) -> T;
    fn dx(&self, p: T, x: T) -> T;
}

/// Potential `F(x)` of a separated Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Potential<T> {
    Zero,
    /// `amp·cos(freq·x)`.
    Cos {
        amp: T,
        freq: T,
    },
}

impl<T: Real> Potential<T> {
    pub fn eval(&self, x: T) -> T {
        match *self {
            Self::Zero => T::zero(),
            Self::Cos { amp, freq } => amp * (freq * x).cos(),
        }
    }

    pub fn deriv(&self, x: T) -> T {
        match *self {
            Self::Zero => T::zero(),
            Self::Cos { amp, freq } => -amp * freq * (freq * x).sin(),
        }
    }
}

/// `H(p) + F(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Separated<T> {
    pub h: Hamiltonian<T>,
    pub f: Potential<T>,
}

impl<T: Real> PhaseHamiltonian<T> for Separated<T> {
    fn eval(&self, p: T, x: T) -> T {
        self.h.eval(p) + self.f.eval(x)
    }

    fn dp(&self, p: T, _x: T) -> T {
        self.h.deriv(p)
    }

    fn dx(&self, _p: T, x: T) -> T {
        self.f.deriv(x)
    }
}

fn rhs<T: Real, H: PhaseHamiltonian<T>>(h: &H, s: [T; 3]) -> [T; 3] {
    let [x, p, _] = s;
    let hp = h.dp(p, x);
    [-hp, h.dx(p, x), h.eval(p, x) - p * hp]
}

fn rk4<T: Real, H: PhaseHamiltonian<T>>(h: &H, s: [T; 3], dt: T) -> [T; 3] {
    let add = |a: [T; 3], k: [T; 3], c: T| [a[0] + c * k[0], a[1] + c * k[1], a[2] + c * k[2]];
    let k1 = rhs(h, s);
    let k2 = rhs(h, add(s, k1, dt * T::half()));
    let k3 = rhs(h, add(s, k2, dt * T::half()));
    let k4 = rhs(h, add(s, k3, dt));
    let six = T::lit(6.0);
    [0, 1, 2].map(|i| s[i] + dt / six * (k1[i] + T::two() * (k2[i] + k3[i]) + k4[i]))
}

/// Fixed-step RK4 for `Ẋ = −H_p`, `Ṗ = H_x`, `U̇ = H − P·H_p` (characteristics of
/// `u_t = H(Du, x)`), recording every step up to `t_end`.
pub fn integrate_general<T: Real, H: PhaseHamiltonian<T>>(
    h: &H,
    u0: &GridFn1<T>,
    t_end: T,
    step: T,
) -> Result<CharField<T>> {
    if !(step > T::zero()) {
        return arg("step must be positive");
    }
    if !(t_end >= T::zero()) {
        return arg("end time must be nonnegative");
    }
    let x0 = u0.xs();
    let p0 = central_slopes(u0);
    let mut state: Vec<[T; 3]> = (0..x0.len()).map(|i| [x0[i], p0[i], u0.values[i]]).collect();
    let steps = (t_end / step).ceil().to_usize().unwrap_or(0);
    let mut field = CharField { u0: u0.clone(), times: vec![T::zero()], x: vec![], p: vec![], u: vec![], jac: vec![] };
    let record = |f: &mut CharField<T>, st: &[[T; 3]]| {
        let x: Vec<T> = st.iter().map(|s| s[0]).collect();
        f.jac.push(jacobian(&x0, &x));
        f.x.push(x);
        f.p.push(st.iter().map(|s| s[1]).collect());
        f.u.push(st.iter().map(|s| s[2]).collect());
    };
    record(&mut field, &state);
    let mut t = T::zero();
    for k in 1..=steps {
        let next = if k == steps { t_end } else { step * T::from_usize_lossy(k) };
        let dt = next - t;
        for s in state.iter_mut() {
            *s = rk4(h, *s, dt);
        }
        if state.iter().any(|s| !(s[0].is_finite() && s[1].is_finite() && s[2].is_finite())) {
            return Err(Error::Integration { t: next.as_f64(), detail: "non-finite characteristic state".into() });
        }
        t = next;
        field.times.push(t);
        record(&mut field, &state);
    }
    Ok(field)
}

/// First time `min J ≤ threshold`, linearly interpolated between samples; the horizon if never.
pub fn invertibility_window<T: Real>(field: &CharField<T>, threshold: T) -> T {
    let mut prev: Option<(T, T)> = None;
    for (k, &t) in field.times.iter().enumerate() {
        let j = field.jac[k].iter().copied().fold(T::infinity(), T::min);
        if j <= threshold {
            return match prev {
                Some((t0, j0)) if j0 > j => t0 + (t - t0) * (j0 - threshold) / (j0 - j),
                _ => t,
            };
        }
        prev = Some((t, j));
    }
    field.horizon()
}

/// `u(x, t) = U(X⁻¹(x, t), t)` on the initial grid, by monotone bracketing and linear
/// interpolation; outside the image of `X` the line `U + P(x − X)` of the nearest end is used.
pub fn smooth_reference_solution<T: Real>(field: &CharField<T>, t: T) -> Result<GridFn1<T>> {
    let window = invertibility_window(field, T::half());
    if t >= window && window < field.horizon() {
        return pre(format!("t = {t} is not below the invertibility window {window}"));
    }
    let tol = T::lit(1e-12) * (T::one() + field.horizon());
    let k = field
        .times
        .iter()
        .position(|&s| (s - t).abs() <= tol)
        .ok_or_else(|| Error::Argument(format!("t = {t} is not a recorded time of the field")))?;
    let (xs, us, ps) = (&field.x[k], &field.u[k], &field.p[k]);
    let n = xs.len();
    let out = field
        .x0()
        .into_iter()
        .map(|x| {
            if x <= xs[0] {
                return us[0] + ps[0] * (x - xs[0]);
            }
            if x >= xs[n - 1] {
                return us[n - 1] + ps[n - 1] * (x - xs[n - 1]);
            }
            // leftmost bracket X_i ≤ x ≤ X_{i+1}
            let i = xs.partition_point(|&v| v < x).saturating_sub(1).min(n - 2);
            let span = xs[i + 1] - xs[i];
            if span <= T::zero() {
                us[i]
            } else {
                let w = (x - xs[i]) / span;
                us[i] + w * (us[i + 1] - us[i])
            }
        })
        .collect();
    Ok(field.u0.with_values(out))
}
