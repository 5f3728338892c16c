use super::{convex_envelope, is_infinite_value, SENTINEL};
use crate::error::{arg, Result};
use crate::grid::{Boundary, GridFn1};
use crate::hamiltonian::Hamiltonian;
use crate::scalar::{fit_loglog, Real};

/// `m_k` above this value (or any non-finite state) flags blow-up and stops the iteration.
pub const BLOW_UP_THRESHOLD: f64 = 1e6;

/// Trajectory of the alternating iteration `w_{k+1} = (w_k ± δH)**`.
#[derive(Clone, Debug)]
pub struct HopfIteration<T> {
    pub w: Vec<GridFn1<T>>,
    /// `m_k = −min w_k` over the finite points.
    pub m: Vec<T>,
    pub blow_up: bool,
}

/// Runs `steps` alternating Hopf steps from `w₀ = 0` on `[−1, 1]` (`+∞` outside).
///
/// `points` grid nodes cover `[−1, 1]`; a sentinel margin of a quarter on each side is added.
/// Even steps add `δH`, odd steps subtract it, each followed by the convex envelope.
pub fn hopf_iterate<T: Real>(h: &Hamiltonian<T>, delta: T, steps: usize, points: usize) -> Result<HopfIteration<T>> {
    if delta < T::zero() {
        return arg("increment must be nonnegative");
    }
    if points < 3 || points.is_multiple_of(2) {
        return arg("need an odd number (at least three) of grid points");
    }
    let step = T::two() / T::from_usize_lossy(points - 1);
    let margin = points / 8 + 1;
    let n = points + 2 * margin;
    let origin = -T::one() - step * T::from_usize_lossy(margin);
    let inf = T::lit(SENTINEL);
    let w0 = GridFn1::from_fn(origin, step, n, Boundary::LinearExtension, |_| T::zero())?;
    let w0 = w0.with_values((0..n).map(|i| if i < margin || i >= margin + points { inf } else { T::zero() }).collect());
    // exact symmetric nodes so that p = 0 is hit exactly
    let centre = margin + (points - 1) / 2;
    let hv: Vec<T> = (0..n).map(|i| h.eval(step * T::lit(i as f64 - centre as f64))).collect();
    let mut w = vec![w0];
    let mut m = vec![T::zero()];
    let mut blow_up = false;
    for k in 0..steps {
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        let cur = w.last().unwrap();
        let raw: Vec<T> = cur
            .values
            .iter()
            .zip(&hv)
            .map(|(&v, &hp)| if is_infinite_value(v) { inf } else { v + sign * delta * hp })
            .collect();
        let next = convex_envelope(&cur.with_values(raw));
        let finite: Vec<T> = next.values.iter().copied().filter(|&v| !is_infinite_value(v)).collect();
        let mk = -finite.iter().copied().fold(T::infinity(), T::min);
        let bad = finite.is_empty() || finite.iter().any(|v| !v.is_finite());
        w.push(next);
        m.push(mk);
        if bad || !(mk < T::lit(BLOW_UP_THRESHOLD)) {
            blow_up = true;
            break;
        }
    }
    Ok(HopfIteration { w, m, blow_up })
}

/// Fitted exponent `β` in `m_k ≈ c·k^β` over `k ∈ [k_min, k_max]` with `m_k > 0`.
pub fn growth_exponent<T: Real>(m: &[T], k_min: usize, k_max: usize) -> Option<T> {
    let (xs, ys): (Vec<T>, Vec<T>) = (k_min.max(1)..=k_max.min(m.len() - 1))
        .filter(|&k| m[k] > T::zero())
        .map(|k| (T::from_usize_lossy(k), m[k]))
        .unzip();
    (xs.len() >= 3).then(|| fit_loglog(&xs, &ys).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_increment_is_fixed_point() {
        let it = hopf_iterate(&Hamiltonian::<f64>::power(0.25), 0.0, 10, 101).unwrap();
        for w in &it.w {
            assert_eq!(w.values, it.w[0].values);
        }
        assert!(it.m.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn difference_of_convex_stays_bounded() {
        let it = hopf_iterate(&Hamiltonian::<f64>::abs(), 1.0, 100, 2001).unwrap();
        assert!(!it.blow_up);
        assert!(it.m.iter().all(|&m| m.abs() < 1e-9));
        let sat = hopf_iterate(&Hamiltonian::Saturating { scale: 1.0f64 }, 1.0, 100, 2001).unwrap();
        let tail = &sat.m[50..];
        assert!(tail.iter().fold(0.0f64, |a, &b| a.max(b)) < 2.0, "{tail:?}");
    }

    #[test]
    fn non_dc_power_grows() {
        let it = hopf_iterate(&Hamiltonian::<f64>::power(0.25), 1.0, 60, 2001).unwrap();
        assert!(it.m[60] > it.m[20] && it.m[20] > it.m[5]);
        // m_1 = 0: adding δ|p|^θ keeps the minimum at p = 0
        assert_eq!(it.m[1], 0.0);
    }

    #[test]
    fn exponent_fit_on_exact_power() {
        let m: Vec<f64> = (0..100).map(|k| 2.0 * (k as f64).powf(0.75)).collect();
        assert!((growth_exponent(&m, 5, 99).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn blow_up_flag_raised_by_huge_steps() {
        let it = hopf_iterate(&Hamiltonian::<f64>::power(0.25), 1e7, 10, 201).unwrap();
        assert!(it.blow_up);
    }
}
