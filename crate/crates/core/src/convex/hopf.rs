use super::legendre_at;
use crate::error::{pre, Result};
use crate::grid::GridFn1;
use crate::hamiltonian::Hamiltonian;
use crate::scalar::Real;

/// Hopf formula `u(x, t) = max_p (p·x + t·H(p) − u0*(p))` for convex `u0`, any `H`, any sign of `t`.
///
/// The `p` grid is the slope range of `u0` (its conjugate is `+∞` beyond, given linear
/// extension), sampled uniformly with as many points as `u0` plus every discrete slope.
pub fn hopf_solve<T: Real>(h: &Hamiltonian<T>, u0: &GridFn1<T>, t: T) -> Result<GridFn1<T>> {
    if !u0.is_convex(T::lit(1e-8)) {
        return pre("Hopf formula needs convex initial data");
    }
    let slopes = u0.slopes();
    let (lo, hi) = (slopes[0], slopes[slopes.len() - 1]);
    let n = u0.len();
    let mut ps: Vec<T> = slopes.clone();
    if hi > lo {
        ps.extend((0..n).map(|k| lo + (hi - lo) * T::from_usize_lossy(k) / T::from_usize_lossy(n - 1)));
    }
    ps.push(T::zero().max(lo).min(hi));
    ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ps.dedup();
    let conj = legendre_at(u0, &ps);
    let gain: Vec<T> = ps.iter().zip(&conj).map(|(&p, &c)| t * h.eval(p) - c).collect();
    let out = (0..n)
        .map(|i| {
            let x = u0.x(i);
            let mut best = T::neg_infinity();
            for (&p, &g) in ps.iter().zip(&gain) {
                let v = p * x + g;
                if v > best {
                    best = v;
                }
            }
            best
        })
        .collect();
    Ok(u0.with_values(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::lax_oleinik_solve;
    use crate::grid::Boundary;

    fn grid(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> GridFn1<f64> {
        GridFn1::on_interval(lo, hi, n, Boundary::LinearExtension, f).unwrap()
    }

    #[test]
    fn time_zero_is_identity() {
        let u0 = grid(-2.0, 2.0, 101, |x| x * x + 0.3 * x);
        let u = hopf_solve(&Hamiltonian::power(0.25), &u0, 0.0).unwrap();
        assert!(u.sup_diff(&u0).unwrap() < 1e-12);
    }

    #[test]
    fn cone_under_abs() {
        let u0 = grid(-3.0, 3.0, 61, f64::abs);
        for t in [0.5, 1.0] {
            let u = hopf_solve(&Hamiltonian::abs(), &u0, t).unwrap();
            for i in 0..u0.len() {
                assert!((u.values[i] - (u0.x(i).abs() + t)).abs() < 1e-12);
            }
        }
        // negative time: (|x| + t)₊
        let u = hopf_solve(&Hamiltonian::abs(), &u0, -0.7).unwrap();
        for i in 0..u0.len() {
            assert!((u.values[i] - (u0.x(i).abs() - 0.7).max(0.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_data_rides_characteristics() {
        let u0 = grid(-1.0, 1.0, 21, |x| 0.7 * x + 0.2);
        let h = Hamiltonian::Saturating { scale: 1.0 };
        let u = hopf_solve(&h, &u0, 1.3).unwrap();
        for i in 0..u0.len() {
            let x = u0.x(i);
            assert!((u.values[i] - (0.7 * x + 0.2 + 1.3 * h.eval(0.7))).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonconvex_data() {
        let u0 = grid(-1.0, 1.0, 21, |x| -x * x);
        assert!(hopf_solve(&Hamiltonian::abs(), &u0, 1.0).is_err());
    }

    #[test]
    fn agrees_with_lax_oleinik_for_convex_pairs() {
        let u0 = grid(-3.0, 3.0, 601, |x| (1.0 + x * x).sqrt());
        for h in [Hamiltonian::quadratic(), Hamiltonian::abs(), Hamiltonian::quadratic().negated()] {
            let a = hopf_solve(&h, &u0, 0.6).unwrap();
            let b = lax_oleinik_solve(&h, &u0, 0.6).unwrap();
            let err = (100..500).map(|i| (a.values[i] - b.values[i]).abs()).fold(0.0, f64::max);
            assert!(err < 2.0 * u0.step, "{}: {err}", h.describe());
        }
    }

    #[test]
    fn semigroup_on_convex_data() {
        let u0 = grid(-3.0, 3.0, 601, |x| (1.0 + x * x).sqrt());
        let h = Hamiltonian::power(0.25);
        let two_step = hopf_solve(&h, &hopf_solve(&h, &u0, 0.3).unwrap(), 0.4).unwrap();
        let one_step = hopf_solve(&h, &u0, 0.7).unwrap();
        let err = (100..500).map(|i| (two_step.values[i] - one_step.values[i]).abs()).fold(0.0, f64::max);
        assert!(err < 2.0 * u0.step, "{err}");
    }
}
