//! Scalar abstraction shared by every solver.

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating point type the solvers are generic over (`f32` or `f64`).
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the target cannot hold it at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize not representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }

    /// Positive part.
    #[inline]
    fn pos(self) -> Self {
        if self > Self::zero() {
            self
        } else {
            Self::zero()
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Largest value of a slice, `-inf` when empty.
pub fn max_of<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::neg_infinity(), |a, &b| a.max(b))
}

/// Smallest value of a slice, `+inf` when empty.
pub fn min_of<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::infinity(), |a, &b| a.min(b))
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope<T: Real>(xs: &[T], ys: &[T]) -> T {
    let n = T::from_usize_lossy(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Least-squares fit `log y = slope * log x + intercept`; returns `(slope, intercept)`.
pub fn fit_loglog<T: Real>(xs: &[T], ys: &[T]) -> (T, T) {
    let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.ln()).collect();
    let s = fit_slope(&lx, &ly);
    let n = T::from_usize_lossy(lx.len());
    let c = (ly.iter().copied().sum::<T>() - s * lx.iter().copied().sum::<T>()) / n;
    (s, c)
}

/// Median of a slice (mean of the middle pair for even lengths).
pub fn median<T: Real>(v: &[T]) -> T {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = s.len();
    if n == 0 {
        return T::nan();
    }
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) * T::half()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_recovers_power() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.5)).collect();
        let (s, c) = fit_loglog(&xs, &ys);
        assert!((s + 0.5).abs() < 1e-12);
        assert!((c - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0f32, 1.0, 2.0, 3.0]), 2.5);
    }
}
