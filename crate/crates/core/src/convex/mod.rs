//! Discrete convex analysis: conjugates, envelopes, the Hopf and Lax–Oleinik formulas,
//! and the alternating Hopf iteration.

mod hopf;
mod iterate;
mod lax_oleinik;

pub use hopf::hopf_solve;
pub use iterate::{growth_exponent, hopf_iterate, HopfIteration, BLOW_UP_THRESHOLD};
pub use lax_oleinik::{apply_segment, lax_oleinik_solve};

use crate::error::{arg, Result};
use crate::grid::{Boundary, GridFn1};
use crate::scalar::Real;

/// Stand-in for `+∞` on grids. Values at or above half of it count as infinite.
pub const SENTINEL: f64 = 1e12;

#[inline]
pub fn is_infinite_value<T: Real>(v: T) -> bool {
    !(v < T::lit(SENTINEL * 0.5))
}

/// Indices of the lower convex hull of the finite points `(xs[i], fs[i])`, left to right.
pub(crate) fn lower_hull<T: Real>(xs: &[T], fs: &[T]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..xs.len() {
        if is_infinite_value(fs[i]) {
            continue;
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b unless a→b→i turns strictly left
            let cross = (xs[b] - xs[a]) * (fs[i] - fs[a]) - (fs[b] - fs[a]) * (xs[i] - xs[a]);
            if cross <= T::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// `f*(q) = max_i (q·p_i − f_i)` by direct search over every finite grid point.
pub fn legendre_brute<T: Real>(f: &GridFn1<T>, qs: &[T]) -> Vec<T> {
    qs.iter()
        .map(|&q| {
            let mut best = T::neg_infinity();
            for (i, &v) in f.values.iter().enumerate() {
                if !is_infinite_value(v) {
                    best = best.max(q * f.x(i) - v);
                }
            }
            if best == T::neg_infinity() {
                T::lit(SENTINEL)
            } else {
                best
            }
        })
        .collect()
}

/// Conjugate at arbitrary `qs` by a scan along the lower hull of `f`.
///
/// For nondecreasing `qs` the hull pointer only moves forward (linear time); otherwise
/// each query uses a binary search over the hull slopes.
pub fn legendre_at<T: Real>(f: &GridFn1<T>, qs: &[T]) -> Vec<T> {
    let xs = f.xs();
    let hull = lower_hull(&xs, &f.values);
    if hull.is_empty() {
        return vec![T::lit(SENTINEL); qs.len()];
    }
    let slopes: Vec<T> = hull.windows(2).map(|w| (f.values[w[1]] - f.values[w[0]]) / (xs[w[1]] - xs[w[0]])).collect();
    let value = |k: usize, q: T| q * xs[hull[k]] - f.values[hull[k]];
    let sorted = qs.windows(2).all(|w| w[0] <= w[1]);
    let mut out = Vec::with_capacity(qs.len());
    let mut k = 0;
    for &q in qs {
        if sorted {
            while k < slopes.len() && slopes[k] < q {
                k += 1;
            }
        } else {
            k = slopes.partition_point(|&s| s < q);
        }
        out.push(value(k, q));
    }
    out
}

/// Legendre transform onto a uniform `q` grid.
///
/// With `q_grid = None` the grid spans the hull slope range of `f` with as many points as `f`.
pub fn legendre<T: Real>(f: &GridFn1<T>, q_grid: Option<(T, T, usize)>) -> Result<GridFn1<T>> {
    let (q0, dq, n) = match q_grid {
        Some(g) => g,
        None => {
            let xs = f.xs();
            let hull = lower_hull(&xs, &f.values);
            if hull.len() < 2 {
                return arg("empty slope range: fewer than two finite points");
            }
            let slope = |a: usize, b: usize| (f.values[b] - f.values[a]) / (xs[b] - xs[a]);
            let lo = slope(hull[0], hull[1]);
            let hi = slope(hull[hull.len() - 2], hull[hull.len() - 1]);
            if !(hi > lo) {
                return arg("empty slope range: f is affine");
            }
            let n = f.len();
            (lo, (hi - lo) / T::from_usize_lossy(n - 1), n)
        }
    };
    let qs: Vec<T> = (0..n).map(|i| q0 + dq * T::from_usize_lossy(i)).collect();
    GridFn1::new(q0, dq, legendre_at(f, &qs), Boundary::LinearExtension)
}

/// Largest convex minorant on the grid (`f**` restricted to the grid points).
///
/// Sentinel points are excluded from the hull; those outside the finite range stay infinite.
pub fn convex_envelope<T: Real>(f: &GridFn1<T>) -> GridFn1<T> {
    let xs = f.xs();
    let hull = lower_hull(&xs, &f.values);
    let mut out = vec![T::lit(SENTINEL); f.len()];
    if hull.is_empty() {
        return f.with_values(out);
    }
    if hull.len() == 1 {
        out[hull[0]] = f.values[hull[0]];
        return f.with_values(out);
    }
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (f.values[a], f.values[b]);
        let span = T::from_usize_lossy(b - a);
        for (i, o) in out.iter_mut().enumerate().take(b + 1).skip(a) {
            let s = T::from_usize_lossy(i - a) / span;
            *o = fa + (fb - fa) * s;
        }
        out[a] = fa;
        out[b] = fb;
    }
    f.with_values(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> GridFn1<f64> {
        GridFn1::on_interval(lo, hi, n, Boundary::LinearExtension, f).unwrap()
    }

    #[test]
    fn quadratic_is_self_conjugate() {
        let f = grid(-4.0, 4.0, 801, |p| p * p / 2.0);
        let g = legendre(&f, Some((-3.0, 0.01, 601))).unwrap();
        for (i, &v) in g.values.iter().enumerate() {
            let q = g.x(i);
            assert!((v - q * q / 2.0).abs() <= f.step, "q={q}");
        }
    }

    #[test]
    fn abs_conjugate_is_indicator() {
        let f = grid(-5.0, 5.0, 1001, f64::abs);
        let g = legendre(&f, None).unwrap();
        assert!((g.origin + 1.0).abs() < 1e-12 && (g.x(g.len() - 1) - 1.0).abs() < 1e-12);
        assert!(g.values.iter().all(|v| v.abs() < 1e-12));
        let out = legendre_at(&f, &[-2.0, 1.5]);
        assert!(out.iter().all(|&v| v >= 2.0), "{out:?}");
    }

    #[test]
    fn affine_input_has_empty_slope_range() {
        let f = grid(-1.0, 1.0, 11, |p| 2.0 * p + 1.0);
        assert!(legendre(&f, None).is_err());
    }

    #[test]
    fn fast_transform_matches_brute_force() {
        let f = grid(-2.0, 2.0, 201, |p| (3.0 * p).sin() + p * p);
        let qs: Vec<f64> = (0..301).map(|k| -6.0 + 0.04 * k as f64).collect();
        let a = legendre_at(&f, &qs);
        let b = legendre_brute(&f, &qs);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        let mut rev = qs.clone();
        rev.reverse();
        let c = legendre_at(&f, &rev);
        for (x, y) in c.iter().rev().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn biconjugate_recovers_convex_piecewise_linear() {
        // convex piecewise-linear function with kinks at grid points
        let f = grid(-2.0, 2.0, 401, |p| (p - 0.5).abs().max(2.0 * p + 0.3).max(-0.7 * p));
        let fs = legendre(&f, Some((-3.0, 0.001, 6001))).unwrap();
        let back = legendre_at(&fs, &f.xs());
        for (i, (&a, &b)) in back.iter().zip(&f.values).enumerate() {
            assert!((a - b).abs() <= 2.0 * f.step, "i={i}: {a} vs {b}");
        }
    }

    #[test]
    fn envelope_of_double_well() {
        let f = grid(-3.0, 3.0, 61, |p| (p - 1.0).abs().min((p + 1.0).abs()));
        let e = convex_envelope(&f);
        for (i, &v) in e.values.iter().enumerate() {
            let p = e.x(i);
            let expect = (p.abs() - 1.0).max(0.0);
            assert!((v - expect).abs() < 1e-12, "p={p}");
        }
        // affine-minorant sweep over every pairwise slope as an independent oracle
        let mut slopes = Vec::new();
        for a in 0..f.len() {
            for b in a + 1..f.len() {
                slopes.push((f.values[b] - f.values[a]) / (f.x(b) - f.x(a)));
            }
        }
        let conj = legendre_brute(&f, &slopes);
        for i in 0..f.len() {
            let p = f.x(i);
            let oracle = slopes.iter().zip(&conj).map(|(&q, &c)| q * p - c).fold(f64::MIN, f64::max);
            assert!((oracle - e.values[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn envelope_fixes_convex_and_commutes_with_constants() {
        let f = grid(-1.0, 1.0, 41, |p| p.powi(4) + p);
        let e = convex_envelope(&f);
        assert!(e.sup_diff(&f).unwrap() < 1e-14);
        let g = grid(-1.0, 1.0, 41, |p| (4.0 * p).cos());
        let shifted = convex_envelope(&g.map(|v| v + 2.5));
        let base = convex_envelope(&g).map(|v| v + 2.5);
        assert!(shifted.sup_diff(&base).unwrap() < 1e-14);
    }

    #[test]
    fn envelope_excludes_sentinels() {
        let mut f = grid(-2.0, 2.0, 41, |p| p * p);
        for i in 0..5 {
            f.values[i] = SENTINEL;
        }
        f.values[20] = SENTINEL;
        let e = convex_envelope(&f);
        assert!(is_infinite_value(e.values[0]) && is_infinite_value(e.values[4]));
        assert!((e.values[20] - 0.01).abs() < 1e-12);
    }

    fn arb_grid() -> impl Strategy<Value = GridFn1<f64>> {
        proptest::collection::vec(-5.0f64..5.0, 3..60)
            .prop_map(|v| GridFn1::new(-1.0, 2.0 / (v.len() - 1) as f64, v, Boundary::LinearExtension).unwrap())
    }

    proptest! {
        #[test]
        fn conjugate_is_convex(f in arb_grid()) {
            let qs: Vec<f64> = (0..200).map(|k| -50.0 + 0.5 * k as f64).collect();
            let g = legendre_at(&f, &qs);
            for w in g.windows(3) {
                prop_assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-9);
            }
        }

        #[test]
        fn biconjugate_below_function(f in arb_grid()) {
            let e = convex_envelope(&f);
            for (a, b) in e.values.iter().zip(&f.values) {
                prop_assert!(*a <= *b + 1e-12);
            }
        }

        #[test]
        fn conjugation_reverses_order(f in arb_grid(), bump in proptest::collection::vec(0.0f64..2.0, 60)) {
            let g = f.with_values(f.values.iter().zip(&bump).map(|(a, b)| a + b).collect());
            let qs: Vec<f64> = (0..100).map(|k| -20.0 + 0.4 * k as f64).collect();
            let fs = legendre_at(&f, &qs);
            let gs = legendre_at(&g, &qs);
            for (a, b) in fs.iter().zip(&gs) {
                prop_assert!(*a >= *b - 1e-12);
            }
        }
    }
}
