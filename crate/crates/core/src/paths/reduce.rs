//! Skeleton of successive alternating extrema.

use super::Path;
use crate::error::{arg, Result};
use crate::scalar::Real;

/// Knot indices (into `p.restrict(end)`) of the alternating extrema, in time order,
/// together with the position of `τ₀` in that list. `None` for a constant path.
pub fn skeleton_indices<T: Real>(p: &Path<T>) -> Option<(Vec<usize>, usize)> {
    let v = p.values(0);
    let n = v.len();
    let gmax = v.iter().copied().fold(T::neg_infinity(), T::max);
    let gmin = v.iter().copied().fold(T::infinity(), T::min);
    if gmax == gmin {
        return None;
    }
    // τ₀: latest time the global max or min is attained
    let tau0 = (0..n).rev().find(|&k| v[k] == gmax || v[k] == gmin).unwrap();
    let starts_at_max = v[tau0] == gmax;

    // sup-argmax / sup-argmin over [i, n-1]; ties resolved to the latest index
    let mut suf_max = vec![n - 1; n];
    let mut suf_min = vec![n - 1; n];
    for i in (0..n - 1).rev() {
        suf_max[i] = if v[i] > v[suf_max[i + 1]] { i } else { suf_max[i + 1] };
        suf_min[i] = if v[i] < v[suf_min[i + 1]] { i } else { suf_min[i + 1] };
    }
    // inf-argmax / inf-argmin over [0, i]; ties resolved to the earliest index
    let mut pre_max = vec![0; n];
    let mut pre_min = vec![0; n];
    for i in 1..n {
        pre_max[i] = if v[i] > v[pre_max[i - 1]] { i } else { pre_max[i - 1] };
        pre_min[i] = if v[i] < v[pre_min[i - 1]] { i } else { pre_min[i - 1] };
    }

    let mut back = Vec::new();
    let (mut cur, mut at_max) = (tau0, starts_at_max);
    while cur > 0 {
        cur = if at_max { pre_min[cur] } else { pre_max[cur] };
        at_max = !at_max;
        back.push(cur);
    }
    let mut idx: Vec<usize> = back.into_iter().rev().collect();
    let pos = idx.len();
    idx.push(tau0);
    let (mut cur, mut at_max) = (tau0, starts_at_max);
    while cur < n - 1 {
        cur = if at_max { suf_min[cur] } else { suf_max[cur] };
        at_max = !at_max;
        idx.push(cur);
    }
    Some((idx, pos))
}

fn scalar_restricted<T: Real>(p: &Path<T>, end: T) -> Result<Path<T>> {
    if p.components() != 1 {
        return arg("path reduction is defined for scalar paths");
    }
    if end >= p.horizon() {
        Ok(p.clone())
    } else {
        p.restrict(end)
    }
}

fn constant<T: Real>(end: T) -> Result<Path<T>> {
    Path::from_knots(&[(T::zero(), T::zero()), (end, T::zero())])
}

/// Reduced path `R_{0,T}(ξ)`: the piecewise-linear path through the successive
/// alternating extrema of `ξ` on `[0, end]`.
pub fn reduce_path<T: Real>(p: &Path<T>, end: T) -> Result<Path<T>> {
    let q = scalar_restricted(p, end)?;
    let Some((idx, _)) = skeleton_indices(&q) else {
        return constant(q.horizon());
    };
    let knots: Vec<(T, T)> = idx.iter().map(|&k| (q.times()[k], q.values(0)[k])).collect();
    Path::from_knots(&knots)
}

/// Fully reduced path: agrees with `ξ` at the backward extrema, `τ₀` and `T`, affine on `[τ₀, T]`.
pub fn fully_reduce_path<T: Real>(p: &Path<T>, end: T) -> Result<Path<T>> {
    let q = scalar_restricted(p, end)?;
    let Some((idx, pos)) = skeleton_indices(&q) else {
        return constant(q.horizon());
    };
    let last = q.len() - 1;
    let mut keep: Vec<usize> = idx[..=pos].to_vec();
    if *keep.last().unwrap() != last {
        keep.push(last);
    }
    let knots: Vec<(T, T)> = keep.iter().map(|&k| (q.times()[k], q.values(0)[k])).collect();
    Path::from_knots(&knots)
}
