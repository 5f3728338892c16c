//! Piecewise-linear driving signals: construction, evaluation, statistics and reduction.

mod approx;
mod reduce;
pub(crate) mod sample;

pub use approx::{approximate, Approximation};
pub use reduce::{fully_reduce_path, reduce_path, skeleton_indices};
pub use sample::{sample_path, HoelderConstruction, PathEnsembleSpec, PathKind};

use crate::error::{arg, Error, Result};
use crate::scalar::Real;

/// Continuous piecewise-linear path, possibly vector valued, starting at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Path<T> {
    times: Vec<T>,
    // values[c][k] is component c at knot k
    values: Vec<Vec<T>>,
}

impl<T: Real> Path<T> {
    /// Builds a path from knot times and one value column per component.
    pub fn new(times: Vec<T>, values: Vec<Vec<T>>) -> Result<Self> {
        if times.len() < 2 {
            return arg("a path needs at least two knots");
        }
        if values.is_empty() {
            return arg("a path needs at least one component");
        }
        if times[0] != T::zero() {
            return arg("first knot time must be 0");
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
            return arg("knot times must be finite and strictly increasing");
        }
        for (c, col) in values.iter().enumerate() {
            if col.len() != times.len() {
                return arg(format!("component {c} has {} values for {} knots", col.len(), times.len()));
            }
            if col[0] != T::zero() {
                return arg(format!("component {c} does not start at 0"));
            }
            if col.iter().any(|v| !v.is_finite()) {
                return arg(format!("component {c} has non-finite values"));
            }
        }
        Ok(Self { times, values })
    }

    /// Scalar path from parallel time/value lists.
    pub fn scalar(times: Vec<T>, values: Vec<T>) -> Result<Self> {
        Self::new(times, vec![values])
    }

    /// Scalar path from `(time, value)` knots.
    pub fn from_knots(knots: &[(T, T)]) -> Result<Self> {
        Self::scalar(knots.iter().map(|k| k.0).collect(), knots.iter().map(|k| k.1).collect())
    }

    /// Scalar path from consecutive `(duration, slope)` segments.
    pub fn from_segments(segments: &[(T, T)]) -> Result<Self> {
        let mut times = vec![T::zero()];
        let mut vals = vec![T::zero()];
        for &(dt, s) in segments {
            let t = *times.last().unwrap() + dt;
            let v = *vals.last().unwrap() + s * dt;
            times.push(t);
            vals.push(v);
        }
        Self::scalar(times, vals)
    }

    /// `ξ(t) = slope·t` on `[0, horizon]`.
    pub fn linear(slope: T, horizon: T) -> Result<Self> {
        Self::from_knots(&[(T::zero(), T::zero()), (horizon, slope * horizon)])
    }

    /// Identically zero path with `m` components.
    pub fn zero(horizon: T, m: usize) -> Result<Self> {
        Self::new(vec![T::zero(), horizon], vec![vec![T::zero(); 2]; m.max(1)])
    }

    pub fn horizon(&self) -> T {
        *self.times.last().unwrap()
    }

    pub fn components(&self) -> usize {
        self.values.len()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self, component: usize) -> &[T] {
        &self.values[component]
    }

    /// Knot pairs of one component.
    pub fn knots(&self, component: usize) -> Vec<(T, T)> {
        self.times.iter().copied().zip(self.values[component].iter().copied()).collect()
    }

    fn check_time(&self, t: T) -> Result<()> {
        if t < T::zero() || t > self.horizon() || t.is_nan() {
            return Err(Error::OutOfRange { t: t.as_f64(), end: self.horizon().as_f64() });
        }
        Ok(())
    }

    /// Index `k` of the segment `[t_k, t_{k+1}]` containing `t` (clamped).
    fn segment(&self, t: T) -> usize {
        let k = self.times.partition_point(|&s| s <= t);
        k.saturating_sub(1).min(self.times.len() - 2)
    }

    /// Linear interpolation between the bracketing knots.
    pub fn eval(&self, component: usize, t: T) -> Result<T> {
        self.check_time(t)?;
        Ok(self.eval_clamped(component, t))
    }

    /// Like [`eval`](Self::eval) but extends the path by constants outside `[0, T]`.
    pub fn eval_clamped(&self, component: usize, t: T) -> T {
        let col = &self.values[component];
        if t <= T::zero() {
            return col[0];
        }
        if t >= self.horizon() {
            return *col.last().unwrap();
        }
        let k = self.segment(t);
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let w = (t - t0) / (t1 - t0);
        col[k] + w * (col[k + 1] - col[k])
    }

    /// All components at time `t`.
    pub fn eval_all(&self, t: T) -> Result<Vec<T>> {
        self.check_time(t)?;
        Ok((0..self.components()).map(|c| self.eval_clamped(c, t)).collect())
    }

    /// Running maximum and minimum of component 0 over `[0, t]`.
    pub fn running_extrema(&self, t: T) -> Result<(T, T)> {
        self.running_extrema_of(0, t)
    }

    /// Running maximum and minimum of one component over `[0, t]`, exact from the knots.
    pub fn running_extrema_of(&self, component: usize, t: T) -> Result<(T, T)> {
        self.check_time(t)?;
        let end = self.eval_clamped(component, t);
        let mut hi = end;
        let mut lo = end;
        for (s, &v) in self.times.iter().zip(&self.values[component]) {
            if *s > t {
                break;
            }
            hi = hi.max(v);
            lo = lo.min(v);
        }
        Ok((hi, lo))
    }

    /// Total variation of component 0 over `[a, b]`.
    pub fn total_variation(&self, a: T, b: T) -> Result<T> {
        self.total_variation_of(0, a, b)
    }

    pub fn total_variation_of(&self, component: usize, a: T, b: T) -> Result<T> {
        if !(a < b) {
            return arg("total variation needs a < b");
        }
        self.check_time(a)?;
        self.check_time(b)?;
        let mut prev = self.eval_clamped(component, a);
        let mut tv = T::zero();
        for (s, &v) in self.times.iter().zip(&self.values[component]) {
            if *s <= a {
                continue;
            }
            if *s >= b {
                break;
            }
            tv += (v - prev).abs();
            prev = v;
        }
        tv += (self.eval_clamped(component, b) - prev).abs();
        Ok(tv)
    }

    /// Restriction to `[0, end]`, adding a knot at `end` when needed.
    pub fn restrict(&self, end: T) -> Result<Self> {
        self.check_time(end)?;
        if end <= T::zero() {
            return arg("restriction horizon must be positive");
        }
        let k = self.times.partition_point(|&s| s < end);
        let mut times: Vec<T> = self.times[..k].to_vec();
        times.push(end);
        let values = (0..self.components())
            .map(|c| {
                let mut col = self.values[c][..k].to_vec();
                col.push(self.eval_clamped(c, end));
                col
            })
            .collect();
        Self::new(times, values)
    }

    /// Path sampled at the given strictly increasing times (which must start at 0).
    pub fn resample(&self, times: &[T]) -> Result<Self> {
        for &t in times {
            self.check_time(t)?;
        }
        let values = (0..self.components()).map(|c| times.iter().map(|&t| self.eval_clamped(c, t)).collect()).collect();
        Self::new(times.to_vec(), values)
    }

    /// Sorted union of the knot times of two paths over the common horizon.
    pub fn merged_times(&self, other: &Self) -> Vec<T> {
        let end = self.horizon().min(other.horizon());
        let mut ts: Vec<T> = self.times.iter().chain(other.times.iter()).copied().filter(|&t| t <= end).collect();
        ts.push(end);
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup();
        ts
    }

    /// `max_i sup_t |self_i(t) − other_i(t)|`, exact for piecewise-linear paths.
    pub fn sup_distance(&self, other: &Self) -> T {
        let ts = self.merged_times(other);
        let m = self.components().min(other.components());
        let mut d = T::zero();
        for c in 0..m {
            for &t in &ts {
                d = d.max((self.eval_clamped(c, t) - other.eval_clamped(c, t)).abs());
            }
        }
        d
    }

    /// Pointwise combination `a·self + b·other` on the merged knot set.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if self.components() != other.components() {
            return arg("component counts differ");
        }
        let ts = self.merged_times(other);
        let values = (0..self.components())
            .map(|c| ts.iter().map(|&t| a * self.eval_clamped(c, t) + b * other.eval_clamped(c, t)).collect())
            .collect();
        Self::new(ts, values)
    }

    /// Increments of every component over consecutive knots: `out[k][c]`.
    pub fn increments(&self) -> Vec<Vec<T>> {
        (0..self.len() - 1)
            .map(|k| (0..self.components()).map(|c| self.values[c][k + 1] - self.values[c][k]).collect())
            .collect()
    }

    /// Scalar projection onto one component.
    pub fn component(&self, c: usize) -> Result<Self> {
        if c >= self.components() {
            return arg(format!("component {c} out of range"));
        }
        Self::new(self.times.clone(), vec![self.values[c].clone()])
    }

    /// CSV with header `t,v1[,v2,...]`, full round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for c in 0..self.components() {
            s.push_str(&format!(",v{}", c + 1));
        }
        s.push('\n');
        for k in 0..self.len() {
            s.push_str(&format!("{}", self.times[k]));
            for c in 0..self.components() {
                s.push_str(&format!(",{}", self.values[c][k]));
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty path CSV".into()))?;
        let cols = header.split(',').count();
        if cols < 2 || !header.trim_start().starts_with('t') {
            return Err(Error::Parse(format!("bad path header `{header}`")));
        }
        let mut times = Vec::new();
        let mut values = vec![Vec::new(); cols - 1];
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols {
                return Err(Error::Parse(format!("row {} has {} fields, expected {cols}", i + 2, fields.len())));
            }
            let parse =
                |f: &str| f.trim().parse::<f64>().map(T::lit).map_err(|e| Error::Parse(format!("row {}: {e}", i + 2)));
            times.push(parse(fields[0])?);
            for c in 1..cols {
                values[c - 1].push(parse(fields[c])?);
            }
        }
        Self::new(times, values)
    }
}

/// Largest oscillation `max − min` of component 0 over windows `[t − r, t + r]`, scanned exactly.
pub fn oscillation<T: Real>(p: &Path<T>, r: T) -> T {
    let mut best = T::zero();
    let mut ts: Vec<T> = p.times().to_vec();
    // window edges can sit anywhere; knots shifted by ±r catch every extremal configuration
    for &t in p.times() {
        for s in [t - r, t + r] {
            if s > T::zero() && s < p.horizon() {
                ts.push(s);
            }
        }
    }
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &c in &ts {
        let lo_t = (c - r).max(T::zero());
        let hi_t = (c + r).min(p.horizon());
        let mut hi = p.eval_clamped(0, lo_t).max(p.eval_clamped(0, hi_t));
        let mut lo = p.eval_clamped(0, lo_t).min(p.eval_clamped(0, hi_t));
        for (s, &v) in p.times().iter().zip(p.values(0)) {
            if *s > lo_t && *s < hi_t {
                hi = hi.max(v);
                lo = lo.min(v);
            }
        }
        best = best.max(hi - lo);
    }
    best
}

/// Empirical modulus of continuity `ω(r) = sup_{|t−s|≤r} |ξ(t) − ξ(s)|`, evaluated at knot lags.
pub fn modulus<T: Real>(p: &Path<T>, r: T) -> T {
    let ts = p.times();
    let mut best = T::zero();
    for c in 0..p.components() {
        let vs = p.values(c);
        let mut j = 0;
        for i in 0..ts.len() {
            if j < i {
                j = i;
            }
            while j + 1 < ts.len() && ts[j + 1] - ts[i] <= r {
                j += 1;
            }
            for k in i..=j {
                best = best.max((vs[k] - vs[i]).abs());
            }
            // partial segment reaching exactly lag r
            if j + 1 < ts.len() {
                let v = p.eval_clamped(c, ts[i] + r);
                best = best.max((v - vs[i]).abs());
            }
            if ts[i] - r > T::zero() {
                let v = p.eval_clamped(c, ts[i] - r);
                best = best.max((v - vs[i]).abs());
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zigzag() -> Path<f64> {
        Path::from_knots(&[(0.0, 0.0), (0.5, 1.0), (1.0, -0.5)]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let p = Path::linear(1.0, 1.0).unwrap();
        assert_eq!(p.eval(0, 0.5).unwrap(), 0.5);
        assert_eq!(zigzag().eval(0, 0.0).unwrap(), 0.0);
        assert!(matches!(p.eval(0, 1.5), Err(Error::OutOfRange { .. })));
        assert!(p.eval(0, -0.1).is_err());
    }

    #[test]
    fn running_extrema_examples() {
        assert_eq!(Path::linear(1.0, 1.0).unwrap().running_extrema(1.0).unwrap(), (1.0, 0.0));
        assert_eq!(Path::linear(-1.0, 2.0).unwrap().running_extrema(2.0).unwrap(), (0.0, -2.0));
        assert_eq!(zigzag().running_extrema(1.0).unwrap(), (1.0, -0.5));
        assert_eq!(zigzag().running_extrema(0.25).unwrap(), (0.5, 0.0));
    }

    #[test]
    fn total_variation_examples() {
        let p = Path::linear(3.0, 1.0).unwrap();
        assert_eq!(p.total_variation(0.0, 1.0).unwrap(), 3.0);
        let z = Path::from_knots(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).unwrap();
        assert_eq!(z.total_variation(0.0, 3.0).unwrap(), 3.0);
        assert_eq!(z.total_variation(0.5, 1.5).unwrap(), 1.0);
        assert!(z.total_variation(1.0, 1.0).is_err());
    }

    #[test]
    fn construction_rejects_bad_knots() {
        assert!(Path::from_knots(&[(0.0, 1.0), (1.0, 1.0)]).is_err());
        assert!(Path::from_knots(&[(0.0, 0.0), (0.0, 1.0)]).is_err());
        assert!(Path::from_knots(&[(0.1, 0.0), (1.0, 1.0)]).is_err());
        assert!(Path::<f64>::from_knots(&[(0.0, 0.0)]).is_err());
    }

    #[test]
    fn restrict_and_resample() {
        let z = zigzag();
        let r = z.restrict(0.75).unwrap();
        assert_eq!(r.horizon(), 0.75);
        assert_eq!(r.len(), 3);
        assert!((r.values(0)[2] - 0.25).abs() < 1e-15);
        let s = z.resample(&[0.0, 0.25, 1.0]).unwrap();
        assert_eq!(s.values(0), &[0.0, 0.5, -0.5]);
    }

    #[test]
    fn csv_round_trip() {
        let p = Path::new(vec![0.0, 0.1, 0.3], vec![vec![0.0, 1.0 / 3.0, -2.0], vec![0.0, 0.7, 1e-17]]).unwrap();
        let q = Path::<f64>::from_csv(&p.to_csv()).unwrap();
        assert_eq!(p, q);
        assert!(Path::<f64>::from_csv("t,v1\n0,0\n1").is_err());
    }

    #[test]
    fn sup_distance_sees_interior_knots() {
        let a: Path<f64> = Path::linear(0.0, 1.0).unwrap();
        let b = Path::from_knots(&[(0.0, 0.0), (0.3, 0.4), (1.0, 0.0)]).unwrap();
        assert!((a.sup_distance(&b) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn modulus_of_linear_path() {
        let p: Path<f64> = Path::from_knots(&[(0.0, 0.0), (0.25, 0.5), (1.0, 2.0)]).unwrap();
        assert!((modulus(&p, 0.1) - 0.2).abs() < 1e-12);
        assert!((oscillation(&p, 0.1) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn from_segments_accumulates() {
        let p = Path::from_segments(&[(0.5, 2.0), (0.5, -2.0)]).unwrap();
        assert_eq!(p.values(0), &[0.0, 1.0, 0.0]);
    }
}
