//! Uniform grid functions in one and two space dimensions.

use crate::error::{arg, Error, Result};
use crate::scalar::Real;

/// How values are continued beyond the stored grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Values repeat with period `n·h`.
    Periodic,
    /// Continued with the one-sided boundary slope (keeps the Lipschitz constant).
    LinearExtension,
}

/// Extended access along one axis.
#[inline]
fn ext<T: Real>(i: isize, n: usize, b: Boundary, at: impl Fn(usize) -> T) -> T {
    let ni = n as isize;
    if i >= 0 && i < ni {
        return at(i as usize);
    }
    match b {
        Boundary::Periodic => at(i.rem_euclid(ni) as usize),
        Boundary::LinearExtension => {
            if i < 0 {
                let (a, c) = (at(0), at(1));
                a + T::lit(i as f64) * (c - a)
            } else {
                let (a, c) = (at(n - 2), at(n - 1));
                c + T::lit((i - ni + 1) as f64) * (c - a)
            }
        }
    }
}

/// Scalar function sampled at `origin + i·step`, `i = 0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn1<T> {
    pub origin: T,
    pub step: T,
    pub values: Vec<T>,
    pub boundary: Boundary,
}

impl<T: Real> GridFn1<T> {
    pub fn new(origin: T, step: T, values: Vec<T>, boundary: Boundary) -> Result<Self> {
        if !(step > T::zero()) {
            return arg("grid step must be positive");
        }
        if values.len() < 2 {
            return arg("a grid needs at least two values");
        }
        Ok(Self { origin, step, values, boundary })
    }

    pub fn from_fn(origin: T, step: T, n: usize, boundary: Boundary, f: impl Fn(T) -> T) -> Result<Self> {
        let values = (0..n).map(|i| f(origin + step * T::from_usize_lossy(i))).collect();
        Self::new(origin, step, values, boundary)
    }

    /// `n` points covering `[a, b]` inclusive (linear extension) or `[a, b)` (periodic).
    pub fn on_interval(a: T, b: T, n: usize, boundary: Boundary, f: impl Fn(T) -> T) -> Result<Self> {
        if n < 2 || !(b > a) {
            return arg("interval grid needs b > a and n ≥ 2");
        }
        let cells = match boundary {
            Boundary::Periodic => n,
            Boundary::LinearExtension => n - 1,
        };
        Self::from_fn(a, (b - a) / T::from_usize_lossy(cells), n, boundary, f)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        self.origin + self.step * T::from_usize_lossy(i)
    }

    pub fn xs(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    /// Value at any integer index, continued per the boundary rule.
    #[inline]
    pub fn get(&self, i: isize) -> T {
        ext(i, self.values.len(), self.boundary, |k| self.values[k])
    }

    /// Linear interpolation at an arbitrary abscissa (continued per the boundary rule).
    pub fn eval(&self, x: T) -> T {
        let s = (x - self.origin) / self.step;
        let f = s.floor();
        let i = f.to_isize().unwrap_or(0);
        let w = s - f;
        if w == T::zero() {
            return self.get(i);
        }
        self.get(i) * (T::one() - w) + self.get(i + 1) * w
    }

    /// Same geometry, new values.
    pub fn with_values(&self, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self { origin: self.origin, step: self.step, values, boundary: self.boundary }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.len() == other.len() && self.origin == other.origin && self.step == other.step
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if !self.same_grid(other) {
            return arg("grid functions live on different grids");
        }
        Ok(())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect()))
    }

    /// `max_i |self_i − other_i|`.
    pub fn sup_diff(&self, other: &Self) -> Result<T> {
        self.check_same(other)?;
        Ok(self.values.iter().zip(&other.values).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs())))
    }

    /// `max_i (self_i − other_i)`.
    pub fn max_diff(&self, other: &Self) -> Result<T> {
        self.check_same(other)?;
        Ok(self.values.iter().zip(&other.values).fold(T::neg_infinity(), |m, (&a, &b)| m.max(a - b)))
    }

    pub fn max(&self) -> T {
        crate::scalar::max_of(&self.values)
    }

    pub fn min(&self) -> T {
        crate::scalar::min_of(&self.values)
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Forward difference quotients; on periodic grids includes the wrap-around one.
    pub fn slopes(&self) -> Vec<T> {
        let n = self.len();
        let cnt = if self.boundary == Boundary::Periodic { n } else { n - 1 };
        (0..cnt).map(|i| (self.get(i as isize + 1) - self.values[i]) / self.step).collect()
    }

    /// Discrete Lipschitz constant `max |forward difference| / h`.
    pub fn lipschitz(&self) -> T {
        self.slopes().iter().fold(T::zero(), |m, s| m.max(s.abs()))
    }

    /// Interior second differences `f_{i+1} − 2 f_i + f_{i−1}`.
    pub fn second_differences(&self) -> Vec<T> {
        (1..self.len() - 1).map(|i| self.values[i + 1] - self.values[i] * T::two() + self.values[i - 1]).collect()
    }

    /// Numerical convexity: second differences ≥ `−tol·max(1, max|f|)` at finite points.
    pub fn is_convex(&self, tol: T) -> bool {
        let scale = self.sup_norm().max(T::one());
        self.second_differences().iter().all(|&d| d >= -tol * scale)
    }

    /// Riemann sum `Σ v_i h`.
    pub fn integral(&self) -> T {
        self.values.iter().copied().sum::<T>() * self.step
    }

    /// Periodic roll by `k` cells: `out_i = self_{i−k}`.
    pub fn shifted(&self, k: isize) -> Self {
        self.with_values((0..self.len() as isize).map(|i| self.get(i - k)).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,v\n");
        for i in 0..self.len() {
            s.push_str(&format!("{},{}\n", self.x(i), self.values[i]));
        }
        s
    }

    /// Parses `x,v` rows; the abscissae must be uniformly spaced.
    pub fn from_csv(text: &str, boundary: Boundary) -> Result<Self> {
        let rows = parse_rows::<T>(text, 2)?;
        if rows.len() < 2 {
            return Err(Error::Parse("grid CSV needs at least two rows".into()));
        }
        let h = rows[1][0] - rows[0][0];
        for (k, r) in rows.iter().enumerate() {
            let expect = rows[0][0] + h * T::from_usize_lossy(k);
            if (r[0] - expect).abs() > h.abs() * T::lit(1e-6) {
                return Err(Error::Parse(format!("row {} breaks uniform spacing", k + 2)));
            }
        }
        Self::new(rows[0][0], h, rows.iter().map(|r| r[1]).collect(), boundary)
    }
}

pub(crate) fn parse_rows<T: Real>(text: &str, cols: usize) -> Result<Vec<Vec<T>>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.chars().next().is_some_and(|c| c.is_alphabetic())) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols {
            return Err(Error::Parse(format!("line {} has {} fields, expected {cols}", i + 1, fields.len())));
        }
        let row = fields
            .iter()
            .map(|f| f.trim().parse::<f64>().map(T::lit).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1))))
            .collect::<Result<Vec<T>>>()?;
        out.push(row);
    }
    Ok(out)
}

/// Scalar function on a tensor grid, stored row-major (`values[i·ny + j]` at `(x_i, y_j)`).
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn2<T> {
    pub origin: (T, T),
    pub step: (T, T),
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<T>,
    pub boundary: Boundary,
}

impl<T: Real> GridFn2<T> {
    pub fn new(origin: (T, T), step: (T, T), nx: usize, ny: usize, values: Vec<T>, boundary: Boundary) -> Result<Self> {
        if !(step.0 > T::zero() && step.1 > T::zero()) {
            return arg("grid steps must be positive");
        }
        if nx < 2 || ny < 2 || values.len() != nx * ny {
            return arg("2D grid needs nx, ny ≥ 2 and nx·ny values");
        }
        Ok(Self { origin, step, nx, ny, values, boundary })
    }

    pub fn from_fn(
        origin: (T, T),
        step: (T, T),
        nx: usize,
        ny: usize,
        boundary: Boundary,
        f: impl Fn(T, T) -> T,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                values.push(f(origin.0 + step.0 * T::from_usize_lossy(i), origin.1 + step.1 * T::from_usize_lossy(j)));
            }
        }
        Self::new(origin, step, nx, ny, values, boundary)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[i * self.ny + j]
    }

    pub fn x(&self, i: usize) -> T {
        self.origin.0 + self.step.0 * T::from_usize_lossy(i)
    }

    pub fn y(&self, j: usize) -> T {
        self.origin.1 + self.step.1 * T::from_usize_lossy(j)
    }

    /// Value at any integer index pair, continued per the boundary rule axis by axis.
    pub fn get(&self, i: isize, j: isize) -> T {
        ext(i, self.nx, self.boundary, |a| ext(j, self.ny, self.boundary, |b| self.values[a * self.ny + b]))
    }

    pub fn with_values(&self, values: Vec<T>) -> Self {
        Self { values, ..self.clone() }
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.origin == other.origin && self.step == other.step
    }

    pub fn sup_diff(&self, other: &Self) -> Result<T> {
        if !self.same_grid(other) {
            return arg("grid functions live on different grids");
        }
        Ok(self.values.iter().zip(&other.values).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs())))
    }

    /// Bilinear interpolation.
    pub fn eval(&self, x: T, y: T) -> T {
        let sx = (x - self.origin.0) / self.step.0;
        let sy = (y - self.origin.1) / self.step.1;
        let (fx, fy) = (sx.floor(), sy.floor());
        let (i, j) = (fx.to_isize().unwrap_or(0), fy.to_isize().unwrap_or(0));
        let (wx, wy) = (sx - fx, sy - fy);
        let one = T::one();
        self.get(i, j) * (one - wx) * (one - wy)
            + self.get(i + 1, j) * wx * (one - wy)
            + self.get(i, j + 1) * (one - wx) * wy
            + self.get(i + 1, j + 1) * wx * wy
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,v\n");
        for i in 0..self.nx {
            for j in 0..self.ny {
                s.push_str(&format!("{},{},{}\n", self.x(i), self.y(j), self.at(i, j)));
            }
        }
        s
    }

    /// Parses `x,y,v` rows in row-major order (x outer, y inner).
    pub fn from_csv(text: &str, boundary: Boundary) -> Result<Self> {
        let rows = parse_rows::<T>(text, 3)?;
        if rows.len() < 4 {
            return Err(Error::Parse("2D grid CSV needs at least four rows".into()));
        }
        let x0 = rows[0][0];
        let ny = rows.iter().take_while(|r| r[0] == x0).count();
        if ny < 2 || rows.len() % ny != 0 {
            return Err(Error::Parse("2D grid CSV is not a full tensor grid".into()));
        }
        let nx = rows.len() / ny;
        let hy = rows[1][1] - rows[0][1];
        let hx = rows[ny][0] - x0;
        Self::new((x0, rows[0][1]), (hx, hy), nx, ny, rows.iter().map(|r| r[2]).collect(), boundary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_extension_keeps_slopes() {
        let g = GridFn1::new(0.0, 0.5, vec![1.0, 2.0, 2.5], Boundary::LinearExtension).unwrap();
        assert_eq!(g.get(-2), -1.0);
        assert_eq!(g.get(4), 3.5);
        assert_eq!(g.lipschitz(), 2.0);
        assert_eq!(g.eval(-0.25), 0.5);
    }

    #[test]
    fn periodic_wraps() {
        let g = GridFn1::on_interval(0.0, 1.0, 4, Boundary::Periodic, |x: f64| x).unwrap();
        assert_eq!(g.step, 0.25);
        assert_eq!(g.get(-1), 0.75);
        assert_eq!(g.get(5), 0.25);
        assert_eq!(g.slopes().len(), 4);
        assert_eq!(g.shifted(1).values, vec![0.75, 0.0, 0.25, 0.5]);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(GridFn1::new(0.0, 0.0, vec![1.0, 2.0], Boundary::Periodic).is_err());
        assert!(GridFn1::new(0.0, 1.0, vec![1.0], Boundary::Periodic).is_err());
    }

    #[test]
    fn convexity_check() {
        let g = GridFn1::on_interval(-1.0, 1.0, 21, Boundary::LinearExtension, |x: f64| x * x).unwrap();
        assert!(g.is_convex(1e-8));
        assert!(!g.map(|v| -v).is_convex(1e-8));
    }

    #[test]
    fn csv_round_trips() {
        let g = GridFn1::on_interval(-1.0, 1.0, 9, Boundary::LinearExtension, |x: f64| x.sin()).unwrap();
        let h = GridFn1::<f64>::from_csv(&g.to_csv(), Boundary::LinearExtension).unwrap();
        assert!(g.sup_diff(&h).unwrap() == 0.0);
        assert!((g.step - h.step).abs() < 1e-15);
        let g2 = GridFn2::from_fn((0.0, 1.0), (0.5, 0.25), 3, 4, Boundary::Periodic, |x: f64, y| x + 10.0 * y).unwrap();
        let h2 = GridFn2::<f64>::from_csv(&g2.to_csv(), Boundary::Periodic).unwrap();
        assert_eq!(g2, h2);
    }

    #[test]
    fn two_dimensional_extension_and_interpolation() {
        let g =
            GridFn2::from_fn((0.0, 0.0), (1.0, 1.0), 3, 3, Boundary::LinearExtension, |x: f64, y| 2.0 * x - y).unwrap();
        assert_eq!(g.get(-1, 4), -2.0 - 4.0);
        assert!((g.eval(0.5, 0.25) - 0.75).abs() < 1e-15);
        let p = g.with_values(g.values.clone());
        assert_eq!(p.sup_diff(&g).unwrap(), 0.0);
    }
}
