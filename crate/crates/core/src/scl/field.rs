use crate::error::{arg, Result};
use crate::scalar::{max_of, min_of, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellBoundary {
    Periodic,
    /// Zero-gradient ghost cells; meant for data supported well inside the box.
    Open,
}

/// Cell averages on a uniform mesh; cell `i` is centred at `x0 + i·h`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservedField<T> {
    pub x0: T,
    pub h: T,
    pub u: Vec<T>,
    pub t: T,
    pub boundary: CellBoundary,
}

impl<T: Real> ConservedField<T> {
    pub fn new(x0: T, h: T, u: Vec<T>, boundary: CellBoundary) -> Result<Self> {
        if !(h > T::zero()) || u.len() < 2 {
            return arg("a field needs a positive cell width and at least two cells");
        }
        if u.iter().any(|v| !v.is_finite()) {
            return arg("cell averages must be finite");
        }
        Ok(Self { x0, h, u, t: T::zero(), boundary })
    }

    /// `n` cells on `[a, b)`, sampled at the centres.
    pub fn from_fn(a: T, b: T, n: usize, boundary: CellBoundary, f: impl Fn(T) -> T) -> Result<Self> {
        if n < 2 || !(b > a) {
            return arg("need n ≥ 2 cells on a nonempty interval");
        }
        let h = (b - a) / T::from_usize_lossy(n);
        let x0 = a + h * T::half();
        Self::new(x0, h, (0..n).map(|i| f(x0 + h * T::from_usize_lossy(i))).collect(), boundary)
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn x(&self, i: usize) -> T {
        self.x0 + self.h * T::from_usize_lossy(i)
    }

    /// Length of the periodic box.
    pub fn period(&self) -> T {
        self.h * T::from_usize_lossy(self.len())
    }

    pub(crate) fn ghost(&self, i: isize) -> T {
        let n = self.len() as isize;
        match self.boundary {
            CellBoundary::Periodic => self.u[i.rem_euclid(n) as usize],
            CellBoundary::Open => self.u[i.clamp(0, n - 1) as usize],
        }
    }

    pub fn with_values(&self, u: Vec<T>) -> Self {
        Self { u, ..self.clone() }
    }

    pub fn max(&self) -> T {
        max_of(&self.u)
    }

    pub fn min(&self) -> T {
        min_of(&self.u)
    }

    /// `Σ u_i h`.
    pub fn mass(&self) -> T {
        self.u.iter().copied().sum::<T>() * self.h
    }

    /// `Lᵖ` norm for finite `p`; `p = ∞` gives the sup norm.
    pub fn lp_norm(&self, p: T) -> T {
        if p.is_infinite() {
            return self.u.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        }
        (self.u.iter().map(|v| v.abs().powf(p)).sum::<T>() * self.h).powf(T::one() / p)
    }

    /// Total variation, including the wrap-around jump on periodic meshes.
    pub fn total_variation(&self) -> T {
        let n = self.len();
        let mut tv: T = self.u.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        if self.boundary == CellBoundary::Periodic {
            tv += (self.u[0] - self.u[n - 1]).abs();
        }
        tv
    }

    pub fn l1_distance(&self, other: &Self) -> Result<T> {
        if self.len() != other.len() || self.h != other.h {
            return arg("fields live on different meshes");
        }
        Ok(self.u.iter().zip(&other.u).map(|(a, b)| (*a - *b).abs()).sum::<T>() * self.h)
    }

    /// Periodic roll by `k` cells.
    pub fn shifted(&self, k: isize) -> Self {
        self.with_values((0..self.len() as isize).map(|i| self.ghost(i - k)).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,u\n");
        for i in 0..self.len() {
            s.push_str(&format!("{},{}\n", self.x(i), self.u[i]));
        }
        s
    }
}
