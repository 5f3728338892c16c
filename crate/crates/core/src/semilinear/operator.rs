//! Degenerate elliptic one-dimensional operators `F(X, p)` and the structure audit.

use crate::error::{arg, Result};
use crate::scalar::Real;

/// `a·X + b·p + c`; degenerate elliptic when `a ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearForm<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Real> LinearForm<T> {
    pub fn new(a: T, b: T, c: T) -> Self {
        Self { a, b, c }
    }

    pub fn eval(&self, x: T, p: T) -> T {
        self.a * x + self.b * p + self.c
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Operator<T> {
    Zero,
    /// `ν·X`.
    Laplacian {
        nu: T,
    },
    Max(LinearForm<T>, LinearForm<T>),
    Min(LinearForm<T>, LinearForm<T>),
}

impl<T: Real> Operator<T> {
    pub fn eval(&self, x: T, p: T) -> T {
        match self {
            Self::Zero => T::zero(),
            Self::Laplacian { nu } => *nu * x,
            Self::Max(f, g) => f.eval(x, p).max(g.eval(x, p)),
            Self::Min(f, g) => f.eval(x, p).min(g.eval(x, p)),
        }
    }

    /// The linear pieces; the operator is their max (`true`) or min (`false`).
    pub fn pieces(&self) -> (Vec<LinearForm<T>>, bool) {
        let z = T::zero();
        match *self {
            Self::Zero => (vec![LinearForm::new(z, z, z)], true),
            Self::Laplacian { nu } => (vec![LinearForm::new(nu, z, z)], true),
            Self::Max(f, g) => (vec![f, g], true),
            Self::Min(f, g) => (vec![f, g], false),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (pieces, _) = self.pieces();
        if pieces.iter().any(|f| !(f.a >= T::zero()) || !f.b.is_finite() || !f.c.is_finite()) {
            return arg(format!("{} is not degenerate elliptic", self.describe()));
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        let form = |f: &LinearForm<T>| format!("{}X + {}p + {}", f.a, f.b, f.c);
        match self {
            Self::Zero => "0".into(),
            Self::Laplacian { nu } => format!("{nu}X"),
            Self::Max(f, g) => format!("max({}, {})", form(f), form(g)),
            Self::Min(f, g) => format!("min({}, {})", form(f), form(g)),
        }
    }
}

/// Range of `D_X F·X + D_p F·p − F` over a sampled box `[−R, R]²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureAudit<T> {
    pub radius: T,
    pub samples: usize,
    pub upper: T,
    pub lower: T,
}

impl<T: Real> StructureAudit<T> {
    /// Smallest `C` for which one of the two one-sided bounds holds on the samples.
    pub fn one_sided_constant(&self) -> T {
        self.upper.pos().min((-self.lower).pos())
    }
}

/// Samples the structure quantity on an `n × n` lattice, with derivatives taken by central
/// differences of `F` as a black box. The lattice is offset irrationally so it avoids the
/// kinks of max/min forms with rational coefficients.
pub fn structure_audit<T: Real>(op: &Operator<T>, radius: T, n: usize) -> StructureAudit<T> {
    let n = n.max(2);
    let delta = T::lit(1e-6) * (T::one() + radius);
    let offsets = (T::lit(0.618_033_988_749_895), T::lit(0.414_213_562_373_095));
    let coord =
        |k: usize, off: T| -radius + T::two() * radius * (T::from_usize_lossy(k) + off) / T::from_usize_lossy(n);
    let mut upper = T::neg_infinity();
    let mut lower = T::infinity();
    for i in 0..n {
        for j in 0..n {
            let (x, p) = (coord(i, offsets.0), coord(j, offsets.1));
            let fx = (op.eval(x + delta, p) - op.eval(x - delta, p)) / (T::two() * delta);
            let fp = (op.eval(x, p + delta) - op.eval(x, p - delta)) / (T::two() * delta);
            let q = fx * x + fp * p - op.eval(x, p);
            upper = upper.max(q);
            lower = lower.min(q);
        }
    }
    StructureAudit { radius, samples: n * n, upper, lower }
}
