//! Spatially homogeneous Hamiltonians `H(p)` with the metadata the solvers rely on.

use crate::grid::{Boundary, GridFn1};
use crate::scalar::Real;

/// Curvature class of a Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convexity {
    Affine,
    Convex,
    Concave,
    Neither,
}

impl Convexity {
    pub fn is_convex(self) -> bool {
        matches!(self, Convexity::Affine | Convexity::Convex)
    }

    pub fn is_concave(self) -> bool {
        matches!(self, Convexity::Affine | Convexity::Concave)
    }
}

/// Closed-form catalog entries plus tabulated and summed forms.
#[derive(Clone, Debug, PartialEq)]
pub enum Hamiltonian<T> {
    /// `scale·|p|`
    Abs { scale: T },
    /// `scale·|p|^exponent`
    Power { exponent: T, scale: T },
    /// `a·p²/2`
    Quadratic { a: T },
    /// `slope·p`
    Linear { slope: T },
    /// `scale·p²/(2(1+p²))`: bounded, smooth, neither convex nor concave.
    Saturating { scale: T },
    /// Piecewise-linear interpolation of tabulated values, continued linearly.
    Table(GridFn1<T>),
    /// Pointwise sum.
    Sum(Vec<Hamiltonian<T>>),
}

// Relative tolerance for numerical convexity of tables.
const CONVEX_TOL: f64 = 1e-8;

impl<T: Real> Hamiltonian<T> {
    pub fn abs() -> Self {
        Self::Abs { scale: T::one() }
    }

    pub fn quadratic() -> Self {
        Self::Quadratic { a: T::one() }
    }

    pub fn power(exponent: T) -> Self {
        Self::Power { exponent, scale: T::one() }
    }

    pub fn zero() -> Self {
        Self::Quadratic { a: T::zero() }
    }

    /// Tabulated Hamiltonian from a function sampled on `[lo, hi]`.
    pub fn tabulate(lo: T, hi: T, n: usize, f: impl Fn(T) -> T) -> crate::Result<Self> {
        Ok(Self::Table(GridFn1::on_interval(lo, hi, n, Boundary::LinearExtension, f)?))
    }

    pub fn eval(&self, p: T) -> T {
        match self {
            Self::Abs { scale } => *scale * p.abs(),
            Self::Power { exponent, scale } => *scale * p.abs().powf(*exponent),
            Self::Quadratic { a } => *a * p * p * T::half(),
            Self::Linear { slope } => *slope * p,
            Self::Saturating { scale } => *scale * p * p / (T::two() * (T::one() + p * p)),
            Self::Table(g) => g.eval(p),
            Self::Sum(hs) => hs.iter().map(|h| h.eval(p)).sum(),
        }
    }

    /// Derivative, with the symmetric choice at kinks.
    pub fn deriv(&self, p: T) -> T {
        match self {
            Self::Abs { scale } => {
                if p > T::zero() {
                    *scale
                } else if p < T::zero() {
                    -*scale
                } else {
                    T::zero()
                }
            }
            Self::Power { exponent, scale } => {
                if p == T::zero() {
                    T::zero()
                } else {
                    *scale * *exponent * p.abs().powf(*exponent - T::one()) * p.signum()
                }
            }
            Self::Quadratic { a } => *a * p,
            Self::Linear { slope } => *slope,
            Self::Saturating { scale } => {
                let d = T::one() + p * p;
                *scale * p / (d * d)
            }
            Self::Table(g) => {
                let s = (p - g.origin) / g.step;
                let f = s.floor();
                let i = f.to_isize().unwrap_or(0);
                let right = (g.get(i + 1) - g.get(i)) / g.step;
                if s == f {
                    let left = (g.get(i) - g.get(i - 1)) / g.step;
                    (left + right) * T::half()
                } else {
                    right
                }
            }
            Self::Sum(hs) => hs.iter().map(|h| h.deriv(p)).sum(),
        }
    }

    /// `sup_{|p| ≤ r} |H'(p)|`; infinite when `H` is not Lipschitz there.
    pub fn lipschitz(&self, r: T) -> T {
        match self {
            Self::Abs { scale } => scale.abs(),
            Self::Power { exponent, scale } => {
                if *scale == T::zero() {
                    T::zero()
                } else if *exponent < T::one() {
                    T::infinity()
                } else {
                    scale.abs() * *exponent * r.powf(*exponent - T::one())
                }
            }
            Self::Quadratic { a } => a.abs() * r,
            Self::Linear { slope } => slope.abs(),
            Self::Saturating { scale } => {
                let knee = T::one() / T::lit(3.0).sqrt();
                let q = r.min(knee);
                let d = T::one() + q * q;
                scale.abs() * q / (d * d)
            }
            Self::Table(g) => {
                let mut m = T::zero();
                let n = g.len() as isize;
                for i in -1..n {
                    let (a, b) = (g.origin + g.step * T::lit(i as f64), g.origin + g.step * T::lit((i + 1) as f64));
                    let touches = (i == -1 && -r < b) || (i == n - 1 && r > a) || (b > -r && a < r);
                    if touches {
                        m = m.max(((g.get(i + 1) - g.get(i)) / g.step).abs());
                    }
                }
                m
            }
            Self::Sum(hs) => hs.iter().map(|h| h.lipschitz(r)).sum(),
        }
    }

    /// `sup_{|p| ≤ r} |H(p)|`, sampled finely for tables and sums.
    pub fn sup_abs(&self, r: T) -> T {
        match self {
            Self::Table(_) | Self::Sum(_) => {
                let n = 2001;
                (0..n)
                    .map(|k| -r + T::two() * r * T::from_usize_lossy(k) / T::from_usize_lossy(n - 1))
                    .fold(T::zero(), |m, p| m.max(self.eval(p).abs()))
            }
            _ => self.eval(r).abs().max(self.eval(-r).abs()),
        }
    }

    pub fn convexity(&self) -> Convexity {
        let sign = |s: T| {
            if s > T::zero() {
                Convexity::Convex
            } else if s < T::zero() {
                Convexity::Concave
            } else {
                Convexity::Affine
            }
        };
        match self {
            Self::Abs { scale } => sign(*scale),
            Self::Quadratic { a } => sign(*a),
            Self::Linear { .. } => Convexity::Affine,
            Self::Power { exponent, scale } => {
                if *scale == T::zero() {
                    Convexity::Affine
                } else if *exponent >= T::one() {
                    sign(*scale)
                } else {
                    Convexity::Neither
                }
            }
            Self::Saturating { scale } => {
                if *scale == T::zero() {
                    Convexity::Affine
                } else {
                    Convexity::Neither
                }
            }
            Self::Table(g) => {
                let scale = g.sup_norm().max(T::one()) * T::lit(CONVEX_TOL);
                let d = g.second_differences();
                let up = d.iter().all(|&v| v >= -scale);
                let down = d.iter().all(|&v| v <= scale);
                match (up, down) {
                    (true, true) => Convexity::Affine,
                    (true, false) => Convexity::Convex,
                    (false, true) => Convexity::Concave,
                    _ => Convexity::Neither,
                }
            }
            Self::Sum(hs) => hs.iter().fold(Convexity::Affine, |acc, h| match (acc, h.convexity()) {
                (Convexity::Affine, c) | (c, Convexity::Affine) => c,
                (a, b) if a == b => a,
                _ => Convexity::Neither,
            }),
        }
    }

    /// `−H`.
    pub fn negated(&self) -> Self {
        match self {
            Self::Abs { scale } => Self::Abs { scale: -*scale },
            Self::Power { exponent, scale } => Self::Power { exponent: *exponent, scale: -*scale },
            Self::Quadratic { a } => Self::Quadratic { a: -*a },
            Self::Linear { slope } => Self::Linear { slope: -*slope },
            Self::Saturating { scale } => Self::Saturating { scale: -*scale },
            Self::Table(g) => Self::Table(g.map(|v| -v)),
            Self::Sum(hs) => Self::Sum(hs.iter().map(|h| h.negated()).collect()),
        }
    }

    /// `c·H`.
    pub fn scaled(&self, c: T) -> Self {
        match self {
            Self::Abs { scale } => Self::Abs { scale: *scale * c },
            Self::Power { exponent, scale } => Self::Power { exponent: *exponent, scale: *scale * c },
            Self::Quadratic { a } => Self::Quadratic { a: *a * c },
            Self::Linear { slope } => Self::Linear { slope: *slope * c },
            Self::Saturating { scale } => Self::Saturating { scale: *scale * c },
            Self::Table(g) => Self::Table(g.map(|v| v * c)),
            Self::Sum(hs) => Self::Sum(hs.iter().map(|h| h.scaled(c)).collect()),
        }
    }

    /// Indicator-type conjugates: `H*` is `0` on `[lo, hi]` and `+∞` outside.
    pub fn indicator_conjugate(&self) -> Option<(T, T)> {
        match self {
            Self::Abs { scale } if *scale >= T::zero() => Some((-*scale, *scale)),
            Self::Linear { slope } => Some((*slope, *slope)),
            Self::Quadratic { a } if *a == T::zero() => Some((T::zero(), T::zero())),
            Self::Power { scale, .. } if *scale == T::zero() => Some((T::zero(), T::zero())),
            Self::Saturating { scale } if *scale == T::zero() => Some((T::zero(), T::zero())),
            _ => None,
        }
    }

    /// Closed-form `H*(q)` for convex catalog entries with finite conjugates.
    pub fn closed_conjugate(&self, q: T) -> Option<T> {
        match self {
            Self::Quadratic { a } if *a > T::zero() => Some(q * q / (T::two() * *a)),
            Self::Power { exponent, scale } if *exponent > T::one() && *scale > T::zero() => {
                let th = *exponent;
                let r = (q / *scale).abs();
                Some(*scale * (th - T::one()) * (r / th).powf(th / (th - T::one())))
            }
            _ => None,
        }
    }

    /// Uniform convexity modulus `θ` with `H'' ≥ θ`, when known.
    pub fn uniform_convexity(&self) -> Option<T> {
        match self {
            Self::Quadratic { a } if *a > T::zero() => Some(*a),
            Self::Power { exponent, scale } if *exponent == T::two() && *scale > T::zero() => Some(T::two() * *scale),
            Self::Sum(hs) => {
                let mut total = T::zero();
                for h in hs {
                    match h.uniform_convexity() {
                        Some(t) => total += t,
                        None if h.convexity().is_convex() => {}
                        None => return None,
                    }
                }
                (total > T::zero()).then_some(total)
            }
            _ => None,
        }
    }

    /// Minimum of `H`, when bounded below.
    pub fn min_value(&self) -> Option<T> {
        match self {
            Self::Abs { scale } | Self::Saturating { scale } if *scale >= T::zero() => Some(T::zero()),
            Self::Power { scale, .. } if *scale >= T::zero() => Some(T::zero()),
            Self::Quadratic { a } if *a >= T::zero() => Some(T::zero()),
            Self::Linear { slope } if *slope == T::zero() => Some(T::zero()),
            Self::Table(g) => {
                let s = g.slopes();
                let (first, last) = (s[0], s[s.len() - 1]);
                (first <= T::zero() && last >= T::zero()).then(|| g.min())
            }
            _ => None,
        }
    }

    /// Splitting `H = H₁ − H₂` with `H₁`, `H₂` convex, when `H` is a difference of convex functions.
    pub fn decompose(&self) -> Option<(Self, Self)> {
        match self.convexity() {
            Convexity::Affine | Convexity::Convex => return Some((self.clone(), Self::zero())),
            Convexity::Concave => return Some((Self::zero(), self.negated())),
            Convexity::Neither => {}
        }
        match self {
            // H'' ≥ −|s| everywhere
            Self::Saturating { scale } => {
                let q = Self::Quadratic { a: scale.abs() };
                Some((Self::Sum(vec![self.clone(), q.clone()]), q))
            }
            Self::Table(g) => {
                // put the negative part of the second differences into H₂
                let d = g.second_differences();
                let mut h2 = vec![T::zero(); g.len()];
                for i in 1..g.len() - 1 {
                    h2[i + 1] = T::two() * h2[i] - h2[i - 1] + (-d[i - 1]).max(T::zero());
                }
                let h1: Vec<T> = g.values.iter().zip(&h2).map(|(&a, &b)| a + b).collect();
                Some((Self::Table(g.with_values(h1)), Self::Table(g.with_values(h2))))
            }
            Self::Sum(hs) => {
                let mut a = Vec::new();
                let mut b = Vec::new();
                for h in hs {
                    let (x, y) = h.decompose()?;
                    a.push(x);
                    b.push(y);
                }
                Some((Self::Sum(a), Self::Sum(b)))
            }
            _ => None,
        }
    }

    pub fn is_difference_of_convex(&self) -> bool {
        self.decompose().is_some()
    }

    /// Samples `H` on `n` points of `[lo, hi]`.
    pub fn sample(&self, lo: T, hi: T, n: usize) -> crate::Result<GridFn1<T>> {
        GridFn1::on_interval(lo, hi, n, Boundary::LinearExtension, |p| self.eval(p))
    }

    /// Short human-readable formula.
    pub fn describe(&self) -> String {
        match self {
            Self::Abs { scale } => format!("{scale}·|p|"),
            Self::Power { exponent, scale } => format!("{scale}·|p|^{exponent}"),
            Self::Quadratic { a } => format!("{a}·p²/2"),
            Self::Linear { slope } => format!("{slope}·p"),
            Self::Saturating { scale } => format!("{scale}·p²/(2(1+p²))"),
            Self::Table(g) => format!("table[{} points on [{}, {}]]", g.len(), g.origin, g.x(g.len() - 1)),
            Self::Sum(hs) => hs.iter().map(|h| h.describe()).collect::<Vec<_>>().join(" + "),
        }
    }
}

/// Separable two-dimensional Hamiltonian `H(p, q) = Hx(p) + Hy(q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian2<T> {
    pub hx: Hamiltonian<T>,
    pub hy: Hamiltonian<T>,
}

impl<T: Real> Hamiltonian2<T> {
    /// `|p| − |q|`.
    pub fn gassiat() -> Self {
        Self { hx: Hamiltonian::abs(), hy: Hamiltonian::abs().negated() }
    }

    pub fn eval(&self, p: T, q: T) -> T {
        self.hx.eval(p) + self.hy.eval(q)
    }

    pub fn lipschitz(&self, r: T) -> (T, T) {
        (self.hx.lipschitz(r), self.hy.lipschitz(r))
    }

    pub fn convexity(&self) -> Convexity {
        Hamiltonian::Sum(vec![self.hx.clone(), self.hy.clone()]).convexity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_values_and_derivatives() {
        let h = Hamiltonian::<f64>::abs();
        assert_eq!(h.eval(-2.0), 2.0);
        assert_eq!(h.deriv(-2.0), -1.0);
        let q = Hamiltonian::<f64>::quadratic();
        assert_eq!(q.eval(3.0), 4.5);
        let s = Hamiltonian::Saturating { scale: 1.0 };
        let p = 0.7f64;
        let fd = (s.eval(p + 1e-6) - s.eval(p - 1e-6)) / 2e-6;
        assert!((fd - s.deriv(p)).abs() < 1e-8);
        let w = Hamiltonian::<f64>::power(0.25);
        assert!((w.eval(16.0) - 2.0).abs() < 1e-12);
        let pw = Hamiltonian::Power { exponent: 3.0f64, scale: 2.0 };
        let fd = (pw.eval(-1.2 + 1e-6) - pw.eval(-1.2 - 1e-6)) / 2e-6;
        assert!((fd - pw.deriv(-1.2)).abs() < 1e-6);
    }

    #[test]
    fn convexity_classes() {
        assert_eq!(Hamiltonian::<f64>::abs().convexity(), Convexity::Convex);
        assert_eq!(Hamiltonian::<f64>::abs().negated().convexity(), Convexity::Concave);
        assert_eq!(Hamiltonian::<f64>::power(0.25).convexity(), Convexity::Neither);
        assert_eq!(Hamiltonian::Linear { slope: 2.0 }.convexity(), Convexity::Affine);
        let t = Hamiltonian::tabulate(-2.0, 2.0, 41, |p: f64| p * p).unwrap();
        assert_eq!(t.convexity(), Convexity::Convex);
        assert_eq!(Hamiltonian2::<f64>::gassiat().convexity(), Convexity::Neither);
    }

    #[test]
    fn lipschitz_bounds_cover_slopes() {
        let s = Hamiltonian::Saturating { scale: 1.0f64 };
        let mut m = 0.0f64;
        for k in 0..=4000 {
            let p = -3.0 + 6.0 * k as f64 / 4000.0;
            m = m.max(s.deriv(p).abs());
        }
        assert!(s.lipschitz(3.0) >= m - 1e-12);
        assert!(s.lipschitz(3.0) <= m + 1e-6);
        assert!(Hamiltonian::<f64>::power(0.5).lipschitz(1.0).is_infinite());
        let t = Hamiltonian::tabulate(-1.0, 1.0, 21, |p: f64| p.abs()).unwrap();
        assert!((t.lipschitz(0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decompositions_are_convex_and_exact() {
        for h in [
            Hamiltonian::Saturating { scale: 1.0f64 },
            Hamiltonian::Saturating { scale: -2.0 },
            Hamiltonian::tabulate(-3.0, 3.0, 121, |p: f64| p.sin()).unwrap(),
            Hamiltonian::Sum(vec![Hamiltonian::abs(), Hamiltonian::abs().negated().scaled(0.5)]),
        ] {
            let (a, b) = h.decompose().expect("difference of convex");
            let ta = a.sample(-3.0, 3.0, 301).unwrap();
            let tb = b.sample(-3.0, 3.0, 301).unwrap();
            assert!(ta.is_convex(1e-8), "{}", h.describe());
            assert!(tb.is_convex(1e-8), "{}", h.describe());
            for k in 0..=300 {
                let p = -3.0 + 0.02 * k as f64;
                assert!((a.eval(p) - b.eval(p) - h.eval(p)).abs() < 1e-9);
            }
        }
        assert!(Hamiltonian::<f64>::power(0.25).decompose().is_none());
    }

    #[test]
    fn closed_conjugates_match_brute_force() {
        for h in [Hamiltonian::Quadratic { a: 2.0f64 }, Hamiltonian::Power { exponent: 3.0, scale: 0.5 }] {
            for q in [-1.5, -0.3, 0.0, 0.8] {
                let brute =
                    (0..=20000).map(|k| -10.0 + 0.001 * k as f64).map(|p| q * p - h.eval(p)).fold(f64::MIN, f64::max);
                assert!((brute - h.closed_conjugate(q).unwrap()).abs() < 1e-5, "{} at {q}", h.describe());
            }
        }
    }

    #[test]
    fn min_values() {
        assert_eq!(Hamiltonian::<f64>::abs().min_value(), Some(0.0));
        assert_eq!(Hamiltonian::Linear { slope: 1.0f64 }.min_value(), None);
        let t = Hamiltonian::tabulate(-1.0, 1.0, 21, |p: f64| p * p - 0.5).unwrap();
        assert!((t.min_value().unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn uniform_convexity_metadata() {
        assert_eq!(Hamiltonian::<f64>::quadratic().uniform_convexity(), Some(1.0));
        assert_eq!(Hamiltonian::<f64>::abs().uniform_convexity(), None);
    }
}
