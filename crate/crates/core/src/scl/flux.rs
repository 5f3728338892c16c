use crate::error::{arg, Result};
use crate::scalar::Real;

/// Flux functions `A(u)` with the Engquist–Osher splitting `A = A(0) + A⁺ + A⁻`,
/// `A±(u) = ∫₀ᵘ (A')±`.
#[derive(Clone, Debug, PartialEq)]
pub enum Flux<T> {
    /// `c·u`.
    Linear { c: T },
    /// `u²/2`.
    Burgers,
    /// `u³/3`, nonconvex with an inflection at 0.
    Cubic,
    /// Piecewise linear through sorted nodes `(u_k, A_k)`, extended by the end slopes.
    Table { nodes: Vec<(T, T)> },
}

impl<T: Real> Flux<T> {
    pub fn table(nodes: Vec<(T, T)>) -> Result<Self> {
        if nodes.len() < 2 || nodes.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return arg("flux table needs at least two nodes with increasing abscissae");
        }
        Ok(Self::Table { nodes })
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Linear { c } => format!("{c}·u"),
            Self::Burgers => "u²/2".into(),
            Self::Cubic => "u³/3".into(),
            Self::Table { nodes } => format!("table({} nodes)", nodes.len()),
        }
    }

    pub fn eval(&self, u: T) -> T {
        match self {
            Self::Linear { c } => *c * u,
            Self::Burgers => u * u * T::half(),
            Self::Cubic => u * u * u / T::lit(3.0),
            Self::Table { nodes } => {
                let k = segment(nodes, u);
                let (a, b) = (nodes[k], nodes[k + 1]);
                a.1 + (b.1 - a.1) / (b.0 - a.0) * (u - a.0)
            }
        }
    }

    /// `a = A'`; right derivative at table nodes.
    pub fn speed(&self, u: T) -> T {
        match self {
            Self::Linear { c } => *c,
            Self::Burgers => u,
            Self::Cubic => u * u,
            Self::Table { nodes } => {
                let k = segment(nodes, u);
                (nodes[k + 1].1 - nodes[k].1) / (nodes[k + 1].0 - nodes[k].0)
            }
        }
    }

    /// `sup |A'|` over `[lo, hi]`.
    pub fn max_speed(&self, lo: T, hi: T) -> Result<T> {
        if !(lo <= hi) {
            return arg("empty value range");
        }
        Ok(match self {
            Self::Linear { c } => c.abs(),
            Self::Burgers => lo.abs().max(hi.abs()),
            Self::Cubic => (lo * lo).max(hi * hi),
            Self::Table { nodes } => {
                let (a, b) = (segment(nodes, lo), segment(nodes, hi));
                (a..=b).fold(T::zero(), |m, k| m.max(self.speed(nodes[k].0.max(lo)).abs()))
            }
        })
    }

    /// `sup |A''|` over `[lo, hi]`; for tables the largest slope jump over the adjacent spacing.
    pub fn max_curvature(&self, lo: T, hi: T) -> T {
        match self {
            Self::Linear { .. } => T::zero(),
            Self::Burgers => T::one(),
            Self::Cubic => T::two() * lo.abs().max(hi.abs()),
            Self::Table { nodes } => {
                let slope = |k: usize| (nodes[k + 1].1 - nodes[k].1) / (nodes[k + 1].0 - nodes[k].0);
                (1..nodes.len() - 1)
                    .filter(|&k| nodes[k].0 >= lo && nodes[k].0 <= hi)
                    .map(|k| (slope(k) - slope(k - 1)).abs() / (nodes[k + 1].0 - nodes[k - 1].0) * T::two())
                    .fold(T::zero(), T::max)
            }
        }
    }

    /// `A⁺(u) = ∫₀ᵘ max(A', 0)`.
    pub fn plus(&self, u: T) -> T {
        let z = T::zero();
        match self {
            Self::Linear { c } => c.max(z) * u,
            Self::Burgers => u.max(z) * u.max(z) * T::half(),
            Self::Cubic => self.eval(u),
            Self::Table { nodes } => split_table(nodes, u, true),
        }
    }

    /// `A⁻(u) = ∫₀ᵘ min(A', 0)`.
    pub fn minus(&self, u: T) -> T {
        let z = T::zero();
        match self {
            Self::Linear { c } => c.min(z) * u,
            Self::Burgers => u.min(z) * u.min(z) * T::half(),
            Self::Cubic => z,
            Self::Table { nodes } => split_table(nodes, u, false),
        }
    }
}

// Index k of the segment [u_k, u_{k+1}] containing u, clamped to the end segments.
fn segment<T: Real>(nodes: &[(T, T)], u: T) -> usize {
    let k = nodes.partition_point(|n| n.0 <= u);
    k.saturating_sub(1).min(nodes.len() - 2)
}

fn split_table<T: Real>(nodes: &[(T, T)], u: T, positive: bool) -> T {
    let pick = |s: T| if positive { s.max(T::zero()) } else { s.min(T::zero()) };
    // ∫₀ᵘ of a piecewise constant slope, walking the breakpoints between 0 and u
    let (lo, hi, sign) = if u >= T::zero() { (T::zero(), u, T::one()) } else { (u, T::zero(), -T::one()) };
    let mut cuts = vec![lo];
    cuts.extend(nodes[1..nodes.len() - 1].iter().map(|n| n.0).filter(|&x| x > lo && x < hi));
    cuts.push(hi);
    let mut acc = T::zero();
    for w in cuts.windows(2) {
        let k = segment(nodes, (w[0] + w[1]) * T::half());
        let s = (nodes[k + 1].1 - nodes[k].1) / (nodes[k + 1].0 - nodes[k].0);
        acc += pick(s) * (w[1] - w[0]);
    }
    sign * acc
}
