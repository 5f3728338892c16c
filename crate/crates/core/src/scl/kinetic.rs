//! Kinetic function `χ(u, ξ)`, entropy-defect diagnostics and the transport identity along
//! the characteristics `x = y + a(ξ)B(t)`.

use super::{CellBoundary, ConservedField, Flux};
use crate::error::{arg, Result};
use crate::paths::Path;
use crate::scalar::Real;

/// `+1` on `0 ≤ ξ ≤ u`, `−1` on `u ≤ ξ ≤ 0`, `0` otherwise.
pub fn chi<T: Real>(u: T, xi: T) -> i8 {
    let z = T::zero();
    if z <= xi && xi <= u {
        1
    } else if u <= xi && xi <= z {
        -1
    } else {
        0
    }
}

/// Cell centres `lo + (k + ½)·step`, `k = 0..n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XiGrid<T> {
    pub lo: T,
    pub step: T,
    pub n: usize,
}

impl<T: Real> XiGrid<T> {
    /// `n` cells on `[−bound, bound]`; an even `n` keeps 0 on a cell face.
    pub fn symmetric(bound: T, n: usize) -> Result<Self> {
        if !(bound > T::zero()) || n == 0 {
            return arg("ξ grid needs a positive bound and at least one cell");
        }
        Ok(Self { lo: -bound, step: T::two() * bound / T::from_usize_lossy(n), n })
    }

    pub fn xi(&self, k: usize) -> T {
        self.lo + self.step * (T::from_usize_lossy(k) + T::half())
    }

    pub fn hi(&self) -> T {
        self.lo + self.step * T::from_usize_lossy(self.n)
    }

    pub fn values(&self) -> Vec<T> {
        (0..self.n).map(|k| self.xi(k)).collect()
    }
}

/// `χ(u(x_i), ξ_k)` stored row-major in `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct KineticDensity<T> {
    pub xi: XiGrid<T>,
    pub nx: usize,
    pub chi: Vec<i8>,
}

impl<T: Real> KineticDensity<T> {
    pub fn at(&self, i: usize, k: usize) -> i8 {
        self.chi[i * self.xi.n + k]
    }

    /// `∫ S'(ξ) χ(x_i, ξ) dξ` per cell by the midpoint rule.
    pub fn moment(&self, s_prime: impl Fn(T) -> T) -> Vec<T> {
        let w: Vec<T> = (0..self.xi.n).map(|k| s_prime(self.xi.xi(k)) * self.xi.step).collect();
        (0..self.nx).map(|i| (0..self.xi.n).map(|k| w[k] * T::lit(f64::from(self.at(i, k)))).sum()).collect()
    }

    /// `∫ χ dξ`, which recovers `u` to within one ξ cell.
    pub fn reconstruct(&self) -> Vec<T> {
        self.moment(|_| T::one())
    }
}

/// Samples `χ(u, ·)` on the ξ grid; the grid must cover `[−‖u‖∞, ‖u‖∞]`.
pub fn kinetic_density<T: Real>(u: &ConservedField<T>, xi: &XiGrid<T>) -> Result<KineticDensity<T>> {
    if xi.lo > u.min().min(T::zero()) || xi.hi() < u.max().max(T::zero()) {
        return arg(format!("ξ grid [{}, {}] does not cover the range of u", xi.lo, xi.hi()));
    }
    let chi = u.u.iter().flat_map(|&v| (0..xi.n).map(move |k| chi(v, xi.xi(k)))).collect();
    Ok(KineticDensity { xi: *xi, nx: u.len(), chi })
}

/// Entropy dissipation between two states: `total` from `S = u²/2`, the ξ-profile from the
/// Kruzhkov family `(u − ξ)₊` (ξ > 0) and `(ξ − u)₊` (ξ < 0), for which `S'' = δ_ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectEstimate<T> {
    pub total: T,
    pub xi: Vec<T>,
    pub profile: Vec<T>,
}

impl<T: Real> DefectEstimate<T> {
    pub fn min_profile(&self) -> T {
        self.profile.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_profile(&self) -> T {
        self.profile.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// `∫ profile dξ`, which matches `total` up to the ξ quadrature.
    pub fn profile_mass(&self, step: T) -> T {
        self.profile.iter().copied().sum::<T>() * step
    }
}

pub fn defect_estimate<T: Real>(
    u0: &ConservedField<T>,
    u: &ConservedField<T>,
    xi: &XiGrid<T>,
) -> Result<DefectEstimate<T>> {
    if u0.len() != u.len() || u0.h != u.h {
        return arg("fields live on different meshes");
    }
    let energy = |f: &ConservedField<T>| f.u.iter().map(|v| *v * *v).sum::<T>() * f.h * T::half();
    let kruzhkov = |f: &ConservedField<T>, k: T| {
        let s: T = if k >= T::zero() {
            f.u.iter().map(|&v| (v - k).pos()).sum()
        } else {
            f.u.iter().map(|&v| (k - v).pos()).sum()
        };
        s * f.h
    };
    let xs = xi.values();
    let profile = xs.iter().map(|&k| kruzhkov(u0, k) - kruzhkov(u, k)).collect();
    Ok(DefectEstimate { total: energy(u0) - energy(u), xi: xs, profile })
}

/// Compactly supported probability kernels `ρ₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kernel<T> {
    /// `(15/16r)(1 − (z/r)²)²` on `|z| < r`.
    Biweight { radius: T },
}

impl<T: Real> Kernel<T> {
    pub fn eval(&self, z: T) -> T {
        match *self {
            Kernel::Biweight { radius } => {
                let q = z / radius;
                let w = T::one() - q * q;
                if w > T::zero() {
                    T::lit(15.0 / 16.0) / radius * w * w
                } else {
                    T::zero()
                }
            }
        }
    }

    pub fn radius(&self) -> T {
        match *self {
            Kernel::Biweight { radius } => radius,
        }
    }
}

/// `I(y, ξ, t) = ∫ χ(x, ξ, t) ρ₀(y − x + a(ξ)B(t)) dx` tracked over a run, with `y` on the
/// cell centres and `χ` averaged over each ξ cell.
///
/// The kernel is renormalised to unit discrete mass on the shifted lattice, so summing over `y`
/// integrates it out exactly and `Σ_y ∫ S'(ξ) I dξ` is the entropy `∫ S(u)`, which must not
/// increase for convex `S`. Pointwise in `y` the change of `I` is carried by the defect measure
/// alone, so with a linear flux `I` stays put up to the scheme's diffusion.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportReport<T> {
    pub times: Vec<T>,
    /// `max_{y,ξ} |I(t) − I(0)|`.
    pub drift: Vec<T>,
    /// `S = ξ²/2`.
    pub quadratic_entropy: Vec<T>,
    /// `S = |ξ|`; its decrease rate is `2∫m(x, 0, t)dx`.
    pub absolute_entropy: Vec<T>,
    /// Largest step-to-step increase of either entropy sequence.
    pub max_increase: T,
    /// Total decrease of the quadratic entropy: a lower bound for the defect mass.
    pub defect_lower_bound: T,
}

// ∫ over [lo, hi] ∩ [0, u] of S', signed like χ.
fn covered<T: Real>(u: T, lo: T, hi: T, antiderivative: impl Fn(T) -> T) -> T {
    let z = T::zero();
    let (a, b, sign) = if u >= z { (lo.max(z), hi.min(u), T::one()) } else { (lo.max(u), hi.min(z), -T::one()) };
    if b > a {
        sign * (antiderivative(b) - antiderivative(a))
    } else {
        z
    }
}

pub fn kinetic_transport_check<T: Real>(
    flux: &Flux<T>,
    fields: &[ConservedField<T>],
    path: &Path<T>,
    kernel: &Kernel<T>,
    xi: &XiGrid<T>,
) -> Result<TransportReport<T>> {
    let first = fields.first().ok_or_else(|| crate::Error::Argument("no fields to check".into()))?;
    let (n, h) = (first.len(), first.h);
    let b0 = path.eval(0, T::zero())?;
    let reach = (kernel.radius() / h).ceil().to_isize().unwrap_or(0) + 1;
    let speeds: Vec<T> = xi.values().iter().map(|&k| flux.speed(k)).collect();
    let half = T::half();
    let mut report = TransportReport {
        times: vec![],
        drift: vec![],
        quadratic_entropy: vec![],
        absolute_entropy: vec![],
        max_increase: T::zero(),
        defect_lower_bound: T::zero(),
    };
    let mut base: Vec<T> = vec![];
    for f in fields {
        if f.len() != n || f.h != h {
            return arg("fields live on different meshes");
        }
        kinetic_density(f, xi)?;
        let shift = path.eval(0, f.t)? - b0;
        let mut table = vec![T::zero(); n * xi.n];
        let (mut q, mut a) = (T::zero(), T::zero());
        for k in 0..xi.n {
            let (lo, hi) = (xi.lo + xi.step * T::from_usize_lossy(k), xi.lo + xi.step * T::from_usize_lossy(k + 1));
            let chi_bar: Vec<T> = f.u.iter().map(|&v| covered(v, lo, hi, |s| s) / xi.step).collect();
            let quad: Vec<T> = f.u.iter().map(|&v| covered(v, lo, hi, |s| s * s * half)).collect();
            let abs: Vec<T> = f.u.iter().map(|&v| covered(v, lo, hi, |s| s.abs())).collect();
            // weights ρ₀(off − j h), x = y + j, normalised to unit mass
            let off = speeds[k] * shift;
            let centre = (off / h).round().to_isize().unwrap_or(0);
            let js: Vec<isize> = (centre - reach..=centre + reach).collect();
            let mut w: Vec<T> = js.iter().map(|&j| kernel.eval(off - T::lit(j as f64) * h)).collect();
            let mass = w.iter().copied().sum::<T>();
            if !(mass > T::zero()) {
                return arg("kernel radius is below the cell width");
            }
            w.iter_mut().for_each(|x| *x /= mass);
            for y in 0..n {
                let (mut ic, mut iq, mut ia) = (T::zero(), T::zero(), T::zero());
                for (&j, &wj) in js.iter().zip(&w) {
                    let i = y as isize + j;
                    let idx = match f.boundary {
                        CellBoundary::Periodic => i.rem_euclid(n as isize) as usize,
                        CellBoundary::Open => {
                            if i < 0 || i >= n as isize {
                                continue;
                            }
                            i as usize
                        }
                    };
                    ic += wj * chi_bar[idx];
                    iq += wj * quad[idx];
                    ia += wj * abs[idx];
                }
                table[y * xi.n + k] = ic;
                q += iq;
                a += ia;
            }
        }
        report.quadratic_entropy.push(q * h);
        report.absolute_entropy.push(a * h);
        if base.is_empty() {
            base = table.clone();
        }
        report.drift.push(base.iter().zip(&table).fold(T::zero(), |m, (p, c)| m.max((*p - *c).abs())));
        report.times.push(f.t);
    }
    for seq in [&report.quadratic_entropy, &report.absolute_entropy] {
        for w in seq.windows(2) {
            report.max_increase = report.max_increase.max(w[1] - w[0]);
        }
    }
    report.defect_lower_bound =
        (report.quadratic_entropy[0] - *report.quadratic_entropy.last().expect("nonempty")).pos();
    Ok(report)
}
