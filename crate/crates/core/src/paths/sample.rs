//! Deterministic path generators.
//!
//! Randomness comes from ChaCha8 seeded by the 64-bit ensemble seed, one stream per component.
//! Normal variates use the ziggurat sampler of `rand_distr` (table driven; only the rare
//! tail branch calls `ln`).

use super::Path;
use crate::error::{arg, Result};
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Deterministic Hölder-continuous constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoelderConstruction {
    /// `Σ_k 2^{−αk} φ(2^k t/T)` with the unit tent `φ(s) = dist(s, ℤ)`.
    Takagi,
    /// As `Takagi` with seeded random signs per dyadic level.
    RandomSignTakagi,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PathKind<T> {
    Brownian,
    /// `2·teeth` equal intervals with slopes `+slope, −slope, …`.
    Sawtooth {
        slope: T,
        teeth: usize,
    },
    Linear {
        slope: T,
    },
    Hoelder {
        alpha: T,
        construction: HoelderConstruction,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathEnsembleSpec<T> {
    pub seed: u64,
    pub horizon: T,
    pub resolution: usize,
    pub kind: PathKind<T>,
    pub components: usize,
}

impl<T: Real> PathEnsembleSpec<T> {
    pub fn new(seed: u64, horizon: T, resolution: usize, kind: PathKind<T>) -> Self {
        Self { seed, horizon, resolution, kind, components: 1 }
    }

    pub fn with_components(mut self, m: usize) -> Self {
        self.components = m;
        self
    }
}

fn stream(seed: u64, component: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(component as u64);
    rng
}

/// Standard normal draws for one component stream.
pub(crate) fn normals(seed: u64, component: usize, n: usize) -> Vec<f64> {
    let mut rng = stream(seed, component);
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Rademacher signs for one component stream.
pub(crate) fn signs(seed: u64, component: usize, n: usize) -> Vec<i8> {
    let mut rng = stream(seed, component);
    (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
}

fn uniform_times<T: Real>(horizon: T, n: usize) -> Vec<T> {
    let mut ts: Vec<T> = (0..=n).map(|k| horizon * T::from_usize_lossy(k) / T::from_usize_lossy(n)).collect();
    ts[n] = horizon;
    ts
}

fn tent<T: Real>(s: T) -> T {
    let f = s - s.floor();
    f.min(T::one() - f)
}

/// Samples a path from its spec; identical specs give bit-identical paths.
pub fn sample_path<T: Real>(spec: &PathEnsembleSpec<T>) -> Result<Path<T>> {
    if spec.resolution == 0 {
        return arg("resolution must be at least 1");
    }
    if !(spec.horizon > T::zero()) {
        return arg("horizon must be positive");
    }
    let m = spec.components.max(1);
    let n = spec.resolution;
    let big_t = spec.horizon;
    match spec.kind {
        PathKind::Brownian => {
            let times = uniform_times(big_t, n);
            let sd = (big_t / T::from_usize_lossy(n)).sqrt();
            let values = (0..m)
                .map(|c| {
                    let mut acc = T::zero();
                    let mut col = vec![T::zero()];
                    for z in normals(spec.seed, c, n) {
                        acc += sd * T::lit(z);
                        col.push(acc);
                    }
                    col
                })
                .collect();
            Path::new(times, values)
        }
        PathKind::Sawtooth { slope, teeth } => {
            if teeth == 0 {
                return arg("sawtooth needs at least one tooth");
            }
            let times = uniform_times(big_t, 2 * teeth);
            let rise = slope * big_t / T::from_usize_lossy(2 * teeth);
            let col: Vec<T> = (0..=2 * teeth).map(|k| if k % 2 == 1 { rise } else { T::zero() }).collect();
            Path::new(times, vec![col; m])
        }
        PathKind::Linear { slope } => Path::new(vec![T::zero(), big_t], vec![vec![T::zero(), slope * big_t]; m]),
        PathKind::Hoelder { alpha, construction } => {
            if !(alpha > T::zero() && alpha <= T::one()) {
                return arg("Hölder exponent must lie in (0, 1]");
            }
            let times = uniform_times(big_t, n);
            // levels resolved exactly by the knot spacing
            let levels = (usize::BITS - n.leading_zeros()) as usize;
            let scale = big_t.powf(alpha);
            let values = (0..m)
                .map(|c| {
                    let sg = match construction {
                        HoelderConstruction::Takagi => vec![1i8; levels],
                        HoelderConstruction::RandomSignTakagi => signs(spec.seed, c, levels),
                    };
                    times
                        .iter()
                        .map(|&t| {
                            let s = t / big_t;
                            let mut acc = T::zero();
                            for (k, &e) in sg.iter().enumerate() {
                                let two_k = T::lit((1u64 << k) as f64);
                                acc += T::lit(e as f64) * two_k.powf(-alpha) * tent(two_k * s);
                            }
                            acc * scale
                        })
                        .collect()
                })
                .collect();
            Path::new(times, values)
        }
    }
}
