//! Smooth and coarse approximations of a path.

use super::Path;
use crate::error::{arg, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Approximation<T> {
    /// Convolution with the biweight kernel of half-width `ε`.
    Mollify(T),
    /// Linear interpolation at the multiples of `Δ`.
    Interpolate(T),
}

// Quadrature nodes per kernel half-width.
const NODES: usize = 16;

fn biweight(z: f64) -> f64 {
    let w = 1.0 - z * z;
    if w > 0.0 {
        w * w
    } else {
        0.0
    }
}

/// Smooth or coarse approximation of every component.
///
/// Mollification extends the path by constants outside `[0, T]`, convolves with an even
/// kernel (so the first moment vanishes), samples at spacing `ε/8` and re-anchors at 0.
pub fn approximate<T: Real>(p: &Path<T>, method: Approximation<T>) -> Result<Path<T>> {
    let big_t = p.horizon();
    match method {
        Approximation::Interpolate(delta) => {
            if !(delta > T::zero()) {
                return arg("interpolation step must be positive");
            }
            if delta > big_t * (T::one() + T::epsilon() * T::lit(16.0)) {
                return arg("interpolation step exceeds the horizon");
            }
            let mut times = vec![T::zero()];
            let mut k = 1usize;
            loop {
                let t = delta * T::from_usize_lossy(k);
                if t >= big_t - delta * T::lit(1e-9) {
                    break;
                }
                times.push(t);
                k += 1;
            }
            times.push(big_t);
            p.resample(&times)
        }
        Approximation::Mollify(eps) => {
            if !(eps > T::zero()) {
                return arg("mollification width must be positive");
            }
            let steps = ((big_t / eps).as_f64() * 8.0).ceil().max(1.0) as usize;
            let times: Vec<T> = (0..=steps)
                .map(|k| if k == steps { big_t } else { big_t * T::from_usize_lossy(k) / T::from_usize_lossy(steps) })
                .collect();
            let nodes: Vec<(T, T)> = {
                let raw: Vec<(f64, f64)> = (0..=2 * NODES)
                    .map(|j| {
                        let z = (j as f64 - NODES as f64) / NODES as f64;
                        (z, biweight(z))
                    })
                    .collect();
                let total: f64 = raw.iter().map(|r| r.1).sum();
                raw.into_iter().map(|(z, w)| (T::lit(z), T::lit(w / total))).collect()
            };
            let values = (0..p.components())
                .map(|c| {
                    let raw: Vec<T> = times
                        .iter()
                        .map(|&t| nodes.iter().map(|&(z, w)| w * p.eval_clamped(c, t - eps * z)).sum())
                        .collect();
                    let anchor = raw[0];
                    raw.into_iter().map(|v| v - anchor).collect()
                })
                .collect();
            Path::new(times, values)
        }
    }
}
