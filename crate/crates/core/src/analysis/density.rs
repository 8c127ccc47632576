//! Monte Carlo estimates of pattern densities in a permuton.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{seeded_rng, Permuton, Sampler};
use crate::perm::Permutation;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub pattern: Permutation,
    pub estimate: f64,
    pub hits: u64,
    pub sample_count: u64,
    /// 99% Hoeffding half-width
    pub ci_half_width: f64,
    pub seed: u64,
}

pub fn hoeffding_half_width(samples: u64) -> f64 {
    ((2.0f64 / 0.01).ln() / (2.0 * samples as f64)).sqrt()
}

/// Whether points sorted by `x` have their `y` values ordered like `pattern`.
fn induces(points: &[(f64, f64)], pattern: &Permutation) -> bool {
    let v = pattern.values();
    (0..points.len()).all(|i| (i + 1..points.len()).all(|j| (points[i].1 < points[j].1) == (v[i] < v[j])))
}

/// Fraction of `samples` independent `k`-point draws that induce `pattern`.
/// Draw `i` uses its own generator stream, so the result does not depend on
/// how the work is split across threads.
pub fn density_monte_carlo(
    pattern: &Permutation,
    model: &Permuton,
    samples: u64,
    seed: u64,
) -> Result<DensityEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let sampler = Sampler::new(model);
    let k = pattern.order();
    let hits = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<u64> {
            let mut rng = seeded_rng(seed, i);
            let pts = sampler.sample_points(k, &mut rng)?;
            Ok(u64::from(induces(&pts, pattern)))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(DensityEstimate {
        pattern: pattern.clone(),
        estimate: hits as f64 / samples as f64,
        hits,
        sample_count: samples,
        ci_half_width: hoeffding_half_width(samples),
        seed,
    })
}
