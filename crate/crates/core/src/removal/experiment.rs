//! Sample, perturb, snap back: one CSV row per `(n, rate, seed)`.

use rayon::prelude::*;
use serde::Serialize;

use super::perturb::{perturb, PerturbationSpec};
use super::resnap::{resnap, ResnapOptions};
use crate::analysis::{certify_avoidance, rect_distance_interval};
use crate::error::{Error, Result};
use crate::models::{sample_permutation, Permuton, StepPermuton};
use crate::perm::{count_occurrences, format_pattern, Permutation};
use crate::rational::{self, to_f64, Rational};

pub const CSV_HEADER: &str = "n,rho,seed,density,cost,normalized_cost,d_interval,avoidance_verified";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub n: usize,
    #[serde(with = "rational::serde_str")]
    pub rho: Rational,
    pub seed: u64,
    /// pattern density in the perturbed sample
    pub density: f64,
    pub cost: u64,
    pub normalized_cost: f64,
    /// interval distance between the perturbed sample and its snapped version
    pub d_interval: f64,
    pub avoidance_verified: Option<bool>,
}

impl ExperimentRow {
    pub fn to_csv(&self) -> String {
        let verified = match self.avoidance_verified {
            Some(b) => b.to_string(),
            None => "na".to_string(),
        };
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            to_f64(&self.rho),
            self.seed,
            self.density,
            self.cost,
            self.normalized_cost,
            self.d_interval,
            verified
        )
    }
}

pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

fn run_cell(pattern: &Permutation, model: &Permuton, n: usize, rho: &Rational, seed: u64) -> Result<ExperimentRow> {
    let sample = sample_permutation(model, n, seed)?;
    let noisy = perturb(&sample, &PerturbationSpec::new(rho.clone(), seed)?);
    let options = ResnapOptions {
        pattern: Some(pattern.clone()),
        ..Default::default()
    };
    let report = resnap(&noisy, model, &options)?;
    let density = if pattern.order() <= n {
        count_occurrences(pattern, &noisy)?.density_f64()
    } else {
        0.0
    };
    let d = rect_distance_interval(
        &Permuton::Step(StepPermuton::new(noisy)),
        &Permuton::Step(StepPermuton::new(report.output.clone())),
    )?;
    Ok(ExperimentRow {
        n,
        rho: rho.clone(),
        seed,
        density,
        cost: report.cost,
        normalized_cost: report.cost as f64 / (n * n) as f64,
        d_interval: to_f64(&d.value),
        avoidance_verified: report.avoidance_verified,
    })
}

/// Rows in the order `n`, then rate, then seed. Refuses to run unless the
/// model is certified to avoid `pattern`.
pub fn removal_experiment(
    pattern: &Permutation,
    model: &Permuton,
    n_list: &[usize],
    rho_list: &[Rational],
    seeds: &[u64],
) -> Result<Vec<ExperimentRow>> {
    let tracks = model
        .as_tracks()
        .ok_or_else(|| Error::Unsupported(format!("cannot certify a {} model", model.kind())))?;
    let cert = certify_avoidance(pattern, &tracks)?;
    if !cert.certified {
        return Err(Error::NotCertified(format_pattern(pattern)));
    }
    let mut cells = Vec::new();
    for &n in n_list {
        for rho in rho_list {
            for &seed in seeds {
                cells.push((n, rho, seed));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(n, rho, seed)| run_cell(pattern, model, n, rho, seed))
        .collect()
}
