//! Snapping a permutation onto the support of a permuton.

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::models::{seeded_rng, Fiber, Permuton};
use crate::perm::{avoids, Permutation};
use crate::rational::{self, q, qi, Rational};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum XMode {
    /// `x_i = (i - 1/2)/n`
    #[default]
    Midpoint,
    /// `x_i` uniform in `((i-1)/n, i/n)`
    Random { seed: u64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TieRule {
    #[default]
    Lower,
    Upper,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResnapOptions {
    pub x_mode: XMode,
    pub tie_rule: TieRule,
    /// checked against the output when its order permits
    pub pattern: Option<Permutation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RemovalReport {
    pub input: Permutation,
    pub output: Permutation,
    pub cost: u64,
    #[serde(serialize_with = "ratio_as_string")]
    pub normalized_cost: Ratio<u64>,
    /// `None` when no pattern was given or it is longer than the input
    pub avoidance_verified: Option<bool>,
    #[serde(with = "rational::serde_str_vec")]
    pub snap_distances: Vec<Rational>,
    /// fibers where two atoms were equally near
    pub tie_events: usize,
    /// indices whose snapped height coincides with another index's
    pub collisions: usize,
    #[serde(with = "rational::serde_str")]
    pub max_snap_distance: Rational,
}

fn ratio_as_string<S: Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

impl RemovalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialise")
    }
}

/// `Σ |π(i) − σ(i)|`.
pub fn displacement_cost(pi: &Permutation, sigma: &Permutation) -> Result<u64> {
    if pi.order() != sigma.order() {
        return Err(Error::OrderMismatch(pi.order(), sigma.order()));
    }
    Ok(pi
        .values()
        .iter()
        .zip(sigma.values())
        .map(|(&a, &b)| a.abs_diff(b) as u64)
        .sum())
}

/// The fiber at `x`, moved right by `shift` if `x` is a piece boundary.
fn fiber_off_boundary(model: &Permuton, x: &Rational, shift: &Rational) -> Result<(Rational, Fiber)> {
    match model.fiber_at(x) {
        Ok(f) => Ok((x.clone(), f)),
        Err(Error::Boundary(_)) => {
            let moved = x + shift;
            let f = model.fiber_at(&moved)?;
            Ok((moved, f))
        }
        Err(e) => Err(e),
    }
}

const RANDOM_X_BITS: u32 = 32;
const RANDOM_X_RETRIES: usize = 16;

fn abscissae(model: &Permuton, n: usize, mode: XMode) -> Result<Vec<(Rational, Fiber)>> {
    let shift = q(1, (4 * n * model.piece_count()) as i64);
    match mode {
        XMode::Midpoint => (1..=n)
            .map(|i| fiber_off_boundary(model, &q(2 * i as i64 - 1, 2 * n as i64), &shift))
            .collect(),
        XMode::Random { seed } => {
            let mut rng = seeded_rng(seed, 2);
            let scale = 1i64 << RANDOM_X_BITS;
            (1..=n)
                .map(|i| {
                    for _ in 0..RANDOM_X_RETRIES {
                        let u: i64 = rng.gen_range(1..scale);
                        let x = q(i as i64 - 1, n as i64) + q(u, scale * n as i64);
                        match model.fiber_at(&x) {
                            Ok(f) => return Ok((x, f)),
                            Err(Error::Boundary(_)) => continue,
                            Err(e) => return Err(e),
                        }
                    }
                    Err(Error::RetriesExhausted(RANDOM_X_RETRIES))
                })
                .collect()
        }
    }
}

/// Moves every point `((i-1/2)/n, (π(i)-1/2)/n)` to the nearest atom of the
/// fiber above it and reads off the permutation of the snapped points.
pub fn resnap(pi: &Permutation, model: &Permuton, options: &ResnapOptions) -> Result<RemovalReport> {
    let n = pi.order();
    let columns = abscissae(model, n, options.x_mode)?;
    let prefer_upper = options.tie_rule == TieRule::Upper;
    let mut keys = Vec::with_capacity(n);
    let mut snap_distances = Vec::with_capacity(n);
    let mut tie_events = 0;
    for (i, (x, fiber)) in columns.iter().enumerate() {
        let y = q(2 * pi.at(i + 1) as i64 - 1, 2 * n as i64);
        let (atom, tied) = fiber
            .nearest_atom(&y, prefer_upper)
            .ok_or_else(|| Error::InvalidModel(format!("empty fiber at x = {}", rational::format_rational(x))))?;
        if tied {
            tie_events += 1;
        }
        snap_distances.push((&atom.y - &y).abs());
        keys.push((atom.y.clone(), y, i));
    }
    let mut heights: Vec<&Rational> = keys.iter().map(|k| &k.0).collect();
    heights.sort();
    let collisions = heights
        .chunk_by(|a, b| a == b)
        .filter(|g| g.len() > 1)
        .map(<[_]>::len)
        .sum();
    let output = Permutation::from_ranking(&keys)?;
    let cost = displacement_cost(pi, &output)?;
    let avoidance_verified = match &options.pattern {
        Some(a) if a.order() <= n => Some(avoids(a, &output)?),
        _ => None,
    };
    let max_snap_distance = snap_distances.iter().max().cloned().unwrap_or_else(Rational::zero);
    Ok(RemovalReport {
        input: pi.clone(),
        output,
        cost,
        normalized_cost: Ratio::new(cost, (n * n) as u64),
        avoidance_verified,
        snap_distances,
        tie_events,
        collisions,
        max_snap_distance,
    })
}

/// Upper bound on the displacement caused by snapping: points that move by
/// more than half a cell may pass everything, the others only the points
/// within their snap distance.
pub fn rank_shift_bound(report: &RemovalReport) -> u64 {
    let n = report.input.order() as i64;
    let half_cell = q(1, 2 * n);
    let far = report.snap_distances.iter().filter(|d| **d > half_cell).count() as u64;
    let near: u64 = report
        .snap_distances
        .iter()
        .map(|d| (d * qi(n)).ceil().to_integer().try_into().unwrap_or(u64::MAX))
        .sum();
    2 * n as u64 * far + 2 * near
}
