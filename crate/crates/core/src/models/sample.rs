//! Floating-point samplers for the model families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::digit_swap::swap_prefix;
use super::track::TrackPermuton;
use super::Permuton;
use crate::error::{Error, Result};
use crate::perm::{pattern_of_points, Permutation, PointConfiguration};
use crate::rational::to_f64;

const MAX_RETRIES: usize = 64;
const DIGIT_SWAP_DEPTH: u32 = 26;

#[derive(Clone, Debug)]
struct FloatTrack {
    slope: f64,
    intercept: f64,
    cumulative: f64,
}

#[derive(Clone, Debug)]
enum Kind {
    Tracks {
        // right ends of the pieces, last one is 1
        ends: Vec<f64>,
        pieces: Vec<Vec<FloatTrack>>,
    },
    DigitSwap,
    Uniform,
}

/// Draws i.i.d. points from a model: `x` uniform, then `y` from the fiber.
#[derive(Clone, Debug)]
pub struct Sampler {
    kind: Kind,
}

impl Sampler {
    pub fn new(model: &Permuton) -> Self {
        let kind = match model {
            Permuton::Tracks(t) => tracks_kind(t),
            Permuton::Step(s) => tracks_kind(&s.to_tracks()),
            Permuton::DigitSwap => Kind::DigitSwap,
            Permuton::Uniform => Kind::Uniform,
        };
        Sampler { kind }
    }

    /// One point; piece boundaries are redrawn.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match &self.kind {
            Kind::Uniform => (rng.gen::<f64>(), rng.gen::<f64>()),
            Kind::DigitSwap => {
                let bits = rng.gen::<u64>() >> (64 - 2 * DIGIT_SWAP_DEPTH);
                let scale = (1u64 << (2 * DIGIT_SWAP_DEPTH)) as f64;
                let x = bits as f64 / scale;
                let y = swap_prefix(bits, DIGIT_SWAP_DEPTH) as f64 / scale;
                (x, y)
            }
            Kind::Tracks { ends, pieces } => loop {
                let x = rng.gen::<f64>();
                let idx = ends.partition_point(|&e| e < x);
                if idx + 1 < ends.len() && ends[idx] == x {
                    continue;
                }
                let tracks = &pieces[idx];
                let u = rng.gen::<f64>();
                let t = tracks
                    .iter()
                    .find(|t| u < t.cumulative)
                    .unwrap_or_else(|| tracks.last().unwrap());
                let y = (t.slope * x + t.intercept).clamp(0.0, 1.0);
                break (x, y);
            },
        }
    }

    /// `n` points sorted by `x`, with distinct `x` and distinct `y`.
    pub fn sample_points<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<(f64, f64)>> {
        for _ in 0..MAX_RETRIES {
            let mut pts: Vec<(f64, f64)> = (0..n).map(|_| self.sample_point(rng)).collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            if pts.windows(2).any(|w| w[0].0 == w[1].0) {
                continue;
            }
            let mut ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
            ys.sort_by(f64::total_cmp);
            if ys.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            return Ok(pts);
        }
        Err(Error::RetriesExhausted(MAX_RETRIES))
    }

    /// The permutation induced by `n` sampled points.
    pub fn sample_permutation<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Permutation> {
        if n == 0 {
            return Err(Error::Empty);
        }
        let pts = self.sample_points(n, rng)?;
        Ok(pattern_of_points(&PointConfiguration::new(pts)?))
    }
}

fn tracks_kind(model: &TrackPermuton) -> Kind {
    let ends = model.pieces().iter().map(|p| to_f64(&p.x_hi)).collect();
    let pieces = model
        .pieces()
        .iter()
        .map(|p| {
            let mut acc = 0.0;
            p.tracks
                .iter()
                .map(|t| {
                    acc += to_f64(&t.weight);
                    FloatTrack {
                        slope: to_f64(&t.slope),
                        intercept: to_f64(&t.intercept),
                        cumulative: acc,
                    }
                })
                .collect()
        })
        .collect();
    Kind::Tracks { ends, pieces }
}

/// Deterministic generator for a seed and an independent stream index.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` i.i.d. points from `model`, read left to right.
pub fn sample_permutation(model: &Permuton, n: usize, seed: u64) -> Result<Permutation> {
    Sampler::new(model).sample_permutation(n, &mut seeded_rng(seed, 0))
}
