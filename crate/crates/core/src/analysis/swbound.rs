//! Counting the permutations generated by a permuton with atomic fibers.
//!
//! With `x_i = (i - 1/2)/n` fixed, every fiber offers a handful of atoms;
//! each choice vector of atoms induces one permutation. Many distinct
//! results give exponential lower bounds on the growth of the class the
//! permuton avoids.

use std::collections::HashSet;
use std::hash::Hash;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{seeded_rng, Permuton};
use crate::perm::{avoids, Permutation};
use crate::rational::{q, Rational};

/// Writes the atom choices of one choice vector.
type Decoder = Box<dyn Fn(u128, &mut Vec<u32>) + Sync>;

/// Cap on choice vectors in exhaustive mode.
pub const SW_MAX_CHOICES: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SwMode {
    Exhaustive,
    Random { seed: u64, trials: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SwReport {
    pub n: usize,
    pub mode: SwMode,
    /// choice vectors examined: the product of fiber sizes, or the trial count
    pub per_choice_total: u128,
    /// choice vectors whose atoms had distinct heights
    pub valid_choices: u128,
    pub distinct_count: u64,
    pub nth_root: f64,
    /// whether every generated permutation avoids the given pattern
    pub all_avoiding: Option<bool>,
}

/// Atom heights of the fiber at `x`, moving off piece boundaries as sampling would.
pub fn fiber_heights(model: &Permuton, x: &Rational, n: usize) -> Result<Vec<Rational>> {
    match model.fiber_at(x) {
        Ok(f) => Ok(f.atoms().iter().map(|a| a.y.clone()).collect()),
        Err(Error::Boundary(_)) => {
            let shift = q(1, 4 * (n * model.piece_count()) as i64);
            let f = model.fiber_at(&(x + shift))?;
            Ok(f.atoms().iter().map(|a| a.y.clone()).collect())
        }
        Err(e) => Err(e),
    }
}

/// Integer ranks of the atom heights at the `n` sample abscissae.
fn ranked_fibers(model: &Permuton, n: usize) -> Result<Vec<Vec<u32>>> {
    let heights = (1..=n)
        .map(|i| fiber_heights(model, &q(2 * i as i64 - 1, 2 * n as i64), n))
        .collect::<Result<Vec<_>>>()?;
    let mut all: Vec<&Rational> = heights.iter().flatten().collect();
    all.sort();
    all.dedup();
    Ok(heights
        .iter()
        .map(|f| {
            f.iter()
                .map(|y| all.binary_search(&y).expect("height was collected") as u32)
                .collect()
        })
        .collect())
}

/// The induced permutation as 0-based values, or `None` if heights repeat.
fn induced(heights: &[u32]) -> Option<Vec<u16>> {
    let mut order: Vec<usize> = (0..heights.len()).collect();
    order.sort_unstable_by_key(|&i| heights[i]);
    if order.windows(2).any(|w| heights[w[0]] == heights[w[1]]) {
        return None;
    }
    let mut values = vec![0u16; heights.len()];
    for (rank, i) in order.into_iter().enumerate() {
        values[i] = rank as u16;
    }
    Some(values)
}

fn pack(values: &[u16]) -> u128 {
    values.iter().fold(0u128, |acc, &v| (acc << 5) | v as u128)
}

fn unpack(key: u128, n: usize) -> Vec<u16> {
    (0..n).rev().map(|i| ((key >> (5 * i)) & 31) as u16).collect()
}

fn collect_distinct<K, F>(
    choices: u128,
    count: usize,
    decode: F,
    key: impl Fn(&[u16]) -> K + Sync,
) -> (u128, HashSet<K>)
where
    K: Hash + Eq + Send,
    F: Fn(u128, &mut Vec<u32>) + Sync,
{
    const CHUNK: u128 = 1 << 12;
    let chunks = choices.div_ceil(CHUNK);
    (0..chunks as u64)
        .into_par_iter()
        .map(|c| {
            let mut set = HashSet::new();
            let mut valid = 0u128;
            let mut buf = Vec::with_capacity(count);
            let lo = c as u128 * CHUNK;
            for idx in lo..(lo + CHUNK).min(choices) {
                decode(idx, &mut buf);
                if let Some(v) = induced(&buf) {
                    valid += 1;
                    set.insert(key(&v));
                }
            }
            (valid, set)
        })
        .reduce(
            || (0, HashSet::new()),
            |(va, mut a), (vb, b)| {
                if a.len() < b.len() {
                    return (va + vb, b.into_iter().chain(a).collect());
                }
                a.extend(b);
                (va + vb, a)
            },
        )
}

pub fn sw_generate(model: &Permuton, n: usize, mode: SwMode, pattern: Option<&Permutation>) -> Result<SwReport> {
    if n == 0 {
        return Err(Error::Empty);
    }
    let fibers = ranked_fibers(model, n)?;
    let (total, decode): (u128, Decoder) = match mode {
        SwMode::Exhaustive => {
            let mut total = 1u128;
            for f in &fibers {
                total = total.saturating_mul(f.len() as u128);
                if total > SW_MAX_CHOICES {
                    return Err(Error::SizeLimit(format!(
                        "more than {SW_MAX_CHOICES} choice vectors; use random mode"
                    )));
                }
            }
            let fibers = fibers.clone();
            // mixed radix, first fiber most significant
            let decode = move |mut idx: u128, buf: &mut Vec<u32>| {
                buf.clear();
                buf.resize(fibers.len(), 0);
                for (slot, f) in buf.iter_mut().zip(&fibers).rev() {
                    let m = f.len() as u128;
                    *slot = f[(idx % m) as usize];
                    idx /= m;
                }
            };
            (total, Box::new(decode))
        }
        SwMode::Random { seed, trials } => {
            let fibers = fibers.clone();
            let decode = move |idx: u128, buf: &mut Vec<u32>| {
                let mut rng = seeded_rng(seed, idx as u64);
                buf.clear();
                buf.extend(fibers.iter().map(|f| f[rng.gen_range(0..f.len())]));
            };
            (trials as u128, Box::new(decode))
        }
    };
    let (valid, perms): (u128, Vec<Permutation>) = if n <= 25 {
        let (valid, set) = collect_distinct(total, n, &decode, pack);
        let perms = set.into_iter().map(|k| to_perm(&unpack(k, n))).collect();
        (valid, perms)
    } else {
        let (valid, set) = collect_distinct(total, n, &decode, |v| v.to_vec());
        (valid, set.iter().map(|v| to_perm(v)).collect())
    };
    let all_avoiding = match pattern {
        Some(a) if a.order() > n => Some(true),
        Some(a) => Some(
            perms
                .par_iter()
                .map(|p| avoids(a, p))
                .collect::<Result<Vec<bool>>>()?
                .into_iter()
                .all(|b| b),
        ),
        None => None,
    };
    let distinct = perms.len() as u64;
    Ok(SwReport {
        n,
        mode,
        per_choice_total: total,
        valid_choices: valid,
        distinct_count: distinct,
        nth_root: (distinct as f64).powf(1.0 / n as f64),
        all_avoiding,
    })
}

fn to_perm(values: &[u16]) -> Permutation {
    Permutation::new(values.iter().map(|&v| v as usize + 1).collect()).expect("ranks form a permutation")
}
