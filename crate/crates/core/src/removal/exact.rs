//! Exhaustive minimum-displacement removal for small permutations.

use serde::Serialize;

use super::resnap::displacement_cost;
use crate::error::{Error, Result};
use crate::perm::{avoids, Permutation};

pub const EXACT_MAX_ORDER: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactRemoval {
    pub output: Permutation,
    pub cost: u64,
}

struct Search<'a> {
    pattern: &'a Permutation,
    target: &'a [usize],
    prefix: Vec<usize>,
    used: Vec<bool>,
    best: Option<(u64, Vec<usize>)>,
}

impl Search<'_> {
    /// Σ over unfilled positions of the distance to the nearest unused value.
    fn lower_bound(&self) -> u64 {
        let n = self.target.len();
        (self.prefix.len()..n)
            .map(|i| {
                (1..=n)
                    .filter(|&v| !self.used[v])
                    .map(|v| v.abs_diff(self.target[i]) as u64)
                    .min()
                    .unwrap_or(0)
            })
            .sum()
    }

    fn prefix_avoids(&self) -> Result<bool> {
        if self.prefix.len() < self.pattern.order() {
            return Ok(true);
        }
        avoids(self.pattern, &Permutation::from_ranking(&self.prefix)?)
    }

    fn run(&mut self, partial: u64) -> Result<()> {
        let n = self.target.len();
        if let Some((best, _)) = &self.best {
            if partial + self.lower_bound() >= *best {
                return Ok(());
            }
        }
        if self.prefix.len() == n {
            self.best = Some((partial, self.prefix.clone()));
            return Ok(());
        }
        let i = self.prefix.len();
        for v in 1..=n {
            if self.used[v] {
                continue;
            }
            self.prefix.push(v);
            self.used[v] = true;
            if self.prefix_avoids()? {
                self.run(partial + v.abs_diff(self.target[i]) as u64)?;
            }
            self.used[v] = false;
            self.prefix.pop();
        }
        Ok(())
    }
}

/// The `pattern`-avoiding permutation closest to `pi` in displacement;
/// among optimal ones the lexicographically smallest.
pub fn exact_removal(pattern: &Permutation, pi: &Permutation) -> Result<ExactRemoval> {
    let n = pi.order();
    if n > EXACT_MAX_ORDER {
        return Err(Error::SizeLimit(format!(
            "exact removal supports order at most {EXACT_MAX_ORDER}, got {n}"
        )));
    }
    let mut s = Search {
        pattern,
        target: pi.values(),
        prefix: Vec::with_capacity(n),
        used: vec![false; n + 1],
        best: None,
    };
    s.run(0)?;
    let (cost, values) = s
        .best
        .ok_or_else(|| Error::InvalidParameter(format!("no permutation of order {n} avoids {pattern}")))?;
    let output = Permutation::new(values)?;
    debug_assert_eq!(displacement_cost(pi, &output)?, cost);
    Ok(ExactRemoval { output, cost })
}
