//! Finite permutations and pattern statistics.

mod count;
mod points;

pub use count::{
    avoids, binomial, count_occurrences, inversion_count, longest_decreasing_subsequence,
    longest_increasing_subsequence, PatternCount,
};
pub use points::{pattern_of_points, PointConfiguration};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A bijection on `{1..n}` stored as its value sequence, `values[i] = π(i+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    values: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Inverse,
    Reverse,
    Complement,
}

impl Permutation {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v == 0 || v > n {
                return Err(Error::ValueOutOfRange { value: v, order: n });
            }
            if seen[v] {
                return Err(Error::DuplicateValue(v));
            }
            seen[v] = true;
        }
        Ok(Permutation { values })
    }

    /// Builds a permutation from values already known to be a bijection.
    pub(crate) fn from_values_unchecked(values: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(values.clone()).is_ok());
        Permutation { values }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "order must be positive");
        Permutation {
            values: (1..=n).collect(),
        }
    }

    pub fn reverse_identity(n: usize) -> Self {
        assert!(n >= 1, "order must be positive");
        Permutation {
            values: (1..=n).rev().collect(),
        }
    }

    /// Ranks of an arbitrary sequence of distinct keys.
    pub fn from_ranking<T: Ord>(keys: &[T]) -> Result<Self> {
        if keys.is_empty() {
            return Err(Error::Empty);
        }
        let mut idx: Vec<usize> = (0..keys.len()).collect();
        idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        if idx.windows(2).any(|w| keys[w[0]] == keys[w[1]]) {
            return Err(Error::InvalidConfiguration("tied keys".into()));
        }
        let mut values = vec![0; keys.len()];
        for (rank, &i) in idx.iter().enumerate() {
            values[i] = rank + 1;
        }
        Ok(Permutation { values })
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// π(i) for 1-based `i`.
    pub fn at(&self, i: usize) -> usize {
        self.values[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.values.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    pub fn is_reverse_identity(&self) -> bool {
        let n = self.order();
        self.values.iter().enumerate().all(|(i, &v)| v == n - i)
    }

    pub fn inverse(&self) -> Self {
        let mut out = vec![0; self.order()];
        for (i, &v) in self.values.iter().enumerate() {
            out[v - 1] = i + 1;
        }
        Permutation { values: out }
    }

    pub fn reverse(&self) -> Self {
        Permutation {
            values: self.values.iter().rev().copied().collect(),
        }
    }

    pub fn complement(&self) -> Self {
        let n = self.order();
        Permutation {
            values: self.values.iter().map(|&v| n + 1 - v).collect(),
        }
    }

    pub fn apply_symmetry(&self, which: Symmetry) -> Self {
        match which {
            Symmetry::Inverse => self.inverse(),
            Symmetry::Reverse => self.reverse(),
            Symmetry::Complement => self.complement(),
        }
    }

    /// All permutations of order `n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur = Permutation::identity(n).values;
        loop {
            out.push(Permutation { values: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }

    /// The permutation order-isomorphic to the sub-sequence at `positions` (0-based).
    pub fn restrict(&self, positions: &[usize]) -> Result<Self> {
        let keys: Vec<usize> = positions.iter().map(|&p| self.values[p]).collect();
        Permutation::from_ranking(&keys)
    }
}

/// One line of 1-based integers separated by single spaces (no trailing newline).
pub fn format_permutation(p: &Permutation) -> String {
    let mut s = String::with_capacity(p.order() * 4);
    for (i, v) in p.values.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(&v.to_string());
    }
    s
}

/// Whitespace- or comma-separated 1-based integers.
pub fn parse_permutation(text: &str) -> Result<Permutation> {
    let mut values = Vec::new();
    for tok in text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
    {
        let v: usize = tok.parse().map_err(|_| Error::InvalidToken(tok.to_string()))?;
        values.push(v);
    }
    Permutation::new(values)
}

/// Pattern literal: concatenated digits (`132`, order at most 9) or the
/// comma/space separated form.
pub fn parse_pattern(text: &str) -> Result<Permutation> {
    let t = text.trim();
    if t.contains(|c: char| c == ',' || c.is_whitespace()) {
        return parse_permutation(t);
    }
    if t.is_empty() {
        return Err(Error::Empty);
    }
    let mut values = Vec::with_capacity(t.len());
    for c in t.chars() {
        let d = c.to_digit(10).ok_or_else(|| Error::InvalidToken(c.to_string()))?;
        values.push(d as usize);
    }
    if values.len() > 9 {
        return Err(Error::InvalidToken(format!(
            "{t}: concatenated digits only allowed up to order 9"
        )));
    }
    Permutation::new(values)
}

/// Concatenated digits when possible, comma form otherwise.
pub fn format_pattern(p: &Permutation) -> String {
    if p.order() <= 9 {
        p.values.iter().map(|v| v.to_string()).collect()
    } else {
        p.values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_permutation(self))
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_permutation(s)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<usize>::deserialize(d)?;
        Permutation::new(values).map_err(serde::de::Error::custom)
    }
}
