use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use super::Permutation;
use crate::error::{Error, Result};

/// Exact occurrence count of a pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PatternCount {
    pub occurrences: u128,
    pub total_subsets: u128,
}

impl PatternCount {
    pub fn density(&self) -> Ratio<u128> {
        Ratio::new(self.occurrences, self.total_subsets)
    }

    pub fn density_f64(&self) -> f64 {
        self.occurrences as f64 / self.total_subsets as f64
    }

    /// `p/q` in lowest terms.
    pub fn density_string(&self) -> String {
        let d = self.density();
        format!("{}/{}", d.numer(), d.denom())
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// For each pattern position `t`, the earlier positions holding the nearest
/// smaller and nearest larger pattern values. A new value is consistent with
/// the chosen prefix iff it sits strictly between those two.
struct PrefixBounds {
    lower: Vec<Option<usize>>,
    upper: Vec<Option<usize>>,
}

impl PrefixBounds {
    fn new(pattern: &[usize]) -> Self {
        let k = pattern.len();
        let mut lower = vec![None; k];
        let mut upper = vec![None; k];
        for t in 0..k {
            let a = pattern[t];
            for s in 0..t {
                let b = pattern[s];
                if b < a && lower[t].is_none_or(|l: usize| pattern[l] < b) {
                    lower[t] = Some(s);
                }
                if b > a && upper[t].is_none_or(|u: usize| pattern[u] > b) {
                    upper[t] = Some(s);
                }
            }
        }
        PrefixBounds { lower, upper }
    }

    #[inline]
    fn fits(&self, t: usize, v: usize, chosen: &[usize]) -> bool {
        if let Some(l) = self.lower[t] {
            if v < chosen[l] {
                return false;
            }
        }
        if let Some(u) = self.upper[t] {
            if v > chosen[u] {
                return false;
            }
        }
        true
    }
}

struct Search<'a> {
    text: &'a [usize],
    bounds: PrefixBounds,
    k: usize,
}

impl Search<'_> {
    fn count(&self, t: usize, start: usize, chosen: &mut Vec<usize>) -> u128 {
        let n = self.text.len();
        let last = n - (self.k - t);
        if t + 1 == self.k {
            return (start..=last)
                .filter(|&j| self.bounds.fits(t, self.text[j], chosen))
                .count() as u128;
        }
        let mut total = 0;
        for j in start..=last {
            let v = self.text[j];
            if self.bounds.fits(t, v, chosen) {
                chosen.push(v);
                total += self.count(t + 1, j + 1, chosen);
                chosen.pop();
            }
        }
        total
    }

    fn exists(&self, t: usize, start: usize, chosen: &mut Vec<usize>) -> bool {
        if t == self.k {
            return true;
        }
        let last = self.text.len() - (self.k - t);
        for j in start..=last {
            let v = self.text[j];
            if self.bounds.fits(t, v, chosen) {
                chosen.push(v);
                let hit = self.exists(t + 1, j + 1, chosen);
                chosen.pop();
                if hit {
                    return true;
                }
            }
        }
        false
    }
}

const PARALLEL_THRESHOLD: u128 = 1 << 20;

/// Number of `k`-subsets of positions of `text` inducing `pattern`.
pub fn count_occurrences(pattern: &Permutation, text: &Permutation) -> Result<PatternCount> {
    let k = pattern.order();
    let n = text.order();
    if k > n {
        return Err(Error::PatternTooLong { pattern: k, perm: n });
    }
    let total_subsets = binomial(n, k);
    let occurrences = match pattern.values() {
        [1] => n as u128,
        [2, 1] => inversion_count(text.values()) as u128,
        [1, 2] => total_subsets - inversion_count(text.values()) as u128,
        _ => {
            let search = Search {
                text: text.values(),
                bounds: PrefixBounds::new(pattern.values()),
                k,
            };
            if total_subsets >= PARALLEL_THRESHOLD {
                (0..=n - k)
                    .into_par_iter()
                    .map(|j| {
                        let mut chosen = Vec::with_capacity(k);
                        chosen.push(search.text[j]);
                        search.count(1, j + 1, &mut chosen)
                    })
                    .sum()
            } else {
                search.count(0, 0, &mut Vec::with_capacity(k))
            }
        }
    };
    Ok(PatternCount {
        occurrences,
        total_subsets,
    })
}

/// Whether `text` has no occurrence of `pattern`.
///
/// Monotone patterns are decided by subsequence length (patience sorting);
/// everything else by an early-exit search.
pub fn avoids(pattern: &Permutation, text: &Permutation) -> Result<bool> {
    let k = pattern.order();
    let n = text.order();
    if k > n {
        return Err(Error::PatternTooLong { pattern: k, perm: n });
    }
    if pattern.is_identity() {
        return Ok(longest_increasing_subsequence(text.values()) < k);
    }
    if pattern.is_reverse_identity() {
        return Ok(longest_decreasing_subsequence(text.values()) < k);
    }
    let search = Search {
        text: text.values(),
        bounds: PrefixBounds::new(pattern.values()),
        k,
    };
    Ok(!search.exists(0, 0, &mut Vec::with_capacity(k)))
}

/// Pairs `i < j` with `a[i] > a[j]`, by merge sort.
pub fn inversion_count(a: &[usize]) -> u64 {
    fn sort(buf: &mut [usize], tmp: &mut [usize]) -> u64 {
        let n = buf.len();
        if n < 2 {
            return 0;
        }
        let mid = n / 2;
        let mut inv = sort(&mut buf[..mid], &mut tmp[..mid]) + sort(&mut buf[mid..], &mut tmp[mid..]);
        let (mut i, mut j, mut o) = (0, mid, 0);
        while i < mid && j < n {
            if buf[i] <= buf[j] {
                tmp[o] = buf[i];
                i += 1;
            } else {
                tmp[o] = buf[j];
                inv += (mid - i) as u64;
                j += 1;
            }
            o += 1;
        }
        tmp[o..o + mid - i].copy_from_slice(&buf[i..mid]);
        o += mid - i;
        tmp[o..o + n - j].copy_from_slice(&buf[j..n]);
        buf.copy_from_slice(&tmp[..n]);
        inv
    }
    let mut buf = a.to_vec();
    let mut tmp = vec![0; a.len()];
    sort(&mut buf, &mut tmp)
}

/// Length of a longest strictly increasing subsequence (patience sorting).
pub fn longest_increasing_subsequence<T: Ord + Copy>(a: &[T]) -> usize {
    let mut tails: Vec<T> = Vec::new();
    for &x in a {
        let pos = tails.partition_point(|&t| t < x);
        if pos == tails.len() {
            tails.push(x);
        } else {
            tails[pos] = x;
        }
    }
    tails.len()
}

pub fn longest_decreasing_subsequence<T: Ord + Copy>(a: &[T]) -> usize {
    let rev: Vec<std::cmp::Reverse<T>> = a.iter().map(|&x| std::cmp::Reverse(x)).collect();
    longest_increasing_subsequence(&rev)
}
