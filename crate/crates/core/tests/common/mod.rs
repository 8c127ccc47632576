#![allow(dead_code)]

use permuton_core::models::{build_zigzag, Permuton, StepPermuton, TrackPermuton};
use permuton_core::Permutation;
use proptest::prelude::*;

/// Occurrences of `pattern` in `text` by visiting every k-subset of positions.
pub fn naive_count(pattern: &[usize], text: &[usize]) -> u128 {
    fn rec(pattern: &[usize], text: &[usize], start: usize, chosen: &mut Vec<usize>) -> u128 {
        if chosen.len() == pattern.len() {
            let ok = (0..chosen.len())
                .all(|i| (0..chosen.len()).all(|j| (text[chosen[i]] < text[chosen[j]]) == (pattern[i] < pattern[j])));
            return u128::from(ok);
        }
        let mut total = 0;
        for p in start..text.len() {
            chosen.push(p);
            total += rec(pattern, text, p + 1, chosen);
            chosen.pop();
        }
        total
    }
    rec(pattern, text, 0, &mut Vec::new())
}

pub fn perm(v: &[usize]) -> Permutation {
    Permutation::new(v.to_vec()).unwrap()
}

pub fn arb_perm(min: usize, max: usize) -> impl Strategy<Value = Permutation> {
    (min..=max)
        .prop_flat_map(|n| Just((1..=n).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|v| Permutation::new(v).unwrap())
}

pub fn step(v: &[usize]) -> Permuton {
    Permuton::Step(StepPermuton::new(perm(v)))
}

pub fn zigzag(v: &[usize]) -> TrackPermuton {
    build_zigzag(&perm(v)).unwrap()
}

pub fn stripes() -> TrackPermuton {
    zigzag(&[1, 2, 3]).transpose().unwrap()
}
