//! The permuton on the graph of the base-4 digit map exchanging 1 and 2.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::fiber::Fiber;
use super::step::StepPermuton;
use crate::error::{Error, Result};
use crate::perm::{count_occurrences, PatternCount, Permutation};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DigitSwapPermuton;

pub fn swap_digit(d: u8) -> u8 {
    match d {
        1 => 2,
        2 => 1,
        other => other,
    }
}

/// Applies the swap to a string of base-4 digits.
pub fn digit_swap_eval(digits: &str) -> Result<String> {
    digits
        .chars()
        .map(|c| match c {
            '0'..='3' => Ok(char::from(b'0' + swap_digit(c as u8 - b'0'))),
            other => Err(Error::InvalidDigit(other)),
        })
        .collect()
}

/// Swap on a depth-`depth` prefix encoded as the integer `Σ d_i 4^(depth-i)`.
pub fn swap_prefix(value: u64, depth: u32) -> u64 {
    let mut out = 0;
    for pos in 0..depth {
        let d = ((value >> (2 * pos)) & 3) as u8;
        out |= (swap_digit(d) as u64) << (2 * pos);
    }
    out
}

const MAX_EXPANSION: usize = 1 << 20;

impl DigitSwapPermuton {
    /// Exact image of a rational `x` whose base-4 expansion is unique.
    ///
    /// Rationals with power-of-two denominators have two expansions and are
    /// reported as boundaries; they form the countable exceptional set.
    pub fn image(&self, x: &Rational) -> Result<Rational> {
        if !rational::in_unit_interval(x) {
            return Err(Error::OutOfUnitInterval(x.clone()));
        }
        let den = x.denom().clone();
        let two = BigInt::from(2);
        let mut odd = den.clone();
        while odd.is_even() {
            odd /= &two;
        }
        if odd.is_one() {
            return Err(Error::Boundary(x.clone()));
        }
        // long division in base 4 with cycle detection on the remainder
        let mut seen: HashMap<BigInt, usize> = HashMap::new();
        let mut digits: Vec<u8> = Vec::new();
        let mut r = x.numer().clone();
        let four = BigInt::from(4);
        let start = loop {
            if let Some(&pos) = seen.get(&r) {
                break pos;
            }
            if digits.len() >= MAX_EXPANSION {
                return Err(Error::SizeLimit("base-4 period too long".into()));
            }
            seen.insert(r.clone(), digits.len());
            let t = &r * &four;
            let (d, rem) = t.div_rem(&den);
            digits.push(d.to_u8().expect("base-4 digit"));
            r = rem;
        };
        let as_int = |ds: &[u8]| {
            ds.iter()
                .fold(BigInt::zero(), |acc, &d| acc * &four + BigInt::from(swap_digit(d)))
        };
        let pre = as_int(&digits[..start]);
        let period = as_int(&digits[start..]);
        let plen = (digits.len() - start) as u32;
        let scale_pre = four.pow(start as u32);
        let repunit = four.pow(plen) - BigInt::one();
        let value = Rational::from_integer(pre) + Rational::new(period, repunit);
        Ok(value / Rational::from_integer(scale_pre))
    }

    pub fn fiber_at(&self, x: &Rational) -> Result<Fiber> {
        Fiber::dirac(self.image(x)?)
    }

    /// The permutation of depth-`depth` cells; the permuton maps cell `i`
    /// onto cell `swap(i)` measure-preservingly.
    pub fn cell_permutation(&self, depth: u32) -> Permutation {
        let n = 1u64 << (2 * depth);
        Permutation::from_values_unchecked((0..n).map(|i| swap_prefix(i, depth) as usize + 1).collect())
    }

    /// Step approximation at `depth`; agrees with the permuton on every
    /// rectangle aligned to the depth grid.
    pub fn as_step(&self, depth: u32) -> StepPermuton {
        StepPermuton::new(self.cell_permutation(depth))
    }
}

/// Occurrences of `pattern` among the images of increasing depth-`depth`
/// prefixes. Distinct prefixes have distinct, ordered images, so a zero
/// count at any depth means the graph avoids `pattern`.
pub fn prefix_pattern_count(depth: u32, pattern: &Permutation) -> Result<PatternCount> {
    count_occurrences(pattern, &DigitSwapPermuton.cell_permutation(depth))
}

/// Every value of `(f(x) − f(x + i·4^-n)) / (i·4^-n)` over depth-`n`
/// prefixes, `n ≤ max_depth`, where the two points share their first
/// `n − 1` digits.
pub fn difference_quotients(max_depth: u32) -> BTreeSet<Rational> {
    let mut out = BTreeSet::new();
    for depth in 1..=max_depth {
        for v in 0..(1u64 << (2 * depth)) {
            let d = (v & 3) as i64;
            for i in [-3i64, -2, -1, 1, 2, 3] {
                if !(0..4).contains(&(d + i)) {
                    continue;
                }
                let w = (v as i64 + i) as u64;
                let num = swap_prefix(v, depth) as i64 - swap_prefix(w, depth) as i64;
                out.insert(rational::q(num, i));
            }
        }
    }
    out
}

/// Whether the swap is an involution on all depth-`depth` digit strings.
pub fn is_involution_at_depth(depth: u32) -> bool {
    (0..(1u64 << (2 * depth))).all(|v| swap_prefix(swap_prefix(v, depth), depth) == v)
}
