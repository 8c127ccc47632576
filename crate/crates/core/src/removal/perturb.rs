//! Random adjacent-transposition noise.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::seeded_rng;
use crate::perm::Permutation;
use crate::rational::{self, Rational};

/// Generator stream used by [`perturb`], distinct from the sampling stream.
pub const PERTURB_STREAM: u64 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerturbationSpec {
    #[serde(with = "rational::serde_str")]
    pub rate: Rational,
    pub seed: u64,
}

impl PerturbationSpec {
    pub fn new(rate: Rational, seed: u64) -> Result<Self> {
        if rate.is_negative() || rate > Rational::one() {
            return Err(Error::InvalidParameter(format!(
                "rate {} is not in [0,1]",
                rational::format_rational(&rate)
            )));
        }
        Ok(PerturbationSpec { rate, seed })
    }
}

/// One left-to-right sweep swapping positions `i, i+1` with probability
/// `rate`. A swap happens when a uniform 64-bit draw `u` satisfies
/// `u < rate·2^64`, so for a fixed seed the swaps at a lower rate are a
/// subset of those at a higher rate.
pub fn perturb(pi: &Permutation, spec: &PerturbationSpec) -> Permutation {
    let mut values = pi.values().to_vec();
    let mut rng = seeded_rng(spec.seed, PERTURB_STREAM);
    let threshold: BigInt = spec.rate.numer() << 64usize;
    let den = spec.rate.denom();
    for i in 0..values.len().saturating_sub(1) {
        let u = BigInt::from(rng.gen::<u64>());
        if u * den < threshold {
            values.swap(i, i + 1);
        }
    }
    Permutation::new(values).expect("swaps keep a permutation")
}
