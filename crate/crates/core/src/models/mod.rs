//! Representable permutons.
//!
//! Model files are JSON objects tagged by `"type"`; rationals are `"p/q"`
//! strings in lowest terms:
//!
//! ```text
//! {"type":"tracks","pieces":[{"x_lo":"0/1","x_hi":"1/1","tracks":[{"a":"1/1","b":"0/1","w":"1/1"}]}]}
//! {"type":"step","perm":[2,1,3]}
//! {"type":"digit-swap-base4"}
//! {"type":"uniform"}
//! ```

mod digit_swap;
mod fiber;
mod profile;
mod sample;
mod step;
mod track;

pub use digit_swap::{
    difference_quotients, digit_swap_eval, is_involution_at_depth, prefix_pattern_count, swap_digit, swap_prefix,
    DigitSwapPermuton,
};
pub use fiber::{lp_distance, Atom, Fiber, LP_MAX_ATOMS};
pub use profile::{fiber_lp_profile, LpProfile};
pub use sample::{sample_permutation, seeded_rng, Sampler};
pub use step::StepPermuton;
pub use track::{
    build_zigzag, Crossing, DensityBand, Direction, MarginalReport, MoleculeProfile, Piece, Track, TrackPermuton,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Permuton {
    #[serde(rename = "tracks")]
    Tracks(TrackPermuton),
    #[serde(rename = "step")]
    Step(StepPermuton),
    #[serde(rename = "digit-swap-base4")]
    DigitSwap,
    /// Lebesgue measure on the square; sampling only.
    #[serde(rename = "uniform")]
    Uniform,
}

impl Permuton {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("models serialise")
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Permuton::Tracks(_) => "tracks",
            Permuton::Step(_) => "step",
            Permuton::DigitSwap => "digit-swap-base4",
            Permuton::Uniform => "uniform",
        }
    }

    /// Fiber at `x`; the uniform permuton has no atomic fibers.
    pub fn fiber_at(&self, x: &Rational) -> Result<Fiber> {
        match self {
            Permuton::Tracks(t) => t.fiber_at(x),
            Permuton::Step(s) => s.fiber_at(x),
            Permuton::DigitSwap => DigitSwapPermuton.fiber_at(x),
            Permuton::Uniform => Err(Error::Unsupported("uniform permuton has no atomic fibers".into())),
        }
    }

    /// Number of x-pieces, used to size boundary shifts.
    pub fn piece_count(&self) -> usize {
        match self {
            Permuton::Tracks(t) => t.pieces().len(),
            Permuton::Step(s) => s.order(),
            Permuton::DigitSwap | Permuton::Uniform => 1,
        }
    }

    pub fn as_tracks(&self) -> Option<TrackPermuton> {
        match self {
            Permuton::Tracks(t) => Some(t.clone()),
            Permuton::Step(s) => Some(s.to_tracks()),
            _ => None,
        }
    }
}
