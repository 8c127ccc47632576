//! Pattern-avoiding permutons and removal by resnapping.
//!
//! The crate is organised in four layers:
//!
//! * [`perm`]: finite permutations, exact pattern counting and avoidance.
//! * [`models`]: representable permutons (piecewise-linear tracks, step
//!   permutons, the base-4 digit-swap permuton, the uniform permuton),
//!   their fibers, sampling and the Lévy–Prokhorov metric on fibers.
//! * [`analysis`]: rectangular distances, Monte Carlo densities, exact
//!   avoidance certificates via Fourier–Motzkin elimination and the
//!   Stanley–Wilf style generator.
//! * [`removal`]: the resnapping removal algorithm, an exact small-order
//!   removal oracle and the experiment harness.

pub mod analysis;
pub mod error;
pub mod models;
pub mod perm;
pub mod rational;
pub mod removal;

pub use error::{Error, Result};
pub use perm::Permutation;
pub use rational::Rational;
