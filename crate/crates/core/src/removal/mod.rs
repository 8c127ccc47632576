//! Turning permutations with few pattern occurrences into avoiding ones.

mod exact;
mod experiment;
mod perturb;
mod resnap;

pub use exact::{exact_removal, ExactRemoval, EXACT_MAX_ORDER};
pub use experiment::{removal_experiment, rows_to_csv, ExperimentRow, CSV_HEADER};
pub use perturb::{perturb, PerturbationSpec, PERTURB_STREAM};
pub use resnap::{displacement_cost, rank_shift_bound, resnap, RemovalReport, ResnapOptions, TieRule, XMode};
