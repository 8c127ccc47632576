//! Distances, densities, avoidance certificates and growth experiments.

mod certify;
mod constraints;
mod density;
mod distance;
mod swbound;

pub use certify::{
    certify_avoidance, enumerate_assignments, realisation_system, AssignmentVerdict, AvoidanceCertificate, Slot,
    Verdict,
};
pub use constraints::{Constraint, Feasibility, LinearConstraintSystem, Refutation, MAX_VARIABLES};
pub use density::{density_monte_carlo, hoeffding_half_width, DensityEstimate};
pub use distance::{
    cut_distance_bruteforce, rect_discrepancy, rect_distance_interval, witness_discrepancy, DistanceResult, Interval,
    Witness, CUT_MAX_CELLS, DIGIT_SWAP_DISTANCE_DEPTH,
};
pub use swbound::{fiber_heights, sw_generate, SwMode, SwReport, SW_MAX_CHOICES};
