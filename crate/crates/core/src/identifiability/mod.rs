//! Numerical identifiability certification: Jacobian rank tests, multistart
//! solution censuses, empirical threshold sweeps and the two small
//! counterexample designs on coordinate projections.

mod census;
mod fixtures;
mod jacobian;
mod threshold;

pub use census::{count_solutions, CensusOptions, SolutionCensus};
pub use fixtures::{
    check_example_2_12, example_2_12_ensemble, example_2_14_ensemble, Example212Report, Identifiability,
};
pub use jacobian::{jacobian_rank, JacobianReport};
pub use threshold::{
    compare_projector_classes, estimate_generic_threshold, ClassComparison, ClassRow, Oracle, ThresholdReport,
    ThresholdRow, GENERIC_LEVEL,
};

#[cfg(test)]
mod tests;
