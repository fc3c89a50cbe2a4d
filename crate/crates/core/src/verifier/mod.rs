//! Exhaustive property checking over finite grids.
//!
//! Deviations range over the grid only: a pass certifies the property
//! against grid deviations, not against every real-valued bid.

mod checks;
mod enumerate;
mod experiment;
mod report;

pub use checks::{
    anonymity_violations, check, check_anonymous, check_efficient, check_esic, check_ic,
    check_ir, check_ir_ic_structure, check_sic, check_table, check_table_range,
    check_winner_payment_constant, AnonymityViolation,
};
pub use enumerate::{
    candidate_count, enumerate_ir_ic_mechanisms, EnumerationError, IrIcTables, DEFAULT_BUDGET,
};
pub use experiment::{characterization_experiment, EnumerationSummary, ExperimentFailure, Mismatch};
pub(crate) use report::deviation_violates;
pub use report::{
    permute_outcome, permute_profile, PartialReport, Property, PropertyReport, Verdict, Witness,
};
