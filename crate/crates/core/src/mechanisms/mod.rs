//! Builtin single-item mechanisms.

mod auctions;
mod recognize;
mod threshold;

pub use auctions::{
    first_price_outcome, null_outcome, second_price_outcome, FirstPrice, NullMechanism,
    SecondPrice, TieBreak,
};
pub use recognize::{matches_threshold_form, recognize_threshold_form};
pub use threshold::{BoundaryRule, ThresholdSpec};

use alloc::vec::Vec;

use thiserror::Error;

use crate::mechanism::{DomainError, Mechanism, MechanismTable, Outcome};
use crate::money::Money;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("mechanism needs at least {min} agents, got {got}")]
    TooFewAgents { min: usize, got: usize },
}

/// Uniform handle over the builtin mechanisms and tabulated ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyMechanism {
    Null(NullMechanism),
    Threshold(ThresholdSpec),
    SecondPrice(SecondPrice),
    FirstPrice(FirstPrice),
    Table(MechanismTable),
}

impl AnyMechanism {
    fn inner(&self) -> &dyn Mechanism {
        match self {
            AnyMechanism::Null(m) => m,
            AnyMechanism::Threshold(m) => m,
            AnyMechanism::SecondPrice(m) => m,
            AnyMechanism::FirstPrice(m) => m,
            AnyMechanism::Table(m) => m,
        }
    }
}

impl Mechanism for AnyMechanism {
    fn agents(&self) -> usize {
        self.inner().agents()
    }

    fn evaluate(&self, profile: &[Money]) -> Result<Outcome, DomainError> {
        self.inner().evaluate(profile)
    }

    fn critical_values(&self) -> Vec<Money> {
        self.inner().critical_values()
    }
}
