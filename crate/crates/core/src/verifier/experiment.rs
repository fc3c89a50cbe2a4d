//! Exhaustive comparison of spite-free mechanisms with threshold form.

use alloc::boxed::Box;
use alloc::vec::Vec;

use thiserror::Error;

use crate::grid::Grid;
use crate::mechanism::MechanismTable;
use crate::mechanisms::{recognize_threshold_form, ThresholdSpec};

use super::checks::check_table;
use super::enumerate::{candidate_count, enumerate_ir_ic_mechanisms, EnumerationError};
use super::report::Property;

/// A table on which spite-freeness and threshold form disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub table: MechanismTable,
    pub sic: bool,
    pub threshold_form: Option<ThresholdSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationSummary {
    pub grid: Grid,
    pub agents: usize,
    /// Raw allocation tables `(n + 1)^(|grid|^n)` before the monotonicity filter.
    pub total_candidates: u128,
    /// Tables passing the monotonicity filter, i.e. the IR and IC mechanisms.
    pub ir_ic_count: u64,
    pub sic_count: u64,
    pub threshold_form_count: u64,
    pub anonymous_sic_count: u64,
    pub efficient_sic_count: u64,
    /// SIC tables that also pass ESIC.
    pub esic_among_sic_count: u64,
    pub mismatches: Vec<Mismatch>,
    /// SIC tables that are anonymous or efficient but not the null table.
    pub impossibility_violations: Vec<MechanismTable>,
    /// SIC tables failing ESIC.
    pub sic_not_esic: Vec<MechanismTable>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExperimentFailure {
    #[error("spite-free set differs from threshold-form set on {0:?}")]
    Characterization(Box<Mismatch>),
    #[error("non-null anonymous or efficient spite-free table {0:?}")]
    Impossibility(MechanismTable),
    #[error("expected exactly one anonymous and one efficient spite-free table, got {anonymous} and {efficient}")]
    ImpossibilityCount { anonymous: u64, efficient: u64 },
    #[error("spite-free table fails the extreme variant: {0:?}")]
    SicNotEsic(MechanismTable),
}

impl EnumerationSummary {
    pub fn characterization_holds(&self) -> bool {
        self.mismatches.is_empty() && self.sic_count == self.threshold_form_count
    }

    pub fn impossibility_holds(&self) -> bool {
        self.impossibility_violations.is_empty()
            && self.anonymous_sic_count == 1
            && self.efficient_sic_count == 1
    }

    pub fn sic_implies_esic(&self) -> bool {
        self.sic_not_esic.is_empty() && self.esic_among_sic_count == self.sic_count
    }

    /// First failed assertion, reporting the offending table in full.
    pub fn verify(&self) -> Result<(), ExperimentFailure> {
        if let Some(m) = self.mismatches.first() {
            return Err(ExperimentFailure::Characterization(Box::new(m.clone())));
        }
        if let Some(t) = self.impossibility_violations.first() {
            return Err(ExperimentFailure::Impossibility(t.clone()));
        }
        if !self.impossibility_holds() {
            return Err(ExperimentFailure::ImpossibilityCount {
                anonymous: self.anonymous_sic_count,
                efficient: self.efficient_sic_count,
            });
        }
        if let Some(t) = self.sic_not_esic.first() {
            return Err(ExperimentFailure::SicNotEsic(t.clone()));
        }
        Ok(())
    }
}

/// Runs SIC, ESIC, anonymity, efficiency and threshold recognition on every
/// IR and IC mechanism of `grid^n`.
pub fn characterization_experiment(
    grid: &Grid,
    agents: usize,
    budget: u128,
) -> Result<EnumerationSummary, EnumerationError> {
    let mut s = EnumerationSummary {
        grid: grid.clone(),
        agents,
        total_candidates: candidate_count(grid.len(), agents),
        ir_ic_count: 0,
        sic_count: 0,
        threshold_form_count: 0,
        anonymous_sic_count: 0,
        efficient_sic_count: 0,
        esic_among_sic_count: 0,
        mismatches: Vec::new(),
        impossibility_violations: Vec::new(),
        sic_not_esic: Vec::new(),
    };
    for table in enumerate_ir_ic_mechanisms(grid, agents, budget)? {
        s.ir_ic_count += 1;
        let sic = check_table(Property::Sic, &table).passed();
        let form = recognize_threshold_form(&table);
        if form.is_some() {
            s.threshold_form_count += 1;
        }
        if sic {
            s.sic_count += 1;
            if check_table(Property::Esic, &table).passed() {
                s.esic_among_sic_count += 1;
            } else {
                s.sic_not_esic.push(table.clone());
            }
            let anon = check_table(Property::Anon, &table).passed();
            let eff = check_table(Property::Eff, &table).passed();
            s.anonymous_sic_count += anon as u64;
            s.efficient_sic_count += eff as u64;
            if (anon || eff) && !table.is_null() {
                s.impossibility_violations.push(table.clone());
            }
        }
        if sic != form.is_some() {
            s.mismatches.push(Mismatch {
                table,
                sic,
                threshold_form: form,
            });
        }
    }
    Ok(s)
}
