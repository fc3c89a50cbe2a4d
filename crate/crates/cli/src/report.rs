use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::wire::{
    BidWire, MultiWitnessWire, PropertyWire, RegionWire, TableRowWire, ThresholdWire, WitnessWire,
};

/// Everything that determines a run's result. Output path and format only
/// affect presentation and are not echoed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec_path: Option<String>,
    /// Spec file contents, so a report can be re-run without the file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub props: Option<Vec<String>>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    pub budget: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub passed: bool,
    pub result: ReportBody,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ReportBody {
    Verify(VerifyBody),
    Enumerate(EnumerateBody),
    Thresholds(ThresholdsBody),
    Revenue(RevenueBody),
    Regions(RegionsBody),
    Multi(MultiBody),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyBody {
    pub mechanism: String,
    pub agents: usize,
    pub requested_grid: Vec<String>,
    /// Grid actually checked, after adding levels at and between thresholds.
    pub grid: Vec<String>,
    pub properties: Vec<PropertyWire>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MismatchWire {
    pub sic: bool,
    pub threshold_form: Option<ThresholdWire>,
    pub table: Vec<TableRowWire>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerateBody {
    pub grid: Vec<String>,
    pub agents: usize,
    pub total_candidates: String,
    pub ir_ic_count: u64,
    pub sic_count: u64,
    pub threshold_form_count: u64,
    pub anonymous_sic_count: u64,
    pub efficient_sic_count: u64,
    pub esic_among_sic_count: u64,
    pub characterization_holds: bool,
    pub impossibility_holds: bool,
    pub sic_implies_esic: bool,
    pub mismatches: Vec<MismatchWire>,
    /// Anonymous or efficient SIC tables other than the null table.
    pub impossibility_violations: Vec<Vec<TableRowWire>>,
    pub sic_not_esic: Vec<Vec<TableRowWire>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactWire {
    pub exact: String,
    pub decimal: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdsBody {
    pub n: usize,
    /// Thresholds from this index on are rounded to dyadic rationals.
    pub exact_prefix: usize,
    pub thresholds: Vec<ExactWire>,
    pub revenue_recursive: ExactWire,
    pub revenue_closed: ExactWire,
    pub routes_agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevenueBody {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub algorithm: String,
    pub batches: u64,
    pub mean: f64,
    pub std_error: f64,
    pub exact: ExactWire,
    /// `(mean - exact) / std_error`.
    pub z_score: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePoint {
    pub point: Vec<String>,
    /// Utility-maximizing bundles as bit strings; several on boundaries.
    pub bundles: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeWire {
    pub lo: String,
    pub hi: String,
    pub step: String,
    pub points: Vec<LatticePoint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionsBody {
    pub items: usize,
    /// Prices keyed by bundle bit string.
    pub payments: Vec<(String, String)>,
    pub regions: Vec<RegionWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeWire>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiPropertyWire {
    pub property: String,
    pub verdict: String,
    pub checked: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<MultiWitnessWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replayed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaymentRangeWire {
    pub agent: usize,
    pub bundle: String,
    pub cardinality: usize,
    pub bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OwnBidDependenceWire {
    pub agent: usize,
    pub bundle: String,
    pub opposing: BidWire,
    pub first_bid: BidWire,
    pub second_bid: BidWire,
    pub first_payment: String,
    pub second_payment: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiBody {
    pub mechanism: String,
    pub items: usize,
    pub agents: usize,
    pub domain_sizes: Vec<usize>,
    pub properties: Vec<MultiPropertyWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payment_ranges: Option<Vec<PaymentRangeWire>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub own_bid_dependence: Option<OwnBidDependenceWire>,
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn witness_text(w: &WitnessWire) -> String {
    match w {
        WitnessWire::Profile {
            profile,
            agent,
            outcome,
        } => format!(
            "profile ({}) agent {agent}: winner {:?}, payments ({})",
            profile.join(", "),
            outcome.winner,
            outcome.payments.join(", ")
        ),
        WitnessWire::Deviation {
            values,
            agent,
            deviation,
            before,
            after,
        } => format!(
            "values ({}) agent {agent} bids {deviation}: utilities ({}) -> ({})",
            values.join(", "),
            before.join(", "),
            after.join(", ")
        ),
        WitnessWire::Pair {
            agent, first, second, ..
        } => format!("agent {agent} at ({}) vs ({})", first.join(", "), second.join(", ")),
        WitnessWire::Permutation {
            profile,
            permutation,
            ..
        } => format!("profile ({}) relabelled by {permutation:?}", profile.join(", ")),
    }
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} {} {}: {}",
            self.tool,
            self.version,
            self.config.command,
            verdict(self.passed)
        );
        let _ = writeln!(s, "seed {}", self.config.seed);
        match &self.result {
            ReportBody::Verify(b) => {
                let _ = writeln!(s, "mechanism {} with {} agents", b.mechanism, b.agents);
                let _ = writeln!(s, "grid {{{}}}", b.grid.join(", "));
                for p in &b.properties {
                    let _ = writeln!(s, "{} {} ({} checked)", p.verdict, p.property, p.checked);
                    if let Some(w) = &p.witness {
                        let _ = writeln!(s, "  witness: {}", witness_text(w));
                    }
                }
            }
            ReportBody::Enumerate(b) => {
                let _ = writeln!(s, "grid {{{}}}, {} agents", b.grid.join(", "), b.agents);
                let _ = writeln!(s, "IR+IC tables: {} of {} candidates", b.ir_ic_count, b.total_candidates);
                let _ = writeln!(s, "SIC: {}, threshold form: {}", b.sic_count, b.threshold_form_count);
                let _ = writeln!(s, "anonymous SIC: {}, efficient SIC: {}", b.anonymous_sic_count, b.efficient_sic_count);
                let _ = writeln!(s, "ESIC among SIC: {}", b.esic_among_sic_count);
                let _ = writeln!(s, "{} characterization", verdict(b.characterization_holds));
                let _ = writeln!(s, "{} impossibility", verdict(b.impossibility_holds));
                let _ = writeln!(s, "{} SIC implies ESIC", verdict(b.sic_implies_esic));
            }
            ReportBody::Thresholds(b) => {
                for (i, t) in b.thresholds.iter().enumerate() {
                    let _ = writeln!(s, "t{} = {} ~ {}", i + 1, t.exact, t.decimal);
                }
                let _ = writeln!(s, "revenue = {} ~ {}", b.revenue_recursive.exact, b.revenue_recursive.decimal);
                let _ = writeln!(s, "{} closed form agrees", verdict(b.routes_agree));
            }
            ReportBody::Revenue(b) => {
                let _ = writeln!(s, "n = {}, {} samples ({})", b.n, b.samples, b.algorithm);
                let _ = writeln!(s, "mean {:.6} +/- {:.6}", b.mean, b.std_error);
                let _ = writeln!(s, "exact {} ~ {} (z = {:.3})", b.exact.exact, b.exact.decimal, b.z_score);
            }
            ReportBody::Regions(b) => {
                for r in &b.regions {
                    if r.attainable {
                        let _ = writeln!(s, "{}: {}", r.bundle, r.inequalities.join(", "));
                    } else {
                        let _ = writeln!(s, "{}: empty", r.bundle);
                    }
                }
                if let Some(l) = &b.lattice {
                    let _ = writeln!(s, "lattice [{}, {}] step {}: {} points", l.lo, l.hi, l.step, l.points.len());
                }
            }
            ReportBody::Multi(b) => {
                let _ = writeln!(s, "mechanism {} with {} agents, {} items", b.mechanism, b.agents, b.items);
                for p in &b.properties {
                    let _ = writeln!(s, "{} {} ({} checked)", p.verdict, p.property, p.checked);
                    if let Some(w) = &p.witness {
                        let _ = writeln!(
                            s,
                            "  witness: agent {} utilities ({}) -> ({})",
                            w.agent,
                            w.before.join(", "),
                            w.after.join(", ")
                        );
                    }
                }
                if let Some(rs) = &b.payment_ranges {
                    for r in rs {
                        let _ = writeln!(
                            s,
                            "agent {} bundle {}: {} payments (bound {})",
                            r.agent, r.bundle, r.cardinality, r.bound
                        );
                    }
                }
                if let Some(d) = &b.own_bid_dependence {
                    let _ = writeln!(
                        s,
                        "FAIL agent {} pays {} or {} for {} depending on its own bid",
                        d.agent, d.first_payment, d.second_payment, d.bundle
                    );
                }
            }
        }
        s
    }
}
