use std::ops::Range;
use std::time::Instant;

use rayon::prelude::*;
use spitefree_core::mechanisms::AnyMechanism;
use spitefree_core::multiitem::{
    check_multi, payment_ranges, region_partition, Bundle, ClusterSpec, MultiError, MultiMechanism,
    PaymentRangeError, SequentialGeneral, SequentialHs,
};
use spitefree_core::optimal::{
    batch_count, expected_revenue_closed, merge_batches, optimal_thresholds_uniform, revenue_batch,
    revenue_recursive, Exact, PRNG_ALGORITHM,
};
use spitefree_core::verifier::{
    characterization_experiment, check_table_range, EnumerationError, PartialReport, Property,
};
use spitefree_core::{tabulate, Mechanism, MechanismTable, Money};

use crate::error::CliError;
use crate::report::*;
use crate::specfile::{parse_grid, parse_money, parse_spec, MultiSetup, SpecFile};
use crate::wire::{self, amounts, multi_witness, table_rows, PropertyWire, ToBidWire};

pub const DEFAULT_GRID: &str = "0,1,2";
const DECIMALS: usize = 12;
/// Profiles per parallel work unit when checking a table.
const CHUNK: usize = 4096;

pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let (passed, result) = match config.command.as_str() {
        "verify" => cmd_verify(config)?,
        "enumerate" => cmd_enumerate(config)?,
        "thresholds" => cmd_thresholds(config)?,
        "revenue" => cmd_revenue(config)?,
        "regions" => cmd_regions(config)?,
        "multi" => cmd_multi(config)?,
        other => return Err(CliError::Input(format!("unknown command {other:?}"))),
    };
    Ok(Report {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        passed,
        result,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

fn spec(config: &RunConfig) -> Result<SpecFile, CliError> {
    match &config.spec {
        Some(text) => parse_spec(text),
        None => Err(CliError::Input(format!("{} needs --spec", config.command))),
    }
}

fn need_n(config: &RunConfig) -> Result<usize, CliError> {
    match config.n {
        Some(n) if n > 0 => Ok(n),
        _ => Err(CliError::Input(format!("{} needs --n >= 1", config.command))),
    }
}

fn properties(config: &RunConfig, default: &[Property]) -> Result<Vec<Property>, CliError> {
    match &config.props {
        None => Ok(default.to_vec()),
        Some(names) => names
            .iter()
            .map(|n| Property::from_name(n).ok_or_else(|| CliError::Input(format!("unknown property {n:?}"))))
            .collect(),
    }
}

fn within_budget(what: &str, work: Option<u128>, budget: u64) -> Result<(), CliError> {
    match work {
        Some(w) if w <= budget as u128 => Ok(()),
        Some(w) => Err(CliError::Budget(format!("{what} needs {w} steps, budget is {budget}"))),
        None => Err(CliError::Budget(format!("{what} size overflows"))),
    }
}

fn describe(m: &AnyMechanism) -> String {
    match m {
        AnyMechanism::Null(_) => "null".into(),
        AnyMechanism::Threshold(t) => {
            let w = wire::ThresholdWire::from(t);
            format!(
                "threshold t=({}) ranking {:?} boundary {}",
                w.thresholds.join(", "),
                w.ranking,
                w.boundary_rule
            )
        }
        AnyMechanism::SecondPrice(_) => "second_price".into(),
        AnyMechanism::FirstPrice(_) => "first_price".into(),
        AnyMechanism::Table(_) => "table".into(),
    }
}

/// Checks `property` over chunks of the table in parallel; chunks merge in
/// index order, so the reported witness is the first failing profile.
fn check_parallel(property: Property, table: &MechanismTable) -> spitefree_core::verifier::PropertyReport {
    let size = table.space().size();
    let chunks: Vec<Range<usize>> = (0..size).step_by(CHUNK).map(|s| s..(s + CHUNK).min(size)).collect();
    let parts: Vec<PartialReport> = chunks
        .into_par_iter()
        .map(|r| check_table_range(property, table, r))
        .collect();
    parts
        .into_iter()
        .fold(PartialReport::empty(property), PartialReport::merge)
        .finish()
}

pub fn cmd_verify(config: &RunConfig) -> Result<(bool, ReportBody), CliError> {
    let mech = spec(config)?.single_item(config.n)?;
    let agents = mech.agents();
    let requested = match (&mech, &config.grid) {
        (AnyMechanism::Table(t), None) => t.grid().clone(),
        (AnyMechanism::Table(t), Some(g)) => {
            let g = parse_grid(g)?;
            if &g != t.grid() {
                return Err(CliError::Input("--grid differs from the table's grid".into()));
            }
            g
        }
        (_, g) => parse_grid(g.as_deref().unwrap_or(DEFAULT_GRID))?,
    };
    let grid = requested.closure(&mech.critical_values());
    let props = properties(
        config,
        &[Property::Ir, Property::Ic, Property::Sic, Property::Esic],
    )?;
    let profiles = (grid.len() as u128).checked_pow(agents as u32);
    let work = profiles.and_then(|p| p.checked_mul(1 + (agents * grid.len()) as u128 * props.len() as u128));
    within_budget("verification", work, config.budget)?;

    let table = tabulate(&mech, &grid, agents).map_err(|e| CliError::Input(e.to_string()))?;
    let mut out = Vec::new();
    for p in props {
        let r = check_parallel(p, &table);
        let replayed = r
            .witness
            .as_ref()
            .map(|w| w.replay(p, &mech).unwrap_or(false));
        out.push(PropertyWire::new(&r, replayed));
    }
    let passed = out.iter().all(PropertyWire::passed);
    Ok((
        passed,
        ReportBody::Verify(VerifyBody {
            mechanism: describe(&mech),
            agents,
            requested_grid: amounts(requested.levels()),
            grid: amounts(grid.levels()),
            properties: out,
        }),
    ))
}

pub fn cmd_enumerate(config: &RunConfig) -> Result<(bool, ReportBody), CliError> {
    let grid = parse_grid(config.grid.as_deref().unwrap_or(DEFAULT_GRID))?;
    let n = config.n.unwrap_or(2);
    if n != 2 {
        return Err(CliError::Input("enumeration supports two agents".into()));
    }
    let s = characterization_experiment(&grid, n, config.budget as u128).map_err(|e| match e {
        EnumerationError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
        other => CliError::Input(other.to_string()),
    })?;
    let passed = s.verify().is_ok();
    Ok((
        passed,
        ReportBody::Enumerate(EnumerateBody {
            grid: amounts(s.grid.levels()),
            agents: s.agents,
            total_candidates: s.total_candidates.to_string(),
            ir_ic_count: s.ir_ic_count,
            sic_count: s.sic_count,
            threshold_form_count: s.threshold_form_count,
            anonymous_sic_count: s.anonymous_sic_count,
            efficient_sic_count: s.efficient_sic_count,
            esic_among_sic_count: s.esic_among_sic_count,
            characterization_holds: s.characterization_holds(),
            impossibility_holds: s.impossibility_holds(),
            sic_implies_esic: s.sic_implies_esic(),
            mismatches: s
                .mismatches
                .iter()
                .map(|m| MismatchWire {
                    sic: m.sic,
                    threshold_form: m.threshold_form.as_ref().map(Into::into),
                    table: table_rows(&m.table),
                })
                .collect(),
            impossibility_violations: s.impossibility_violations.iter().map(table_rows).collect(),
            sic_not_esic: s.sic_not_esic.iter().map(table_rows).collect(),
        }),
    ))
}

fn exact(x: &Exact) -> ExactWire {
    ExactWire {
        exact: x.to_string(),
        decimal: x.to_decimal(DECIMALS),
    }
}

pub fn cmd_thresholds(config: &RunConfig) -> Result<(bool, ReportBody), CliError> {
    let n = need_n(config)?;
    within_budget("threshold recursion", Some((n as u128) * (n as u128)), config.budget)?;
    let seq = optimal_thresholds_uniform(n);
    let recursive = revenue_recursive(&seq).map_err(|e| CliError::Input(e.to_string()))?;
    let closed = expected_revenue_closed(&seq).map_err(|e| CliError::Input(e.to_string()))?;
    let agree = recursive == closed;
    Ok((
        agree,
        ReportBody::Thresholds(ThresholdsBody {
            n,
            exact_prefix: seq.exact_prefix(),
            thresholds: seq.values().iter().map(exact).collect(),
            revenue_recursive: exact(&recursive),
            revenue_closed: exact(&closed),
            routes_agree: agree,
        }),
    ))
}

pub fn cmd_revenue(config: &RunConfig) -> Result<(bool, ReportBody), CliError> {
    let n = need_n(config)?;
    let samples = config.samples.unwrap_or(1_000_000);
    if samples == 0 {
        return Err(CliError::Input("--samples must be positive".into()));
    }
    within_budget("sampling", (samples as u128).checked_mul(n as u128), config.budget)?;
    let seq = optimal_thresholds_uniform(n);
    let ts = seq.to_f64();
    let batches = batch_count(samples);
    let parts: Vec<_> = (0..batches)
        .into_par_iter()
        .map(|b| revenue_batch(&ts, samples, config.seed, b))
        .collect();
    let est = merge_batches(parts).estimate(config.seed);
    let gamma = revenue_recursive(&seq).map_err(|e| CliError::Input(e.to_string()))?;
    let z = if est.std_error > 0.0 {
        (est.mean - gamma.to_f64()) / est.std_error
    } else {
        0.0
    };
    Ok((
        true,
        ReportBody::Revenue(RevenueBody {
            n,
            samples: est.samples,
            seed: est.seed,
            algorithm: PRNG_ALGORITHM.to_string(),
            batches,
            mean: est.mean,
            std_error: est.std_error,
            exact: exact(&gamma),
            z_score: z,
        }),
    ))
}

/// `"lo,hi"` bounding box shared by every axis.
fn parse_box(s: &str) -> Result<(Money, Money), CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [lo, hi] => {
            let (lo, hi) = (parse_money(lo)?, parse_money(hi)?);
            if lo > hi {
                return Err(CliError::Input(format!("empty box {s:?}")));
            }
            Ok((lo, hi))
        }
        _ => Err(CliError::Input(format!("box must be \"lo,hi\", got {s:?}"))),
    }
}

pub fn cmd_regions(config: &RunConfig) -> Result<(bool, ReportBody), CliError> {
    let (items, payments) = spec(config)?.region_payments()?;
    let system = region_partition(items, &payments).map_err(|e| CliError::Input(e.to_string()))?;
    let lattice = match (&config.bbox, &config.step) {
        (None, None) => None,
        (Some(b), Some(step)) => {
            let (lo, hi) = parse_box(b)?;
            let step = parse_money(step)?;
            if step.is_zero() {
                return Err(CliError::Input("--step must be positive".into()));
            }
            let per_axis = ((hi.as_ratio() - lo.as_ratio()) / step.as_ratio()).floor().to_integer() as u128 + 1;
            within_budget("lattice", per_axis.checked_pow(items as u32), config.budget)?;
            let points = spitefree_core::multiitem::classify_lattice(&system, lo, hi, step)
                .into_iter()
                .map(|(p, bs)| LatticePoint {
                    point: amounts(&p),
                    bundles: bs.iter().map(|b| b.to_bits(items)).collect(),
                })
                .collect();
            Some(LatticeWire {
                lo: lo.to_string(),
                hi: hi.to_string(),
                step: step.to_string(),
                points,
            })
        }
        _ => return Err(CliError::Input("--box and --step go together".into())),
    };
    Ok((
        true,
        ReportBody::Regions(RegionsBody {
            items,
            payments: Bundle::all(items)
                .map(|b| (b.to_bits(items), payments[b.bits() as usize].to_string()))
                .collect(),
            regions: system.regions.iter().map(|r| wire::region(r, items)).collect(),
            lattice,
        }),
    ))
}

fn run_multi<M>(
    config: &RunConfig,
    name: &str,
    mech: &M,
    candidates: &[Vec<M::Bid>],
    truths: &[Vec<M::Bid>],
) -> Result<(bool, ReportBody), CliError>
where
    M: MultiMechanism,
    M::Bid: Clone + PartialEq + std::fmt::Debug + ToBidWire,
{
    let input = |e: MultiError| CliError::Input(e.to_string());
    // PAYMENT_RANGE is a multi-item-only check on top of the core properties.
    let is_range = |p: &String| p.eq_ignore_ascii_case("PAYMENT_RANGE");
    let ranges_requested = config.props.as_ref().is_some_and(|ps| ps.iter().any(is_range));
    let core_props = RunConfig {
        props: config
            .props
            .as_ref()
            .map(|ps| ps.iter().filter(|p| !is_range(p)).cloned().collect()),
        ..config.clone()
    };
    let wanted = properties(&core_props, &[Property::Ir, Property::Ic, Property::Sic])?;
    let profiles = truths.iter().try_fold(1u128, |acc, t| acc.checked_mul(t.len() as u128));
    let deviations: u128 = candidates.iter().map(|c| c.len() as u128).sum::<u128>() + 1;
    within_budget(
        "multi-item check",
        profiles.and_then(|p| p.checked_mul(deviations * wanted.len().max(1) as u128)),
        config.budget,
    )?;

    let mut out = Vec::new();
    for p in &wanted {
        let r = check_multi(*p, mech, candidates, truths).map_err(input)?;
        let replayed = r.witness.as_ref().map(|w| w.replay(*p, mech).unwrap_or(false));
        out.push(MultiPropertyWire {
            property: p.name().to_string(),
            verdict: if r.passed() { "PASS" } else { "FAIL" }.to_string(),
            checked: r.checked,
            witness: r.witness.as_ref().map(|w| multi_witness(w, mech.items())),
            replayed,
        });
    }
    let mut passed = out.iter().all(|p| p.verdict == "PASS");

    let (mut ranges, mut dependence) = (None, None);
    if ranges_requested {
        if mech.agents() != 2 {
            return Err(CliError::Input("payment ranges need exactly two agents".into()));
        }
        let mut rows = Vec::new();
        for agent in 0..2 {
            match payment_ranges(mech, agent, &candidates[1 - agent], &candidates[agent]) {
                Ok(rs) => rows.extend(rs.iter().map(|r| {
                    passed &= r.within_bound();
                    PaymentRangeWire {
                        agent,
                        bundle: r.bundle.to_bits(mech.items()),
                        cardinality: r.cardinality,
                        bound: r.bound,
                    }
                })),
                Err(PaymentRangeError::DependsOnOwnBid(d)) => {
                    passed = false;
                    dependence = Some(OwnBidDependenceWire {
                        agent: d.agent,
                        bundle: d.bundle.to_bits(mech.items()),
                        opposing: d.opposing.to_wire(),
                        first_bid: d.first_bid.to_wire(),
                        second_bid: d.second_bid.to_wire(),
                        first_payment: d.first_payment.to_string(),
                        second_payment: d.second_payment.to_string(),
                    });
                    break;
                }
                Err(e) => return Err(CliError::Input(e.to_string())),
            }
        }
        ranges = Some(rows);
    }
    Ok((
        passed,
        ReportBody::Multi(MultiBody {
            mechanism: name.to_string(),
            items: mech.items(),
            agents: mech.agents(),
            domain_sizes: candidates.iter().map(Vec::len).collect(),
            properties: out,
            payment_ranges: ranges,
            own_bid_dependence: dependence,
        }),
    ))
}

pub fn cmd_multi(config: &RunConfig) -> Result<(bool, ReportBody), CliError> {
    match spec(config)?.multi()? {
        MultiSetup::Hs {
            spec,
            items,
            candidates,
            truths,
        } => run_multi(config, "sequential", &SequentialHs { spec, items }, &candidates, &truths),
        MultiSetup::SequentialGeneral {
            spec,
            items,
            candidates,
            truths,
        } => run_multi(
            config,
            "sequential_general",
            &SequentialGeneral { spec, items },
            &candidates,
            &truths,
        ),
        MultiSetup::Cluster {
            spec,
            candidates,
            truths,
        } => run_multi::<ClusterSpec>(config, "cluster", &spec, &candidates, &truths),
    }
}
