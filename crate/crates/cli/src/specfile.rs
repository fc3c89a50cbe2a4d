//! TOML mechanism spec files. Money is written as rational strings
//! ("5/8"), thresholds may be "inf", bundles are bit strings with the
//! rightmost character standing for item a1.

use std::collections::BTreeMap;

use serde::Deserialize;
use spitefree_core::mechanisms::{
    AnyMechanism, BoundaryRule, FirstPrice, NullMechanism, SecondPrice, ThresholdSpec, TieBreak,
};
use spitefree_core::multiitem::{
    Bundle, BundleValuation, ClusterSpec, ClusterTieRule, HomogeneousSubmodularValuation,
    SequentialSpec,
};
use spitefree_core::{ExtMoney, Grid, MechanismTable, Money, Outcome, Ranking};

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpecFile {
    Threshold {
        thresholds: Vec<String>,
        /// Agents in service order, highest priority first. Default: 0, 1, ...
        ranking: Option<Vec<usize>>,
        boundary_rule: Option<BoundaryName>,
    },
    Null {
        agents: Option<usize>,
    },
    SecondPrice {
        agents: Option<usize>,
        tie: Option<TieName>,
    },
    FirstPrice {
        agents: Option<usize>,
        tie: Option<TieName>,
    },
    Table {
        agents: usize,
        grid: Vec<String>,
        /// Profiles not listed are unallocated with zero payments.
        #[serde(default)]
        outcomes: Vec<TableRow>,
    },
    Sequential {
        thresholds: Vec<String>,
        ranking: Option<Vec<usize>>,
        items: usize,
        domain: HsDomain,
    },
    SequentialGeneral {
        thresholds: Vec<String>,
        ranking: Option<Vec<usize>>,
        items: usize,
        domain: BundleDomain,
    },
    Cluster {
        items: usize,
        agents: usize,
        ranking: Option<Vec<usize>>,
        tie: Option<ClusterTieName>,
        /// Shared bundle thresholds; unlisted bundles are never offered.
        thresholds: Option<BTreeMap<String, String>>,
        /// Per-agent bundle thresholds, overriding `thresholds`.
        agent_thresholds: Option<Vec<BTreeMap<String, String>>>,
        domain: BundleDomain,
    },
    Regions {
        items: usize,
        /// Bundle prices; unlisted nonempty bundles cost "inf".
        payments: BTreeMap<String, String>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryName {
    HighestRankAtThreshold,
    NoAllocation,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieName {
    LowestIndex,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterTieName {
    PreferLarger,
    PreferSmaller,
    LowestMask,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRow {
    pub bids: Vec<String>,
    /// 0-based winning agent; omitted when unallocated.
    pub winner: Option<usize>,
    pub payments: Vec<String>,
}

/// Homogeneous submodular bids: either every nonincreasing integer marginal
/// vector with entries in `[0, integer_max]`, or an explicit list.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HsDomain {
    pub integer_max: Option<u64>,
    pub marginals: Option<Vec<Vec<String>>>,
    pub truths: Option<Vec<Vec<usize>>>,
}

/// Bundle valuations shared by all agents. `truths[i]` optionally restricts
/// agent `i`'s true values to the listed domain indices, and `candidates[i]`
/// its deviations.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleDomain {
    pub valuations: Vec<BTreeMap<String, String>>,
    pub truths: Option<Vec<Vec<usize>>>,
    pub candidates: Option<Vec<Vec<usize>>>,
}

/// Multi-item mechanism with its true-value and deviation domains.
pub enum MultiSetup {
    Hs {
        spec: SequentialSpec,
        items: usize,
        candidates: Vec<Vec<HomogeneousSubmodularValuation>>,
        truths: Vec<Vec<HomogeneousSubmodularValuation>>,
    },
    SequentialGeneral {
        spec: SequentialSpec,
        items: usize,
        candidates: Vec<Vec<BundleValuation>>,
        truths: Vec<Vec<BundleValuation>>,
    },
    Cluster {
        spec: ClusterSpec,
        candidates: Vec<Vec<BundleValuation>>,
        truths: Vec<Vec<BundleValuation>>,
    },
}

pub fn parse_spec(text: &str) -> Result<SpecFile, CliError> {
    toml::from_str(text).map_err(|e| CliError::Input(format!("spec file: {e}")))
}

pub fn parse_money(s: &str) -> Result<Money, CliError> {
    s.trim()
        .parse()
        .map_err(|e| CliError::Input(format!("bad amount {s:?}: {e}")))
}

pub fn parse_ext(s: &str) -> Result<ExtMoney, CliError> {
    s.trim()
        .parse()
        .map_err(|e| CliError::Input(format!("bad threshold {s:?}: {e}")))
}

fn parse_bundle(s: &str, items: usize) -> Result<Bundle, CliError> {
    let b = Bundle::parse_bits(s).map_err(|e| CliError::Input(e.to_string()))?;
    if !b.is_subset(Bundle::full(items)) {
        return Err(CliError::Input(format!("bundle {s:?} names an item beyond {items}")));
    }
    Ok(b)
}

/// Comma-separated rational levels, e.g. `0,1/2,1`.
pub fn parse_grid(s: &str) -> Result<Grid, CliError> {
    let levels = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_money)
        .collect::<Result<Vec<_>, _>>()?;
    Grid::new(levels).map_err(|e| CliError::Input(e.to_string()))
}

fn ranking(order: Option<Vec<usize>>, agents: usize) -> Result<Ranking, CliError> {
    match order {
        None => Ok(Ranking::identity(agents)),
        Some(o) => {
            if o.len() != agents {
                return Err(CliError::Input(format!("ranking lists {} agents, expected {agents}", o.len())));
            }
            Ranking::from_order(o).map_err(|e| CliError::Input(e.to_string()))
        }
    }
}

fn tie_break(tie: Option<TieName>) -> TieBreak {
    match tie {
        None | Some(TieName::LowestIndex) => TieBreak::LowestIndex,
    }
}

fn agents_or(agents: Option<usize>, n: Option<usize>) -> Result<usize, CliError> {
    match (agents, n) {
        (Some(a), Some(n)) if a != n => Err(CliError::Input(format!("spec has {a} agents but --n is {n}"))),
        (Some(a), _) | (None, Some(a)) => Ok(a),
        (None, None) => Err(CliError::Input("agent count needed: set `agents` or pass --n".into())),
    }
}

impl SpecFile {
    /// Single-item mechanism; `n` is the `--n` flag, if any.
    pub fn single_item(self, n: Option<usize>) -> Result<AnyMechanism, CliError> {
        let spec_err = |e: spitefree_core::mechanisms::SpecError| CliError::Input(e.to_string());
        let m = match self {
            SpecFile::Threshold {
                thresholds,
                ranking: order,
                boundary_rule,
            } => {
                let ts = thresholds.iter().map(|t| parse_ext(t)).collect::<Result<Vec<_>, _>>()?;
                agents_or(Some(ts.len()), n)?;
                let rule = match boundary_rule {
                    None | Some(BoundaryName::HighestRankAtThreshold) => BoundaryRule::HighestRankAtThreshold,
                    Some(BoundaryName::NoAllocation) => BoundaryRule::NoAllocation,
                };
                let r = ranking(order, ts.len())?;
                AnyMechanism::Threshold(ThresholdSpec::new(r, ts, rule).map_err(spec_err)?)
            }
            SpecFile::Null { agents } => {
                AnyMechanism::Null(NullMechanism::new(agents_or(agents, n)?).map_err(spec_err)?)
            }
            SpecFile::SecondPrice { agents, tie } => {
                let a = agents_or(agents, n)?;
                AnyMechanism::SecondPrice(SecondPrice::new(a, tie_break(tie)).map_err(spec_err)?)
            }
            SpecFile::FirstPrice { agents, tie } => {
                let a = agents_or(agents, n)?;
                AnyMechanism::FirstPrice(FirstPrice::new(a, tie_break(tie)).map_err(spec_err)?)
            }
            SpecFile::Table {
                agents,
                grid,
                outcomes,
            } => {
                agents_or(Some(agents), n)?;
                let grid = Grid::new(grid.iter().map(|g| parse_money(g)).collect::<Result<_, _>>()?)
                    .map_err(|e| CliError::Input(e.to_string()))?;
                let null = NullMechanism::new(agents).map_err(spec_err)?;
                let base = spitefree_core::tabulate(&null, &grid, agents)
                    .map_err(|e| CliError::Input(e.to_string()))?;
                let mut table = base.outcomes().to_vec();
                for row in outcomes {
                    let bids = row.bids.iter().map(|b| parse_money(b)).collect::<Result<Vec<_>, _>>()?;
                    let payments = row.payments.iter().map(|p| parse_money(p)).collect::<Result<Vec<_>, _>>()?;
                    if payments.len() != agents || row.winner.is_some_and(|w| w >= agents) {
                        return Err(CliError::Input(format!("malformed outcome row for bids {:?}", row.bids)));
                    }
                    let idx = base.index_of(&bids).map_err(|e| CliError::Input(e.to_string()))?;
                    table[idx] = Outcome {
                        winner: row.winner,
                        payments,
                    };
                }
                AnyMechanism::Table(
                    MechanismTable::new(grid, agents, table).map_err(|e| CliError::Input(e.to_string()))?,
                )
            }
            other => {
                return Err(CliError::Input(format!(
                    "{} is not a single-item mechanism",
                    other.kind()
                )))
            }
        };
        Ok(m)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SpecFile::Threshold { .. } => "threshold",
            SpecFile::Null { .. } => "null",
            SpecFile::SecondPrice { .. } => "second_price",
            SpecFile::FirstPrice { .. } => "first_price",
            SpecFile::Table { .. } => "table",
            SpecFile::Sequential { .. } => "sequential",
            SpecFile::SequentialGeneral { .. } => "sequential_general",
            SpecFile::Cluster { .. } => "cluster",
            SpecFile::Regions { .. } => "regions",
        }
    }

    pub fn multi(self) -> Result<MultiSetup, CliError> {
        let input = |e: spitefree_core::multiitem::MultiError| CliError::Input(e.to_string());
        match self {
            SpecFile::Sequential {
                thresholds,
                ranking: order,
                items,
                domain,
            } => {
                let spec = sequential_spec(&thresholds, order)?;
                let agents = spec.agents();
                let all = match (domain.integer_max, domain.marginals) {
                    (Some(max), None) => HomogeneousSubmodularValuation::integer_domain(items, max),
                    (None, Some(list)) => list
                        .iter()
                        .map(|m| {
                            let ms = m.iter().map(|x| parse_money(x)).collect::<Result<Vec<_>, _>>()?;
                            if ms.len() != items {
                                return Err(CliError::Input(format!("marginal vector {m:?} needs {items} entries")));
                            }
                            HomogeneousSubmodularValuation::new(ms).map_err(input)
                        })
                        .collect::<Result<_, _>>()?,
                    _ => {
                        return Err(CliError::Input(
                            "domain needs exactly one of `integer_max` or `marginals`".into(),
                        ))
                    }
                };
                let truths = pick(&all, domain.truths, agents)?;
                Ok(MultiSetup::Hs {
                    spec,
                    items,
                    candidates: vec![all; agents],
                    truths,
                })
            }
            SpecFile::SequentialGeneral {
                thresholds,
                ranking: order,
                items,
                domain,
            } => {
                let spec = sequential_spec(&thresholds, order)?;
                let (candidates, truths) = bundle_domain(domain, items, spec.agents())?;
                Ok(MultiSetup::SequentialGeneral {
                    spec,
                    items,
                    candidates,
                    truths,
                })
            }
            SpecFile::Cluster {
                items,
                agents,
                ranking: order,
                tie,
                thresholds,
                agent_thresholds,
                domain,
            } => {
                let rows = match (thresholds, agent_thresholds) {
                    (_, Some(per)) => {
                        if per.len() != agents {
                            return Err(CliError::Input(format!("agent_thresholds lists {} agents", per.len())));
                        }
                        per.iter().map(|m| price_table(m, items, ExtMoney::Infinity)).collect::<Result<Vec<_>, _>>()?
                    }
                    (Some(shared), None) => vec![price_table(&shared, items, ExtMoney::Infinity)?; agents],
                    (None, None) => return Err(CliError::Input("cluster spec needs thresholds".into())),
                };
                let tie = match tie {
                    None | Some(ClusterTieName::PreferLarger) => ClusterTieRule::PreferLarger,
                    Some(ClusterTieName::PreferSmaller) => ClusterTieRule::PreferSmaller,
                    Some(ClusterTieName::LowestMask) => ClusterTieRule::LowestMask,
                };
                let spec = ClusterSpec::new(ranking(order, agents)?, items, rows, tie).map_err(input)?;
                let (candidates, truths) = bundle_domain(domain, items, agents)?;
                Ok(MultiSetup::Cluster {
                    spec,
                    candidates,
                    truths,
                })
            }
            other => Err(CliError::Input(format!("{} is not a multi-item mechanism", other.kind()))),
        }
    }

    /// Bundle prices of a `regions` spec, indexed by mask.
    pub fn region_payments(self) -> Result<(usize, Vec<ExtMoney>), CliError> {
        match self {
            SpecFile::Regions { items, payments } => Ok((items, price_table(&payments, items, ExtMoney::Infinity)?)),
            other => Err(CliError::Input(format!("{} spec has no region payments", other.kind()))),
        }
    }
}

fn sequential_spec(thresholds: &[String], order: Option<Vec<usize>>) -> Result<SequentialSpec, CliError> {
    let ts = thresholds.iter().map(|t| parse_money(t)).collect::<Result<Vec<_>, _>>()?;
    let r = ranking(order, ts.len())?;
    SequentialSpec::new(r, ts).map_err(|e| CliError::Input(e.to_string()))
}

/// Table over all bundles of `items`, `missing` where unlisted; the empty
/// bundle defaults to 0.
fn price_table(
    entries: &BTreeMap<String, String>,
    items: usize,
    missing: ExtMoney,
) -> Result<Vec<ExtMoney>, CliError> {
    if items > spitefree_core::multiitem::MAX_TABLE_ITEMS {
        return Err(CliError::Input(format!("{items} items is too many")));
    }
    let mut out = vec![missing; 1 << items];
    out[0] = ExtMoney::Finite(Money::ZERO);
    for (k, v) in entries {
        out[parse_bundle(k, items)?.bits() as usize] = parse_ext(v)?;
    }
    Ok(out)
}

fn valuation(entries: &BTreeMap<String, String>, items: usize) -> Result<BundleValuation, CliError> {
    let pairs = entries
        .iter()
        .map(|(k, v)| Ok((parse_bundle(k, items)?, parse_money(v)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    BundleValuation::from_entries(items, &pairs).map_err(|e| CliError::Input(e.to_string()))
}

type Domains<B> = (Vec<Vec<B>>, Vec<Vec<B>>);

fn bundle_domain(d: BundleDomain, items: usize, agents: usize) -> Result<Domains<BundleValuation>, CliError> {
    let all = d
        .valuations
        .iter()
        .map(|v| valuation(v, items))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((pick(&all, d.candidates, agents)?, pick(&all, d.truths, agents)?))
}

fn pick<B: Clone>(all: &[B], idx: Option<Vec<Vec<usize>>>, agents: usize) -> Result<Vec<Vec<B>>, CliError> {
    match idx {
        None => Ok(vec![all.to_vec(); agents]),
        Some(rows) => {
            if rows.len() != agents {
                return Err(CliError::Input(format!("domain index lists cover {} agents, expected {agents}", rows.len())));
            }
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|&i| {
                            all.get(i)
                                .cloned()
                                .ok_or_else(|| CliError::Input(format!("domain index {i} out of range")))
                        })
                        .collect()
                })
                .collect()
        }
    }
}
