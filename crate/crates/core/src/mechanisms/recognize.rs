//! Recognition of threshold form in tabulated mechanisms.

use alloc::vec::Vec;

use crate::mechanism::{MechanismTable, Outcome};
use crate::money::{ExtMoney, Money};
use crate::ranking::Ranking;

use super::threshold::{BoundaryRule, ThresholdSpec};

/// How a profile relates to a threshold vector.
enum Region {
    /// Some bid strictly exceeds its threshold: the outcome is forced.
    Forced,
    /// Every bid is strictly below its threshold.
    Below,
    /// No bid exceeds, at least one sits exactly on its threshold.
    Boundary,
}

fn region(thresholds: &[ExtMoney], bids: &[Money]) -> Region {
    let mut boundary = false;
    for (t, b) in thresholds.iter().zip(bids) {
        let b = ExtMoney::Finite(*b);
        if *t < b {
            return Region::Forced;
        }
        if *t == b {
            boundary = true;
        }
    }
    if boundary {
        Region::Boundary
    } else {
        Region::Below
    }
}

/// Whether `table` is a tabulation of `spec` for some choice of the
/// boundary allocation. On profiles where nobody strictly exceeds her
/// threshold but somebody meets it exactly, any agent meeting her threshold
/// (paying it) or no sale is accepted.
pub fn matches_threshold_form(spec: &ThresholdSpec, table: &MechanismTable) -> bool {
    let t = spec.thresholds();
    if t.len() != table.space().agents() {
        return false;
    }
    (0..table.space().size()).all(|idx| {
        let bids = table.profile(idx);
        let got = table.outcome(idx);
        match region(t, &bids) {
            Region::Forced | Region::Below => *got == spec.outcome(&bids),
            Region::Boundary => match got.winner {
                None => *got == Outcome::unallocated(bids.len()),
                Some(j) => {
                    t[j] == ExtMoney::Finite(bids[j]) && *got == Outcome::sale(bids.len(), j, bids[j])
                }
            },
        }
    })
}

/// Recovers a threshold description of `table`, or `None` if none exists.
///
/// Thresholds are read off the winners' payments, which must be constant
/// per agent; agents that never win get an infinite threshold. The ranking is
/// built greedily: the next agent placed must win every profile in which she
/// meets her threshold, every already-placed agent is strictly below hers,
/// and someone strictly exceeds a threshold.
pub fn recognize_threshold_form(table: &MechanismTable) -> Option<ThresholdSpec> {
    let n = table.space().agents();
    let size = table.space().size();

    let mut thresholds: Vec<Option<Money>> = alloc::vec![None; n];
    for o in table.outcomes() {
        if let Some(w) = o.winner {
            let p = o.payments[w];
            match thresholds[w] {
                None => thresholds[w] = Some(p),
                Some(prev) if prev != p => return None,
                _ => {}
            }
        }
    }
    let thresholds: Vec<ExtMoney> = thresholds
        .into_iter()
        .map(|t| t.map_or(ExtMoney::Infinity, ExtMoney::Finite))
        .collect();

    let profiles: Vec<Vec<Money>> = (0..size).map(|i| table.profile(i)).collect();
    let meets = |agent: usize, bids: &[Money]| thresholds[agent] <= ExtMoney::Finite(bids[agent]);

    let mut remaining: Vec<usize> = (0..n).filter(|&i| !thresholds[i].is_infinite()).collect();
    let mut order: Vec<usize> = Vec::with_capacity(n);
    while !remaining.is_empty() {
        let pick = remaining.iter().position(|&a| {
            profiles.iter().enumerate().all(|(idx, bids)| {
                let relevant = meets(a, bids)
                    && order.iter().all(|&k| !meets(k, bids))
                    && matches!(region(&thresholds, bids), Region::Forced);
                !relevant || table.outcome(idx).winner == Some(a)
            })
        })?;
        order.push(remaining.remove(pick));
    }
    order.extend((0..n).filter(|&i| thresholds[i].is_infinite()));

    let ranking = Ranking::from_order(order).expect("order covers every agent once");
    let spec = ThresholdSpec::new(ranking, thresholds, BoundaryRule::HighestRankAtThreshold)
        .expect("lengths agree");
    if !matches_threshold_form(&spec, table) {
        return None;
    }
    let exact = |s: &ThresholdSpec| (0..size).all(|i| *table.outcome(i) == s.outcome(&profiles[i]));
    if exact(&spec) {
        return Some(spec);
    }
    let alt = spec.clone().with_boundary_rule(BoundaryRule::NoAllocation);
    if exact(&alt) {
        return Some(alt);
    }
    Some(spec)
}
