use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::money::{money, ExtMoney, Money, Utility};
use crate::ranking::Ranking;
use crate::verifier::Property;

fn bv(items: usize, entries: &[(u64, &str)]) -> BundleValuation {
    let entries: Vec<_> = entries.iter().map(|(m, v)| (Bundle(*m), money(v))).collect();
    BundleValuation::from_entries(items, &entries).unwrap()
}

fn u(s: &str) -> Utility {
    money(s).utility()
}

fn fin(s: &str) -> ExtMoney {
    ExtMoney::Finite(money(s))
}

fn seq_hs(ts: &[&str], items: usize) -> SequentialHs {
    SequentialHs {
        spec: SequentialSpec::with_thresholds(ts.iter().map(|t| money(t)).collect()),
        items,
    }
}

#[test]
fn sequential_rewards_overstating_a_complement() {
    let spec = SequentialSpec::with_thresholds(vec![money("1")]);
    let v = bv(2, &[(0b11, "5/2")]);
    let truthful = sequential_allocate_general(&spec, std::slice::from_ref(&v)).unwrap();
    assert_eq!(truthful.bundles, vec![Bundle::EMPTY]);
    assert_eq!(truthful.utilities(std::slice::from_ref(&v)), vec![u("0")]);

    let lie = bv(2, &[(0b01, "3/2"), (0b11, "5/2")]);
    let moved = sequential_allocate_general(&spec, std::slice::from_ref(&lie)).unwrap();
    assert_eq!(moved.bundles, vec![Bundle(0b11)]);
    assert_eq!(moved.payments, vec![money("2")]);
    assert_eq!(moved.utilities(std::slice::from_ref(&v)), vec![u("1/2")]);

    let mech = SequentialGeneral { spec, items: 2 };
    let report = check_multi_ic(&mech, &[vec![v.clone(), lie]], &[vec![v]]).unwrap();
    assert!(!report.passed());
    let w = report.witness.unwrap();
    assert!(w.replay(Property::Ic, &mech).unwrap());
}

#[test]
fn sequential_rewards_hiding_an_earlier_item() {
    let spec = SequentialSpec::with_thresholds(vec![money("1")]);
    let v = bv(2, &[(0b01, "1"), (0b10, "3/2")]);
    let truthful = sequential_allocate_general(&spec, std::slice::from_ref(&v)).unwrap();
    assert_eq!(truthful.bundles, vec![Bundle(0b01)]);
    assert_eq!(truthful.utilities(std::slice::from_ref(&v)), vec![u("0")]);

    let lie = bv(2, &[(0b10, "3/2")]);
    let moved = sequential_allocate_general(&spec, &[lie]).unwrap();
    assert_eq!(moved.bundles, vec![Bundle(0b10)]);
    assert_eq!(moved.utilities(&[v]), vec![u("1/2")]);
}

fn swap_fixture() -> (ClusterSpec, BundleValuation, BundleValuation, BundleValuation) {
    let ts = vec![fin("0"), fin("1"), fin("1"), fin("2")];
    let spec = ClusterSpec::uniform(2, 2, ts, ClusterTieRule::PreferLarger).unwrap();
    let v1 = bv(2, &[(0b01, "1"), (0b10, "1")]);
    let v2 = bv(2, &[(0b01, "1"), (0b10, "3/2")]);
    let spite = bv(2, &[(0b10, "1")]);
    (spec, v1, v2, spite)
}

#[test]
fn cluster_swap_is_spiteful() {
    let (spec, v1, v2, spite) = swap_fixture();
    let values = [v1.clone(), v2.clone()];
    let truthful = cluster_allocate(&spec, &values).unwrap();
    assert_eq!(truthful.bundles, vec![Bundle(0b01), Bundle(0b10)]);
    assert_eq!(truthful.utilities(&values), vec![u("0"), u("1/2")]);

    let moved = cluster_allocate(&spec, &[spite.clone(), v2.clone()]).unwrap();
    assert_eq!(moved.bundles, vec![Bundle(0b10), Bundle(0b01)]);
    assert_eq!(moved.utilities(&values), vec![u("0"), u("0")]);

    let candidates = [vec![v1.clone(), spite.clone()], vec![v2.clone()]];
    let truths = [vec![v1.clone()], vec![v2.clone()]];
    assert!(check_multi_ic(&spec, &candidates, &truths).unwrap().passed());
    let report = check_multi_sic(&spec, &candidates, &truths).unwrap();
    assert!(!report.passed());
    let w = report.witness.unwrap();
    assert_eq!((w.agent, w.deviation.clone()), (0, Some(spite)));
    assert_eq!(w.after, vec![u("0"), u("0")]);
    assert!(w.replay(Property::Sic, &spec).unwrap());
    assert!(!w.replay(Property::Ic, &spec).unwrap());
}

#[test]
fn sequential_hs_is_spite_free_on_integer_domain() {
    let mech = seq_hs(&["2", "1"], 3);
    let domain = HomogeneousSubmodularValuation::integer_domain(3, 3);
    assert_eq!(domain.len(), 20);
    let sets = shared_domain(2, &domain);
    for p in [Property::Ir, Property::Ic, Property::Sic] {
        let r = check_multi(p, &mech, &sets, &sets).unwrap();
        assert!(r.passed(), "{p:?}: {:?}", r.witness);
    }
    let ic = check_multi_ic(&mech, &sets, &sets).unwrap();
    assert_eq!(ic.checked, 20 * 20 * 2 * 19);
    assert_eq!(check_multi_ir(&mech, &sets, &sets).unwrap().checked, 400);
}

#[test]
fn sequential_routes_agree_on_homogeneous_bids() {
    let domain = HomogeneousSubmodularValuation::integer_domain(3, 3);
    for ranking in Ranking::all(2) {
        let spec = SequentialSpec::new(ranking, vec![money("2"), money("1")]).unwrap();
        for a in &domain {
            for b in &domain {
                let hs = sequential_allocate_hs(&spec, &[a.clone(), b.clone()]).unwrap();
                let general = sequential_allocate_general(
                    &spec,
                    &[a.to_bundle_valuation(), b.to_bundle_valuation()],
                )
                .unwrap();
                assert_eq!(hs, general, "{a:?} {b:?}");
                assert!(hs.is_feasible(3));
            }
        }
    }
}

#[test]
fn payment_ranges_stay_within_bound() {
    let mech = seq_hs(&["2", "1"], 2);
    let domain = HomogeneousSubmodularValuation::integer_domain(2, 3);
    assert_eq!(domain.len(), 10);
    for agent in 0..2 {
        let ranges = payment_ranges(&mech, agent, &domain, &domain).unwrap();
        assert_eq!(ranges.len(), 4);
        for r in &ranges {
            assert!(r.within_bound(), "{r:?}");
        }
        let bounds: Vec<u64> = ranges.iter().map(|r| r.bound).collect();
        assert_eq!(bounds, vec![4, 2, 2, 1]);
    }
    // Per-item prices make every payment a function of the bundle alone.
    // The first-ranked agent takes items by index, so never a2 without a1.
    let cards = |agent| -> Vec<usize> {
        payment_ranges(&mech, agent, &domain, &domain)
            .unwrap()
            .iter()
            .map(|r| r.cardinality)
            .collect()
    };
    assert_eq!(cards(0), vec![1, 1, 0, 1]);
    assert_eq!(cards(1), vec![1, 1, 1, 1]);
}

/// One item; the higher bid wins (ties to agent 0) and pays the other bid.
struct SecondPrice;

/// One item; agent 0 wins at any positive bid and pays it.
struct PayOwnBid;

fn one_item(v: &str) -> BundleValuation {
    bv(1, &[(1, v)])
}

impl MultiMechanism for SecondPrice {
    type Bid = BundleValuation;
    fn agents(&self) -> usize {
        2
    }
    fn items(&self) -> usize {
        1
    }
    fn allocate(&self, bids: &[BundleValuation]) -> Result<MultiOutcome, MultiError> {
        let (a, b) = (bids[0].value(Bundle(1)), bids[1].value(Bundle(1)));
        let mut o = MultiOutcome::empty(2);
        let w = usize::from(b > a);
        o.bundles[w] = Bundle(1);
        o.payments[w] = if w == 0 { b } else { a };
        Ok(o)
    }
}

impl MultiMechanism for PayOwnBid {
    type Bid = BundleValuation;
    fn agents(&self) -> usize {
        2
    }
    fn items(&self) -> usize {
        1
    }
    fn allocate(&self, bids: &[BundleValuation]) -> Result<MultiOutcome, MultiError> {
        let mut o = MultiOutcome::empty(2);
        let a = bids[0].value(Bundle(1));
        if !a.is_zero() {
            o.bundles[0] = Bundle(1);
            o.payments[0] = a;
        }
        Ok(o)
    }
}

#[test]
fn broken_fixtures_are_caught() {
    let domain: Vec<_> = ["0", "1", "2", "3"].iter().map(|v| one_item(v)).collect();
    let ranges = payment_ranges(&SecondPrice, 0, &domain, &domain).unwrap();
    assert_eq!(ranges[1].bundle, Bundle(1));
    assert_eq!((ranges[1].cardinality, ranges[1].bound), (4, 1));
    assert!(!ranges[1].within_bound());
    let sets = shared_domain(2, &domain);
    assert!(!check_multi_sic(&SecondPrice, &sets, &sets).unwrap().passed());

    match payment_range_cardinality(&PayOwnBid, 0, Bundle(1), &domain, &domain) {
        Err(PaymentRangeError::DependsOnOwnBid(d)) => {
            assert_eq!(d.bundle, Bundle(1));
            assert_ne!(d.first_payment, d.second_payment);
        }
        other => panic!("expected own-bid dependence, got {other:?}"),
    }
    assert!(matches!(
        payment_range_cardinality(&seq_hs(&["1"], 1), 0, Bundle(1), &[], &[]),
        Err(PaymentRangeError::NotTwoAgents(1))
    ));
}

#[test]
fn check_rejects_bad_domains() {
    let mech = seq_hs(&["1", "1"], 1);
    let d = HomogeneousSubmodularValuation::integer_domain(1, 1);
    let empty = vec![d.clone(), vec![]];
    assert_eq!(
        check_multi_ic(&mech, &empty, &shared_domain(2, &d)).unwrap_err(),
        MultiError::EmptyDomain(1)
    );
    assert!(matches!(
        check_multi_ic(&mech, std::slice::from_ref(&d), std::slice::from_ref(&d)),
        Err(MultiError::AgentCountMismatch { .. })
    ));
    assert!(matches!(
        check_multi(Property::Anon, &mech, &shared_domain(2, &d), &shared_domain(2, &d)),
        Err(MultiError::UnsupportedProperty(_))
    ));
}

fn worked_system() -> RegionSystem {
    region_partition(2, &[fin("0"), fin("4"), fin("3"), fin("6")]).unwrap()
}

fn rendered(system: &RegionSystem, mask: u64) -> Vec<alloc::string::String> {
    system
        .region(Bundle(mask))
        .inequalities
        .iter()
        .map(|q| alloc::format!("{q}"))
        .collect()
}

#[test]
fn worked_region_example() {
    let s = worked_system();
    assert_eq!(rendered(&s, 0b01), vec!["x1 > 4", "x1 - x2 > 1", "x2 < 2"]);
    assert_eq!(rendered(&s, 0b10), vec!["x2 > 3", "-x1 + x2 > -1", "x1 < 3"]);
    assert_eq!(rendered(&s, 0b11), vec!["x1 + x2 > 6", "x2 > 2", "x1 > 3"]);
    assert_eq!(rendered(&s, 0b00), vec!["x1 < 4", "x2 < 3", "x1 + x2 < 6"]);

    let at = |x: &str, y: &str| s.classify_point(&[money(x), money(y)]);
    assert_eq!(at("5", "1"), vec![Bundle(0b01)]);
    assert_eq!(at("2", "4"), vec![Bundle(0b10)]);
    assert_eq!(at("5", "5"), vec![Bundle(0b11)]);
    assert_eq!(at("1", "1"), vec![Bundle::EMPTY]);
    assert_eq!(at("4", "2"), vec![Bundle(0b00), Bundle(0b01), Bundle(0b11)]);
    assert_eq!(s.interior_of(&[money("4"), money("2")]), None);
    assert_eq!(s.interior_of(&[money("5"), money("1")]), Some(Bundle(0b01)));
}

/// Utility-maximizing bundles at `point`, by direct comparison.
fn argmax_bundles(items: usize, payments: &[ExtMoney], point: &[Money]) -> Vec<Bundle> {
    let utils: Vec<(Bundle, Utility)> = Bundle::all(items)
        .filter_map(|t| {
            let p = payments[t.0 as usize].finite()?;
            let v: Money = t.items().map(|k| point[k]).sum();
            Some((t, v.utility() - p.utility()))
        })
        .collect();
    let best = utils.iter().map(|(_, u)| *u).max().unwrap();
    utils.into_iter().filter(|(_, u)| *u == best).map(|(t, _)| t).collect()
}

#[test]
fn lattice_matches_direct_argmax() {
    let payments = [fin("0"), fin("4"), fin("3"), fin("6")];
    let s = region_partition(2, &payments).unwrap();
    let lattice = classify_lattice(&s, money("0"), money("8"), money("1/4"));
    assert_eq!(lattice.len(), 33 * 33);
    for (p, c) in &lattice {
        let expected = argmax_bundles(2, &payments, p);
        assert_eq!(c, &expected, "{p:?}");
        assert_eq!(s.interior_of(p).is_some(), expected.len() == 1, "{p:?}");
    }
}

#[test]
fn infinite_prices_and_one_item() {
    let s = region_partition(2, &[fin("0"), fin("1"), ExtMoney::Infinity, fin("3")]).unwrap();
    assert!(!s.region(Bundle(0b10)).attainable);
    assert_eq!(s.region(Bundle(0b01)).inequalities.len(), 2);
    assert!(s.classify_point(&[money("0"), money("9")]).iter().all(|b| *b != Bundle(0b10)));

    let one = region_partition(1, &[fin("0"), fin("2")]).unwrap();
    assert_eq!(rendered(&one, 1), vec!["x1 > 2"]);
    assert_eq!(rendered(&one, 0), vec!["x1 < 2"]);
    assert_eq!(one.classify_point(&[money("2")]), vec![Bundle(0), Bundle(1)]);

    assert!(matches!(region_partition(1, &[fin("1"), fin("2")]), Err(MultiError::NonzeroEmptyThreshold(_))));
    assert!(matches!(region_partition(2, &[fin("0")]), Err(MultiError::TableSize { .. })));
}

fn arb_hsv(items: usize) -> impl Strategy<Value = HomogeneousSubmodularValuation> {
    proptest::collection::vec(0u64..6, items).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        HomogeneousSubmodularValuation::new(v.into_iter().map(Money::from_integer).collect()).unwrap()
    })
}

proptest! {
    #[test]
    fn quantities_grow_with_supply(
        bids in proptest::collection::vec(arb_hsv(4), 3),
        ts in proptest::collection::vec(1u64..5, 3),
        supply in 0usize..4,
    ) {
        let spec = SequentialSpec::with_thresholds(ts.into_iter().map(Money::from_integer).collect());
        let lo = sequential_quantities(&spec, &bids, supply, 0);
        let hi = sequential_quantities(&spec, &bids, supply + 1, 0);
        prop_assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b));
        prop_assert!(hi.iter().sum::<usize>() <= supply + 1);
        let o = sequential_allocate_hs(&spec, &bids).unwrap();
        prop_assert!(o.is_feasible(4));
        for (i, b) in o.bundles.iter().enumerate() {
            prop_assert_eq!(o.payments[i], spec.thresholds[i].times(b.len()));
        }
    }

    #[test]
    fn cluster_is_feasible_and_rational(
        vals in proptest::collection::vec(proptest::collection::vec(0u64..6, 8), 2),
        ts in proptest::collection::vec(0u64..6, 7),
    ) {
        let mut row = vec![ExtMoney::Finite(Money::ZERO)];
        row.extend(ts.iter().map(|t| if *t == 5 { ExtMoney::Infinity } else { ExtMoney::Finite(Money::from_integer(*t)) }));
        let spec = ClusterSpec::uniform(2, 3, row, ClusterTieRule::PreferLarger).unwrap();
        let bids: Vec<_> = vals.iter().map(|v| {
            let mut v: Vec<Money> = v.iter().map(|x| Money::from_integer(*x)).collect();
            v[0] = Money::ZERO;
            BundleValuation::new(3, v).unwrap()
        }).collect();
        let o = spec.allocate_checked(&bids).unwrap();
        prop_assert!(o.utilities(&bids).iter().all(|u| *u >= Utility::from_integer(0)));
    }

    #[test]
    fn regions_agree_with_argmax(
        ps in proptest::collection::vec(0u64..8, 3),
        pt in proptest::collection::vec(0u64..16, 2),
    ) {
        let mut payments = vec![ExtMoney::Finite(Money::ZERO)];
        payments.extend(ps.iter().map(|p| ExtMoney::Finite(Money::from_integer(*p))));
        let s = region_partition(2, &payments).unwrap();
        let point: Vec<Money> = pt.iter().map(|x| Money::new(*x as i128, 2).unwrap()).collect();
        prop_assert_eq!(s.classify_point(&point), argmax_bundles(2, &payments, &point));
    }
}
