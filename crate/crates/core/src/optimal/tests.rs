use alloc::vec::Vec;

use num_rational::Ratio;
use proptest::prelude::*;

use super::*;
use crate::money;

fn e(s: &str) -> Exact {
    s.parse().unwrap()
}

type Q = Ratio<i128>;

/// Independent small-rational oracle for `(t_i, γ_i)`, i ≤ 5.
fn oracle(n: usize) -> Vec<(Q, Q)> {
    let half = Q::new(1, 2);
    let one = Q::from_integer(1);
    let mut out: Vec<(Q, Q)> = Vec::new();
    let mut t = half;
    let mut gamma = Q::new(1, 4);
    for i in 1..=n {
        if i > 1 {
            t = (one + t * t) / 2;
            gamma = (one - t) * t + t * gamma;
        }
        out.push((t, gamma));
    }
    out
}

fn q(x: &Exact) -> Q {
    Q::new(
        x.numer().to_string().parse().unwrap(),
        x.denom().to_string().parse().unwrap(),
    )
}

#[test]
fn small_sequences() {
    assert_eq!(optimal_thresholds_uniform(1).values(), &[e("1/2")]);
    assert_eq!(optimal_thresholds_uniform(2).values(), &[e("1/2"), e("5/8")]);
    assert_eq!(
        optimal_thresholds_uniform(3).values(),
        &[e("1/2"), e("5/8"), e("89/128")]
    );
    assert_eq!(expected_revenue_recursive(1), e("1/4"));
    assert_eq!(expected_revenue_recursive(2), e("25/64"));
    let t3 = e("89/128");
    let g3 = &(&t3.one_minus().unwrap() * &t3) + &(&t3 * &e("25/64"));
    assert_eq!(expected_revenue_recursive(3), g3);
}

#[test]
fn matches_rational_oracle() {
    let o = oracle(5);
    let t = optimal_thresholds_uniform(5);
    for (i, (ot, og)) in o.iter().enumerate() {
        assert_eq!(q(t.t(i + 1)), *ot);
        assert_eq!(q(&expected_revenue_recursive(i + 1)), *og);
        assert_eq!(q(&expected_revenue_closed(&t.truncate(i + 1)).unwrap()), *og);
    }
    assert_eq!(o[4].0.denom().trailing_zeros(), 31);
}

#[test]
fn revenue_equals_squared_threshold() {
    // Backward induction: the optimal revenue with n agents is t_n^2.
    let t = optimal_thresholds_uniform(EXACT_CAP);
    for i in 1..=EXACT_CAP {
        let g = revenue_recursive(&t.truncate(i)).unwrap();
        assert_eq!(g, t.t(i) * t.t(i));
    }
}

#[test]
fn closed_form_examples() {
    let t2 = optimal_thresholds_uniform(2);
    assert_eq!(expected_revenue_closed(&t2).unwrap(), e("25/64"));
    let ones = ThresholdSequence::new(alloc::vec![Exact::one(); 4]);
    assert_eq!(expected_revenue_closed(&ones).unwrap(), Exact::zero());
    let half = ThresholdSequence::new(alloc::vec![e("1/2")]);
    assert_eq!(expected_revenue_closed(&half).unwrap(), e("1/4"));
    let bad = ThresholdSequence::new(alloc::vec![e("1/2"), e("3/2")]);
    assert!(matches!(
        expected_revenue_closed(&bad),
        Err(RevenueError::OutOfRange { index: 2, .. })
    ));
    assert_eq!(
        expected_revenue_closed(&ThresholdSequence::new(Vec::new())),
        Err(RevenueError::Empty)
    );
}

#[test]
fn closed_form_equals_recursion_up_to_fifty() {
    let t = optimal_thresholds_uniform(50);
    for n in 1..=50 {
        let s = t.truncate(n);
        assert_eq!(expected_revenue_closed(&s).unwrap(), revenue_recursive(&s).unwrap(), "n={n}");
    }
}

#[test]
fn sequence_shape_and_limits() {
    let t = optimal_thresholds_uniform(100);
    assert_eq!(t.exact_prefix(), EXACT_CAP);
    assert!(!t.is_exact());
    assert!(t.t(1) == &e("1/2"));
    for w in t.values().windows(2) {
        assert!(w[0] < w[1]);
    }
    assert!(t.t(100) < &Exact::one());
    assert!(t.t(50) > &e("95/100"));
    assert_eq!(&t.t(50).to_decimal(4), "0.9641");

    let mut prev = Exact::zero();
    for n in 1..=100 {
        let g = revenue_recursive(&t.truncate(n)).unwrap();
        assert!(g > prev && g < Exact::one());
        prev = g;
    }
    assert!(prev > e("9/10"));
    assert_eq!(&prev.to_decimal(4), "0.9627");
}

#[test]
fn rounding_tail_tracks_exact_values() {
    // The rounded tail stays within 2^-250 of the exact recursion.
    let exact = optimal_thresholds_with(20, 20, 0);
    let rounded = optimal_thresholds_with(20, 8, 256);
    let tol = Exact::dyadic(1u32.into(), 250);
    for i in 1..=20 {
        let (a, b) = (exact.t(i), rounded.t(i));
        let diff = a.checked_sub(b).or_else(|| b.checked_sub(a)).unwrap();
        assert!(diff < tol, "t_{i}");
    }
}

#[test]
fn grid_search_never_beats_recursion() {
    for (n, d) in [(1, 64), (2, 32), (3, 32)] {
        let r = grid_search_thresholds(n, d).unwrap();
        assert!(r.recursion_dominates(), "{r:?}");
    }
    let r = grid_search_thresholds(1, 2).unwrap();
    assert_eq!(r.best_revenue, e("1/4"));
    assert_eq!(r.best_thresholds.values(), &[e("1/2")]);
    assert!(grid_search_thresholds(0, 4).is_err());
}

#[test]
fn monte_carlo_single_agent() {
    let est = monte_carlo_revenue(&optimal_thresholds_uniform(1), 1_000_000, 7);
    assert!((est.mean - 0.25).abs() < 0.005, "{est:?}");
    assert_eq!(est.samples, 1_000_000);
    assert_eq!(est.algorithm, PRNG_ALGORITHM);
}

#[test]
fn monte_carlo_three_agents() {
    let t = optimal_thresholds_uniform(3);
    let exact = expected_revenue_recursive(3).to_f64();
    let est = monte_carlo_revenue(&t, 1_000_000, 11);
    assert!((est.mean - exact).abs() < 0.005, "{est:?} vs {exact}");
}

#[test]
fn monte_carlo_is_deterministic() {
    let t = optimal_thresholds_uniform(3);
    let a = monte_carlo_revenue(&t, 200_000, 42);
    let b = monte_carlo_revenue(&t, 200_000, 42);
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    let c = monte_carlo_revenue(&t, 200_000, 43);
    assert_ne!(a.mean.to_bits(), c.mean.to_bits());

    // Out-of-order batch evaluation, merged in batch order.
    let ts = t.to_f64();
    let nb = batch_count(200_000);
    let mut parts: Vec<(u64, SampleStats)> =
        (0..nb).rev().map(|b| (b, revenue_batch(&ts, 200_000, 42, b))).collect();
    parts.sort_by_key(|p| p.0);
    let merged = merge_batches(parts.into_iter().map(|p| p.1)).estimate(42);
    assert_eq!(merged, a);
}

#[test]
fn monte_carlo_seed_sweep() {
    let t = optimal_thresholds_uniform(2);
    let exact = expected_revenue_recursive(2).to_f64();
    let within = (0..100u64)
        .filter(|&seed| {
            let est = monte_carlo_revenue(&t, 20_000, seed);
            (est.mean - exact).abs() < 4.0 * est.std_error
        })
        .count();
    assert!(within >= 99, "{within}");
}

#[test]
fn efficiency_probe() {
    let eps = money("1/10");
    assert_eq!(allocation_probability_closed(eps, 1), Some(e("1/10")));
    let p50 = allocation_probability_closed(eps, 50).unwrap();
    assert_eq!(&p50.to_decimal(4), "0.9948");
    assert!(allocation_probability_closed(money("0"), 3).is_none());
    assert!(allocation_probability_closed(money("1"), 3).is_none());

    let rows = efficiency_loss_probe(eps, &[1, 2, 5, 10, 50], 200_000, 3).unwrap();
    let mut prev = Exact::zero();
    for r in &rows {
        assert!(r.closed_form > prev);
        prev = r.closed_form.clone();
        assert!((r.estimate.mean - r.closed_form.to_f64()).abs() < 0.005, "{r:?}");
    }
}

proptest! {
    #[test]
    fn closed_form_equals_recursion_on_arbitrary_sequences(
        ks in proptest::collection::vec(0u64..=16, 1..8)
    ) {
        let t = ThresholdSequence::new(ks.iter().map(|&k| Exact::ratio(k, 16).unwrap()).collect());
        let r = revenue_recursive(&t).unwrap();
        prop_assert_eq!(expected_revenue_closed(&t).unwrap(), r.clone());
        prop_assert!(r <= Exact::one());
    }

    #[test]
    fn merge_is_associative(xs in proptest::collection::vec(0u32..4, 0..40), cut1 in 0usize..40, cut2 in 0usize..40) {
        let stats = |s: &[u32]| {
            let mut st = SampleStats::default();
            for &x in s { st.push(x as f64 / 4.0); }
            st
        };
        let (a, b) = (cut1.min(xs.len()), cut2.min(xs.len()));
        let (lo, hi) = (a.min(b), a.max(b));
        let (x, y, z) = (stats(&xs[..lo]), stats(&xs[lo..hi]), stats(&xs[hi..]));
        prop_assert_eq!(x.merge(y).merge(z), x.merge(y.merge(z)));
    }
}
