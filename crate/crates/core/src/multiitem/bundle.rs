use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::money::{Money, Utility};

/// Largest item count for which full bundle tables are stored.
pub const MAX_TABLE_ITEMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultiError {
    #[error("expected {expected} items, got {got}")]
    ItemCountMismatch { expected: usize, got: usize },
    #[error("expected {expected} agents, got {got}")]
    AgentCountMismatch { expected: usize, got: usize },
    #[error("{0} items exceed the supported maximum")]
    TooManyItems(usize),
    #[error("valuation table needs {expected} entries, got {got}")]
    TableSize { expected: usize, got: usize },
    #[error("the empty bundle must be worth 0")]
    NonzeroEmptyValue,
    #[error("marginals must be nonincreasing, but entry {0} exceeds its predecessor")]
    IncreasingMarginal(usize),
    #[error("candidate domain for agent {0} is empty")]
    EmptyDomain(usize),
    #[error("the empty bundle has threshold 0, got {0}")]
    NonzeroEmptyThreshold(Money),
    #[error("malformed bundle {0:?}")]
    MalformedBundle(String),
    #[error("{0} is not checked on multi-item mechanisms")]
    UnsupportedProperty(&'static str),
}

/// Set of items `a_1..a_K`, bit `k` standing for `a_{k+1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bundle(pub u64);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub fn full(items: usize) -> Bundle {
        if items >= 64 {
            Bundle(u64::MAX)
        } else {
            Bundle((1u64 << items) - 1)
        }
    }

    /// The bundle holding only item `k` (0-based).
    pub fn singleton(k: usize) -> Bundle {
        Bundle(1 << k)
    }

    /// Items `0..count` shifted to start at `first`.
    pub fn range(first: usize, count: usize) -> Bundle {
        Bundle(Bundle::full(count).0 << first)
    }

    pub fn bits(&self) -> u64 {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0 >> k & 1 == 1
    }

    pub fn with(&self, k: usize) -> Bundle {
        Bundle(self.0 | 1 << k)
    }

    pub fn union(&self, other: Bundle) -> Bundle {
        Bundle(self.0 | other.0)
    }

    pub fn minus(&self, other: Bundle) -> Bundle {
        Bundle(self.0 & !other.0)
    }

    pub fn is_disjoint(&self, other: Bundle) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(&self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn items(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(move |&k| self.contains(k))
    }

    /// Every subset of `self`, in increasing mask order.
    pub fn subsets(&self) -> Vec<Bundle> {
        let mut out = Vec::with_capacity(1 << self.len());
        let mut s = 0u64;
        loop {
            out.push(Bundle(s));
            if s == self.0 {
                break;
            }
            s = (s.wrapping_sub(self.0)) & self.0;
        }
        out
    }

    /// Every bundle over `items` items, in mask order.
    pub fn all(items: usize) -> impl Iterator<Item = Bundle> {
        (0..1u64 << items).map(Bundle)
    }

    /// Parses a bit string whose rightmost character is `a_1`.
    pub fn parse_bits(s: &str) -> Result<Bundle, MultiError> {
        let t = s.trim();
        if t.is_empty() || t.len() > 64 {
            return Err(MultiError::MalformedBundle(t.into()));
        }
        let mut bits = 0u64;
        for c in t.chars() {
            bits <<= 1;
            match c {
                '0' => {}
                '1' => bits |= 1,
                _ => return Err(MultiError::MalformedBundle(t.into())),
            }
        }
        Ok(Bundle(bits))
    }

    /// Bit string over `items` items, rightmost character `a_1`.
    pub fn to_bits(&self, items: usize) -> String {
        (0..items)
            .rev()
            .map(|k| if self.contains(k) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, k) in self.items().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "a{}", k + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Anything that prices bundles, used both as a bid and as a true valuation.
pub trait Valuation {
    fn items(&self) -> usize;
    fn value(&self, bundle: Bundle) -> Money;

    /// `v(held ∪ {k}) - v(held)`.
    fn marginal(&self, held: Bundle, k: usize) -> Utility {
        self.value(held.with(k)).utility() - self.value(held).utility()
    }
}

/// A total map from bundles to values with `v(∅) = 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BundleValuation {
    items: usize,
    values: Vec<Money>,
}

impl BundleValuation {
    pub fn new(items: usize, values: Vec<Money>) -> Result<Self, MultiError> {
        if items > MAX_TABLE_ITEMS {
            return Err(MultiError::TooManyItems(items));
        }
        let expected = 1usize << items;
        if values.len() != expected {
            return Err(MultiError::TableSize {
                expected,
                got: values.len(),
            });
        }
        if !values[0].is_zero() {
            return Err(MultiError::NonzeroEmptyValue);
        }
        Ok(BundleValuation { items, values })
    }

    /// Lists only nonzero entries; unlisted bundles are worth 0.
    pub fn from_entries(
        items: usize,
        entries: &[(Bundle, Money)],
    ) -> Result<Self, MultiError> {
        if items > MAX_TABLE_ITEMS {
            return Err(MultiError::TooManyItems(items));
        }
        let mut values = alloc::vec![Money::ZERO; 1 << items];
        for (b, v) in entries {
            if !b.is_subset(Bundle::full(items)) {
                return Err(MultiError::MalformedBundle(alloc::format!("{b}")));
            }
            values[b.0 as usize] = *v;
        }
        BundleValuation::new(items, values)
    }

    /// `v(T) = Σ_{k ∈ T} x_k`.
    pub fn additive(xs: &[Money]) -> Result<Self, MultiError> {
        let items = xs.len();
        if items > MAX_TABLE_ITEMS {
            return Err(MultiError::TooManyItems(items));
        }
        let values = Bundle::all(items)
            .map(|b| b.items().map(|k| xs[k]).sum())
            .collect();
        BundleValuation::new(items, values)
    }

    pub fn values(&self) -> &[Money] {
        &self.values
    }
}

impl Valuation for BundleValuation {
    fn items(&self) -> usize {
        self.items
    }

    fn value(&self, bundle: Bundle) -> Money {
        self.values[bundle.0 as usize]
    }
}

impl fmt::Debug for BundleValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for b in Bundle::all(self.items).skip(1) {
            m.entry(&b, &self.value(b));
        }
        m.finish()
    }
}

/// Bundle value depends on size only, with nonincreasing marginals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HomogeneousSubmodularValuation {
    marginals: Vec<Money>,
}

impl HomogeneousSubmodularValuation {
    /// `marginals[q-1] = Δ(q)`; the item count is `marginals.len()`.
    pub fn new(marginals: Vec<Money>) -> Result<Self, MultiError> {
        if let Some(i) = (1..marginals.len()).find(|&i| marginals[i] > marginals[i - 1]) {
            return Err(MultiError::IncreasingMarginal(i + 1));
        }
        Ok(HomogeneousSubmodularValuation { marginals })
    }

    pub fn marginals(&self) -> &[Money] {
        &self.marginals
    }

    /// `Δ(q)`, 1-based.
    pub fn delta(&self, q: usize) -> Money {
        self.marginals[q - 1]
    }

    /// `v(q) = Σ_{ℓ ≤ q} Δ(ℓ)`.
    pub fn value_of_count(&self, q: usize) -> Money {
        self.marginals[..q.min(self.marginals.len())].iter().copied().sum()
    }

    pub fn to_bundle_valuation(&self) -> BundleValuation {
        let values = Bundle::all(self.marginals.len())
            .map(|b| self.value_of_count(b.len()))
            .collect();
        BundleValuation::new(self.marginals.len(), values).expect("well-formed table")
    }

    /// Every nonincreasing vector of `items` integer marginals in `[0, max]`,
    /// in lexicographic order.
    pub fn integer_domain(items: usize, max: u64) -> Vec<HomogeneousSubmodularValuation> {
        fn rec(
            items: usize,
            cap: u64,
            prefix: &mut Vec<Money>,
            out: &mut Vec<HomogeneousSubmodularValuation>,
        ) {
            if prefix.len() == items {
                out.push(HomogeneousSubmodularValuation {
                    marginals: prefix.clone(),
                });
                return;
            }
            for v in 0..=cap {
                prefix.push(Money::from_integer(v));
                rec(items, v, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(items, max, &mut Vec::with_capacity(items), &mut out);
        out
    }
}

impl Valuation for HomogeneousSubmodularValuation {
    fn items(&self) -> usize {
        self.marginals.len()
    }

    fn value(&self, bundle: Bundle) -> Money {
        self.value_of_count(bundle.len())
    }
}

impl fmt::Debug for HomogeneousSubmodularValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Δ{:?}", self.marginals)
    }
}

/// Bundles (one per agent) and payments.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiOutcome {
    pub bundles: Vec<Bundle>,
    pub payments: Vec<Money>,
}

impl MultiOutcome {
    pub fn empty(agents: usize) -> Self {
        MultiOutcome {
            bundles: alloc::vec![Bundle::EMPTY; agents],
            payments: alloc::vec![Money::ZERO; agents],
        }
    }

    pub fn agents(&self) -> usize {
        self.bundles.len()
    }

    /// Pairwise-disjoint bundles inside `a_1..a_K`.
    pub fn is_feasible(&self, items: usize) -> bool {
        let full = Bundle::full(items);
        let mut seen = Bundle::EMPTY;
        for b in &self.bundles {
            if !b.is_subset(full) || !b.is_disjoint(seen) {
                return false;
            }
            seen = seen.union(*b);
        }
        true
    }

    pub fn utilities<V: Valuation>(&self, values: &[V]) -> Vec<Utility> {
        self.bundles
            .iter()
            .zip(&self.payments)
            .zip(values)
            .map(|((b, p), v)| v.value(*b).utility() - p.utility())
            .collect()
    }
}

impl fmt::Debug for MultiOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bundles={:?} payments={:?}", self.bundles, self.payments)
    }
}
