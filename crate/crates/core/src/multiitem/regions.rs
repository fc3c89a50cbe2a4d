//! Bundle-choice regions for additive own valuations at fixed bundle prices.

use alloc::vec::Vec;
use core::fmt;

use crate::money::{ExtMoney, Money, Utility};

use super::bundle::{Bundle, MultiError};

/// `Σ_k coeffs[k] x_k > rhs`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrictInequality {
    pub coeffs: Vec<i32>,
    pub rhs: Utility,
}

impl StrictInequality {
    pub fn lhs(&self, point: &[Money]) -> Utility {
        self.coeffs
            .iter()
            .zip(point)
            .map(|(c, x)| x.utility() * Utility::from_integer(*c as i128))
            .sum()
    }

    pub fn holds_strictly(&self, point: &[Money]) -> bool {
        self.lhs(point) > self.rhs
    }

    pub fn holds_weakly(&self, point: &[Money]) -> bool {
        self.lhs(point) >= self.rhs
    }
}

/// Renders like `x1 - x2 > 1`; all-nonpositive left sides are negated into `<`.
impl fmt::Display for StrictInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flip = self.coeffs.iter().all(|c| *c <= 0);
        let sign = if flip { -1 } else { 1 };
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            let c = c * sign;
            if c == 0 {
                continue;
            }
            let name = alloc::format!("x{}", k + 1);
            let mag = c.unsigned_abs();
            let term = if mag == 1 { name } else { alloc::format!("{mag}{name}") };
            match (first, c < 0) {
                (true, true) => write!(f, "-{term}")?,
                (true, false) => write!(f, "{term}")?,
                (false, true) => write!(f, " - {term}")?,
                (false, false) => write!(f, " + {term}")?,
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        let rhs = if flip { -self.rhs } else { self.rhs };
        write!(f, " {} {}", if flip { "<" } else { ">" }, rhs)
    }
}

impl fmt::Debug for StrictInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Valuations under which `bundle` is the unique utility maximizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub bundle: Bundle,
    /// False when the bundle's price is infinite; the region is then empty.
    pub attainable: bool,
    pub inequalities: Vec<StrictInequality>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionSystem {
    pub items: usize,
    /// `payments[T.bits()]`; the empty bundle costs 0.
    pub payments: Vec<ExtMoney>,
    pub regions: Vec<Region>,
}

/// For each bundle `T` with finite price, the system
/// `Σ_{T∖S} x − Σ_{S∖T} x > P^T − P^S` over every other finite-priced `S`.
pub fn region_partition(items: usize, payments: &[ExtMoney]) -> Result<RegionSystem, MultiError> {
    if items > super::bundle::MAX_TABLE_ITEMS {
        return Err(MultiError::TooManyItems(items));
    }
    if payments.len() != 1 << items {
        return Err(MultiError::TableSize {
            expected: 1 << items,
            got: payments.len(),
        });
    }
    if payments[0] != ExtMoney::Finite(Money::ZERO) {
        return Err(MultiError::NonzeroEmptyThreshold(payments[0].finite().unwrap_or(Money::ZERO)));
    }
    let regions = Bundle::all(items)
        .map(|t| {
            let Some(pt) = payments[t.0 as usize].finite() else {
                return Region {
                    bundle: t,
                    attainable: false,
                    inequalities: Vec::new(),
                };
            };
            let inequalities = Bundle::all(items)
                .filter(|s| *s != t)
                .filter_map(|s| {
                    let ps = payments[s.0 as usize].finite()?;
                    let coeffs = (0..items)
                        .map(|k| t.contains(k) as i32 - s.contains(k) as i32)
                        .collect();
                    Some(StrictInequality {
                        coeffs,
                        rhs: pt.utility() - ps.utility(),
                    })
                })
                .collect();
            Region {
                bundle: t,
                attainable: true,
                inequalities,
            }
        })
        .collect();
    Ok(RegionSystem {
        items,
        payments: payments.to_vec(),
        regions,
    })
}

impl RegionSystem {
    pub fn region(&self, bundle: Bundle) -> &Region {
        &self.regions[bundle.0 as usize]
    }

    /// Bundles maximizing utility at `point`: those whose system holds with
    /// every strict inequality relaxed. A single bundle in a region's
    /// interior, several on shared boundaries.
    pub fn classify_point(&self, point: &[Money]) -> Vec<Bundle> {
        assert_eq!(point.len(), self.items, "point dimension");
        self.regions
            .iter()
            .filter(|r| r.attainable && r.inequalities.iter().all(|q| q.holds_weakly(point)))
            .map(|r| r.bundle)
            .collect()
    }

    /// The bundle whose region contains `point` in its interior, if any.
    pub fn interior_of(&self, point: &[Money]) -> Option<Bundle> {
        self.regions
            .iter()
            .find(|r| r.attainable && r.inequalities.iter().all(|q| q.holds_strictly(point)))
            .map(|r| r.bundle)
    }
}

pub fn classify_point(system: &RegionSystem, point: &[Money]) -> Vec<Bundle> {
    system.classify_point(point)
}

/// Lattice `{lo, lo + step, ..., hi}^2` classified point by point.
pub fn classify_lattice(
    system: &RegionSystem,
    lo: Money,
    hi: Money,
    step: Money,
) -> Vec<(Vec<Money>, Vec<Bundle>)> {
    assert!(!step.is_zero(), "lattice step must be positive");
    let mut axis = Vec::new();
    let mut x = lo;
    while x <= hi {
        axis.push(x);
        x = x + step;
    }
    let mut points: Vec<Vec<Money>> = alloc::vec![Vec::new()];
    for _ in 0..system.items {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |x| {
                    let mut q = p.clone();
                    q.push(*x);
                    q
                })
            })
            .collect();
    }
    points
        .into_iter()
        .map(|p| {
            let c = system.classify_point(&p);
            (p, c)
        })
        .collect()
}
