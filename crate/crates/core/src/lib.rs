//! Exact verification toolkit for auction mechanisms when bidders are
//! spiteful: they maximise their own utility first and, among equally good
//! bids, prefer the one that lowers their rivals' utilities.
//!
//! The crate is `no_std` (with `alloc`). It provides
//!
//! - exact monetary arithmetic and finite valuation grids ([`money`], [`grid`]),
//! - single-item mechanisms and their tabulation ([`mechanism`], [`mechanisms`]),
//! - exhaustive property checking and the enumeration experiments ([`verifier`]),
//! - optimal thresholds and revenue for uniform values ([`optimal`]),
//! - multi-item sequential and cluster mechanisms with region geometry ([`multiitem`]).

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod grid;
pub mod mechanism;
pub mod mechanisms;
pub mod money;
pub mod multiitem;
pub mod optimal;
pub mod ranking;
pub mod verifier;

pub use grid::{BidProfile, Grid, GridError, ProfileSpace};
pub use mechanism::{tabulate, utility, DomainError, Mechanism, MechanismTable, Outcome};
pub use money::{money, ExtMoney, Money, MoneyError, Utility};
pub use ranking::{Ranking, RankingError};
