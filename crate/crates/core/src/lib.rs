//! Second-price ad auction allocation.
//!
//! Keywords arrive in a fixed order; each is either skipped or sold to a
//! `(first, second)` pair of bidders, where `first` pays the effective bid
//! of `second` (its original bid capped by its remaining budget). The crate
//! provides the exact executor for these semantics, exact oracles for small
//! instances, offline and online algorithms, hardness gadgets, instance
//! generators and a seeded experiment harness.
//!
//! ```
//! use auctionlab::{execute, Action, Instance};
//!
//! let inst = Instance::zero_one(1, 2, [(0, 0), (0, 1)]).unwrap();
//! let trace = execute(&inst, &[Action::assign(0, 1)]).unwrap();
//! assert_eq!(trace.value(), 1);
//! ```

pub mod format;
pub mod generators;
pub mod harness;
pub mod model;
pub mod offline;
pub mod online;
pub mod oracles;
pub mod reductions;

pub use model::{
    effective_bid, execute, Action, AuctionTrace, Bidder, BudgetState, ExecError, Instance, InstanceBuilder,
    ModelError, Money, TraceStep,
};
pub use oracles::{max_matching, opt_1paa, opt_2paa, opt_2pm, Matching, OracleError, SearchLimits};
