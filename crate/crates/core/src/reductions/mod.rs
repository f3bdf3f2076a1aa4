//! Constructive reductions: PARTITION to 2PAA(c), vertex cover to 2PM, and
//! the second-price to first-price bid transform with its randomized
//! rounding back to a second-price allocation.

mod first_price;
mod partition;
mod vertex_cover;

pub use first_price::{
    normalize_first_price, random_construction, random_construction_with_marks, second_price_partner,
    to_first_price_bids, BidderOutcome, FirstPriceAllocation, RandomConstruction,
};
pub use partition::{partition_to_2paa, yes_strategy, PartitionGadget};
pub use vertex_cover::{extract_vertex_cover, trace_from_cover, vc_to_2pm, CoverExtraction, VcGadget};

use thiserror::Error;

use crate::model::{ExecError, ModelError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("not a partition certificate: {0}")]
    NotAPartition(String),
    #[error("trace is infeasible on the gadget: {0}")]
    InfeasibleTrace(ExecError),
    #[error("keyword {keyword}: no second-price partner for bidder {bidder}")]
    UnresolvableSecondBidder { keyword: usize, bidder: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}
