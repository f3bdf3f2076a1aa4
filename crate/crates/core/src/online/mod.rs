//! Online allocation: keywords are revealed one at a time and every decision
//! is final.
//!
//! A policy only ever sees an [`ArrivalView`] of the current keyword, so it
//! cannot look ahead. Second-price policies return an [`Action`] and are run
//! by [`run_online`]; first-price matching policies (Ranking) return at most
//! one bidder per keyword and are run by [`run_online_matching`].

mod policies;
mod ranking;

pub use policies::{FirstAvailable, Greedy, SkipAll};
pub use ranking::{Ranking, RankingSimulate};

use thiserror::Error;

use crate::model::{execute, Action, AuctionTrace, BudgetState, ExecError, Instance, ModelError, Money};
use crate::oracles::Matching;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OnlineError {
    #[error("policy {policy} made an illegal move at keyword {step}: {source}")]
    PolicyViolation {
        policy: String,
        step: usize,
        source: ExecError,
    },
    #[error("policy {policy} matched keyword {step} to unavailable bidder {bidder}")]
    InvalidMatch { policy: String, step: usize, bidder: usize },
    #[error("k must be positive")]
    ZeroK,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// What a policy is shown when keyword `step` arrives.
#[derive(Debug, Clone, Copy)]
pub struct ArrivalView<'a> {
    pub step: usize,
    /// Original bids on the current keyword, one per bidder.
    pub bids: &'a [Money],
    /// Remaining budgets before the current keyword.
    pub remaining: &'a [Money],
}

impl ArrivalView<'_> {
    pub fn effective_bid(&self, v: usize) -> Money {
        self.bids[v].min(self.remaining[v])
    }

    /// Bidders with a positive effective bid, by index.
    pub fn available(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.bids.len()).filter(|&v| self.effective_bid(v) > 0)
    }

    /// `Assign` on two bidders, ordered so the larger effective bid comes
    /// first (`a` wins ties).
    pub fn ordered_pair(&self, a: usize, b: usize) -> Action {
        if self.effective_bid(a) >= self.effective_bid(b) {
            Action::assign(a, b)
        } else {
            Action::assign(b, a)
        }
    }
}

pub trait OnlinePolicy {
    fn name(&self) -> &str;
    /// Deterministic policies ignore the seed.
    fn is_deterministic(&self) -> bool;
    /// Resets per-run state.
    fn start(&mut self, num_bidders: usize, seed: u64);
    fn decide(&mut self, view: &ArrivalView<'_>) -> Action;
}

/// Feeds `instance` to `policy` one keyword at a time and executes its
/// decisions.
pub fn run_online(instance: &Instance, policy: &mut dyn OnlinePolicy, seed: u64) -> Result<AuctionTrace, OnlineError> {
    policy.start(instance.num_bidders(), seed);
    let mut state = BudgetState::new(instance);
    let mut actions = Vec::with_capacity(instance.num_keywords());
    for u in 0..instance.num_keywords() {
        let view = ArrivalView {
            step: u,
            bids: instance.bids_for(u),
            remaining: state.remaining(),
        };
        let action = policy.decide(&view);
        state
            .apply(instance, action)
            .map_err(|source| OnlineError::PolicyViolation {
                policy: policy.name().to_string(),
                step: u,
                source,
            })?;
        actions.push(action);
    }
    Ok(execute(instance, &actions).expect("every action was checked on arrival"))
}

#[derive(Debug, Clone, Copy)]
pub struct MatchView<'a> {
    pub step: usize,
    pub bids: &'a [Money],
    pub matched: &'a [bool],
}

impl MatchView<'_> {
    /// Neighbours of the current keyword that are still unmatched.
    pub fn available(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.bids.len()).filter(|&v| self.bids[v] > 0 && !self.matched[v])
    }
}

/// Online first-price matching policy: no second bidder is needed.
pub trait MatchingPolicy {
    fn name(&self) -> &str;
    fn start(&mut self, num_bidders: usize, seed: u64);
    fn choose(&mut self, view: &MatchView<'_>) -> Option<usize>;
}

pub fn run_online_matching(
    instance: &Instance,
    policy: &mut dyn MatchingPolicy,
    seed: u64,
) -> Result<Matching, OnlineError> {
    policy.start(instance.num_bidders(), seed);
    let mut matched = vec![false; instance.num_bidders()];
    let mut matching = Matching::empty(instance.num_keywords(), instance.num_bidders());
    for u in 0..instance.num_keywords() {
        let view = MatchView {
            step: u,
            bids: instance.bids_for(u),
            matched: &matched,
        };
        if let Some(v) = policy.choose(&view) {
            if v >= matched.len() || matched[v] || instance.bid(u, v) == 0 {
                return Err(OnlineError::InvalidMatch {
                    policy: policy.name().to_string(),
                    step: u,
                    bidder: v,
                });
            }
            matched[v] = true;
            matching.insert(u, v);
        }
    }
    Ok(matching)
}

/// Instance with every keyword repeated `k` times in a row.
#[derive(Debug, Clone)]
pub struct LeftKCopy {
    pub instance: Instance,
    pub k: usize,
    /// `zeta[h]` is the original keyword copied by keyword `h`.
    pub zeta: Vec<usize>,
}

pub fn left_k_copy(instance: &Instance, k: usize) -> Result<LeftKCopy, OnlineError> {
    if k == 0 {
        return Err(OnlineError::ZeroK);
    }
    let mut keywords = Vec::with_capacity(k * instance.num_keywords());
    let mut rows = Vec::with_capacity(keywords.capacity());
    let mut zeta = Vec::with_capacity(keywords.capacity());
    for u in 0..instance.num_keywords() {
        for j in 0..k {
            let id = instance.keyword_id(u);
            keywords.push(if k == 1 {
                id.to_string()
            } else {
                format!("{id}#{}", j + 1)
            });
            rows.push(instance.bids_for(u).to_vec());
            zeta.push(u);
        }
    }
    let copied = Instance::from_matrix(keywords, instance.bidders().to_vec(), rows)?;
    Ok(LeftKCopy {
        instance: copied,
        k,
        zeta,
    })
}
