//! Offline approximation algorithms: `top_c` for budgeted instances whose
//! bids are small relative to budgets, and `reverse_match` for 0/1 instances.

use num_rational::Ratio;
use thiserror::Error;

use crate::model::{execute, Action, AuctionTrace, BudgetState, Instance, Money};
use crate::oracles::{max_matching, Matching};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OfflineError {
    #[error("c must be positive")]
    ZeroC,
    #[error("({keyword}, {bidder}) is the matching edge of {keyword}")]
    NotANonMatchingEdge { keyword: usize, bidder: usize },
    #[error("({keyword}, {bidder}) is not an edge")]
    NotAnEdge { keyword: usize, bidder: usize },
    #[error("instance is not a 0/1 instance")]
    NotZeroOne,
}

#[derive(Debug, Clone)]
pub struct TopCOutcome {
    pub trace: AuctionTrace,
    /// Chosen keywords in arrival order.
    pub selected: Vec<usize>,
    /// Set when `r_min < c`: bids may be cut by budgets and the bound
    /// `value >= (c/m) * sum s_u` is no longer guaranteed.
    pub truncation_possible: bool,
}

/// The two highest bidders on `u` by original bid, lowest index first among
/// ties.
fn top_two(instance: &Instance, u: usize) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..instance.num_bidders()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(instance.bid(u, v)), v));
    match order[..] {
        [a, b, ..] => Some((a, b)),
        _ => None,
    }
}

/// Sells the `c` keywords with the largest second-highest bid, each to its two
/// highest bidders.
pub fn top_c(instance: &Instance, c: usize) -> Result<TopCOutcome, OfflineError> {
    if c == 0 {
        return Err(OfflineError::ZeroC);
    }
    let truncation_possible = match instance.r_min() {
        Ok(r) => r < Ratio::from_integer(c as Money),
        Err(_) => false,
    };
    let m = instance.num_keywords();
    let mut ranked: Vec<usize> = (0..m).filter(|&u| instance.second_highest_bid(u) > 0).collect();
    ranked.sort_by_key(|&u| (std::cmp::Reverse(instance.second_highest_bid(u)), u));
    ranked.truncate(c);
    ranked.sort_unstable();

    let mut state = BudgetState::new(instance);
    let mut actions = Vec::with_capacity(m);
    for u in 0..m {
        let action = match ranked.binary_search(&u) {
            Err(_) => Action::Skip,
            Ok(_) => {
                let (top, second) = top_two(instance, u).expect("positive second bid needs two bidders");
                // Only reachable with truncation: keep the pair legal.
                if state.effective_bid(instance, u, top) < state.effective_bid(instance, u, second) {
                    Action::assign(second, top)
                } else {
                    Action::assign(top, second)
                }
            }
        };
        state.apply(instance, action).expect("top_c emits legal actions");
        actions.push(action);
    }
    let trace = execute(instance, &actions).expect("top_c emits legal actions");
    Ok(TopCOutcome {
        trace,
        selected: ranked,
        truncation_possible,
    })
}

/// `sum_u s_u`, the upper bound on any second-price allocation.
pub fn second_bid_sum(instance: &Instance) -> u128 {
    (0..instance.num_keywords())
        .map(|u| instance.second_highest_bid(u) as u128)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    Up,
    Down,
}

/// Classifies the non-matching edge `(keyword, bidder)` relative to `f`.
pub fn classify_edge(
    instance: &Instance,
    f: &Matching,
    keyword: usize,
    bidder: usize,
) -> Result<EdgeClass, OfflineError> {
    if instance.bid(keyword, bidder) == 0 {
        return Err(OfflineError::NotAnEdge { keyword, bidder });
    }
    if f.bidder_of(keyword) == Some(bidder) {
        return Err(OfflineError::NotANonMatchingEdge { keyword, bidder });
    }
    Ok(match f.keyword_of(bidder) {
        Some(w) if w < keyword => EdgeClass::Up,
        _ => EdgeClass::Down,
    })
}

#[derive(Debug, Clone)]
pub struct ReverseMatchOutcome {
    pub trace: AuctionTrace,
    /// The maximum matching the algorithm started from.
    pub matching: Matching,
    /// Keywords of degree below two, skipped without consideration.
    pub dropped: Vec<usize>,
}

/// Second-price matching with at least half the keywords of a maximum
/// matching.
pub fn reverse_match(instance: &Instance) -> Result<ReverseMatchOutcome, OfflineError> {
    if !instance.is_zero_one() {
        return Err(OfflineError::NotZeroOne);
    }
    let m = instance.num_keywords();
    let kept: Vec<usize> = (0..m).filter(|&u| instance.degree(u) >= 2).collect();
    let sub = instance.select_keywords(&kept).expect("subset of a valid instance");
    let mut f = Matching::empty(m, instance.num_bidders());
    for (w, v) in max_matching(&sub).pairs() {
        f.insert(kept[w], v);
    }
    reverse_match_from(instance, &f)
}

/// [`reverse_match`] starting from the given matching `f` instead of the
/// deterministic maximum matching.
pub fn reverse_match_from(instance: &Instance, f0: &Matching) -> Result<ReverseMatchOutcome, OfflineError> {
    if !instance.is_zero_one() {
        return Err(OfflineError::NotZeroOne);
    }
    assert!(f0.is_valid_for(instance), "f must be a matching of the instance");
    let m = instance.num_keywords();
    let dropped: Vec<usize> = (0..m).filter(|&u| instance.degree(u) < 2).collect();
    let mut f = f0.clone();
    for &u in &dropped {
        f.remove_keyword(u);
    }

    let mut actions = vec![Action::Skip; m];
    for u in (0..m).rev() {
        let Some(fu) = f.bidder_of(u) else { continue };
        let down = instance
            .neighbors(u)
            .filter(|&v| v != fu)
            .find(|&v| classify_edge(instance, &f, u, v) == Ok(EdgeClass::Down));
        let second = match down {
            Some(v) => v,
            None => {
                // every other neighbour is matched to an earlier keyword
                let v = instance
                    .neighbors(u)
                    .filter(|&v| v != fu)
                    .min_by_key(|&v| f.keyword_of(v))
                    .expect("degree >= 2");
                let w = f.keyword_of(v).expect("up-edge bidder is matched");
                f.remove_keyword(w);
                v
            }
        };
        actions[u] = Action::assign(fu, second);
    }

    let trace = execute(instance, &actions).expect("reverse_match trace replays in arrival order");
    debug_assert!(trace.steps.iter().all(|s| s.action == Action::Skip || s.price == 1));
    Ok(ReverseMatchOutcome {
        trace,
        matching: f0.clone(),
        dropped,
    })
}
