//! Exact reference solvers used as ground truth.
//!
//! * [`max_matching`]: augmenting-path maximum bipartite matching on the
//!   positive-bid graph (first-price matching optimum).
//! * [`opt_2pm`]: exhaustive 0/1 second-price optimum, memoized on
//!   `(keyword index, set of consumed bidders)`.
//! * [`opt_2paa`] / [`opt_1paa`]: depth-first branch and bound over the exact
//!   budget vector, with a dominance table keyed on `(keyword, budgets)`.
//!
//! Every search takes an explicit node budget and fails with
//! [`OracleError::TooLarge`] instead of returning a truncated answer.

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{execute, Action, AuctionTrace, Instance, Money};
use crate::reductions::FirstPriceAllocation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("search exceeded its budget of {limit} nodes")]
    TooLarge { limit: u64 },
    #[error("instance is not a 0/1 instance")]
    NotZeroOne,
    #[error("bitmask search supports at most 64 bidders, got {0}")]
    TooManyBidders(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_nodes: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self { max_nodes: 50_000_000 }
    }
}

impl SearchLimits {
    pub fn nodes(max_nodes: u64) -> Self {
        Self { max_nodes }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptResult<W> {
    pub value: Money,
    pub witness: W,
}

/// Partial keyword -> bidder map, injective on bidders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    by_keyword: Vec<Option<usize>>,
    by_bidder: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(num_keywords: usize, num_bidders: usize) -> Self {
        Self {
            by_keyword: vec![None; num_keywords],
            by_bidder: vec![None; num_bidders],
        }
    }

    pub fn size(&self) -> usize {
        self.by_keyword.iter().filter(|m| m.is_some()).count()
    }

    pub fn bidder_of(&self, keyword: usize) -> Option<usize> {
        self.by_keyword[keyword]
    }

    pub fn keyword_of(&self, bidder: usize) -> Option<usize> {
        self.by_bidder[bidder]
    }

    pub fn is_bidder_matched(&self, bidder: usize) -> bool {
        self.by_bidder[bidder].is_some()
    }

    /// `(keyword, bidder)` pairs in keyword order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.by_keyword
            .iter()
            .enumerate()
            .filter_map(|(u, v)| v.map(|v| (u, v)))
    }

    /// Adds `(keyword, bidder)`; both endpoints must currently be free.
    pub fn insert(&mut self, keyword: usize, bidder: usize) {
        assert!(self.by_keyword[keyword].is_none() && self.by_bidder[bidder].is_none());
        self.by_keyword[keyword] = Some(bidder);
        self.by_bidder[bidder] = Some(keyword);
    }

    pub fn remove_keyword(&mut self, keyword: usize) -> Option<usize> {
        let v = self.by_keyword[keyword].take()?;
        self.by_bidder[v] = None;
        Some(v)
    }

    /// True when every pair is a positive-bid edge and the map is injective.
    pub fn is_valid_for(&self, instance: &Instance) -> bool {
        let mut used = vec![false; instance.num_bidders()];
        for (u, v) in self.pairs() {
            if instance.bid(u, v) == 0 || used[v] {
                return false;
            }
            used[v] = true;
        }
        true
    }
}

/// Maximum-cardinality matching on the positive-bid graph.
///
/// Kuhn's augmenting-path method: keywords are inserted in arrival order and
/// bidders probed in index order, so the result is deterministic.
pub fn max_matching(instance: &Instance) -> Matching {
    let nk = instance.num_keywords();
    let nb = instance.num_bidders();
    let adj: Vec<Vec<usize>> = (0..nk).map(|u| instance.neighbors(u).collect()).collect();
    let mut by_bidder: Vec<Option<usize>> = vec![None; nb];

    fn augment(u: usize, adj: &[Vec<usize>], by_bidder: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            let free = match by_bidder[v] {
                None => true,
                Some(w) => augment(w, adj, by_bidder, seen),
            };
            if free {
                by_bidder[v] = Some(u);
                return true;
            }
        }
        false
    }

    let mut seen = vec![false; nb];
    for u in 0..nk {
        seen.iter_mut().for_each(|s| *s = false);
        augment(u, &adj, &mut by_bidder, &mut seen);
    }
    let mut m = Matching::empty(nk, nb);
    for (v, u) in by_bidder.iter().enumerate() {
        if let Some(u) = *u {
            m.insert(u, v);
        }
    }
    m
}

/// `sum_u s_u`, where `s_u` is the second-highest original bid on `u`.
pub fn second_bid_upper_bound(instance: &Instance) -> u128 {
    (0..instance.num_keywords())
        .map(|u| instance.second_highest_bid(u) as u128)
        .sum()
}

struct NodeCounter {
    used: u64,
    limit: u64,
}

impl NodeCounter {
    fn new(limits: SearchLimits) -> Self {
        Self {
            used: 0,
            limit: limits.max_nodes,
        }
    }

    #[inline]
    fn tick(&mut self) -> Result<(), OracleError> {
        self.used += 1;
        if self.used > self.limit {
            Err(OracleError::TooLarge { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

struct Pm<'a> {
    nbr: &'a [u64],
    memo: HashMap<(usize, u64), u32>,
    nodes: NodeCounter,
}

impl Pm<'_> {
    fn best(&mut self, t: usize, used: u64) -> Result<u32, OracleError> {
        if t == self.nbr.len() {
            return Ok(0);
        }
        if let Some(&v) = self.memo.get(&(t, used)) {
            return Ok(v);
        }
        self.nodes.tick()?;
        let ceiling = (self.nbr.len() - t) as u32;
        let mut best = self.best(t + 1, used)?;
        let avail = self.nbr[t] & !used;
        if avail.count_ones() >= 2 && best < ceiling {
            let mut rest = avail;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                rest ^= bit;
                best = best.max(1 + self.best(t + 1, used | bit)?);
                if best == ceiling {
                    break;
                }
            }
        }
        self.memo.insert((t, used), best);
        Ok(best)
    }
}

/// Optimal second-price matching value of a 0/1 instance, with a witness.
pub fn opt_2pm(instance: &Instance, limits: SearchLimits) -> Result<OptResult<AuctionTrace>, OracleError> {
    if !instance.is_zero_one() {
        return Err(OracleError::NotZeroOne);
    }
    if instance.num_bidders() > 64 {
        return Err(OracleError::TooManyBidders(instance.num_bidders()));
    }
    let nbr: Vec<u64> = (0..instance.num_keywords())
        .map(|u| instance.neighbors(u).fold(0u64, |m, v| m | (1 << v)))
        .collect();
    let mut pm = Pm {
        nbr: &nbr,
        memo: HashMap::new(),
        nodes: NodeCounter::new(limits),
    };
    let value = pm.best(0, 0)?;

    // Walk the memo forward to recover one optimal action sequence.
    let mut actions = Vec::with_capacity(nbr.len());
    let mut used = 0u64;
    for (t, &row) in nbr.iter().enumerate() {
        let here = pm.best(t, used)?;
        if pm.best(t + 1, used)? == here {
            actions.push(Action::Skip);
            continue;
        }
        let avail = row & !used;
        let chosen = (0..64)
            .filter(|v| avail & (1 << v) != 0)
            .find(|&v| matches!(pm.best(t + 1, used | (1 << v)), Ok(x) if x + 1 == here))
            .expect("memo is consistent");
        let second = (0..64)
            .find(|&v| v != chosen && avail & (1 << v) != 0)
            .expect("profitable step has two available neighbours");
        used |= 1 << chosen;
        actions.push(Action::assign(chosen, second));
    }
    let witness = execute(instance, &actions).expect("witness replays");
    debug_assert_eq!(witness.value(), value as Money);
    Ok(OptResult {
        value: value as Money,
        witness,
    })
}

struct BranchAndBound<'a> {
    instance: &'a Instance,
    /// `suffix[t]` bounds the value obtainable from keywords `t..`.
    suffix: Vec<u128>,
    seen: HashMap<(usize, Vec<Money>), u128>,
    nodes: NodeCounter,
    best: u128,
    best_path: Vec<Action>,
    path: Vec<Action>,
    second_price: bool,
}

impl BranchAndBound<'_> {
    fn options(&self, t: usize, budgets: &[Money]) -> Vec<(Money, Action)> {
        let inst = self.instance;
        let eff: Vec<Money> = inst.bids_for(t).iter().zip(budgets).map(|(&b, &r)| b.min(r)).collect();
        let mut opts = Vec::new();
        for (first, &fb) in eff.iter().enumerate() {
            if fb == 0 {
                continue;
            }
            if !self.second_price {
                // first-price sale, recorded as a self-pair on the search path
                opts.push((fb, Action::assign(first, first)));
                continue;
            }
            let mut prices: Vec<(Money, usize)> = Vec::new();
            for (second, &sb) in eff.iter().enumerate() {
                if second != first && sb > 0 && sb <= fb && !prices.iter().any(|&(p, _)| p == sb) {
                    prices.push((sb, second));
                }
            }
            for (p, second) in prices {
                opts.push((p, Action::assign(first, second)));
            }
        }
        opts.sort_by_key(|o| std::cmp::Reverse(o.0));
        opts
    }

    fn dfs(&mut self, t: usize, budgets: &mut Vec<Money>, acc: u128) -> Result<(), OracleError> {
        self.nodes.tick()?;
        if t == self.instance.num_keywords() {
            if acc > self.best {
                self.best = acc;
                self.best_path = self.path.clone();
            }
            return Ok(());
        }
        if acc + self.suffix[t] <= self.best {
            return Ok(());
        }
        match self.seen.get_mut(&(t, budgets.clone())) {
            Some(prev) if *prev >= acc => return Ok(()),
            Some(prev) => *prev = acc,
            None => {
                self.seen.insert((t, budgets.clone()), acc);
            }
        }
        for (price, action) in self.options(t, budgets) {
            let Action::Assign { first, .. } = action else {
                unreachable!()
            };
            budgets[first] -= price;
            self.path.push(action);
            let r = self.dfs(t + 1, budgets, acc + price as u128);
            self.path.pop();
            budgets[first] += price;
            r?;
        }
        self.path.push(Action::Skip);
        let r = self.dfs(t + 1, budgets, acc);
        self.path.pop();
        r
    }
}

fn branch_and_bound(
    instance: &Instance,
    limits: SearchLimits,
    second_price: bool,
) -> Result<(u128, Vec<Action>), OracleError> {
    let m = instance.num_keywords();
    let per_keyword: Vec<u128> = (0..m)
        .map(|u| {
            if second_price {
                instance.second_highest_bid(u) as u128
            } else {
                instance.bids_for(u).iter().copied().max().unwrap_or(0) as u128
            }
        })
        .collect();
    let mut suffix = vec![0u128; m + 1];
    for t in (0..m).rev() {
        suffix[t] = suffix[t + 1] + per_keyword[t];
    }
    let mut bb = BranchAndBound {
        instance,
        suffix,
        seen: HashMap::new(),
        nodes: NodeCounter::new(limits),
        best: 0,
        best_path: vec![Action::Skip; m],
        path: Vec::with_capacity(m),
        second_price,
    };
    let mut budgets = instance.budgets();
    bb.dfs(0, &mut budgets, 0)?;
    Ok((bb.best, bb.best_path))
}

/// Optimal 2PAA value with a witness trace (small instances only).
pub fn opt_2paa(instance: &Instance, limits: SearchLimits) -> Result<OptResult<AuctionTrace>, OracleError> {
    let (_, actions) = branch_and_bound(instance, limits, true)?;
    let witness = execute(instance, &actions).expect("search only emits legal actions");
    Ok(OptResult {
        value: witness.value(),
        witness,
    })
}

/// Optimal first-price (1PAA) value: each keyword goes to at most one bidder,
/// who pays `min(bid, remaining budget)`.
pub fn opt_1paa(instance: &Instance, limits: SearchLimits) -> Result<OptResult<FirstPriceAllocation>, OracleError> {
    let (value, actions) = branch_and_bound(instance, limits, false)?;
    let winners = actions.iter().map(|a| a.first()).collect();
    let alloc = FirstPriceAllocation::new(winners);
    debug_assert_eq!(alloc.value(instance) as u128, value);
    Ok(OptResult {
        value: value as Money,
        witness: alloc,
    })
}
