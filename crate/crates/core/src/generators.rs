//! Instance families: the budget-truncation gap instance, the adaptive
//! adversary against deterministic online policies, random chains, and
//! seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{execute, Action, AuctionTrace, Instance, ModelError, Money};
use crate::online::{run_online, OnlineError, OnlinePolicy};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("policy {0} is randomized; the adversary needs a deterministic policy")]
    NonDeterministicPolicy(String),
    #[error(transparent)]
    Online(#[from] OnlineError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn invalid(msg: impl Into<String>) -> GenError {
    GenError::InvalidParams(msg.into())
}

// Bidder indices of the gap instance.
const GAP_T: usize = 0;
const GAP_L: usize = 1;
const GAP_D: usize = 2;
const GAP_H: usize = 3;

/// Instance with `c(k+1)` keywords where every bid is at most `1/c` of its
/// bidder's budget, yet a budget-truncated second bid earns more than
/// `ck(k-1)`.
///
/// Keywords `w0` (trigger), `w1..w{c-1}` (drain), `q1..q{ck}` (harvest).
/// Bidders: `T` (budget c, bids 1 on w0), `L` (budget ck, bids k on every
/// keyword), `D` (budget ck, bids k on the drains), `H` (budget ck^2, bids k
/// on the harvest keywords).
pub fn gap_instance(c: usize, k: usize) -> Result<Instance, GenError> {
    if c == 0 || k < 2 {
        return Err(invalid(format!(
            "gap instance needs c >= 1 and k >= 2, got c={c}, k={k}"
        )));
    }
    let (cm, km) = (c as Money, k as Money);
    let ck = cm.checked_mul(km).ok_or_else(|| invalid("c*k overflows"))?;
    let ck2 = ck.checked_mul(km).ok_or_else(|| invalid("c*k^2 overflows"))?;
    let mut b = Instance::builder();
    let w0 = b.keyword("w0");
    let drains: Vec<usize> = (1..c).map(|i| b.keyword(format!("w{i}"))).collect();
    let harvest: Vec<usize> = (1..=c * k).map(|i| b.keyword(format!("q{i}"))).collect();
    let t = b.bidder("T", cm);
    let l = b.bidder("L", ck);
    let d = b.bidder("D", ck);
    let h = b.bidder("H", ck2);
    debug_assert_eq!([t, l, d, h], [GAP_T, GAP_L, GAP_D, GAP_H]);
    b.bid(w0, t, 1)?;
    for u in 0..b.num_keywords() {
        b.bid(u, l, km)?;
    }
    for &u in &drains {
        b.bid(u, d, km)?;
    }
    for &u in &harvest {
        b.bid(u, h, km)?;
    }
    Ok(b.build()?)
}

/// The strategy that exhausts `L` down to `k-1` and then uses its truncated
/// bid as the price on every harvest keyword.
pub fn gap_replay(c: usize, k: usize) -> Result<(Instance, AuctionTrace), GenError> {
    let inst = gap_instance(c, k)?;
    let mut actions = vec![Action::assign(GAP_L, GAP_T)];
    actions.extend((1..c).map(|_| Action::assign(GAP_L, GAP_D)));
    actions.extend((0..c * k).map(|_| Action::assign(GAP_H, GAP_L)));
    let trace = execute(&inst, &actions).map_err(|e| invalid(format!("gap replay failed: {e}")))?;
    Ok((inst, trace))
}

#[derive(Debug, Clone)]
pub struct AdversaryTranscript {
    pub instance: Instance,
    pub policy: String,
    /// The policy's trace on the final instance.
    pub trace: AuctionTrace,
    /// First keyword the policy sold, and the bidder it sold it to.
    pub switch: Option<(usize, usize)>,
}

impl AdversaryTranscript {
    pub fn policy_value(&self) -> Money {
        self.trace.value()
    }
}

/// Builds an `m`-keyword 0/1 instance against a deterministic policy: fresh
/// bidder pairs until the policy sells a keyword to some bidder `a`, then
/// keywords adjacent to `a` and one fresh bidder each.
pub fn adversary_vs_policy(policy: &mut dyn OnlinePolicy, m: usize) -> Result<AdversaryTranscript, GenError> {
    if !policy.is_deterministic() {
        return Err(GenError::NonDeterministicPolicy(policy.name().to_string()));
    }
    if m == 0 {
        return Err(invalid("m must be positive"));
    }
    let slots = 2 * m;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut next_fresh = 0;
    let mut switch: Option<(usize, usize)> = None;
    for u in 0..m {
        match switch {
            None => {
                edges.push((u, next_fresh));
                edges.push((u, next_fresh + 1));
                next_fresh += 2;
            }
            Some((_, a)) => {
                edges.push((u, a));
                edges.push((u, next_fresh));
                next_fresh += 1;
            }
        }
        if switch.is_none() {
            // Replaying the prefix shows the policy exactly what it saw online.
            let prefix = Instance::zero_one(u + 1, slots, edges.iter().copied())?;
            let trace = run_online(&prefix, policy, 0)?;
            if let Action::Assign { first, .. } = trace.steps[u].action {
                switch = Some((u, first));
            }
        }
    }
    let instance = Instance::zero_one(m, next_fresh, edges)?;
    let trace = run_online(&instance, policy, 0)?;
    Ok(AdversaryTranscript {
        instance,
        policy: policy.name().to_string(),
        trace,
        switch,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainVariant {
    Normal,
    /// Bidder 0 is unavailable: it exists but bids on nothing.
    Restricted,
}

#[derive(Debug, Clone)]
pub struct ChainSample {
    pub instance: Instance,
    pub variant: ChainVariant,
    /// `pairs[i]` are the two bidders keyword `i` is built from (for the
    /// restricted variant one of them may carry no bid).
    pub pairs: Vec<(usize, usize)>,
    /// `coins[i-1]` is true when keyword `i` reuses the first bidder of
    /// keyword `i-1`'s pair, false when it reuses the second.
    pub coins: Vec<bool>,
    /// Value-`m` trace that sells each keyword to the bidder the next keyword
    /// does not touch (normal variant only).
    pub witness: Option<AuctionTrace>,
}

/// One draw of the random chain: each keyword shares one uniformly chosen
/// bidder with its predecessor and brings one fresh bidder.
pub fn sample_chain(m: usize, variant: ChainVariant, seed: u64) -> Result<ChainSample, GenError> {
    if m == 0 {
        return Err(invalid("m must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = vec![(0, 1)];
    let mut coins = Vec::with_capacity(m - 1);
    for i in 1..m {
        let (a, b) = pairs[i - 1];
        let heads = rng.gen_bool(0.5);
        coins.push(heads);
        pairs.push((if heads { a } else { b }, i + 1));
    }
    let edges = pairs
        .iter()
        .enumerate()
        .flat_map(|(u, &(a, b))| [(u, a), (u, b)])
        .filter(|&(_, v)| variant == ChainVariant::Normal || v != 0);
    let instance = Instance::zero_one(m, m + 1, edges)?;

    let witness = match variant {
        ChainVariant::Restricted => None,
        ChainVariant::Normal => {
            let actions: Vec<Action> = (0..m)
                .map(|i| {
                    let (a, b) = pairs[i];
                    let keep = if i + 1 < m { pairs[i + 1].0 } else { a };
                    if keep == a {
                        Action::assign(b, a)
                    } else {
                        Action::assign(a, b)
                    }
                })
                .collect();
            Some(execute(&instance, &actions).map_err(|e| invalid(format!("chain witness failed: {e}")))?)
        }
    };
    Ok(ChainSample {
        instance,
        variant,
        pairs,
        coins,
        witness,
    })
}

/// Random 0/1 instance; each edge is present with probability `p`, and
/// keywords left with fewer than two neighbours are padded to exactly two.
pub fn random_2pm(num_keywords: usize, num_bidders: usize, p: f64, seed: u64) -> Result<Instance, GenError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("edge probability {p} outside [0, 1]")));
    }
    if num_bidders < 2 {
        return Err(invalid("padding to degree two needs at least two bidders"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..num_keywords {
        let mut nbrs: Vec<usize> = (0..num_bidders).filter(|_| rng.gen_bool(p)).collect();
        while nbrs.len() < 2 {
            let v = rng.gen_range(0..num_bidders);
            if !nbrs.contains(&v) {
                nbrs.push(v);
            }
        }
        edges.extend(nbrs.into_iter().map(|v| (u, v)));
    }
    Ok(Instance::zero_one(num_keywords, num_bidders, edges)?)
}

/// Random budgeted instance with bids uniform in `[0, max_bid]` and each
/// budget set to `target_r_min` times the bidder's largest bid (at least 1).
pub fn random_2paa(
    num_keywords: usize,
    num_bidders: usize,
    max_bid: Money,
    target_r_min: Money,
    seed: u64,
) -> Result<Instance, GenError> {
    if target_r_min == 0 {
        return Err(invalid("target r_min must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<Money>> = (0..num_keywords)
        .map(|_| (0..num_bidders).map(|_| rng.gen_range(0..=max_bid)).collect())
        .collect();
    let bidders = (0..num_bidders)
        .map(|v| {
            let top = rows.iter().map(|r| r[v]).max().unwrap_or(0).max(1);
            let budget = top
                .checked_mul(target_r_min)
                .ok_or_else(|| invalid("budget overflows u64"))?;
            Ok(crate::model::Bidder {
                id: format!("b{v}"),
                budget,
            })
        })
        .collect::<Result<Vec<_>, GenError>>()?;
    let keywords = (0..num_keywords).map(|u| format!("k{u}")).collect();
    Ok(Instance::from_matrix(keywords, bidders, rows)?)
}

/// Random `n x n` 0/1 instance containing a perfect matching (a hidden random
/// permutation), extra edges with probability `p`, every keyword of degree at
/// least two.
pub fn random_perfect_2pm(n: usize, p: f64, seed: u64) -> Result<Instance, GenError> {
    if n < 2 {
        return Err(invalid("need n >= 2"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut edges = Vec::new();
    for (u, &pu) in perm.iter().enumerate() {
        let mut nbrs = vec![pu];
        nbrs.extend((0..n).filter(|&v| v != pu && rng.gen_bool(p)));
        while nbrs.len() < 2 {
            let v = rng.gen_range(0..n);
            if !nbrs.contains(&v) {
                nbrs.push(v);
            }
        }
        edges.extend(nbrs.into_iter().map(|v| (u, v)));
    }
    Ok(Instance::zero_one(n, n, edges)?)
}
