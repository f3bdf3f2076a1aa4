use serde::Serialize;

use super::ReductionError;
use crate::model::{execute, Action, AuctionTrace, Instance, Money};

/// 2PAA(c) instance built from a PARTITION instance, with the index of every
/// named keyword and bidder.
#[derive(Debug, Clone)]
pub struct PartitionGadget {
    pub instance: Instance,
    pub n: usize,
    pub c: usize,
    pub weights: Vec<Money>,
    /// `W`, the total weight (before scaling).
    pub total_weight: Money,
    /// 2 when `W` is odd (every amount doubled so `cW/2` stays integral), else 1.
    pub scale: Money,
    pub item_keywords: Vec<usize>,
    pub e_keywords: [usize; 2],
    /// `g_keywords[i][k]` is `g_{i+1,k+1}`.
    pub g_keywords: Vec<Vec<usize>>,
    pub a: usize,
    pub d: [usize; 2],
    pub f: usize,
    pub h: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct PartitionRoles {
    pub n: usize,
    pub c: usize,
    pub weights: Vec<Money>,
    pub total_weight: Money,
    pub scale: Money,
    pub yes_value: Money,
    pub threshold: Money,
    pub item_keywords: Vec<String>,
    pub e_keywords: Vec<String>,
    pub g_keywords: Vec<Vec<String>>,
    pub a: String,
    pub d: Vec<String>,
    pub f: String,
    pub h: Vec<String>,
}

fn mul(xs: &[Money]) -> Result<Money, ReductionError> {
    xs.iter().try_fold(1 as Money, |acc, &x| {
        acc.checked_mul(x)
            .ok_or_else(|| ReductionError::InvalidParams("gadget amounts overflow u64".into()))
    })
}

fn add(xs: &[Money]) -> Result<Money, ReductionError> {
    xs.iter().try_fold(0 as Money, |acc, &x| {
        acc.checked_add(x)
            .ok_or_else(|| ReductionError::InvalidParams("gadget amounts overflow u64".into()))
    })
}

impl PartitionGadget {
    /// `scale * cW(n^5 + n + 2)`: value reached by the yes-instance strategy.
    pub fn yes_value(&self) -> Money {
        let n = self.n as Money;
        let inner = add(&[mul(&[n, n, n, n, n]).unwrap(), n, 2]).unwrap();
        mul(&[self.scale, self.c as Money, self.total_weight, inner]).unwrap()
    }

    /// `scale * cW(n^3 + cn^2 + n + 2)`: any solution at least this large
    /// certifies a partition.
    pub fn threshold(&self) -> Money {
        let n = self.n as Money;
        let c = self.c as Money;
        let inner = add(&[mul(&[n, n, n]).unwrap(), mul(&[c, n, n]).unwrap(), n, 2]).unwrap();
        mul(&[self.scale, c, self.total_weight, inner]).unwrap()
    }

    pub fn roles(&self) -> PartitionRoles {
        let kid = |u: usize| self.instance.keyword_id(u).to_string();
        let bid = |v: usize| self.instance.bidder(v).id.clone();
        PartitionRoles {
            n: self.n,
            c: self.c,
            weights: self.weights.clone(),
            total_weight: self.total_weight,
            scale: self.scale,
            yes_value: self.yes_value(),
            threshold: self.threshold(),
            item_keywords: self.item_keywords.iter().map(|&u| kid(u)).collect(),
            e_keywords: self.e_keywords.iter().map(|&u| kid(u)).collect(),
            g_keywords: self
                .g_keywords
                .iter()
                .map(|row| row.iter().map(|&u| kid(u)).collect())
                .collect(),
            a: bid(self.a),
            d: self.d.iter().map(|&v| bid(v)).collect(),
            f: bid(self.f),
            h: self.h.iter().map(|&v| bid(v)).collect(),
        }
    }
}

/// Builds the PARTITION gadget for `weights` (even count) and promise `c`.
///
/// Keywords `c_1..c_n, e_1, e_2, g_{1,1}..g_{n^2,c}` arrive in that order;
/// bidders are `a, d_1, d_2, f, h_1..h_{n^2}`.
pub fn partition_to_2paa(weights: &[Money], c: usize) -> Result<PartitionGadget, ReductionError> {
    let n = weights.len();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(ReductionError::InvalidParams(format!(
            "need an even, positive number of weights, got {n}"
        )));
    }
    if c == 0 {
        return Err(ReductionError::InvalidParams("c must be positive".into()));
    }
    if weights.contains(&0) {
        return Err(ReductionError::InvalidParams("weights must be positive".into()));
    }
    let w_total = add(weights)?;
    let scale: Money = if w_total % 2 == 0 { 1 } else { 2 };
    let nn = n as Money;
    let cc = c as Money;
    let n3 = mul(&[nn, nn, nn])?;
    let cw = mul(&[scale, cc, w_total])?;

    let mut b = Instance::builder();
    let item_keywords: Vec<usize> = (1..=n).map(|i| b.keyword(format!("c{i}"))).collect();
    let e_keywords = [b.keyword("e1"), b.keyword("e2")];
    let g_keywords: Vec<Vec<usize>> = (1..=n * n)
        .map(|i| (1..=c).map(|k| b.keyword(format!("g{i}_{k}"))).collect())
        .collect();

    let small_budget = mul(&[cw, add(&[1, nn / 2])?])?;
    let a = b.bidder("a", small_budget);
    let d = [b.bidder("d1", small_budget), b.bidder("d2", small_budget)];
    let f = b.bidder("f", mul(&[cw, add(&[n3, 1])?])?);
    let h: Vec<usize> = (1..=n * n)
        .map(|i| b.bidder(format!("h{i}"), mul(&[cw, n3]).unwrap()))
        .collect();

    for (i, &w) in weights.iter().enumerate() {
        let amount = mul(&[scale, cc, add(&[w, w_total])?])?;
        for bidder in [a, d[0], d[1]] {
            b.bid(item_keywords[i], bidder, amount)?;
        }
    }
    for j in 0..2 {
        b.bid(e_keywords[j], d[j], cw)?;
        b.bid(e_keywords[j], f, cw / 2)?;
    }
    let f_bid = mul(&[scale, w_total, add(&[n3, 1])?])?;
    let h_bid = mul(&[scale, w_total, n3])?;
    for (i, row) in g_keywords.iter().enumerate() {
        for &g in row {
            b.bid(g, f, f_bid)?;
            b.bid(g, h[i], h_bid)?;
        }
    }
    Ok(PartitionGadget {
        instance: b.build()?,
        n,
        c,
        weights: weights.to_vec(),
        total_weight: w_total,
        scale,
        item_keywords,
        e_keywords,
        g_keywords,
        a,
        d,
        f,
        h,
    })
}

/// Replays the yes-instance strategy for the certificate `subset` (0-based
/// item indices of one half of the partition).
pub fn yes_strategy(gadget: &PartitionGadget, subset: &[usize]) -> Result<AuctionTrace, ReductionError> {
    let n = gadget.n;
    let mut in_subset = vec![false; n];
    for &i in subset {
        if i >= n || in_subset[i] {
            return Err(ReductionError::NotAPartition(format!("bad or repeated index {i}")));
        }
        in_subset[i] = true;
    }
    if subset.len() != n / 2 {
        return Err(ReductionError::NotAPartition(format!(
            "subset has {} items, need {}",
            subset.len(),
            n / 2
        )));
    }
    let half: u128 = subset.iter().map(|&i| gadget.weights[i] as u128).sum();
    if 2 * half != gadget.total_weight as u128 {
        return Err(ReductionError::NotAPartition(format!(
            "subset weight {half} is not half of {}",
            gadget.total_weight
        )));
    }

    let mut actions = vec![Action::Skip; gadget.instance.num_keywords()];
    for (i, &u) in gadget.item_keywords.iter().enumerate() {
        let winner = if in_subset[i] { gadget.d[0] } else { gadget.d[1] };
        actions[u] = Action::assign(winner, gadget.a);
    }
    for j in 0..2 {
        actions[gadget.e_keywords[j]] = Action::assign(gadget.f, gadget.d[j]);
    }
    let c = gadget.c;
    for (i, row) in gadget.g_keywords.iter().enumerate() {
        for (k, &g) in row.iter().enumerate() {
            actions[g] = if i == 0 && k + 1 < c {
                // drain f down to W n^3 so it can price every later g
                Action::assign(gadget.f, gadget.h[0])
            } else {
                Action::assign(gadget.h[i], gadget.f)
            };
        }
    }
    execute(&gadget.instance, &actions).map_err(ReductionError::InfeasibleTrace)
}
