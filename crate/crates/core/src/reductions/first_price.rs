use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ReductionError;
use crate::model::{execute, Action, AuctionTrace, Instance, Money};

/// First-price allocation: partial keyword -> winner map in arrival order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstPriceAllocation {
    winners: Vec<Option<usize>>,
}

impl FirstPriceAllocation {
    pub fn new(winners: Vec<Option<usize>>) -> Self {
        Self { winners }
    }

    pub fn empty(num_keywords: usize) -> Self {
        Self::new(vec![None; num_keywords])
    }

    pub fn winner(&self, keyword: usize) -> Option<usize> {
        self.winners[keyword]
    }

    pub fn winners(&self) -> &[Option<usize>] {
        &self.winners
    }

    /// Keywords won by `bidder`, in arrival order.
    pub fn keywords_of(&self, bidder: usize) -> Vec<usize> {
        self.winners
            .iter()
            .enumerate()
            .filter(|(_, w)| **w == Some(bidder))
            .map(|(u, _)| u)
            .collect()
    }

    /// Every winner edge carries a positive bid.
    pub fn is_feasible(&self, instance: &Instance) -> bool {
        self.winners.len() == instance.num_keywords()
            && self
                .winners
                .iter()
                .enumerate()
                .all(|(u, w)| w.is_none_or(|v| v < instance.num_bidders() && instance.bid(u, v) > 0))
    }

    /// First-price revenue: each winner pays `min(bid, remaining budget)`.
    pub fn value(&self, instance: &Instance) -> Money {
        let mut remaining = instance.budgets();
        let mut total: Money = 0;
        for (u, w) in self.winners.iter().enumerate() {
            if let Some(v) = *w {
                let pay = instance.bid(u, v).min(remaining[v]);
                remaining[v] -= pay;
                total = total.checked_add(pay).expect("first-price value overflows u64");
            }
        }
        total
    }
}

/// Replaces every bid `b[u][v]` with the largest bid of another bidder on `u`
/// that does not exceed it (0 when no such bidder exists).
pub fn to_first_price_bids(instance: &Instance) -> Result<Instance, ReductionError> {
    let nb = instance.num_bidders();
    Ok(instance.map_bids(|u, v, b| {
        let row = instance.bids_for(u);
        (0..nb)
            .filter(|&w| w != v && row[w] <= b)
            .map(|w| row[w])
            .max()
            .unwrap_or(0)
    })?)
}

/// The bidder `s(u, v)` whose original bid on `u` equals `v`'s transformed
/// bid; lowest index among ties.
pub fn second_price_partner(instance: &Instance, keyword: usize, bidder: usize) -> Option<usize> {
    let row = instance.bids_for(keyword);
    let own = row[bidder];
    let target = (0..row.len())
        .filter(|&w| w != bidder && row[w] <= own)
        .map(|w| row[w])
        .max()?;
    (0..row.len()).find(|&w| w != bidder && row[w] == target)
}

/// Drops, per bidder, every allocated keyword after the one whose cumulative
/// transformed bid first reaches the budget. Revenue is unchanged.
pub fn normalize_first_price(transformed: &Instance, alloc: &FirstPriceAllocation) -> FirstPriceAllocation {
    let mut spent: Vec<u128> = vec![0; transformed.num_bidders()];
    let winners = alloc
        .winners()
        .iter()
        .enumerate()
        .map(|(u, w)| {
            let v = (*w)?;
            let budget = transformed.budget(v) as u128;
            if spent[v] >= budget {
                return None;
            }
            spent[v] += transformed.bid(u, v) as u128;
            Some(v)
        })
        .collect();
    FirstPriceAllocation::new(winners)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BidderOutcome {
    pub bidder: usize,
    /// `S_v`: allocated keywords whose partner is marked.
    pub candidates: Vec<usize>,
    pub kept: Vec<usize>,
    pub over_budget: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomConstruction {
    pub marks: Vec<bool>,
    pub per_bidder: Vec<BidderOutcome>,
    pub trace: AuctionTrace,
}

/// Rounds a (normalized) first-price allocation on the transformed instance
/// into a second-price trace on `instance`, with each bidder marked by a
/// fair coin drawn from `seed`.
pub fn random_construction(
    instance: &Instance,
    alloc: &FirstPriceAllocation,
    seed: u64,
) -> Result<RandomConstruction, ReductionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let marks: Vec<bool> = (0..instance.num_bidders()).map(|_| rng.gen_bool(0.5)).collect();
    random_construction_with_marks(instance, alloc, &marks)
}

/// [`random_construction`] with an explicit marking.
pub fn random_construction_with_marks(
    instance: &Instance,
    alloc: &FirstPriceAllocation,
    marks: &[bool],
) -> Result<RandomConstruction, ReductionError> {
    if marks.len() != instance.num_bidders() || alloc.winners().len() != instance.num_keywords() {
        return Err(ReductionError::InvalidParams(
            "marks/allocation do not match the instance".into(),
        ));
    }
    let transformed = to_first_price_bids(instance)?;
    let mut actions = vec![Action::Skip; instance.num_keywords()];
    let mut per_bidder = Vec::new();
    for v in 0..instance.num_bidders() {
        if marks[v] {
            continue;
        }
        let mut candidates = Vec::new();
        for u in alloc.keywords_of(v) {
            if transformed.bid(u, v) == 0 {
                continue;
            }
            let s = second_price_partner(instance, u, v)
                .ok_or(ReductionError::UnresolvableSecondBidder { keyword: u, bidder: v })?;
            if marks[s] {
                candidates.push((u, s));
            }
        }
        if candidates.is_empty() {
            continue;
        }
        let pay = |set: &[(usize, usize)]| -> u128 { set.iter().map(|&(u, _)| transformed.bid(u, v) as u128).sum() };
        let budget = instance.budget(v) as u128;
        let over_budget = pay(&candidates) > budget;
        let kept: Vec<(usize, usize)> = if !over_budget {
            candidates.clone()
        } else {
            let (last, init) = candidates.split_last().expect("non-empty");
            if pay(init) >= transformed.bid(last.0, v) as u128 {
                init.to_vec()
            } else {
                vec![*last]
            }
        };
        for &(u, s) in &kept {
            actions[u] = Action::assign(v, s);
        }
        per_bidder.push(BidderOutcome {
            bidder: v,
            candidates: candidates.iter().map(|c| c.0).collect(),
            kept: kept.iter().map(|c| c.0).collect(),
            over_budget,
        });
    }
    let trace = execute(instance, &actions).map_err(ReductionError::InfeasibleTrace)?;
    Ok(RandomConstruction {
        marks: marks.to_vec(),
        per_bidder,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_keyword(bids: &[Money], budget: Money) -> Instance {
        let mut b = Instance::builder();
        let u = b.keyword("u");
        for (i, &x) in bids.iter().enumerate() {
            let v = b.bidder(format!("b{i}"), budget);
            b.bid(u, v, x).unwrap();
        }
        b.build().unwrap()
    }

    #[test]
    fn transformed_bids() {
        let t = to_first_price_bids(&one_keyword(&[5, 3, 3], 10)).unwrap();
        assert_eq!(t.bids_for(0), &[3, 3, 3]);
        let t = to_first_price_bids(&one_keyword(&[5], 10)).unwrap();
        assert_eq!(t.bids_for(0), &[0]);
        let t = to_first_price_bids(&Instance::zero_one(1, 3, [(0, 0), (0, 1), (0, 2)]).unwrap()).unwrap();
        assert_eq!(t.bids_for(0), &[1, 1, 1]);
    }

    #[test]
    fn partner_prefers_lowest_index() {
        let inst = one_keyword(&[5, 3, 3], 10);
        assert_eq!(second_price_partner(&inst, 0, 0), Some(1));
        assert_eq!(second_price_partner(&inst, 0, 2), Some(1));
        assert_eq!(second_price_partner(&inst, 0, 1), Some(2));
    }

    fn single_bidder_payments(payments: &[Money], budget: Money) -> (Instance, FirstPriceAllocation) {
        let mut b = Instance::builder();
        let v = b.bidder("v", budget);
        for (i, &p) in payments.iter().enumerate() {
            let u = b.keyword(format!("u{i}"));
            b.bid(u, v, p).unwrap();
        }
        let alloc = FirstPriceAllocation::new(vec![Some(v); payments.len()]);
        (b.build().unwrap(), alloc)
    }

    #[test]
    fn normalization_drops_trailing_keywords() {
        let (inst, alloc) = single_bidder_payments(&[3, 3, 2], 5);
        let norm = normalize_first_price(&inst, &alloc);
        assert_eq!(norm.winners(), &[Some(0), Some(0), None]);
        assert_eq!(alloc.value(&inst), 5);
        assert_eq!(norm.value(&inst), 5);

        let (inst, alloc) = single_bidder_payments(&[3, 1], 5);
        assert_eq!(normalize_first_price(&inst, &alloc), alloc);

        let (inst, _) = single_bidder_payments(&[], 5);
        let empty = FirstPriceAllocation::empty(0);
        assert_eq!(normalize_first_price(&inst, &empty), empty);
    }

    #[test]
    fn no_marked_partner_gives_nothing() {
        let inst = one_keyword(&[5, 3, 3], 10);
        let alloc = FirstPriceAllocation::new(vec![Some(0)]);
        let rc = random_construction_with_marks(&inst, &alloc, &[false, false, false]).unwrap();
        assert_eq!(rc.trace.value(), 0);
        let rc = random_construction_with_marks(&inst, &alloc, &[true, true, true]).unwrap();
        assert_eq!(rc.trace.value(), 0);
    }

    #[test]
    fn marked_partner_pays_transformed_bid() {
        let inst = one_keyword(&[5, 3, 3], 10);
        let alloc = FirstPriceAllocation::new(vec![Some(0)]);
        let rc = random_construction_with_marks(&inst, &alloc, &[false, true, false]).unwrap();
        assert_eq!(rc.trace.value(), 3);
        assert_eq!(rc.trace.steps[0].action, Action::assign(0, 1));
    }

    #[test]
    fn over_budget_branch_keeps_better_half() {
        // bidder 0 (budget 6) wins three keywords with partner 1 at bids 2, 3, 4
        let mut b = Instance::builder();
        let v = b.bidder("v", 6);
        let w = b.bidder("w", 6);
        for (i, x) in [2, 3, 4].into_iter().enumerate() {
            let u = b.keyword(format!("u{i}"));
            b.bid(u, v, x).unwrap();
            b.bid(u, w, x).unwrap();
        }
        let inst = b.build().unwrap();
        let alloc = FirstPriceAllocation::new(vec![Some(0); 3]);
        let rc = random_construction_with_marks(&inst, &alloc, &[false, true]).unwrap();
        // 2+3+4 > 6, prefix 2+3 >= 4 -> keep first two
        assert_eq!(rc.per_bidder[0].kept, vec![0, 1]);
        assert!(rc.per_bidder[0].over_budget);
        assert_eq!(rc.trace.value(), 5);
    }
}
