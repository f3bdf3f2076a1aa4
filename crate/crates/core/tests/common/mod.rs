//! Brute-force reference implementations shared by the integration tests.
//! None of them call into the library's executor or oracles.

#![allow(dead_code)]

use auctionlab::{Bidder, Instance, Money};
use proptest::prelude::*;

/// Exhaustive second-price optimum, with its own copy of the pricing rule:
/// `first` must have effective bid >= `second`'s, pays `second`'s effective bid.
pub fn brute_2paa(inst: &Instance) -> Money {
    fn go(inst: &Instance, u: usize, budgets: &mut Vec<Money>) -> Money {
        if u == inst.num_keywords() {
            return 0;
        }
        let mut best = go(inst, u + 1, budgets);
        let nb = inst.num_bidders();
        for a in 0..nb {
            for b in 0..nb {
                if a == b {
                    continue;
                }
                let ea = inst.bid(u, a).min(budgets[a]);
                let eb = inst.bid(u, b).min(budgets[b]);
                // a zero price leaves every budget as a skip would
                if ea < eb || eb == 0 {
                    continue;
                }
                budgets[a] -= eb;
                best = best.max(eb + go(inst, u + 1, budgets));
                budgets[a] += eb;
            }
        }
        best
    }
    go(inst, 0, &mut inst.budgets())
}

/// Like [`brute_2paa`], restricted to pairs whose original bids are ordered
/// the same way as their effective bids (`b_first >= b_second`).
pub fn brute_2paa_bid_ordered(inst: &Instance) -> Money {
    fn go(inst: &Instance, u: usize, budgets: &mut Vec<Money>) -> Money {
        if u == inst.num_keywords() {
            return 0;
        }
        let mut best = go(inst, u + 1, budgets);
        let nb = inst.num_bidders();
        for a in 0..nb {
            for b in 0..nb {
                let ea = inst.bid(u, a).min(budgets[a]);
                let eb = inst.bid(u, b).min(budgets[b]);
                if a == b || ea < eb || eb == 0 || inst.bid(u, a) < inst.bid(u, b) {
                    continue;
                }
                budgets[a] -= eb;
                best = best.max(eb + go(inst, u + 1, budgets));
                budgets[a] += eb;
            }
        }
        best
    }
    go(inst, 0, &mut inst.budgets())
}

/// Exhaustive first-price optimum: the winner pays `min(bid, remaining)`.
pub fn brute_1paa(inst: &Instance) -> Money {
    fn go(inst: &Instance, u: usize, budgets: &mut Vec<Money>) -> Money {
        if u == inst.num_keywords() {
            return 0;
        }
        let mut best = go(inst, u + 1, budgets);
        for a in 0..inst.num_bidders() {
            let pay = inst.bid(u, a).min(budgets[a]);
            if pay == 0 {
                continue;
            }
            budgets[a] -= pay;
            best = best.max(pay + go(inst, u + 1, budgets));
            budgets[a] += pay;
        }
        best
    }
    go(inst, 0, &mut inst.budgets())
}

/// Exhaustive maximum matching over positive-bid edges.
pub fn brute_matching(inst: &Instance) -> usize {
    fn go(inst: &Instance, u: usize, used: &mut Vec<bool>) -> usize {
        if u == inst.num_keywords() {
            return 0;
        }
        let mut best = go(inst, u + 1, used);
        for v in 0..inst.num_bidders() {
            if inst.bid(u, v) > 0 && !used[v] {
                used[v] = true;
                best = best.max(1 + go(inst, u + 1, used));
                used[v] = false;
            }
        }
        best
    }
    go(inst, 0, &mut vec![false; inst.num_bidders()])
}

/// Smallest vertex cover by subset enumeration.
pub fn brute_vertex_cover(n: usize, edges: &[(usize, usize)]) -> usize {
    (0u32..1 << n)
        .filter(|mask| edges.iter().all(|&(a, b)| mask & (1 << a) != 0 || mask & (1 << b) != 0))
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}

pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(a, b) in edges {
            for (p, q) in [(a, b), (b, a)] {
                if p == x && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Every labelled connected simple graph on `n` vertices.
pub fn connected_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let all: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    (0u32..1 << all.len())
        .map(|mask| {
            all.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &e)| e)
                .collect::<Vec<_>>()
        })
        .filter(|edges| is_connected(n, edges))
        .collect()
}

pub fn matrix_instance(budgets: &[Money], rows: Vec<Vec<Money>>) -> Instance {
    let keywords = (0..rows.len()).map(|u| format!("k{u}")).collect();
    let bidders = budgets
        .iter()
        .enumerate()
        .map(|(v, &budget)| Bidder {
            id: format!("b{v}"),
            budget,
        })
        .collect();
    Instance::from_matrix(keywords, bidders, rows).unwrap()
}

/// Small general instances; bids are clamped to the bidder's budget.
pub fn small_instance(max_k: usize, max_b: usize, max_money: Money) -> impl Strategy<Value = Instance> {
    (1..=max_k, 2..=max_b).prop_flat_map(move |(nk, nb)| {
        (
            prop::collection::vec(1..=max_money, nb),
            prop::collection::vec(prop::collection::vec(0..=max_money, nb), nk),
        )
            .prop_map(|(budgets, mut rows)| {
                for row in &mut rows {
                    for (v, b) in row.iter_mut().enumerate() {
                        *b = (*b).min(budgets[v]);
                    }
                }
                matrix_instance(&budgets, rows)
            })
    })
}

/// Small 0/1 instances given by an edge mask.
pub fn small_zero_one(max_k: usize, max_b: usize) -> impl Strategy<Value = Instance> {
    (1..=max_k, 1..=max_b).prop_flat_map(|(nk, nb)| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), nb), nk).prop_map(move |adj| {
            let edges = adj
                .iter()
                .enumerate()
                .flat_map(|(u, row)| row.iter().enumerate().filter(|(_, &e)| e).map(move |(v, _)| (u, v)));
            Instance::zero_one(nk, nb, edges).unwrap()
        })
    })
}
