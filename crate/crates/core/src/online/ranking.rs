use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ArrivalView, MatchView, MatchingPolicy, OnlinePolicy};
use crate::model::Action;

/// Uniform ranking: `sigma[v]` is the rank of bidder `v` (0 is best).
fn random_sigma(num_bidders: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..num_bidders).collect();
    order.shuffle(&mut rng);
    let mut sigma = vec![0; num_bidders];
    for (rank, &v) in order.iter().enumerate() {
        sigma[v] = rank;
    }
    sigma
}

fn check_sigma(sigma: &[usize]) {
    let mut seen = vec![false; sigma.len()];
    for &r in sigma {
        assert!(r < sigma.len() && !seen[r], "sigma must be a permutation");
        seen[r] = true;
    }
}

/// Matches each keyword to its best-ranked unmatched neighbour.
#[derive(Debug, Clone, Default)]
pub struct Ranking {
    fixed: Option<Vec<usize>>,
    sigma: Vec<usize>,
}

impl Ranking {
    /// Ranking drawn from the run seed.
    pub fn new() -> Self {
        Self::default()
    }

    /// Ranking fixed in advance; the run seed is ignored.
    pub fn with_sigma(sigma: Vec<usize>) -> Self {
        check_sigma(&sigma);
        Self {
            fixed: Some(sigma),
            sigma: Vec::new(),
        }
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }
}

impl MatchingPolicy for Ranking {
    fn name(&self) -> &str {
        "ranking"
    }

    fn start(&mut self, num_bidders: usize, seed: u64) {
        self.sigma = match &self.fixed {
            Some(s) => {
                assert_eq!(s.len(), num_bidders, "sigma does not match the instance");
                s.clone()
            }
            None => random_sigma(num_bidders, seed),
        };
    }

    fn choose(&mut self, view: &MatchView<'_>) -> Option<usize> {
        view.available().min_by_key(|&v| self.sigma[v])
    }
}

enum Coins {
    Seeded(Box<ChaCha8Rng>),
    Script(std::vec::IntoIter<bool>),
}

impl Coins {
    fn flip(&mut self) -> bool {
        match self {
            Coins::Seeded(rng) => rng.gen_bool(0.5),
            Coins::Script(it) => it.next().expect("coin script exhausted"),
        }
    }
}

/// Randomized second-price matching that mirrors Ranking on the left 2-copy:
/// the two best-ranked free neighbours are taken, one matched and one
/// reserved, by a fair coin.
///
/// A match earns its keyword only if some other neighbour is outside `M`
/// at that moment; otherwise the keyword is skipped but the bidder still
/// joins `M`.
pub struct RankingSimulate {
    fixed_sigma: Option<Vec<usize>>,
    script: Option<Vec<bool>>,
    sigma: Vec<usize>,
    coins: Option<Coins>,
    in_m: Vec<bool>,
    in_r: Vec<bool>,
    matched_to: Vec<Option<usize>>,
}

impl Default for RankingSimulate {
    fn default() -> Self {
        Self::new()
    }
}

impl RankingSimulate {
    pub fn new() -> Self {
        Self {
            fixed_sigma: None,
            script: None,
            sigma: Vec::new(),
            coins: None,
            in_m: Vec::new(),
            in_r: Vec::new(),
            matched_to: Vec::new(),
        }
    }

    /// Fixed ranking and coin sequence (`true` takes the first branch of each
    /// draw); used to enumerate outcomes exactly.
    pub fn scripted(sigma: Vec<usize>, coins: Vec<bool>) -> Self {
        check_sigma(&sigma);
        Self {
            fixed_sigma: Some(sigma),
            script: Some(coins),
            ..Self::new()
        }
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    /// Membership in `M`, by bidder.
    pub fn matched(&self) -> &[bool] {
        &self.in_m
    }

    /// Membership in `R`, by bidder.
    pub fn reserved(&self) -> &[bool] {
        &self.in_r
    }

    /// Bidder matched to each keyword so far (first-price view).
    pub fn matched_to(&self) -> &[Option<usize>] {
        &self.matched_to
    }

    fn flip(&mut self) -> bool {
        self.coins.as_mut().expect("start() not called").flip()
    }

    fn take(&mut self, view: &ArrivalView<'_>, winner: usize) -> Action {
        self.in_m[winner] = true;
        self.matched_to.push(Some(winner));
        // on 0/1 inputs every candidate qualifies; the effective-bid cap only
        // matters for weighted instances
        let cap = view.effective_bid(winner);
        let second = (0..view.bids.len())
            .filter(|&w| w != winner && view.bids[w] > 0 && !self.in_m[w] && view.effective_bid(w) <= cap)
            .min_by_key(|&w| self.sigma[w]);
        match second {
            Some(w) => Action::assign(winner, w),
            None => Action::Skip,
        }
    }
}

impl OnlinePolicy for RankingSimulate {
    fn name(&self) -> &str {
        "ranking-simulate"
    }

    fn is_deterministic(&self) -> bool {
        false
    }

    fn start(&mut self, num_bidders: usize, seed: u64) {
        self.sigma = match &self.fixed_sigma {
            Some(s) => {
                assert_eq!(s.len(), num_bidders, "sigma does not match the instance");
                s.clone()
            }
            None => random_sigma(num_bidders, seed),
        };
        self.coins = Some(match &self.script {
            Some(c) => Coins::Script(c.clone().into_iter()),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(1);
                Coins::Seeded(Box::new(rng))
            }
        });
        self.in_m = vec![false; num_bidders];
        self.in_r = vec![false; num_bidders];
        self.matched_to.clear();
    }

    fn decide(&mut self, view: &ArrivalView<'_>) -> Action {
        let mut free: Vec<usize> = (0..view.bids.len())
            .filter(|&v| view.bids[v] > 0 && !self.in_m[v] && !self.in_r[v])
            .collect();
        free.sort_by_key(|&v| self.sigma[v]);
        let action = match free[..] {
            [] => {
                self.matched_to.push(None);
                Action::Skip
            }
            [v] => {
                if self.flip() {
                    self.take(view, v)
                } else {
                    self.in_r[v] = true;
                    self.matched_to.push(None);
                    Action::Skip
                }
            }
            [v1, v2, ..] => {
                let (win, keep) = if self.flip() { (v1, v2) } else { (v2, v1) };
                self.in_r[keep] = true;
                self.take(view, win)
            }
        };
        debug_assert!(self.in_m.iter().zip(&self.in_r).all(|(m, r)| !(m & r)));
        action
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Instance;
    use crate::online::{run_online, run_online_matching};

    #[test]
    fn ranking_on_complete_graph() {
        let k22 = Instance::zero_one(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        for sigma in [vec![0, 1], vec![1, 0]] {
            let m = run_online_matching(&k22, &mut Ranking::with_sigma(sigma), 0).unwrap();
            assert_eq!(m.size(), 2);
        }
    }

    #[test]
    fn ranking_expectation_over_both_rankings() {
        let inst = Instance::zero_one(2, 2, [(0, 0), (0, 1), (1, 1)]).unwrap();
        let total: usize = [vec![0, 1], vec![1, 0]]
            .into_iter()
            .map(|s| {
                run_online_matching(&inst, &mut Ranking::with_sigma(s), 0)
                    .unwrap()
                    .size()
            })
            .sum();
        assert_eq!(total, 3); // mean 1.5
    }

    #[test]
    fn simulate_single_keyword_always_profits() {
        let inst = Instance::zero_one(1, 2, [(0, 0), (0, 1)]).unwrap();
        for coin in [true, false] {
            let mut p = RankingSimulate::scripted(vec![0, 1], vec![coin]);
            assert_eq!(run_online(&inst, &mut p, 0).unwrap().value(), 1);
            assert_eq!(p.matched().iter().filter(|&&m| m).count(), 1);
            assert_eq!(p.reserved().iter().filter(|&&r| r).count(), 1);
        }
    }

    #[test]
    fn simulate_second_keyword_sees_nothing() {
        let inst = Instance::zero_one(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        for sigma in [vec![0, 1], vec![1, 0]] {
            for coin in [true, false] {
                let mut p = RankingSimulate::scripted(sigma.clone(), vec![coin]);
                let t = run_online(&inst, &mut p, 0).unwrap();
                assert_eq!(t.value(), 1);
                assert_eq!(t.steps[1].action, Action::Skip);
            }
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let inst = Instance::zero_one(3, 4, [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 3), (2, 0)]).unwrap();
        let a = run_online(&inst, &mut RankingSimulate::new(), 42).unwrap();
        let b = run_online(&inst, &mut RankingSimulate::new(), 42).unwrap();
        assert_eq!(a, b);
    }
}
