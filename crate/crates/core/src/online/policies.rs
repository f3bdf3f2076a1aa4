use super::{ArrivalView, OnlinePolicy};
use crate::model::Action;

/// Sells a keyword only when two bidders can still bid on it: the lowest
/// index wins and the next lowest sets the price.
#[derive(Debug, Default, Clone, Copy)]
pub struct Greedy;

impl OnlinePolicy for Greedy {
    fn name(&self) -> &str {
        "greedy"
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn start(&mut self, _num_bidders: usize, _seed: u64) {}

    fn decide(&mut self, view: &ArrivalView<'_>) -> Action {
        let mut avail = view.available();
        match (avail.next(), avail.next()) {
            (Some(a), Some(b)) => view.ordered_pair(a, b),
            _ => Action::Skip,
        }
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SkipAll;

impl OnlinePolicy for SkipAll {
    fn name(&self) -> &str {
        "skip-all"
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn start(&mut self, _num_bidders: usize, _seed: u64) {}

    fn decide(&mut self, _view: &ArrivalView<'_>) -> Action {
        Action::Skip
    }
}

/// Sells every keyword it can: highest-index available bidder wins, the
/// lowest-index other available bidder sets the price.
#[derive(Debug, Default, Clone, Copy)]
pub struct FirstAvailable;

impl OnlinePolicy for FirstAvailable {
    fn name(&self) -> &str {
        "first-available"
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn start(&mut self, _num_bidders: usize, _seed: u64) {}

    fn decide(&mut self, view: &ArrivalView<'_>) -> Action {
        let avail: Vec<usize> = view.available().collect();
        match avail[..] {
            [] | [_] => Action::Skip,
            [lo, .., hi] => view.ordered_pair(hi, lo),
        }
    }
}
