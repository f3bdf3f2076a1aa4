//! Instance data model and the exact second-price execution semantics.
//!
//! Keywords are processed strictly in arrival order. For keyword `t` the
//! allocator names an ordered pair `(first, second)`; `first` wins the slot
//! and pays the *effective* bid of `second`, where an effective bid is the
//! original bid truncated to the bidder's remaining budget. Only the winner
//! is debited.

use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

/// Exact monetary amount. Arithmetic on money is checked everywhere.
pub type Money = u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("duplicate keyword id `{0}`")]
    DuplicateKeyword(String),
    #[error("duplicate bidder id `{0}`")]
    DuplicateBidder(String),
    #[error("bid {bid} of bidder `{bidder}` on keyword `{keyword}` exceeds budget {budget}")]
    BidExceedsBudget {
        keyword: String,
        bidder: String,
        bid: Money,
        budget: Money,
    },
    #[error("bid matrix has {got} rows/columns, expected {expected}")]
    Shape { expected: usize, got: usize },
    #[error("index {index} out of range ({len} {what})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error("instance has no strictly positive bid")]
    NoPositiveBids,
    #[error("arithmetic overflow while {0}")]
    Overflow(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExecError {
    #[error("expected one action per keyword ({expected}), got {got}")]
    ActionCountMismatch { expected: usize, got: usize },
    #[error("step {step}: unknown bidder index {bidder}")]
    UnknownBidder { step: usize, bidder: usize },
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("step {step}: bidder {bidder} cannot be both first and second")]
    SameBidder { step: usize, bidder: usize },
    #[error(
        "step {step}: effective bid {first_bid} of first bidder {first} is below \
         effective bid {second_bid} of second bidder {second}"
    )]
    OrderingViolation {
        step: usize,
        first: usize,
        second: usize,
        first_bid: Money,
        second_bid: Money,
    },
    #[error("all keywords already processed")]
    Exhausted,
    #[error("total value overflows")]
    Overflow,
}

/// `min(original_bid, remaining_budget)`.
#[inline]
pub fn effective_bid(original_bid: Money, remaining_budget: Money) -> Money {
    original_bid.min(remaining_budget)
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Bidder {
    pub id: String,
    pub budget: Money,
}

/// An auction instance: keywords in arrival order, bidders with budgets and
/// a dense non-negative bid matrix (row per keyword).
///
/// Construction enforces unique ids and `bid <= budget`; once built the
/// instance is immutable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    keywords: Vec<String>,
    bidders: Vec<Bidder>,
    bids: Vec<Money>,
}

impl Instance {
    /// Builds an instance from a dense `keywords x bidders` bid matrix.
    pub fn from_matrix(
        keywords: Vec<String>,
        bidders: Vec<Bidder>,
        matrix: Vec<Vec<Money>>,
    ) -> Result<Self, ModelError> {
        if matrix.len() != keywords.len() {
            return Err(ModelError::Shape {
                expected: keywords.len(),
                got: matrix.len(),
            });
        }
        let nb = bidders.len();
        let mut bids = Vec::with_capacity(keywords.len() * nb);
        for row in matrix {
            if row.len() != nb {
                return Err(ModelError::Shape {
                    expected: nb,
                    got: row.len(),
                });
            }
            bids.extend(row);
        }
        Self::from_parts(keywords, bidders, bids)
    }

    fn from_parts(keywords: Vec<String>, bidders: Vec<Bidder>, bids: Vec<Money>) -> Result<Self, ModelError> {
        let mut seen = HashMap::new();
        for k in &keywords {
            if seen.insert(k.as_str(), ()).is_some() {
                return Err(ModelError::DuplicateKeyword(k.clone()));
            }
        }
        seen.clear();
        for b in &bidders {
            if seen.insert(b.id.as_str(), ()).is_some() {
                return Err(ModelError::DuplicateBidder(b.id.clone()));
            }
        }
        let nb = bidders.len();
        for (u, k) in keywords.iter().enumerate() {
            for (v, b) in bidders.iter().enumerate() {
                let bid = bids[u * nb + v];
                if bid > b.budget {
                    return Err(ModelError::BidExceedsBudget {
                        keyword: k.clone(),
                        bidder: b.id.clone(),
                        bid,
                        budget: b.budget,
                    });
                }
            }
        }
        Ok(Self {
            keywords,
            bidders,
            bids,
        })
    }

    pub fn builder() -> InstanceBuilder {
        InstanceBuilder::default()
    }

    /// All-ones instance: unit budgets, and a unit bid for every listed
    /// `(keyword, bidder)` edge.
    pub fn zero_one(
        num_keywords: usize,
        num_bidders: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ModelError> {
        let mut b = Self::builder();
        for u in 0..num_keywords {
            b.keyword(format!("u{u}"));
        }
        for v in 0..num_bidders {
            b.bidder(format!("v{v}"), 1);
        }
        for (u, v) in edges {
            b.bid(u, v, 1)?;
        }
        b.build()
    }

    pub fn num_keywords(&self) -> usize {
        self.keywords.len()
    }

    pub fn num_bidders(&self) -> usize {
        self.bidders.len()
    }

    pub fn keyword_id(&self, u: usize) -> &str {
        &self.keywords[u]
    }

    pub fn keyword_ids(&self) -> &[String] {
        &self.keywords
    }

    pub fn bidder(&self, v: usize) -> &Bidder {
        &self.bidders[v]
    }

    pub fn bidders(&self) -> &[Bidder] {
        &self.bidders
    }

    pub fn budget(&self, v: usize) -> Money {
        self.bidders[v].budget
    }

    pub fn budgets(&self) -> Vec<Money> {
        self.bidders.iter().map(|b| b.budget).collect()
    }

    #[inline]
    pub fn bid(&self, u: usize, v: usize) -> Money {
        self.bids[u * self.bidders.len() + v]
    }

    /// Original bids of every bidder on keyword `u`, indexed by bidder.
    pub fn bids_for(&self, u: usize) -> &[Money] {
        let nb = self.bidders.len();
        &self.bids[u * nb..(u + 1) * nb]
    }

    /// Bidders with a strictly positive bid on `u`, in index order.
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.bids_for(u)
            .iter()
            .enumerate()
            .filter(|(_, &b)| b > 0)
            .map(|(v, _)| v)
    }

    pub fn degree(&self, u: usize) -> usize {
        self.neighbors(u).count()
    }

    pub fn keyword_index(&self, id: &str) -> Option<usize> {
        self.keywords.iter().position(|k| k == id)
    }

    pub fn bidder_index(&self, id: &str) -> Option<usize> {
        self.bidders.iter().position(|b| b.id == id)
    }

    /// True when every budget is 1 and every bid is 0 or 1 (a 2PM instance).
    pub fn is_zero_one(&self) -> bool {
        self.bidders.iter().all(|b| b.budget == 1) && self.bids.iter().all(|&b| b <= 1)
    }

    pub fn has_positive_bid(&self) -> bool {
        self.bids.iter().any(|&b| b > 0)
    }

    /// Second-highest original bid on `u` (0 with fewer than two positive bids).
    pub fn second_highest_bid(&self, u: usize) -> Money {
        let (mut hi, mut second) = (0, 0);
        for &b in self.bids_for(u) {
            if b > hi {
                second = hi;
                hi = b;
            } else if b > second {
                second = b;
            }
        }
        second
    }

    /// Minimum of `budget / bid` over all strictly positive bids, exactly.
    pub fn r_min(&self) -> Result<Ratio<Money>, ModelError> {
        let nb = self.bidders.len();
        let mut best: Option<Ratio<Money>> = None;
        for (i, &bid) in self.bids.iter().enumerate() {
            if bid == 0 {
                continue;
            }
            let r = Ratio::new(self.bidders[i % nb].budget, bid);
            best = Some(match best {
                Some(b) if b <= r => b,
                _ => r,
            });
        }
        best.ok_or(ModelError::NoPositiveBids)
    }

    /// Same keywords, bidders and budgets with every bid replaced by `f(u, v, bid)`.
    pub(crate) fn map_bids(&self, mut f: impl FnMut(usize, usize, Money) -> Money) -> Result<Self, ModelError> {
        let nb = self.bidders.len();
        let bids = self
            .bids
            .iter()
            .enumerate()
            .map(|(i, &b)| f(i / nb, i % nb, b))
            .collect();
        Self::from_parts(self.keywords.clone(), self.bidders.clone(), bids)
    }

    /// Sub-instance keeping the listed keywords (in the given order) and
    /// all bidders.
    pub fn select_keywords(&self, keep: &[usize]) -> Result<Self, ModelError> {
        let mut bids = Vec::with_capacity(keep.len() * self.num_bidders());
        let mut keywords = Vec::with_capacity(keep.len());
        for &u in keep {
            if u >= self.num_keywords() {
                return Err(ModelError::IndexOutOfRange {
                    what: "keywords",
                    index: u,
                    len: self.num_keywords(),
                });
            }
            keywords.push(self.keywords[u].clone());
            bids.extend_from_slice(self.bids_for(u));
        }
        Self::from_parts(keywords, self.bidders.clone(), bids)
    }
}

/// Incremental construction by index; used by generators and reductions.
#[derive(Debug, Default)]
pub struct InstanceBuilder {
    keywords: Vec<String>,
    bidders: Vec<Bidder>,
    entries: Vec<(usize, usize, Money)>,
}

impl InstanceBuilder {
    pub fn keyword(&mut self, id: impl Into<String>) -> usize {
        self.keywords.push(id.into());
        self.keywords.len() - 1
    }

    pub fn bidder(&mut self, id: impl Into<String>, budget: Money) -> usize {
        self.bidders.push(Bidder { id: id.into(), budget });
        self.bidders.len() - 1
    }

    pub fn bid(&mut self, keyword: usize, bidder: usize, amount: Money) -> Result<(), ModelError> {
        if keyword >= self.keywords.len() {
            return Err(ModelError::IndexOutOfRange {
                what: "keywords",
                index: keyword,
                len: self.keywords.len(),
            });
        }
        if bidder >= self.bidders.len() {
            return Err(ModelError::IndexOutOfRange {
                what: "bidders",
                index: bidder,
                len: self.bidders.len(),
            });
        }
        self.entries.push((keyword, bidder, amount));
        Ok(())
    }

    pub fn num_keywords(&self) -> usize {
        self.keywords.len()
    }

    pub fn num_bidders(&self) -> usize {
        self.bidders.len()
    }

    /// Later bids on the same `(keyword, bidder)` overwrite earlier ones.
    pub fn build(self) -> Result<Instance, ModelError> {
        let nb = self.bidders.len();
        let mut bids = vec![0; self.keywords.len() * nb];
        for (u, v, amount) in self.entries {
            bids[u * nb + v] = amount;
        }
        Instance::from_parts(self.keywords, self.bidders, bids)
    }
}

/// Either skip the keyword or run a two-bidder second-price auction on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Skip,
    Assign { first: usize, second: usize },
}

impl Action {
    pub fn assign(first: usize, second: usize) -> Self {
        Action::Assign { first, second }
    }

    pub fn first(&self) -> Option<usize> {
        match *self {
            Action::Skip => None,
            Action::Assign { first, .. } => Some(first),
        }
    }
}

/// Remaining budgets `B_v(t)` after `step` keywords have been processed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetState {
    remaining: Vec<Money>,
    step: usize,
}

impl BudgetState {
    pub fn new(instance: &Instance) -> Self {
        Self {
            remaining: instance.budgets(),
            step: 0,
        }
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn remaining(&self) -> &[Money] {
        &self.remaining
    }

    pub fn remaining_of(&self, v: usize) -> Money {
        self.remaining[v]
    }

    /// Effective bid of `v` on keyword `u` under the current budgets.
    pub fn effective_bid(&self, instance: &Instance, u: usize, v: usize) -> Money {
        effective_bid(instance.bid(u, v), self.remaining[v])
    }

    /// Processes the next keyword (index `self.step()`) and returns its price.
    pub fn apply(&mut self, instance: &Instance, action: Action) -> Result<Money, ExecError> {
        let step = self.step;
        if step >= instance.num_keywords() {
            return Err(ExecError::Exhausted);
        }
        let price = self.price_of(instance, action)?;
        if let Action::Assign { first, .. } = action {
            // price <= effective bid of first <= remaining budget
            self.remaining[first] -= price;
        }
        self.step += 1;
        Ok(price)
    }

    /// Price the next keyword would fetch under `action`, without applying it.
    pub fn price_of(&self, instance: &Instance, action: Action) -> Result<Money, ExecError> {
        let step = self.step;
        match action {
            Action::Skip => Ok(0),
            Action::Assign { first, second } => {
                let nb = instance.num_bidders();
                for bidder in [first, second] {
                    if bidder >= nb {
                        return Err(ExecError::UnknownBidder { step, bidder });
                    }
                }
                if first == second {
                    return Err(ExecError::SameBidder { step, bidder: first });
                }
                let first_bid = self.effective_bid(instance, step, first);
                let second_bid = self.effective_bid(instance, step, second);
                if first_bid < second_bid {
                    return Err(ExecError::OrderingViolation {
                        step,
                        first,
                        second,
                        first_bid,
                        second_bid,
                    });
                }
                Ok(second_bid)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceStep {
    pub keyword: usize,
    pub action: Action,
    pub price: Money,
}

/// Executed allocation: one step per keyword in arrival order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuctionTrace {
    pub steps: Vec<TraceStep>,
    pub total: Money,
    pub final_budgets: Vec<Money>,
}

impl AuctionTrace {
    pub fn value(&self) -> Money {
        self.total
    }

    pub fn actions(&self) -> Vec<Action> {
        self.steps.iter().map(|s| s.action).collect()
    }

    /// Number of keywords sold for a strictly positive price.
    pub fn profitable_count(&self) -> usize {
        self.steps.iter().filter(|s| s.price > 0).count()
    }

    /// Remaining budgets after the first `steps` keywords.
    pub fn budgets_after(&self, instance: &Instance, steps: usize) -> Vec<Money> {
        let mut budgets = instance.budgets();
        for s in self.steps.iter().take(steps) {
            if let Action::Assign { first, .. } = s.action {
                budgets[first] -= s.price;
            }
        }
        budgets
    }
}

impl fmt::Display for AuctionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            match s.action {
                Action::Skip => writeln!(f, "{}: skip", s.keyword)?,
                Action::Assign { first, second } => {
                    writeln!(f, "{}: {} <- {} @ {}", s.keyword, first, second, s.price)?
                }
            }
        }
        write!(f, "total {}", self.total)
    }
}

/// Runs `actions` (one per keyword, arrival order) against `instance`.
pub fn execute(instance: &Instance, actions: &[Action]) -> Result<AuctionTrace, ExecError> {
    if actions.len() != instance.num_keywords() {
        return Err(ExecError::ActionCountMismatch {
            expected: instance.num_keywords(),
            got: actions.len(),
        });
    }
    let mut state = BudgetState::new(instance);
    let mut steps = Vec::with_capacity(actions.len());
    let mut total: Money = 0;
    for (keyword, &action) in actions.iter().enumerate() {
        let price = state.apply(instance, action)?;
        total = total.checked_add(price).ok_or(ExecError::Overflow)?;
        steps.push(TraceStep { keyword, action, price });
    }
    Ok(AuctionTrace {
        steps,
        total,
        final_budgets: state.remaining,
    })
}
