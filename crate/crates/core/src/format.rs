//! On-disk documents: instances, traces, matchings and edge-list graphs.
//!
//! Amounts in instance documents are read as wide signed integers so that
//! negative or out-of-range values can be reported by [`validate`] instead of
//! failing at parse time.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Action, AuctionTrace, Bidder, ExecError, Instance, Money};
use crate::oracles::Matching;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),
    #[error("graph line {line}: {msg}")]
    Graph { line: usize, msg: String },
    #[error(transparent)]
    Exec(#[from] ExecError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BidderDoc {
    pub id: String,
    pub budget: i128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BidDoc {
    pub keyword: String,
    pub bidder: String,
    pub amount: i128,
}

/// Serialized instance: `keywords` in arrival order, `bidders`, sparse `bids`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub keywords: Vec<String>,
    pub bidders: Vec<BidderDoc>,
    #[serde(default)]
    pub bids: Vec<BidDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateKeyword {
        keyword: String,
    },
    DuplicateBidder {
        bidder: String,
    },
    DuplicateBid {
        keyword: String,
        bidder: String,
    },
    UnknownKeyword {
        keyword: String,
    },
    UnknownBidder {
        bidder: String,
    },
    NegativeBudget {
        bidder: String,
        budget: i128,
    },
    NegativeBid {
        keyword: String,
        bidder: String,
        amount: i128,
    },
    OutOfRange {
        what: String,
        value: i128,
    },
    BidExceedsBudget {
        keyword: String,
        bidder: String,
        amount: i128,
        budget: i128,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateKeyword { keyword } => write!(f, "duplicate keyword id `{keyword}`"),
            Violation::DuplicateBidder { bidder } => write!(f, "duplicate bidder id `{bidder}`"),
            Violation::DuplicateBid { keyword, bidder } => {
                write!(f, "duplicate bid entry ({keyword}, {bidder})")
            }
            Violation::UnknownKeyword { keyword } => write!(f, "bid on unknown keyword `{keyword}`"),
            Violation::UnknownBidder { bidder } => write!(f, "bid by unknown bidder `{bidder}`"),
            Violation::NegativeBudget { bidder, budget } => {
                write!(f, "negative budget {budget} for `{bidder}`")
            }
            Violation::NegativeBid {
                keyword,
                bidder,
                amount,
            } => {
                write!(f, "negative bid {amount} by `{bidder}` on `{keyword}`")
            }
            Violation::OutOfRange { what, value } => write!(f, "{what} {value} out of range"),
            Violation::BidExceedsBudget {
                keyword,
                bidder,
                amount,
                budget,
            } => write!(
                f,
                "bid exceeds budget: `{bidder}` bids {amount} on `{keyword}` with budget {budget}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// A 0/1 instance keyword that can never be sold for profit.
    LowDegree { keyword: String, degree: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::LowDegree { keyword, degree } => {
                write!(f, "keyword `{keyword}` has degree {degree} < 2")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.violations {
            if !first {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        for w in &self.warnings {
            if !first {
                write!(f, "; ")?;
            }
            write!(f, "warning: {w}")?;
            first = false;
        }
        Ok(())
    }
}

fn money_in_range(x: i128) -> bool {
    x >= 0 && x <= Money::MAX as i128
}

/// Lists every violation of the instance invariants, plus degree warnings
/// for 0/1-shaped instances.
pub fn validate(doc: &InstanceDoc) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut keyword_seen = HashSet::new();
    for k in &doc.keywords {
        if !keyword_seen.insert(k.as_str()) {
            report
                .violations
                .push(Violation::DuplicateKeyword { keyword: k.clone() });
        }
    }
    let mut budgets: HashMap<&str, i128> = HashMap::new();
    for b in &doc.bidders {
        if budgets.insert(b.id.as_str(), b.budget).is_some() {
            report
                .violations
                .push(Violation::DuplicateBidder { bidder: b.id.clone() });
        }
        if b.budget < 0 {
            report.violations.push(Violation::NegativeBudget {
                bidder: b.id.clone(),
                budget: b.budget,
            });
        } else if !money_in_range(b.budget) {
            report.violations.push(Violation::OutOfRange {
                what: format!("budget of `{}`", b.id),
                value: b.budget,
            });
        }
    }
    let mut pairs = HashSet::new();
    let mut degree: HashMap<&str, usize> = HashMap::new();
    for bid in &doc.bids {
        if !keyword_seen.contains(bid.keyword.as_str()) {
            report.violations.push(Violation::UnknownKeyword {
                keyword: bid.keyword.clone(),
            });
            continue;
        }
        let Some(&budget) = budgets.get(bid.bidder.as_str()) else {
            report.violations.push(Violation::UnknownBidder {
                bidder: bid.bidder.clone(),
            });
            continue;
        };
        if !pairs.insert((bid.keyword.as_str(), bid.bidder.as_str())) {
            report.violations.push(Violation::DuplicateBid {
                keyword: bid.keyword.clone(),
                bidder: bid.bidder.clone(),
            });
        }
        if bid.amount < 0 {
            report.violations.push(Violation::NegativeBid {
                keyword: bid.keyword.clone(),
                bidder: bid.bidder.clone(),
                amount: bid.amount,
            });
            continue;
        }
        if !money_in_range(bid.amount) {
            report.violations.push(Violation::OutOfRange {
                what: format!("bid of `{}` on `{}`", bid.bidder, bid.keyword),
                value: bid.amount,
            });
        }
        if bid.amount > budget {
            report.violations.push(Violation::BidExceedsBudget {
                keyword: bid.keyword.clone(),
                bidder: bid.bidder.clone(),
                amount: bid.amount,
                budget,
            });
        }
        if bid.amount > 0 {
            *degree.entry(bid.keyword.as_str()).or_default() += 1;
        }
    }
    let zero_one = doc.bidders.iter().all(|b| b.budget == 1) && doc.bids.iter().all(|b| b.amount <= 1);
    if zero_one {
        for k in &doc.keywords {
            let d = degree.get(k.as_str()).copied().unwrap_or(0);
            if d < 2 {
                report.warnings.push(Warning::LowDegree {
                    keyword: k.clone(),
                    degree: d,
                });
            }
        }
    }
    report
}

/// Validation of an already-built instance (degree warnings only can fire).
pub fn validate_instance(instance: &Instance) -> ValidationReport {
    validate(&InstanceDoc::from(instance))
}

impl From<&Instance> for InstanceDoc {
    fn from(inst: &Instance) -> Self {
        let mut bids = Vec::new();
        for u in 0..inst.num_keywords() {
            for v in inst.neighbors(u) {
                bids.push(BidDoc {
                    keyword: inst.keyword_id(u).to_string(),
                    bidder: inst.bidder(v).id.clone(),
                    amount: inst.bid(u, v) as i128,
                });
            }
        }
        InstanceDoc {
            keywords: inst.keyword_ids().to_vec(),
            bidders: inst
                .bidders()
                .iter()
                .map(|b| BidderDoc {
                    id: b.id.clone(),
                    budget: b.budget as i128,
                })
                .collect(),
            bids,
        }
    }
}

impl TryFrom<&InstanceDoc> for Instance {
    type Error = FormatError;

    fn try_from(doc: &InstanceDoc) -> Result<Self, FormatError> {
        let report = validate(doc);
        if !report.is_valid() {
            return Err(FormatError::Invalid(report));
        }
        let mut b = Instance::builder();
        let mut kidx = HashMap::new();
        for k in &doc.keywords {
            kidx.insert(k.as_str(), b.keyword(k.clone()));
        }
        let mut bidx = HashMap::new();
        for bd in &doc.bidders {
            bidx.insert(bd.id.as_str(), b.bidder(bd.id.clone(), bd.budget as Money));
        }
        for bid in &doc.bids {
            b.bid(
                kidx[bid.keyword.as_str()],
                bidx[bid.bidder.as_str()],
                bid.amount as Money,
            )
            .expect("indices come from the maps above");
        }
        b.build().map_err(|e| {
            // validate() covers every construction check
            unreachable!("validated document failed to build: {e}")
        })
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    Instance::try_from(&doc)
}

pub fn instance_to_json(instance: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceDoc::from(instance)).expect("instance serializes")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkipTag {
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActionDoc {
    Skip(SkipTag),
    Assign { first: String, second: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDoc {
    pub keyword: String,
    pub action: ActionDoc,
    pub price: Money,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub steps: Vec<StepDoc>,
    pub total: Money,
}

impl TraceDoc {
    pub fn from_trace(instance: &Instance, trace: &AuctionTrace) -> Self {
        let steps = trace
            .steps
            .iter()
            .map(|s| StepDoc {
                keyword: instance.keyword_id(s.keyword).to_string(),
                action: match s.action {
                    Action::Skip => ActionDoc::Skip(SkipTag::Skip),
                    Action::Assign { first, second } => ActionDoc::Assign {
                        first: instance.bidder(first).id.clone(),
                        second: instance.bidder(second).id.clone(),
                    },
                },
                price: s.price,
            })
            .collect();
        TraceDoc {
            steps,
            total: trace.total,
        }
    }

    /// Resolves ids back to an action list in arrival order.
    pub fn actions(&self, instance: &Instance) -> Result<Vec<Action>, ExecError> {
        if self.steps.len() != instance.num_keywords() {
            return Err(ExecError::ActionCountMismatch {
                expected: instance.num_keywords(),
                got: self.steps.len(),
            });
        }
        let lookup = |id: &str| {
            instance
                .bidder_index(id)
                .ok_or_else(|| ExecError::UnknownId(id.to_string()))
        };
        let mut actions = vec![Action::Skip; instance.num_keywords()];
        for s in &self.steps {
            let u = instance
                .keyword_index(&s.keyword)
                .ok_or_else(|| ExecError::UnknownId(s.keyword.clone()))?;
            actions[u] = match &s.action {
                ActionDoc::Skip(_) => Action::Skip,
                ActionDoc::Assign { first, second } => Action::assign(lookup(first)?, lookup(second)?),
            };
        }
        Ok(actions)
    }

    /// CSV rendering: `keyword,first,second,price`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("keyword,first,second,price\n");
        for s in &self.steps {
            let (a, b) = match &s.action {
                ActionDoc::Skip(_) => ("", ""),
                ActionDoc::Assign { first, second } => (first.as_str(), second.as_str()),
            };
            out.push_str(&format!("{},{},{},{}\n", s.keyword, a, b, s.price));
        }
        out
    }
}

pub fn trace_to_json(instance: &Instance, trace: &AuctionTrace) -> String {
    serde_json::to_string_pretty(&TraceDoc::from_trace(instance, trace)).expect("trace serializes")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairDoc {
    pub keyword: String,
    pub bidder: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingDoc {
    pub pairs: Vec<PairDoc>,
    pub size: usize,
}

impl MatchingDoc {
    pub fn from_matching(instance: &Instance, m: &Matching) -> Self {
        let pairs: Vec<_> = m
            .pairs()
            .map(|(u, v)| PairDoc {
                keyword: instance.keyword_id(u).to_string(),
                bidder: instance.bidder(v).id.clone(),
            })
            .collect();
        MatchingDoc {
            size: pairs.len(),
            pairs,
        }
    }
}

/// Simple undirected graph on vertices `0..num_vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, String> {
        let mut seen = HashSet::new();
        for &(a, b) in &edges {
            if a >= num_vertices || b >= num_vertices {
                return Err(format!("edge ({a}, {b}) references a missing vertex"));
            }
            if a == b {
                return Err(format!("self-loop on vertex {a}"));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(format!("duplicate edge ({a}, {b})"));
            }
        }
        Ok(Self {
            labels: (0..num_vertices).map(|v| v.to_string()).collect(),
            edges,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn covers(&self, cover: &[usize]) -> bool {
        self.edges.iter().all(|(a, b)| cover.contains(a) || cover.contains(b))
    }
}

/// Parses an edge list: one `u v` pair per line. A line with a single token
/// declares an isolated vertex; `#` starts a comment. Labels are arbitrary
/// tokens numbered in order of first appearance.
pub fn parse_edge_list(text: &str) -> Result<Graph, FormatError> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut intern = |tok: &str, labels: &mut Vec<String>| -> usize {
        *index.entry(tok.to_string()).or_insert_with(|| {
            labels.push(tok.to_string());
            labels.len() - 1
        })
    };
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [a] => {
                intern(a, &mut labels);
            }
            [a, b] => {
                let a = intern(a, &mut labels);
                let b = intern(b, &mut labels);
                edges.push((a, b));
            }
            _ => {
                return Err(FormatError::Graph {
                    line: i + 1,
                    msg: format!("expected `u v`, got `{line}`"),
                })
            }
        }
    }
    let mut g = Graph::new(labels.len(), edges).map_err(|msg| FormatError::Graph { line: 0, msg })?;
    g.labels = labels;
    Ok(g)
}

impl From<Bidder> for BidderDoc {
    fn from(b: Bidder) -> Self {
        BidderDoc {
            id: b.id,
            budget: b.budget as i128,
        }
    }
}
