use serde::Serialize;

use super::ReductionError;
use crate::format::Graph;
use crate::model::{execute, Action, AuctionTrace, ExecError, Instance};

/// 0/1 instance built from a graph, with the index of every gadget role.
///
/// Arrival order is `h_v, l_v` for every vertex (in vertex order) followed by
/// one keyword per edge.
#[derive(Debug, Clone)]
pub struct VcGadget {
    pub instance: Instance,
    pub graph: Graph,
    pub vertex_bidder: Vec<usize>,
    pub edge_bidder: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
    pub h_keyword: Vec<usize>,
    pub l_keyword: Vec<usize>,
    pub edge_keyword: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct VcRoles {
    pub vertex_bidders: Vec<String>,
    pub edge_bidders: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
    pub h_keywords: Vec<String>,
    pub l_keywords: Vec<String>,
    pub edge_keywords: Vec<String>,
}

impl VcGadget {
    /// `2|V| + |E|`.
    pub fn capacity(&self) -> usize {
        2 * self.graph.num_vertices() + self.graph.edges.len()
    }

    pub fn roles(&self) -> VcRoles {
        let kid = |xs: &[usize]| xs.iter().map(|&u| self.instance.keyword_id(u).to_string()).collect();
        let bid = |xs: &[usize]| xs.iter().map(|&v| self.instance.bidder(v).id.clone()).collect();
        VcRoles {
            vertex_bidders: bid(&self.vertex_bidder),
            edge_bidders: bid(&self.edge_bidder),
            y: bid(&self.y),
            z: bid(&self.z),
            h_keywords: kid(&self.h_keyword),
            l_keywords: kid(&self.l_keyword),
            edge_keywords: kid(&self.edge_keyword),
        }
    }
}

pub fn vc_to_2pm(graph: &Graph) -> Result<VcGadget, ReductionError> {
    let nv = graph.num_vertices();
    let mut b = Instance::builder();
    let mut h_keyword = Vec::with_capacity(nv);
    let mut l_keyword = Vec::with_capacity(nv);
    for label in &graph.labels {
        h_keyword.push(b.keyword(format!("h_{label}")));
        l_keyword.push(b.keyword(format!("l_{label}")));
    }
    let edge_name = |&(a, c): &(usize, usize)| format!("{}_{}", graph.labels[a], graph.labels[c]);
    let edge_keyword: Vec<usize> = graph
        .edges
        .iter()
        .map(|e| b.keyword(format!("e_{}", edge_name(e))))
        .collect();

    let vertex_bidder: Vec<usize> = graph.labels.iter().map(|l| b.bidder(format!("v_{l}"), 1)).collect();
    let edge_bidder: Vec<usize> = graph
        .edges
        .iter()
        .map(|e| b.bidder(format!("x_{}", edge_name(e)), 1))
        .collect();
    let y: Vec<usize> = graph.labels.iter().map(|l| b.bidder(format!("y_{l}"), 1)).collect();
    let z: Vec<usize> = graph.labels.iter().map(|l| b.bidder(format!("z_{l}"), 1)).collect();

    for v in 0..nv {
        b.bid(h_keyword[v], vertex_bidder[v], 1)?;
        b.bid(h_keyword[v], y[v], 1)?;
        b.bid(l_keyword[v], y[v], 1)?;
        b.bid(l_keyword[v], z[v], 1)?;
    }
    for (i, &(a, c)) in graph.edges.iter().enumerate() {
        b.bid(edge_keyword[i], vertex_bidder[a], 1)?;
        b.bid(edge_keyword[i], vertex_bidder[c], 1)?;
        b.bid(edge_keyword[i], edge_bidder[i], 1)?;
    }
    Ok(VcGadget {
        instance: b.build()?,
        graph: graph.clone(),
        vertex_bidder,
        edge_bidder,
        y,
        z,
        h_keyword,
        l_keyword,
        edge_keyword,
    })
}

/// Trace of value `2|V| + |E| - |cover|` built from a vertex cover.
pub fn trace_from_cover(gadget: &VcGadget, cover: &[usize]) -> Result<AuctionTrace, ReductionError> {
    if !gadget.graph.covers(cover) {
        return Err(ReductionError::InvalidParams("not a vertex cover".into()));
    }
    let mut actions = vec![Action::Skip; gadget.instance.num_keywords()];
    for v in 0..gadget.graph.num_vertices() {
        if cover.contains(&v) {
            actions[gadget.h_keyword[v]] = Action::assign(gadget.y[v], gadget.vertex_bidder[v]);
        } else {
            actions[gadget.h_keyword[v]] = Action::assign(gadget.vertex_bidder[v], gadget.y[v]);
            actions[gadget.l_keyword[v]] = Action::assign(gadget.y[v], gadget.z[v]);
        }
    }
    for (i, &(a, c)) in gadget.graph.edges.iter().enumerate() {
        let witness = if cover.contains(&a) { a } else { c };
        actions[gadget.edge_keyword[i]] = Action::assign(gadget.edge_bidder[i], gadget.vertex_bidder[witness]);
    }
    execute(&gadget.instance, &actions).map_err(ReductionError::InfeasibleTrace)
}

#[derive(Debug, Clone)]
pub struct CoverExtraction {
    /// Vertices whose bidder is never sold a keyword, sorted.
    pub cover: Vec<usize>,
    /// Normalized trace: every edge keyword sold for profit, every gadget
    /// at its maximum; value never below the input trace's.
    pub normalized: AuctionTrace,
}

fn run(gadget: &VcGadget, actions: &[Action]) -> Result<AuctionTrace, ExecError> {
    execute(&gadget.instance, actions)
}

/// Turns a feasible trace on the gadget into a vertex cover of size at most
/// `2|V| + |E| - value(trace)`.
pub fn extract_vertex_cover(gadget: &VcGadget, trace: &AuctionTrace) -> Result<CoverExtraction, ReductionError> {
    let mut actions = trace.actions();
    let replay = run(gadget, &actions).map_err(ReductionError::InfeasibleTrace)?;
    if replay != *trace {
        return Err(ReductionError::InvalidParams(
            "trace does not match its own replay".into(),
        ));
    }
    let graph = &gadget.graph;
    let is_vertex_bidder = |b: usize| gadget.vertex_bidder.contains(&b);

    // Zero-price sales consume nothing; treat them as skips. Sales of an edge
    // keyword to a vertex bidder move to the keyword's private bidder x_e.
    for s in &replay.steps {
        if s.price == 0 {
            actions[s.keyword] = Action::Skip;
        }
    }
    for (i, &u) in gadget.edge_keyword.iter().enumerate() {
        if let Action::Assign { first, second } = actions[u] {
            if is_vertex_bidder(first) {
                let x = gadget.edge_bidder[i];
                // the displaced vertex bidder still bids 1 and now keeps its budget
                let second = if second == x { first } else { second };
                actions[u] = Action::assign(x, second);
            }
        }
    }

    // Sell every edge keyword for profit, releasing one endpoint from its
    // h_v sale when both endpoints are taken.
    for (i, &u) in gadget.edge_keyword.iter().enumerate() {
        let current = run(gadget, &actions).map_err(ReductionError::InfeasibleTrace)?;
        if current.steps[u].price == 1 {
            continue;
        }
        let budgets = current.budgets_after(&gadget.instance, u);
        let (a, c) = graph.edges[i];
        let free = [a, c].into_iter().find(|&x| budgets[gadget.vertex_bidder[x]] == 1);
        let witness = match free {
            Some(x) => x,
            None => {
                let v = a.min(c);
                actions[gadget.h_keyword[v]] = Action::assign(gadget.y[v], gadget.vertex_bidder[v]);
                actions[gadget.l_keyword[v]] = Action::Skip;
                v
            }
        };
        actions[u] = Action::assign(gadget.edge_bidder[i], gadget.vertex_bidder[witness]);
    }

    let current = run(gadget, &actions).map_err(ReductionError::InfeasibleTrace)?;
    let cover: Vec<usize> = (0..graph.num_vertices())
        .filter(|&v| current.final_budgets[gadget.vertex_bidder[v]] == 1)
        .collect();
    for v in 0..graph.num_vertices() {
        if cover.contains(&v) {
            actions[gadget.h_keyword[v]] = Action::assign(gadget.y[v], gadget.vertex_bidder[v]);
            actions[gadget.l_keyword[v]] = Action::Skip;
        } else {
            actions[gadget.l_keyword[v]] = Action::assign(gadget.y[v], gadget.z[v]);
        }
    }
    let normalized = run(gadget, &actions).map_err(ReductionError::InfeasibleTrace)?;
    debug_assert!(graph.covers(&cover));
    debug_assert!(normalized.value() >= trace.value());
    debug_assert_eq!(normalized.value() as usize, gadget.capacity() - cover.len());
    Ok(CoverExtraction { cover, normalized })
}
