//! Stochastic domination between percolation laws on the same edge set.

use serde::Serialize;

use super::{EnumeratedMeasure, StateSpace};
use crate::error::{Error, Result};

/// Largest edge set for the exact certificate.
pub const STRASSEN_MAX_EDGES: usize = 12;
/// Largest edge set for the pairwise Holley scan.
pub const HOLLEY_MAX_EDGES: usize = 14;
/// Shortfall of the maximal flow below 1 still read as domination.
pub const FLOW_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DominationMode {
    Strassen,
    Holley,
}

#[derive(Debug, Clone, Serialize)]
pub struct DominationReport {
    pub mode: DominationMode,
    /// μ ≤_st ν decided (Strassen) or certified (Holley).
    pub dominated: bool,
    /// Whether a negative answer is conclusive.
    pub conclusive: bool,
    /// Maximal flow (Strassen) or worst log-margin (Holley).
    pub value: f64,
}

fn edge_count(m: &EnumeratedMeasure) -> Result<usize> {
    match m.space() {
        StateSpace::Edges { n_edges, .. } => Ok(*n_edges),
        other => Err(Error::Input(format!(
            "domination needs percolation laws, got {other:?}"
        ))),
    }
}

fn matching_edges(mu: &EnumeratedMeasure, nu: &EnumeratedMeasure) -> Result<usize> {
    let a = edge_count(mu)?;
    let b = edge_count(nu)?;
    if a != b {
        return Err(Error::Input(format!("edge sets differ: {a} vs {b} edges")));
    }
    Ok(a)
}

/// Exact when |E| ≤ 12, pairwise Holley condition beyond.
pub fn stochastic_domination_check(mu: &EnumeratedMeasure, nu: &EnumeratedMeasure) -> Result<DominationReport> {
    let n = matching_edges(mu, nu)?;
    if n <= STRASSEN_MAX_EDGES {
        strassen_check(mu, nu)
    } else {
        holley_check(mu, nu)
    }
}

/// μ ≤_st ν iff a coupling supported on {ω ⊆ ω'} exists, i.e. the network
/// source → ω (cap μ(ω)) → ω' ⊇ ω (cap ∞) → sink (cap ν(ω')) carries flow 1.
pub fn strassen_check(mu: &EnumeratedMeasure, nu: &EnumeratedMeasure) -> Result<DominationReport> {
    let n = matching_edges(mu, nu)?;
    if n > STRASSEN_MAX_EDGES {
        return Err(Error::CapExceeded(format!(
            "exact domination certificate is capped at {STRASSEN_MAX_EDGES} edges"
        )));
    }
    let left: Vec<usize> = mu.support().collect();
    let right: Vec<usize> = nu.support().collect();
    let source = 0;
    let sink = 1;
    let mut g = FlowNetwork::new(2 + left.len() + right.len());
    for (i, &a) in left.iter().enumerate() {
        g.add_edge(source, 2 + i, mu.prob(a));
        for (j, &b) in right.iter().enumerate() {
            if a & !b == 0 {
                g.add_edge(2 + i, 2 + left.len() + j, f64::INFINITY);
            }
        }
    }
    for (j, &b) in right.iter().enumerate() {
        g.add_edge(2 + left.len() + j, sink, nu.prob(b));
    }
    let flow = g.max_flow(source, sink);
    Ok(DominationReport {
        mode: DominationMode::Strassen,
        dominated: flow >= 1.0 - FLOW_TOL,
        conclusive: true,
        value: flow,
    })
}

/// ν(ω ∨ ω') μ(ω ∧ ω') ≥ μ(ω) ν(ω') for every pair, in log form with a
/// relative tolerance. Sufficient for μ ≤_st ν, never necessary.
pub fn holley_check(mu: &EnumeratedMeasure, nu: &EnumeratedMeasure) -> Result<DominationReport> {
    let n = matching_edges(mu, nu)?;
    if n > HOLLEY_MAX_EDGES {
        return Err(Error::CapExceeded(format!(
            "pairwise Holley scan is capped at {HOLLEY_MAX_EDGES} edges"
        )));
    }
    let lm = mu.log_weights();
    let ln = nu.log_weights();
    let len = lm.len();
    let mut worst = f64::INFINITY;
    for a in 0..len {
        if lm[a] == f64::NEG_INFINITY {
            continue;
        }
        for b in 0..len {
            let rhs = lm[a] + ln[b];
            if rhs == f64::NEG_INFINITY {
                continue;
            }
            let lhs = ln[a | b] + lm[a & b];
            worst = worst.min(lhs - rhs);
        }
    }
    let scale = mu.log_z().abs() + nu.log_z().abs() + 1.0;
    Ok(DominationReport {
        mode: DominationMode::Holley,
        dominated: worst >= -1e-12 * scale,
        conclusive: false,
        value: worst,
    })
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: usize,
    cap: f64,
}

/// Dinic's algorithm on real capacities.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

const EPS: f64 = 1e-15;

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64) {
        self.adj[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.adj[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0.0 });
    }

    fn levels(&self, s: usize, t: usize) -> Option<Vec<u32>> {
        let mut level = vec![u32::MAX; self.adj.len()];
        let mut queue = std::collections::VecDeque::new();
        level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let arc = self.arcs[a];
                if arc.cap > EPS && level[arc.to] == u32::MAX {
                    level[arc.to] = level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        (level[t] != u32::MAX).then_some(level)
    }

    fn push(&mut self, u: usize, t: usize, limit: f64, level: &[u32], next: &mut [usize]) -> f64 {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let a = self.adj[u][next[u]];
            let Arc { to, cap } = self.arcs[a];
            if cap > EPS && level[to] == level[u] + 1 {
                let pushed = self.push(to, t, limit.min(cap), level, next);
                if pushed > 0.0 {
                    self.arcs[a].cap -= pushed;
                    self.arcs[a ^ 1].cap += pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        0.0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        while let Some(level) = self.levels(s, t) {
            let mut next = vec![0; self.adj.len()];
            loop {
                let f = self.push(s, t, f64::INFINITY, &level, &mut next);
                if f <= 0.0 {
                    break;
                }
                total += f;
            }
        }
        total
    }
}
