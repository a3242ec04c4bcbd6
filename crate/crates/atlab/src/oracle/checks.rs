//! Identities and inequalities certified by enumeration.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    at_law, gat_components, gat_law, strassen_check, EnumeratedMeasure, StateSpace,
};
use crate::error::{Error, Result};
use crate::lattice::Region;
use crate::spin::{BoundaryCondition, VariableChange};
use crate::weights::{gat_weights, CouplingConstants, GatWeights};

fn fill_of(eta: &BoundaryCondition) -> Result<bool> {
    eta.fill().ok_or_else(|| {
        Error::Boundary(format!("first boundary condition must be + or f, got {eta}"))
    })
}

fn mask_clusters(region: &Region, m: u64, fill: bool) -> crate::lattice::Clusters {
    region.clusters_with(|e| m >> e & 1 == 1, fill)
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationRow {
    pub x: usize,
    /// `None` for the one-point function against the outside.
    pub y: Option<usize>,
    pub spin: f64,
    pub connection: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub rows: Vec<CorrelationRow>,
    pub max_gap: f64,
}

/// ⟨s_x s_y⟩ against GAT[x ↔ y] for all pairs of Λ, and ⟨s_x⟩ against
/// GAT[x ↔ Z^d∖Λ] when η = +.
pub fn correlation_equals_connection(
    region: &Arc<Region>,
    c: &CouplingConstants,
    bc: &[BoundaryCondition; 2],
) -> Result<CorrelationReport> {
    let fill = fill_of(&bc[0])?;
    let at = at_law(region, c, bc)?;
    let gat = gat_law(region, c, fill, &bc[1])?;
    let configs: Vec<Vec<i8>> = (0..at.first.len()).map(|i| at.first.config(i)).collect();
    let clusters: Vec<_> = (0..gat.len())
        .map(|m| mask_clusters(region, m as u64, fill))
        .collect();
    let inner: Vec<usize> = region.interior_vertices().collect();
    let mut rows = Vec::new();
    for (a, &x) in inner.iter().enumerate() {
        for &y in &inner[a + 1..] {
            let spin = at.expectation(|i, _| (configs[i][x] * configs[i][y]) as f64);
            let connection = gat.probability(|m| clusters[m].connected(x, y));
            rows.push(CorrelationRow {
                x,
                y: Some(y),
                spin,
                connection,
            });
        }
        if fill {
            let spin = at.expectation(|i, _| configs[i][x] as f64);
            let connection = gat.probability(|m| clusters[m].reaches_outside(x));
            rows.push(CorrelationRow {
                x,
                y: None,
                spin,
                connection,
            });
        }
    }
    let max_gap = rows
        .iter()
        .map(|r| (r.spin - r.connection).abs())
        .fold(0.0, f64::max);
    Ok(CorrelationReport { rows, max_gap })
}

/// (lower, upper) bounds on GAT[ω_e = 1 | rest]; the lower one is 0 when w3 = 0.
pub fn finite_energy_bounds(w: &GatWeights) -> (f64, f64) {
    let lower = if w.w3 == 0.0 {
        0.0
    } else {
        1.0 / (1.0 + 2.0 * w.w2.max(1.0) / (w.w1 * w.w3.min(1.0)))
    };
    let upper = 1.0 / (1.0 + w.w2.min(1.0) / (w.w1 * w.w3.max(1.0)));
    (lower, upper)
}

#[derive(Debug, Clone, Serialize)]
pub struct FiniteEnergyReport {
    pub lower: f64,
    pub upper: f64,
    pub min_conditional: f64,
    pub max_conditional: f64,
    /// min over contexts of the distance to the nearer bound.
    pub min_slack: f64,
    pub contexts: usize,
}

/// Every single-edge conditional of GAT^{#,η'} against the finite-energy bounds.
pub fn finite_energy_check(
    region: &Arc<Region>,
    c: &CouplingConstants,
    fill: bool,
    eta2: &BoundaryCondition,
) -> Result<FiniteEnergyReport> {
    let w = gat_weights(c)?;
    let (lower, upper) = finite_energy_bounds(&w);
    let law = gat_components(region, c, fill, eta2)?;
    let ne = law.n_edges;
    let mut report = FiniteEnergyReport {
        lower,
        upper,
        min_conditional: f64::INFINITY,
        max_conditional: f64::NEG_INFINITY,
        min_slack: f64::INFINITY,
        contexts: 0,
    };
    for m in 0..1usize << ne {
        for e in 0..ne {
            if m >> e & 1 == 1 {
                continue;
            }
            let closed = law.log_weight(m);
            let open = law.log_weight(m | 1 << e);
            if closed == f64::NEG_INFINITY && open == f64::NEG_INFINITY {
                continue;
            }
            let p = 1.0 / (1.0 + (closed - open).exp());
            report.contexts += 1;
            report.min_conditional = report.min_conditional.min(p);
            report.max_conditional = report.max_conditional.max(p);
            report.min_slack = report.min_slack.min((p - lower).min(upper - p));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct FkgReport {
    pub pass: bool,
    /// min of ln μ(ω∨ω') + ln μ(ω∧ω') - ln μ(ω) - ln μ(ω').
    pub min_margin: f64,
    pub pairs: usize,
    /// (base configuration, first edge, second edge) of the worst pair.
    pub worst: Option<(u64, usize, usize)>,
}

/// Tolerance on the log-margin of the lattice condition.
pub const FKG_TOL: f64 = 1e-13;

fn fkg_scan(n_edges: usize, margin: impl Fn(usize, usize, usize) -> Option<f64>) -> FkgReport {
    let mut report = FkgReport {
        pass: true,
        min_margin: f64::INFINITY,
        pairs: 0,
        worst: None,
    };
    for m in 0..1usize << n_edges {
        for e in 0..n_edges {
            if m >> e & 1 == 1 {
                continue;
            }
            for f in e + 1..n_edges {
                if m >> f & 1 == 1 {
                    continue;
                }
                let Some(x) = margin(m, e, f) else { continue };
                report.pairs += 1;
                if x < report.min_margin {
                    report.min_margin = x;
                    report.worst = Some((m as u64, e, f));
                }
            }
        }
    }
    report.pass = report.min_margin >= -FKG_TOL;
    report
}

/// Two-edge lattice condition for any enumerated percolation law.
pub fn fkg_lattice_check(measure: &EnumeratedMeasure) -> Result<FkgReport> {
    let StateSpace::Edges { n_edges, .. } = *measure.space() else {
        return Err(Error::Input("lattice condition needs a percolation law".into()));
    };
    let lw = measure.log_weights();
    Ok(fkg_scan(n_edges, |m, e, f| {
        let (a, b) = (m | 1 << e, m | 1 << f);
        let rhs = lw[a] + lw[b];
        (rhs != f64::NEG_INFINITY).then(|| lw[a | b] + lw[m] - rhs)
    }))
}

/// Two-edge lattice condition for GAT^{#,η'}, evaluated on the weight
/// components so that the |ω| factors cancel exactly.
pub fn fkg_lattice_check_gat(
    region: &Arc<Region>,
    c: &CouplingConstants,
    fill: bool,
    eta2: &BoundaryCondition,
) -> Result<FkgReport> {
    if !(c.k >= c.kpp && c.k > -c.kpp) {
        return Err(Error::Parameters(
            "lattice condition check needs K >= K'' and K > -K''".into(),
        ));
    }
    let law = gat_components(region, c, fill, eta2)?;
    let k = &law.clusters;
    let s = &law.ln_sum;
    Ok(fkg_scan(law.n_edges, |m, e, f| {
        let (a, b, ab) = (m | 1 << e, m | 1 << f, m | 1 << e | 1 << f);
        if s[a] == f64::NEG_INFINITY || s[b] == f64::NEG_INFINITY {
            return None;
        }
        let dk = k[ab] as i64 + k[m] as i64 - k[a] as i64 - k[b] as i64;
        Some(dk as f64 * std::f64::consts::LN_2 + ((s[ab] - s[a]) - (s[b] - s[m])))
    }))
}

/// X(ω) ≤ X(ω ∪ {e}) for every ω and e.
pub fn is_increasing(n_edges: usize, x: impl Fn(u64) -> f64) -> bool {
    (0..1u64 << n_edges).all(|m| (0..n_edges).all(|e| m >> e & 1 == 1 || x(m) <= x(m | 1 << e)))
}

#[derive(Debug, Clone, Serialize)]
pub struct RussoReport {
    pub beta: f64,
    pub expectation: f64,
    /// Central difference of E[X] in β.
    pub derivative: f64,
    pub covariance: f64,
    pub epsilon: f64,
    /// derivative - ε Cov(X, |ω_E|).
    pub slack: f64,
}

/// d/dβ E[X] ≥ ε Cov(X, |ω_E|) for GAT^{1,f} along a curve β ↦ (K, K', K'').
pub fn russo_check(
    region: &Arc<Region>,
    curve: &dyn Fn(f64) -> Result<CouplingConstants>,
    beta: f64,
    h: f64,
    epsilon: f64,
    x: &dyn Fn(u64) -> f64,
) -> Result<RussoReport> {
    let ne = region.n_edges();
    if !is_increasing(ne, x) {
        return Err(Error::Input("observable is not increasing".into()));
    }
    let law = |b: f64| gat_law(region, &curve(b)?, true, &BoundaryCondition::Free);
    let mid = law(beta)?;
    let ex = |m: &EnumeratedMeasure| m.expectation(|i| x(i as u64));
    let derivative = (ex(&law(beta + h)?) - ex(&law(beta - h)?)) / (2.0 * h);
    let covariance = mid.covariance(|i| x(i as u64), |i| (i as u64).count_ones() as f64);
    Ok(RussoReport {
        beta,
        expectation: ex(&mid),
        derivative,
        covariance,
        epsilon,
        slack: derivative - epsilon * covariance,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GriffithsReport {
    pub spin: f64,
    pub event: f64,
    pub gap: f64,
    pub change: VariableChange,
}

/// ⟨τ^A⟩^{+,+} against GAT^{1,+}[κ_A], the event that every finite cluster
/// holds an even number of points of A. `c` carries (J, J', U).
pub fn griffiths_check(region: &Arc<Region>, c: &CouplingConstants, a: &[usize]) -> Result<GriffithsReport> {
    let [j, jp, u] = [c.k, c.kp, c.kpp];
    let change = if j >= u.abs() {
        VariableChange::Keep
    } else if j >= jp.abs() {
        VariableChange::ProductSecond
    } else {
        return Err(Error::Parameters(format!(
            "need J >= min(|J'|, |U|), got ({j}, {jp}, {u})"
        )));
    };
    let mut odd: Vec<usize> = Vec::new();
    for &v in a {
        if !region.is_interior(v) {
            return Err(Error::Input(format!("vertex {v} is not in Λ")));
        }
        match odd.iter().position(|&w| w == v) {
            Some(p) => {
                odd.swap_remove(p);
            }
            None => odd.push(v),
        }
    }
    let plus = [BoundaryCondition::Plus, BoundaryCondition::Plus];
    let at = at_law(region, c, &plus)?;
    let configs: Vec<Vec<i8>> = (0..at.first.len()).map(|i| at.first.config(i)).collect();
    let spin = at.expectation(|i, _| odd.iter().map(|&v| configs[i][v] as f64).product());
    let cg = c.permuted(&change.permutation());
    let gat = gat_law(region, &cg, true, &BoundaryCondition::Plus)?;
    let event = gat.probability(|m| {
        let cl = mask_clusters(region, m as u64, true);
        let mut count = vec![0usize; cl.count];
        for &v in &odd {
            count[cl.label[v] as usize] += 1;
        }
        (0..cl.count).all(|k| cl.outside[k] || count[k].is_multiple_of(2))
    });
    Ok(GriffithsReport {
        spin,
        event,
        gap: (spin - event).abs(),
        change,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MaximalityReport {
    pub contexts: usize,
    pub exhaustive: bool,
    pub dominated: usize,
    pub min_flow: f64,
    pub unconditioned: bool,
}

/// GAT^{1,f}_Δ[ω_{E_Λ} ∈ · | ξ] ≤_st GAT^{1,f}_Λ for exterior contexts ξ
/// (all of them when there are at most `max_contexts`, otherwise a seeded
/// sample) and for the unconditioned marginal.
pub fn maximality_check(
    small: &Arc<Region>,
    big: &Arc<Region>,
    c: &CouplingConstants,
    max_contexts: usize,
    seed: u64,
) -> Result<MaximalityReport> {
    let mut inside = Vec::with_capacity(small.n_edges());
    for e in 0..small.n_edges() {
        let (u, v) = small.edge(e);
        let eb = big
            .index_of(small.coord(u))
            .zip(big.index_of(small.coord(v)))
            .and_then(|(a, b)| big.edge_index(a, b))
            .ok_or_else(|| Error::Region("Λ is not contained in Δ".into()))?;
        inside.push(eb);
    }
    let outside: Vec<usize> = (0..big.n_edges()).filter(|e| !inside.contains(e)).collect();
    let free = BoundaryCondition::Free;
    let reference = gat_law(small, c, true, &free)?;
    let law = gat_law(big, c, true, &free)?;
    let split = |m: usize| -> (usize, usize) {
        let a = inside
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &e)| acc | (m >> e & 1) << i);
        let b = outside
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &e)| acc | (m >> e & 1) << i);
        (a, b)
    };
    let n_ctx = 1usize << outside.len();
    let exhaustive = n_ctx <= max_contexts;
    let mut slot = vec![usize::MAX; n_ctx];
    let chosen: Vec<usize> = if exhaustive {
        (0..n_ctx).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<usize> = (0..max_contexts).map(|_| rng.random_range(0..n_ctx)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    for (k, &x) in chosen.iter().enumerate() {
        slot[x] = k;
    }
    let small_len = 1usize << inside.len();
    let mut cond = vec![vec![0.0; small_len]; chosen.len()];
    let mut marginal = vec![0.0; small_len];
    for m in 0..law.len() {
        let (a, b) = split(m);
        marginal[a] += law.prob(m);
        if slot[b] != usize::MAX {
            cond[slot[b]][a] += law.prob(m);
        }
    }
    let space = StateSpace::Edges {
        n_edges: inside.len(),
        fill: true,
    };
    let mut report = MaximalityReport {
        contexts: 0,
        exhaustive,
        dominated: 0,
        min_flow: f64::INFINITY,
        unconditioned: false,
    };
    for w in cond {
        if w.iter().all(|&p| p == 0.0) {
            continue;
        }
        let mu = EnumeratedMeasure::from_weights(space.clone(), &w)?;
        let r = strassen_check(&mu, &reference)?;
        report.contexts += 1;
        report.dominated += r.dominated as usize;
        report.min_flow = report.min_flow.min(r.value);
    }
    let mu = EnumeratedMeasure::from_weights(space, &marginal)?;
    report.unconditioned = strassen_check(&mu, &reference)?.dominated;
    Ok(report)
}

/// (⟨τ_x τ'_x⟩, ⟨τ_x⟩⟨τ'_x⟩) under AT^{η,η'}.
pub fn site_correlation(
    region: &Arc<Region>,
    c: &CouplingConstants,
    bc: &[BoundaryCondition; 2],
    x: usize,
) -> Result<(f64, f64)> {
    let at = at_law(region, c, bc)?;
    let s1: Vec<f64> = (0..at.first.len()).map(|i| at.first.spin(i, x) as f64).collect();
    let s2: Vec<f64> = (0..at.second.len()).map(|j| at.second.spin(j, x) as f64).collect();
    let joint = at.expectation(|i, j| s1[i] * s2[j]);
    let a = at.expectation(|i, _| s1[i]);
    let b = at.expectation(|_, j| s2[j]);
    Ok((joint, a * b))
}
