//! Heat-bath Markov chains for the AT pair, with the percolation, σ and
//! height layers sampled on top of each state.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{DualGeometry, EdgeConfig, Region};
use crate::spin::{BoundaryCondition, SpinPair, VariableChange};
use crate::stats::{batch_means, jackknife, mean, variance, Estimate, MIN_BATCHES};
use crate::unionfind::UnionFind;
use crate::vertex::{HeightFunction, VertexSpinConfig};
use crate::weights::{sampling_probabilities, CouplingConstants};

/// Chain schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct ChainSettings {
    pub seed: u64,
    pub chains: usize,
    pub sweeps: u64,
    pub burn_in: u64,
    pub thin: u64,
}

impl Default for ChainSettings {
    fn default() -> Self {
        ChainSettings {
            seed: 0,
            chains: 8,
            sweeps: 100_000,
            burn_in: 10_000,
            thin: 10,
        }
    }
}

impl ChainSettings {
    pub fn validate(&self) -> Result<()> {
        if self.chains == 0 || self.thin == 0 {
            return Err(Error::Parameters("chains and thinning must be positive".into()));
        }
        Ok(())
    }
}

/// One Markov chain: the current pair, its couplings and its RNG.
#[derive(Debug, Clone)]
pub struct ChainState {
    pair: SpinPair,
    c: CouplingConstants,
    rng: ChaCha8Rng,
    sweeps: u64,
    sites: Vec<(usize, [bool; 2])>,
    nbrs: Vec<Vec<usize>>,
    degree: i32,
    /// Heat-bath weights per local field (A, B, C), in the order
    /// (+,+), (+,-), (-,+), (-,-).
    table: Vec<[f64; 4]>,
}

const PAIRS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

impl ChainState {
    /// Starts from the boundary pattern on Λ̄. The RNG is seeded from the
    /// master seed with one stream per chain.
    pub fn new(
        region: Arc<Region>,
        c: &CouplingConstants,
        bc: [BoundaryCondition; 2],
        seed: u64,
        chain: u64,
    ) -> Result<Self> {
        let pair = SpinPair::from_boundary(region, bc);
        Self::from_pair(pair, c, seed, chain)
    }

    pub fn from_pair(pair: SpinPair, c: &CouplingConstants, seed: u64, chain: u64) -> Result<Self> {
        if !pair.is_consistent() {
            return Err(Error::Boundary("initial pair violates its boundary condition".into()));
        }
        let r = pair.region().clone();
        let bc = pair.boundary().clone();
        let sites = (0..r.len())
            .filter_map(|v| {
                let free = [
                    r.is_interior(v) || bc[0].is_free(),
                    r.is_interior(v) || bc[1].is_free(),
                ];
                (free[0] || free[1]).then_some((v, free))
            })
            .collect();
        let nbrs: Vec<Vec<usize>> = (0..r.len()).map(|v| r.neighbours(v).collect()).collect();
        let degree = nbrs.iter().map(Vec::len).max().unwrap_or(0) as i32;
        let span = (2 * degree + 1) as usize;
        let mut table = Vec::with_capacity(span * span * span);
        for a in -degree..=degree {
            for b in -degree..=degree {
                for cc in -degree..=degree {
                    let e: Vec<f64> = PAIRS
                        .iter()
                        .map(|&(x, y)| {
                            let (x, y) = (x as f64, y as f64);
                            c.k * x * a as f64 + c.kp * y * b as f64 + c.kpp * x * y * cc as f64
                        })
                        .collect();
                    let m = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    table.push([(e[0] - m).exp(), (e[1] - m).exp(), (e[2] - m).exp(), (e[3] - m).exp()]);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chain);
        Ok(ChainState {
            pair,
            c: *c,
            rng,
            sweeps: 0,
            sites,
            nbrs,
            degree,
            table,
        })
    }

    pub fn pair(&self) -> &SpinPair {
        &self.pair
    }

    pub fn region(&self) -> &Arc<Region> {
        self.pair.region()
    }

    pub fn couplings(&self) -> &CouplingConstants {
        &self.c
    }

    pub fn boundary(&self) -> &[BoundaryCondition; 2] {
        self.pair.boundary()
    }

    pub fn sweeps(&self) -> u64 {
        self.sweeps
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// One systematic heat-bath sweep over the free sites of Λ̄, updating
    /// (s_x, s'_x) jointly from its conditional law.
    pub fn sweep(&mut self) {
        let d = self.degree;
        let span = (2 * d + 1) as usize;
        for i in 0..self.sites.len() {
            let (v, free) = self.sites[i];
            let (mut a, mut b, mut cc) = (0i32, 0i32, 0i32);
            for &y in &self.nbrs[v] {
                let (s, t) = (self.pair.s[y] as i32, self.pair.s2[y] as i32);
                a += s;
                b += t;
                cc += s * t;
            }
            let w = &self.table[((a + d) as usize * span + (b + d) as usize) * span + (cc + d) as usize];
            let (s0, t0) = (self.pair.s[v], self.pair.s2[v]);
            let allowed = |k: usize| {
                let (x, y) = PAIRS[k];
                (free[0] || x == s0) && (free[1] || y == t0)
            };
            let total: f64 = (0..4).filter(|&k| allowed(k)).map(|k| w[k]).sum();
            let mut u = self.rng.random::<f64>() * total;
            let mut pick = 0;
            for k in (0..4).filter(|&k| allowed(k)) {
                pick = k;
                if u < w[k] {
                    break;
                }
                u -= w[k];
            }
            let (x, y) = PAIRS[pick];
            self.pair.s[v] = x;
            self.pair.s2[v] = y;
        }
        self.sweeps += 1;
    }
}

pub fn glauber_sweep(state: &mut ChainState) {
    state.sweep();
}

/// ω given (s, s'): closed on E_s, Bernoulli(p1) on E_{s'}∖E_s,
/// Bernoulli(p2) elsewhere; fill # from the first boundary condition.
pub fn sample_gat(state: &mut ChainState) -> Result<EdgeConfig> {
    let (p1, p2) = sampling_probabilities(&state.c)?;
    let fill = state.boundary()[0].fill().ok_or_else(|| {
        Error::Boundary("the graphical representation needs η ∈ {+, f}".into())
    })?;
    let r = state.pair.region().clone();
    let mut open = vec![false; r.n_edges()];
    for (e, o) in open.iter_mut().enumerate() {
        let (u, v) = r.edge(e);
        if state.pair.s[u] != state.pair.s[v] {
            continue;
        }
        let p = if state.pair.s2[u] != state.pair.s2[v] { p1 } else { p2 };
        *o = state.rng.random::<f64>() < p;
    }
    Ok(EdgeConfig::new(open, fill))
}

/// σ• = s' and σ∘ uniform on the ω*-clusters inside Λ*, +1 on the rest.
pub fn sample_sigma(state: &mut ChainState, geom: &DualGeometry, omega: &EdgeConfig) -> Result<VertexSpinConfig> {
    if !state.boundary()[0].is_free() || omega.fill() {
        return Err(Error::Boundary("σ is built from η = f and fill 0".into()));
    }
    let (labels, far) = geom.dual_clusters(omega);
    let n_labels = labels.iter().copied().max().map_or(0, |m| m as usize + 1).max(far as usize + 1);
    let mut colour: Vec<i8> = vec![0; n_labels];
    colour[far as usize] = 1;
    for &l in &labels[geom.n_faces()..] {
        colour[l as usize] = 1;
    }
    for &l in &labels[..geom.n_faces()] {
        if colour[l as usize] == 0 {
            colour[l as usize] = if state.rng.random::<bool>() { 1 } else { -1 };
        }
    }
    Ok(VertexSpinConfig {
        primal: state.pair.s2.clone(),
        dual: labels.iter().map(|&l| colour[l as usize]).collect(),
    })
}

/// σ and the height function it integrates to; needs K = K''.
pub fn sample_sigma_and_height(
    state: &mut ChainState,
    geom: &DualGeometry,
) -> Result<(VertexSpinConfig, HeightFunction)> {
    if state.c.k != state.c.kpp {
        return Err(Error::Parameters(format!(
            "height functions need K = K'', got K = {}, K'' = {}",
            state.c.k, state.c.kpp
        )));
    }
    let omega = sample_gat(state)?;
    let sigma = sample_sigma(state, geom, &omega)?;
    if !sigma.ice_rule(geom) {
        return Err(Error::Input("sampled σ violates the ice rule".into()));
    }
    let h = HeightFunction::from_spins(geom, &sigma)?;
    Ok((sigma, h))
}

/// Vertices of Λ connected in ω to Λ̄∖Λ (and, for fill 1, to infinity).
pub fn boundary_cluster(region: &Region, omega: &EdgeConfig) -> Vec<bool> {
    let mut seen = vec![false; region.len()];
    let mut queue: VecDeque<usize> = region.boundary_vertices().collect();
    for &v in &queue {
        seen[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        for e in region.incident(v) {
            if omega.is_open(e) {
                let (a, b) = region.edge(e);
                let w = if a == v { b } else { a };
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    seen
}

/// Largest ℓ∞ diameter among the connected components of Λ∖C, where C is
/// the boundary cluster; 0 if there are none.
pub fn max_hole_diameter(region: &Region, omega: &EdgeConfig) -> u32 {
    let c = boundary_cluster(region, omega);
    let mut uf = UnionFind::new(region.len());
    for e in 0..region.n_edges() {
        let (u, v) = region.edge(e);
        if !c[u] && !c[v] {
            uf.union(u, v);
        }
    }
    let d = region.dim();
    let mut lo: std::collections::HashMap<usize, (Vec<i32>, Vec<i32>)> = Default::default();
    for v in region.interior_vertices().filter(|&v| !c[v]) {
        let x = region.coord(v);
        let entry = lo.entry(uf.find(v)).or_insert_with(|| (x.to_vec(), x.to_vec()));
        for a in 0..d {
            entry.0[a] = entry.0[a].min(x[a]);
            entry.1[a] = entry.1[a].max(x[a]);
        }
    }
    lo.values()
        .map(|(a, b)| (0..d).map(|i| (b[i] - a[i]) as u32).max().unwrap_or(0))
        .max()
        .unwrap_or(0)
}

/// 1{x ↔ Z^d∖B_{k-1}}: the cluster of x contains a vertex of ℓ∞ norm ≥ k
/// or reaches Λ̄∖Λ under fill 1.
pub fn connects_beyond(region: &Region, omega: &EdgeConfig, x: usize, k: u32) -> bool {
    let far = |v: usize| region.coord(v).iter().map(|c| c.unsigned_abs()).max().unwrap_or(0) >= k;
    let mut seen = vec![false; region.len()];
    let mut queue = VecDeque::from([x]);
    seen[x] = true;
    while let Some(v) = queue.pop_front() {
        if far(v) || (omega.fill() && !region.is_interior(v)) {
            return true;
        }
        for e in region.incident(v) {
            if omega.is_open(e) {
                let (a, b) = region.edge(e);
                let w = if a == v { b } else { a };
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    false
}

/// Quantities recorded along a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub enum Observable {
    /// τ_0.
    Tau,
    /// τ'_0.
    TauPrime,
    /// τ_0 τ'_0.
    Product,
    /// m† = |Λ|^{-1} Σ_x (-1)^{parity(x)} τ_x τ'_x.
    StaggeredOrder,
    /// |Λ|^{-1} Σ_x τ_x.
    Magnetization,
    /// h_0 and h_0²; summarised as Var(h_0).
    Height,
    /// Largest hole of the boundary cluster of the GAT sample of the
    /// staggered product layer.
    HoleDiameter,
    /// 1{0 ↔ Z^d∖B_{k-1}} in a GAT sample.
    Connection(u32),
    /// E[|ω_E| | s, s'] / |E|.
    EdgeDensity,
}

impl Observable {
    pub fn names(&self) -> Vec<String> {
        match self {
            Observable::Tau => vec!["tau0".into()],
            Observable::TauPrime => vec!["tau0_prime".into()],
            Observable::Product => vec!["tau0_tau0_prime".into()],
            Observable::StaggeredOrder => vec!["staggered_order".into()],
            Observable::Magnetization => vec!["magnetization".into()],
            Observable::Height => vec!["h0".into(), "h0_sq".into()],
            Observable::HoleDiameter => vec!["max_hole_diameter".into()],
            Observable::Connection(k) => vec![format!("connect_{k}")],
            Observable::EdgeDensity => vec!["edge_density".into()],
        }
    }
}

/// Named time series recorded along one chain.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ObservableSeries {
    pub names: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl ObservableSeries {
    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.data[i].as_slice())
    }
}

/// Per-run helpers that do not change along the chain.
struct Probe {
    origin: usize,
    geom: Option<DualGeometry>,
    staggered: Option<CouplingConstants>,
}

impl Probe {
    fn new(state: &ChainState, observables: &[Observable]) -> Result<Self> {
        let r = state.region();
        let origin = r
            .origin()
            .or_else(|| r.interior_vertices().next())
            .ok_or_else(|| Error::Region("empty region".into()))?;
        let geom = if observables.contains(&Observable::Height) {
            Some(DualGeometry::new(r)?)
        } else {
            None
        };
        let staggered = if observables.contains(&Observable::HoleDiameter) {
            let c = SpinPair::transformed_couplings(&state.c, VariableChange::StaggeredProductFirstSwap);
            sampling_probabilities(&c)?;
            Some(c)
        } else {
            None
        };
        Ok(Probe { origin, geom, staggered })
    }
}

fn record(state: &mut ChainState, probe: &Probe, obs: &Observable, out: &mut Vec<f64>) -> Result<()> {
    let r = state.region().clone();
    let o = probe.origin;
    match obs {
        Observable::Tau => out.push(state.pair.s[o] as f64),
        Observable::TauPrime => out.push(state.pair.s2[o] as f64),
        Observable::Product => out.push((state.pair.s[o] * state.pair.s2[o]) as f64),
        Observable::StaggeredOrder => {
            let sum: i64 = r
                .interior_vertices()
                .map(|v| {
                    let p = (state.pair.s[v] * state.pair.s2[v]) as i64;
                    if r.is_even(v) { p } else { -p }
                })
                .sum();
            out.push(sum as f64 / r.interior_len() as f64);
        }
        Observable::Magnetization => {
            let sum: i64 = r.interior_vertices().map(|v| state.pair.s[v] as i64).sum();
            out.push(sum as f64 / r.interior_len() as f64);
        }
        Observable::Height => {
            let geom = probe.geom.as_ref().expect("geometry built for heights");
            let (_, h) = sample_sigma_and_height(state, geom)?;
            let h0 = h.primal[o] as f64;
            out.push(h0);
            out.push(h0 * h0);
        }
        Observable::HoleDiameter => {
            let c = probe.staggered.expect("staggered couplings built");
            let (pair, _) = state.pair.change_of_variables(VariableChange::StaggeredProductFirstSwap)?;
            let fill = pair.boundary()[0].fill().ok_or_else(|| {
                Error::Boundary("staggered product layer needs a + or f boundary".into())
            })?;
            let (p1, p2) = sampling_probabilities(&c)?;
            let mut open = vec![false; r.n_edges()];
            for (e, x) in open.iter_mut().enumerate() {
                let (u, v) = r.edge(e);
                if pair.s[u] == pair.s[v] {
                    let p = if pair.s2[u] != pair.s2[v] { p1 } else { p2 };
                    *x = state.rng.random::<f64>() < p;
                }
            }
            out.push(max_hole_diameter(&r, &EdgeConfig::new(open, fill)) as f64);
        }
        Observable::Connection(k) => {
            let omega = sample_gat(state)?;
            out.push(connects_beyond(&r, &omega, o, *k) as u8 as f64);
        }
        Observable::EdgeDensity => {
            let (p1, p2) = sampling_probabilities(&state.c)?;
            let mut total = 0.0;
            for e in 0..r.n_edges() {
                let (u, v) = r.edge(e);
                if state.pair.s[u] == state.pair.s[v] {
                    total += if state.pair.s2[u] != state.pair.s2[v] { p1 } else { p2 };
                }
            }
            out.push(total / r.n_edges() as f64);
        }
    }
    Ok(())
}

/// Burn-in, then one record every `thin` sweeps until `sweeps` sweeps.
pub fn measure_observables(
    state: &mut ChainState,
    settings: &ChainSettings,
    observables: &[Observable],
) -> Result<ObservableSeries> {
    settings.validate()?;
    let probe = Probe::new(state, observables)?;
    let names: Vec<String> = observables.iter().flat_map(|o| o.names()).collect();
    let mut data = vec![Vec::new(); names.len()];
    for _ in 0..settings.burn_in {
        state.sweep();
    }
    let mut row = Vec::with_capacity(names.len());
    for t in 1..=settings.sweeps {
        state.sweep();
        if t % settings.thin == 0 {
            row.clear();
            for obs in observables {
                record(state, &probe, obs, &mut row)?;
            }
            for (d, x) in data.iter_mut().zip(&row) {
                d.push(*x);
            }
        }
    }
    Ok(ObservableSeries { names, data })
}

/// A summarised observable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedEstimate {
    pub name: String,
    pub estimate: Estimate,
}

/// Independent chains of one parameter point with pooled estimates.
#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub chains: Vec<ObservableSeries>,
    pub estimates: Vec<NamedEstimate>,
}

impl RunResult {
    pub fn estimate(&self, name: &str) -> Option<Estimate> {
        self.estimates.iter().find(|e| e.name == name).map(|e| e.estimate)
    }
}

/// Batch means of each chain (MIN_BATCHES per chain), pooled in chain order.
fn pooled_batches(chains: &[ObservableSeries], name: &str) -> Vec<f64> {
    chains
        .iter()
        .filter_map(|c| c.get(name))
        .flat_map(|xs| batch_means(xs, MIN_BATCHES))
        .collect()
}

fn pooled_estimate(chains: &[ObservableSeries], name: &str) -> Estimate {
    let all: Vec<f64> = chains
        .iter()
        .filter_map(|c| c.get(name))
        .flat_map(|xs| xs.iter().copied())
        .collect();
    let b = pooled_batches(chains, name);
    Estimate {
        value: mean(&all),
        stderr: (b.len() >= MIN_BATCHES).then(|| (variance(&b) / b.len() as f64).sqrt()),
    }
}

pub fn summarize(chains: &[ObservableSeries]) -> Vec<NamedEstimate> {
    let Some(first) = chains.first() else {
        return Vec::new();
    };
    let mut out: Vec<NamedEstimate> = first
        .names
        .iter()
        .map(|n| NamedEstimate {
            name: n.clone(),
            estimate: pooled_estimate(chains, n),
        })
        .collect();
    if first.get("h0").is_some() {
        let h = pooled_batches(chains, "h0");
        let h2 = pooled_batches(chains, "h0_sq");
        let batches: Vec<Vec<f64>> = h.iter().zip(&h2).map(|(a, b)| vec![*a, *b]).collect();
        let mut est = jackknife(&batches, |m| m[1] - m[0] * m[0]);
        let all_h: Vec<f64> = chains.iter().filter_map(|c| c.get("h0")).flatten().copied().collect();
        let all_h2: Vec<f64> = chains.iter().filter_map(|c| c.get("h0_sq")).flatten().copied().collect();
        est.value = mean(&all_h2) - mean(&all_h).powi(2);
        out.push(NamedEstimate {
            name: "var_h0".into(),
            estimate: est,
        });
    }
    out
}

/// Runs `settings.chains` chains in parallel; chain i uses RNG stream i of
/// the master seed, so results do not depend on the worker count.
pub fn run_chains(
    region: &Arc<Region>,
    c: &CouplingConstants,
    bc: &[BoundaryCondition; 2],
    settings: &ChainSettings,
    observables: &[Observable],
) -> Result<RunResult> {
    settings.validate()?;
    let chains: Result<Vec<ObservableSeries>> = (0..settings.chains)
        .into_par_iter()
        .map(|i| {
            let mut st = ChainState::new(region.clone(), c, bc.clone(), settings.seed, i as u64)?;
            measure_observables(&mut st, settings, observables)
        })
        .collect();
    let chains = chains?;
    let estimates = summarize(&chains);
    Ok(RunResult { chains, estimates })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn domino() -> Arc<Region> {
        Arc::new(Region::from_vertices(2, &[vec![0, 0], vec![1, 0]]).unwrap())
    }

    #[test]
    fn zero_couplings_give_fair_conditionals() {
        let st = ChainState::new(
            domino(),
            &CouplingConstants::new(0.0, 0.0, 0.0),
            [BoundaryCondition::Plus, BoundaryCondition::Plus],
            1,
            0,
        )
        .unwrap();
        assert!(st.table.iter().all(|w| w.iter().all(|&x| x == 1.0)));
    }

    #[test]
    fn boundary_spins_stay_fixed() {
        let mut st = ChainState::new(
            Arc::new(Region::cube(2, 1).unwrap()),
            &CouplingConstants::new(0.3, 0.2, -0.1),
            [BoundaryCondition::Minus, BoundaryCondition::alternating()],
            3,
            0,
        )
        .unwrap();
        for _ in 0..50 {
            st.sweep();
        }
        assert!(st.pair().is_consistent());
        assert_eq!(st.sweeps(), 50);
    }

    #[test]
    fn same_seed_same_trajectory() {
        let run = || {
            let mut st = ChainState::new(
                Arc::new(Region::cube(2, 1).unwrap()),
                &CouplingConstants::new(0.4, 0.1, 0.05),
                [BoundaryCondition::Free, BoundaryCondition::Free],
                42,
                3,
            )
            .unwrap();
            for _ in 0..100 {
                st.sweep();
            }
            (st.pair().s.clone(), st.pair().s2.clone())
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn gat_sample_closed_on_disagreements() {
        let mut st = ChainState::new(
            Arc::new(Region::cube(2, 1).unwrap()),
            &CouplingConstants::new(0.5, 0.2, 0.5),
            [BoundaryCondition::Free, BoundaryCondition::Free],
            9,
            0,
        )
        .unwrap();
        for _ in 0..200 {
            st.sweep();
            let w = sample_gat(&mut st).unwrap();
            let r = st.region().clone();
            for e in 0..r.n_edges() {
                let (u, v) = r.edge(e);
                if w.is_open(e) {
                    assert_eq!(st.pair().s[u], st.pair().s[v]);
                    assert_eq!(st.pair().s2[u], st.pair().s2[v]);
                }
            }
        }
    }

    #[test]
    fn holes_of_a_closed_box() {
        let r = Region::cube(2, 2).unwrap();
        assert_eq!(max_hole_diameter(&r, &EdgeConfig::full(r.n_edges(), true)), 0);
        assert_eq!(max_hole_diameter(&r, &EdgeConfig::closed(r.n_edges(), true)), 4);
        let mut w = EdgeConfig::full(r.n_edges(), true);
        let o = r.origin().unwrap();
        for e in r.incident(o).collect::<Vec<_>>() {
            w.set(e, false);
        }
        assert_eq!(max_hole_diameter(&r, &w), 0);
        assert!(boundary_cluster(&r, &w).iter().filter(|&&b| !b).count() == 1);
    }

    #[test]
    fn connection_radius_zero_is_certain() {
        let r = Region::cube(2, 2).unwrap();
        let o = r.origin().unwrap();
        let w = EdgeConfig::closed(r.n_edges(), false);
        assert!(connects_beyond(&r, &w, o, 0));
        assert!(!connects_beyond(&r, &w, o, 1));
    }
}
