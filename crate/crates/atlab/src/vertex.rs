//! Eight- and six-vertex spin laws on planar domains, their coupling with
//! the AT model, and six-vertex height functions.
//!
//! σ• lives on Λ̄ and σ∘ on the dual nodes; σ∘ is +1 off Λ* so only its
//! values on faces are free. In an index over σ∘, bit k set means +1 on
//! face k.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{DualGeometry, EdgeConfig, Region};
use crate::oracle::{
    check_states, cluster_counts, pow_ln, EnumeratedMeasure, LayerSpace, StateSpace, MAX_EDGES,
    MAX_FREE_SITES, MAX_STATES,
};
use crate::spin::BoundaryCondition;
use crate::weights::{CouplingConstants, VertexWeights};

/// Largest box side n for which the height-function law is enumerated.
pub const MAX_HF_RADIUS: u32 = 1;

/// A pair (σ•, σ∘): σ• indexed by the vertices of Λ̄, σ∘ by dual nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct VertexSpinConfig {
    pub primal: Vec<i8>,
    pub dual: Vec<i8>,
}

impl VertexSpinConfig {
    /// E_{σ•} and E_{σ∘} over Ē_Λ.
    pub fn disagreements(&self, geom: &DualGeometry) -> (Vec<bool>, Vec<bool>) {
        let r = geom.region();
        (0..r.n_edges())
            .map(|e| {
                let (u, v) = r.edge(e);
                let (f, g) = geom.dual_edge(e);
                (self.primal[u] != self.primal[v], self.dual[f] != self.dual[g])
            })
            .unzip()
    }

    /// E_{σ•} ∩ E_{σ∘} = ∅.
    pub fn ice_rule(&self, geom: &DualGeometry) -> bool {
        let (a, b) = self.disagreements(geom);
        a.iter().zip(&b).all(|(x, y)| !(x & y))
    }

    /// σ∘ = +1 off Λ*.
    pub fn dual_is_pinned(&self, geom: &DualGeometry) -> bool {
        (geom.n_faces()..geom.n_nodes()).all(|k| self.dual[k] == 1)
    }
}

fn check_vertex_weights(w: &VertexWeights) -> Result<()> {
    let ok = [w.a, w.b, w.c, w.d].iter().all(|x| x.is_finite() && *x >= 0.0) && w.c > 0.0;
    if !ok {
        return Err(Error::Parameters(format!(
            "vertex weights must be finite and non-negative with c > 0, got {w:?}"
        )));
    }
    Ok(())
}

/// Mask of the edges whose dual edge touches each face.
fn face_toggles(geom: &DualGeometry) -> Vec<u64> {
    let mut t = vec![0u64; geom.n_faces()];
    for e in 0..geom.region().n_edges() {
        let (f, g) = geom.dual_edge(e);
        for k in [f, g] {
            if geom.is_face(k) {
                t[k] ^= 1 << e;
            }
        }
    }
    t
}

/// E_{σ∘} for every σ∘ index.
fn dual_masks(geom: &DualGeometry) -> Vec<u64> {
    let toggles = face_toggles(geom);
    let full = (1usize << toggles.len()) - 1;
    (0..=full)
        .map(|j| {
            toggles
                .iter()
                .enumerate()
                .fold(0, |m, (k, t)| if j >> k & 1 == 0 { m ^ t } else { m })
        })
        .collect()
}

/// An enumerated law on (σ•, σ∘) with its indexing.
#[derive(Debug, Clone)]
pub struct VertexLaw {
    pub measure: EnumeratedMeasure,
    pub primal: LayerSpace,
    pub geom: Arc<DualGeometry>,
}

impl VertexLaw {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i + j * self.primal.len()
    }

    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx % self.primal.len(), idx / self.primal.len())
    }

    pub fn config(&self, idx: usize) -> VertexSpinConfig {
        let (i, j) = self.split(idx);
        let dual = (0..self.geom.n_nodes())
            .map(|k| if !self.geom.is_face(k) || j >> k & 1 == 1 { 1 } else { -1 })
            .collect();
        VertexSpinConfig {
            primal: self.primal.config(i),
            dual,
        }
    }

    pub fn index_of(&self, s: &VertexSpinConfig) -> Option<usize> {
        if !s.dual_is_pinned(&self.geom) {
            return None;
        }
        let i = self.primal.index_of(&s.primal)?;
        let j = (0..self.geom.n_faces()).fold(0, |j, k| if s.dual[k] == 1 { j | 1 << k } else { j });
        Some(self.index(i, j))
    }
}

fn vertex_setup(region: &Arc<Region>, eta2: &BoundaryCondition) -> Result<(Arc<DualGeometry>, LayerSpace)> {
    let geom = DualGeometry::new(region)?;
    if region.n_edges() > 64 {
        return Err(Error::CapExceeded("more than 64 edges".into()));
    }
    if geom.n_faces() > MAX_FREE_SITES {
        return Err(Error::CapExceeded(format!(
            "{} faces exceed the cap of {MAX_FREE_SITES}",
            geom.n_faces()
        )));
    }
    let primal = LayerSpace::new(region, eta2)?;
    check_states(primal.len() << geom.n_faces())?;
    Ok((Arc::new(geom), primal))
}

/// Law of σ ∝ a^{|E∘∖E•|} b^{|E•∖E∘|} c^{|E∖(E•∪E∘)|} d^{|E•∩E∘|} on
/// Σ^{η'}_Λ × Σ^+_{Λ*}.
pub fn eightv_law(region: &Arc<Region>, w: &VertexWeights, eta2: &BoundaryCondition) -> Result<VertexLaw> {
    check_vertex_weights(w)?;
    let (geom, primal) = vertex_setup(region, eta2)?;
    let ne = region.n_edges() as u32;
    let bullet = primal.masks();
    let circ = dual_masks(&geom);
    let (la, lb, lc, ld) = (w.a.ln(), w.b.ln(), w.c.ln(), w.d.ln());
    let n1 = bullet.len();
    let lw = (0..n1 * circ.len())
        .into_par_iter()
        .map(|idx| {
            let mb = bullet[idx % n1];
            let mc = circ[idx / n1];
            pow_ln(la, (mc & !mb).count_ones())
                + pow_ln(lb, (mb & !mc).count_ones())
                + pow_ln(lc, ne - (mb | mc).count_ones())
                + pow_ln(ld, (mb & mc).count_ones())
        })
        .collect();
    let measure = EnumeratedMeasure::from_log_weights(
        StateSpace::Vertex {
            primal: n1,
            dual: circ.len(),
        },
        lw,
    )?;
    Ok(VertexLaw { measure, primal, geom })
}

/// Streaming ln Σ e^{x}.
#[derive(Debug, Clone, Copy)]
struct LogAcc {
    max: f64,
    sum: f64,
}

impl LogAcc {
    const EMPTY: LogAcc = LogAcc {
        max: f64::NEG_INFINITY,
        sum: 0.0,
    };

    fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.sum += (x - self.max).exp();
        }
    }

    fn merge(mut self, o: LogAcc) -> LogAcc {
        if o.max > f64::NEG_INFINITY {
            self.add(o.max);
            self.sum += (o.sum - 1.0) * (o.max - self.max).exp();
        }
        self
    }

    fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// σ∘ indices compatible with ω (constant on ω*-clusters, +1 on clusters
/// reaching off Λ*) and the number of free clusters.
fn compatible_duals(geom: &DualGeometry, omega: &EdgeConfig) -> (Vec<usize>, usize) {
    let (labels, far) = geom.dual_clusters(omega);
    let mut pinned: Vec<u32> = labels[geom.n_faces()..].to_vec();
    pinned.push(far);
    let mut free: Vec<u32> = labels[..geom.n_faces()]
        .iter()
        .copied()
        .filter(|l| !pinned.contains(l))
        .collect();
    free.sort_unstable();
    free.dedup();
    let base = (1usize << geom.n_faces()) - 1;
    let out = (0..1usize << free.len())
        .map(|a| {
            (0..geom.n_faces()).fold(base, |j, k| match free.iter().position(|&l| l == labels[k]) {
                Some(p) if a >> p & 1 == 1 => j & !(1 << k),
                _ => j,
            })
        })
        .collect();
    (out, free.len())
}

/// Law of σ produced from the joint law of (s, s', ω) with η = f: σ• = s',
/// σ∘ uniform among the colourings of the ω*-clusters that are +1 on the
/// clusters reaching off Λ*.
pub fn eightv_from_coupling(
    region: &Arc<Region>,
    c: &CouplingConstants,
    eta2: &BoundaryCondition,
) -> Result<VertexLaw> {
    crate::oracle::check_density(c)?;
    if region.n_edges() > MAX_EDGES {
        return Err(Error::CapExceeded(format!(
            "{} edges exceed the enumeration cap of {MAX_EDGES}",
            region.n_edges()
        )));
    }
    let (geom, primal) = vertex_setup(region, eta2)?;
    let ne = region.n_edges();
    let n_omega = 1usize << ne;
    let work = ((n_omega as u128) * (primal.len() as u128)) << geom.n_faces();
    if work > 1 << 34 {
        return Err(Error::CapExceeded(format!("coupling sum of {work} terms")));
    }
    let (lx, lb, lc) = crate::oracle::joint_exponents(c);
    let counts = cluster_counts(region, false)?;
    let bullet = primal.masks();
    let mut distinct = bullet.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let n_dual = 1usize << geom.n_faces();
    let ln2 = std::f64::consts::LN_2;
    let acc = (0..n_omega)
        .into_par_iter()
        .fold(
            || vec![LogAcc::EMPTY; distinct.len() * n_dual],
            |mut acc, w| {
                let omega = EdgeConfig::from_mask(w as u64, ne, false);
                let (duals, n_free) = compatible_duals(&geom, &omega);
                let base = (counts[w] as f64 - n_free as f64) * ln2;
                let w = w as u64;
                for (p, &m) in distinct.iter().enumerate() {
                    let lw = base
                        + lx * m.count_ones() as f64
                        + pow_ln(lb, (w & m).count_ones())
                        + pow_ln(lc, (w & !m).count_ones());
                    for &j in &duals {
                        acc[p + j * distinct.len()].add(lw);
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![LogAcc::EMPTY; distinct.len() * n_dual],
            |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect(),
        );
    let pos: HashMap<u64, usize> = distinct.iter().enumerate().map(|(p, &m)| (m, p)).collect();
    let n1 = primal.len();
    let lw = (0..n1 * n_dual)
        .map(|idx| acc[pos[&bullet[idx % n1]] + (idx / n1) * distinct.len()].value())
        .collect();
    let measure = EnumeratedMeasure::from_log_weights(StateSpace::Vertex { primal: n1, dual: n_dual }, lw)?;
    Ok(VertexLaw { measure, primal, geom })
}

/// Boundary heights t: shift on even and shift + 2 on odd primal vertices,
/// shift + 1 on dual nodes.
pub fn boundary_height(x: &[i32], shift: i32) -> i32 {
    if x.iter().sum::<i32>().rem_euclid(2) == 0 {
        shift
    } else {
        shift + 2
    }
}

fn check_shift(shift: i32) -> Result<()> {
    if shift % 2 != 0 {
        return Err(Error::Boundary(format!(
            "boundary heights must be even on Z^2, got shift {shift}"
        )));
    }
    Ok(())
}

/// Heights on Λ̄ (indexed like the region) and on the dual nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct HeightFunction {
    pub primal: Vec<i32>,
    pub dual: Vec<i32>,
}

/// Edge counts |E_{h∘}∖E_{h•}|, |E_{h•}∖E_{h∘}|, |E∖(E_{h•}∪E_{h∘})|, |E_{h•}∩E_{h∘}|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeClasses {
    pub circ: u32,
    pub bullet: u32,
    pub neither: u32,
    pub both: u32,
}

impl HeightFunction {
    /// The unique ground state: t on Λ̄, 1 + shift on every dual node.
    pub fn ground_state(geom: &DualGeometry, shift: i32) -> Self {
        let r = geom.region();
        HeightFunction {
            primal: (0..r.len()).map(|v| boundary_height(r.coord(v), shift)).collect(),
            dual: vec![shift + 1; geom.n_nodes()],
        }
    }

    /// Integrates h_{x'} - h_x = σ•_x σ∘_{x'} from h = 1 off Λ*.
    pub fn from_spins(geom: &DualGeometry, s: &VertexSpinConfig) -> Result<Self> {
        let r = geom.region();
        if s.primal.len() != r.len() || s.dual.len() != geom.n_nodes() {
            return Err(Error::Input("spin configuration does not match the domain".into()));
        }
        if !s.dual_is_pinned(geom) {
            return Err(Error::Input("σ∘ must be +1 off Λ*".into()));
        }
        let np = r.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); np + geom.n_nodes()];
        for (_, pv, dv) in geom.quads() {
            for &x in &pv {
                for &y in &dv {
                    adj[x].push(np + y);
                    adj[np + y].push(x);
                }
            }
        }
        let mut h: Vec<Option<i32>> = vec![None; np + geom.n_nodes()];
        let mut queue = VecDeque::new();
        for k in geom.n_faces()..geom.n_nodes() {
            h[np + k] = Some(1);
            queue.push_back(np + k);
        }
        while let Some(a) = queue.pop_front() {
            let ha = h[a].expect("queued nodes carry a height");
            for &b in &adj[a] {
                let (x, y) = if a < np { (a, b - np) } else { (b, a - np) };
                let inc = (s.primal[x] * s.dual[y]) as i32;
                let want = if a < np { ha + inc } else { ha - inc };
                match h[b] {
                    None => {
                        h[b] = Some(want);
                        queue.push_back(b);
                    }
                    Some(v) if v != want => {
                        return Err(Error::Input(
                            "increments do not close around a vertex: the ice rule fails".into(),
                        ))
                    }
                    Some(_) => {}
                }
            }
        }
        let h: Option<Vec<i32>> = h.into_iter().collect();
        let h = h.ok_or_else(|| Error::Input("domain is not connected through quads".into()))?;
        let out = HeightFunction {
            primal: h[..np].to_vec(),
            dual: h[np..].to_vec(),
        };
        out.check_axioms(geom)?;
        Ok(out)
    }

    /// h even on Λ̄ and |h_x - h_{x'}| = 1 across every quad.
    pub fn check_axioms(&self, geom: &DualGeometry) -> Result<()> {
        if let Some(v) = self.primal.iter().position(|h| h.rem_euclid(2) != 0) {
            return Err(Error::Input(format!("odd height at primal vertex {v}")));
        }
        for (e, pv, dv) in geom.quads() {
            for &x in &pv {
                for &y in &dv {
                    if (self.primal[x] - self.dual[y]).abs() != 1 {
                        return Err(Error::Input(format!("height jump across the quad of edge {e}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// h = t off Λ ∪ Λ*.
    pub fn matches_boundary(&self, geom: &DualGeometry, shift: i32) -> bool {
        let r = geom.region();
        r.boundary_vertices()
            .all(|v| self.primal[v] == boundary_height(r.coord(v), shift))
            && (geom.n_faces()..geom.n_nodes()).all(|k| self.dual[k] == shift + 1)
    }

    pub fn edge_classes(&self, geom: &DualGeometry) -> EdgeClasses {
        let mut out = EdgeClasses {
            circ: 0,
            bullet: 0,
            neither: 0,
            both: 0,
        };
        for (e, [u, v], _) in geom.quads() {
            let (f, g) = geom.dual_edge(e);
            match (self.primal[u] != self.primal[v], self.dual[f] != self.dual[g]) {
                (true, true) => out.both += 1,
                (true, false) => out.bullet += 1,
                (false, true) => out.circ += 1,
                (false, false) => out.neither += 1,
            }
        }
        out
    }

    /// ln(a^{|E_{h∘}|} b^{|E_{h•}|} c^{|E∖(E_{h•}∪E_{h∘})|}).
    pub fn log_weight(&self, geom: &DualGeometry, w: &VertexWeights) -> f64 {
        let k = self.edge_classes(geom);
        if k.both > 0 {
            return f64::NEG_INFINITY;
        }
        pow_ln(w.a.ln(), k.circ) + pow_ln(w.b.ln(), k.bullet) + pow_ln(w.c.ln(), k.neither)
    }

    fn key(&self) -> Vec<i32> {
        self.primal.iter().chain(&self.dual).copied().collect()
    }
}

/// Enumerated height-function measure with its list of states.
#[derive(Debug, Clone)]
pub struct HeightLaw {
    pub measure: EnumeratedMeasure,
    pub heights: Vec<HeightFunction>,
    pub geom: Arc<DualGeometry>,
    index: HashMap<Vec<i32>, usize>,
}

impl HeightLaw {
    pub fn index_of(&self, h: &HeightFunction) -> Option<usize> {
        self.index.get(&h.key()).copied()
    }

    /// Var(h_x) at a primal vertex.
    pub fn variance_at(&self, v: usize) -> f64 {
        let m = self.measure.expectation(|i| self.heights[i].primal[v] as f64);
        self.measure
            .expectation(|i| (self.heights[i].primal[v] as f64 - m).powi(2))
    }
}

/// Every admissible height function on the domain with boundary t.
pub fn enumerate_heights(geom: &DualGeometry, shift: i32) -> Result<Vec<HeightFunction>> {
    check_shift(shift)?;
    let r = geom.region();
    let np = r.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); np + geom.n_nodes()];
    for (_, pv, dv) in geom.quads() {
        for &x in &pv {
            for &y in &dv {
                adj[x].push(np + y);
                adj[np + y].push(x);
            }
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }
    let ground = HeightFunction::ground_state(geom, shift);
    let mut h: Vec<Option<i32>> = ground
        .primal
        .iter()
        .chain(&ground.dual)
        .map(|&x| Some(x))
        .collect();
    let mut order: Vec<(i64, i64, usize)> = r
        .interior_vertices()
        .map(|v| (2 * r.coord(v)[1] as i64, 2 * r.coord(v)[0] as i64, v))
        .chain((0..geom.n_faces()).map(|k| {
            let p = geom.node(k);
            (2 * p[1] as i64 + 1, 2 * p[0] as i64 + 1, np + k)
        }))
        .collect();
    order.sort_unstable();
    let order: Vec<usize> = order.into_iter().map(|t| t.2).collect();
    for &a in &order {
        h[a] = None;
    }
    let mut out = Vec::new();
    fn dfs(
        pos: usize,
        order: &[usize],
        adj: &[Vec<usize>],
        h: &mut Vec<Option<i32>>,
        np: usize,
        out: &mut Vec<HeightFunction>,
    ) -> Result<()> {
        if pos == order.len() {
            if out.len() >= MAX_STATES {
                return Err(Error::CapExceeded(format!(
                    "more than {MAX_STATES} height functions"
                )));
            }
            let all: Vec<i32> = h.iter().map(|x| x.expect("all heights assigned")).collect();
            out.push(HeightFunction {
                primal: all[..np].to_vec(),
                dual: all[np..].to_vec(),
            });
            return Ok(());
        }
        let a = order[pos];
        let known: Vec<i32> = adj[a].iter().filter_map(|&b| h[b]).collect();
        let Some(&first) = known.first() else {
            return Err(Error::Input("site without an assigned neighbour".into()));
        };
        for cand in [first - 1, first + 1] {
            if known.iter().all(|&k| (k - cand).abs() == 1) {
                h[a] = Some(cand);
                dfs(pos + 1, order, adj, h, np, out)?;
            }
        }
        h[a] = None;
        Ok(())
    }
    dfs(0, &order, &adj, &mut h, np, &mut out)?;
    Ok(out)
}

/// HF law ∝ a^{|E_{h∘}|} b^{|E_{h•}|} c^{|E∖(E_{h•}∪E_{h∘})|} with
/// boundary t (shifted by an even `shift`).
pub fn hf_law(region: &Arc<Region>, w: &VertexWeights, shift: i32) -> Result<HeightLaw> {
    check_vertex_weights(w)?;
    if !(w.a > 0.0 && w.b > 0.0) {
        return Err(Error::Parameters("height-function weights must be positive".into()));
    }
    if let Some(n) = region.radius() {
        if n > MAX_HF_RADIUS {
            return Err(Error::CapExceeded(format!(
                "height-function enumeration is capped at n = {MAX_HF_RADIUS}"
            )));
        }
    }
    let geom = Arc::new(DualGeometry::new(region)?);
    let heights = enumerate_heights(&geom, shift)?;
    let lw = heights.iter().map(|h| h.log_weight(&geom, w)).collect();
    let measure = EnumeratedMeasure::from_log_weights(StateSpace::Listed { len: heights.len() }, lw)?;
    let index = heights.iter().enumerate().map(|(i, h)| (h.key(), i)).collect();
    Ok(HeightLaw {
        measure,
        heights,
        geom,
        index,
    })
}

/// Pushes a six-vertex spin law with boundary η± forward to height
/// functions.
pub fn height_pushforward(law: &VertexLaw, target: &HeightLaw) -> Result<EnumeratedMeasure> {
    let mut map = vec![0usize; law.measure.len()];
    for idx in law.measure.support() {
        let h = HeightFunction::from_spins(&law.geom, &law.config(idx))?;
        map[idx] = target
            .index_of(&h)
            .ok_or_else(|| Error::Input("spin configuration maps outside Ω_hf".into()))?;
    }
    law.measure
        .pushforward(target.measure.space().clone(), target.measure.len(), |i| map[i])
}

/// Exact Var(h_0) on B_n.
pub fn height_variance_exact(n: u32, w: &VertexWeights) -> Result<f64> {
    let r = Arc::new(Region::cube(2, n)?);
    let law = hf_law(&r, w, 0)?;
    let o = r.origin().expect("box contains its centre");
    Ok(law.variance_at(o))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::eight_vertex_weights;

    fn block() -> Arc<Region> {
        Arc::new(Region::from_vertices(2, &[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap())
    }

    #[test]
    fn six_vertex_support_obeys_ice_rule() {
        let r = block();
        let law = eightv_law(&r, &VertexWeights::six_vertex(0.7, 1.3, 2.0), &BoundaryCondition::Plus).unwrap();
        for idx in law.measure.support() {
            assert!(law.config(idx).ice_rule(&law.geom));
        }
    }

    #[test]
    fn equal_weights_are_uniform_on_ice_configurations() {
        let r = Arc::new(Region::from_vertices(2, &[vec![0, 0]]).unwrap());
        let law = eightv_law(&r, &VertexWeights::six_vertex(1.0, 1.0, 1.0), &BoundaryCondition::Plus).unwrap();
        let support: Vec<usize> = law.measure.support().collect();
        assert_eq!(support.len(), 2);
        for i in support {
            assert!((law.measure.prob(i) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn coupling_matches_closed_form() {
        let r = block();
        let c = CouplingConstants::new(0.4, 0.3, 0.1);
        let w = eight_vertex_weights(&c).unwrap();
        for eta2 in [BoundaryCondition::Plus, BoundaryCondition::alternating()] {
            let a = eightv_law(&r, &w, &eta2).unwrap();
            let b = eightv_from_coupling(&r, &c, &eta2).unwrap();
            assert!(a.measure.total_variation(&b.measure).unwrap() < 1e-12);
        }
    }

    #[test]
    fn ground_state_round_trip() {
        let r = Arc::new(Region::cube(2, 1).unwrap());
        let geom = DualGeometry::new(&r).unwrap();
        let s = VertexSpinConfig {
            primal: (0..r.len())
                .map(|v| BoundaryCondition::alternating().pattern_value(r.coord(v)))
                .collect(),
            dual: vec![1; geom.n_nodes()],
        };
        let h = HeightFunction::from_spins(&geom, &s).unwrap();
        assert_eq!(h, HeightFunction::ground_state(&geom, 0));
        assert!(h.matches_boundary(&geom, 0));
    }

    #[test]
    fn height_law_is_six_vertex_pushforward() {
        let r = Arc::new(Region::cube(2, 1).unwrap());
        let w = VertexWeights::six_vertex(0.4, 1.7, 1.0);
        let hf = hf_law(&r, &w, 0).unwrap();
        let sv = eightv_law(&r, &w, &BoundaryCondition::alternating()).unwrap();
        let pushed = height_pushforward(&sv, &hf).unwrap();
        assert!(pushed.total_variation(&hf.measure).unwrap() < 1e-12);
        for h in &hf.heights {
            assert_eq!(h.edge_classes(&hf.geom).both, 0);
        }
    }

    #[test]
    fn log_acc_merge() {
        let xs = [-3.0, 1.5, 0.2, -700.0, 2.0];
        let mut a = LogAcc::EMPTY;
        let mut b = LogAcc::EMPTY;
        for (i, &x) in xs.iter().enumerate() {
            if i % 2 == 0 { a.add(x) } else { b.add(x) }
        }
        let exact = crate::stats::log_sum_exp(&xs);
        assert!((a.merge(b).value() - exact).abs() < 1e-14);
        assert!((LogAcc::EMPTY.merge(a).value() - a.value()).abs() < 1e-15);
    }
}
