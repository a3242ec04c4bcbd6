//! Finite regions of Z^d, their padded closure and edge sets, cluster counts,
//! and the planar dual used by the vertex models.

use std::collections::{hash_map::Entry, HashMap};

use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

/// Sentinel stored for interior vertices in the complement-class table.
const NO_CLASS: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

pub fn parity_of(x: &[i32]) -> Parity {
    if x.iter().map(|&c| c as i64).sum::<i64>().rem_euclid(2) == 0 {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// Parity of every vertex of a region's closure, in canonical vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityMap(pub Vec<Parity>);

impl ParityMap {
    pub fn is_even(&self, v: usize) -> bool {
        self.0[v] == Parity::Even
    }

    /// +1 on even vertices, -1 on odd ones.
    pub fn sign(&self, v: usize) -> i8 {
        if self.is_even(v) {
            1
        } else {
            -1
        }
    }
}

/// A finite vertex set Λ ⊂ Z^d together with Λ̄ (Λ and its neighbours) and
/// the edge set Ē_Λ of edges with at least one endpoint in Λ.
///
/// Vertices of Λ̄ are stored in lexicographic order; edges are ordered by
/// (lower endpoint, axis), which is lexicographic on the lower endpoint
/// coordinates followed by the axis.
#[derive(Debug, Clone)]
pub struct Region {
    d: usize,
    radius: Option<u32>,
    coords: Vec<i32>,
    interior: Vec<bool>,
    lookup: HashMap<Vec<i32>, usize>,
    edges: Vec<[u32; 2]>,
    axis: Vec<u8>,
    incident: Vec<Vec<u32>>,
    outer_class: Vec<u32>,
    n_outer: usize,
}

impl Region {
    /// The box B_n = {-n..n}^d.
    pub fn cube(d: usize, n: u32) -> Result<Self> {
        Self::cube_at(d, n, &vec![0; d])
    }

    /// The box B_n(x) centred at `center`.
    pub fn cube_at(d: usize, n: u32, center: &[i32]) -> Result<Self> {
        if d < 2 {
            return Err(Error::Region(format!("dimension {d} < 2")));
        }
        if center.len() != d {
            return Err(Error::Region("center has wrong dimension".into()));
        }
        let side = 2 * n as usize + 1;
        let total = side
            .checked_pow(d as u32)
            .filter(|&t| t <= 50_000_000)
            .ok_or_else(|| Error::Region(format!("box B_{n} in d={d} is too large")))?;
        let mut verts = Vec::with_capacity(total);
        let mut x = vec![0i32; d];
        for mut idx in 0..total {
            for c in (0..d).rev() {
                x[c] = center[c] - n as i32 + (idx % side) as i32;
                idx /= side;
            }
            verts.push(x.clone());
        }
        let mut region = Self::from_vertices(d, &verts)?;
        region.radius = Some(n);
        Ok(region)
    }

    /// Arbitrary nonempty finite vertex set.
    pub fn from_vertices(d: usize, vertices: &[Vec<i32>]) -> Result<Self> {
        if d < 2 {
            return Err(Error::Region(format!("dimension {d} < 2")));
        }
        if vertices.is_empty() {
            return Err(Error::Region("empty vertex set".into()));
        }
        let mut inner: Vec<Vec<i32>> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if v.len() != d {
                return Err(Error::Region("vertex has wrong dimension".into()));
            }
            inner.push(v.clone());
        }
        inner.sort();
        let before = inner.len();
        inner.dedup();
        if inner.len() != before {
            return Err(Error::Region("duplicate vertices".into()));
        }
        let inner_set: std::collections::HashSet<Vec<i32>> = inner.iter().cloned().collect();

        let mut closure = inner.clone();
        for v in &inner {
            for a in 0..d {
                for delta in [-1, 1] {
                    let mut w = v.clone();
                    w[a] += delta;
                    closure.push(w);
                }
            }
        }
        closure.sort();
        closure.dedup();

        let mut lookup = HashMap::with_capacity(closure.len());
        let mut coords = Vec::with_capacity(closure.len() * d);
        let mut interior = Vec::with_capacity(closure.len());
        for (i, v) in closure.iter().enumerate() {
            lookup.insert(v.clone(), i);
            coords.extend_from_slice(v);
            interior.push(inner_set.contains(v));
        }

        let mut edges = Vec::new();
        let mut axis = Vec::new();
        let mut incident = vec![Vec::new(); closure.len()];
        for (i, v) in closure.iter().enumerate() {
            for a in 0..d {
                let mut w = v.clone();
                w[a] += 1;
                if let Some(&j) = lookup.get(&w) {
                    if interior[i] || interior[j] {
                        let e = edges.len() as u32;
                        edges.push([i as u32, j as u32]);
                        axis.push(a as u8);
                        incident[i].push(e);
                        incident[j].push(e);
                    }
                }
            }
        }

        let mut region = Region {
            d,
            radius: None,
            coords,
            interior,
            lookup,
            edges,
            axis,
            incident,
            outer_class: Vec::new(),
            n_outer: 0,
        };
        region.compute_outer_classes(&inner_set);
        Ok(region)
    }

    /// Labels the vertices of Λ̄∖Λ by the connected component of Z^d∖Λ they
    /// lie in, computed inside a window that leaves a margin of two sites.
    fn compute_outer_classes(&mut self, inner: &std::collections::HashSet<Vec<i32>>) {
        let d = self.d;
        let mut lo = vec![i32::MAX; d];
        let mut hi = vec![i32::MIN; d];
        for v in inner {
            for a in 0..d {
                lo[a] = lo[a].min(v[a] - 2);
                hi[a] = hi[a].max(v[a] + 2);
            }
        }
        let widths: Vec<usize> = (0..d).map(|a| (hi[a] - lo[a] + 1) as usize).collect();
        let total: usize = widths.iter().product();
        let mut strides = vec![1usize; d];
        for a in 1..d {
            strides[a] = strides[a - 1] * widths[a - 1];
        }
        let cell = |idx: usize| -> Vec<i32> {
            (0..d)
                .map(|a| lo[a] + ((idx / strides[a]) % widths[a]) as i32)
                .collect()
        };
        // One extra node stands for everything beyond the window.
        let far = total;
        let mut uf = UnionFind::new(total + 1);
        for idx in 0..total {
            let x = cell(idx);
            if inner.contains(&x) {
                continue;
            }
            let on_frame = (0..d).any(|a| x[a] == lo[a] || x[a] == hi[a]);
            if on_frame {
                uf.union(idx, far);
            }
            for a in 0..d {
                if x[a] < hi[a] {
                    let mut y = x.clone();
                    y[a] += 1;
                    if !inner.contains(&y) {
                        uf.union(idx, idx + strides[a]);
                    }
                }
            }
        }
        let mut class_of_root: HashMap<usize, u32> = HashMap::new();
        class_of_root.insert(uf.find(far), 0);
        let mut outer_class = vec![NO_CLASS; self.len()];
        for v in 0..self.len() {
            if self.interior[v] {
                continue;
            }
            let x = self.coord(v);
            let idx: usize = (0..d).map(|a| (x[a] - lo[a]) as usize * strides[a]).sum();
            let root = uf.find(idx);
            let next = class_of_root.len() as u32;
            outer_class[v] = *class_of_root.entry(root).or_insert(next);
        }
        self.n_outer = class_of_root.len();
        self.outer_class = outer_class;
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Radius n when the region is a box B_n.
    pub fn radius(&self) -> Option<u32> {
        self.radius
    }

    /// |Λ̄|.
    pub fn len(&self) -> usize {
        self.interior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_empty()
    }

    /// |Λ|.
    pub fn interior_len(&self) -> usize {
        self.interior.iter().filter(|&&b| b).count()
    }

    pub fn coord(&self, v: usize) -> &[i32] {
        &self.coords[v * self.d..(v + 1) * self.d]
    }

    pub fn index_of(&self, x: &[i32]) -> Option<usize> {
        self.lookup.get(x).copied()
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.interior[v]
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&v| self.interior[v])
    }

    pub fn boundary_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&v| !self.interior[v])
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        let [u, v] = self.edges[e];
        (u as usize, v as usize)
    }

    pub fn edge_axis(&self, e: usize) -> usize {
        self.axis[e] as usize
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.incident[u].iter().map(|&e| e as usize).find(|&e| {
            let (a, b) = self.edge(e);
            (a == u && b == v) || (a == v && b == u)
        })
    }

    pub fn incident(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident[v].iter().map(|&e| e as usize)
    }

    /// Neighbours of `v` through edges of Ē_Λ.
    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident[v].iter().map(move |&e| {
            let [a, b] = self.edges[e as usize];
            if a as usize == v {
                b as usize
            } else {
                a as usize
            }
        })
    }

    pub fn parity(&self, v: usize) -> Parity {
        parity_of(self.coord(v))
    }

    pub fn is_even(&self, v: usize) -> bool {
        self.parity(v) == Parity::Even
    }

    pub fn parity_map(&self) -> ParityMap {
        ParityMap((0..self.len()).map(|v| self.parity(v)).collect())
    }

    /// Index of the origin (or of the box centre) when it belongs to Λ.
    pub fn origin(&self) -> Option<usize> {
        self.index_of(&vec![0; self.d]).filter(|&v| self.interior[v])
    }

    /// Number of connected components of Z^d∖Λ.
    pub fn n_outer_classes(&self) -> usize {
        self.n_outer
    }

    /// Complement component of a vertex of Λ̄∖Λ (0 is the unbounded one).
    pub fn outer_class(&self, v: usize) -> Option<usize> {
        let c = self.outer_class[v];
        (c != NO_CLASS).then_some(c as usize)
    }

    /// Clusters of ω intersecting Λ̄, with open edges given by `open`.
    pub fn clusters_with(&self, open: impl Fn(usize) -> bool, fill: bool) -> Clusters {
        let n = self.len();
        let mut uf = UnionFind::new(n + if fill { self.n_outer } else { 0 });
        for e in 0..self.n_edges() {
            if open(e) {
                let (u, v) = self.edge(e);
                uf.union(u, v);
            }
        }
        if fill {
            for v in 0..n {
                if let Some(c) = self.outer_class(v) {
                    uf.union(v, n + c);
                }
            }
        }
        let (labels, _) = uf.labels();
        // Compact the labels on Λ̄ only; outer-class nodes never lie alone
        // because every complement component touches Λ̄.
        let mut map: HashMap<u32, u32> = HashMap::new();
        let mut label = Vec::with_capacity(n);
        for &l in labels.iter().take(n) {
            let next = map.len() as u32;
            label.push(*map.entry(l).or_insert(next));
        }
        let count = map.len();
        let mut outside = vec![false; count];
        for v in 0..n {
            if !self.interior[v] {
                outside[label[v] as usize] = true;
            }
        }
        Clusters {
            label,
            count,
            outside,
        }
    }

    pub fn clusters(&self, omega: &EdgeConfig) -> Clusters {
        self.clusters_with(|e| omega.is_open(e), omega.fill())
    }

    /// k_Λ(ω): number of clusters of ω that intersect Λ̄.
    pub fn cluster_count(&self, omega: &EdgeConfig) -> usize {
        self.clusters(omega).count
    }

    /// Cluster count for ω packed into a bit mask (edge e is bit e).
    pub fn cluster_count_mask(&self, mask: u64, fill: bool) -> usize {
        self.cluster_count_fast(mask, fill, &mut UnionFind::new(self.len() + self.n_outer))
    }

    /// Allocation-free cluster count used in enumeration loops.
    pub fn cluster_count_fast(&self, mask: u64, fill: bool, uf: &mut UnionFind) -> usize {
        let n = self.len();
        uf.reset();
        let mut merges = 0;
        for (e, &[u, v]) in self.edges.iter().enumerate() {
            if mask >> e & 1 == 1 && uf.union(u as usize, v as usize) {
                merges += 1;
            }
        }
        if fill {
            for v in 0..n {
                let c = self.outer_class[v];
                if c != NO_CLASS && uf.union(v, n + c as usize) {
                    merges += 1;
                }
            }
            n + self.n_outer - merges
        } else {
            n - merges
        }
    }

    /// True if the vertices of Λ are connected through edges inside Λ.
    pub fn interior_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.len());
        for &[u, v] in &self.edges {
            if self.interior[u as usize] && self.interior[v as usize] {
                uf.union(u as usize, v as usize);
            }
        }
        let mut roots = self.interior_vertices().map(|v| uf.find(v));
        match roots.next() {
            Some(r) => roots.all(|x| x == r),
            None => false,
        }
    }
}

/// Cluster decomposition of Λ̄ under a percolation configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clusters {
    /// Cluster label of every vertex of Λ̄.
    pub label: Vec<u32>,
    /// Number of clusters intersecting Λ̄.
    pub count: usize,
    /// Whether the cluster contains a vertex of Z^d∖Λ.
    pub outside: Vec<bool>,
}

impl Clusters {
    pub fn connected(&self, x: usize, y: usize) -> bool {
        self.label[x] == self.label[y]
    }

    /// x ↔ Z^d∖Λ.
    pub fn reaches_outside(&self, x: usize) -> bool {
        self.outside[self.label[x] as usize]
    }
}

/// Percolation configuration on Ē_Λ with the value # used off Ē_Λ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeConfig {
    open: Vec<bool>,
    fill: bool,
}

impl EdgeConfig {
    pub fn new(open: Vec<bool>, fill: bool) -> Self {
        EdgeConfig { open, fill }
    }

    pub fn closed(n_edges: usize, fill: bool) -> Self {
        EdgeConfig {
            open: vec![false; n_edges],
            fill,
        }
    }

    pub fn full(n_edges: usize, fill: bool) -> Self {
        EdgeConfig {
            open: vec![true; n_edges],
            fill,
        }
    }

    pub fn from_mask(mask: u64, n_edges: usize, fill: bool) -> Self {
        EdgeConfig {
            open: (0..n_edges).map(|e| mask >> e & 1 == 1).collect(),
            fill,
        }
    }

    /// Bit mask of open edges; requires at most 64 edges.
    pub fn to_mask(&self) -> u64 {
        assert!(self.open.len() <= 64, "mask needs at most 64 edges");
        self.open
            .iter()
            .enumerate()
            .fold(0u64, |m, (e, &o)| if o { m | 1 << e } else { m })
    }

    pub fn is_open(&self, e: usize) -> bool {
        self.open[e]
    }

    pub fn set(&mut self, e: usize, value: bool) {
        self.open[e] = value;
    }

    pub fn fill(&self) -> bool {
        self.fill
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }

    pub fn n_open(&self) -> usize {
        self.open.iter().filter(|&&o| o).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.open
    }
}

/// Dual square lattice data for a planar domain.
///
/// Dual vertices are written as integer pairs (i, j) standing for the face
/// centre (i + 1/2, j + 1/2). Λ* is the set of bounded faces of (Λ̄, Ē_Λ),
/// and every primal edge e ∈ Ē_Λ carries its dual edge e*.
#[derive(Debug, Clone)]
pub struct DualGeometry {
    region: Region,
    nodes: Vec<[i32; 2]>,
    node_index: HashMap<[i32; 2], usize>,
    n_faces: usize,
    n_closure: usize,
    dual_edges: Vec<[u32; 2]>,
    base_class: Vec<u32>,
    n_base: usize,
    far_class: u32,
}

impl DualGeometry {
    /// Builds the dual of a planar region, checking that it is a domain:
    /// every bounded face of (Λ̄, Ē_Λ) must be a unit square.
    pub fn new(region: &Region) -> Result<Self> {
        if region.dim() != 2 {
            return Err(Error::Region(format!(
                "dual lattice needs d = 2, got d = {}",
                region.dim()
            )));
        }
        let has_edge = |a: [i32; 2], b: [i32; 2]| -> bool {
            match (region.index_of(&a), region.index_of(&b)) {
                (Some(u), Some(v)) => region.edge_index(u, v).is_some(),
                _ => false,
            }
        };
        let mut faces = Vec::new();
        for v in 0..region.len() {
            let x = region.coord(v);
            let (i, j) = (x[0], x[1]);
            if has_edge([i, j], [i + 1, j])
                && has_edge([i, j], [i, j + 1])
                && has_edge([i + 1, j], [i + 1, j + 1])
                && has_edge([i, j + 1], [i + 1, j + 1])
            {
                faces.push([i, j]);
            }
        }
        // Euler: bounded faces = |E| - |V| + components.
        let mut uf = UnionFind::new(region.len());
        for e in 0..region.n_edges() {
            let (u, v) = region.edge(e);
            uf.union(u, v);
        }
        let bounded = region.n_edges() + uf.components() - region.len();
        if bounded != faces.len() {
            return Err(Error::Region(format!(
                "not a domain: {bounded} bounded faces but {} unit squares",
                faces.len()
            )));
        }

        let mut nodes: Vec<[i32; 2]> = faces.clone();
        let mut node_index: HashMap<[i32; 2], usize> = HashMap::new();
        for (k, f) in nodes.iter().enumerate() {
            node_index.insert(*f, k);
        }
        let n_faces = nodes.len();
        let mut ring = Vec::new();
        for f in &faces {
            for (di, dj) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                let g = [f[0] + di, f[1] + dj];
                if !node_index.contains_key(&g) {
                    ring.push(g);
                }
            }
        }
        ring.sort();
        ring.dedup();
        for g in ring {
            node_index.insert(g, nodes.len());
            nodes.push(g);
        }
        let n_closure = nodes.len();

        let mut endpoints = Vec::with_capacity(region.n_edges());
        let mut extra = Vec::new();
        for e in 0..region.n_edges() {
            let (u, _) = region.edge(e);
            let x = region.coord(u);
            let (f, g) = if region.edge_axis(e) == 0 {
                ([x[0], x[1] - 1], [x[0], x[1]])
            } else {
                ([x[0] - 1, x[1]], [x[0], x[1]])
            };
            for h in [f, g] {
                if !node_index.contains_key(&h) {
                    extra.push(h);
                }
            }
            endpoints.push((f, g));
        }
        extra.sort();
        extra.dedup();
        for g in extra {
            if let Entry::Vacant(slot) = node_index.entry(g) {
                slot.insert(nodes.len());
                nodes.push(g);
            }
        }
        let dual_edges = endpoints
            .iter()
            .map(|(f, g)| [node_index[f] as u32, node_index[g] as u32])
            .collect();

        let (base_class, n_base, far_class) = Self::base_classes(region, &nodes);
        Ok(DualGeometry {
            region: region.clone(),
            nodes,
            node_index,
            n_faces,
            n_closure,
            dual_edges,
            base_class,
            n_base,
            far_class,
        })
    }

    /// Connectivity of dual nodes through dual edges whose primal edge lies
    /// outside Ē_Λ. Those primal edges are closed (fill 0), so their duals
    /// are open in every ω*.
    fn base_classes(region: &Region, nodes: &[[i32; 2]]) -> (Vec<u32>, usize, u32) {
        let mut lo = [i32::MAX; 2];
        let mut hi = [i32::MIN; 2];
        for v in 0..region.len() {
            let x = region.coord(v);
            for a in 0..2 {
                lo[a] = lo[a].min(x[a] - 2);
                hi[a] = hi[a].max(x[a] + 1);
            }
        }
        let w = [(hi[0] - lo[0] + 1) as usize, (hi[1] - lo[1] + 1) as usize];
        let total = w[0] * w[1];
        let idx = |p: [i32; 2]| (p[0] - lo[0]) as usize + (p[1] - lo[1]) as usize * w[0];
        let far = total;
        let mut uf = UnionFind::new(total + 1);
        let primal_edge_in_e = |a: [i32; 2], b: [i32; 2]| -> bool {
            match (region.index_of(&a), region.index_of(&b)) {
                (Some(u), Some(v)) => region.edge_index(u, v).is_some(),
                _ => false,
            }
        };
        for j in lo[1]..=hi[1] {
            for i in lo[0]..=hi[0] {
                let here = idx([i, j]);
                if i == lo[0] || i == hi[0] || j == lo[1] || j == hi[1] {
                    uf.union(here, far);
                }
                if i < hi[0] && !primal_edge_in_e([i + 1, j], [i + 1, j + 1]) {
                    uf.union(here, idx([i + 1, j]));
                }
                if j < hi[1] && !primal_edge_in_e([i, j + 1], [i + 1, j + 1]) {
                    uf.union(here, idx([i, j + 1]));
                }
            }
        }
        let mut map: HashMap<usize, u32> = HashMap::new();
        map.insert(uf.find(far), 0);
        let mut classes = Vec::with_capacity(nodes.len());
        for p in nodes {
            let r = uf.find(idx(*p));
            let next = map.len() as u32;
            classes.push(*map.entry(r).or_insert(next));
        }
        (classes, map.len(), 0)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// |Λ*|.
    pub fn n_faces(&self) -> usize {
        self.n_faces
    }

    /// |Λ̄*|; nodes 0..n_faces are Λ*, n_faces..n_closure the rest of Λ̄*.
    pub fn n_closure(&self) -> usize {
        self.n_closure
    }

    /// All dual nodes touched by the construction (Λ̄* first).
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, k: usize) -> [i32; 2] {
        self.nodes[k]
    }

    pub fn node_index(&self, p: [i32; 2]) -> Option<usize> {
        self.node_index.get(&p).copied()
    }

    pub fn is_face(&self, k: usize) -> bool {
        k < self.n_faces
    }

    /// Endpoints of e* for the primal edge e.
    pub fn dual_edge(&self, e: usize) -> (usize, usize) {
        let [f, g] = self.dual_edges[e];
        (f as usize, g as usize)
    }

    /// Quads (e, e*) as (edge, primal endpoints, dual endpoints).
    pub fn quads(&self) -> impl Iterator<Item = (usize, [usize; 2], [usize; 2])> + '_ {
        (0..self.region.n_edges()).map(move |e| {
            let (u, v) = self.region.edge(e);
            let (f, g) = self.dual_edge(e);
            (e, [u, v], [f, g])
        })
    }

    /// Dual configuration ω*_{e*} = 1 - ω_e, indexed by primal edge.
    pub fn dual_config(&self, omega: &EdgeConfig) -> Result<EdgeConfig> {
        if omega.len() != self.region.n_edges() {
            return Err(Error::Input("configuration has wrong length".into()));
        }
        Ok(EdgeConfig::new(
            omega.as_slice().iter().map(|&o| !o).collect(),
            !omega.fill(),
        ))
    }

    /// Clusters of ω* over all dual nodes. Dual edges whose primal edge is
    /// outside Ē_Λ are open; nodes connected to infinity share a label.
    /// Returns (label per node, label of the unbounded cluster).
    pub fn dual_clusters(&self, omega: &EdgeConfig) -> (Vec<u32>, u32) {
        let mut uf = UnionFind::new(self.n_base);
        for e in 0..self.dual_edges.len() {
            if !omega.is_open(e) {
                let (f, g) = self.dual_edge(e);
                uf.union(self.base_class[f] as usize, self.base_class[g] as usize);
            }
        }
        let (labels, _) = uf.labels();
        let node_labels = self
            .base_class
            .iter()
            .map(|&c| labels[c as usize])
            .collect();
        (node_labels, labels[self.far_class as usize])
    }

    /// k_{Λ*}(ω*): clusters of ω* meeting Λ̄*. The unbounded dual cluster is
    /// always counted, which matters only when Λ* is empty.
    pub fn dual_cluster_count(&self, omega: &EdgeConfig) -> usize {
        let (labels, far) = self.dual_clusters(omega);
        let mut seen: Vec<u32> = labels[..self.n_closure].to_vec();
        seen.push(far);
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// k_Λ(ω) = |Λ̄| - |ω_E| + k_{Λ*}(ω*) - 1 for ω with fill 0.
    pub fn euler_identity_check(&self, omega: &EdgeConfig) -> Result<bool> {
        if omega.fill() {
            return Err(Error::Input(
                "Euler identity is stated for fill 0 configurations".into(),
            ));
        }
        let lhs = self.region.cluster_count(omega) as i64;
        let rhs = self.region.len() as i64 - omega.n_open() as i64
            + self.dual_cluster_count(omega) as i64
            - 1;
        Ok(lhs == rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block2() -> Region {
        Region::from_vertices(2, &[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap()
    }

    #[test]
    fn box_sizes() {
        for (d, n) in [(2, 0), (2, 1), (2, 3), (3, 1)] {
            let r = Region::cube(d, n).unwrap();
            assert_eq!(r.interior_len(), (2 * n as usize + 1).pow(d as u32));
            for e in 0..r.n_edges() {
                let (u, v) = r.edge(e);
                assert!(r.is_interior(u) || r.is_interior(v));
                assert_ne!(r.parity(u), r.parity(v));
            }
        }
        // 2d n (2n+1)^(d-1) interior edges plus 2d (2n+1)^(d-1) spokes.
        let r = Region::cube(2, 1).unwrap();
        assert_eq!(r.len(), 21);
        assert_eq!(r.n_edges(), 24);
        assert!(Region::cube(1, 3).is_err());
    }

    #[test]
    fn edges_are_in_canonical_order() {
        let r = Region::cube(3, 1).unwrap();
        let keys: Vec<(Vec<i32>, usize)> = (0..r.n_edges())
            .map(|e| (r.coord(r.edge(e).0).to_vec(), r.edge_axis(e)))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn cluster_count_extremes_on_block() {
        let r = block2();
        assert_eq!(r.len(), 12);
        assert_eq!(r.n_edges(), 12);
        assert_eq!(r.cluster_count(&EdgeConfig::closed(12, false)), 12);
        assert_eq!(r.cluster_count(&EdgeConfig::full(12, true)), 1);
        assert_eq!(r.cluster_count_mask(0, false), 12);
        assert_eq!(r.cluster_count_mask(0xfff, true), 1);
        // fill 1 merges the eight outer vertices into one cluster.
        assert_eq!(r.cluster_count(&EdgeConfig::closed(12, true)), 5);
    }

    #[test]
    fn annulus_has_two_outer_classes() {
        let mut verts = Vec::new();
        for x in -1..=1 {
            for y in -1..=1 {
                if (x, y) != (0, 0) {
                    verts.push(vec![x, y]);
                }
            }
        }
        let r = Region::from_vertices(2, &verts).unwrap();
        assert_eq!(r.n_outer_classes(), 2);
        let hole = r.index_of(&[0, 0]).unwrap();
        assert_eq!(r.outer_class(hole), Some(1));
        // The hole stays its own cluster even with fill 1.
        assert_eq!(r.cluster_count(&EdgeConfig::closed(r.n_edges(), true)), 1 + 8 + 1);
    }

    #[test]
    fn dual_of_block() {
        let r = block2();
        let g = DualGeometry::new(&r).unwrap();
        assert_eq!(g.n_faces(), 1);
        assert_eq!(g.node(0), [0, 0]);
        assert_eq!(g.n_closure(), 5);
        let omega = EdgeConfig::closed(12, false);
        assert!(g.euler_identity_check(&omega).unwrap());
        let interior: Vec<bool> = (0..12)
            .map(|e| {
                let (u, v) = r.edge(e);
                r.is_interior(u) && r.is_interior(v)
            })
            .collect();
        let omega = EdgeConfig::new(interior, false);
        assert_eq!(r.cluster_count(&omega), 9);
        assert_eq!(g.dual_cluster_count(&omega), 2);
        assert!(g.euler_identity_check(&omega).unwrap());
        assert!(g.euler_identity_check(&EdgeConfig::closed(12, true)).is_err());
    }

    #[test]
    fn dual_config_is_pointwise_complement() {
        let r = block2();
        let g = DualGeometry::new(&r).unwrap();
        let all = EdgeConfig::full(12, false);
        assert_eq!(g.dual_config(&all).unwrap().n_open(), 0);
        let none = EdgeConfig::closed(12, false);
        assert_eq!(g.dual_config(&none).unwrap().n_open(), 12);
        let mut one = EdgeConfig::closed(12, false);
        one.set(5, true);
        let dual = g.dual_config(&one).unwrap();
        assert!(!dual.is_open(5));
        assert_eq!(dual.n_open(), 11);
        assert_eq!(g.dual_config(&dual).unwrap(), one);
        assert!(DualGeometry::new(&Region::cube(3, 1).unwrap()).is_err());
    }

    #[test]
    fn box_dual_is_the_dual_box() {
        let r = Region::cube(2, 2).unwrap();
        let g = DualGeometry::new(&r).unwrap();
        assert_eq!(g.n_faces(), 16);
        for k in 0..g.n_faces() {
            let p = g.node(k);
            assert!((-2..=1).contains(&p[0]) && (-2..=1).contains(&p[1]));
        }
    }

    #[test]
    fn non_domain_rejected() {
        // A 4x4 block without its central 2x2 leaves a face of area 9.
        let mut verts = Vec::new();
        for x in 0..4 {
            for y in 0..4 {
                if !((1..=2).contains(&x) && (1..=2).contains(&y)) {
                    verts.push(vec![x, y]);
                }
            }
        }
        let r = Region::from_vertices(2, &verts).unwrap();
        assert!(DualGeometry::new(&r).is_err());
    }
}
