//! Peierls contours: the edge sets E(C) crossing the outer boundary of a
//! union of unit hypercubes, and counts of blocking sets.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Region;

/// Default largest k for [`enumerate_blocking`] in d = 2.
pub const DEFAULT_MAX_K_2D: usize = 12;

/// Edge {base, base + e_axis} of Z^d.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticeEdge {
    pub base: Vec<i32>,
    pub axis: usize,
}

impl LatticeEdge {
    /// The edge between two nearest neighbours, or `None`.
    pub fn between(x: &[i32], y: &[i32]) -> Option<Self> {
        let diff: Vec<i32> = x.iter().zip(y).map(|(a, b)| b - a).collect();
        let axis = diff.iter().position(|&t| t != 0)?;
        if diff.iter().filter(|&&t| t != 0).count() != 1 || diff[axis].abs() != 1 {
            return None;
        }
        let base = if diff[axis] == 1 { x.to_vec() } else { y.to_vec() };
        Some(LatticeEdge { base, axis })
    }

    pub fn endpoints(&self) -> (Vec<i32>, Vec<i32>) {
        let mut top = self.base.clone();
        top[self.axis] += 1;
        (self.base.clone(), top)
    }

    pub fn translated(&self, t: &[i32]) -> Self {
        LatticeEdge {
            base: self.base.iter().zip(t).map(|(a, b)| a + b).collect(),
            axis: self.axis,
        }
    }

    /// The (d-2)-faces of the plaquette dual to this edge, in doubled
    /// coordinates.
    fn ridges(&self) -> Vec<Vec<i32>> {
        let d = self.base.len();
        let mut centre: Vec<i32> = self.base.iter().map(|x| 2 * x).collect();
        centre[self.axis] += 1;
        let mut out = Vec::with_capacity(2 * (d - 1));
        for j in (0..d).filter(|&j| j != self.axis) {
            for s in [-1, 1] {
                let mut r = centre.clone();
                r[j] += s;
                out.push(r);
            }
        }
        out
    }
}

/// Edge set F = E(C) together with a witness C.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockingSet {
    pub edges: Vec<LatticeEdge>,
    pub witness: Vec<Vec<i32>>,
}

fn neighbours(x: &[i32]) -> impl Iterator<Item = Vec<i32>> + '_ {
    (0..x.len()).flat_map(move |a| {
        [-1, 1].into_iter().map(move |s| {
            let mut y = x.to_vec();
            y[a] += s;
            y
        })
    })
}

fn is_connected(c: &HashSet<Vec<i32>>) -> bool {
    let Some(start) = c.iter().next() else {
        return false;
    };
    let mut seen: HashSet<&Vec<i32>> = HashSet::from([start]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(x) = queue.pop_front() {
        for y in neighbours(&x) {
            if let Some(z) = c.get(&y) {
                if seen.insert(z) {
                    queue.push_back(y);
                }
            }
        }
    }
    seen.len() == c.len()
}

/// Vertices of the unbounded component of Z^d∖C inside the bounding box of
/// C padded by one.
fn outside(c: &HashSet<Vec<i32>>, d: usize) -> HashSet<Vec<i32>> {
    let mut lo = vec![i32::MAX; d];
    let mut hi = vec![i32::MIN; d];
    for x in c {
        for a in 0..d {
            lo[a] = lo[a].min(x[a] - 1);
            hi[a] = hi[a].max(x[a] + 1);
        }
    }
    let inside = |y: &[i32]| (0..d).all(|a| lo[a] <= y[a] && y[a] <= hi[a]);
    let mut seen = HashSet::new();
    let start = lo.clone();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for y in neighbours(&x) {
            if inside(&y) && !c.contains(&y) && !seen.contains(&y) {
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    seen
}

/// E(C): edges from C to the unbounded component of Z^d∖C, i.e. the edges
/// whose segment crosses the outer boundary γ(C) of ∪_{x∈C} S_x.
pub fn contour_edges(c: &[Vec<i32>]) -> Result<Vec<LatticeEdge>> {
    let d = c.first().map(Vec::len).ok_or_else(|| Error::Input("empty vertex set".into()))?;
    if c.iter().any(|x| x.len() != d) {
        return Err(Error::Input("vertices of mixed dimension".into()));
    }
    let set: HashSet<Vec<i32>> = c.iter().cloned().collect();
    if !is_connected(&set) {
        return Err(Error::Input("C must be connected".into()));
    }
    Ok(contour_of(&set, d))
}

fn contour_of(set: &HashSet<Vec<i32>>, d: usize) -> Vec<LatticeEdge> {
    let out = outside(set, d);
    let mut edges: BTreeSet<LatticeEdge> = BTreeSet::new();
    for x in set {
        for y in neighbours(x) {
            if out.contains(&y) {
                edges.insert(LatticeEdge::between(x, &y).expect("neighbours share an edge"));
            }
        }
    }
    edges.into_iter().collect()
}

/// Removing F leaves no path from x to the far side of the box around F.
pub fn separates(f: &[LatticeEdge], x: &[i32]) -> bool {
    let d = x.len();
    let mut lo = x.to_vec();
    let mut hi = x.to_vec();
    for e in f {
        let (a, b) = e.endpoints();
        for i in 0..d {
            lo[i] = lo[i].min(a[i].min(b[i]) - 1);
            hi[i] = hi[i].max(a[i].max(b[i]) + 1);
        }
    }
    let cut: HashSet<&LatticeEdge> = f.iter().collect();
    let mut seen: HashSet<Vec<i32>> = HashSet::from([x.to_vec()]);
    let mut queue = VecDeque::from([x.to_vec()]);
    while let Some(v) = queue.pop_front() {
        if (0..d).any(|i| v[i] == lo[i] || v[i] == hi[i]) {
            return false;
        }
        for y in neighbours(&v) {
            let e = LatticeEdge::between(&v, &y).expect("neighbours share an edge");
            if !cut.contains(&e) && seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    true
}

/// Largest |C| with |E(C)| = k, from the edge-isoperimetric inequality
/// |∂C| ≥ 2d |C|^{(d-1)/d} applied to C with its holes filled.
pub fn max_cells(k: usize, d: usize) -> usize {
    if d == 1 {
        return if k == 2 { usize::MAX } else { 0 };
    }
    ((k as f64 / (2 * d) as f64).powf(d as f64 / (d - 1) as f64) + 1e-9).floor() as usize
}

/// Fixed lattice animals with at most `max` cells whose lexicographically
/// smallest cell (comparing the last coordinate first) is the origin.
pub fn rooted_animals(d: usize, max: usize) -> Vec<Vec<Vec<i32>>> {
    let origin = vec![0; d];
    let allowed = |p: &[i32]| {
        for a in (0..d).rev() {
            if p[a] != 0 {
                return p[a] > 0;
            }
        }
        true
    };
    let mut out = Vec::new();
    if max == 0 {
        return out;
    }
    let mut seen: HashSet<Vec<i32>> = HashSet::from([origin.clone()]);
    let mut animal = Vec::new();
    fn grow(
        mut untried: Vec<Vec<i32>>,
        animal: &mut Vec<Vec<i32>>,
        seen: &mut HashSet<Vec<i32>>,
        max: usize,
        allowed: &dyn Fn(&[i32]) -> bool,
        out: &mut Vec<Vec<Vec<i32>>>,
    ) {
        while let Some(c) = untried.pop() {
            animal.push(c.clone());
            out.push(animal.clone());
            if animal.len() < max {
                let fresh: Vec<Vec<i32>> = neighbours(&c)
                    .filter(|y| allowed(y) && !seen.contains(y))
                    .collect();
                for y in &fresh {
                    seen.insert(y.clone());
                }
                let mut next = untried.clone();
                next.extend(fresh.iter().cloned());
                grow(next, animal, seen, max, allowed, out);
                for y in &fresh {
                    seen.remove(y);
                }
            }
            animal.pop();
        }
    }
    grow(vec![origin], &mut animal, &mut seen, max, &allowed, &mut out);
    out
}

fn check_cap(k: usize, d: usize, cap: usize) -> Result<()> {
    let limit = if d == 2 { cap } else { cap.min(2 * d + 4) };
    if k > limit {
        return Err(Error::CapExceeded(format!(
            "blocking-set enumeration in d = {d} is capped at k = {limit}"
        )));
    }
    Ok(())
}

/// Every F with |F| = k blocking x, each with one witness, sorted by F.
pub fn enumerate_blocking(x: &[i32], k: usize, cap: usize) -> Result<Vec<BlockingSet>> {
    let d = x.len();
    if d < 2 {
        return Err(Error::Input("contours need d ≥ 2".into()));
    }
    check_cap(k, d, cap)?;
    let mut found: HashMap<Vec<LatticeEdge>, Vec<Vec<i32>>> = HashMap::new();
    for animal in rooted_animals(d, max_cells(k, d)) {
        let set: HashSet<Vec<i32>> = animal.iter().cloned().collect();
        let shape = contour_of(&set, d);
        if shape.len() != k {
            continue;
        }
        for cell in &animal {
            let t: Vec<i32> = x.iter().zip(cell).map(|(a, b)| a - b).collect();
            let mut f: Vec<LatticeEdge> = shape.iter().map(|e| e.translated(&t)).collect();
            f.sort();
            found.entry(f).or_insert_with(|| {
                animal
                    .iter()
                    .map(|p| p.iter().zip(&t).map(|(a, b)| a + b).collect())
                    .collect()
            });
        }
    }
    let mut out: Vec<BlockingSet> = found
        .into_iter()
        .map(|(edges, witness)| BlockingSet { edges, witness })
        .collect();
    out.sort_by(|a, b| a.edges.cmp(&b.edges));
    Ok(out)
}

/// The edges Ē_Λ of a region as lattice edges.
pub fn region_edges(region: &Region) -> Vec<LatticeEdge> {
    (0..region.n_edges())
        .map(|e| {
            let (u, v) = region.edge(e);
            LatticeEdge::between(region.coord(u), region.coord(v)).expect("region edges join neighbours")
        })
        .collect()
}

/// Maximum degree of the graph on E where two edges are adjacent when
/// their plaquettes share a (d-2)-dimensional face.
pub fn plaquette_max_degree(edges: &[LatticeEdge]) -> usize {
    let mut by_ridge: HashMap<Vec<i32>, Vec<usize>> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        for r in e.ridges() {
            by_ridge.entry(r).or_default().push(i);
        }
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); edges.len()];
    for list in by_ridge.values() {
        for &a in list {
            for &b in list {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    adj.iter().map(BTreeSet::len).max().unwrap_or(0)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub k: usize,
    pub count: usize,
    /// |E| (6(d-1))^{6(d-1)k}.
    pub bound: f64,
    pub log10_bound: f64,
    pub max_degree: usize,
    pub holds: bool,
}

/// Exact number of blocking F ⊆ E with |F| = k against the crude bound.
pub fn bound_check(edges: &[LatticeEdge], k: usize, cap: usize) -> Result<BoundReport> {
    let d = edges.first().map(|e| e.base.len()).unwrap_or(2);
    let deg = 6 * (d - 1);
    let log10_bound = (edges.len().max(1) as f64).log10() + (deg * k) as f64 * (deg as f64).log10();
    let bound = edges.len() as f64 * (deg as f64).powi((deg * k) as i32);
    let max_degree = plaquette_max_degree(edges);
    let count = if k < 2 * d {
        0
    } else {
        check_cap(k, d, cap)?;
        let set: HashSet<&LatticeEdge> = edges.iter().collect();
        let mut roots: BTreeSet<Vec<i32>> = BTreeSet::new();
        for e in edges {
            let (a, b) = e.endpoints();
            roots.insert(a);
            roots.insert(b);
        }
        let mut found: HashSet<Vec<LatticeEdge>> = HashSet::new();
        for animal in rooted_animals(d, max_cells(k, d)) {
            let cells: HashSet<Vec<i32>> = animal.iter().cloned().collect();
            let shape = contour_of(&cells, d);
            if shape.len() != k {
                continue;
            }
            for r in &roots {
                let mut f: Vec<LatticeEdge> = shape.iter().map(|e| e.translated(r)).collect();
                if f.iter().all(|e| set.contains(e)) {
                    f.sort();
                    found.insert(f);
                }
            }
        }
        found.len()
    };
    Ok(BoundReport {
        k,
        count,
        bound,
        log10_bound,
        max_degree,
        holds: (count as f64) <= bound && max_degree <= deg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_site_contours() {
        assert_eq!(contour_edges(&[vec![0, 0]]).unwrap().len(), 4);
        assert_eq!(contour_edges(&[vec![0, 0, 0]]).unwrap().len(), 6);
        assert_eq!(contour_edges(&[vec![0, 0], vec![1, 0]]).unwrap().len(), 6);
        assert!(contour_edges(&[vec![0, 0], vec![2, 0]]).is_err());
    }

    #[test]
    fn ring_contour_ignores_the_hole() {
        let ring: Vec<Vec<i32>> = (-1..=1)
            .flat_map(|i| (-1..=1).map(move |j| vec![i, j]))
            .filter(|x| x != &vec![0, 0])
            .collect();
        let e = contour_edges(&ring).unwrap();
        assert_eq!(e.len(), 12);
        assert!(separates(&e, &[0, 0]));
    }

    #[test]
    fn animal_counts() {
        // Fixed polyominoes of sizes 1..=5: 1, 2, 6, 19, 63.
        let a = rooted_animals(2, 5);
        let mut by_size = [0usize; 6];
        for x in &a {
            by_size[x.len()] += 1;
        }
        assert_eq!(&by_size[1..], &[1, 2, 6, 19, 63]);
    }

    #[test]
    fn small_blocking_counts() {
        let x = [0, 0];
        let n: Vec<usize> = (4..=6)
            .map(|k| enumerate_blocking(&x, k, DEFAULT_MAX_K_2D).unwrap().len())
            .collect();
        assert_eq!(n, vec![1, 0, 4]);
        for b in enumerate_blocking(&x, 8, DEFAULT_MAX_K_2D).unwrap() {
            assert!(separates(&b.edges, &x));
        }
    }

    #[test]
    fn plaquette_degree_on_box() {
        let r = Region::cube(2, 2).unwrap();
        assert_eq!(plaquette_max_degree(&region_edges(&r)), 6);
    }

    #[test]
    fn below_minimal_size() {
        let r = Region::cube(2, 1).unwrap();
        let rep = bound_check(&region_edges(&r), 3, DEFAULT_MAX_K_2D).unwrap();
        assert_eq!(rep.count, 0);
        assert!(rep.holds);
    }
}
