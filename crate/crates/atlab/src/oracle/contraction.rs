//! Exact AT sums by sweeping Λ̄ in lexicographic order and summing out
//! each site once all of its edges have been seen. Reaches boxes whose
//! pair state space is far beyond explicit enumeration (B_1, B_2 in d = 2).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::Region;
use crate::spin::{boundary_extension, BoundaryCondition};
use crate::weights::{sampling_probabilities, CouplingConstants};

/// Largest frontier table.
pub const MAX_FRONTIER: usize = 1 << 20;

/// Factor indexed by the pair codes of the two endpoints of an edge, where
/// code = [s = +1] + 2 [s' = +1].
pub type EdgeFactor = [[f64; 4]; 4];

#[inline]
fn spins(code: usize) -> (f64, f64) {
    (
        if code & 1 == 1 { 1.0 } else { -1.0 },
        if code & 2 == 2 { 1.0 } else { -1.0 },
    )
}

struct Frontier {
    sites: Vec<usize>,
    codes: Vec<Vec<usize>>,
    data: Vec<f64>,
    log_scale: f64,
}

impl Frontier {
    fn stride(&self, pos: usize) -> usize {
        self.codes[..pos].iter().map(Vec::len).product()
    }

    fn push(&mut self, site: usize, codes: Vec<usize>) -> Result<()> {
        let r = codes.len();
        let len = self.data.len();
        if len * r > MAX_FRONTIER {
            return Err(Error::CapExceeded(format!(
                "frontier of {} entries exceeds the cap of {MAX_FRONTIER}",
                len * r
            )));
        }
        let mut data = Vec::with_capacity(len * r);
        for _ in 0..r {
            data.extend_from_slice(&self.data);
        }
        self.data = data;
        self.sites.push(site);
        self.codes.push(codes);
        Ok(())
    }

    fn apply(&mut self, a: usize, b: usize, f: &EdgeFactor) {
        let (sa, sb) = (self.stride(a), self.stride(b));
        let (ca, cb) = (&self.codes[a], &self.codes[b]);
        let (ra, rb) = (ca.len(), cb.len());
        for (idx, x) in self.data.iter_mut().enumerate() {
            *x *= f[ca[(idx / sa) % ra]][cb[(idx / sb) % rb]];
        }
    }

    fn retire(&mut self, pos: usize) {
        let st = self.stride(pos);
        let r = self.codes[pos].len();
        let new_len = self.data.len() / r;
        let mut out = vec![0.0; new_len];
        for (idx, o) in out.iter_mut().enumerate() {
            let outer = idx / st;
            let inner = idx % st;
            let base = outer * st * r + inner;
            *o = (0..r).map(|d| self.data[base + d * st]).sum();
        }
        self.data = out;
        self.sites.remove(pos);
        self.codes.remove(pos);
    }

    fn rescale(&mut self) {
        let m = self.data.iter().copied().fold(0.0, f64::max);
        if m > 0.0 {
            self.data.iter_mut().for_each(|x| *x /= m);
            self.log_scale += m.ln();
        }
    }
}

fn allowed(fixed: Option<i8>, bit: usize) -> Vec<usize> {
    match fixed {
        Some(1) => vec![bit],
        Some(_) => vec![0],
        None => vec![0, bit],
    }
}

/// ln Σ_{(s,s')} Π_e exp(K s s + K' s's' + K'' s s' s s') g_e(s, s'), with
/// g_e = 1 where `factor` returns `None`.
pub fn at_log_partition(
    region: &Region,
    c: &CouplingConstants,
    bc: &[BoundaryCondition; 2],
    factor: &dyn Fn(usize) -> Option<EdgeFactor>,
) -> Result<f64> {
    let n = region.len();
    let ext = [boundary_extension(region, &bc[0]), boundary_extension(region, &bc[1])];
    let fixed = |layer: usize, v: usize| -> Option<i8> {
        (!region.is_interior(v) && !bc[layer].is_free()).then_some(ext[layer][v])
    };
    let mut boltz = [[0.0; 4]; 4];
    for (a, row) in boltz.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            let (sa, ta) = spins(a);
            let (sb, tb) = spins(b);
            *x = (c.k * sa * sb + c.kp * ta * tb + c.kpp * sa * ta * sb * tb).exp();
        }
    }
    let mut last = (0..n).collect::<Vec<usize>>();
    let mut later: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for e in 0..region.n_edges() {
        let (u, v) = region.edge(e);
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        last[a] = last[a].max(b);
        later[b].push((a, e));
    }
    let mut fr = Frontier {
        sites: Vec::new(),
        codes: Vec::new(),
        data: vec![1.0],
        log_scale: 0.0,
    };
    for v in 0..n {
        let first = allowed(fixed(0, v), 1);
        let second = allowed(fixed(1, v), 2);
        let codes = first
            .iter()
            .flat_map(|&a| second.iter().map(move |&b| a | b))
            .collect();
        fr.push(v, codes)?;
        let pv = fr.sites.len() - 1;
        for &(u, e) in &later[v] {
            let pu = fr.sites.iter().position(|&w| w == u).expect("neighbour retired early");
            let mut f = boltz;
            if let Some(g) = factor(e) {
                // The frontier stores u before v; align g to (code_u, code_v).
                let (a, _) = region.edge(e);
                for x in 0..4 {
                    for y in 0..4 {
                        f[x][y] *= if a == u { g[x][y] } else { g[y][x] };
                    }
                }
            }
            fr.apply(pu, pv, &f);
        }
        while let Some(pos) = fr.sites.iter().position(|&w| last[w] <= v) {
            fr.retire(pos);
        }
        fr.rescale();
    }
    let total: f64 = fr.data.iter().sum();
    if total <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(fr.log_scale + total.ln())
}

/// E_{AT^{η,η'}}[Π_e g_e].
pub fn at_product_expectation(
    region: &Region,
    c: &CouplingConstants,
    bc: &[BoundaryCondition; 2],
    factor: &dyn Fn(usize) -> Option<EdgeFactor>,
) -> Result<f64> {
    let num = at_log_partition(region, c, bc, factor)?;
    let den = at_log_partition(region, c, bc, &|_| None)?;
    Ok((num - den).exp())
}

/// Conditional probability that ω_e = 1 given (s, s') under the sampling
/// rule, as an edge factor.
pub fn open_probability_factor(c: &CouplingConstants) -> Result<EdgeFactor> {
    let (p1, p2) = sampling_probabilities(c)?;
    let mut f = [[0.0; 4]; 4];
    for (a, row) in f.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            let (sa, ta) = spins(a);
            let (sb, tb) = spins(b);
            *x = if sa != sb {
                0.0
            } else if ta != tb {
                p1
            } else {
                p2
            };
        }
    }
    Ok(f)
}

/// GAT^{#,η'}[some edge of `edges` is open], through the joint law with
/// η = + for # = 1 and η = f for # = 0.
pub fn any_open_probability(
    region: &Region,
    c: &CouplingConstants,
    bc: &[BoundaryCondition; 2],
    edges: &[usize],
) -> Result<f64> {
    let open = open_probability_factor(c)?;
    let mut closed = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            closed[a][b] = 1.0 - open[a][b];
        }
    }
    let all_closed = at_product_expectation(region, c, bc, &|e| edges.contains(&e).then_some(closed))?;
    Ok(1.0 - all_closed)
}

/// E[|ω_E|] under GAT^{#,η'}, one contraction per edge.
pub fn expected_open_edges(region: &Region, c: &CouplingConstants, bc: &[BoundaryCondition; 2]) -> Result<f64> {
    let open = open_probability_factor(c)?;
    let den = at_log_partition(region, c, bc, &|_| None)?;
    let mut total = 0.0;
    for e in 0..region.n_edges() {
        let num = at_log_partition(region, c, bc, &|f| (f == e).then_some(open))?;
        total += (num - den).exp();
    }
    Ok(total)
}

/// θ_1(β) = GAT^{1,f}_{B_2}[0 ↔ Z^d∖B_0] at the given couplings.
pub fn theta_one(d: usize, c: &CouplingConstants) -> Result<f64> {
    let r = Region::cube(d, 2)?;
    let o = r.origin().expect("box contains its centre");
    let edges: Vec<usize> = r.incident(o).collect();
    any_open_probability(&r, c, &[BoundaryCondition::Plus, BoundaryCondition::Free], &edges)
}

/// Normalised edge densities of GAT^{1,f}_{K,K',K''} and GAT^{0,+}_{K',K,K''}
/// on B_n, the two marginals of ATRC^{1,0}.
pub fn edge_density_pair(d: usize, n: u32, c: &CouplingConstants) -> Result<(f64, f64)> {
    let r = Arc::new(Region::cube(d, n)?);
    let ne = r.n_edges() as f64;
    let plus_free = [BoundaryCondition::Plus, BoundaryCondition::Free];
    let free_plus = [BoundaryCondition::Free, BoundaryCondition::Plus];
    let a = expected_open_edges(&r, c, &plus_free)? / ne;
    let b = expected_open_edges(&r, &c.swapped(), &free_plus)? / ne;
    Ok((a, b))
}
