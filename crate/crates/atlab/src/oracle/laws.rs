//! AT, joint, GAT and ATRC laws by enumeration.

use std::sync::Arc;

use rayon::prelude::*;

use super::{check_edges, check_states, pow_ln, EnumeratedMeasure, LayerSpace, StateSpace};
use crate::error::{Error, Result};
use crate::lattice::{EdgeConfig, Region};
use crate::spin::{disagreement_mask, BoundaryCondition, SpinPair};
use crate::stats::log_sum_exp;
use crate::unionfind::UnionFind;
use crate::weights::{atrc_weights, gat_weights, ln_expm1, CouplingConstants};

/// ln of the AT Boltzmann weight, summed edge by edge over Ē_Λ.
pub fn at_log_weight(pair: &SpinPair, c: &CouplingConstants) -> Result<f64> {
    if !pair.is_consistent() {
        return Err(Error::Boundary("inconsistent boundary data".into()));
    }
    let r = pair.region();
    let mut h = 0.0;
    for e in 0..r.n_edges() {
        let (u, v) = r.edge(e);
        let a = (pair.s[u] * pair.s[v]) as f64;
        let b = (pair.s2[u] * pair.s2[v]) as f64;
        h += c.k * a + c.kp * b + c.kpp * a * b;
    }
    Ok(h)
}

pub fn at_weight(pair: &SpinPair, c: &CouplingConstants) -> Result<f64> {
    at_log_weight(pair, c).map(f64::exp)
}

/// The disagreement form -2(K+K'')|E_s| - 2(K'+K'')|E_s'| + 4K''|E_s ∩ E_s'|,
/// which differs from [`at_log_weight`] by (K+K'+K'')|Ē_Λ|.
pub fn at_log_weight_disagreement(pair: &SpinPair, c: &CouplingConstants) -> Result<f64> {
    if !pair.is_consistent() {
        return Err(Error::Boundary("inconsistent boundary data".into()));
    }
    let r = pair.region();
    let m1 = disagreement_mask(r, &pair.s);
    let m2 = disagreement_mask(r, &pair.s2);
    Ok(-2.0 * (c.k + c.kpp) * m1.count_ones() as f64
        - 2.0 * (c.kp + c.kpp) * m2.count_ones() as f64
        + 4.0 * c.kpp * (m1 & m2).count_ones() as f64)
}

pub(crate) fn check_density(c: &CouplingConstants) -> Result<()> {
    if c.k < c.kpp.abs() {
        return Err(Error::Parameters(format!(
            "graphical representation needs K >= |K''|, got K = {}, K'' = {}",
            c.k, c.kpp
        )));
    }
    Ok(())
}

fn first_fill(eta: &BoundaryCondition) -> Result<bool> {
    eta.fill().ok_or_else(|| {
        Error::Boundary(format!(
            "the graphical representation needs the first boundary condition in {{+, f}}, got {eta}"
        ))
    })
}

/// Exponents of the joint law: (2(K''-K'), ln(e^{2(K-K'')}-1), ln(e^{2(K+K'')}-1)).
pub(crate) fn joint_exponents(c: &CouplingConstants) -> (f64, f64, f64) {
    let lnx = |x: f64| if x > 0.0 { ln_expm1(x) } else { f64::NEG_INFINITY };
    (
        2.0 * (c.kpp - c.kp),
        lnx(2.0 * (c.k - c.kpp)),
        lnx(2.0 * (c.k + c.kpp)),
    )
}

/// ln of the joint weight of (s, s', ω); -inf when ω opens an edge of E_s.
pub fn joint_log_weight(pair: &SpinPair, omega: &EdgeConfig, c: &CouplingConstants) -> Result<f64> {
    check_density(c)?;
    if !pair.is_consistent() {
        return Err(Error::Boundary("inconsistent boundary data".into()));
    }
    let fill = first_fill(&pair.boundary()[0])?;
    let r = pair.region();
    if omega.len() != r.n_edges() || omega.fill() != fill {
        return Err(Error::Input(
            "percolation configuration does not match the region or boundary".into(),
        ));
    }
    let (a, b, cc) = joint_exponents(c);
    let mut n2 = 0;
    let mut on2 = 0;
    let mut off2 = 0;
    for e in 0..r.n_edges() {
        let (u, v) = r.edge(e);
        let d1 = pair.s[u] != pair.s[v];
        let d2 = pair.s2[u] != pair.s2[v];
        let o = omega.is_open(e);
        if o && d1 {
            return Ok(f64::NEG_INFINITY);
        }
        n2 += d2 as u32;
        on2 += (o && d2) as u32;
        off2 += (o && !d2) as u32;
    }
    Ok(a * n2 as f64 + pow_ln(b, on2) + pow_ln(cc, off2))
}

pub fn joint_weight(pair: &SpinPair, omega: &EdgeConfig, c: &CouplingConstants) -> Result<f64> {
    joint_log_weight(pair, omega, c).map(f64::exp)
}

/// AT law together with the two layer spaces indexing it.
#[derive(Debug, Clone)]
pub struct PairLaw {
    pub measure: EnumeratedMeasure,
    pub first: LayerSpace,
    pub second: LayerSpace,
}

impl PairLaw {
    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx % self.first.len(), idx / self.first.len())
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + j * self.first.len()
    }

    pub fn spins(&self, idx: usize) -> (Vec<i8>, Vec<i8>) {
        let (i, j) = self.split(idx);
        (self.first.config(i), self.second.config(j))
    }

    /// ⟨f(s, s')⟩ with f evaluated on the two spin indices.
    pub fn expectation(&self, f: impl Fn(usize, usize) -> f64) -> f64 {
        let n1 = self.first.len();
        self.measure.expectation(|idx| f(idx % n1, idx / n1))
    }
}

fn pair_spaces(region: &Arc<Region>, bc: &[BoundaryCondition; 2]) -> Result<(LayerSpace, LayerSpace)> {
    let first = LayerSpace::new(region, &bc[0])?;
    let second = LayerSpace::new(region, &bc[1])?;
    check_states(first.len().saturating_mul(second.len()))?;
    Ok((first, second))
}

/// AT^{η,η'} by enumeration of all compatible pairs.
pub fn at_law(region: &Arc<Region>, c: &CouplingConstants, bc: &[BoundaryCondition; 2]) -> Result<PairLaw> {
    let (first, second) = pair_spaces(region, bc)?;
    let m1 = first.masks();
    let m2 = second.masks();
    let ne = region.n_edges() as f64;
    let n1 = m1.len();
    let lw: Vec<f64> = (0..n1 * m2.len())
        .into_par_iter()
        .map(|idx| {
            let a = m1[idx % n1];
            let b = m2[idx / n1];
            c.k * (ne - 2.0 * a.count_ones() as f64)
                + c.kp * (ne - 2.0 * b.count_ones() as f64)
                + c.kpp * (ne - 2.0 * (a ^ b).count_ones() as f64)
        })
        .collect();
    let measure = EnumeratedMeasure::from_log_weights(
        StateSpace::SpinPairs {
            first: n1,
            second: m2.len(),
        },
        lw,
    )?;
    Ok(PairLaw {
        measure,
        first,
        second,
    })
}

/// The (s, s') marginal of the joint law, summing the joint weight over
/// every ω ⊆ E∖E_s explicitly.
pub fn at_law_from_joint(
    region: &Arc<Region>,
    c: &CouplingConstants,
    bc: &[BoundaryCondition; 2],
) -> Result<PairLaw> {
    check_density(c)?;
    first_fill(&bc[0])?;
    check_edges(region)?;
    let (first, second) = pair_spaces(region, bc)?;
    let work = first.len() as u128 * second.len() as u128 * (1u128 << region.n_edges());
    if work > 1 << 30 {
        return Err(Error::CapExceeded(
            "explicit sum over (s, s', ω) is too large".into(),
        ));
    }
    let (a, b, cc) = joint_exponents(c);
    let ne = region.n_edges();
    let full = if ne == 64 { u64::MAX } else { (1u64 << ne) - 1 };
    let m1 = first.masks();
    let m2 = second.masks();
    let n1 = m1.len();
    let lw: Vec<f64> = (0..n1 * m2.len())
        .into_par_iter()
        .map(|idx| {
            let ms = m1[idx % n1];
            let mp = m2[idx / n1];
            let allowed = full & !ms;
            let mut terms = Vec::new();
            let mut w = allowed;
            loop {
                let on = (w & mp).count_ones();
                let off = (w & !mp).count_ones();
                terms.push(a * mp.count_ones() as f64 + pow_ln(b, on) + pow_ln(cc, off));
                if w == 0 {
                    break;
                }
                w = (w - 1) & allowed;
            }
            log_sum_exp(&terms)
        })
        .collect();
    let measure = EnumeratedMeasure::from_log_weights(
        StateSpace::SpinPairs {
            first: n1,
            second: m2.len(),
        },
        lw,
    )?;
    Ok(PairLaw {
        measure,
        first,
        second,
    })
}

/// k_Λ(ω) for every edge mask.
pub fn cluster_counts(region: &Region, fill: bool) -> Result<Vec<u32>> {
    check_edges(region)?;
    let n = region.len() + region.n_outer_classes();
    Ok((0..1usize << region.n_edges())
        .into_par_iter()
        .map_init(
            || UnionFind::new(n),
            |uf, m| region.cluster_count_fast(m as u64, fill, uf) as u32,
        )
        .collect())
}

/// Applies the per-edge 2x2 matrix m[ω_e][m_e] along every coordinate.
fn edge_transform(v: &mut [f64], n_edges: usize, m: [[f64; 2]; 2]) {
    for e in 0..n_edges {
        let bit = 1usize << e;
        for x in 0..v.len() {
            if x & bit == 0 {
                let a = v[x];
                let b = v[x | bit];
                v[x] = m[0][0] * a + m[0][1] * b;
                v[x | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }
}

fn mask_histogram(layer: &LayerSpace, n_edges: usize) -> Vec<f64> {
    let mut h = vec![0.0; 1 << n_edges];
    for (m, cnt) in layer.mask_counts() {
        h[m as usize] += cnt as f64;
    }
    h
}

/// Pieces of the closed-form GAT weight:
/// ln μ(ω) = |ω| ln_edge + k(ω) ln 2 + ln_sum[ω] + const.
#[derive(Debug, Clone)]
pub struct GatComponents {
    pub n_edges: usize,
    pub fill: bool,
    /// ln w1, or ln(e^{4K} - 1) on the K + K'' = 0 branch.
    pub ln_edge: f64,
    pub clusters: Vec<u32>,
    /// ln of the rescaled sum over s'; -inf where it vanishes.
    pub ln_sum: Vec<f64>,
}

impl GatComponents {
    pub fn log_weight(&self, m: usize) -> f64 {
        if self.ln_sum[m] == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        pow_ln(self.ln_edge, (m as u64).count_ones())
            + self.clusters[m] as f64 * std::f64::consts::LN_2
            + self.ln_sum[m]
    }

    pub fn measure(&self) -> Result<EnumeratedMeasure> {
        let lw = (0..self.ln_sum.len())
            .into_par_iter()
            .map(|m| self.log_weight(m))
            .collect();
        EnumeratedMeasure::from_log_weights(
            StateSpace::Edges {
                n_edges: self.n_edges,
                fill: self.fill,
            },
            lw,
        )
    }
}

pub fn gat_components(
    region: &Arc<Region>,
    c: &CouplingConstants,
    fill: bool,
    eta2: &BoundaryCondition,
) -> Result<GatComponents> {
    check_density(c)?;
    check_edges(region)?;
    let ne = region.n_edges();
    let second = LayerSpace::new(region, eta2)?;
    let mut sums = mask_histogram(&second, ne);
    let ln_edge = match gat_weights(c) {
        Ok(w) => {
            let s = 1f64.max(w.w2).max(w.w3);
            edge_transform(&mut sums, ne, [[1.0 / s, w.w2 / s], [1.0 / s, w.w3 / s]]);
            w.ln_w1
        }
        Err(Error::DegenerateBranch) => {
            let x = (-2.0 * (c.k + c.kp)).exp();
            let s = 1f64.max(x);
            edge_transform(&mut sums, ne, [[1.0 / s, x / s], [0.0, x / s]]);
            if c.k > 0.0 {
                ln_expm1(4.0 * c.k)
            } else {
                f64::NEG_INFINITY
            }
        }
        Err(e) => return Err(e),
    };
    let clusters = cluster_counts(region, fill)?;
    let ln_sum = sums
        .into_iter()
        .map(|s| if s > 0.0 { s.ln() } else { f64::NEG_INFINITY })
        .collect();
    Ok(GatComponents {
        n_edges: ne,
        fill,
        ln_edge,
        clusters,
        ln_sum,
    })
}

/// GAT^{#,η'} from the closed form w1^{|ω|} 2^{k(ω)} Σ_{s'} w2^{|E_s'∖ω|} w3^{|E_s'∩ω|},
/// or its K + K'' = 0 counterpart.
pub fn gat_law(
    region: &Arc<Region>,
    c: &CouplingConstants,
    fill: bool,
    eta2: &BoundaryCondition,
) -> Result<EnumeratedMeasure> {
    gat_components(region, c, fill, eta2)?.measure()
}

/// The ω-marginal of the joint law of (s, s', ω): for each ω the sum over s
/// counts the configurations with E_s ∩ ω = ∅ and the sum over s' is
/// explicit.
pub fn gat_law_from_joint(
    region: &Arc<Region>,
    c: &CouplingConstants,
    eta: &BoundaryCondition,
    eta2: &BoundaryCondition,
) -> Result<EnumeratedMeasure> {
    check_density(c)?;
    check_edges(region)?;
    let fill = first_fill(eta)?;
    let ne = region.n_edges();
    let full = (1usize << ne) - 1;
    let first = LayerSpace::new(region, eta)?;
    let second = LayerSpace::new(region, eta2)?;
    // Zeta transform: compatible[x] = #{s : E_s ⊆ x}.
    let mut compatible = mask_histogram(&first, ne);
    for e in 0..ne {
        let bit = 1usize << e;
        for x in 0..compatible.len() {
            if x & bit != 0 {
                compatible[x] += compatible[x ^ bit];
            }
        }
    }
    let masks2 = second.mask_counts();
    let (a, b, cc) = joint_exponents(c);
    let width = ne + 1;
    let lw: Vec<f64> = (0..=full)
        .into_par_iter()
        .map_init(
            || vec![0u64; width * width],
            |hist, w| {
                let n_s = compatible[full & !w];
                if n_s == 0.0 {
                    return f64::NEG_INFINITY;
                }
                hist.iter_mut().for_each(|h| *h = 0);
                let wm = w as u64;
                for &(m, cnt) in &masks2 {
                    hist[m.count_ones() as usize * width + (wm & m).count_ones() as usize] += cnt;
                }
                let open = wm.count_ones();
                let mut terms = Vec::new();
                for l in 0..width {
                    for j in 0..=l.min(open as usize) {
                        let cnt = hist[l * width + j];
                        if cnt > 0 {
                            terms.push(
                                (cnt as f64).ln()
                                    + a * l as f64
                                    + pow_ln(b, j as u32)
                                    + pow_ln(cc, open - j as u32),
                            );
                        }
                    }
                }
                n_s.ln() + log_sum_exp(&terms)
            },
        )
        .collect();
    EnumeratedMeasure::from_log_weights(StateSpace::Edges { n_edges: ne, fill }, lw)
}

/// ATRC weights as logs, rejecting parameters where some u_i < 0.
fn atrc_logs(c: &CouplingConstants) -> Result<[f64; 3]> {
    let u = atrc_weights(c);
    if u.u1 < 0.0 || u.u2 < 0.0 || u.u3 < 0.0 {
        return Err(Error::Parameters(format!(
            "ATRC weights must be nonnegative, got ({}, {}, {})",
            u.u1, u.u2, u.u3
        )));
    }
    Ok([u.u1.ln(), u.u2.ln(), u.u3.ln()])
}

/// ln of the ATRC weight of (ω, ω'), up to the normalisation.
pub fn atrc_log_weight(
    region: &Region,
    c: &CouplingConstants,
    omega: &EdgeConfig,
    omega2: &EdgeConfig,
) -> Result<f64> {
    let [l1, l2, l3] = atrc_logs(c)?;
    let a = omega.to_mask();
    let b = omega2.to_mask();
    Ok(pow_ln(l1, (a & !b).count_ones())
        + pow_ln(l2, (b & !a).count_ones())
        + pow_ln(l3, (a & b).count_ones())
        + std::f64::consts::LN_2
            * (region.cluster_count(omega) + region.cluster_count(omega2)) as f64)
}

/// ATRC^{#,#'} on pairs (ω, ω'), indexed ω | ω' << |E|.
pub fn atrc_law(region: &Arc<Region>, c: &CouplingConstants, fills: [bool; 2]) -> Result<EnumeratedMeasure> {
    let ne = region.n_edges();
    if 2 * ne > super::MAX_EDGES {
        return Err(Error::CapExceeded(format!(
            "ATRC pair law on {ne} edges exceeds the cap"
        )));
    }
    let [l1, l2, l3] = atrc_logs(c)?;
    let k1 = cluster_counts(region, fills[0])?;
    let k2 = cluster_counts(region, fills[1])?;
    let n = 1usize << ne;
    let ln2 = std::f64::consts::LN_2;
    let lw: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let a = (idx % n) as u64;
            let b = (idx / n) as u64;
            pow_ln(l1, (a & !b).count_ones())
                + pow_ln(l2, (b & !a).count_ones())
                + pow_ln(l3, (a & b).count_ones())
                + ln2 * (k1[a as usize] + k2[b as usize]) as f64
        })
        .collect();
    EnumeratedMeasure::from_log_weights(StateSpace::EdgePairs { n_edges: ne, fills }, lw)
}

/// Marginal of the first ATRC component, summing over ω' explicitly.
fn atrc_first_marginal(
    ne: usize,
    logs: [f64; 3],
    k_own: &[u32],
    k_other: &[u32],
    fill: bool,
) -> Result<EnumeratedMeasure> {
    let [l1, l2, l3] = logs;
    let kmax = *k_other.iter().max().unwrap() as usize + 1;
    let width = ne + 1;
    let ln2 = std::f64::consts::LN_2;
    let lw: Vec<f64> = (0..1usize << ne)
        .into_par_iter()
        .map_init(
            || vec![0u64; width * width * kmax],
            |hist, w| {
                hist.iter_mut().for_each(|h| *h = 0);
                let wm = w as u64;
                for (m, &k) in k_other.iter().enumerate() {
                    let m = m as u64;
                    let j = (wm & m).count_ones() as usize;
                    let l = m.count_ones() as usize;
                    hist[(j * width + l) * kmax + k as usize] += 1;
                }
                let open = wm.count_ones() as usize;
                let mut terms = Vec::new();
                for j in 0..=open {
                    for l in j..width {
                        for k in 0..kmax {
                            let cnt = hist[(j * width + l) * kmax + k];
                            if cnt > 0 {
                                terms.push(
                                    (cnt as f64).ln()
                                        + pow_ln(l1, (open - j) as u32)
                                        + pow_ln(l2, (l - j) as u32)
                                        + pow_ln(l3, j as u32)
                                        + ln2 * k as f64,
                                );
                            }
                        }
                    }
                }
                ln2 * k_own[w] as f64 + log_sum_exp(&terms)
            },
        )
        .collect();
    EnumeratedMeasure::from_log_weights(StateSpace::Edges { n_edges: ne, fill }, lw)
}

/// Both marginals of ATRC^{#,#'}.
pub fn atrc_marginals(
    region: &Arc<Region>,
    c: &CouplingConstants,
    fills: [bool; 2],
) -> Result<(EnumeratedMeasure, EnumeratedMeasure)> {
    check_edges(region)?;
    let [l1, l2, l3] = atrc_logs(c)?;
    let ne = region.n_edges();
    let k1 = cluster_counts(region, fills[0])?;
    let k2 = cluster_counts(region, fills[1])?;
    let first = atrc_first_marginal(ne, [l1, l2, l3], &k1, &k2, fills[0])?;
    let second = atrc_first_marginal(ne, [l2, l1, l3], &k2, &k1, fills[1])?;
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::BoundaryCondition as Bc;

    fn domino() -> Arc<Region> {
        Arc::new(Region::from_vertices(2, &[vec![0, 0], vec![1, 0]]).unwrap())
    }

    #[test]
    fn at_weight_examples() {
        let r = Arc::new(Region::from_vertices(2, &[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap());
        let pair = SpinPair::from_boundary(r.clone(), [Bc::Plus, Bc::Plus]);
        assert_eq!(at_weight(&pair, &CouplingConstants::new(0.0, 0.0, 0.0)).unwrap(), 1.0);
        let c = CouplingConstants::new(0.3, 0.2, -0.1);
        let w = at_log_weight(&pair, &c).unwrap();
        assert!((w - 0.4 * r.n_edges() as f64).abs() < 1e-12);
    }

    #[test]
    fn disagreement_form_differs_by_constant() {
        let r = domino();
        let c = CouplingConstants::new(0.37, -0.21, 0.13);
        let sp = LayerSpace::new(&r, &Bc::Free).unwrap();
        let shift = (c.k + c.kp + c.kpp) * r.n_edges() as f64;
        for i in 0..sp.len() {
            for j in (0..sp.len()).step_by(7) {
                let p = SpinPair::new(r.clone(), sp.config(i), sp.config(j), [Bc::Free, Bc::Free]).unwrap();
                let d = at_log_weight(&p, &c).unwrap() - at_log_weight_disagreement(&p, &c).unwrap();
                assert!((d - shift).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn joint_weight_vanishes_on_disagreement() {
        let r = domino();
        let mut s = vec![1i8; r.len()];
        s[r.index_of(&[0, 0]).unwrap()] = -1;
        let p = SpinPair::new(r.clone(), s, vec![1; r.len()], [Bc::Free, Bc::Plus]).unwrap();
        let e = r.incident(r.index_of(&[0, 0]).unwrap()).next().unwrap();
        let mut w = EdgeConfig::closed(r.n_edges(), false);
        w.set(e, true);
        let c = CouplingConstants::new(0.5, 0.2, 0.1);
        assert_eq!(joint_weight(&p, &w, &c).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_branch_is_a_limit() {
        let r = domino();
        let exact = gat_law(&r, &CouplingConstants::new(0.4, 0.3, -0.4), true, &Bc::Plus).unwrap();
        let near = gat_law(&r, &CouplingConstants::new(0.4, 0.3, -0.4 + 1e-11), true, &Bc::Plus).unwrap();
        assert!(exact.total_variation(&near).unwrap() < 1e-9);
    }

    #[test]
    fn empty_edge_set_is_a_point_mass() {
        // A region can never have no edges, but a two-vertex check of the
        // closed form with every edge forced closed gives the same shape.
        let r = domino();
        let m = gat_law(&r, &CouplingConstants::new(0.0, 0.0, 0.0), false, &Bc::Free).unwrap();
        assert_eq!(m.prob(0), 1.0);
    }
}
