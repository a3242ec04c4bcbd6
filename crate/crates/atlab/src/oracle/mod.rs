//! Exhaustive enumeration of the finite-volume laws on tiny regions.
//!
//! Every measure is stored as log-weights in a canonical state order and
//! normalised against its largest entry. Spin layers are enumerated over
//! their free sites only (bit i of an index set means +1 at the i-th free
//! site); percolation configurations are bit masks over the canonical edge
//! order of the region.

mod checks;
mod contraction;
mod domination;
mod laws;

pub use checks::*;
pub use contraction::*;
pub use domination::*;
pub use laws::*;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Region;
use crate::spin::{boundary_extension, free_sites, BoundaryCondition};
use crate::stats::{total_variation, Neumaier};

/// Free spins per layer.
pub const MAX_FREE_SITES: usize = 20;
/// Edges of a region whose percolation configurations are enumerated.
pub const MAX_EDGES: usize = 24;
/// Largest materialised state space.
pub const MAX_STATES: usize = 1 << 26;

pub(crate) fn check_edges(region: &Region) -> Result<()> {
    if region.n_edges() > MAX_EDGES {
        return Err(Error::CapExceeded(format!(
            "{} edges exceed the enumeration cap of {MAX_EDGES}",
            region.n_edges()
        )));
    }
    Ok(())
}

pub(crate) fn check_states(n: usize) -> Result<()> {
    if n > MAX_STATES {
        return Err(Error::CapExceeded(format!(
            "{n} states exceed the enumeration cap of {MAX_STATES}"
        )));
    }
    Ok(())
}

/// count * ln(base), with 0^0 = 1.
#[inline]
pub(crate) fn pow_ln(ln_base: f64, count: u32) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * ln_base
    }
}

/// What the entries of an [`EnumeratedMeasure`] index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum StateSpace {
    /// Edge masks over Ē_Λ with the given off-box fill.
    Edges { n_edges: usize, fill: bool },
    /// Pairs (ω, ω') as ω | ω' << n_edges.
    EdgePairs { n_edges: usize, fills: [bool; 2] },
    /// Spin pairs as i + j * first, indices into two [`LayerSpace`]s.
    SpinPairs { first: usize, second: usize },
    /// Eight-vertex spins (σ•, σ∘) as i + j * primal.
    Vertex { primal: usize, dual: usize },
    /// Explicit list of configurations kept alongside the measure.
    Listed { len: usize },
}

/// Normalised measure on an enumerated state space.
#[derive(Debug, Clone, Serialize)]
pub struct EnumeratedMeasure {
    space: StateSpace,
    log_weights: Vec<f64>,
    log_z: f64,
    probs: Vec<f64>,
}

impl EnumeratedMeasure {
    pub fn from_log_weights(space: StateSpace, log_weights: Vec<f64>) -> Result<Self> {
        if log_weights.iter().any(|w| w.is_nan() || *w == f64::INFINITY) {
            return Err(Error::Input("log-weights contain NaN or +inf".into()));
        }
        let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(Error::Input("all weights vanish".into()));
        }
        let mut acc = Neumaier::new();
        let scaled: Vec<f64> = log_weights.iter().map(|w| (w - max).exp()).collect();
        for &x in &scaled {
            acc.add(x);
        }
        let total = acc.value();
        let probs = scaled.iter().map(|x| x / total).collect();
        Ok(EnumeratedMeasure {
            space,
            log_z: max + total.ln(),
            log_weights,
            probs,
        })
    }

    pub fn from_weights(space: StateSpace, weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::Input("negative weight".into()));
        }
        Self::from_log_weights(space, weights.iter().map(|w| w.ln()).collect())
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn log_weight(&self, i: usize) -> f64 {
        self.log_weights[i]
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// ln Z.
    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn z(&self) -> f64 {
        self.log_z.exp()
    }

    pub fn expectation(&self, f: impl Fn(usize) -> f64) -> f64 {
        let mut acc = Neumaier::new();
        for (i, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                acc.add(p * f(i));
            }
        }
        acc.value()
    }

    pub fn probability(&self, event: impl Fn(usize) -> bool) -> f64 {
        self.expectation(|i| if event(i) { 1.0 } else { 0.0 })
    }

    pub fn covariance(&self, f: impl Fn(usize) -> f64, g: impl Fn(usize) -> f64) -> f64 {
        let ef = self.expectation(&f);
        let eg = self.expectation(&g);
        self.expectation(|i| (f(i) - ef) * (g(i) - eg))
    }

    /// Pushforward under a map into 0..len.
    pub fn pushforward(&self, space: StateSpace, len: usize, map: impl Fn(usize) -> usize) -> Result<Self> {
        let mut acc = vec![Neumaier::new(); len];
        for (i, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                acc[map(i)].add(p);
            }
        }
        let w: Vec<f64> = acc.iter().map(|a| a.value()).collect();
        Self::from_weights(space, &w)
    }

    pub fn total_variation(&self, other: &EnumeratedMeasure) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::Input(format!(
                "state spaces differ in size: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(total_variation(&self.probs, &other.probs))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
    }
}

/// Configurations of one spin layer compatible with a boundary condition.
#[derive(Debug, Clone)]
pub struct LayerSpace {
    region: Arc<Region>,
    bc: BoundaryCondition,
    free: Vec<usize>,
    base: Vec<i8>,
    base_mask: u64,
    toggles: Vec<u64>,
}

impl LayerSpace {
    pub fn new(region: &Arc<Region>, bc: &BoundaryCondition) -> Result<Self> {
        let free = free_sites(region, bc);
        if free.len() > MAX_FREE_SITES {
            return Err(Error::CapExceeded(format!(
                "{} free spins exceed the per-layer cap of {MAX_FREE_SITES}",
                free.len()
            )));
        }
        if region.n_edges() > 64 {
            return Err(Error::CapExceeded("more than 64 edges".into()));
        }
        let mut base = boundary_extension(region, bc);
        for &v in &free {
            base[v] = -1;
        }
        let base_mask = crate::spin::disagreement_mask(region, &base);
        let toggles = free
            .iter()
            .map(|&v| region.incident(v).fold(0u64, |m, e| m | 1 << e))
            .collect();
        Ok(LayerSpace {
            region: region.clone(),
            bc: bc.clone(),
            free,
            base,
            base_mask,
            toggles,
        })
    }

    pub fn region(&self) -> &Arc<Region> {
        &self.region
    }

    pub fn boundary(&self) -> &BoundaryCondition {
        &self.bc
    }

    pub fn free_sites(&self) -> &[usize] {
        &self.free
    }

    pub fn len(&self) -> usize {
        1 << self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn write_config(&self, idx: usize, out: &mut [i8]) {
        out.copy_from_slice(&self.base);
        for (i, &v) in self.free.iter().enumerate() {
            if idx >> i & 1 == 1 {
                out[v] = 1;
            }
        }
    }

    pub fn config(&self, idx: usize) -> Vec<i8> {
        let mut out = vec![0; self.base.len()];
        self.write_config(idx, &mut out);
        out
    }

    /// Value of the spin at site v in configuration idx.
    #[inline]
    pub fn spin(&self, idx: usize, v: usize) -> i8 {
        match self.free.iter().position(|&w| w == v) {
            Some(i) => {
                if idx >> i & 1 == 1 {
                    1
                } else {
                    -1
                }
            }
            None => self.base[v],
        }
    }

    pub fn index_of(&self, s: &[i8]) -> Option<usize> {
        if !crate::spin::is_consistent(&self.region, s, &self.bc) {
            return None;
        }
        Some(
            self.free
                .iter()
                .enumerate()
                .fold(0, |idx, (i, &v)| if s[v] == 1 { idx | 1 << i } else { idx }),
        )
    }

    /// E_s as a mask.
    pub fn mask(&self, idx: usize) -> u64 {
        self.toggles
            .iter()
            .enumerate()
            .fold(self.base_mask, |m, (i, t)| if idx >> i & 1 == 1 { m ^ t } else { m })
    }

    /// E_s for every configuration, in index order.
    pub fn masks(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.len()];
        out[0] = self.base_mask;
        for i in 1..out.len() {
            out[i] = out[i & (i - 1)] ^ self.toggles[i.trailing_zeros() as usize];
        }
        out
    }

    /// Distinct disagreement masks with multiplicities, sorted by mask.
    pub fn mask_counts(&self) -> Vec<(u64, u64)> {
        let mut m = self.masks();
        m.sort_unstable();
        let mut out: Vec<(u64, u64)> = Vec::new();
        for x in m {
            match out.last_mut() {
                Some((y, c)) if *y == x => *c += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::disagreement_mask;

    #[test]
    fn measure_normalises_large_weights() {
        let m = EnumeratedMeasure::from_log_weights(
            StateSpace::Listed { len: 3 },
            vec![1000.0, 1000.0, f64::NEG_INFINITY],
        )
        .unwrap();
        assert!((m.probs().iter().sum::<f64>() - 1.0).abs() < 1e-13);
        assert_eq!(m.prob(2), 0.0);
        assert!((m.log_z() - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert!(EnumeratedMeasure::from_log_weights(
            StateSpace::Listed { len: 1 },
            vec![f64::NEG_INFINITY]
        )
        .is_err());
    }

    #[test]
    fn layer_masks_match_direct() {
        let r = Arc::new(Region::cube(2, 1).unwrap());
        for bc in [BoundaryCondition::Plus, BoundaryCondition::alternating()] {
            let l = LayerSpace::new(&r, &bc).unwrap();
            let all = l.masks();
            for idx in [0, 1, 77, 300, l.len() - 1] {
                let s = l.config(idx);
                assert_eq!(l.mask(idx), disagreement_mask(&r, &s));
                assert_eq!(all[idx], l.mask(idx));
                assert_eq!(l.index_of(&s), Some(idx));
                assert_eq!(l.spin(idx, 4), s[4]);
            }
        }
        assert!(LayerSpace::new(&r, &BoundaryCondition::Free).is_err());
    }
}
