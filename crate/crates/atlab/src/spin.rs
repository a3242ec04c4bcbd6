//! Spin layers, boundary conditions, disagreement edges, flips and the
//! changes of variables that permute the couplings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{parity_of, Parity, Region};
use crate::weights::{CouplingConstants, RolePermutation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    fn from_value(v: i8) -> Self {
        if v > 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Spin pattern defined on all of Z^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pattern {
    Plus,
    Minus,
    /// s on even vertices, -s on odd ones.
    Alternating(Sign),
}

impl Pattern {
    pub fn value_at(self, x: &[i32]) -> i8 {
        match self {
            Pattern::Plus => 1,
            Pattern::Minus => -1,
            Pattern::Alternating(s) => {
                if parity_of(x) == Parity::Even {
                    s.value()
                } else {
                    -s.value()
                }
            }
        }
    }

    fn times(self, other: Pattern) -> Pattern {
        let (a, b) = (self.as_pair(), other.as_pair());
        Pattern::from_pair(a.0 * b.0, a.1 ^ b.1)
    }

    /// (sign at even sites, alternates?)
    fn as_pair(self) -> (i8, bool) {
        match self {
            Pattern::Plus => (1, false),
            Pattern::Minus => (-1, false),
            Pattern::Alternating(s) => (s.value(), true),
        }
    }

    fn from_pair(sign: i8, alt: bool) -> Pattern {
        match (sign > 0, alt) {
            (true, false) => Pattern::Plus,
            (false, false) => Pattern::Minus,
            (_, true) => Pattern::Alternating(Sign::from_value(sign)),
        }
    }
}

/// Finitely many prescribed values on top of a background pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitBoundary {
    pub values: BTreeMap<Vec<i32>, i8>,
    pub background: Pattern,
}

impl ExplicitBoundary {
    pub fn value_at(&self, x: &[i32]) -> i8 {
        self.values
            .get(x)
            .copied()
            .unwrap_or_else(|| self.background.value_at(x))
    }
}

/// Boundary condition of one spin layer.
///
/// `Free` leaves Λ̄∖Λ unconstrained and sets +1 beyond Λ̄; every other
/// variant fixes all spins of Z^d∖Λ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    Plus,
    Minus,
    Free,
    Alternating(Sign),
    Explicit(ExplicitBoundary),
}

impl BoundaryCondition {
    /// The alternating condition η± (+1 on even, -1 on odd vertices).
    pub fn alternating() -> Self {
        BoundaryCondition::Alternating(Sign::Plus)
    }

    pub fn is_free(&self) -> bool {
        matches!(self, BoundaryCondition::Free)
    }

    /// Fixed value at a vertex outside Λ; `None` on Λ̄∖Λ for free boundary.
    pub fn value_at(&self, x: &[i32]) -> Option<i8> {
        match self {
            BoundaryCondition::Free => None,
            other => Some(other.pattern_value(x)),
        }
    }

    /// Value of the boundary pattern extended to every vertex (+1 for free).
    pub fn pattern_value(&self, x: &[i32]) -> i8 {
        match self {
            BoundaryCondition::Plus | BoundaryCondition::Free => 1,
            BoundaryCondition::Minus => -1,
            BoundaryCondition::Alternating(s) => Pattern::Alternating(*s).value_at(x),
            BoundaryCondition::Explicit(e) => e.value_at(x),
        }
    }

    /// The off-box fill # of the graphical representation: 1 for +, 0 for f.
    pub fn fill(&self) -> Option<bool> {
        match self {
            BoundaryCondition::Plus => Some(true),
            BoundaryCondition::Free => Some(false),
            _ => None,
        }
    }

    fn as_pattern(&self) -> Option<Pattern> {
        match self {
            BoundaryCondition::Plus => Some(Pattern::Plus),
            BoundaryCondition::Minus => Some(Pattern::Minus),
            BoundaryCondition::Alternating(s) => Some(Pattern::Alternating(*s)),
            _ => None,
        }
    }

    fn from_pattern(p: Pattern) -> Self {
        match p {
            Pattern::Plus => BoundaryCondition::Plus,
            Pattern::Minus => BoundaryCondition::Minus,
            Pattern::Alternating(s) => BoundaryCondition::Alternating(s),
        }
    }

    fn explicit_parts(&self) -> Option<(BTreeMap<Vec<i32>, i8>, Pattern)> {
        match self {
            BoundaryCondition::Explicit(e) => Some((e.values.clone(), e.background)),
            BoundaryCondition::Free => None,
            other => Some((BTreeMap::new(), other.as_pattern().unwrap())),
        }
    }

    /// Boundary condition of the pointwise product of two layers.
    pub fn product(&self, other: &BoundaryCondition) -> Result<BoundaryCondition> {
        use BoundaryCondition::*;
        match (self, other) {
            (Free, Free) | (Free, Plus) | (Plus, Free) => return Ok(Free),
            (Free, _) | (_, Free) => {
                return Err(Error::Boundary(format!(
                    "product of free with {} is not a boundary condition",
                    if self.is_free() { other } else { self }
                )))
            }
            _ => {}
        }
        if let (Some(a), Some(b)) = (self.as_pattern(), other.as_pattern()) {
            return Ok(Self::from_pattern(a.times(b)));
        }
        let (va, pa) = self.explicit_parts().unwrap();
        let (vb, pb) = other.explicit_parts().unwrap();
        let mut values = BTreeMap::new();
        for x in va.keys().chain(vb.keys()) {
            let a = va.get(x).copied().unwrap_or_else(|| pa.value_at(x));
            let b = vb.get(x).copied().unwrap_or_else(|| pb.value_at(x));
            values.insert(x.clone(), a * b);
        }
        Ok(Explicit(ExplicitBoundary {
            values,
            background: pa.times(pb),
        }))
    }

    /// Boundary condition after flipping every odd vertex.
    pub fn flip_odd(&self) -> Result<BoundaryCondition> {
        match self {
            BoundaryCondition::Free => Err(Error::Boundary(
                "flipping odd sites of a free boundary is not a boundary condition".into(),
            )),
            BoundaryCondition::Explicit(e) => Ok(BoundaryCondition::Explicit(ExplicitBoundary {
                values: e
                    .values
                    .iter()
                    .map(|(x, &v)| (x.clone(), if parity_of(x) == Parity::Odd { -v } else { v }))
                    .collect(),
                background: e.background.times(Pattern::Alternating(Sign::Plus)),
            })),
            other => Ok(Self::from_pattern(
                other.as_pattern().unwrap().times(Pattern::Alternating(Sign::Plus)),
            )),
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Plus => write!(f, "+"),
            BoundaryCondition::Minus => write!(f, "-"),
            BoundaryCondition::Free => write!(f, "f"),
            BoundaryCondition::Alternating(Sign::Plus) => write!(f, "alt"),
            BoundaryCondition::Alternating(Sign::Minus) => write!(f, "-alt"),
            BoundaryCondition::Explicit(_) => write!(f, "explicit"),
        }
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" => Ok(BoundaryCondition::Plus),
            "-" | "minus" => Ok(BoundaryCondition::Minus),
            "f" | "free" => Ok(BoundaryCondition::Free),
            "alt" | "±" | "+-" | "alt+" => Ok(BoundaryCondition::Alternating(Sign::Plus)),
            "-alt" | "alt-" | "∓" | "-+" => Ok(BoundaryCondition::Alternating(Sign::Minus)),
            other => Err(Error::Boundary(format!("unknown boundary condition '{other}'"))),
        }
    }
}

/// Sites of Λ̄ whose spin is not fixed by the boundary condition.
pub fn free_sites(region: &Region, bc: &BoundaryCondition) -> Vec<usize> {
    (0..region.len())
        .filter(|&v| region.is_interior(v) || bc.is_free())
        .collect()
}

/// Layer equal to the boundary pattern everywhere on Λ̄ (+1 for free).
pub fn boundary_extension(region: &Region, bc: &BoundaryCondition) -> Vec<i8> {
    (0..region.len())
        .map(|v| bc.pattern_value(region.coord(v)))
        .collect()
}

/// True if the layer is ±1-valued and matches `bc` on Λ̄∖Λ.
pub fn is_consistent(region: &Region, s: &[i8], bc: &BoundaryCondition) -> bool {
    s.len() == region.len()
        && s.iter().all(|&x| x == 1 || x == -1)
        && region
            .boundary_vertices()
            .all(|v| bc.value_at(region.coord(v)).is_none_or(|b| b == s[v]))
}

/// Indicator of E_s over Ē_Λ.
pub fn disagreement_edges(region: &Region, s: &[i8]) -> Vec<bool> {
    (0..region.n_edges())
        .map(|e| {
            let (u, v) = region.edge(e);
            s[u] != s[v]
        })
        .collect()
}

/// E_s as a bit mask (edge e is bit e); requires at most 64 edges.
pub fn disagreement_mask(region: &Region, s: &[i8]) -> u64 {
    assert!(region.n_edges() <= 64);
    (0..region.n_edges()).fold(0u64, |m, e| {
        let (u, v) = region.edge(e);
        if s[u] != s[v] {
            m | 1 << e
        } else {
            m
        }
    })
}

/// F_A: flips the spins at the vertices listed in `a`.
pub fn spin_flip(s: &[i8], a: &[usize]) -> Vec<i8> {
    let mut out = s.to_vec();
    let mut mark = vec![false; s.len()];
    for &x in a {
        mark[x] = true;
    }
    for (x, m) in mark.iter().enumerate() {
        if *m {
            out[x] = -out[x];
        }
    }
    out
}

/// F_odd: flips every odd vertex of Λ̄.
pub fn flip_odd(region: &Region, s: &[i8]) -> Vec<i8> {
    s.iter()
        .enumerate()
        .map(|(v, &x)| if region.is_even(v) { x } else { -x })
        .collect()
}

/// Edges of Ē_Λ with exactly one endpoint in A.
pub fn edge_boundary(region: &Region, a: &[usize]) -> Vec<bool> {
    let mut mark = vec![false; region.len()];
    for &x in a {
        mark[x] = true;
    }
    (0..region.n_edges())
        .map(|e| {
            let (u, v) = region.edge(e);
            mark[u] != mark[v]
        })
        .collect()
}

/// Changes of variables between AT pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VariableChange {
    /// (s, s').
    Keep,
    /// (s, s s'), couplings (K, K'', K').
    ProductSecond,
    /// (s s', s), couplings (K'', K, K').
    ProductFirstSwap,
    /// (F_odd(s s'), s), couplings (-K'', K, -K').
    StaggeredProductFirstSwap,
}

impl VariableChange {
    /// new[i] = sign[i] * old[perm[i]] on the triple (K, K', K'').
    pub fn permutation(self) -> RolePermutation {
        match self {
            VariableChange::Keep => RolePermutation::new([0, 1, 2], [1, 1, 1]),
            VariableChange::ProductSecond => RolePermutation::new([0, 2, 1], [1, 1, 1]),
            VariableChange::ProductFirstSwap => RolePermutation::new([2, 0, 1], [1, 1, 1]),
            VariableChange::StaggeredProductFirstSwap => {
                RolePermutation::new([2, 0, 1], [-1, 1, -1])
            }
        }
    }
}

/// Two spin layers on Λ̄ with one boundary condition each.
#[derive(Debug, Clone)]
pub struct SpinPair {
    region: Arc<Region>,
    pub s: Vec<i8>,
    pub s2: Vec<i8>,
    bc: [BoundaryCondition; 2],
}

impl SpinPair {
    pub fn new(
        region: Arc<Region>,
        s: Vec<i8>,
        s2: Vec<i8>,
        bc: [BoundaryCondition; 2],
    ) -> Result<Self> {
        if !is_consistent(&region, &s, &bc[0]) || !is_consistent(&region, &s2, &bc[1]) {
            return Err(Error::Boundary(
                "spin layer inconsistent with its boundary condition".into(),
            ));
        }
        Ok(SpinPair { region, s, s2, bc })
    }

    /// Both layers equal to their boundary pattern on all of Λ̄.
    pub fn from_boundary(region: Arc<Region>, bc: [BoundaryCondition; 2]) -> Self {
        let s = boundary_extension(&region, &bc[0]);
        let s2 = boundary_extension(&region, &bc[1]);
        SpinPair { region, s, s2, bc }
    }

    pub fn region(&self) -> &Arc<Region> {
        &self.region
    }

    pub fn boundary(&self) -> &[BoundaryCondition; 2] {
        &self.bc
    }

    pub fn is_consistent(&self) -> bool {
        is_consistent(&self.region, &self.s, &self.bc[0])
            && is_consistent(&self.region, &self.s2, &self.bc[1])
    }

    /// Applies a change of variables; returns the new pair and the induced
    /// permutation of the coupling roles.
    pub fn change_of_variables(&self, mode: VariableChange) -> Result<(SpinPair, RolePermutation)> {
        let product: Vec<i8> = self.s.iter().zip(&self.s2).map(|(a, b)| a * b).collect();
        let (s, s2, bc) = match mode {
            VariableChange::Keep => (self.s.clone(), self.s2.clone(), self.bc.clone()),
            VariableChange::ProductSecond => (
                self.s.clone(),
                product,
                [self.bc[0].clone(), self.bc[0].product(&self.bc[1])?],
            ),
            VariableChange::ProductFirstSwap => (
                product,
                self.s.clone(),
                [self.bc[0].product(&self.bc[1])?, self.bc[0].clone()],
            ),
            VariableChange::StaggeredProductFirstSwap => (
                flip_odd(&self.region, &product),
                self.s.clone(),
                [
                    self.bc[0].product(&self.bc[1])?.flip_odd()?,
                    self.bc[0].clone(),
                ],
            ),
        };
        Ok((
            SpinPair {
                region: self.region.clone(),
                s,
                s2,
                bc,
            },
            mode.permutation(),
        ))
    }

    /// Couplings seen by the transformed pair.
    pub fn transformed_couplings(c: &CouplingConstants, mode: VariableChange) -> CouplingConstants {
        c.permuted(&mode.permutation())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b2() -> Arc<Region> {
        Arc::new(Region::cube(2, 2).unwrap())
    }

    #[test]
    fn disagreement_examples() {
        let r = b2();
        let plus = vec![1i8; r.len()];
        assert!(disagreement_edges(&r, &plus).iter().all(|&x| !x));
        let alt = boundary_extension(&r, &BoundaryCondition::alternating());
        assert!(disagreement_edges(&r, &alt).iter().all(|&x| x));
        let o = r.origin().unwrap();
        let flipped = spin_flip(&plus, &[o]);
        assert_eq!(disagreement_edges(&r, &flipped).iter().filter(|&&x| x).count(), 4);
    }

    #[test]
    fn flips() {
        let r = b2();
        let alt = boundary_extension(&r, &BoundaryCondition::alternating());
        assert!(flip_odd(&r, &alt).iter().all(|&x| x == 1));
        assert_eq!(spin_flip(&alt, &[]), alt);
        let all: Vec<usize> = (0..r.len()).collect();
        let neg: Vec<i8> = alt.iter().map(|x| -x).collect();
        assert_eq!(spin_flip(&alt, &all), neg);
    }

    #[test]
    fn boundary_products() {
        use BoundaryCondition::*;
        let alt = BoundaryCondition::alternating();
        assert_eq!(Plus.product(&alt).unwrap(), alt);
        assert_eq!(alt.product(&alt).unwrap(), Plus);
        assert_eq!(Minus.product(&alt).unwrap(), Alternating(Sign::Minus));
        assert_eq!(Free.product(&Plus).unwrap(), Free);
        assert_eq!(alt.flip_odd().unwrap(), Plus);
        assert_eq!(Plus.flip_odd().unwrap(), alt);
        let explicit = Explicit(ExplicitBoundary {
            values: [(vec![3, 0], -1)].into_iter().collect(),
            background: Pattern::Plus,
        });
        assert!(Free.product(&explicit).is_err());
        assert!(Free.product(&alt).is_err());
        assert!(Free.flip_odd().is_err());
        let p = explicit.product(&alt).unwrap();
        assert_eq!(p.value_at(&[3, 0]), Some(1));
        assert_eq!(p.value_at(&[2, 0]), Some(1));
        assert_eq!(p.value_at(&[2, 1]), Some(-1));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["+", "-", "f", "alt", "-alt"] {
            let bc: BoundaryCondition = s.parse().unwrap();
            assert_eq!(bc.to_string(), s);
        }
        assert!("q".parse::<BoundaryCondition>().is_err());
    }

    #[test]
    fn change_of_variables_modes() {
        let r = b2();
        let pair = SpinPair::from_boundary(
            r.clone(),
            [BoundaryCondition::Plus, BoundaryCondition::alternating()],
        );
        let (same, p) = pair.change_of_variables(VariableChange::Keep).unwrap();
        assert_eq!(same.s, pair.s);
        assert_eq!(p, RolePermutation::identity());
        let (t, _) = pair
            .change_of_variables(VariableChange::StaggeredProductFirstSwap)
            .unwrap();
        assert!(t.s.iter().all(|&x| x == 1));
        assert_eq!(t.boundary()[0], BoundaryCondition::Plus);
        assert!(t.is_consistent());
        let (u, _) = pair.change_of_variables(VariableChange::ProductSecond).unwrap();
        let (back, _) = u.change_of_variables(VariableChange::ProductSecond).unwrap();
        assert_eq!(back.s2, pair.s2);
        let free = SpinPair::from_boundary(
            r,
            [BoundaryCondition::Free, BoundaryCondition::alternating()],
        );
        assert!(free.change_of_variables(VariableChange::ProductSecond).is_err());
    }

    #[test]
    fn inconsistent_pair_rejected() {
        let r = b2();
        let mut s = vec![1i8; r.len()];
        let b = r.boundary_vertices().next().unwrap();
        s[b] = -1;
        let res = SpinPair::new(
            r.clone(),
            s.clone(),
            vec![1; r.len()],
            [BoundaryCondition::Plus, BoundaryCondition::Plus],
        );
        assert!(res.is_err());
        let ok = SpinPair::new(
            r.clone(),
            s,
            vec![1; r.len()],
            [BoundaryCondition::Free, BoundaryCondition::Plus],
        );
        assert!(ok.is_ok());
    }
}
