//! Coupling constants, the derived weight families and regime predicates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical role of a coupling in the original (J, J', U) parametrisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    J,
    Jp,
    U,
}

/// Signed permutation of the coupling triple: new[i] = sign[i] * old[perm[i]].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RolePermutation {
    pub perm: [usize; 3],
    pub sign: [i8; 3],
}

impl RolePermutation {
    pub fn new(perm: [usize; 3], sign: [i8; 3]) -> Self {
        RolePermutation { perm, sign }
    }

    pub fn identity() -> Self {
        RolePermutation::new([0, 1, 2], [1, 1, 1])
    }

    /// Applying `self` then `next`.
    pub fn then(&self, next: &RolePermutation) -> RolePermutation {
        let mut perm = [0; 3];
        let mut sign = [1; 3];
        for i in 0..3 {
            perm[i] = self.perm[next.perm[i]];
            sign[i] = next.sign[i] * self.sign[next.perm[i]];
        }
        RolePermutation { perm, sign }
    }
}

/// The triple (K, K', K'') weighting s s, s' s' and s s' s s' on each edge,
/// with the roles it plays relative to (J, J', U).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingConstants {
    pub k: f64,
    pub kp: f64,
    pub kpp: f64,
    roles: [(Role, i8); 3],
}

impl CouplingConstants {
    /// (K, K', K'') = (J, J', U).
    pub fn new(k: f64, kp: f64, kpp: f64) -> Self {
        CouplingConstants {
            k,
            kp,
            kpp,
            roles: [(Role::J, 1), (Role::Jp, 1), (Role::U, 1)],
        }
    }

    pub fn at(j: f64, jp: f64, u: f64) -> Self {
        Self::new(j, jp, u)
    }

    /// Isotropic point J = J'.
    pub fn isotropic(j: f64, u: f64) -> Self {
        Self::new(j, j, u)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.k, self.kp, self.kpp]
    }

    pub fn roles(&self) -> [(Role, i8); 3] {
        self.roles
    }

    pub fn permuted(&self, p: &RolePermutation) -> CouplingConstants {
        let old = self.as_array();
        let mut v = [0.0; 3];
        let mut roles = self.roles;
        for i in 0..3 {
            v[i] = p.sign[i] as f64 * old[p.perm[i]];
            let (role, s) = self.roles[p.perm[i]];
            roles[i] = (role, s * p.sign[i]);
        }
        CouplingConstants {
            k: v[0],
            kp: v[1],
            kpp: v[2],
            roles,
        }
    }

    /// The original (J, J', U).
    pub fn original(&self) -> [f64; 3] {
        let v = self.as_array();
        let mut out = [0.0; 3];
        for i in 0..3 {
            let (role, s) = self.roles[i];
            let slot = match role {
                Role::J => 0,
                Role::Jp => 1,
                Role::U => 2,
            };
            out[slot] = s as f64 * v[i];
        }
        out
    }

    /// Same values with the two layers exchanged: (K', K, K'').
    pub fn swapped(&self) -> CouplingConstants {
        self.permuted(&RolePermutation::new([1, 0, 2], [1, 1, 1]))
    }
}

/// ln(e^x - 1) for x > 0, accurate for small and large x.
pub fn ln_expm1(x: f64) -> f64 {
    if x > 30.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

/// (p1, p2) = (1 - e^{-2(K-K'')}, 1 - e^{-2(K+K'')}); needs K ≥ |K''|.
pub fn sampling_probabilities(c: &CouplingConstants) -> Result<(f64, f64)> {
    if c.k < c.kpp.abs() {
        return Err(Error::Parameters(format!(
            "sampling needs K >= |K''|, got K = {}, K'' = {}",
            c.k, c.kpp
        )));
    }
    Ok((-(-2.0 * (c.k - c.kpp)).exp_m1(), -(-2.0 * (c.k + c.kpp)).exp_m1()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GatWeights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub ln_w1: f64,
    pub ln_w2: f64,
    /// -inf when w3 = 0.
    pub ln_w3: f64,
}

/// (w1, w2, w3); the branch K + K'' = 0 is reported as an error.
pub fn gat_weights(c: &CouplingConstants) -> Result<GatWeights> {
    let s = c.k + c.kpp;
    if s == 0.0 {
        return Err(Error::DegenerateBranch);
    }
    if s < 0.0 {
        return Err(Error::Parameters(format!("K + K'' = {s} < 0")));
    }
    let w1 = (2.0 * s).exp_m1();
    let ln_w2 = 2.0 * (c.kpp - c.kp);
    let w2 = ln_w2.exp();
    let diff = c.k - c.kpp;
    let (w3, ln_w3) = if diff == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        let ln = ln_w2 + ln_expm1(2.0 * diff) - ln_expm1(2.0 * s);
        (w2 * (2.0 * diff).exp_m1() / w1, ln)
    };
    Ok(GatWeights {
        w1,
        w2,
        w3,
        ln_w1: ln_expm1(2.0 * s),
        ln_w2,
        ln_w3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtrcWeights {
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    /// u3 / u1^2, undefined when u1 = 0.
    pub u3_hat: Option<f64>,
}

pub fn atrc_weights(c: &CouplingConstants) -> AtrcWeights {
    let u1 = (2.0 * (c.k - c.kpp)).exp_m1();
    let u2 = (2.0 * (c.kp - c.kpp)).exp_m1();
    // u3 = u1 u2 + e^{2(K+K')} (1 - e^{-4K''})
    let u3 = u1 * u2 - (2.0 * (c.k + c.kp)).exp() * (-4.0 * c.kpp).exp_m1();
    let u3_hat = (u1 != 0.0).then(|| u3 / (u1 * u1));
    AtrcWeights { u1, u2, u3, u3_hat }
}

/// Eight-vertex weights (a, b, c, d).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexWeights {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl VertexWeights {
    pub fn six_vertex(a: f64, b: f64, c: f64) -> Self {
        VertexWeights { a, b, c, d: 0.0 }
    }

    pub fn is_six_vertex(&self) -> bool {
        self.d == 0.0
    }

    /// a = b: the non-staggered case, which on the isotropic six-vertex
    /// line corresponds to the self-dual curve.
    pub fn is_non_staggered(&self, tol: f64) -> bool {
        (self.a - self.b).abs() <= tol * self.c
    }
}

pub fn eight_vertex_weights(c: &CouplingConstants) -> Result<VertexWeights> {
    if c.k < c.kpp.abs() {
        return Err(Error::Parameters(format!(
            "eight-vertex weights need K >= |K''|, got K = {}, K'' = {}",
            c.k, c.kpp
        )));
    }
    let a = (2.0 * (c.k + c.kpp)).exp_m1();
    let b = (-2.0 * c.kp).exp() * ((2.0 * c.k).exp() + (2.0 * c.kpp).exp());
    let d = (2.0 * (c.kpp - c.kp)).exp() * (2.0 * (c.k - c.kpp)).exp_m1();
    Ok(VertexWeights {
        a,
        b,
        c: a + 2.0,
        d,
    })
}

/// (J, U) on the isotropic six-vertex line K = K'' = J, K' = U with
/// a/c = tanh 2J and b/c = e^{-2U} / cosh 2J.
pub fn six_vertex_couplings(a_over_c: f64, b_over_c: f64) -> Result<(f64, f64)> {
    if !(a_over_c > 0.0 && a_over_c < 1.0 && b_over_c > 0.0) {
        return Err(Error::Parameters(
            "need 0 < a/c < 1 and b/c > 0".into(),
        ));
    }
    let j = 0.5 * a_over_c.atanh();
    let u = -0.5 * (b_over_c * (2.0 * j).cosh()).ln();
    Ok((j, u))
}

pub const SELF_DUAL_TOL: f64 = 1e-10;

/// Rounding allowance for the boundary inequalities of the regimes, whose
/// edges are reached exactly by some curve families.
pub const REGIME_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Regime {
    pub af_fkg: bool,
    pub gat_fkg: bool,
    pub iso_af_fkg: bool,
    pub self_dual: bool,
    pub sampling_valid: bool,
}

pub fn regime_predicates(c: &CouplingConstants) -> Regime {
    let [j, jp, u] = c.original();
    let (k, kp, kpp) = (c.k, c.kp, c.kpp);
    let af_fkg = j.min(jp) > 0.0 && u < 0.0 && u.tanh() >= -j.tanh() * jp.tanh() - REGIME_TOL;
    let gat_fkg = kp >= kpp && kpp.tanh() >= -k.tanh() * kp.tanh() - REGIME_TOL && k >= kpp && k > -kpp;
    let iso = j == jp;
    let iso_af_fkg = iso && j > 0.0 && u < 0.0 && (2.0 * j).cosh() >= (-2.0 * u).exp() * (1.0 - REGIME_TOL);
    let self_dual = iso && ((2.0 * j).sinh() - (-2.0 * u).exp()).abs() <= SELF_DUAL_TOL;
    Regime {
        af_fkg,
        gat_fkg,
        iso_af_fkg,
        self_dual,
        sampling_valid: k >= kpp.abs(),
    }
}

/// Every derived weight at one parameter point; entries are `None` where
/// the corresponding formula is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightSet {
    pub p: Option<(f64, f64)>,
    pub w: Option<GatWeights>,
    pub u: AtrcWeights,
    pub vertex: Option<VertexWeights>,
    pub regime: Regime,
}

impl WeightSet {
    pub fn new(c: &CouplingConstants) -> Self {
        WeightSet {
            p: sampling_probabilities(c).ok(),
            w: gat_weights(c).ok(),
            u: atrc_weights(c),
            vertex: eight_vertex_weights(c).ok(),
            regime: regime_predicates(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn gat_weight_examples() {
        let w = gat_weights(&CouplingConstants::new(0.25, 0.7, 0.25)).unwrap();
        assert_eq!(w.w3, 0.0);
        assert!(close(w.w1, 1.718_281_828_459_045, 1e-15));
        let w = gat_weights(&CouplingConstants::new(0.5, 0.5, 0.0)).unwrap();
        assert!(close(w.w2, 0.367_879_441_171_442_3, 1e-15));
        assert!(close(w.w3, 0.367_879_441_171_442_3, 1e-15));
        assert_eq!(
            gat_weights(&CouplingConstants::new(0.3, 0.1, -0.3)),
            Err(Error::DegenerateBranch)
        );
    }

    #[test]
    fn atrc_weight_examples() {
        let u = atrc_weights(&CouplingConstants::new(0.5, 0.5, 0.0));
        assert!(close(u.u1, E - 1.0, 1e-15));
        assert!(close(u.u2, E - 1.0, 1e-15));
        assert!(close(u.u3, 2.952_492_442_012_559, 1e-14));
        let u = atrc_weights(&CouplingConstants::isotropic(0.5, -0.1));
        assert!(close(u.u1, 2.320_116_922_736_547, 1e-14));
        let hat = u.u3_hat.unwrap();
        assert!(close(hat, 0.324_882_3, 1e-6));
        assert!(hat < 1.0);
        assert_eq!(atrc_weights(&CouplingConstants::new(0.3, 0.2, 0.3)).u3_hat, None);
    }

    #[test]
    fn vertex_weight_examples() {
        let v = eight_vertex_weights(&CouplingConstants::new(0.25, 1.0, 0.25)).unwrap();
        assert_eq!(v.d, 0.0);
        assert!(close(v.a, E - 1.0, 1e-15));
        assert!(close(v.c, E + 1.0, 1e-15));
        assert!(close(v.b, 0.446_260_320_296_860_9, 1e-14));
        let v = eight_vertex_weights(&CouplingConstants::new(0.25, -1.0, 0.25)).unwrap();
        assert!(close(v.a / v.c, 0.462_117_157_260_009_74, 1e-14));
        assert!(close(v.b / v.c, 6.552_754_483_245_947, 1e-14));
        assert!(close(v.b / v.c, 2.0f64.exp() / 0.5f64.cosh(), 1e-14));
    }

    #[test]
    fn six_vertex_inverse() {
        let (j, u) = six_vertex_couplings(0.05, 20.0).unwrap();
        let v = eight_vertex_weights(&CouplingConstants::new(j, u, j)).unwrap();
        assert!(close(v.a / v.c, 0.05, 1e-14));
        assert!(close(v.b / v.c, 20.0, 1e-13));
    }

    #[test]
    fn regime_examples() {
        let r = regime_predicates(&CouplingConstants::isotropic(1.0, 0.5));
        assert!(!r.af_fkg);
        assert!(r.gat_fkg);
        let r = regime_predicates(&CouplingConstants::isotropic(0.5, -0.1));
        assert!(r.iso_af_fkg);
        assert!(r.af_fkg);
        let j = 0.5 * (1.0f64).asinh();
        let r = regime_predicates(&CouplingConstants::isotropic(j, 0.0));
        assert!(r.self_dual);
    }

    #[test]
    fn permutation_tracks_roles() {
        let c = CouplingConstants::at(0.3, 0.2, -0.1);
        let p = RolePermutation::new([0, 2, 1], [1, 1, 1]);
        let t = c.permuted(&p);
        assert_eq!(t.as_array(), [0.3, -0.1, 0.2]);
        assert_eq!(t.original(), [0.3, 0.2, -0.1]);
        let s = c.permuted(&RolePermutation::new([2, 0, 1], [-1, 1, -1]));
        assert_eq!(s.as_array(), [0.1, 0.3, -0.2]);
        assert_eq!(s.original(), [0.3, 0.2, -0.1]);
        let twice = p.then(&p);
        assert_eq!(twice, RolePermutation::identity());
    }
}
