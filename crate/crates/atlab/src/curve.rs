//! The curve families γ_{κ,κ'} (constant w2, w3) and ĝ_κ (constant û3),
//! and the monotone quantities scanned along them.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Region;
use crate::oracle::{edge_density_pair, gat_law, stochastic_domination_check, theta_one, DominationReport};
use crate::sampler::{run_chains, ChainSettings, Observable};
use crate::spin::BoundaryCondition;
use crate::stats::{bootstrap_interval, mean, Estimate};
use crate::weights::{atrc_weights, CouplingConstants, WeightSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CurveFamily {
    Gamma { kappa: f64, kappa_p: f64 },
    HatGamma { kappa: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub family: CurveFamily,
    /// β ∈ (0, 1) for γ, t ∈ (0, ∞) for ĝ.
    pub coordinate: f64,
    /// Argument of the unreparametrised curve: β̃ for γ, t for ĝ.
    pub inner: f64,
    pub couplings: CouplingConstants,
    pub weights: WeightSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum Backend {
    Oracle,
    Mcmc,
}

fn check_gamma(kappa: f64, kappa_p: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa < kappa_p && kappa_p <= 1.0) {
        return Err(Error::Parameters(format!(
            "γ needs 0 < κ < κ' ≤ 1, got κ = {kappa}, κ' = {kappa_p}"
        )));
    }
    Ok(())
}

/// (β⁻, β⁺) = (-¼ log κκ', -½ log κ).
pub fn gamma_range(kappa: f64, kappa_p: f64) -> Result<(f64, f64)> {
    check_gamma(kappa, kappa_p)?;
    Ok((-0.25 * (kappa * kappa_p).ln(), -0.5 * kappa.ln()))
}

/// γ̃_{κ,κ'}(β̃) = (½ log((κ'-κ)/(κκ'e^{2β̃} - e^{-2β̃})), β̃, β̃ + ½ log κ).
pub fn gamma_tilde(kappa: f64, kappa_p: f64, inner: f64) -> Result<CouplingConstants> {
    let (lo, hi) = gamma_range(kappa, kappa_p)?;
    if !(inner > lo && inner < hi) {
        return Err(Error::Parameters(format!(
            "β̃ = {inner} outside ({lo}, {hi})"
        )));
    }
    let k = 0.5 * ((kappa_p - kappa) / (kappa * kappa_p * (2.0 * inner).exp() - (-2.0 * inner).exp())).ln();
    Ok(CouplingConstants::at(k, inner, inner + 0.5 * kappa.ln()))
}

/// γ_{κ,κ'}(β) = γ̃(β⁺ - β(β⁺ - β⁻)).
pub fn gamma(kappa: f64, kappa_p: f64, beta: f64) -> Result<CurvePoint> {
    let (lo, hi) = gamma_range(kappa, kappa_p)?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Parameters(format!("β = {beta} outside (0, 1)")));
    }
    let inner = hi - beta * (hi - lo);
    let c = gamma_tilde(kappa, kappa_p, inner)?;
    Ok(CurvePoint {
        family: CurveFamily::Gamma { kappa, kappa_p },
        coordinate: beta,
        inner,
        couplings: c,
        weights: WeightSet::new(&c),
    })
}

/// -d/dβ̃ log w1(γ̃(β̃)) = 4κ(κ'-κ)e^{-4β̃} / ((κκ' - e^{-4β̃})(e^{-4β̃} - κ²)).
pub fn neg_dlog_w1_inner(kappa: f64, kappa_p: f64, inner: f64) -> Result<f64> {
    check_gamma(kappa, kappa_p)?;
    let x = (-4.0 * inner).exp();
    Ok(4.0 * kappa * (kappa_p - kappa) * x / ((kappa * kappa_p - x) * (x - kappa * kappa)))
}

/// d/dβ log w1(γ(β)) = (β⁺ - β⁻) · (-d/dβ̃ log w1).
pub fn dlog_w1(kappa: f64, kappa_p: f64, beta: f64) -> Result<f64> {
    let (lo, hi) = gamma_range(kappa, kappa_p)?;
    let p = gamma(kappa, kappa_p, beta)?;
    Ok((hi - lo) * neg_dlog_w1_inner(kappa, kappa_p, p.inner)?)
}

fn check_hat(kappa: f64, t: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::Parameters(format!("ĝ needs κ ∈ (0, 1), got {kappa}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Parameters(format!("ĝ needs t > 0, got {t}")));
    }
    Ok(())
}

/// ĝ_κ(t): J = ¼ log(κt² + 2t + 1), U = J - ½ log(1 + t), K = K' = J,
/// K'' = U, so that u1 = t and û3 = κ.
pub fn hat_gamma(kappa: f64, t: f64) -> Result<CurvePoint> {
    check_hat(kappa, t)?;
    let j = 0.25 * (t * (kappa * t + 2.0)).ln_1p();
    // J - ½ log(1 + t) without cancellation at small t.
    let u = 0.25 * (-(1.0 - kappa) * (t / (1.0 + t)).powi(2)).ln_1p();
    let c = CouplingConstants::isotropic(j, u);
    Ok(CurvePoint {
        family: CurveFamily::HatGamma { kappa },
        coordinate: t,
        inner: t,
        couplings: c,
        weights: WeightSet::new(&c),
    })
}

/// f_κ: (0, 1) → (0, ∞), β ↦ β / (1 - β).
pub fn hat_parameter(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Parameters(format!("β = {beta} outside (0, 1)")));
    }
    Ok(beta / (1.0 - beta))
}

/// u1(ĝ(t1)) ≤ κ u1(ĝ(t2)).
pub fn jump_condition(kappa: f64, t1: f64, t2: f64) -> Result<bool> {
    let u1 = atrc_weights(&hat_gamma(kappa, t1)?.couplings).u1;
    let u2 = atrc_weights(&hat_gamma(kappa, t2)?.couplings).u1;
    Ok(u1 <= kappa * u2)
}

/// Decides GAT^{1,f}_{ĝ(t1)} ≤_st GAT^{1,f}_{ĝ(t2)} on Λ exactly.
pub fn jump_domination(region: &Arc<Region>, kappa: f64, t1: f64, t2: f64) -> Result<DominationReport> {
    let a = gat_law(region, &hat_gamma(kappa, t1)?.couplings, true, &BoundaryCondition::Free)?;
    let b = gat_law(region, &hat_gamma(kappa, t2)?.couplings, true, &BoundaryCondition::Free)?;
    stochastic_domination_check(&a, &b)
}

/// Worst deviations of the curve contracts over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridReport {
    pub points: usize,
    /// Largest relative error of the first and second constant weights.
    pub max_err: [f64; 2],
    /// Fraction of points inside the regime the curve should stay in.
    pub regime_fraction: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// w2 = κ, w3 = κ' and AF-FKG membership on a 25 × 20 × 20 (κ, κ', β)
/// grid of 10^4 points.
pub fn gamma_grid_check() -> Result<GridReport> {
    let mut err = [0.0f64; 2];
    let mut inside = 0;
    let mut points = 0;
    for i in 0..25 {
        let kappa = (i as f64 + 0.5) / 25.0;
        for j in 0..20 {
            let kappa_p = kappa + (1.0 - kappa) * (j as f64 + 1.0) / 20.0;
            for l in 0..20 {
                let p = gamma(kappa, kappa_p, (l as f64 + 0.5) / 20.0)?;
                let w = p.weights.w.ok_or_else(|| Error::Parameters("w undefined on γ".into()))?;
                err[0] = err[0].max(rel(w.w2, kappa));
                err[1] = err[1].max(rel(w.w3, kappa_p));
                inside += p.weights.regime.af_fkg as usize;
                points += 1;
            }
        }
    }
    Ok(GridReport {
        points,
        max_err: err,
        regime_fraction: inside as f64 / points as f64,
    })
}

/// û3 = κ, u1 = t and iso-AF-FKG membership on a 100 × 100 (κ, t) grid,
/// t log-spaced over [1e-3, 1e3].
pub fn hat_gamma_grid_check() -> Result<GridReport> {
    let mut err = [0.0f64; 2];
    let mut inside = 0;
    let mut points = 0;
    for i in 0..100 {
        let kappa = (i as f64 + 0.5) / 100.0;
        for l in 0..100 {
            let t = 10f64.powf(-3.0 + 6.0 * l as f64 / 99.0);
            let p = hat_gamma(kappa, t)?;
            let u = p.weights.u;
            let u3_hat = u.u3_hat.ok_or_else(|| Error::Parameters("û3 undefined on ĝ".into()))?;
            err[0] = err[0].max(rel(u3_hat, kappa));
            err[1] = err[1].max(rel(u.u1, t));
            inside += p.weights.regime.iso_af_fkg as usize;
            points += 1;
        }
    }
    Ok(GridReport {
        points,
        max_err: err,
        regime_fraction: inside as f64 / points as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaRow {
    pub beta: f64,
    pub k: u32,
    pub value: Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub k: u32,
    pub threshold: f64,
    pub beta: Option<f64>,
    /// Bootstrap interval over chains (mcmc only).
    pub interval: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaTable {
    pub rows: Vec<ThetaRow>,
    /// Σ of θ_k over the requested k, per β.
    pub sums: Vec<(f64, f64)>,
    pub crossings: Vec<Crossing>,
}

/// First β at which the piecewise-linear interpolation of ys reaches the
/// threshold.
pub fn crossing(betas: &[f64], ys: &[f64], threshold: f64) -> Option<f64> {
    if ys.first().is_some_and(|&y| y >= threshold) {
        return betas.first().copied();
    }
    for i in 1..ys.len() {
        if ys[i - 1] < threshold && ys[i] >= threshold {
            let f = (threshold - ys[i - 1]) / (ys[i] - ys[i - 1]);
            return Some(betas[i - 1] + f * (betas[i] - betas[i - 1]));
        }
    }
    None
}

pub const CROSSING_THRESHOLDS: [f64; 3] = [0.5, 0.25, 0.75];

/// θ_k(β) = GAT^{1,f}_{B_{2k}}[0 ↔ Z^d∖B_{k-1}] along γ_{κ,κ'}.
pub fn theta_scan(
    d: usize,
    kappa: f64,
    kappa_p: f64,
    betas: &[f64],
    ks: &[u32],
    backend: Backend,
    settings: &ChainSettings,
) -> Result<ThetaTable> {
    let mut rows = Vec::new();
    // Per k: per β, chain means (mcmc).
    let mut chain_means: Vec<Vec<Vec<f64>>> = Vec::new();
    for &k in ks {
        let mut per_beta = Vec::new();
        for &beta in betas {
            let c = gamma(kappa, kappa_p, beta)?.couplings;
            let (value, means) = if k == 0 {
                (Estimate::exact(1.0), vec![1.0; settings.chains.max(1)])
            } else {
                match backend {
                    Backend::Oracle => {
                        if k != 1 {
                            return Err(Error::CapExceeded(format!(
                                "θ_{k} needs B_{} which exceeds the exact-sum cap",
                                2 * k
                            )));
                        }
                        let v = theta_one(d, &c)?;
                        (Estimate::exact(v), vec![v])
                    }
                    Backend::Mcmc => {
                        let r = Arc::new(Region::cube(d, 2 * k)?);
                        let bc = [BoundaryCondition::Plus, BoundaryCondition::Free];
                        let run = run_chains(&r, &c, &bc, settings, &[Observable::Connection(k)])?;
                        let name = format!("connect_{k}");
                        let means = run
                            .chains
                            .iter()
                            .map(|s| mean(s.get(&name).unwrap_or(&[])))
                            .collect();
                        (run.estimate(&name).expect("recorded observable"), means)
                    }
                }
            };
            rows.push(ThetaRow { beta, k, value });
            per_beta.push(means);
        }
        chain_means.push(per_beta);
    }
    let sums = betas
        .iter()
        .map(|&b| {
            let s = rows
                .iter()
                .filter(|r| r.beta == b)
                .map(|r| r.value.value)
                .sum::<f64>();
            (b, s)
        })
        .collect();
    let mut crossings = Vec::new();
    for (ki, &k) in ks.iter().enumerate() {
        let ys: Vec<f64> = rows.iter().filter(|r| r.k == k).map(|r| r.value.value).collect();
        for &th in &CROSSING_THRESHOLDS {
            let interval = (backend == Backend::Mcmc && k > 0).then(|| {
                let idx: Vec<usize> = (0..settings.chains).collect();
                bootstrap_interval(
                    &idx,
                    |pick| {
                        let ys: Vec<f64> = chain_means[ki]
                            .iter()
                            .map(|m| pick.iter().map(|&&i| m[i]).sum::<f64>() / pick.len() as f64)
                            .collect();
                        crossing(betas, &ys, th).unwrap_or(f64::NAN)
                    },
                    200,
                    0.95,
                    settings.seed ^ k as u64,
                )
            });
            crossings.push(Crossing {
                k,
                threshold: th,
                beta: crossing(betas, &ys, th),
                interval,
            });
        }
    }
    Ok(ThetaTable { rows, sums, crossings })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityRow {
    pub t: f64,
    /// GAT^{1,f}_{K,K',K''} edge density.
    pub plus_free: Estimate,
    /// GAT^{0,+}_{K',K,K''} edge density.
    pub free_plus: Estimate,
    pub sum: Estimate,
}

/// The two normalised edge densities along ĝ_κ on B_n.
pub fn edge_density_scan(
    d: usize,
    kappa: f64,
    ts: &[f64],
    n: u32,
    backend: Backend,
    settings: &ChainSettings,
) -> Result<Vec<DensityRow>> {
    ts.iter()
        .map(|&t| {
            let c = hat_gamma(kappa, t)?.couplings;
            let (a, b) = match backend {
                Backend::Oracle => {
                    let (a, b) = edge_density_pair(d, n, &c)?;
                    (Estimate::exact(a), Estimate::exact(b))
                }
                Backend::Mcmc => {
                    let r = Arc::new(Region::cube(d, n)?);
                    let pf = [BoundaryCondition::Plus, BoundaryCondition::Free];
                    let fp = [BoundaryCondition::Free, BoundaryCondition::Plus];
                    let obs = [Observable::EdgeDensity];
                    let a = run_chains(&r, &c, &pf, settings, &obs)?.estimate("edge_density");
                    let b = run_chains(&r, &c.swapped(), &fp, settings, &obs)?.estimate("edge_density");
                    (a.expect("recorded"), b.expect("recorded"))
                }
            };
            let stderr = match (a.stderr, b.stderr) {
                (Some(x), Some(y)) => Some((x * x + y * y).sqrt()),
                _ => None,
            };
            Ok(DensityRow {
                t,
                plus_free: a,
                free_plus: b,
                sum: Estimate {
                    value: a.value + b.value,
                    stderr,
                },
            })
        })
        .collect()
}

/// xs[i+1] ≥ xs[i] - tol for all i.
pub fn non_decreasing(xs: &[f64], tol: f64) -> bool {
    xs.windows(2).all(|w| w[1] >= w[0] - tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_endpoints() {
        let (lo, hi) = gamma_range(0.25, 0.5).unwrap();
        assert!((lo - 0.75 * 2f64.ln()).abs() < 1e-15);
        assert!((hi - 2f64.ln()).abs() < 1e-15);
        assert!(gamma(0.5, 0.25, 0.5).is_err());
        assert!(gamma(0.25, 1.5, 0.5).is_err());
    }

    #[test]
    fn gamma_tilde_example() {
        let c = gamma_tilde(0.25, 0.5, 0.6).unwrap();
        assert!((c.k - 0.393_420).abs() < 1e-6);
        assert_eq!(c.kp, 0.6);
        assert!((c.kpp + 0.093_147).abs() < 1e-6);
        let w = crate::weights::gat_weights(&c).unwrap();
        assert!((w.w2 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn w1_derivative_matches_finite_differences() {
        let (k, kp) = (0.25, 0.5);
        for i in 1..10 {
            let beta = i as f64 / 10.0;
            let h = 1e-6;
            let lw = |b: f64| gamma(k, kp, b).unwrap().weights.w.unwrap().ln_w1;
            let fd = (lw(beta + h) - lw(beta - h)) / (2.0 * h);
            let exact = dlog_w1(k, kp, beta).unwrap();
            assert!((fd - exact).abs() < 1e-6 * exact, "{beta}: {fd} vs {exact}");
            let inner = gamma(k, kp, beta).unwrap().inner;
            assert!(neg_dlog_w1_inner(k, kp, inner).unwrap() > 4.0 * k / (kp - k));
        }
    }

    #[test]
    fn hat_gamma_example() {
        let p = hat_gamma(0.5, 2.0).unwrap();
        assert!((p.couplings.k - 0.25 * 7f64.ln()).abs() < 1e-15);
        assert!((p.couplings.kpp - (0.25 * 7f64.ln() - 0.5 * 3f64.ln())).abs() < 1e-15);
        assert!((p.couplings.kpp + 0.062_825).abs() < 1e-5);
        assert!((p.weights.u.u1 - 2.0).abs() < 1e-12);
        assert!((p.weights.u.u3_hat.unwrap() - 0.5).abs() < 1e-12);
        let q = hat_gamma(0.5, 1e-9).unwrap();
        assert!(q.couplings.k.abs() < 1e-8 && q.couplings.kpp.abs() < 1e-8);
    }

    #[test]
    fn hat_gamma_is_monotone() {
        let mut prev = hat_gamma(0.3, 0.01).unwrap().couplings;
        for i in 2..200 {
            let c = hat_gamma(0.3, 0.01 * i as f64).unwrap().couplings;
            assert!(c.k > prev.k && c.kpp < prev.kpp);
            prev = c;
        }
    }

    #[test]
    fn crossing_interpolates() {
        assert_eq!(crossing(&[0.0, 1.0], &[0.0, 1.0], 0.25), Some(0.25));
        assert_eq!(crossing(&[0.0, 1.0], &[0.0, 0.1], 0.5), None);
    }
}
