//! The six subcommands.

use std::sync::Arc;

use atlab::contour::{bound_check, enumerate_blocking, region_edges, DEFAULT_MAX_K_2D};
use atlab::curve::{
    dlog_w1, edge_density_scan, gamma, jump_condition, jump_domination, theta_scan, Backend,
};
use atlab::oracle::*;
use atlab::sampler::{run_chains, Observable};
use atlab::stats::Estimate;
use atlab::vertex::{eightv_from_coupling, eightv_law, height_variance_exact, hf_law};
use atlab::weights::{eight_vertex_weights, regime_predicates, six_vertex_couplings};
use atlab::{BoundaryCondition as Bc, CouplingConstants, DualGeometry, EdgeConfig, Error, Region, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{backend_name, parse_grid, parse_list, parse_observable, ExperimentConfig};
use crate::output::{params, Report, Row};
use crate::svg;

/// What a subcommand hands back to the orchestrator.
pub struct Outcome {
    pub report: Report,
    pub svg: Option<String>,
    /// A verification check failed.
    pub failed: bool,
}

impl Outcome {
    fn plain(report: Report, svg: Option<String>) -> Self {
        Outcome { report, svg, failed: false }
    }
}

/// Largest edge set on which the per-point oracle checks run in `verify`.
pub const VERIFY_MAX_EDGES: usize = 16;
/// Edge-pair laws and the lattice condition are costlier.
const VERIFY_MAX_EDGES_PAIR: usize = 12;
const VERIFY_MAX_EDGES_FKG: usize = 14;

fn dense_point(rng: &mut ChaCha8Rng) -> CouplingConstants {
    let k = rng.random_range(0.05..0.9);
    let kpp = rng.random_range(-k..k);
    CouplingConstants::new(k, rng.random_range(-0.8..0.8), kpp)
}

fn fkg_point(rng: &mut ChaCha8Rng) -> CouplingConstants {
    loop {
        let c = CouplingConstants::new(
            rng.random_range(0.05..0.9),
            rng.random_range(0.05..0.9),
            rng.random_range(-0.6..0.6),
        );
        if regime_predicates(&c).gat_fkg && c.kp >= c.kpp.abs() && c.k >= c.kpp.abs() {
            return c;
        }
    }
}

#[derive(Clone, Copy)]
enum Bound {
    /// value ≤ threshold.
    AtMost(f64),
    /// value ≥ threshold.
    AtLeast(f64),
}

struct Check {
    name: &'static str,
    bound: Bound,
    /// Edge limit; `None` means always run.
    max_edges: Option<usize>,
    planar: bool,
}

/// Worst value of one check over the random points.
type CheckRun<'a> = Box<dyn Fn(&mut ChaCha8Rng) -> Result<f64> + 'a>;

pub fn verify(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    let r = cfg.region()?;
    let points = cfg.points.unwrap_or(20);
    let seed = cfg.seed();
    cfg.points = Some(points);
    cfg.seed = Some(seed);
    let ne = r.n_edges();
    let planar = r.dim() == 2;
    let fill_combos = || {
        [
            (Bc::Plus, Bc::Plus),
            (Bc::Plus, Bc::Free),
            (Bc::Plus, Bc::alternating()),
            (Bc::Free, Bc::Plus),
            (Bc::Free, Bc::Free),
            (Bc::Free, Bc::alternating()),
        ]
    };
    let origin = r.origin().unwrap_or_else(|| r.interior_vertices().next().expect("non-empty region"));

    let mut checks: Vec<(Check, CheckRun)> = Vec::new();
    let (rr, combos) = (r.clone(), fill_combos());
    checks.push((
        Check { name: "gat_closed_form_vs_joint_tv", bound: Bound::AtMost(1e-12), max_edges: Some(VERIFY_MAX_EDGES), planar: false },
        Box::new(move |rng| {
            let mut w = 0.0f64;
            for i in 0..points {
                let c = dense_point(rng);
                let (eta, eta2) = &combos[i % combos.len()];
                let a = gat_law(&rr, &c, eta.fill().expect("+ or f"), eta2)?;
                let b = gat_law_from_joint(&rr, &c, eta, eta2)?;
                w = w.max(a.total_variation(&b)?);
            }
            Ok(w)
        }),
    ));
    let rr = r.clone();
    checks.push((
        Check { name: "atrc_marginals_vs_gat_tv", bound: Bound::AtMost(1e-12), max_edges: Some(VERIFY_MAX_EDGES_PAIR), planar: false },
        Box::new(move |rng| {
            let mut w = 0.0f64;
            for i in 0..points {
                let c = fkg_point(rng);
                let fills = [i % 2 == 0, i % 4 < 2];
                let bc = |f: bool| if f { Bc::Plus } else { Bc::Free };
                let (m1, m2) = atrc_marginals(&rr, &c, fills)?;
                let g1 = gat_law(&rr, &c, fills[0], &bc(fills[1]))?;
                let g2 = gat_law(&rr, &c.swapped(), fills[1], &bc(fills[0]))?;
                w = w.max(m1.total_variation(&g1)?).max(m2.total_variation(&g2)?);
            }
            Ok(w)
        }),
    ));
    let rr = r.clone();
    checks.push((
        Check { name: "eightv_closed_form_vs_coupling_tv", bound: Bound::AtMost(1e-12), max_edges: Some(VERIFY_MAX_EDGES), planar: true },
        Box::new(move |rng| {
            let mut w = 0.0f64;
            let etas = [Bc::Plus, Bc::Free, Bc::alternating()];
            for i in 0..points {
                let c = dense_point(rng);
                let eta2 = &etas[i % etas.len()];
                let a = eightv_law(&rr, &eight_vertex_weights(&c)?, eta2)?;
                let b = eightv_from_coupling(&rr, &c, eta2)?;
                w = w.max(a.measure.total_variation(&b.measure)?);
            }
            Ok(w)
        }),
    ));
    let (rr, all) = (r.clone(), fill_combos());
    checks.push((
        Check { name: "correlation_vs_connection_gap", bound: Bound::AtMost(1e-12), max_edges: Some(VERIFY_MAX_EDGES), planar: false },
        Box::new(move |rng| {
            let mut w = 0.0f64;
            let combos: Vec<_> = all.iter().filter(|(a, b)| !(a.is_free() && b.is_free())).collect();
            for i in 0..points {
                let c = dense_point(rng);
                let (eta, eta2) = combos[i % combos.len()];
                w = w.max(correlation_equals_connection(&rr, &c, &[eta.clone(), eta2.clone()])?.max_gap);
            }
            Ok(w)
        }),
    ));
    let (rr, combos) = (r.clone(), fill_combos());
    checks.push((
        Check { name: "finite_energy_min_slack", bound: Bound::AtLeast(-1e-12), max_edges: Some(VERIFY_MAX_EDGES), planar: false },
        Box::new(move |rng| {
            let mut w = f64::INFINITY;
            for i in 0..points {
                let c = dense_point(rng);
                let (eta, eta2) = &combos[i % combos.len()];
                w = w.min(finite_energy_check(&rr, &c, eta.fill().expect("+ or f"), eta2)?.min_slack);
            }
            Ok(w)
        }),
    ));
    let rr = r.clone();
    checks.push((
        Check { name: "fkg_lattice_min_margin", bound: Bound::AtLeast(-1e-13), max_edges: Some(VERIFY_MAX_EDGES_FKG), planar: false },
        Box::new(move |rng| {
            let mut w = f64::INFINITY;
            for i in 0..points {
                let c = fkg_point(rng);
                let rep = fkg_lattice_check_gat(&rr, &c, i % 2 == 0, if i % 4 < 2 { &Bc::Plus } else { &Bc::Free })?;
                w = w.min(rep.min_margin);
            }
            Ok(w)
        }),
    ));
    let rr = r.clone();
    checks.push((
        Check { name: "jump_domination_fraction", bound: Bound::AtLeast(1.0), max_edges: Some(VERIFY_MAX_EDGES_FKG), planar: false },
        Box::new(move |rng| {
            let mut ok = 0usize;
            for _ in 0..points {
                let (kappa, t1, t2) = loop {
                    let kappa = rng.random_range(0.1..0.9);
                    let t2 = 10f64.powf(rng.random_range(-1.0..1.0));
                    let t1 = kappa * t2 * rng.random_range(0.05..1.0);
                    if jump_condition(kappa, t1, t2)? {
                        break (kappa, t1, t2);
                    }
                };
                ok += jump_domination(&rr, kappa, t1, t2)?.dominated as usize;
            }
            Ok(if points == 0 { 1.0 } else { ok as f64 / points as f64 })
        }),
    ));
    let rr = r.clone();
    checks.push((
        Check { name: "russo_min_slack", bound: Bound::AtLeast(-1e-8), max_edges: Some(VERIFY_MAX_EDGES), planar: false },
        Box::new(move |_| {
            let (kappa, kappa_p) = (0.25, 0.5);
            let betas: Vec<f64> = (0..points).map(|i| (i as f64 + 0.5) / points as f64).collect();
            let mut eps = f64::INFINITY;
            for &b in &betas {
                eps = eps.min(dlog_w1(kappa, kappa_p, b)?);
            }
            let x = |m: u64| rr.clusters_with(|e| m >> e & 1 == 1, true).reaches_outside(origin) as u8 as f64;
            let curve = |b: f64| gamma(kappa, kappa_p, b).map(|p| p.couplings);
            let mut w = f64::INFINITY;
            for &b in &betas {
                w = w.min(russo_check(&rr, &curve, b, 1e-5, eps, &x)?.slack);
            }
            Ok(w)
        }),
    ));
    let rr = r.clone();
    checks.push((
        Check { name: "griffiths_gap", bound: Bound::AtMost(1e-12), max_edges: Some(VERIFY_MAX_EDGES), planar: false },
        Box::new(move |rng| {
            let inner: Vec<usize> = rr.interior_vertices().collect();
            let mut w = 0.0f64;
            for _ in 0..points {
                let j = rng.random_range(0.05..0.9);
                let c = CouplingConstants::at(j, rng.random_range(-0.8..0.8), rng.random_range(-j..j));
                let a: Vec<usize> = inner.iter().copied().filter(|_| rng.random::<bool>()).collect();
                w = w.max(griffiths_check(&rr, &c, &a)?.gap);
            }
            Ok(w)
        }),
    ));
    let rr = r.clone();
    checks.push((
        Check { name: "euler_identity_failures", bound: Bound::AtMost(0.0), max_edges: None, planar: true },
        Box::new(move |rng| {
            let geom = DualGeometry::new(&rr)?;
            let ne = rr.n_edges();
            let masks: Vec<u64> = if ne <= VERIFY_MAX_EDGES {
                (0..1u64 << ne).collect()
            } else {
                (0..points.max(1) * 1000).map(|_| rng.random::<u64>() & ((1u64 << ne) - 1)).collect()
            };
            let mut bad = 0usize;
            for m in masks {
                bad += !geom.euler_identity_check(&EdgeConfig::from_mask(m, ne, false))? as usize;
            }
            Ok(bad as f64)
        }),
    ));
    let rr = r.clone();
    checks.push((
        Check { name: "contour_bound_fraction", bound: Bound::AtLeast(1.0), max_edges: None, planar: false },
        Box::new(move |_| {
            let edges = region_edges(&rr);
            let d = rr.dim();
            let kmax = if d == 2 { 10 } else { (2 * d + 4).min(10) };
            let cap = if d == 2 { DEFAULT_MAX_K_2D } else { 2 * d + 4 };
            let mut ok = 0;
            for k in 1..=kmax {
                ok += bound_check(&edges, k, cap)?.holds as usize;
            }
            Ok(ok as f64 / kmax as f64)
        }),
    ));
    checks.push((
        Check { name: "blocking_counts_k4_k5_k6_match", bound: Bound::AtLeast(1.0), max_edges: None, planar: true },
        Box::new(move |_| {
            let counts: Vec<usize> = [4, 5, 6]
                .iter()
                .map(|&k| enumerate_blocking(&[0, 0], k, DEFAULT_MAX_K_2D).map(|v| v.len()))
                .collect::<Result<_>>()?;
            Ok((counts == [1, 0, 4]) as u8 as f64)
        }),
    ));

    let mut report = Report::new(&[]);
    let mut failed = false;
    for (i, (check, run)) in checks.iter().enumerate() {
        let threshold = match check.bound {
            Bound::AtMost(t) | Bound::AtLeast(t) => t,
        };
        let skip = if check.planar && !planar {
            Some("needs d = 2".to_string())
        } else if check.max_edges.is_some_and(|m| ne > m) {
            Some(format!("{ne} edges exceed the per-point limit {}", check.max_edges.unwrap()))
        } else {
            None
        };
        let mut row = Row::exact(vec![], check.name, f64::NAN);
        row.threshold = Some(threshold);
        match skip {
            Some(reason) => row.note = Some(format!("skipped: {reason}")),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                match run(&mut rng) {
                    Ok(v) => {
                        let pass = match check.bound {
                            Bound::AtMost(t) => v <= t,
                            Bound::AtLeast(t) => v >= t,
                        };
                        failed |= !pass;
                        row.value = v;
                        row.pass = Some(pass);
                    }
                    Err(Error::CapExceeded(m)) => row.note = Some(format!("skipped: {m}")),
                    Err(e) => return Err(e),
                }
            }
        }
        report.rows.push(row);
    }
    report.extra.insert("passed".into(), json!(!failed));
    Ok(Outcome { report, svg: None, failed })
}

fn signs(s: &[i8]) -> String {
    s.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect()
}

fn bits(m: usize, n: usize) -> String {
    (0..n).map(|e| if m >> e & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn enumerate(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    let r = cfg.region()?;
    let law = cfg.law.clone().unwrap_or_else(|| "at".into());
    cfg.law = Some(law.clone());
    let bc = cfg.boundary("+,+")?;
    cfg.boundary = Some(format!("{},{}", bc[0], bc[1]));
    let interior: Vec<usize> = r.interior_vertices().collect();
    let pick = |s: &[i8]| -> Vec<i8> { interior.iter().map(|&v| s[v]).collect() };
    let (measure, labels): (EnumeratedMeasure, Vec<String>) = match law.as_str() {
        "at" => {
            let c = cfg.couplings()?;
            let l = at_law(&r, &c, &bc)?;
            let labels = (0..l.measure.len())
                .map(|i| {
                    let (a, b) = l.spins(i);
                    format!("s={} s'={}", signs(&pick(&a)), signs(&pick(&b)))
                })
                .collect();
            (l.measure, labels)
        }
        "gat" => {
            let c = cfg.couplings()?;
            let fill = bc[0].fill().ok_or_else(|| Error::Boundary("gat needs a first boundary + or f".into()))?;
            let m = gat_law(&r, &c, fill, &bc[1])?;
            let labels = (0..m.len()).map(|i| bits(i, r.n_edges())).collect();
            (m, labels)
        }
        "atrc" => {
            let c = cfg.couplings()?;
            let fills = [
                bc[0].fill().ok_or_else(|| Error::Boundary("atrc needs + or f".into()))?,
                bc[1].fill().ok_or_else(|| Error::Boundary("atrc needs + or f".into()))?,
            ];
            let m = atrc_law(&r, &c, fills)?;
            let ne = r.n_edges();
            let labels = (0..m.len())
                .map(|i| format!("w={} w'={}", bits(i & ((1 << ne) - 1), ne), bits(i >> ne, ne)))
                .collect();
            (m, labels)
        }
        "eightv" => {
            let c = cfg.couplings()?;
            let l = eightv_law(&r, &eight_vertex_weights(&c)?, &bc[1])?;
            let labels = (0..l.measure.len())
                .map(|i| {
                    let s = l.config(i);
                    format!("primal={} dual={}", signs(&pick(&s.primal)), signs(&s.dual))
                })
                .collect();
            (l.measure, labels)
        }
        "hf" => {
            let c = match (cfg.a_over_c, cfg.b_over_c) {
                (Some(a), Some(b)) => {
                    let (j, u) = six_vertex_couplings(a, b)?;
                    CouplingConstants::new(j, u, j)
                }
                _ => cfg.couplings()?,
            };
            let l = hf_law(&r, &eight_vertex_weights(&c)?, 0)?;
            let labels = l
                .heights
                .iter()
                .map(|h| {
                    let p: Vec<String> = interior.iter().map(|&v| h.primal[v].to_string()).collect();
                    format!("h={}", p.join(" "))
                })
                .collect();
            (l.measure, labels)
        }
        other => return Err(Error::Input(format!("unknown law '{other}'"))),
    };
    let mut report = Report::new(&["state"]);
    for i in 0..measure.len() {
        let mut row = Row::exact(params(&[("state", i as f64)]), "prob", measure.prob(i));
        row.note = Some(labels[i].clone());
        report.rows.push(row);
    }
    report.extra.insert("log_z".into(), json!(measure.log_z()));
    report.extra.insert("states".into(), json!(measure.len()));
    Ok(Outcome::plain(report, None))
}

fn needs_gat(obs: &[Observable]) -> bool {
    obs.iter().any(|o| matches!(o, Observable::Connection(_) | Observable::HoleDiameter | Observable::Height))
}

fn check_sampling(c: &CouplingConstants, obs: &[Observable]) -> Result<()> {
    if needs_gat(obs) && !regime_predicates(c).sampling_valid {
        return Err(Error::Parameters(
            "graphical-representation observables need K >= |K''|".into(),
        ));
    }
    Ok(())
}

pub fn sample(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    let r = cfg.region()?;
    let c = cfg.couplings()?;
    cfg.jp = Some(c.kp);
    let bc = cfg.boundary("+,+")?;
    cfg.boundary = Some(format!("{},{}", bc[0], bc[1]));
    let names = cfg.observables.clone().unwrap_or_else(|| "tau0,staggered_order".into());
    cfg.observables = Some(names.clone());
    let obs: Vec<Observable> = parse_list::<String>(&names)?.iter().map(|s| parse_observable(s)).collect::<Result<_>>()?;
    check_sampling(&c, &obs)?;
    let settings = cfg.resolve_chains()?;
    let run = run_chains(&r, &c, &bc, &settings, &obs)?;
    let p = params(&[("J", c.k), ("Jp", c.kp), ("U", c.kpp)]);
    let mut report = Report::new(&["J", "Jp", "U"]);
    for e in &run.estimates {
        report.rows.push(Row::mc(p.clone(), e.name.clone(), e.estimate));
    }
    report.extra.insert("regime".into(), json!(regime_predicates(&c)));
    Ok(Outcome::plain(report, None))
}

pub fn scan_curve(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    let curve = cfg.curve.clone().unwrap_or_else(|| "gamma".into());
    cfg.curve = Some(curve.clone());
    let backend = cfg.backend(Backend::Oracle)?;
    cfg.backend = Some(backend_name(backend).into());
    let d = cfg.d.unwrap_or(2);
    cfg.d = Some(d);
    let settings = if backend == Backend::Mcmc { cfg.resolve_chains()? } else { cfg.chain_settings()? };
    let mcmc = backend == Backend::Mcmc;
    match curve.as_str() {
        "gamma" => {
            let kappa = *cfg.kappa.get_or_insert(0.25);
            let kappa_p = *cfg.kappa_p.get_or_insert(0.5);
            let betas = parse_grid(cfg.betas.get_or_insert_with(|| "lin:0.05:0.95:19".into()))?;
            let ks: Vec<u32> = parse_list(cfg.ks.get_or_insert_with(|| "1".into()))?;
            let table = theta_scan(d, kappa, kappa_p, &betas, &ks, backend, &settings)?;
            let mut report = Report::new(&["beta", "k"]);
            for row in &table.rows {
                let p = params(&[("beta", row.beta), ("k", row.k as f64)]);
                report.rows.push(Row::from_estimate(p, "theta", row.value, mcmc && row.k > 0));
            }
            for &(b, s) in &table.sums {
                let mut row = Row::exact(params(&[("beta", b)]), "S", s);
                if mcmc {
                    row.backend = "mcmc";
                    row.estimator = "mc";
                }
                report.rows.push(row);
            }
            report.extra.insert("crossings".into(), json!(table.crossings));
            let mut series = Vec::new();
            for &k in &ks {
                let pts = table.rows.iter().filter(|r| r.k == k).map(|r| (r.beta, r.value.value)).collect();
                series.push((format!("theta_{k}"), pts));
            }
            let plot = svg::line_chart(&format!("theta_k along gamma({kappa}, {kappa_p})"), "beta", "theta_k", &series);
            Ok(Outcome::plain(report, Some(plot)))
        }
        "hat" => {
            let kappa = *cfg.kappa.get_or_insert(0.5);
            let ts = parse_grid(cfg.ts.get_or_insert_with(|| "log:0.25:4:10".into()))?;
            let n = *cfg.n.get_or_insert(1);
            let rows = edge_density_scan(d, kappa, &ts, n, backend, &settings)?;
            let mut report = Report::new(&["t"]);
            for row in &rows {
                let p = params(&[("t", row.t)]);
                report.rows.push(Row::from_estimate(p.clone(), "edge_density_plus_free", row.plus_free, mcmc));
                report.rows.push(Row::from_estimate(p.clone(), "edge_density_free_plus", row.free_plus, mcmc));
                report.rows.push(Row::from_estimate(p, "edge_density_sum", row.sum, mcmc));
            }
            let pts = rows.iter().map(|r| (r.t, r.sum.value)).collect();
            let plot = svg::line_chart(&format!("edge-density sum along hat-gamma({kappa})"), "t", "sum", &[("sum".into(), pts)]);
            Ok(Outcome::plain(report, Some(plot)))
        }
        other => Err(Error::Input(format!("unknown curve '{other}'"))),
    }
}

pub fn phase_map(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    let r = cfg.region()?;
    let bc = cfg.boundary("+,alt")?;
    cfg.boundary = Some(format!("{},{}", bc[0], bc[1]));
    let js = match (&cfg.j_grid, cfg.j) {
        (Some(g), _) => parse_grid(g)?,
        (None, Some(j)) => vec![j],
        (None, None) => return Err(Error::Parameters("give --J or --j-grid".into())),
    };
    let us = match (&cfg.u_grid, cfg.u) {
        (Some(g), _) => parse_grid(g)?,
        (None, Some(u)) => vec![u],
        (None, None) => return Err(Error::Parameters("give --U or --u-grid".into())),
    };
    let settings = cfg.resolve_chains()?;
    let obs = [Observable::StaggeredOrder, Observable::Tau];
    let mut report = Report::new(&["J", "U"]);
    let mut z = vec![vec![f64::NAN; js.len()]; us.len()];
    for (iu, &u) in us.iter().enumerate() {
        for (ij, &j) in js.iter().enumerate() {
            let c = CouplingConstants::at(j, cfg.jp.unwrap_or(j), u);
            let run = run_chains(&r, &c, &bc, &settings, &obs)?;
            let m = run.estimate("staggered_order").expect("recorded");
            let t = run.estimate("tau0").expect("recorded");
            let p = params(&[("J", j), ("U", u)]);
            report.rows.push(Row::mc(p.clone(), "staggered_order", m));
            report.rows.push(Row::mc(p.clone(), "tau0", t));
            report.rows.push(Row::mc(p, "abs_tau0", Estimate { value: t.value.abs(), stderr: t.stderr }));
            z[iu][ij] = m.value;
        }
    }
    let plot = svg::heatmap("staggered product order", "J", "U", &js, &us, &z);
    Ok(Outcome::plain(report, Some(plot)))
}

pub fn height_var(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    let a = *cfg.a_over_c.get_or_insert(0.05);
    let b = *cfg.b_over_c.get_or_insert(20.0);
    let (j, u) = six_vertex_couplings(a, b)?;
    let c = CouplingConstants::new(j, u, j);
    let w = eight_vertex_weights(&c)?;
    let ns: Vec<u32> = parse_list(cfg.ns.get_or_insert_with(|| "1".into()))?;
    let backend = cfg.backend(Backend::Mcmc)?;
    cfg.backend = Some(backend_name(backend).into());
    let settings = if backend == Backend::Mcmc { Some(cfg.resolve_chains()?) } else { None };
    let mut report = Report::new(&["n"]);
    let mut pts = Vec::new();
    for &n in &ns {
        let p = params(&[("n", n as f64)]);
        let est = match &settings {
            None => Estimate::exact(height_variance_exact(n, &w)?),
            Some(s) => {
                let r = Arc::new(Region::cube(2, n)?);
                let bc = [Bc::Free, Bc::alternating()];
                run_chains(&r, &c, &bc, s, &[Observable::Height])?
                    .estimate("var_h0")
                    .expect("recorded")
            }
        };
        report.rows.push(Row::from_estimate(p, "var_h0", est, settings.is_some()));
        pts.push((n as f64, est.value));
    }
    report.extra.insert("vertex_weights".into(), json!(w));
    let plot = svg::line_chart(&format!("Var(h_0), a/c = {a}, b/c = {b}"), "n", "Var(h_0)", &[("var_h0".into(), pts)]);
    Ok(Outcome::plain(report, Some(plot)))
}
