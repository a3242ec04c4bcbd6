//! Experiment configuration: a TOML file merged with command-line flags.

use std::path::PathBuf;
use std::sync::Arc;

use atlab::curve::Backend;
use atlab::sampler::{ChainSettings, Observable};
use atlab::{BoundaryCondition, CouplingConstants, Error, Region, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

/// Every tunable of every subcommand. Unset fields fall back to the
/// subcommand defaults in [`ExperimentConfig::resolve`].
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// TOML file with any of the keys below; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Region: d<D>n<N> for the box B_N in dimension D (e.g. d2n4), block2, domino or site.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    /// Dimension of the box, when --region is not given.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Radius of the box, when --region is not given.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Boundary pair, e.g. "+,f" or "+,alt".
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<String>,

    #[arg(long = "J", allow_hyphen_values = true)]
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    /// Defaults to J.
    #[arg(long = "Jp", allow_hyphen_values = true)]
    #[serde(rename = "Jp", skip_serializing_if = "Option::is_none")]
    pub jp: Option<f64>,
    #[arg(long = "U", allow_hyphen_values = true)]
    #[serde(rename = "U", skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,

    /// oracle or mcmc.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chains: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweeps: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thin: Option<u64>,

    /// Random parameter points per check (verify).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Law to dump (enumerate): at, gat, atrc, eightv or hf.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<String>,
    /// Comma-separated observables (sample).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observables: Option<String>,

    /// gamma or hat (scan-curve).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_p: Option<f64>,
    /// Grid: "a,b,c", "lin:start:stop:count" or "log:start:stop:count".
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub betas: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ts: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_grid: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_grid: Option<String>,
    /// Radii (height-var).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ns: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_over_c: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_over_c: Option<f64>,

    /// Directory for results.csv, results.json and plot.svg.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    /// Also render an SVG plot into --out.
    #[arg(long, num_args = 0, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<bool>,
    /// Record wall-clock time in the JSON document.
    #[arg(long, num_args = 0, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<bool>,
    /// Worker threads.
    #[arg(long, env = "ATLAB_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl ExperimentConfig {
    /// Reads --config (if any) and lays the flags over it.
    pub fn load(flags: &ExperimentConfig) -> Result<ExperimentConfig> {
        let mut base = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
                toml::from_str(&text).map_err(|e| Error::Input(format!("bad config file: {e}")))?
            }
            None => ExperimentConfig::default(),
        };
        overlay!(base, flags; config, region, d, n, boundary, j, jp, u, backend, seed, chains,
            sweeps, burn_in, thin, points, law, observables, curve, kappa, kappa_p, betas, ts, ks,
            j_grid, u_grid, ns, a_over_c, b_over_c, out, svg, timing, threads);
        Ok(base)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn chain_settings(&self) -> Result<ChainSettings> {
        let d = ChainSettings::default();
        let s = ChainSettings {
            seed: self.seed(),
            chains: self.chains.unwrap_or(d.chains),
            sweeps: self.sweeps.unwrap_or(d.sweeps),
            burn_in: self.burn_in.unwrap_or(d.burn_in),
            thin: self.thin.unwrap_or(d.thin),
        };
        s.validate()?;
        Ok(s)
    }

    /// Fills the chain schedule into the config so that it is echoed.
    pub fn resolve_chains(&mut self) -> Result<ChainSettings> {
        let s = self.chain_settings()?;
        self.seed = Some(s.seed);
        self.chains = Some(s.chains);
        self.sweeps = Some(s.sweeps);
        self.burn_in = Some(s.burn_in);
        self.thin = Some(s.thin);
        Ok(s)
    }

    pub fn region(&self) -> Result<Arc<Region>> {
        let spec = match (&self.region, self.d, self.n) {
            (Some(r), _, _) => r.clone(),
            (None, Some(d), Some(n)) => format!("d{d}n{n}"),
            _ => return Err(Error::Region("give --region or both --d and --n".into())),
        };
        parse_region(&spec).map(Arc::new)
    }

    pub fn boundary(&self, default: &str) -> Result<[BoundaryCondition; 2]> {
        parse_boundary(self.boundary.as_deref().unwrap_or(default))
    }

    /// (J, J', U) in the Ashkin-Teller roles; J' defaults to J.
    pub fn couplings(&self) -> Result<CouplingConstants> {
        let j = self.j.ok_or_else(|| Error::Parameters("--J is required".into()))?;
        let u = self.u.ok_or_else(|| Error::Parameters("--U is required".into()))?;
        let jp = self.jp.unwrap_or(j);
        check_finite(&[j, jp, u])?;
        Ok(CouplingConstants::at(j, jp, u))
    }

    pub fn backend(&self, default: Backend) -> Result<Backend> {
        match self.backend.as_deref() {
            None => Ok(default),
            Some("oracle") => Ok(Backend::Oracle),
            Some("mcmc") => Ok(Backend::Mcmc),
            Some(other) => Err(Error::Input(format!("unknown backend '{other}'"))),
        }
    }
}

pub fn check_finite(xs: &[f64]) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Parameters("parameters must be finite".into()))
    }
}

pub fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Oracle => "oracle",
        Backend::Mcmc => "mcmc",
    }
}

pub fn parse_region(spec: &str) -> Result<Region> {
    let square = |pts: &[[i32; 2]]| {
        let v: Vec<Vec<i32>> = pts.iter().map(|p| p.to_vec()).collect();
        Region::from_vertices(2, &v)
    };
    match spec {
        "site" => square(&[[0, 0]]),
        "domino" => square(&[[0, 0], [1, 0]]),
        "block2" => square(&[[0, 0], [1, 0], [0, 1], [1, 1]]),
        s => {
            let bad = || Error::Region(format!("unknown region '{s}'"));
            let rest = s.strip_prefix('d').ok_or_else(bad)?;
            let (d, n) = rest.split_once('n').ok_or_else(bad)?;
            let d: usize = d.parse().map_err(|_| bad())?;
            let n: u32 = n.parse().map_err(|_| bad())?;
            Region::cube(d, n)
        }
    }
}

pub fn parse_boundary(spec: &str) -> Result<[BoundaryCondition; 2]> {
    let (a, b) = spec
        .split_once(',')
        .ok_or_else(|| Error::Boundary(format!("expected a pair like '+,f', got '{spec}'")))?;
    Ok([a.parse()?, b.parse()?])
}

/// "a,b,c", "lin:start:stop:count" (inclusive) or "log:start:stop:count".
/// The empty string is the empty grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let bad = || Error::Input(format!("bad grid '{spec}'"));
    if let Some((kind, rest)) = spec.split_once(':') {
        let parts: Vec<&str> = rest.split(':').collect();
        let [a, b, n] = parts[..] else { return Err(bad()) };
        let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
        let n: usize = n.parse().map_err(|_| bad())?;
        let at = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        let xs: Vec<f64> = match kind {
            "lin" => (0..n).map(|i| a + (b - a) * at(i)).collect(),
            "log" if a > 0.0 && b > 0.0 => (0..n).map(|i| a * (b / a).powf(at(i))).collect(),
            _ => return Err(bad()),
        };
        check_finite(&xs)?;
        return Ok(xs);
    }
    let xs: Vec<f64> = spec
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    check_finite(&xs)?;
    Ok(xs)
}

pub fn parse_list<T: std::str::FromStr>(spec: &str) -> Result<Vec<T>> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|x| x.parse().map_err(|_| Error::Input(format!("bad list entry '{x}'"))))
        .collect()
}

pub fn parse_observable(name: &str) -> Result<Observable> {
    Ok(match name {
        "tau0" => Observable::Tau,
        "tau0_prime" => Observable::TauPrime,
        "tau0_tau0_prime" | "product" => Observable::Product,
        "staggered_order" => Observable::StaggeredOrder,
        "magnetization" => Observable::Magnetization,
        "height" | "h0" => Observable::Height,
        "max_hole_diameter" => Observable::HoleDiameter,
        "edge_density" => Observable::EdgeDensity,
        other => match other.strip_prefix("connect_").map(str::parse) {
            Some(Ok(k)) => Observable::Connection(k),
            _ => return Err(Error::Input(format!("unknown observable '{other}'"))),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("").unwrap(), Vec::<f64>::new());
        assert_eq!(parse_grid("0.5, 1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        assert_eq!(parse_grid("lin:0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        let g = parse_grid("log:1:100:3").unwrap();
        assert!((g[1] - 10.0).abs() < 1e-12);
        assert!(parse_grid("lin:0:1").is_err());
        assert!(parse_grid("x").is_err());
    }

    #[test]
    fn regions() {
        assert_eq!(parse_region("d2n1").unwrap().interior_len(), 9);
        assert_eq!(parse_region("d3n1").unwrap().interior_len(), 27);
        assert_eq!(parse_region("domino").unwrap().interior_len(), 2);
        assert!(parse_region("d2").is_err());
        assert!(parse_region("hexagon").is_err());
    }

    #[test]
    fn boundaries() {
        let [a, b] = parse_boundary("+,alt").unwrap();
        assert_eq!(a, BoundaryCondition::Plus);
        assert_eq!(b, BoundaryCondition::alternating());
        assert!(parse_boundary("+").is_err());
    }

    #[test]
    fn file_then_flags() {
        let dir = std::env::temp_dir().join(format!("atlab-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.toml");
        std::fs::write(&path, "J = 0.3\nU = -0.1\nseed = 5\n").unwrap();
        let flags = ExperimentConfig {
            config: Some(path),
            u: Some(-0.2),
            ..Default::default()
        };
        let c = ExperimentConfig::load(&flags).unwrap();
        assert_eq!((c.j, c.u, c.seed), (Some(0.3), Some(-0.2), Some(5)));
        std::fs::remove_dir_all(dir).unwrap();
    }
}
