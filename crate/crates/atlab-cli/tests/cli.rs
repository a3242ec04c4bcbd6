use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn atlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atlab"))
        .args(args)
        .env_remove("ATLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn verify_on_block_passes() {
    let o = atlab(&["verify", "--region", "block2", "--points", "3", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json_out(&o);
    for key in ["format_version", "resolved_config", "results", "timing", "seed"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    assert!(doc["timing"].is_null());
    assert_eq!(doc["seed"], 7);
    let rows = doc["results"].as_array().unwrap();
    assert!(rows.len() >= 10);
    assert!(rows.iter().all(|r| r["pass"] == Value::Bool(true)));
}

#[test]
fn verify_skips_checks_beyond_edge_limit() {
    let o = atlab(&["verify", "--region", "d2n1", "--points", "2", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json_out(&o);
    let rows = doc["results"].as_array().unwrap();
    let euler = rows.iter().find(|r| r["observable"] == "euler_identity_failures").unwrap();
    assert_eq!(euler["value"], 0.0);
    assert!(rows.iter().any(|r| r["note"].as_str().is_some_and(|n| n.starts_with("skipped"))));
}

#[test]
fn empty_grid_gives_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = atlab(&["scan-curve", "--betas", "", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&dir.path().join("results.csv")), "beta,k,observable,value,stderr,backend,seed\n");
}

#[test]
fn config_errors_exit_two_with_json() {
    let o = atlab(&["sample", "--region", "hexagon", "--J", "0.1", "--U", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "region");
    assert_eq!(err["exit_code"], 2);

    let o = atlab(&["sample", "--region", "domino", "--J", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = atlab(&["sample", "--region", "domino", "--J", "0.1", "--U", "0", "--boundary", "+"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cap_violation_exits_four() {
    let o = atlab(&["height-var", "--backend", "oracle", "--ns", "2"]);
    assert_eq!(o.status.code(), Some(4));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "cap_exceeded");
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let args = |out: &str| -> Vec<String> {
        [
            "sample", "--region", "d2n2", "--J", "0.3", "--U", "-0.1", "--boundary", "+,f",
            "--observables", "tau0,edge_density,connect_1", "--chains", "4", "--sweeps", "400",
            "--burn-in", "50", "--thin", "2", "--seed", "3", "--out", out,
        ]
        .iter()
        .map(|s| s.to_string())
        .collect()
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let run = |out: &Path, threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_atlab"))
            .args(args(out.to_str().unwrap()))
            .env("ATLAB_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    };
    run(a.path(), "1");
    run(b.path(), "3");
    for f in ["results.csv", "results.json"] {
        assert_eq!(read(&a.path().join(f)), read(&b.path().join(f)), "{f}");
    }
    let csv = read(&a.path().join("results.csv"));
    assert!(csv.starts_with("J,Jp,U,observable,value,stderr,backend,seed\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "region = \"domino\"\nJ = 0.2\nU = 0.4\nboundary = \"+,+\"\nlaw = \"at\"\nseed = 11\n",
    )
    .unwrap();
    let o = atlab(&["enumerate", "--config", cfg.to_str().unwrap(), "--U", "-0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json_out(&o);
    assert_eq!(doc["resolved_config"]["U"], -0.1);
    assert_eq!(doc["resolved_config"]["J"], 0.2);
    assert_eq!(doc["seed"], 11);
    let total: f64 = doc["results"].as_array().unwrap().iter().map(|r| r["value"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert_eq!(doc["states"], 16);

    std::fs::write(&cfg, "nonsense = 1\n").unwrap();
    let o = atlab(&["enumerate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn enumerate_every_law_on_the_domino() {
    for law in ["at", "gat", "atrc", "eightv"] {
        let o = atlab(&["enumerate", "--region", "domino", "--law", law, "--J", "0.4", "--Jp", "0.3", "--U", "0.1", "--boundary", "+,+"]);
        assert_eq!(o.status.code(), Some(0), "{law}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = atlab(&["enumerate", "--region", "domino", "--law", "hf", "--a-over-c", "0.5", "--b-over-c", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json_out(&o)["states"], 4);
}

#[test]
fn phase_map_cell_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = atlab(&[
        "phase-map", "--d", "2", "--n", "4", "--J", "0.05", "--U", "-4", "--boundary", "+,alt",
        "--seed", "7", "--chains", "2", "--sweeps", "2000", "--burn-in", "200", "--out", out, "--svg",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json_out(&o);
    let m = doc["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["observable"] == "staggered_order")
        .unwrap();
    assert!(m["value"].as_f64().unwrap() >= 0.9);
    assert_eq!(m["estimator"], "mc");
    assert!(read(&dir.path().join("plot.svg")).contains("<rect x="));
}

#[test]
fn scan_curve_hat_and_timing() {
    let o = atlab(&["scan-curve", "--curve", "hat", "--kappa", "0.5", "--ts", "0.5,1,2,4", "--timing"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json_out(&o);
    assert!(doc["timing"]["wall_seconds"].as_f64().is_some());
    let sums: Vec<f64> = doc["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["observable"] == "edge_density_sum")
        .map(|r| r["value"].as_f64().unwrap())
        .collect();
    assert_eq!(sums.len(), 4);
    assert!(sums.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn height_var_oracle_at_n_one() {
    let o = atlab(&["height-var", "--backend", "oracle", "--ns", "1", "--a-over-c", "0.5", "--b-over-c", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json_out(&o);
    let row = &doc["results"][0];
    assert_eq!(row["estimator"], "exact");
    assert!(row["value"].as_f64().unwrap() > 0.0);
}
