use std::sync::Arc;

use atlab::oracle::at_law;
use atlab::sampler::*;
use atlab::stats::{batch_estimate, MIN_BATCHES};
use atlab::{BoundaryCondition as Bc, CouplingConstants, Region};

fn settings(seed: u64) -> ChainSettings {
    ChainSettings { seed, chains: 4, sweeps: 2_000, burn_in: 200, thin: 2 }
}

#[test]
fn identical_seed_identical_chains_for_any_pool_size() {
    let r = Arc::new(Region::cube(2, 2).unwrap());
    let c = CouplingConstants::at(0.3, 0.2, -0.1);
    let bc = [Bc::Plus, Bc::Free];
    let obs = [Observable::Tau, Observable::EdgeDensity, Observable::Connection(1)];
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_chains(&r, &c, &bc, &settings(5), &obs).unwrap())
    };
    let (a, b) = (run(1), run(3));
    for (x, y) in a.chains.iter().zip(&b.chains) {
        assert_eq!(x.names, y.names);
        assert_eq!(x.data, y.data);
    }
    assert_eq!(a.estimates, b.estimates);
    let other = run_chains(&r, &c, &bc, &settings(6), &obs).unwrap();
    assert_ne!(a.chains[0].data, other.chains[0].data);
}

#[test]
fn chains_use_distinct_streams() {
    let r = Arc::new(Region::cube(2, 1).unwrap());
    let c = CouplingConstants::at(0.2, 0.2, 0.0);
    let res = run_chains(&r, &c, &[Bc::Free, Bc::Free], &settings(1), &[Observable::Tau]).unwrap();
    assert_ne!(res.chains[0].data, res.chains[1].data);
}

#[test]
fn free_boundary_has_zero_magnetisation() {
    let r = Arc::new(Region::cube(2, 2).unwrap());
    let c = CouplingConstants::at(0.3, 0.25, 0.1);
    let s = ChainSettings { seed: 8, chains: 8, sweeps: 20_000, burn_in: 1_000, thin: 5 };
    let res = run_chains(&r, &c, &[Bc::Free, Bc::Free], &s, &[Observable::Tau, Observable::TauPrime]).unwrap();
    for name in ["tau0", "tau0_prime"] {
        let e = res.estimate(name).unwrap();
        let se = e.stderr.unwrap();
        assert!(e.value.abs() <= 3.0 * se, "{name}: {} ± {se}", e.value);
    }
}

#[test]
fn sampled_connection_matches_spin_correlation() {
    let r = Arc::new(Region::cube(2, 1).unwrap());
    let c = CouplingConstants::at(0.35, 0.2, 0.1);
    let bc = [Bc::Plus, Bc::Plus];
    let o = r.origin().unwrap();
    let law = at_law(&r, &c, &bc).unwrap();
    let exact = law.expectation(|i, _| law.first.spin(i, o) as f64);

    let mut st = ChainState::new(r.clone(), &c, bc, 13, 0).unwrap();
    for _ in 0..1_000 {
        st.sweep();
    }
    let mut hits = Vec::new();
    for _ in 0..100_000 {
        st.sweep();
        let omega = sample_gat(&mut st).unwrap();
        hits.push(r.clusters(&omega).reaches_outside(o) as u8 as f64);
    }
    let e = batch_estimate(&hits, MIN_BATCHES * 4);
    let se = e.stderr.unwrap();
    assert!((e.value - exact).abs() <= 4.0 * se, "{} ± {se} vs {exact}", e.value);
}

#[test]
fn gat_samples_respect_closed_edges() {
    let r = Arc::new(Region::cube(2, 2).unwrap());
    let c = CouplingConstants::at(0.4, 0.1, -0.2);
    let mut st = ChainState::new(r.clone(), &c, [Bc::Free, Bc::alternating()], 2, 0).unwrap();
    for _ in 0..200 {
        st.sweep();
        let omega = sample_gat(&mut st).unwrap();
        let s = st.pair().s.clone();
        for e in 0..r.n_edges() {
            let (u, v) = r.edge(e);
            assert!(!(omega.is_open(e) && s[u] != s[v]));
        }
    }
}

#[test]
fn invalid_settings_rejected() {
    let r = Arc::new(Region::cube(2, 1).unwrap());
    let c = CouplingConstants::at(0.2, 0.2, 0.0);
    let mut s = settings(0);
    s.chains = 0;
    assert!(run_chains(&r, &c, &[Bc::Plus, Bc::Plus], &s, &[Observable::Tau]).is_err());
    let bad = CouplingConstants::new(0.1, 0.2, 0.5);
    let mut st = ChainState::new(r, &bad, [Bc::Plus, Bc::Plus], 0, 0).unwrap();
    assert!(sample_gat(&mut st).is_err());
}
