use std::sync::Arc;

use atlab::oracle::*;
use atlab::{BoundaryCondition as Bc, CouplingConstants, Region, SpinPair, VariableChange};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn block() -> Arc<Region> {
    Arc::new(Region::from_vertices(2, &[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap())
}

fn domino() -> Arc<Region> {
    Arc::new(Region::from_vertices(2, &[vec![0, 0], vec![1, 0]]).unwrap())
}

/// Random point with K ≥ |K''|.
fn dense_point(rng: &mut ChaCha8Rng) -> CouplingConstants {
    let k = rng.random_range(0.05..0.9);
    let kpp = rng.random_range(-k..k);
    CouplingConstants::new(k, rng.random_range(-0.8..0.8), kpp)
}

#[test]
fn gat_closed_form_matches_joint_marginal() {
    let r = block();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for eta in [Bc::Plus, Bc::Free] {
        for eta2 in [Bc::Plus, Bc::Free, Bc::alternating()] {
            for _ in 0..3 {
                let c = dense_point(&mut rng);
                let a = gat_law(&r, &c, eta.fill().unwrap(), &eta2).unwrap();
                let b = gat_law_from_joint(&r, &c, &eta, &eta2).unwrap();
                let tv = a.total_variation(&b).unwrap();
                assert!(tv < 1e-12, "{eta} {eta2} {c:?}: {tv}");
            }
        }
    }
}

#[test]
fn joint_marginal_recovers_at_law() {
    let r = domino();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let c = dense_point(&mut rng);
        let bc = [Bc::Plus, Bc::Free];
        let a = at_law(&r, &c, &bc).unwrap();
        let b = at_law_from_joint(&r, &c, &bc).unwrap();
        assert!(a.measure.total_variation(&b.measure).unwrap() < 1e-12);
    }
}

#[test]
fn fk_ising_special_case() {
    let r = block();
    let c = CouplingConstants::new(0.3, 0.0, 0.0);
    let gat = gat_law(&r, &c, false, &Bc::Free).unwrap();
    let p = 1.0 - (-0.6f64).exp();
    let fk: Vec<f64> = (0..1u64 << r.n_edges())
        .map(|m| {
            let k = r.cluster_count_mask(m, false) as i32;
            let o = m.count_ones() as i32;
            p.powi(o) * (1.0 - p).powi(r.n_edges() as i32 - o) * 2f64.powi(k)
        })
        .collect();
    let fk = EnumeratedMeasure::from_weights(gat.space().clone(), &fk).unwrap();
    assert!(gat.total_variation(&fk).unwrap() < 1e-12);
}

#[test]
fn atrc_marginals_are_gat_laws() {
    let r = block();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut done = 0;
    while done < 4 {
        let c = CouplingConstants::new(
            rng.random_range(0.05..0.8),
            rng.random_range(0.05..0.8),
            rng.random_range(-0.4..0.4),
        );
        if !atlab::weights::regime_predicates(&c).gat_fkg || c.kp < c.kpp.abs() {
            continue;
        }
        done += 1;
        for fills in [[true, false], [false, true], [true, true], [false, false]] {
            let eta = if fills[0] { Bc::Plus } else { Bc::Free };
            let eta2 = if fills[1] { Bc::Plus } else { Bc::Free };
            let (m1, m2) = atrc_marginals(&r, &c, fills).unwrap();
            let g1 = gat_law(&r, &c, fills[0], &eta2).unwrap();
            let g2 = gat_law(&r, &c.swapped(), fills[1], &eta).unwrap();
            assert!(m1.total_variation(&g1).unwrap() < 1e-12, "{c:?} {fills:?}");
            assert!(m2.total_variation(&g2).unwrap() < 1e-12, "{c:?} {fills:?}");
        }
    }
}

#[test]
fn atrc_pair_law_marginal_on_domino() {
    let r = domino();
    let c = CouplingConstants::new(0.5, 0.4, -0.05);
    let pair = atrc_law(&r, &c, [true, false]).unwrap();
    let n = 1usize << r.n_edges();
    let first = pair.pushforward(StateSpace::Edges { n_edges: r.n_edges(), fill: true }, n, |i| i % n).unwrap();
    let (m1, _) = atrc_marginals(&r, &c, [true, false]).unwrap();
    assert!(first.total_variation(&m1).unwrap() < 1e-13);
}

#[test]
fn change_of_variables_pushforward() {
    let r = block();
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let bc = [Bc::Plus, Bc::Plus];
    for _ in 0..20 {
        let c = CouplingConstants::new(
            rng.random_range(-0.6..0.6),
            rng.random_range(-0.6..0.6),
            rng.random_range(-0.6..0.6),
        );
        let law = at_law(&r, &c, &bc).unwrap();
        let c2 = SpinPair::transformed_couplings(&c, VariableChange::ProductSecond);
        let target = at_law(&r, &c2, &bc).unwrap();
        let pushed = law
            .measure
            .pushforward(target.measure.space().clone(), target.measure.len(), |idx| {
                let (s, s2) = law.spins(idx);
                let p: Vec<i8> = s.iter().zip(&s2).map(|(a, b)| a * b).collect();
                target.index(target.first.index_of(&s).unwrap(), target.second.index_of(&p).unwrap())
            })
            .unwrap();
        assert!(pushed.total_variation(&target.measure).unwrap() < 1e-12);
    }
}

#[test]
fn fkg_holds_in_regime() {
    let r = block();
    let rep = fkg_lattice_check_gat(&r, &CouplingConstants::new(0.5, 0.5, -0.05), true, &Bc::Free).unwrap();
    assert!(rep.pass, "{rep:?}");
    let rep = fkg_lattice_check_gat(&r, &CouplingConstants::new(0.3, 0.3, 0.3), true, &Bc::Plus).unwrap();
    assert!(rep.pass, "{rep:?}");
    let gat = gat_law(&r, &CouplingConstants::new(0.5, 0.5, -0.05), false, &Bc::Free).unwrap();
    assert!(fkg_lattice_check(&gat).unwrap().pass);
}

#[test]
fn finite_energy_on_block() {
    let r = block();
    let rep = finite_energy_check(&r, &CouplingConstants::new(0.4, 0.3, -0.1), true, &Bc::Free).unwrap();
    assert_eq!(rep.contexts, 12 << 11);
    assert!(rep.min_slack >= -1e-12);
}

#[test]
fn griffiths_adjacent_pair() {
    let r = block();
    let x = r.index_of(&[0, 0]).unwrap();
    let y = r.index_of(&[1, 0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let j = rng.random_range(0.0..0.8);
        let c = CouplingConstants::new(j, rng.random_range(-1.0..1.0), rng.random_range(-j..j));
        let rep = griffiths_check(&r, &c, &[x, y]).unwrap();
        assert!(rep.gap < 1e-12 && rep.spin >= -1e-12, "{rep:?}");
    }
}

#[test]
fn maximal_boundary_condition() {
    let small = Arc::new(Region::from_vertices(2, &[vec![0, 0]]).unwrap());
    let c = CouplingConstants::new(0.5, 0.45, -0.1);
    let rep = maximality_check(&small, &domino(), &c, 1 << 12, 1).unwrap();
    assert!(rep.exhaustive && rep.unconditioned);
    assert_eq!(rep.dominated, rep.contexts);
}

#[test]
fn site_correlation_observation() {
    let r = block();
    let x = r.index_of(&[0, 0]).unwrap();
    let (joint, product) = site_correlation(&r, &CouplingConstants::new(0.5, 0.4, -0.1), &[Bc::Plus, Bc::Plus], x).unwrap();
    assert!(joint <= product + 1e-12);
}
