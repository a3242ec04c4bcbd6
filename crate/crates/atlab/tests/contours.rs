use std::collections::{HashSet, VecDeque};

use atlab::contour::*;
use atlab::Region;

/// Breadth-first search from `start` avoiding `cut`, stopping at ℓ∞ radius `r`.
fn escapes(cut: &HashSet<LatticeEdge>, start: &[i32], r: i32) -> bool {
    let mut seen = HashSet::from([start.to_vec()]);
    let mut queue = VecDeque::from([start.to_vec()]);
    while let Some(v) = queue.pop_front() {
        if v.iter().any(|c| c.abs() >= r) {
            return true;
        }
        for a in 0..v.len() {
            for s in [-1, 1] {
                let mut w = v.clone();
                w[a] += s;
                let e = LatticeEdge::between(&v, &w).unwrap();
                if !cut.contains(&e) && seen.insert(w.clone()) {
                    queue.push_back(w);
                }
            }
        }
    }
    false
}

#[test]
fn contour_examples() {
    assert_eq!(contour_edges(&[vec![0, 0]]).unwrap().len(), 4);
    assert_eq!(contour_edges(&[vec![0, 0], vec![1, 0]]).unwrap().len(), 6);
    assert_eq!(contour_edges(&[vec![0, 0, 0]]).unwrap().len(), 6);
    assert!(contour_edges(&[]).is_err());
}

#[test]
fn blocking_sets_cut_witness_from_infinity() {
    for k in 4..=10 {
        for b in enumerate_blocking(&[0, 0], k, DEFAULT_MAX_K_2D).unwrap() {
            assert_eq!(b.edges.len(), k);
            assert!(b.witness.contains(&vec![0, 0]));
            let cut: HashSet<LatticeEdge> = b.edges.iter().cloned().collect();
            for w in &b.witness {
                assert!(!escapes(&cut, w, 2 * k as i32), "k = {k}: {b:?}");
            }
            assert!(separates(&b.edges, &[0, 0]));
        }
    }
}

#[test]
fn contour_sizes_are_even_and_at_least_2d() {
    for k in 1..=10 {
        let n = enumerate_blocking(&[0, 0], k, DEFAULT_MAX_K_2D).unwrap().len();
        if k < 4 || k % 2 == 1 {
            assert_eq!(n, 0, "k = {k}");
        } else {
            assert!(n > 0, "k = {k}");
        }
    }
    assert!(enumerate_blocking(&[0, 0, 0], 5, 10).unwrap().is_empty());
    assert_eq!(enumerate_blocking(&[0, 0, 0], 6, 10).unwrap().len(), 1);
}

#[test]
fn counts_grow_with_the_edge_set() {
    let small = region_edges(&Region::cube(2, 2).unwrap());
    let large = region_edges(&Region::cube(2, 3).unwrap());
    for k in [4, 6, 8] {
        let a = bound_check(&small, k, DEFAULT_MAX_K_2D).unwrap();
        let b = bound_check(&large, k, DEFAULT_MAX_K_2D).unwrap();
        assert!(a.count <= b.count && a.holds && b.holds, "k = {k}: {} vs {}", a.count, b.count);
    }
}

#[test]
fn bound_at_k4_on_b3() {
    let edges = region_edges(&Region::cube(2, 3).unwrap());
    let rep = bound_check(&edges, 4, DEFAULT_MAX_K_2D).unwrap();
    assert!(rep.holds);
    assert!((rep.count as f64) <= edges.len() as f64 * 6f64.powi(24));
    assert_eq!(plaquette_max_degree(&region_edges(&Region::cube(2, 2).unwrap())), 6);
    assert!(enumerate_blocking(&[0, 0], DEFAULT_MAX_K_2D + 1, DEFAULT_MAX_K_2D).is_err());
}
