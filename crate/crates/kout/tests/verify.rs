//! Behavioral invariants of the property checkers: positives survive edge
//! additions (the properties are monotone), and the heuristic stage never
//! contradicts the exact one.

use rand::seq::SliceRandom;

use kout::models::{sample_bipartite_gnp, sample_gnp};
use kout::verify::{
    has_k_matching, has_perfect_matching, is_connected, is_hamiltonian, rotation_budget,
};
use kout::{BipartiteGraph, Graph, Seed};

/// Grows `g` by a few uniformly chosen absent edges.
fn with_extra_edges(g: &Graph, extra: usize, seed: Seed) -> Graph {
    let n = g.n();
    let mut absent: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !g.has_edge(u, v))
        .collect();
    let mut rng = seed.rng();
    absent.shuffle(&mut rng);
    let mut edges = g.edges().to_vec();
    edges.extend(absent.into_iter().take(extra));
    Graph::from_edges(n, edges).unwrap()
}

fn with_extra_bipartite_edges(b: &BipartiteGraph, extra: usize, seed: Seed) -> BipartiteGraph {
    let mut absent: Vec<(usize, usize)> = (0..b.left())
        .flat_map(|l| (0..b.right()).map(move |r| (l, r)))
        .filter(|&(l, r)| !b.has_edge(l, r))
        .collect();
    let mut rng = seed.rng();
    absent.shuffle(&mut rng);
    let mut edges: Vec<(usize, usize)> = b.edges().collect();
    edges.extend(absent.into_iter().take(extra));
    BipartiteGraph::from_edges(b.left(), b.right(), edges).unwrap()
}

#[test]
fn connectivity_survives_edge_additions() {
    let root = Seed(0xc0).child("grow");
    let host = Graph::complete(12);
    for i in 0..1000 {
        let seed = root.child_idx(i);
        let g = sample_gnp(&host, 0.2, seed.child("base"));
        if is_connected(&g).holds() {
            let grown = with_extra_edges(&g, 4, seed.child("extra"));
            assert!(is_connected(&grown).holds(), "instance {i} lost connectivity");
        }
    }
}

#[test]
fn hamiltonicity_survives_edge_additions() {
    // n = 10 keeps the exact stage in reach, so no verdict is ever unknown
    // and monotonicity is checked against ground truth.
    let root = Seed(0xc1).child("grow");
    let host = Graph::complete(10);
    let mut positives = 0;
    for i in 0..1000 {
        let seed = root.child_idx(i);
        let g = sample_gnp(&host, 0.4, seed.child("base"));
        let before = is_hamiltonian(&g, rotation_budget(10));
        assert!(!before.is_unknown());
        if before.holds() {
            positives += 1;
            let grown = with_extra_edges(&g, 4, seed.child("extra"));
            let after = is_hamiltonian(&grown, rotation_budget(10));
            assert!(after.holds(), "instance {i} lost Hamiltonicity");
        }
    }
    assert!(positives >= 100, "sweep too lopsided to mean much: {positives}");
}

#[test]
fn perfect_matchings_survive_edge_additions() {
    let root = Seed(0xc2).child("grow");
    for i in 0..1000 {
        let seed = root.child_idx(i);
        let b = sample_bipartite_gnp(10, 10, 0.25, seed.child("base"));
        if has_perfect_matching(&b).unwrap().holds() {
            let grown = with_extra_bipartite_edges(&b, 4, seed.child("extra"));
            assert!(
                has_perfect_matching(&grown).unwrap().holds(),
                "instance {i} lost its perfect matching"
            );
        }
    }
}

#[test]
fn k_matchings_survive_edge_additions() {
    let root = Seed(0xc3).child("grow");
    for i in 0..1000 {
        let seed = root.child_idx(i);
        let b = sample_bipartite_gnp(6, 18, 0.3, seed.child("base"));
        if has_k_matching(&b, 2).unwrap().holds() {
            let grown = with_extra_bipartite_edges(&b, 4, seed.child("extra"));
            assert!(
                has_k_matching(&grown, 2).unwrap().holds(),
                "instance {i} lost its 2-matching"
            );
        }
    }
}

#[test]
fn heuristic_positives_match_exact_truth_on_small_graphs() {
    // Heuristic search can only confirm; on graphs small enough for the
    // exact stage the two answers must coincide exactly.
    let root = Seed(0xc4).child("sweep");
    for i in 0..1000 {
        let seed = root.child_idx(i);
        let n = 6 + (i as usize % 5);
        let p = 0.3 + 0.05 * (i % 7) as f64;
        let g = sample_gnp(&Graph::complete(n), p, seed);
        let budgeted = is_hamiltonian(&g, rotation_budget(n));
        let exact = is_hamiltonian(&g, 0);
        assert!(!budgeted.is_unknown());
        assert_eq!(
            budgeted.holds(),
            exact.holds(),
            "instance {i} (n = {n}, p = {p}) disagrees with ground truth"
        );
    }
}
