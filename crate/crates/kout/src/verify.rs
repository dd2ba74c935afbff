//! Property checkers used as monotone-property oracles. Every positive
//! verdict for an existential property carries a certificate that has been
//! re-validated against the input; Hamiltonicity is the one checker that
//! may give up, and it says so instead of answering.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, ColoredGraph, Graph};
use crate::matching::{max_matching, KMatching, Matching};
use crate::seed::Seed;

/// How a verdict was reached. Heuristic search can only ever confirm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Heuristic,
}

/// Certificate attached to a verdict.
#[derive(Debug, Clone)]
pub enum Witness {
    Matching(Matching),
    KMatching(KMatching),
    /// Hamilton cycle as a vertex sequence; the closing edge is implicit.
    Cycle(Vec<usize>),
    /// A color carried by two distinct edges.
    DuplicateColor { color: u32, edges: [(usize, usize); 2] },
    /// An edge claimed by two of the parts.
    SharedEdge { edge: (usize, usize), parts: (usize, usize) },
    /// A single vertex certifying the verdict, e.g. one of degree < 2 for
    /// non-Hamiltonicity or an unreachable one for disconnection.
    Vertex(usize),
}

/// Three-state outcome: failing to find a certificate within budget is not
/// the same as disproof.
#[derive(Debug, Clone)]
pub enum Outcome {
    Holds(Witness),
    Fails(Option<Witness>),
    Unknown,
}

#[derive(Debug, Clone)]
pub struct PropertyVerdict {
    pub property: &'static str,
    pub outcome: Outcome,
    pub method: Method,
    pub budget_spent: usize,
}

impl PropertyVerdict {
    /// Conservative reading: only a certified positive counts.
    pub fn holds(&self) -> bool {
        matches!(self.outcome, Outcome::Holds(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self.outcome, Outcome::Unknown)
    }
}

/// Exact perfect-matching check on a balanced bipartite graph.
pub fn has_perfect_matching(b: &BipartiteGraph) -> Result<PropertyVerdict> {
    if b.left() != b.right() {
        return Err(Error::invalid(
            "b",
            format!("parts must match, got {} and {}", b.left(), b.right()),
        ));
    }
    let m = max_matching(b);
    let outcome = if m.len() == b.left() {
        for &(l, r) in &m.pairs {
            assert!(b.has_edge(l, r), "matching witness uses a non-edge");
        }
        Outcome::Holds(Witness::Matching(m))
    } else {
        Outcome::Fails(None)
    };
    Ok(PropertyVerdict {
        property: "perfect-matching",
        outcome,
        method: Method::Exact,
        budget_spent: 0,
    })
}

/// Exact perfect k-matching check: n vertex-disjoint k-stars covering every
/// left vertex. Reduces to a perfect matching after splitting each left
/// vertex into k copies.
pub fn has_k_matching(b: &BipartiteGraph, k: usize) -> Result<PropertyVerdict> {
    assert!(k >= 1, "k must be positive");
    if b.right() < k * b.left() {
        return Err(Error::invalid(
            "b",
            format!("right size {} cannot host {} k-stars", b.right(), b.left()),
        ));
    }
    let n = b.left();
    let mut split = BipartiteGraph::empty(k * n, b.right());
    for l in 0..n {
        for copy in 0..k {
            for &r in b.neighbors(l) {
                split.add_edge(l * k + copy, r).expect("split edges are fresh");
            }
        }
    }
    let m = max_matching(&split);
    let outcome = if m.len() == k * n {
        let mut stars = vec![Vec::new(); n];
        for &(l, r) in &m.pairs {
            stars[l / k].push(r);
        }
        for (l, star) in stars.iter_mut().enumerate() {
            star.sort_unstable();
            assert_eq!(star.len(), k);
            for &r in star.iter() {
                assert!(b.has_edge(l, r), "k-matching witness uses a non-edge");
            }
        }
        Outcome::Holds(Witness::KMatching(KMatching { stars }))
    } else {
        Outcome::Fails(None)
    };
    Ok(PropertyVerdict {
        property: "k-matching",
        outcome,
        method: Method::Exact,
        budget_spent: 0,
    })
}

/// Default rotation budget for [`is_hamiltonian`].
pub fn rotation_budget(n: usize) -> usize {
    50 * n * n
}

/// Staged Hamiltonicity check: cheap necessary conditions, then Posa
/// rotation-extension under `budget` steps, then exact search when the
/// graph is small enough (n <= 16). The heuristic never concludes absence;
/// past n = 16 a fruitless search reports `Unknown`.
pub fn is_hamiltonian(g: &Graph, budget: usize) -> PropertyVerdict {
    let n = g.n();
    assert!(n >= 3, "Hamiltonicity needs at least three vertices");
    let verdict = |outcome, method, spent| PropertyVerdict {
        property: "hamiltonian",
        outcome,
        method,
        budget_spent: spent,
    };

    if let Some(v) = (0..n).find(|&v| g.degree(v) < 2) {
        return verdict(Outcome::Fails(Some(Witness::Vertex(v))), Method::Exact, 0);
    }
    if let Outcome::Fails(w) = connectivity(g) {
        return verdict(Outcome::Fails(w), Method::Exact, 0);
    }

    let (found, spent) = posa_search(g, budget);
    if let Some(cycle) = found {
        validate_cycle(g, &cycle);
        return verdict(Outcome::Holds(Witness::Cycle(cycle)), Method::Heuristic, spent);
    }
    if n <= 16 {
        let outcome = match exact_hamilton_cycle(g) {
            Some(cycle) => {
                validate_cycle(g, &cycle);
                Outcome::Holds(Witness::Cycle(cycle))
            }
            None => Outcome::Fails(None),
        };
        return verdict(outcome, Method::Exact, spent);
    }
    verdict(Outcome::Unknown, Method::Heuristic, spent)
}

/// True iff the subset's colors are pairwise distinct. Edges must belong to
/// the colored graph.
pub fn is_rainbow(cg: &ColoredGraph, subset: &[(usize, usize)]) -> PropertyVerdict {
    let mut seen: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
    let mut outcome = Outcome::Holds(Witness::Vertex(0));
    for &(u, v) in subset {
        let color = cg
            .color_of(u, v)
            .unwrap_or_else(|| panic!("({u}, {v}) is not an edge of the colored graph"));
        if let Some(&other) = seen.get(&color) {
            outcome = Outcome::Fails(Some(Witness::DuplicateColor {
                color,
                edges: [other, (u, v)],
            }));
            break;
        }
        seen.insert(color, (u, v));
    }
    PropertyVerdict {
        property: "rainbow",
        outcome,
        method: Method::Exact,
        budget_spent: 0,
    }
}

/// True iff no edge is claimed by two parts.
pub fn are_edge_disjoint(parts: &[Graph]) -> PropertyVerdict {
    let mut owner: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut outcome = Outcome::Holds(Witness::Vertex(0));
    'scan: for (i, part) in parts.iter().enumerate() {
        for &(u, v) in part.edges() {
            if let Some(&j) = owner.get(&(u, v)) {
                outcome = Outcome::Fails(Some(Witness::SharedEdge {
                    edge: (u, v),
                    parts: (j, i),
                }));
                break 'scan;
            }
            owner.insert((u, v), i);
        }
    }
    PropertyVerdict {
        property: "edge-disjoint",
        outcome,
        method: Method::Exact,
        budget_spent: 0,
    }
}

/// Exact connectivity via breadth-first search.
pub fn is_connected(g: &Graph) -> PropertyVerdict {
    PropertyVerdict {
        property: "connected",
        outcome: connectivity(g),
        method: Method::Exact,
        budget_spent: 0,
    }
}

fn connectivity(g: &Graph) -> Outcome {
    let n = g.n();
    if n == 0 {
        return Outcome::Holds(Witness::Vertex(0));
    }
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    match seen.iter().position(|&s| !s) {
        None => Outcome::Holds(Witness::Vertex(0)),
        Some(v) => Outcome::Fails(Some(Witness::Vertex(v))),
    }
}

fn validate_cycle(g: &Graph, cycle: &[usize]) {
    assert_eq!(cycle.len(), g.n(), "cycle must visit every vertex");
    let mut seen = vec![false; g.n()];
    for &v in cycle {
        assert!(!seen[v], "cycle repeats vertex {v}");
        seen[v] = true;
    }
    for i in 0..cycle.len() {
        let u = cycle[i];
        let v = cycle[(i + 1) % cycle.len()];
        assert!(g.has_edge(u, v), "cycle uses non-edge ({u}, {v})");
    }
}

/// Posa rotation-extension: grow a path greedily, rotate on a random
/// endpoint neighbor when stuck, close when the path spans the graph and
/// its ends are adjacent. Internally seeded so verdicts are reproducible.
fn posa_search(g: &Graph, budget: usize) -> (Option<Vec<usize>>, usize) {
    let n = g.n();
    let mut rng = Seed(0x9e37_79b9_7f4a_7c15).rng();
    let mut spent = 0;
    let mut path: Vec<usize> = vec![0];
    let mut pos: Vec<Option<usize>> = vec![None; n];
    pos[0] = Some(0);

    while spent < budget {
        spent += 1;
        let end = *path.last().expect("path is never empty");
        if path.len() == n && g.has_edge(end, path[0]) {
            return (Some(path), spent);
        }
        if let Some(&next) = g.neighbors(end).iter().find(|&&w| pos[w].is_none()) {
            pos[next] = Some(path.len());
            path.push(next);
            continue;
        }
        // Rotate: pick a random neighbor u of the endpoint; reversing the
        // segment after u turns u's successor into the new endpoint.
        let candidates: Vec<usize> = g
            .neighbors(end)
            .iter()
            .copied()
            .filter(|&u| pos[u].map_or(false, |i| i + 1 < path.len() - 1))
            .collect();
        let Some(&u) = candidates.choose(&mut rng) else {
            // Dead end (possible on tiny or degenerate graphs): restart
            // from a fresh random vertex.
            for &v in &path {
                pos[v] = None;
            }
            let start = rng.gen_range(0..n);
            path = vec![start];
            pos[start] = Some(0);
            continue;
        };
        let at = pos[u].expect("candidate lies on the path");
        path[at + 1..].reverse();
        for (i, &v) in path.iter().enumerate().skip(at + 1) {
            pos[v] = Some(i);
        }
    }
    (None, spent)
}

/// Exact Hamilton-cycle search for n <= 16: subset dynamic programming over
/// endpoint sets, paths anchored at vertex 0.
fn exact_hamilton_cycle(g: &Graph) -> Option<Vec<usize>> {
    let n = g.n();
    assert!((3..=16).contains(&n), "exact search is capped at 16 vertices");
    let adj: Vec<u16> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u16, |m, &w| m | 1 << w))
        .collect();
    let full = if n == 16 { u16::MAX } else { (1u16 << n) - 1 };
    let mut ends = vec![0u16; 1usize << n];
    ends[1] = 1;
    for mask in 1..=full as usize {
        if mask & 1 == 0 || ends[mask] == 0 {
            continue;
        }
        let mut reach = ends[mask];
        while reach != 0 {
            let v = reach.trailing_zeros() as usize;
            reach &= reach - 1;
            let mut fresh = adj[v] & !(mask as u16);
            while fresh != 0 {
                let w = fresh.trailing_zeros() as usize;
                fresh &= fresh - 1;
                ends[mask | (1 << w)] |= 1 << w;
            }
        }
    }
    let closing = ends[full as usize] & adj[0];
    if closing == 0 {
        return None;
    }
    // Walk the table backwards to recover one cycle.
    let mut cycle = Vec::with_capacity(n);
    let mut mask = full as usize;
    let mut v = closing.trailing_zeros() as usize;
    while v != 0 {
        cycle.push(v);
        let prev_mask = mask & !(1 << v);
        let mut options = ends[prev_mask] & adj[v];
        assert!(options != 0, "table walk must stay on recorded paths");
        if prev_mask == 1 {
            options = 1;
        }
        mask = prev_mask;
        v = options.trailing_zeros() as usize;
    }
    cycle.push(0);
    cycle.reverse();
    Some(cycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::sample_kout;

    fn cycle_graph(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn perfect_matching_on_complete_and_starved_graphs() {
        let v = has_perfect_matching(&BipartiteGraph::complete(5, 5)).unwrap();
        assert!(v.holds());
        assert!(matches!(v.outcome, Outcome::Holds(Witness::Matching(ref m)) if m.len() == 5));

        let starved = BipartiteGraph::from_edges(3, 3, [(1, 0), (2, 1)]).unwrap();
        let v = has_perfect_matching(&starved).unwrap();
        assert!(!v.holds());
        assert!(has_perfect_matching(&BipartiteGraph::complete(2, 3)).is_err());
    }

    #[test]
    fn k_matching_on_disjoint_stars() {
        // Three disjoint 2-stars: the only k-matching is the graph itself.
        let b =
            BipartiteGraph::from_edges(3, 6, [(0, 0), (0, 1), (1, 2), (1, 3), (2, 4), (2, 5)])
                .unwrap();
        let v = has_k_matching(&b, 2).unwrap();
        assert!(v.holds());
        match v.outcome {
            Outcome::Holds(Witness::KMatching(km)) => {
                assert_eq!(km.stars, vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
            }
            other => panic!("expected a k-matching witness, got {other:?}"),
        }

        let v = has_k_matching(&BipartiteGraph::complete(4, 8), 2).unwrap();
        assert!(v.holds());

        // A left vertex of degree < k blocks any k-matching.
        let b = BipartiteGraph::from_edges(2, 4, [(0, 0), (0, 1), (0, 2), (1, 3)]).unwrap();
        assert!(!has_k_matching(&b, 2).unwrap().holds());
        assert!(has_k_matching(&BipartiteGraph::complete(3, 5), 2).is_err());
    }

    #[test]
    fn hamiltonicity_on_cycles_paths_and_complete_graphs() {
        for n in [3, 5, 8, 12, 30] {
            let v = is_hamiltonian(&cycle_graph(n), rotation_budget(n));
            assert!(v.holds(), "C_{n} is Hamiltonian");
            assert!(matches!(v.outcome, Outcome::Holds(Witness::Cycle(_))));
        }
        let path = Graph::from_edges(6, (0..5).map(|i| (i, i + 1))).unwrap();
        let v = is_hamiltonian(&path, rotation_budget(6));
        assert!(!v.holds());
        assert_eq!(v.method, Method::Exact);
        assert!(matches!(v.outcome, Outcome::Fails(Some(Witness::Vertex(_)))));

        let v = is_hamiltonian(&Graph::complete(9), rotation_budget(9));
        assert!(v.holds());
    }

    #[test]
    fn exact_search_settles_small_graphs() {
        // The Petersen graph: 3-regular, connected, famously not
        // Hamiltonian, and the heuristic alone cannot conclude that.
        let petersen = Graph::from_edges(
            10,
            [
                (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
                (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
                (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
            ],
        )
        .unwrap();
        let v = is_hamiltonian(&petersen, rotation_budget(10));
        assert!(!v.holds());
        assert_eq!(v.method, Method::Exact);
        assert!(matches!(v.outcome, Outcome::Fails(None)));

        // Deleting one Petersen vertex leaves a Hamiltonian graph; with a
        // zero budget only the exact stage can find the cycle.
        let trimmed = Graph::from_edges(
            9,
            petersen
                .edges()
                .iter()
                .filter(|&&(u, v)| u != 9 && v != 9)
                .copied(),
        )
        .unwrap();
        let v = is_hamiltonian(&trimmed, 0);
        assert!(v.holds());
        assert_eq!(v.method, Method::Exact);
    }

    #[test]
    fn large_disproof_is_reported_as_unknown() {
        // Two 10-cliques joined by one edge: connected, min degree 9, but
        // the bridge makes a Hamilton cycle impossible. At n = 20 the exact
        // stage is out of reach, so the checker must refuse to conclude.
        let mut edges = Vec::new();
        for u in 0..10 {
            for v in (u + 1)..10 {
                edges.push((u, v));
                edges.push((10 + u, 10 + v));
            }
        }
        edges.push((9, 10));
        let g = Graph::from_edges(20, edges).unwrap();
        let v = is_hamiltonian(&g, rotation_budget(20));
        assert!(!v.holds());
        assert!(v.is_unknown());
        assert_eq!(v.method, Method::Heuristic);
        assert!(v.budget_spent >= rotation_budget(20));
    }

    #[test]
    fn rainbow_and_disjointness_verdicts() {
        let g = Graph::complete(4);
        let colors = vec![1, 2, 3, 4, 5, 3];
        let cg = ColoredGraph::new(g.clone(), colors, 8).unwrap();
        let all = cg.graph().edges().to_vec();
        let v = is_rainbow(&cg, &all);
        assert!(!v.holds());
        match v.outcome {
            Outcome::Fails(Some(Witness::DuplicateColor { color, edges })) => {
                assert_eq!(color, 3);
                assert_eq!(cg.color_of(edges[0].0, edges[0].1), Some(3));
                assert_eq!(cg.color_of(edges[1].0, edges[1].1), Some(3));
            }
            other => panic!("expected a duplicate-color witness, got {other:?}"),
        }
        assert!(is_rainbow(&cg, &all[..5]).holds());
        assert!(is_rainbow(&cg, &[]).holds());

        let a = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let b = Graph::from_edges(4, [(0, 2)]).unwrap();
        let c = Graph::from_edges(4, [(1, 2), (0, 1)]).unwrap();
        assert!(are_edge_disjoint(&[a.clone(), b.clone()]).holds());
        assert!(are_edge_disjoint(&[a.clone()]).holds());
        let v = are_edge_disjoint(&[a, b, c]);
        match v.outcome {
            Outcome::Fails(Some(Witness::SharedEdge { edge, parts })) => {
                assert_eq!(edge, (0, 1));
                assert_eq!(parts, (0, 2));
            }
            other => panic!("expected a shared-edge witness, got {other:?}"),
        }
    }

    #[test]
    fn connectivity_verdicts() {
        assert!(is_connected(&cycle_graph(7)).holds());
        let split = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let v = is_connected(&split);
        assert!(matches!(v.outcome, Outcome::Fails(Some(Witness::Vertex(2)))));
    }

    #[test]
    fn heuristic_agrees_with_exact_on_small_sweeps() {
        // On <= 10 vertices every heuristic positive must be exact-true,
        // and exact-positive graphs should not stump the heuristic either.
        let mut disagreements = 0;
        for i in 0..300 {
            let g = sample_kout(&Graph::complete(8), 2, Seed(0x51ee7).child_idx(i))
                .unwrap()
                .result;
            let budgeted = is_hamiltonian(&g, rotation_budget(8));
            let exact_only = is_hamiltonian(&g, 0);
            assert_eq!(exact_only.method, Method::Exact);
            if budgeted.holds() != exact_only.holds() {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn three_out_bipartite_graphs_usually_have_perfect_matchings() {
        // Both sides choose: 3-out on a complete bipartite host. One-sided
        // choice would not do, since an unchosen right vertex stays
        // isolated with probability about (1 - k/n)^n.
        let host = Graph::from_edges(
            60,
            (0..30).flat_map(|u| (30..60).map(move |v| (u, v))),
        )
        .unwrap();
        let hits = (0..300)
            .filter(|&i| {
                let g = sample_kout(&host, 3, Seed(0x3001).child_idx(i)).unwrap().result;
                let b = BipartiteGraph::from_edges(
                    30,
                    30,
                    g.edges().iter().map(|&(u, v)| (u, v - 30)),
                )
                .unwrap();
                has_perfect_matching(&b).unwrap().holds()
            })
            .count();
        assert!(hits >= 295, "got {hits}/300");
    }
}
