//! Random-graph samplers.
//!
//! Every sampler is a pure function of (parameters, seed): it derives
//! named child seeds for each internal stream, so outputs are bit-stable
//! across runs and across unrelated code changes.
//!
//! Models on a host graph `G`:
//!
//! * `sample_gnp`: keep each edge independently with probability `p`.
//! * `sample_colored`: as above, plus an i.i.d. uniform color per kept
//!   edge.
//! * `sample_kout`: every vertex picks `k` distinct neighbors uniformly;
//!   the union (deduplicated) is the sample.
//! * `sample_kout_star`: orient `G` uniformly at random, then every
//!   vertex picks `min(k, d⁺)` of its out-edges uniformly.
//! * `sample_kout_hat`: vertices claim unclaimed incident edges in a
//!   uniformly random vertex order.
//! * `sample_coupled`: one pass that realizes the star model exactly
//!   while agreeing with the hat model whenever the produced orientation
//!   gives every vertex out-degree at least `k`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, ColoredGraph, Graph, Orientation};
use crate::seed::Seed;

/// A k-out style sample: the undirected result plus the per-vertex pick
/// lists (the arcs before forgetting directions). Pick lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KOutSample {
    pub result: Graph,
    pub chosen: Vec<Vec<usize>>,
}

impl KOutSample {
    fn from_chosen(n: usize, mut chosen: Vec<Vec<usize>>) -> KOutSample {
        for list in &mut chosen {
            list.sort_unstable();
        }
        let mut pairs: Vec<(usize, usize)> = chosen
            .iter()
            .enumerate()
            .flat_map(|(x, ys)| ys.iter().map(move |&y| (x.min(y), x.max(y))))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let result = Graph::from_edges(n, pairs).expect("picks are host edges");
        KOutSample { result, chosen }
    }
}

/// Output of [`sample_coupled`]: the star-model sample `h_star`, the
/// orientation that was built alongside it, and `h_hat`, which is the
/// same edge set read as a hat-model sample whenever that reading is
/// valid (`agreed`). `agreed` is false exactly when some vertex ended up
/// with fewer than `k` out-edges.
#[derive(Debug, Clone)]
pub struct CouplingOutcome {
    pub h_star: Graph,
    pub h_hat: Option<Graph>,
    pub agreed: bool,
    pub orientation: Orientation,
}

/// Keeps each edge of `g` independently with probability `p`.
pub fn sample_gnp(g: &Graph, p: f64, seed: Seed) -> Graph {
    assert!((0.0..=1.0).contains(&p), "p must lie in [0, 1]");
    let mut rng = seed.child("gnp").rng();
    let kept: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .copied()
        .filter(|_| rng.gen_bool(p))
        .collect();
    Graph::from_edges(g.n(), kept).expect("subset of host edges")
}

/// Keeps each edge with probability `p` and colors every kept edge with
/// an i.i.d. uniform color from `[1, c]`.
pub fn sample_colored(g: &Graph, p: f64, c: u32, seed: Seed) -> ColoredGraph {
    assert!((0.0..=1.0).contains(&p), "p must lie in [0, 1]");
    assert!(c >= 1, "palette must be nonempty");
    let mut keep_rng = seed.child("gnp").rng();
    let mut color_rng = seed.child("colors").rng();
    let mut kept = Vec::new();
    let mut colors = Vec::new();
    for &(u, v) in g.edges() {
        if keep_rng.gen_bool(p) {
            kept.push((u, v));
            colors.push(color_rng.gen_range(1..=c));
        }
    }
    // Kept edges stay in canonical order, so the color vector is already
    // parallel to the subgraph's edge list.
    let graph = Graph::from_edges(g.n(), kept).expect("subset of host edges");
    ColoredGraph::new(graph, colors, c).expect("colors drawn from the palette")
}

/// Every vertex picks a uniform `k`-subset of its neighbors; the result
/// is the union of all picks with directions and duplicates forgotten.
pub fn sample_kout(g: &Graph, k: usize, seed: Seed) -> Result<KOutSample> {
    if k > g.min_degree() {
        return Err(Error::invalid(
            "k",
            format!("k = {k} exceeds the minimum degree {}", g.min_degree()),
        ));
    }
    let per_vertex = seed.child("kout");
    let chosen = (0..g.n())
        .map(|x| {
            let mut rng = per_vertex.child_idx(x).rng();
            let nbrs = g.neighbors(x);
            rand::seq::index::sample(&mut rng, nbrs.len(), k)
                .iter()
                .map(|i| nbrs[i])
                .collect()
        })
        .collect();
    Ok(KOutSample::from_chosen(g.n(), chosen))
}

/// Orients every edge of `g` by an independent fair coin.
pub fn random_orientation(g: &Graph, seed: Seed) -> Orientation {
    let mut rng = seed.rng();
    let outward = (0..g.edge_count()).map(|_| rng.gen_bool(0.5)).collect();
    Orientation::new(g.clone(), outward).expect("one direction per edge")
}

/// Star model: orient uniformly at random, then every vertex picks
/// `min(k, d⁺)` of its out-edges uniformly.
pub fn sample_kout_star(g: &Graph, k: usize, seed: Seed) -> KOutSample {
    sample_kout_star_with_orientation(g, k, seed).0
}

/// As [`sample_kout_star`], also returning the sampled orientation.
pub fn sample_kout_star_with_orientation(
    g: &Graph,
    k: usize,
    seed: Seed,
) -> (KOutSample, Orientation) {
    assert!(k >= 1, "k must be positive");
    let orientation = random_orientation(g, seed.child("orient"));
    let per_vertex = seed.child("pick");
    let chosen = (0..g.n())
        .map(|x| {
            let mut rng = per_vertex.child_idx(x).rng();
            let outs = orientation.out_neighbors(x);
            let t = k.min(outs.len());
            rand::seq::index::sample(&mut rng, outs.len(), t)
                .iter()
                .map(|i| outs[i])
                .collect()
        })
        .collect();
    let sample = KOutSample::from_chosen(g.n(), chosen);
    (sample, orientation)
}

/// Hat model: process vertices in a uniformly random order; each picks
/// `min(k, available)` of its not-yet-picked incident edges uniformly.
/// Late vertices may find everything claimed and pick nothing.
pub fn sample_kout_hat(g: &Graph, k: usize, seed: Seed) -> Graph {
    assert!(k >= 1, "k must be positive");
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.shuffle(&mut seed.child("sigma").rng());
    let per_vertex = seed.child("pick");
    let mut claimed = vec![false; g.edge_count()];
    let mut edges = Vec::new();
    for &x in &order {
        let pool: Vec<usize> = g
            .neighbors(x)
            .iter()
            .copied()
            .filter(|&y| !claimed[g.edge_index(x, y).expect("host edge")])
            .collect();
        let t = k.min(pool.len());
        let mut rng = per_vertex.child_idx(x).rng();
        for i in rand::seq::index::sample(&mut rng, pool.len(), t).iter() {
            let y = pool[i];
            claimed[g.edge_index(x, y).expect("host edge")] = true;
            edges.push((x.min(y), x.max(y)));
        }
    }
    Graph::from_edges(g.n(), edges).expect("claims are distinct host edges")
}

/// Joint sampler for the hat and star models.
///
/// Vertices are processed in a random order. Each vertex `x` scans its
/// still-unclaimed neighbors in a fresh random order and claims scanned
/// edges that are (or get coin-flipped to be) oriented away from `x`,
/// stopping after `k` claims. A no-claim flip orients the edge toward
/// `x`, leaving it for the neighbor to claim later. Edges nobody scanned
/// are oriented by fresh fair coins at the end.
///
/// The claimed edge set is exactly a star-model sample with respect to
/// the produced orientation. When every vertex ends with out-degree at
/// least `k`, every scan stopped at `k` claims, which makes the same run
/// a valid hat-model execution: that is the `agreed` event.
pub fn sample_coupled(g: &Graph, k: usize, seed: Seed) -> CouplingOutcome {
    assert!(k >= 1, "k must be positive");
    let n = g.n();
    let m = g.edge_count();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed.child("sigma").rng());

    // One fair coin per undirected edge, read antisymmetrically: the
    // coin tells the canonical low endpoint whether the edge points away
    // from it, and the high endpoint sees the complement. Reading the
    // same coin from both sides is what keeps the scan consistent with
    // the orientation it builds.
    let mut coin_rng = seed.child("coin").rng();
    let coins: Vec<bool> = (0..m).map(|_| coin_rng.gen_bool(0.5)).collect();

    // dir[e] = Some(true) orients the canonical edge (u, v) as u -> v.
    let mut dir: Vec<Option<bool>> = vec![None; m];
    let mut claimed_by: Vec<Option<usize>> = vec![None; m];
    let mut chosen: Vec<Vec<usize>> = vec![Vec::new(); n];
    let per_vertex = seed.child("pi");

    for &x in &order {
        // Unclaimed incident edges; claims by earlier vertices point
        // toward x and are never claimable by x.
        let mut pool: Vec<usize> = g
            .neighbors(x)
            .iter()
            .copied()
            .filter(|&y| claimed_by[g.edge_index(x, y).expect("host edge")].is_none())
            .collect();
        pool.shuffle(&mut per_vertex.child_idx(x).rng());

        let mut claims = 0;
        for &y in &pool {
            if claims == k {
                break;
            }
            let e = g.edge_index(x, y).expect("host edge");
            let away = match dir[e] {
                Some(d) => {
                    // A pre-oriented unclaimed edge was oriented toward
                    // the scanner of an earlier no-claim event, so it
                    // always points away from x now.
                    assert_eq!(d, x < y, "unclaimed pre-oriented edge points toward scanner");
                    true
                }
                None => {
                    let away = if x < y { coins[e] } else { !coins[e] };
                    dir[e] = Some(if away { x < y } else { y < x });
                    away
                }
            };
            if away {
                claims += 1;
                chosen[x].push(y);
                claimed_by[e] = Some(x);
            }
        }
    }

    // Edges no scan ever touched get independent fair directions.
    let mut complete_rng = seed.child("complete").rng();
    let outward: Vec<bool> = dir
        .into_iter()
        .map(|d| d.unwrap_or_else(|| complete_rng.gen_bool(0.5)))
        .collect();
    let orientation = Orientation::new(g.clone(), outward).expect("one direction per edge");

    // Star-model shape: every vertex claimed min(k, d⁺) of its out-edges.
    for x in 0..n {
        assert_eq!(
            chosen[x].len(),
            k.min(orientation.out_degree(x)),
            "claim count differs from min(k, out-degree) at vertex {x}"
        );
    }
    let agreed = orientation.min_out_degree() >= k;

    let h_star = Graph::from_edges(
        n,
        g.edges()
            .iter()
            .enumerate()
            .filter(|&(e, _)| claimed_by[e].is_some())
            .map(|(_, &uv)| uv),
    )
    .expect("claims are distinct host edges");
    let h_hat = agreed.then(|| h_star.clone());

    CouplingOutcome {
        h_star,
        h_hat,
        agreed,
        orientation,
    }
}

/// Bipartite k-out: each of the `a` left vertices picks a uniform
/// `k`-subset of the `b` right vertices.
pub fn sample_left_kout(a: usize, b: usize, k: usize, seed: Seed) -> Result<BipartiteGraph> {
    if k > b {
        return Err(Error::invalid(
            "k",
            format!("k = {k} exceeds the right class size {b}"),
        ));
    }
    let per_vertex = seed.child("pick");
    let mut g = BipartiteGraph::empty(a, b);
    for l in 0..a {
        let mut rng = per_vertex.child_idx(l).rng();
        for r in rand::seq::index::sample(&mut rng, b, k).iter() {
            g.add_edge(l, r).expect("distinct picks");
        }
    }
    Ok(g)
}

/// Bipartite binomial model: each of the `a·b` possible edges is present
/// independently with probability `p`.
pub fn sample_bipartite_gnp(a: usize, b: usize, p: f64, seed: Seed) -> BipartiteGraph {
    assert!((0.0..=1.0).contains(&p), "p must lie in [0, 1]");
    let mut rng = seed.child("gnp").rng();
    let mut g = BipartiteGraph::empty(a, b);
    for l in 0..a {
        for r in 0..b {
            if rng.gen_bool(p) {
                g.add_edge(l, r).expect("first visit to this pair");
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnp_extremes() {
        let g = Graph::complete(5);
        assert_eq!(sample_gnp(&g, 1.0, Seed(1)), g);
        assert_eq!(sample_gnp(&g, 0.0, Seed(1)).edge_count(), 0);
    }

    #[test]
    fn colored_extremes() {
        let g = Graph::complete(4);
        let one = sample_colored(&g, 1.0, 1, Seed(3));
        assert!(one.colors().iter().all(|&c| c == 1));
        assert_eq!(sample_colored(&g, 0.0, 5, Seed(3)).graph().edge_count(), 0);
        let c = sample_colored(&g, 0.7, 9, Seed(8));
        assert!(c.graph().is_subgraph_of(&g));
    }

    #[test]
    fn kout_small_cases() {
        let k2 = Graph::complete(2);
        for s in 0..20 {
            assert_eq!(sample_kout(&k2, 1, Seed(s)).unwrap().result, k2);
        }
        let k5 = Graph::complete(5);
        assert_eq!(sample_kout(&k5, 4, Seed(0)).unwrap().result, k5);
        assert!(sample_kout(&k5, 5, Seed(0)).is_err());
    }

    #[test]
    fn kout_pick_lists_are_valid() {
        let g = Graph::complete_bipartite(4, 6);
        let s = sample_kout(&g, 3, Seed(11)).unwrap();
        for (x, ys) in s.chosen.iter().enumerate() {
            assert_eq!(ys.len(), 3);
            let mut sorted = ys.clone();
            sorted.dedup();
            assert_eq!(&sorted, ys, "picks must be distinct and sorted");
            assert!(ys.iter().all(|&y| g.has_edge(x, y)));
        }
        assert!(s.result.is_subgraph_of(&g));
    }

    #[test]
    fn star_owned_edges_forced() {
        // K_2: whichever endpoint owns the edge must pick it.
        let k2 = Graph::complete(2);
        for s in 0..20 {
            assert_eq!(sample_kout_star(&k2, 1, Seed(s)).result, k2);
        }
        // K_3 with k = 2: every owner has out-degree at most 2, so every
        // edge is picked no matter the orientation.
        let k3 = Graph::complete(3);
        for s in 0..200 {
            assert_eq!(sample_kout_star(&k3, 2, Seed(s)).result, k3);
        }
    }

    #[test]
    fn star_picks_match_orientation() {
        let g = Graph::complete(7);
        for s in 0..50 {
            let (sample, o) = sample_kout_star_with_orientation(&g, 2, Seed(s));
            for x in 0..7 {
                assert_eq!(sample.chosen[x].len(), 2.min(o.out_degree(x)));
                assert!(sample.chosen[x].iter().all(|&y| o.points(x, y)));
            }
        }
    }

    #[test]
    fn hat_small_cases() {
        let k2 = Graph::complete(2);
        let k3 = Graph::complete(3);
        for s in 0..200 {
            assert_eq!(sample_kout_hat(&k2, 1, Seed(s)), k2);
            // First vertex takes both its edges, an endpoint of the last
            // edge still has quota: K_3 is always complete.
            assert_eq!(sample_kout_hat(&k3, 2, Seed(s)), k3);
        }
    }

    #[test]
    fn coupled_k2_always_splits_ownership() {
        // The single edge gets claimed by whichever endpoint it points
        // away from, and the other endpoint is left with out-degree 0,
        // so the run never counts as a valid hat execution.
        let k2 = Graph::complete(2);
        for s in 0..50 {
            let out = sample_coupled(&k2, 1, Seed(s));
            assert_eq!(out.h_star, k2);
            assert!(!out.agreed);
            assert!(out.h_hat.is_none());
        }
    }

    #[test]
    fn coupled_invariants_on_random_hosts() {
        let hosts = [
            Graph::complete(6),
            Graph::complete_bipartite(3, 4),
            Graph::from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (1, 4)]).unwrap(),
        ];
        for g in &hosts {
            for k in 1..=3 {
                for s in 0..100 {
                    let out = sample_coupled(g, k, Seed(7_000 + s));
                    assert!(out.h_star.is_subgraph_of(g));
                    assert_eq!(out.agreed, out.orientation.min_out_degree() >= k);
                    match &out.h_hat {
                        Some(h) => {
                            assert!(out.agreed);
                            assert_eq!(h, &out.h_star);
                        }
                        None => assert!(!out.agreed),
                    }
                }
            }
        }
    }

    #[test]
    fn left_kout_shapes() {
        let g = sample_left_kout(1, 3, 3, Seed(0)).unwrap();
        assert_eq!(g.edge_count(), 3);
        let g = sample_left_kout(7, 10, 4, Seed(5)).unwrap();
        assert_eq!(g.edge_count(), 28);
        assert!(g.right_degrees().iter().sum::<usize>() == 28);
        assert!(sample_left_kout(2, 3, 4, Seed(0)).is_err());
    }

    #[test]
    fn bipartite_gnp_extremes() {
        assert_eq!(
            sample_bipartite_gnp(3, 4, 1.0, Seed(2)),
            BipartiteGraph::complete(3, 4)
        );
        assert_eq!(sample_bipartite_gnp(3, 4, 0.0, Seed(2)).edge_count(), 0);
    }

    #[test]
    fn samplers_are_deterministic() {
        let g = Graph::complete(9);
        let s = Seed(123);
        assert_eq!(sample_gnp(&g, 0.4, s), sample_gnp(&g, 0.4, s));
        assert_eq!(sample_colored(&g, 0.4, 7, s), sample_colored(&g, 0.4, 7, s));
        assert_eq!(
            sample_kout(&g, 3, s).unwrap().chosen,
            sample_kout(&g, 3, s).unwrap().chosen
        );
        assert_eq!(
            sample_kout_star(&g, 3, s).result,
            sample_kout_star(&g, 3, s).result
        );
        assert_eq!(sample_kout_hat(&g, 3, s), sample_kout_hat(&g, 3, s));
        let a = sample_coupled(&g, 3, s);
        let b = sample_coupled(&g, 3, s);
        assert_eq!(a.h_star, b.h_star);
        assert_eq!(a.orientation, b.orientation);
        assert_ne!(sample_gnp(&g, 0.4, Seed(124)), sample_gnp(&g, 0.4, s));
    }
}
