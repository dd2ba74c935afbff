//! Shared exact-law enumerators for small hosts. These are the oracles
//! the sampler tests compare against: they walk the full probability
//! space (orientations or vertex orders, times all pick subsets) and
//! return the distribution over edge-set bitmasks of the host.

use std::collections::BTreeMap;

use itertools::Itertools;
use kout::Graph;

/// Distribution of the star model on `g`: uniform orientation, then each
/// vertex keeps a uniform `min(k, d⁺)`-subset of its out-edges. Keys are
/// bitmasks over the host's canonical edge list.
pub fn exact_star_law(g: &Graph, k: usize) -> BTreeMap<u64, f64> {
    let m = g.edge_count();
    assert!(m <= 20, "orientation space is 2^m");
    let mut law = BTreeMap::new();
    for bits in 0u64..(1 << m) {
        let mut outs = vec![Vec::new(); g.n()];
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            if bits >> i & 1 == 1 {
                outs[u].push(i);
            } else {
                outs[v].push(i);
            }
        }
        accumulate_picks(&outs, k, 0, 0, 1.0 / (1u64 << m) as f64, &mut law);
    }
    law
}

/// Distribution of the hat model on `g`: uniform vertex order, each
/// vertex claims a uniform subset of its still-unclaimed incident edges
/// of size `min(k, available)`.
pub fn exact_hat_law(g: &Graph, k: usize) -> BTreeMap<u64, f64> {
    let n = g.n();
    assert!(n <= 7, "order space is n!");
    let mut law = BTreeMap::new();
    let orders: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let w = 1.0 / orders.len() as f64;
    for order in &orders {
        hat_rec(g, k, order, 0, 0, w, &mut law);
    }
    law
}

fn hat_rec(
    g: &Graph,
    k: usize,
    order: &[usize],
    pos: usize,
    claimed: u64,
    w: f64,
    law: &mut BTreeMap<u64, f64>,
) {
    if pos == order.len() {
        *law.entry(claimed).or_insert(0.0) += w;
        return;
    }
    let x = order[pos];
    let avail: Vec<usize> = g
        .neighbors(x)
        .iter()
        .map(|&y| g.edge_index(x, y).unwrap())
        .filter(|&e| claimed >> e & 1 == 0)
        .collect();
    let t = k.min(avail.len());
    if t == 0 {
        hat_rec(g, k, order, pos + 1, claimed, w, law);
        return;
    }
    let subs: Vec<Vec<usize>> = avail.into_iter().combinations(t).collect();
    let w2 = w / subs.len() as f64;
    for sub in subs {
        let mut m = claimed;
        for e in sub {
            m |= 1 << e;
        }
        hat_rec(g, k, order, pos + 1, m, w2, law);
    }
}

fn accumulate_picks(
    outs: &[Vec<usize>],
    k: usize,
    x: usize,
    mask: u64,
    w: f64,
    law: &mut BTreeMap<u64, f64>,
) {
    if x == outs.len() {
        *law.entry(mask).or_insert(0.0) += w;
        return;
    }
    let t = k.min(outs[x].len());
    if t == 0 {
        accumulate_picks(outs, k, x + 1, mask, w, law);
        return;
    }
    let subs: Vec<Vec<usize>> = outs[x].iter().copied().combinations(t).collect();
    let w2 = w / subs.len() as f64;
    for sub in subs {
        let mut m = mask;
        for e in sub {
            m |= 1 << e;
        }
        accumulate_picks(outs, k, x + 1, m, w2, law);
    }
}

/// Probability mass on outcomes with exactly `c` edges.
pub fn mass_with_edge_count(law: &BTreeMap<u64, f64>, c: u32) -> f64 {
    law.iter()
        .filter(|(mask, _)| mask.count_ones() == c)
        .map(|(_, w)| w)
        .sum()
}
