//! Small statistics helpers used by the verification harness and tests.

use std::collections::BTreeMap;
use std::hash::Hash;

use crate::graph::Graph;

/// Total variation distance between two empirical (or exact) distributions
/// given as weight maps. Weights are normalized internally, so raw counts
/// are fine; keys missing from one map count as zero there.
pub fn tv_distance<K: Ord + Clone>(p: &BTreeMap<K, f64>, q: &BTreeMap<K, f64>) -> f64 {
    let pw: f64 = p.values().sum();
    let qw: f64 = q.values().sum();
    assert!(pw > 0.0 && qw > 0.0, "tv_distance needs nonempty inputs");
    let mut keys: Vec<K> = p.keys().cloned().collect();
    keys.extend(q.keys().cloned());
    keys.sort();
    keys.dedup();
    let mut d = 0.0;
    for k in keys {
        let a = p.get(&k).copied().unwrap_or(0.0) / pw;
        let b = q.get(&k).copied().unwrap_or(0.0) / qw;
        d += (a - b).abs();
    }
    d / 2.0
}

/// Collects hashable outcomes into a count map keyed by an order-stable
/// projection, ready for [`tv_distance`].
pub fn counts<K: Ord + Hash + Clone>(items: impl IntoIterator<Item = K>) -> BTreeMap<K, f64> {
    let mut map = BTreeMap::new();
    for k in items {
        *map.entry(k).or_insert(0.0) += 1.0;
    }
    map
}

/// Encodes which host edges a subgraph uses as a bitmask over the host's
/// canonical edge list. Panics if the host has more than 64 edges or the
/// subgraph uses a non-host edge; meant for exact small-case enumeration.
pub fn edge_set_mask(host: &Graph, sub: &Graph) -> u64 {
    assert!(host.edge_count() <= 64, "edge_set_mask needs e(host) <= 64");
    assert_eq!(host.n(), sub.n());
    let mut mask = 0u64;
    for &(u, v) in sub.edges() {
        let i = host
            .edge_index(u, v)
            .expect("subgraph edge missing from host");
        mask |= 1 << i;
    }
    mask
}

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty());
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean (sample standard deviation over sqrt(n)).
pub fn std_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    assert!(n >= 2, "std_error needs at least two samples");
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// z-score for a two-sided 99% interval (0.995 normal quantile).
pub const Z_99: f64 = 2.5758293035489004;

/// Wilson score interval for a binomial proportion: `successes` out of
/// `trials` at critical value `z`. Returns `(lo, hi)` clamped to [0, 1].
/// Unlike the normal interval it behaves sensibly at 0 and n successes.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0, "wilson_interval needs at least one trial");
    assert!(successes <= trials);
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_of_identical_and_disjoint() {
        let p = counts(vec![1u32, 1, 2, 3]);
        assert_eq!(tv_distance(&p, &p), 0.0);
        let q = counts(vec![7u32, 8]);
        assert!((tv_distance(&p, &q) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tv_handles_unnormalized_counts() {
        // Same distribution at different sample sizes.
        let p = counts(vec![0u8, 0, 1, 1]);
        let q = counts(vec![0u8, 0, 0, 0, 1, 1, 1, 1]);
        assert!(tv_distance(&p, &q) < 1e-12);

        // Hand-checked asymmetric case: p = (3/4, 1/4), q = (1/2, 1/2).
        let p = counts(vec![0u8, 0, 0, 1]);
        let q = counts(vec![0u8, 1]);
        assert!((tv_distance(&p, &q) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn masks_distinguish_subgraphs() {
        let host = Graph::complete(4);
        let a = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let b = Graph::from_edges(4, [(0, 2), (1, 3)]).unwrap();
        assert_ne!(edge_set_mask(&host, &a), edge_set_mask(&host, &b));
        assert_eq!(edge_set_mask(&host, &host), (1 << 6) - 1);
        assert_eq!(edge_set_mask(&host, &Graph::empty(4)), 0);
    }

    #[test]
    fn wilson_brackets_the_point_estimate() {
        let (lo, hi) = wilson_interval(80, 100, Z_99);
        assert!(lo < 0.8 && 0.8 < hi);
        assert!(lo > 0.66 && hi < 0.90);

        // Extremes stay inside [0, 1] and are nondegenerate.
        let (lo, hi) = wilson_interval(0, 50, Z_99);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.25);
        let (lo, hi) = wilson_interval(50, 50, Z_99);
        assert!(lo > 0.75 && lo < 1.0);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn mean_and_std_error() {
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        assert!((mean(&xs) - 5.0).abs() < 1e-12);
        // Sample sd is sqrt(32/7); SE divides by sqrt(8).
        let se = (32.0f64 / 7.0).sqrt() / (8.0f64).sqrt();
        assert!((std_error(&xs) - se).abs() < 1e-12);
    }
}
