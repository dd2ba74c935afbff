//! Monte Carlo and exact-distribution cross-checks for the closed-form
//! evaluators.

use kout::bounds::{chernoff_tail, expected_m_r, Tail};
use kout::Seed;
use rand::Rng;
use statrs::distribution::{Binomial, DiscreteCDF};

#[test]
fn multiplicity_expectation_matches_sampling() {
    // Draw 10^6 multisets of size 5 from [20] and count singletons.
    let master = Seed(0x6d_31);
    let trials = 1_000_000;
    let mut total_singletons = 0u64;
    let mut rng = master.child("draws").rng();
    let mut counts = [0u8; 20];
    for _ in 0..trials {
        counts.fill(0);
        for _ in 0..5 {
            counts[rng.gen_range(0..20)] += 1;
        }
        total_singletons += counts.iter().filter(|&&c| c == 1).count() as u64;
    }
    let empirical = total_singletons as f64 / trials as f64;
    let exact = expected_m_r(2, 10, 5, 1);
    assert!(
        (empirical - exact).abs() < 0.01,
        "empirical {empirical} vs exact {exact}"
    );
}

#[test]
fn chernoff_dominates_exact_binomial_tails() {
    // Bin(200, 1/2), a = 0.2: bound each tail and compare with the exact
    // cumulative probabilities.
    let bin = Binomial::new(0.5, 200).unwrap();
    let mu = 100.0;
    let a = 0.2;

    let exact_lower = bin.cdf(80); // P[X ≤ (1−a)μ]
    let bound_lower = chernoff_tail(mu, a, Tail::Lower).unwrap();
    assert!(
        exact_lower <= bound_lower,
        "lower: exact {exact_lower} vs bound {bound_lower}"
    );

    let exact_upper = 1.0 - bin.cdf(119); // P[X ≥ (1+a)μ]
    let bound_upper = chernoff_tail(mu, a, Tail::Upper).unwrap();
    assert!(
        exact_upper <= bound_upper,
        "upper: exact {exact_upper} vs bound {bound_upper}"
    );

    // The bounds are not vacuous at this scale.
    assert!(bound_lower < 0.2 && bound_upper < 0.3);
}
