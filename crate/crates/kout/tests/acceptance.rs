//! Desk-scale acceptance gate. Every test prints one line
//!
//!   ACCEPTANCE <id> <name>: PASS|FAIL - <details>
//!
//! and then asserts the stated criterion at its stated tolerance. The
//! asymptotic statements behind these models are not reproducible at these
//! sizes, so some criteria fail structurally; those tests report the
//! measured gap and stay red rather than loosening the target:
//!
//!   C03  on K_4 the sample budget s never reaches k, so no part is ever
//!        carved and the conditioned law of the first part is empty;
//!   C04a the hat and star models differ at n = 4 by TV = 7/18, an exact
//!        constant, far above the 0.02 ceiling;
//!   C09a layers near r_0 have expectations well below 1, so the relative
//!        deviation exceeds eps in essentially every trial;
//!   C11  the splitting pipeline needs s >= k out-edges per vertex and
//!        multiset coverage that finite presets cannot supply, so carving
//!        yields zero parts (no success in 10.6M seeded attempts across
//!        these parameter families).

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use kout::bounds::expected_m_r;
use kout::decomposition::{decompose, verify_decomposition};
use kout::graph::{BipartiteGraph, Graph};
use kout::harness::{preset, run_experiment, run_to_dir, ExperimentConfig, ExperimentKind};
use kout::matching::{decompose_regular, find_r_factor, gale_ryser_check};
use kout::models::{sample_bipartite_gnp, sample_coupled, sample_kout, sample_kout_hat};
use kout::seed::Seed;
use kout::stats::{counts, edge_set_mask, tv_distance};
use kout::verify::{has_perfect_matching, is_hamiltonian, rotation_budget};

fn line(id: &str, name: &str, pass: bool, details: impl AsRef<str>) -> bool {
    println!(
        "ACCEPTANCE {id} {name}: {} - {}",
        if pass { "PASS" } else { "FAIL" },
        details.as_ref()
    );
    pass
}

fn complete_bipartite(n: usize) -> Graph {
    Graph::from_edges(2 * n, (0..n).flat_map(|u| (n..2 * n).map(move |v| (u, v)))).unwrap()
}

fn as_bipartite(g: &Graph, side: usize) -> BipartiteGraph {
    BipartiteGraph::from_edges(side, side, g.edges().iter().map(|&(u, v)| (u, v - side)))
        .unwrap()
}

#[test]
fn c01_colored_sample_marginal() {
    const TRIALS: usize = 1_000_000;
    let host = Graph::complete(4);
    let edges = host.edge_count();
    let palette = 8usize;
    let root = Seed(0xac01);
    let (present, colors) = (0..TRIALS)
        .into_par_iter()
        .fold(
            || (vec![0u64; edges], vec![vec![0u64; palette]; edges]),
            |(mut present, mut colors), i| {
                let res = decompose(&host, 0.9, 2, 0.4, root.child_idx(i)).unwrap();
                for (e, &(u, v)) in host.edges().iter().enumerate() {
                    if let Some(c) = res.h.color_of(u, v) {
                        present[e] += 1;
                        colors[e][(c - 1) as usize] += 1;
                    }
                }
                (present, colors)
            },
        )
        .reduce(
            || (vec![0u64; edges], vec![vec![0u64; palette]; edges]),
            |(mut pa, mut ca), (pb, cb)| {
                for e in 0..edges {
                    pa[e] += pb[e];
                    for c in 0..palette {
                        ca[e][c] += cb[e][c];
                    }
                }
                (pa, ca)
            },
        );

    let worst_rate_gap = present
        .iter()
        .map(|&c| (c as f64 / TRIALS as f64 - 0.9).abs())
        .fold(0.0, f64::max);
    let critical = ChiSquared::new((palette - 1) as f64)
        .unwrap()
        .inverse_cdf(0.999);
    let worst_chi = (0..edges)
        .map(|e| {
            let expected = present[e] as f64 / palette as f64;
            colors[e]
                .iter()
                .map(|&o| (o as f64 - expected).powi(2) / expected)
                .sum::<f64>()
        })
        .fold(0.0, f64::max);

    let pass = worst_rate_gap <= 0.002 && worst_chi <= critical;
    let ok = line(
        "C01",
        "colored-sample-marginal",
        pass,
        format!(
            "per-edge keep rate within {worst_rate_gap:.5} of 0.9 (cap 0.002), \
             worst per-edge color chi2 {worst_chi:.2} vs critical {critical:.2} over {TRIALS} trials"
        ),
    );
    assert!(ok, "marginal of the colored sample drifted");
}

#[test]
fn c02_split_invariants_hold_on_every_success() {
    let host = Graph::complete(30);
    let root = Seed(0xac02);
    let mut successes = 0usize;
    for i in 0..100 {
        let res = decompose(&host, 1.0, 2, 0.4, root.child_idx(i)).unwrap();
        if res.succeeded() {
            successes += 1;
            let report = verify_decomposition(&res);
            assert!(report.all_pass(), "seeded run {i} broke an invariant:\n{report}");
        }
    }
    let note = if successes == 0 {
        "0 of 100 runs carved anything at these parameters (the orientation \
         floor s = 13 beats typical out-degrees), so the zero-tolerance check \
         is vacuous"
            .to_string()
    } else {
        format!("all {successes} successful runs keep partition, conservation, rainbow and palette invariants")
    };
    let ok = line("C02", "split-invariants", true, note);
    assert!(ok);
}

#[test]
fn c03_first_part_matches_the_star_model() {
    const TRIALS: usize = 1_000_000;
    let host = Graph::complete(4);
    let root = Seed(0xac03);
    let carved: usize = (0..TRIALS)
        .into_par_iter()
        .filter(|&i| {
            let res = decompose(&host, 1.0, 2, 0.2, root.child_idx(i)).unwrap();
            res.succeeded() && res.t_achieved >= 1
        })
        .count();
    let pass = carved > 0;
    let ok = line(
        "C03",
        "first-part-distribution",
        pass,
        format!(
            "{carved} of {TRIALS} runs produced a first part; on K_4 the sample \
             size s = floor((1 - eps/4) * 3p/2) is at most 1 < k = 2 for every \
             valid (p, eps), so the conditioned law is empty and no TV \
             comparison against the 2-out star model can be made"
        ),
    );
    assert!(ok, "no conditioned first-part distribution exists at this size");
}

#[test]
fn c04a_hat_vs_star_total_variation() {
    const TRIALS: usize = 1_000_000;
    let host = Graph::complete(4);
    let root = Seed(0xac04);
    let masks: Vec<(u64, u64)> = (0..TRIALS)
        .into_par_iter()
        .map(|i| {
            let seed = root.child_idx(i);
            let hat = sample_kout_hat(&host, 2, seed.child("hat"));
            let star = sample_coupled(&host, 2, seed.child("star")).h_star;
            (edge_set_mask(&host, &hat), edge_set_mask(&host, &star))
        })
        .collect();
    let tv = tv_distance(
        &counts(masks.iter().map(|&(h, _)| h)),
        &counts(masks.iter().map(|&(_, s)| s)),
    );
    let pass = tv <= 0.02;
    let ok = line(
        "C04a",
        "hat-vs-star-tv",
        pass,
        format!(
            "empirical TV {tv:.4} over {TRIALS} trials each (cap 0.02); the gap \
             is structural at n = 4, where the exact distance is 7/18 = 0.3889: \
             the sequential model never wastes picks on claimed edges while the \
             star model does"
        ),
    );
    assert!(ok, "hat and star models are far apart on K_4");
}

#[test]
fn c04b_coupling_agreement_on_k60() {
    const TRIALS: usize = 10_000;
    let host = Graph::complete(60);
    let root = Seed(0xac44);
    let agreed = (0..TRIALS)
        .into_par_iter()
        .filter(|&i| sample_coupled(&host, 2, root.child_idx(i)).agreed)
        .count();
    let rate = agreed as f64 / TRIALS as f64;
    let pass = rate >= 0.999;
    let ok = line(
        "C04b",
        "coupling-agreement",
        pass,
        format!("agreement rate {rate:.4} over {TRIALS} trials (floor 0.999)"),
    );
    assert!(ok, "coupling should agree when every out-degree clears k");
}

#[test]
fn c05_three_out_bipartite_perfect_matchings() {
    const TRIALS: usize = 1_000;
    let host = complete_bipartite(50);
    let root = Seed(0xac05);
    let hits = (0..TRIALS)
        .into_par_iter()
        .filter(|&i| {
            let sample = sample_kout(&host, 3, root.child_idx(i)).unwrap().result;
            has_perfect_matching(&as_bipartite(&sample, 50)).unwrap().holds()
        })
        .count();
    let rate = hits as f64 / TRIALS as f64;
    let pass = rate >= 0.99;
    let ok = line(
        "C05",
        "three-out-perfect-matching",
        pass,
        format!("perfect matching rate {rate:.4} on 3-out of K_50,50 over {TRIALS} seeds (floor 0.99)"),
    );
    assert!(ok);
}

#[test]
fn c06_k_out_hamiltonicity() {
    const TRIALS: usize = 1_000;
    let host = Graph::complete(40);
    let budget = rotation_budget(40);
    let root = Seed(0xac06);
    let rate_for = |k: usize, label: &str| {
        let hits = (0..TRIALS)
            .into_par_iter()
            .filter(|&i| {
                let sample = sample_kout(&host, k, root.child(label).child_idx(i))
                    .unwrap()
                    .result;
                is_hamiltonian(&sample, budget).holds()
            })
            .count();
        hits as f64 / TRIALS as f64
    };
    let three = rate_for(3, "three");
    let dense = rate_for(23, "dense");
    let pass = three >= 0.99 && dense >= 0.99;
    let ok = line(
        "C06",
        "k-out-hamiltonicity",
        pass,
        format!(
            "Hamiltonicity rate {three:.4} for 3-out and {dense:.4} for 23-out \
             of K_40 over {TRIALS} seeds each (floor 0.99)"
        ),
    );
    assert!(ok);
}

#[test]
fn c07_gale_ryser_matches_the_flow_construction() {
    // Exhaustive on 3 + 3: every edge subset of K_3,3.
    for mask in 0u32..(1 << 9) {
        let edges = (0..9).filter(|b| mask >> b & 1 == 1).map(|b| (b / 3, b % 3));
        let b = BipartiteGraph::from_edges(3, 3, edges).unwrap();
        for r in 1..=3 {
            let feasible = gale_ryser_check(&b, r).unwrap().feasible;
            let built = find_r_factor(&b, r).is_some();
            assert_eq!(
                feasible, built,
                "3+3 mask {mask:#b} disagrees at r = {r}"
            );
        }
    }
    // Random sweep on 4 + 4 across densities.
    let root = Seed(0xac07);
    for i in 0..10_000 {
        let p = 0.05 + 0.09 * (i % 11) as f64;
        let b = sample_bipartite_gnp(4, 4, p, root.child_idx(i));
        for r in 1..=3 {
            let feasible = gale_ryser_check(&b, r).unwrap().feasible;
            match find_r_factor(&b, r) {
                Some(factor) => {
                    assert!(feasible, "factor built where the count bound fails");
                    assert!((0..4).all(|v| factor.degree(v) == r));
                    assert!(factor.right_degrees().iter().all(|&d| d == r));
                }
                None => assert!(!feasible, "bound holds but no factor was built"),
            }
        }
    }
    let ok = line(
        "C07",
        "gale-ryser-equivalence",
        true,
        "feasibility test and flow construction agree on all 512 graphs on 3+3 \
         and a 10^4-instance sweep on 4+4, r in {1, 2, 3}",
    );
    assert!(ok);
}

/// Union of four uniform permutations, rejected until edge-disjoint.
fn random_four_regular(seed: Seed) -> BipartiteGraph {
    let mut rng = seed.rng();
    loop {
        let mut perms = Vec::new();
        for _ in 0..4 {
            let mut p: Vec<usize> = (0..8).collect();
            p.shuffle(&mut rng);
            perms.push(p);
        }
        let mut seen = BTreeSet::new();
        if perms
            .iter()
            .flat_map(|p| p.iter().enumerate())
            .all(|(u, &v)| seen.insert((u, v)))
        {
            return BipartiteGraph::from_edges(
                8,
                8,
                perms.iter().flat_map(|p| p.iter().copied().enumerate()),
            )
            .unwrap();
        }
    }
}

#[test]
fn c08_regular_graphs_split_into_perfect_matchings() {
    let root = Seed(0xac08);
    for i in 0..1_000 {
        let b = random_four_regular(root.child_idx(i));
        let matchings = decompose_regular(&b).unwrap();
        assert_eq!(matchings.len(), 4, "instance {i} split into a wrong count");
        let mut covered = BTreeSet::new();
        for m in &matchings {
            assert!(m.is_perfect_in(&b), "instance {i} produced a defective matching");
            for &pair in &m.pairs {
                assert!(covered.insert(pair), "instance {i} reused an edge");
            }
        }
        assert_eq!(covered.len(), 32, "instance {i} left edges uncovered");
    }
    let ok = line(
        "C08",
        "regular-splitting",
        true,
        "1000 random 4-regular graphs on 8+8 all split into 4 disjoint perfect \
         matchings covering every edge",
    );
    assert!(ok);
}

#[test]
fn c09a_multiplicity_exceedance() {
    let cfg = preset(ExperimentKind::MultiplicityConc);
    let (_, report) = run_experiment(&cfg, 4, false).unwrap();
    let exceedance = report.exceedance_fraction.unwrap();
    let pass = exceedance <= 0.01;
    let ok = line(
        "C09a",
        "multiplicity-exceedance",
        pass,
        format!(
            "fraction of trials with max_r |m_r - mu_r|/mu_r > eps is \
             {exceedance:.3} (cap 0.01) at n = {}, eps = {}; layers near r_0 \
             have mu_r far below 1, so a single color at such a layer already \
             doubles it",
            cfg.n, cfg.eps
        ),
    );
    assert!(ok, "relative deviation is dominated by near-empty layers");
}

#[test]
fn c09b_layer_sum_floor() {
    let cfg = preset(ExperimentKind::MultiplicityConc);
    let (_, report) = run_experiment(&cfg, 1, false).unwrap();
    let layer = report.layer_sum.unwrap();
    let pass = layer.holds;
    let ok = line(
        "C09b",
        "layer-sum-floor",
        pass,
        format!(
            "sum of r * mu_r over r <= r_0 is {:.2}, floor (1 - eps) alpha n = {:.2}",
            layer.sum, layer.floor
        ),
    );
    assert!(ok);
}

#[test]
fn c10_expected_multiplicity_formula() {
    const TRIALS: usize = 1_000_000;
    let frozen = 4.07253125;
    let formula = expected_m_r(2, 10, 5, 1);
    assert!(
        (formula - frozen).abs() < 1e-12,
        "closed form drifted from the pinned value: {formula}"
    );
    let root = Seed(0xac10);
    let total: u64 = (0..TRIALS)
        .into_par_iter()
        .map(|i| {
            let mut rng = root.child_idx(i).rng();
            let mut tally = [0u8; 20];
            for _ in 0..5 {
                tally[rng.gen_range(0..20)] += 1;
            }
            tally.iter().filter(|&&c| c == 1).count() as u64
        })
        .sum();
    let mean = total as f64 / TRIALS as f64;
    let pass = (mean - frozen).abs() <= 0.01;
    let ok = line(
        "C10",
        "expected-multiplicity",
        pass,
        format!("empirical mean m_1 = {mean:.5} vs formula {frozen} over {TRIALS} draws (tolerance 0.01)"),
    );
    assert!(ok);
}

#[test]
fn c11a_pm_packing_preset() {
    let (_, report) = run_experiment(&preset(ExperimentKind::PmPacking), 4, false).unwrap();
    let mean = report.mean_property_parts.unwrap();
    let pass = mean >= 3.0;
    let ok = line(
        "C11a",
        "pm-packing-mean",
        pass,
        format!(
            "mean rainbow perfect-matching count {mean:.3} (floor 3) with \
             t_target = {}; every trial dies in the sample stage because the \
             orientation floor s exceeds desk-scale out-degrees",
            report.t_target
        ),
    );
    assert!(ok, "perfect-matching packing is out of reach at n = 50");
}

#[test]
fn c11b_ham_packing_preset() {
    let (_, report) = run_experiment(&preset(ExperimentKind::HamPacking), 4, false).unwrap();
    let rate = report.success_rate;
    let pass = rate >= 0.9;
    let ok = line(
        "C11b",
        "ham-packing-fraction",
        pass,
        format!(
            "fraction of trials with >= 1 rainbow Hamiltonian part is {rate:.3} \
             (floor 0.9) with t_target = {}; carving at k = 23 needs far larger \
             samples per vertex than n = 200 provides",
            report.t_target
        ),
    );
    assert!(ok, "Hamiltonian packing is out of reach at n = 200");
}

#[test]
fn c12_reruns_are_byte_identical() {
    let cfg = ExperimentConfig {
        n: 12,
        trials: 100,
        ..preset(ExperimentKind::WalkupPm)
    };
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_to_dir(&cfg, &a, 1, false).unwrap();
    run_to_dir(&cfg, &b, 1, false).unwrap();
    let read = |p: &std::path::Path| std::fs::read(p).unwrap();
    assert_eq!(read(&a.join("trials.csv")), read(&b.join("trials.csv")));
    assert_eq!(read(&a.join("report.json")), read(&b.join("report.json")));

    let (serial, _) = run_experiment(&cfg, 1, false).unwrap();
    let (parallel, _) = run_experiment(&cfg, 8, false).unwrap();
    for (x, y) in serial.iter().zip(&parallel) {
        assert_eq!((x.trial, x.seed, x.holds), (y.trial, y.seed, y.holds));
    }
    let ok = line(
        "C12",
        "determinism",
        true,
        "same master seed reproduces trials.csv and report.json byte for byte; \
         1 and 8 workers give identical records",
    );
    assert!(ok);
}
