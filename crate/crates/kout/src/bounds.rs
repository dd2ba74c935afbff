//! Closed-form evaluators for the quantitative side of the analysis:
//! multiplicity expectations for random multisets, the threshold r_0,
//! and the Chernoff and Talagrand tail bounds. These feed test
//! tolerances and the `bounds` CLI table; nothing here samples.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

fn ln_choose(a: u64, r: u64) -> f64 {
    if r > a {
        return f64::NEG_INFINITY;
    }
    ln_gamma(a as f64 + 1.0) - ln_gamma(r as f64 + 1.0) - ln_gamma((a - r) as f64 + 1.0)
}

/// Expected number of palette elements that occur exactly `r` times in a
/// uniform multiset of size `alpha_n` drawn from `[kn]`:
///
/// `kn · C(αn, r) · (kn)^(−r) · (1 − 1/kn)^(αn−r)`
///
/// Evaluated in log-space. For `r > αn` the count is impossible and the
/// value is 0.
pub fn expected_m_r(k: usize, n: usize, alpha_n: usize, r: usize) -> f64 {
    let kn = (k * n) as f64;
    assert!(k * n >= 2, "palette must have at least two elements");
    if r > alpha_n {
        return 0.0;
    }
    let ln = kn.ln() + ln_choose(alpha_n as u64, r as u64) - r as f64 * kn.ln()
        + (alpha_n - r) as f64 * (-1.0 / kn).ln_1p();
    ln.exp()
}

/// Upper bound on the expected number of elements occurring at least `r`
/// times: `kn · C(αn, r) · (kn)^(−r)`. Dominates the exact tail sum.
pub fn expected_m_geq_r_upper(k: usize, n: usize, alpha_n: usize, r: usize) -> f64 {
    let kn = (k * n) as f64;
    assert!(k * n >= 2, "palette must have at least two elements");
    if r > alpha_n {
        return 0.0;
    }
    (kn.ln() + ln_choose(alpha_n as u64, r as u64) - r as f64 * kn.ln()).exp()
}

fn r0_holds(eps: f64, k: usize, r: usize) -> bool {
    // 2·k^(−r) ≤ ε²/2, rearranged to avoid the tiny quotient.
    eps * eps * (k as f64).powi(r as i32) >= 4.0
}

/// Smallest positive integer r with `2·k^(−r) ≤ ε²/2`.
pub fn compute_r0(eps: f64, k: usize) -> usize {
    assert!(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    assert!(k >= 2, "k must be at least 2");
    // Seed from logarithms, then walk to the exact boundary so float
    // error in the seed cannot shift the answer.
    let mut r = ((4.0 / (eps * eps)).ln() / (k as f64).ln()).ceil().max(1.0) as usize;
    while r > 1 && r0_holds(eps, k, r - 1) {
        r -= 1;
    }
    while !r0_holds(eps, k, r) {
        r += 1;
    }
    debug_assert!(r0_holds(eps, k, r) && (r == 1 || !r0_holds(eps, k, r - 1)));
    r
}

/// The multiplicity argument splits on how the multiset size compares to
/// eps: when `α ≤ ε/2` a single round (r_0 = 1) already suffices, and
/// only the dense case needs the full threshold.
pub fn r0_with_case_split(eps: f64, k: usize, alpha: f64) -> usize {
    assert!((0.0..=1.0).contains(&alpha), "alpha must lie in [0, 1]");
    if alpha <= eps / 2.0 {
        1
    } else {
        compute_r0(eps, k)
    }
}

/// Which side of the mean a Chernoff bound covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Lower,
    Upper,
}

/// Chernoff bound for a binomial-type variable with mean `mu`:
/// `Pr[X ≤ (1−a)μ] ≤ exp(−a²μ/2)` and `Pr[X ≥ (1+a)μ] ≤ exp(−a²μ/3)`.
pub fn chernoff_tail(mu: f64, a: f64, side: Tail) -> Result<f64> {
    assert!(mu >= 0.0, "mean must be nonnegative");
    match side {
        Tail::Lower => {
            if a <= 0.0 {
                return Err(Error::invalid("a", "lower tail needs a > 0"));
            }
            Ok((-a * a * mu / 2.0).exp())
        }
        Tail::Upper => {
            if a <= 0.0 || a >= 1.0 {
                return Err(Error::invalid("a", "upper tail needs 0 < a < 1"));
            }
            Ok((-a * a * mu / 3.0).exp())
        }
    }
}

/// Talagrand-style concentration bound for a c-Lipschitz, r-certifiable
/// variable with the given expectation: `4·exp(−t²/(8c²r·E))`.
pub fn talagrand_tail(expectation: f64, c: f64, r: f64, t: f64) -> Result<f64> {
    assert!(c > 0.0 && r > 0.0, "c and r must be positive");
    assert!(expectation >= 0.0);
    if t < 0.0 || t > expectation {
        return Err(Error::invalid("t", "t must lie in [0, expectation]"));
    }
    if t == 0.0 {
        return Ok(4.0);
    }
    Ok(4.0 * (-t * t / (8.0 * c * c * r * expectation)).exp())
}

/// Expected multiplicity spectrum of a uniform multiset of size
/// `alpha_n` from `[kn]`: `mu(r)` for r = 1, 2, … until the spectrum's
/// mass `Σ r·μ_r = αn` is exhausted (the tail is truncated once it is
/// negligible at 10⁻⁹ relative accuracy).
#[derive(Debug, Clone)]
pub struct MultiplicityProfile {
    pub k: usize,
    pub n: usize,
    pub alpha: f64,
    mu: Vec<f64>,
}

impl MultiplicityProfile {
    pub fn new(k: usize, n: usize, alpha_n: usize) -> MultiplicityProfile {
        assert!(k >= 2, "k must be at least 2");
        assert!(n >= 1);
        assert!(
            alpha_n >= 1 && alpha_n <= n,
            "multiset size must lie in [1, n]"
        );
        let target = alpha_n as f64;
        let mut mu = Vec::new();
        // Kahan-compensated running mass Σ r·μ_r.
        let mut mass = 0.0f64;
        let mut comp = 0.0f64;
        for r in 1..=alpha_n {
            let m = expected_m_r(k, n, alpha_n, r);
            mu.push(m);
            let term = r as f64 * m - comp;
            let next = mass + term;
            comp = (next - mass) - term;
            mass = next;
            if target - mass <= 1e-12 * target {
                break;
            }
        }
        assert!(
            (mass - target).abs() <= 1e-9 * target,
            "multiplicity mass {mass} drifted from {target}"
        );
        MultiplicityProfile {
            k,
            n,
            alpha: alpha_n as f64 / n as f64,
            mu,
        }
    }

    /// Expected count of elements with multiplicity exactly `r`
    /// (1-based; 0 beyond the stored spectrum).
    pub fn mu(&self, r: usize) -> f64 {
        if r == 0 || r > self.mu.len() {
            0.0
        } else {
            self.mu[r - 1]
        }
    }

    /// Largest r with a stored (non-truncated) expectation.
    pub fn max_r(&self) -> usize {
        self.mu.len()
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.mu
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_multiplicity_values() {
        // kn = 20, αn = 5: E[m_1] = 20·5·(1/20)·(19/20)^4 = 5·0.95^4.
        let v = expected_m_r(2, 10, 5, 1);
        assert!((v - 4.07253125).abs() < 1e-12, "m_1 = {v}");
        // r = 0 term: 20·(19/20)^5.
        let v = expected_m_r(2, 10, 5, 0);
        assert!((v - 20.0 * 0.95f64.powi(5)).abs() < 1e-12);
        // Full multiplicity: kn = 4, αn = 2 → 4·(1/16) = 1/4.
        let v = expected_m_r(2, 2, 2, 2);
        assert!((v - 0.25).abs() < 1e-12, "m_2 = {v}");
        // Impossible multiplicities have expectation zero.
        assert_eq!(expected_m_r(2, 10, 5, 6), 0.0);
    }

    #[test]
    fn upper_bound_values_and_dominance() {
        assert!((expected_m_geq_r_upper(2, 10, 5, 1) - 5.0).abs() < 1e-12);
        assert!((expected_m_geq_r_upper(2, 10, 5, 2) - 0.5).abs() < 1e-12);

        // The bound dominates the exact tail on a parameter grid.
        for &k in &[2usize, 3, 5, 23] {
            for &n in &[4usize, 10, 40, 100, 400] {
                for &alpha_n in &[1usize, n / 4, n / 2, n] {
                    if alpha_n == 0 {
                        continue;
                    }
                    for r in 1..=alpha_n.min(12) {
                        let tail: f64 =
                            (r..=alpha_n).map(|s| expected_m_r(k, n, alpha_n, s)).sum();
                        let upper = expected_m_geq_r_upper(k, n, alpha_n, r);
                        assert!(
                            upper + 1e-12 >= tail,
                            "k={k} n={n} αn={alpha_n} r={r}: {upper} < {tail}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn upper_bound_within_factor_two_in_regime() {
        // Whenever (1 − 1/kn)^(αn−r) ≥ 1/2 the bound is within a factor
        // of two of the exact value at r.
        for &k in &[2usize, 3, 5] {
            for &n in &[10usize, 100, 1000] {
                for &alpha_n in &[n / 4, n / 2, n] {
                    for r in 1..=alpha_n.min(8) {
                        let kn = (k * n) as f64;
                        let regime =
                            ((alpha_n - r) as f64 * (-1.0 / kn).ln_1p()).exp() >= 0.5;
                        if !regime {
                            continue;
                        }
                        let exact = expected_m_r(k, n, alpha_n, r);
                        let upper = expected_m_geq_r_upper(k, n, alpha_n, r);
                        assert!(upper <= 2.0 * exact + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn r0_examples_and_minimality() {
        // 2·2^(−r) ≤ 0.02 first at r = 7 (2^7 = 128 ≥ 4/0.04 = 100).
        assert_eq!(compute_r0(0.2, 2), 7);
        // 2/23 ≈ 0.087 already below 0.9²/2 = 0.405.
        assert_eq!(compute_r0(0.9, 23), 1);

        for &k in &[2usize, 3, 10, 23] {
            for i in 1..=9 {
                let eps = i as f64 / 10.0;
                let r0 = compute_r0(eps, k);
                assert!(r0_holds(eps, k, r0));
                assert!(r0 == 1 || !r0_holds(eps, k, r0 - 1));
            }
        }
    }

    #[test]
    fn r0_is_monotone() {
        for &k in &[2usize, 3, 7] {
            let mut prev = usize::MAX;
            for i in 1..=9 {
                let r0 = compute_r0(i as f64 / 10.0, k);
                assert!(r0 <= prev, "r_0 must not grow with eps");
                prev = r0;
            }
        }
        for i in 1..=9 {
            let eps = i as f64 / 10.0;
            let mut prev = usize::MAX;
            for k in 2..=30 {
                let r0 = compute_r0(eps, k);
                assert!(r0 <= prev, "r_0 must not grow with k");
                prev = r0;
            }
        }
    }

    #[test]
    fn case_split_short_circuits_sparse_multisets() {
        assert_eq!(r0_with_case_split(0.4, 2, 0.1), 1);
        assert_eq!(r0_with_case_split(0.4, 2, 0.5), compute_r0(0.4, 2));
        assert_eq!(r0_with_case_split(0.2, 2, 0.1), 1);
    }

    #[test]
    fn chernoff_plug_ins() {
        let v = chernoff_tail(100.0, 0.5, Tail::Lower).unwrap();
        assert!((v - (-12.5f64).exp()).abs() < 1e-15);
        let v = chernoff_tail(90.0, 0.3, Tail::Upper).unwrap();
        assert!((v - (-2.7f64).exp()).abs() < 1e-15);
        // Vanishing a drives the bound to 1.
        assert!(chernoff_tail(1000.0, 1e-9, Tail::Lower).unwrap() > 0.999);
        assert!(chernoff_tail(50.0, -0.1, Tail::Lower).is_err());
        assert!(chernoff_tail(50.0, 1.5, Tail::Upper).is_err());
    }

    #[test]
    fn talagrand_plug_ins() {
        assert_eq!(talagrand_tail(1000.0, 1.0, 2.0, 0.0).unwrap(), 4.0);
        let v = talagrand_tail(1000.0, 1.0, 2.0, 400.0).unwrap();
        assert!((v - 4.0 * (-10.0f64).exp()).abs() < 1e-12);
        assert!(talagrand_tail(10.0, 1.0, 1.0, 11.0).is_err());
        assert!(talagrand_tail(10.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn profile_conserves_mass() {
        for (k, n, alpha_n) in [(2, 10, 5), (2, 10_000, 5_000), (3, 1_000, 400), (23, 200, 90)] {
            let p = MultiplicityProfile::new(k, n, alpha_n);
            let mass: f64 = (1..=p.max_r()).map(|r| r as f64 * p.mu(r)).sum();
            let rel = (mass - alpha_n as f64).abs() / alpha_n as f64;
            assert!(rel <= 1e-9, "k={k} n={n}: relative drift {rel}");
            assert!(p.spectrum().iter().all(|&m| m >= 0.0));
        }
        let p = MultiplicityProfile::new(2, 10_000, 5_000);
        assert!((p.mu(1) - expected_m_r(2, 10_000, 5_000, 1)).abs() < 1e-12);
        assert!(p.mu(1) > 3800.0 && p.mu(1) < 4000.0);
        assert_eq!(p.mu(0), 0.0);
        assert_eq!(p.mu(p.max_r() + 5), 0.0);
    }
}
