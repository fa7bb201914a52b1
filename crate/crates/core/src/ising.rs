//! The Curie-Weiss counterexample for measure-weighted monotonicity
//! testing: for `A = {x : |x| <= n/2}` the violation mass `delta(A)` is
//! carried by the middle level alone and vanishes at low temperature,
//! while `A` stays far from every monotone set.
//!
//! Convention: `mu(x) ∝ exp(beta * m^2 / (2n))`, `m = sum_i (2 x_i - 1)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::cube::{measure_of, CurieWeissMeasure, ExplicitSet, Measure, MAX_EXPLICIT_DIM};
use crate::error::{Error, Result};
use crate::monotone::{epsilon_mincut, monotone_masks, BRUTE_FORCE_MAX_DIM};

pub const HAMILTONIAN: &str = "mu(x) ∝ exp(beta m^2 / (2n)), m = sum(2x_i - 1)";
/// Default inverse temperature for headline reports (inside the double well).
pub const DEFAULT_BETA: f64 = 3.0;
/// Slack on the `epsilon >= 1/6` comparison.
pub const EPSILON_SLACK: f64 = 1e-9;

pub fn cw_measure(n: usize, beta: f64) -> Result<CurieWeissMeasure> {
    CurieWeissMeasure::new(n, beta)
}

/// `{x : |x| <= n/2}`.
pub fn lower_half(n: usize) -> Result<ExplicitSet> {
    ExplicitSet::from_fn(n, |x| 2 * x.count_ones() as usize <= n)
}

/// Closed form: every violating pair starts on the middle level and each
/// middle state has `n/2` up-neighbours outside `A`, so
/// `delta(A) = mu(A_{n/2}) * (n/2) / n = mu(A_{n/2}) / 2`.
pub fn counterexample_delta(n: usize, beta: f64) -> Result<f64> {
    let mu = cw_measure(n, beta)?;
    Ok(mu.level_prob[n / 2] / 2.0)
}

/// `epsilon(A)` under the Curie-Weiss measure, by minimum cut.
pub fn counterexample_epsilon(n: usize, beta: f64) -> Result<(f64, ExplicitSet)> {
    if n > MAX_EXPLICIT_DIM {
        return Err(Error::ExplicitCap {
            n,
            cap: MAX_EXPLICIT_DIM,
        });
    }
    let mu = Measure::CurieWeiss(cw_measure(n, beta)?);
    let d = epsilon_mincut(&lower_half(n)?, &mu)?;
    Ok((d.epsilon.value(), d.witness))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub n: usize,
    pub beta: f64,
    pub hamiltonian: &'static str,
    /// Exact `mu(A)`; exceeds 1/2 by `mu(A_{n/2}) / 2`.
    pub mu_a: f64,
    pub mu_mid: f64,
    pub delta_a: f64,
    pub epsilon_a: f64,
    /// `n * delta / epsilon`; the tester inequality needs this `>= 1`.
    pub tester_ratio: f64,
    pub epsilon_at_least_sixth: bool,
    pub delta_at_most_mu_mid: bool,
}

pub fn counterexample(n: usize, beta: f64) -> Result<CounterexampleReport> {
    let mu = cw_measure(n, beta)?;
    let a = lower_half(n)?;
    let mu_a = measure_of(&Measure::CurieWeiss(mu.clone()), &a)?.value();
    let mu_mid = mu.level_prob[n / 2];
    let delta_a = counterexample_delta(n, beta)?;
    let (epsilon_a, _) = counterexample_epsilon(n, beta)?;
    Ok(CounterexampleReport {
        n,
        beta,
        hamiltonian: HAMILTONIAN,
        mu_a,
        mu_mid,
        delta_a,
        epsilon_a,
        tester_ratio: n as f64 * delta_a / epsilon_a,
        epsilon_at_least_sixth: epsilon_a >= 1.0 / 6.0 - EPSILON_SLACK,
        delta_at_most_mu_mid: delta_a <= mu_mid,
    })
}

/// Reports at each inverse temperature, computed in parallel.
pub fn sweep(n: usize, betas: &[f64]) -> Result<Vec<CounterexampleReport>> {
    betas.par_iter().map(|&b| counterexample(n, b)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportReport {
    pub n: usize,
    pub beta: f64,
    pub monotone_sets: usize,
    pub min_distance: f64,
    pub minimizer: Vec<String>,
    pub headline_holds: bool,
    /// Sets where `mu(A xor B) < max(mu(A) - mu(B), mu(B)/2 - mu(A_{n/2})/2)`.
    pub bound_violations: usize,
    /// Sets where `mu(A xor B) < mu(B)/2`, i.e. the bound without the
    /// middle-level correction.
    pub uncorrected_violations: usize,
}

/// Exhaustive check over all monotone `B` (n <= 4) of the lower bound on
/// `mu(A xor B)` given by the level-reflection transport. The middle level
/// lies in `A` and maps to itself, so the transport only covers
/// `A \ A_{n/2}` and the `mu(B)/2` term loses `mu(A_{n/2})/2`.
pub fn transport_verify(n: usize, beta: f64) -> Result<TransportReport> {
    if n > BRUTE_FORCE_MAX_DIM {
        return Err(Error::BruteForceCap {
            n,
            cap: BRUTE_FORCE_MAX_DIM,
        });
    }
    let mu = cw_measure(n, beta)?;
    let measure = Measure::CurieWeiss(mu.clone());
    let a = lower_half(n)?;
    let mu_a = measure_of(&measure, &a)?.value();
    let mid = mu.level_prob[n / 2];
    let tol = 1e-12;
    let mut best: Option<(f64, ExplicitSet)> = None;
    let (mut bound_violations, mut uncorrected_violations) = (0, 0);
    let masks = monotone_masks(n)?;
    for &mask in masks {
        let b = ExplicitSet::from_mask(n, mask);
        let mu_b = measure_of(&measure, &b)?.value();
        let dist = measure_of(&measure, &a.symmetric_difference(&b)?)?.value();
        if dist + tol < (mu_a - mu_b).max(mu_b / 2.0 - mid / 2.0) {
            bound_violations += 1;
        }
        if dist + tol < mu_b / 2.0 {
            uncorrected_violations += 1;
        }
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, b));
        }
    }
    let (min_distance, minimizer) = best.expect("at least the empty set is monotone");
    Ok(TransportReport {
        n,
        beta,
        monotone_sets: masks.len(),
        min_distance,
        minimizer: minimizer.member_strings(),
        headline_holds: min_distance >= 1.0 / 6.0 - EPSILON_SLACK,
        bound_violations,
        uncorrected_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotone::{delta_exact, epsilon_bruteforce};

    #[test]
    fn measure_examples() {
        let mu = cw_measure(4, 0.0).unwrap();
        let want = [1.0, 4.0, 6.0, 4.0, 1.0].map(|v| v / 16.0);
        for (got, want) in mu.level_prob.iter().zip(want) {
            assert!((got - want).abs() < 1e-15);
        }
        for beta in [0.3, 1.0, 5.0] {
            let mu = cw_measure(4, beta).unwrap();
            assert_eq!(mu.level_prob[1], mu.level_prob[3]);
        }
        let mu = cw_measure(12, 3.0).unwrap();
        assert!(mu.level_prob[6] < mu.level_prob[2]);
        assert!(cw_measure(7, 1.0).is_err());
    }

    #[test]
    fn delta_examples() {
        assert!((counterexample_delta(4, 0.0).unwrap() - 3.0 / 16.0).abs() < 1e-15);
        assert!(counterexample_delta(4, 40.0).unwrap() < 1e-6);
        for beta in [0.0, 0.5, 1.0, 2.0] {
            let closed = counterexample_delta(4, beta).unwrap();
            let generic = delta_exact(
                &lower_half(4).unwrap(),
                &Measure::CurieWeiss(cw_measure(4, beta).unwrap()),
            )
            .unwrap();
            assert!(
                (closed - generic.delta.value()).abs() < 1e-12,
                "beta {beta}"
            );
        }
    }

    #[test]
    fn epsilon_matches_brute_force_at_n4() {
        for beta in [0.0, 0.5, 1.0, 2.0, 3.0] {
            let (mc, witness) = counterexample_epsilon(4, beta).unwrap();
            let bf = epsilon_bruteforce(
                &lower_half(4).unwrap(),
                &Measure::CurieWeiss(cw_measure(4, beta).unwrap()),
            )
            .unwrap();
            assert!((mc - bf.epsilon.value()).abs() < 1e-9);
            assert!(witness.is_monotone());
            assert!(mc >= 1.0 / 6.0);
        }
    }

    #[test]
    fn mu_a_exceeds_half_by_half_the_middle() {
        let r = counterexample(6, 1.5).unwrap();
        assert!((r.mu_a - 0.5 - r.mu_mid / 2.0).abs() < 1e-12);
        assert!(r.delta_at_most_mu_mid);
    }

    #[test]
    fn transport_bounds() {
        for beta in [0.0, 1.0, 3.0] {
            let r = transport_verify(4, beta).unwrap();
            assert_eq!(r.monotone_sets, 168);
            assert!(r.headline_holds);
            assert_eq!(r.bound_violations, 0);
        }
        assert!(transport_verify(6, 1.0).is_err());
    }
}
