//! The conductance lower bound for monotone sets, the mixing-time bound it
//! implies, and the slow-mixing union-of-subcubes family.

use num_rational::Ratio;
use serde::Serialize;

use super::conductance::{conductance_exact, cut_ratio, lower_bound, CONDUCTANCE_CAP};
use super::kernel::{build_kernel, mixing_time, DEFAULT_MIX_CAP};
use crate::cube::{ExplicitSet, Frac};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// No admissible cut exists.
    Vacuous,
}

impl Verdict {
    pub fn ok(self) -> bool {
        self != Verdict::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConductanceCertificate {
    pub n: usize,
    pub set_size: usize,
    pub p_a: Frac,
    pub phi: Option<Frac>,
    pub phi_value: Option<f64>,
    /// `P(A) / (16 n)`.
    pub lower_bound: Frac,
    pub witness: Option<Vec<String>>,
    pub verdict: Verdict,
}

/// Checks `phi(A) >= P(A) / (16 n)` with `phi` computed exactly.
pub fn theorem1_certificate(a: &ExplicitSet) -> Result<ConductanceCertificate> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if !a.is_monotone() {
        return Err(Error::NotMonotone);
    }
    let c = conductance_exact(a)?;
    let lb = lower_bound(a);
    let verdict = match c.phi_ratio() {
        None => Verdict::Vacuous,
        Some(phi) if phi >= lb => Verdict::Pass,
        Some(_) => Verdict::Fail,
    };
    Ok(ConductanceCertificate {
        n: a.dim(),
        set_size: a.len(),
        p_a: Ratio::new(a.len() as u64, a.cube_size() as u64).into(),
        phi: c.phi,
        phi_value: c.phi_value(),
        lower_bound: lb.into(),
        witness: c.witness,
        verdict,
    })
}

/// `2 (16 n / P(A))^2 ln(4 * 2^n * P(A))`, natural logarithm.
pub fn corollary_value(n: usize, set_size: usize) -> f64 {
    let p = set_size as f64 / (1u64 << n) as f64;
    let r = 16.0 * n as f64 / p;
    2.0 * r * r * (4.0 * set_size as f64).ln()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingBoundReport {
    pub n: usize,
    pub set_size: usize,
    pub p_a: Frac,
    pub bound: f64,
    pub tau_mix: usize,
    pub pass: bool,
}

/// Exact `tau_mix(1/4)` against the conductance-derived upper bound.
pub fn corollary_bound(a: &ExplicitSet) -> Result<MixingBoundReport> {
    if !a.is_monotone() {
        return Err(Error::NotMonotone);
    }
    let k = build_kernel(a)?;
    let tau = mixing_time(&k, 0.25, DEFAULT_MIX_CAP)?;
    let bound = corollary_value(a.dim(), a.len());
    Ok(MixingBoundReport {
        n: a.dim(),
        set_size: a.len(),
        p_a: Ratio::new(a.len() as u64, a.cube_size() as u64).into(),
        bound,
        tau_mix: tau,
        pass: (tau as f64) <= bound,
    })
}

/// `{x : x_0 = .. = x_{m-1} = 1} ∪ {x : x_m = .. = x_{2m-1} = 1}`.
pub fn slow_family_set(n: usize, m: usize) -> Result<ExplicitSet> {
    if m == 0 || n < 2 * m {
        return Err(Error::InvalidArgument(format!(
            "need n >= 2m >= 2, got n = {n}, m = {m}"
        )));
    }
    let first = (1usize << m) - 1;
    let second = first << m;
    ExplicitSet::from_fn(n, |x| x & first == first || x & second == second)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlowFamilyReport {
    pub n: usize,
    pub m: usize,
    pub set_size: usize,
    /// Exact `P(A) = 2^{1-m} - 2^{-2m}`.
    pub p_a: Frac,
    /// The leading-order value `2^{1-m}`.
    pub p_a_leading: Frac,
    /// `Phi` of the first subcube `B`: `(m/n) 2^{-m}`.
    pub phi_first_subcube: Frac,
    /// `Phi` of `A \ B`, the half that meets the volume constraint.
    pub phi_complement: Frac,
    pub phi_exact: Option<Frac>,
    /// `2^{-m}`.
    pub phi_claim: Frac,
    pub phi_claim_holds: bool,
    pub tau_mix: Option<usize>,
    /// `2^{m-4}`.
    pub tau_lower_claim: f64,
    pub tau_claim_holds: Option<bool>,
}

/// Builds the family member and measures it. `phi` is exact when
/// `|A| <= 22`; `tau_mix` when the search stays under `mix_cap` steps.
pub fn example_slow_family(
    n: usize,
    m: usize,
    mix_cap: usize,
) -> Result<(ExplicitSet, SlowFamilyReport)> {
    let a = slow_family_set(n, m)?;
    let first = (1usize << m) - 1;
    let b = ExplicitSet::from_fn(n, |x| x & first == first)?;
    let c = ExplicitSet::from_fn(n, |x| a.contains_index(x) && !b.contains_index(x))?;
    let phi_b = cut_ratio(&a, &b)?;
    let phi_c = cut_ratio(&a, &c)?;
    let claim = Ratio::new(1, 1u64 << m);

    let phi_exact = if a.len() <= CONDUCTANCE_CAP {
        conductance_exact(&a)?.phi_ratio()
    } else {
        None
    };
    let tau = match mixing_time(&build_kernel(&a)?, 0.25, mix_cap) {
        Ok(t) => Some(t),
        Err(Error::MixingCapExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let tau_lower = 2f64.powi(m as i32 - 4);
    let phi_claim_holds = match phi_exact {
        Some(phi) => phi <= claim,
        None => phi_c <= claim,
    };
    let report = SlowFamilyReport {
        n,
        m,
        set_size: a.len(),
        p_a: Ratio::new(a.len() as u64, a.cube_size() as u64).into(),
        p_a_leading: Ratio::new(2, 1u64 << m).into(),
        phi_first_subcube: phi_b.into(),
        phi_complement: phi_c.into(),
        phi_exact: phi_exact.map(Frac::from),
        phi_claim: claim.into(),
        phi_claim_holds,
        tau_mix: tau,
        tau_lower_claim: tau_lower,
        tau_claim_holds: tau.map(|t| t as f64 >= tau_lower),
    };
    Ok((a, report))
}
