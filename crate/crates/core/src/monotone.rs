//! Property-testing quantities for monotonicity on the hypercube.
//!
//! * `delta`: the fraction of directed up-edges `(x, y)` with `x in S` and
//!   `y not in S` (weighted by `mu(x) / n` for a general measure);
//! * `epsilon`: the distance from `S` to the nearest monotone set,
//!   `min_A m(S xor A)`.
//!
//! The tester inequality `delta >= epsilon / n` is checked in exact integer
//! arithmetic under the uniform measure.

use std::sync::OnceLock;

use num_rational::Ratio;
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::cube::{
    up_neighbor_indices, BitState, ExplicitSet, Frac, Measure, Prob, SetRep, MAX_EXPLICIT_DIM,
};
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::rng::{draw_below, draw_state};

/// Largest dimension for enumerating every monotone set.
pub const BRUTE_FORCE_MAX_DIM: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViolationStats {
    pub violating_pairs: u64,
    pub delta: Prob,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BruteForce,
    MinCut,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneDistance {
    pub epsilon: Prob,
    /// `|S xor witness|` under the uniform measure.
    pub mismatch_count: Option<u64>,
    pub witness: ExplicitSet,
    pub method: Method,
}

fn require_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    Ok(())
}

pub fn delta_exact(s: &ExplicitSet, m: &Measure) -> Result<ViolationStats> {
    let n = s.dim();
    require_dim(n)?;
    m.check_dim(n)?;
    let per_state = |x: usize| -> u64 {
        if !s.contains_index(x) {
            return 0;
        }
        up_neighbor_indices(x, n)
            .filter(|&y| !s.contains_index(y))
            .count() as u64
    };
    let size = s.cube_size();
    if m.is_uniform() {
        let violating_pairs: u64 = (0..size).into_par_iter().map(per_state).sum();
        let den = n as u64 * size as u64;
        return Ok(ViolationStats {
            violating_pairs,
            delta: Prob::exact(violating_pairs, den),
        });
    }
    let (violating_pairs, mass) = (0..size)
        .into_par_iter()
        .map(|x| {
            let c = per_state(x);
            (c, c as f64 * m.weight(x))
        })
        .reduce(|| (0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(ViolationStats {
        violating_pairs,
        delta: Prob::Approx(mass / n as f64),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampledDelta {
    pub samples: u64,
    pub violations: u64,
    pub estimate: f64,
    pub std_error: f64,
}

/// Monte Carlo estimate of `delta` under the uniform measure: draw a
/// uniform state `x` and coordinate `i`; the draw is a violation when
/// `x_i = 0`, `x in S` and `x + e_i not in S`. The violation probability is
/// exactly `delta`.
pub fn delta_sampled<R: RngCore + ?Sized>(
    s: &SetRep,
    samples: u64,
    rng: &mut R,
) -> Result<SampledDelta> {
    let n = s.dim();
    require_dim(n)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let mut violations = 0;
    for _ in 0..samples {
        let mut x = draw_state(rng, n);
        let i = draw_below(rng, n as u64) as usize;
        if x.get(i) || !s.contains(&x) {
            continue;
        }
        x.set(i, true);
        if !s.contains(&x) {
            violations += 1;
        }
    }
    let p = violations as f64 / samples as f64;
    Ok(SampledDelta {
        samples,
        violations,
        estimate: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

fn mask_is_monotone(n: usize, mask: u64) -> bool {
    (0..1usize << n)
        .all(|x| mask >> x & 1 == 0 || up_neighbor_indices(x, n).all(|y| mask >> y & 1 == 1))
}

/// Every monotone subset of `{0,1}^n` (n <= 4) as a membership mask, in
/// increasing mask order.
pub fn monotone_masks(n: usize) -> Result<&'static [u64]> {
    static CACHE: [OnceLock<Vec<u64>>; BRUTE_FORCE_MAX_DIM + 1] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    if n > BRUTE_FORCE_MAX_DIM {
        return Err(Error::BruteForceCap {
            n,
            cap: BRUTE_FORCE_MAX_DIM,
        });
    }
    Ok(CACHE[n].get_or_init(|| {
        (0..1u64 << (1 << n))
            .filter(|&mask| mask_is_monotone(n, mask))
            .collect()
    }))
}

pub fn epsilon_bruteforce(s: &ExplicitSet, m: &Measure) -> Result<MonotoneDistance> {
    let n = s.dim();
    m.check_dim(n)?;
    let candidates = monotone_masks(n)?;
    let target = s.as_mask().expect("n <= 4");
    if m.is_uniform() {
        let (count, best) = candidates
            .iter()
            .map(|&a| ((a ^ target).count_ones() as u64, a))
            .min_by_key(|p| p.0)
            .unwrap();
        return Ok(MonotoneDistance {
            epsilon: Prob::exact(count, 1 << n),
            mismatch_count: Some(count),
            witness: ExplicitSet::from_mask(n, best),
            method: Method::BruteForce,
        });
    }
    let weights = m.weights();
    let mass = |mask: u64| -> f64 {
        (0..1usize << n)
            .filter(|&x| mask >> x & 1 == 1)
            .map(|x| weights[x])
            .sum()
    };
    let (eps, best) =
        candidates
            .iter()
            .map(|&a| (mass(a ^ target), a))
            .fold(
                (f64::INFINITY, 0),
                |acc, cur| if cur.0 < acc.0 { cur } else { acc },
            );
    Ok(MonotoneDistance {
        epsilon: Prob::Approx(eps),
        mismatch_count: None,
        witness: ExplicitSet::from_mask(n, best),
        method: Method::BruteForce,
    })
}

/// Nearest monotone set by maximum-weight closure.
///
/// Nodes are the states plus a source and sink. A state on the source side
/// of the cut belongs to the witness `A`. Arcs:
/// * `source -> x` with capacity `m(x)` for `x in S` (cut when `x not in A`);
/// * `x -> sink` with capacity `m(x)` for `x not in S` (cut when `x in A`);
/// * `x -> y` with unbounded capacity for every cover `x < y`, so `A` is
///   closed upward.
///
/// The cut value is then exactly `m(S xor A)`.
pub fn epsilon_mincut(s: &ExplicitSet, m: &Measure) -> Result<MonotoneDistance> {
    let n = s.dim();
    if n > MAX_EXPLICIT_DIM {
        return Err(Error::ExplicitCap {
            n,
            cap: MAX_EXPLICIT_DIM,
        });
    }
    m.check_dim(n)?;
    let size = s.cube_size();
    let (source, sink) = (size, size + 1);
    if m.is_uniform() {
        let unbounded = size as u64 + 1;
        let mut net = FlowNetwork::<u64>::new(size + 2);
        build_closure_network(&mut net, s, |_| 1, unbounded);
        let flow = net.max_flow(source, sink, unbounded);
        let witness = witness_from_cut(&net, n)?;
        let count = s.symmetric_difference(&witness)?.len() as u64;
        debug_assert_eq!(count, flow);
        return Ok(MonotoneDistance {
            epsilon: Prob::exact(count, size as u64),
            mismatch_count: Some(count),
            witness,
            method: Method::MinCut,
        });
    }
    let weights = m.weights();
    let total: f64 = weights.iter().sum();
    let unbounded = total + 1.0;
    let mut net = FlowNetwork::<f64>::new(size + 2);
    build_closure_network(&mut net, s, |x| weights[x], unbounded);
    net.max_flow(source, sink, unbounded);
    let witness = witness_from_cut(&net, n)?;
    let eps: f64 = s
        .symmetric_difference(&witness)?
        .iter()
        .map(|x| weights[x])
        .sum();
    Ok(MonotoneDistance {
        epsilon: Prob::Approx(eps),
        mismatch_count: None,
        witness,
        method: Method::MinCut,
    })
}

fn build_closure_network<C: crate::flow::Capacity>(
    net: &mut FlowNetwork<C>,
    s: &ExplicitSet,
    weight: impl Fn(usize) -> C,
    unbounded: C,
) {
    let n = s.dim();
    let size = s.cube_size();
    let (source, sink) = (size, size + 1);
    for x in 0..size {
        let w = weight(x);
        if w.is_positive() {
            if s.contains_index(x) {
                net.add_edge(source, x, w);
            } else {
                net.add_edge(x, sink, w);
            }
        }
        for y in up_neighbor_indices(x, n) {
            net.add_edge(x, y, unbounded);
        }
    }
}

fn witness_from_cut<C: crate::flow::Capacity>(
    net: &FlowNetwork<C>,
    n: usize,
) -> Result<ExplicitSet> {
    let side = net.source_side(1 << n);
    let witness = ExplicitSet::from_fn(n, |x| side[x])?;
    debug_assert!(witness.is_monotone());
    Ok(witness)
}

/// Exact comparison of `delta` and `epsilon / n` under the uniform measure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GglrsCheck {
    pub n: usize,
    pub bitmap: String,
    pub violating_pairs: u64,
    pub mismatch_count: u64,
    pub delta: Frac,
    pub epsilon: Frac,
    pub method: Method,
    pub pass: bool,
}

/// `delta >= epsilon / n`. With `delta = v / (n 2^n)` and `epsilon = k / 2^n`
/// this is the integer comparison `v >= k`.
pub fn check_gglrs(s: &ExplicitSet) -> Result<GglrsCheck> {
    let n = s.dim();
    let m = Measure::uniform(n);
    let stats = delta_exact(s, &m)?;
    let dist = epsilon_mincut(s, &m)?;
    gglrs_from_parts(s, &stats, &dist)
}

pub(crate) fn gglrs_from_parts(
    s: &ExplicitSet,
    stats: &ViolationStats,
    dist: &MonotoneDistance,
) -> Result<GglrsCheck> {
    let n = s.dim();
    let delta = stats
        .delta
        .as_exact()
        .ok_or_else(|| Error::InvalidArgument("uniform measure required".into()))?;
    let epsilon = dist
        .epsilon
        .as_exact()
        .ok_or_else(|| Error::InvalidArgument("uniform measure required".into()))?;
    let k = dist
        .mismatch_count
        .expect("uniform distance carries a count");
    let pass = delta * Ratio::from_integer(n as u64) >= epsilon;
    debug_assert_eq!(pass, stats.violating_pairs >= k);
    Ok(GglrsCheck {
        n,
        bitmap: s.to_hex(),
        violating_pairs: stats.violating_pairs,
        mismatch_count: k,
        delta: delta.into(),
        epsilon: epsilon.into(),
        method: dist.method,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GglrsSweep {
    pub n: usize,
    pub subsets: u64,
    pub failures: u64,
    /// Number of subsets where `delta = epsilon / n` exactly.
    pub tight: u64,
    /// Bitmaps of failing subsets (at most 16 listed).
    pub failing: Vec<String>,
}

/// Checks the tester inequality on every subset of `{0,1}^n`, n <= 4.
pub fn gglrs_exhaustive(n: usize) -> Result<GglrsSweep> {
    if n > BRUTE_FORCE_MAX_DIM {
        return Err(Error::BruteForceCap {
            n,
            cap: BRUTE_FORCE_MAX_DIM,
        });
    }
    require_dim(n)?;
    let m = Measure::uniform(n);
    let checks: Vec<GglrsCheck> = (0..1u64 << (1 << n))
        .into_par_iter()
        .map(|mask| {
            let s = ExplicitSet::from_mask(n, mask);
            let stats = delta_exact(&s, &m)?;
            let dist = epsilon_mincut(&s, &m)?;
            gglrs_from_parts(&s, &stats, &dist)
        })
        .collect::<Result<_>>()?;
    let failing: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.bitmap.clone())
        .collect();
    Ok(GglrsSweep {
        n,
        subsets: checks.len() as u64,
        failures: failing.len() as u64,
        tight: checks
            .iter()
            .filter(|c| c.violating_pairs == c.mismatch_count)
            .count() as u64,
        failing: failing.into_iter().take(16).collect(),
    })
}

/// The tester inequality under a general measure, evaluated in floating point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedCheck {
    pub n: usize,
    pub delta: f64,
    pub epsilon: f64,
    /// `n * delta / epsilon`; below one means the inequality fails.
    pub ratio: f64,
    pub holds: bool,
}

pub fn check_weighted(s: &ExplicitSet, m: &Measure) -> Result<WeightedCheck> {
    let n = s.dim();
    let delta = delta_exact(s, m)?.delta.value();
    let epsilon = epsilon_mincut(s, m)?.epsilon.value();
    let ratio = if epsilon > 0.0 {
        n as f64 * delta / epsilon
    } else {
        f64::INFINITY
    };
    Ok(WeightedCheck {
        n,
        delta,
        epsilon,
        ratio,
        holds: n as f64 * delta >= epsilon,
    })
}

/// Convenience: is `x` the lower end of a violating up-edge along `i`.
pub fn is_violation(s: &SetRep, x: &BitState, i: usize) -> bool {
    if x.get(i) || !s.contains(x) {
        return false;
    }
    let mut y = x.clone();
    y.set(i, true);
    !s.contains(&y)
}
