//! The censored single-site resampling chain on a set `A` and the
//! rejection-sampling baseline.
//!
//! One step picks a coordinate `i` uniformly, draws a fair bit `b`, and
//! moves to `x` with `x_i := b` when that state lies in `A`; otherwise the
//! chain stays put. The two draws are taken in the order `(i, b)`.

use std::collections::HashMap;
use std::io::Write;

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::cube::{BitState, ExplicitSet, SetRep};
use crate::error::{Error, Result};
use crate::rng::{draw_below, draw_bit, draw_state, stream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Event {
    /// The proposal differed from the current state and stayed in `A`.
    Accept,
    /// The proposal left `A` and was replaced by a hold.
    Censor,
    /// The proposed bit equalled the current bit.
    Hold,
}

impl Event {
    pub fn as_str(self) -> &'static str {
        match self {
            Event::Accept => "accept",
            Event::Censor => "censor",
            Event::Hold => "hold",
        }
    }
}

/// Censored dynamics on a fixed set. For an upward-closed set, raising a
/// coordinate cannot leave it, so those proposals skip the membership query.
#[derive(Clone, Debug)]
pub struct CensoredChain<'a> {
    set: &'a SetRep,
    upward_closed: bool,
}

impl<'a> CensoredChain<'a> {
    pub fn new(set: &'a SetRep) -> Self {
        CensoredChain {
            set,
            upward_closed: set.known_upward_closed(),
        }
    }

    pub fn set(&self) -> &SetRep {
        self.set
    }

    pub fn step<R: RngCore + ?Sized>(&self, x: &mut BitState, rng: &mut R) -> Event {
        let i = draw_below(rng, x.dim() as u64) as usize;
        let b = draw_bit(rng);
        if x.get(i) == b {
            return Event::Hold;
        }
        x.set(i, b);
        if (b && self.upward_closed) || self.set.contains(x) {
            Event::Accept
        } else {
            x.set(i, !b);
            Event::Censor
        }
    }
}

/// One step of the chain from `x`; `x` must lie in `a`.
pub fn step<R: RngCore + ?Sized>(
    x: &BitState,
    a: &SetRep,
    rng: &mut R,
) -> Result<(BitState, Event)> {
    if !a.contains(x) {
        return Err(Error::StateNotInSet(x.to_bit_string()));
    }
    let mut y = x.clone();
    let event = CensoredChain {
        set: a,
        upward_closed: false,
    }
    .step(&mut y, rng);
    Ok((y, event))
}

#[derive(Clone, Debug)]
pub struct ChainConfig {
    pub set: SetRep,
    pub x0: BitState,
    pub steps: u64,
    pub seed: u64,
    /// Record every `thin`-th step.
    pub thin: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub step: u64,
    pub state: String,
    pub event: Event,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub records: Vec<Record>,
    pub states: Vec<BitState>,
    pub accepted: u64,
    pub censored: u64,
    pub held: u64,
    pub final_state: BitState,
}

impl Trajectory {
    pub fn steps(&self) -> u64 {
        self.accepted + self.censored + self.held
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "step,state,event")?;
        for r in &self.records {
            writeln!(out, "{},{},{}", r.step, r.state, r.event.as_str())?;
        }
        Ok(())
    }
}

fn validate(cfg: &ChainConfig) -> Result<()> {
    if cfg.x0.dim() != cfg.set.dim() {
        return Err(Error::DimensionMismatch {
            left: cfg.set.dim(),
            right: cfg.x0.dim(),
        });
    }
    if cfg.set.dim() == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    if cfg.thin == 0 {
        return Err(Error::InvalidArgument("thin must be >= 1".into()));
    }
    if !cfg.set.contains(&cfg.x0) {
        return Err(Error::StateNotInSet(cfg.x0.to_bit_string()));
    }
    Ok(())
}

fn run_with<R: RngCore>(cfg: &ChainConfig, mut rng: R) -> Result<Trajectory> {
    validate(cfg)?;
    let chain = CensoredChain::new(&cfg.set);
    let mut x = cfg.x0.clone();
    let mut traj = Trajectory {
        records: Vec::new(),
        states: Vec::new(),
        accepted: 0,
        censored: 0,
        held: 0,
        final_state: x.clone(),
    };
    for t in 1..=cfg.steps {
        let event = chain.step(&mut x, &mut rng);
        match event {
            Event::Accept => traj.accepted += 1,
            Event::Censor => traj.censored += 1,
            Event::Hold => traj.held += 1,
        }
        if t % cfg.thin == 0 {
            traj.records.push(Record {
                step: t,
                state: x.to_bit_string(),
                event,
            });
            traj.states.push(x.clone());
        }
    }
    traj.final_state = x;
    Ok(traj)
}

/// Runs the chain for `cfg.steps` steps; deterministic in `cfg.seed`.
pub fn run(cfg: &ChainConfig) -> Result<Trajectory> {
    run_with(cfg, stream(cfg.seed, 0))
}

/// Independent replicas, replica `r` using stream `(seed, r)`.
pub fn run_replicas(cfg: &ChainConfig, replicas: u64) -> Result<Vec<Trajectory>> {
    (0..replicas)
        .into_par_iter()
        .map(|r| run_with(cfg, stream(cfg.seed, r)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RejectionSample {
    pub state: BitState,
    pub tries: u64,
}

/// Draws uniform states until one lands in `a`.
pub fn rejection_sample<R: RngCore + ?Sized>(
    a: &SetRep,
    rng: &mut R,
    max_tries: u64,
) -> Result<RejectionSample> {
    if max_tries == 0 {
        return Err(Error::InvalidArgument("max_tries must be >= 1".into()));
    }
    for tries in 1..=max_tries {
        let x = draw_state(rng, a.dim());
        if a.contains(&x) {
            return Ok(RejectionSample { state: x, tries });
        }
    }
    Err(Error::RejectionExhausted { tries: max_tries })
}

/// Empirical frequencies of the packed states in `samples`.
pub fn empirical_counts(samples: &[BitState]) -> HashMap<u64, u64> {
    let mut counts = HashMap::new();
    for s in samples {
        *counts
            .entry(s.index().expect("state fits a word"))
            .or_insert(0) += 1;
    }
    counts
}

/// Total-variation distance between the empirical law of `samples` and the
/// uniform distribution on `a`.
pub fn empirical_tv(samples: &[BitState], a: &ExplicitSet) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(bad) = samples.iter().find(|s| !a.contains(s)) {
        return Err(Error::StateNotInSet(bad.to_bit_string()));
    }
    let counts = empirical_counts(samples);
    let total = samples.len() as f64;
    let target = 1.0 / a.len() as f64;
    let tv: f64 = a
        .iter()
        .map(|x| (counts.get(&(x as u64)).copied().unwrap_or(0) as f64 / total - target).abs())
        .sum();
    Ok(0.5 * tv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::OracleSet;
    use std::sync::Arc;

    fn explicit(n: usize, f: impl Fn(usize) -> bool) -> SetRep {
        SetRep::from(ExplicitSet::from_fn(n, f).unwrap())
    }

    fn cfg(set: SetRep, x0: &str, steps: u64, seed: u64, thin: u64) -> ChainConfig {
        ChainConfig {
            set,
            x0: BitState::parse(x0).unwrap(),
            steps,
            seed,
            thin,
        }
    }

    #[test]
    fn singleton_set_never_moves() {
        let a = explicit(2, |x| x == 3);
        let mut rng = stream(1, 0);
        let mut x = BitState::parse("11").unwrap();
        for _ in 0..1000 {
            let (y, _) = step(&x, &a, &mut rng).unwrap();
            x = y;
            assert_eq!(x.to_bit_string(), "11");
        }
    }

    #[test]
    fn step_rejects_outside_state() {
        let a = explicit(2, |x| x == 3);
        assert!(matches!(
            step(&BitState::parse("00").unwrap(), &a, &mut stream(0, 0)),
            Err(Error::StateNotInSet(_))
        ));
    }

    #[test]
    fn unconstrained_marginals_are_fair() {
        let a = explicit(5, |_| true);
        let t = run(&cfg(a, "00000", 100_000, 17, 1)).unwrap();
        let n = t.states.len() as f64;
        for i in 0..5 {
            let ones = t.states.iter().filter(|s| s.get(i)).count() as f64;
            // generous band: successive samples are correlated
            assert!(
                (ones / n - 0.5).abs() < 4.0 * (0.25 / n).sqrt() * 5.0,
                "coordinate {i}: {}",
                ones / n
            );
        }
        assert_eq!(t.censored, 0);
    }

    #[test]
    fn dictator_chain_is_uniform_on_set() {
        let a = explicit(2, |x| x & 1 == 1);
        let t = run(&cfg(a, "10", 200_000, 3, 5)).unwrap();
        let on_top = t.states.iter().filter(|s| s.get(1)).count() as f64 / t.states.len() as f64;
        assert!((on_top - 0.5).abs() < 0.01, "{on_top}");
        assert!(t.censored > 0);
    }

    #[test]
    fn run_contract() {
        let a = explicit(3, |x| x.count_ones() >= 2);
        let zero = run(&cfg(a.clone(), "110", 0, 9, 1)).unwrap();
        assert_eq!(zero.final_state.to_bit_string(), "110");
        assert!(zero.records.is_empty());

        let t1 = run(&cfg(a.clone(), "110", 5000, 9, 3)).unwrap();
        let t2 = run(&cfg(a.clone(), "110", 5000, 9, 3)).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(t1.steps(), 5000);
        assert!(t1.states.iter().all(|s| a.contains(s)));
        assert_eq!(t1.records.len(), 5000 / 3);

        assert!(matches!(
            run(&cfg(a.clone(), "100", 10, 0, 1)),
            Err(Error::StateNotInSet(_))
        ));
        assert!(run(&cfg(a, "110", 10, 0, 0)).is_err());
    }

    #[test]
    fn upward_shortcut_does_not_change_trajectory() {
        let up = ExplicitSet::from_fn(4, |x| x.count_ones() >= 2).unwrap();
        let explicit_rep = SetRep::from(up.clone());
        let oracle_rep = SetRep::from(OracleSet::new(
            4,
            "threshold",
            Arc::new(|x: &BitState| x.weight() >= 2),
        ));
        let a = run(&cfg(explicit_rep, "1100", 20_000, 5, 1)).unwrap();
        let b = run(&cfg(oracle_rep, "1100", 20_000, 5, 1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn replicas_differ_but_are_reproducible() {
        let a = explicit(3, |x| x != 0);
        let c = cfg(a, "111", 200, 42, 1);
        let r1 = run_replicas(&c, 3).unwrap();
        let r2 = run_replicas(&c, 3).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1[0], run(&c).unwrap());
        assert_ne!(r1[0], r1[1]);
    }

    #[test]
    fn rejection_examples() {
        let full = explicit(3, |_| true);
        assert_eq!(
            rejection_sample(&full, &mut stream(0, 0), 1).unwrap().tries,
            1
        );

        let half = explicit(3, |x| x & 1 == 1);
        let mut rng = stream(8, 0);
        let runs = 20_000;
        let total: u64 = (0..runs)
            .map(|_| rejection_sample(&half, &mut rng, 1000).unwrap().tries)
            .sum();
        let mean = total as f64 / runs as f64;
        // geometric(1/2): mean 2, variance 2
        assert!(
            (mean - 2.0).abs() < 4.0 * (2.0 / runs as f64).sqrt(),
            "{mean}"
        );

        let none = SetRep::from(OracleSet::new(3, "none", Arc::new(|_: &BitState| false)));
        assert!(matches!(
            rejection_sample(&none, &mut rng, 50),
            Err(Error::RejectionExhausted { tries: 50 })
        ));
    }

    #[test]
    fn tv_examples() {
        let a = ExplicitSet::from_fn(3, |x| x & 1 == 1).unwrap();
        let each: Vec<BitState> = a
            .iter()
            .map(|x| BitState::from_index(3, x as u64).unwrap())
            .collect();
        assert!(empirical_tv(&each, &a).unwrap().abs() < 1e-15);
        let same = vec![BitState::parse("111").unwrap(); 10];
        assert!((empirical_tv(&same, &a).unwrap() - 0.75).abs() < 1e-15);
        assert!(empirical_tv(&[BitState::parse("000").unwrap()], &a).is_err());
    }

    #[test]
    fn long_run_tv_is_small() {
        let a = ExplicitSet::from_fn(4, |x| x & 1 == 1).unwrap();
        let t = run(&cfg(SetRep::from(a.clone()), "1000", 1_000_000, 23, 10)).unwrap();
        assert!(empirical_tv(&t.states, &a).unwrap() < 0.02);
    }

    #[test]
    fn csv_layout() {
        let a = explicit(2, |_| true);
        let t = run(&cfg(a, "00", 4, 1, 2)).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "step,state,event");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("2,"));
    }
}
