//! Critical site percolation on an `L x L` rhombus of hexagonal cells and
//! the left-right crossing event.
//!
//! Cells are indexed `(row, col)`, bit `row * L + col`. Hexagonal cells
//! touch along the triangular-lattice neighbour rule `(i±1, j)`, `(i, j±1)`,
//! `(i+1, j-1)`, `(i-1, j+1)`. A crossing is an open path from column 0 to
//! column `L - 1`. The rhombus is self-dual, so at `p = 1/2` exactly half of
//! all configurations cross.

use std::collections::VecDeque;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{run, ChainConfig};
use crate::cube::{BitState, ExplicitSet, Frac, OracleSet, SetRep};
use crate::error::{Error, Result};
use crate::rng::{draw_state, stream};

/// Largest lattice (in sites) materialized as an explicit set.
pub const EXPLICIT_MAX_SITES: usize = 16;
/// Largest lattice (in sites) for exact crossing-probability enumeration.
pub const EXACT_MAX_SITES: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HexLattice {
    pub l: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Geometry {
    pub lattice: &'static str,
    pub side: usize,
    pub neighbor_rule: &'static str,
    pub crossing: &'static str,
}

const OFFSETS: [(isize, isize); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];

impl HexLattice {
    pub fn new(l: usize) -> Self {
        assert!(l >= 1, "lattice side must be >= 1");
        HexLattice { l }
    }

    pub fn sites(&self) -> usize {
        self.l * self.l
    }

    pub fn site(&self, row: usize, col: usize) -> usize {
        row * self.l + col
    }

    pub fn neighbors(&self, site: usize) -> impl Iterator<Item = usize> + '_ {
        let (r, c) = ((site / self.l) as isize, (site % self.l) as isize);
        let l = self.l as isize;
        OFFSETS.iter().filter_map(move |&(dr, dc)| {
            let (nr, nc) = (r + dr, c + dc);
            (0..l).contains(&nr).then_some(())?;
            (0..l).contains(&nc).then_some(())?;
            Some((nr * l + nc) as usize)
        })
    }

    pub fn geometry(&self) -> Geometry {
        Geometry {
            lattice: "triangular-site rhombus (hexagonal cells)",
            side: self.l,
            neighbor_rule: "(i±1,j) (i,j±1) (i+1,j-1) (i-1,j+1)",
            crossing: "open path from column 0 to column L-1",
        }
    }
}

/// Breadth-first search over open sites from the left column.
pub fn has_crossing(config: &BitState, lat: &HexLattice) -> bool {
    if config.dim() != lat.sites() {
        return false;
    }
    let l = lat.l;
    let mut seen = vec![false; lat.sites()];
    let mut queue = VecDeque::new();
    for row in 0..l {
        let s = lat.site(row, 0);
        if config.get(s) {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        if s % l == l - 1 {
            return true;
        }
        for t in lat.neighbors(s) {
            if !seen[t] && config.get(t) {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    false
}

pub fn crossing_oracle(lat: &HexLattice) -> OracleSet {
    let lat = *lat;
    OracleSet::new(
        lat.sites(),
        format!("crossing({})", lat.l),
        Arc::new(move |x: &BitState| has_crossing(x, &lat)),
    )
    .upward_closed()
}

/// The crossing event as a set; `explicit` enumerates it (at most 16 sites).
pub fn crossing_set(lat: &HexLattice, explicit: bool) -> Result<SetRep> {
    let oracle = crossing_oracle(lat);
    if !explicit {
        return Ok(oracle.into());
    }
    if lat.sites() > EXPLICIT_MAX_SITES {
        return Err(Error::SizeCap {
            what: "explicit crossing set (sites)",
            size: lat.sites(),
            cap: EXPLICIT_MAX_SITES,
        });
    }
    Ok(oracle.to_explicit()?.into())
}

/// Row 0 fully open, everything else closed.
pub fn seed_crossing(lat: &HexLattice) -> BitState {
    let mut x = BitState::zeros(lat.sites());
    for col in 0..lat.l {
        x.set(lat.site(0, col), true);
    }
    x
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactCrossing {
    pub side: usize,
    pub crossing: u64,
    pub total: u64,
    pub probability: Frac,
}

pub fn crossing_probability_exact(lat: &HexLattice) -> Result<ExactCrossing> {
    let n = lat.sites();
    if n > EXACT_MAX_SITES {
        return Err(Error::SizeCap {
            what: "exact crossing enumeration (sites)",
            size: n,
            cap: EXACT_MAX_SITES,
        });
    }
    let total = 1u64 << n;
    let crossing = (0..total)
        .into_par_iter()
        .filter(|&x| has_crossing(&BitState::from_index(n, x).unwrap(), lat))
        .count() as u64;
    Ok(ExactCrossing {
        side: lat.l,
        crossing,
        total,
        probability: num_rational::Ratio::new(crossing, total).into(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McCrossing {
    pub side: usize,
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub std_error: f64,
}

/// Fraction of uniform configurations that cross, with its binomial
/// standard error.
pub fn crossing_probability_mc(lat: &HexLattice, samples: u64, seed: u64) -> Result<McCrossing> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let mut rng = stream(seed, 0);
    let hits = (0..samples)
        .filter(|_| has_crossing(&draw_state(&mut rng, lat.sites()), lat))
        .count() as u64;
    let p = hits as f64 / samples as f64;
    Ok(McCrossing {
        side: lat.l,
        samples,
        hits,
        estimate: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

/// Censored resampling started from [`seed_crossing`]; the result always crosses.
pub fn sample_crossing(lat: &HexLattice, steps: u64, seed: u64) -> Result<BitState> {
    let cfg = ChainConfig {
        set: crossing_oracle(lat).into(),
        x0: seed_crossing(lat),
        steps,
        seed,
        thin: u64::MAX,
    };
    Ok(run(&cfg)?.final_state)
}

/// `L` lines of `0`/`1`, one per row.
pub fn config_to_rows(config: &BitState, lat: &HexLattice) -> String {
    let mut out = String::with_capacity(lat.sites() + lat.l);
    for row in 0..lat.l {
        for col in 0..lat.l {
            out.push(if config.get(lat.site(row, col)) {
                '1'
            } else {
                '0'
            });
        }
        out.push('\n');
    }
    out
}

pub fn config_from_rows(text: &str) -> Result<(HexLattice, BitState)> {
    let rows: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .collect();
    let l = rows.len();
    if l == 0 || rows.iter().any(|r| r.len() != l) {
        return Err(Error::InvalidState(
            "configuration must be L lines of L characters".into(),
        ));
    }
    let lat = HexLattice::new(l);
    Ok((lat, BitState::parse(&rows.concat())?))
}

/// Membership table of the explicit crossing set, for small lattices.
pub fn crossing_members(lat: &HexLattice) -> Result<ExplicitSet> {
    crossing_set(lat, true)?.into_explicit()
}
