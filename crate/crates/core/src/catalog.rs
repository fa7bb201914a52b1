//! Named constructors for the sets used by the tests and the CLI.
//!
//! Set-spec grammar (coordinates are 0-based, states little-endian):
//!
//! ```text
//! full(n)
//! dictator(n, i)                 {x : x_i = 1}
//! threshold(n, k)                {x : |x| >= k}
//! subcube-union(n, m)            {x_0..x_{m-1} all 1} ∪ {x_m..x_{2m-1} all 1}
//! crossing(L)                    left-right open crossing on an L x L rhombus
//! random-monotone(n, d, seed)    up-closure of a random generator set
//! explicit(s1, s2, ...)          listed states, e.g. explicit(10, 11)
//! ```

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::cube::{BitState, ExplicitSet, OracleSet, SetRep, MAX_EXPLICIT_DIM};
use crate::error::{Error, Result};
use crate::monotone::monotone_masks;
use crate::percolation::{crossing_set, HexLattice};
use crate::rng::{draw_unit, stream};

#[derive(Clone, Debug, PartialEq)]
pub enum SetSpec {
    Full { n: usize },
    Dictator { n: usize, i: usize },
    Threshold { n: usize, k: usize },
    SubcubeUnion { n: usize, m: usize },
    Crossing { l: usize },
    RandomMonotone { n: usize, density: f64, seed: u64 },
    Explicit { n: usize, members: Vec<BitState> },
}

impl SetSpec {
    pub fn dim(&self) -> usize {
        match self {
            SetSpec::Full { n }
            | SetSpec::Dictator { n, .. }
            | SetSpec::Threshold { n, .. }
            | SetSpec::SubcubeUnion { n, .. }
            | SetSpec::RandomMonotone { n, .. }
            | SetSpec::Explicit { n, .. } => *n,
            SetSpec::Crossing { l } => l * l,
        }
    }

    /// Every spec except `explicit(..)` describes a monotone set.
    pub fn is_monotone_by_construction(&self) -> bool {
        !matches!(self, SetSpec::Explicit { .. })
    }
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetSpec::Full { n } => write!(f, "full({n})"),
            SetSpec::Dictator { n, i } => write!(f, "dictator({n},{i})"),
            SetSpec::Threshold { n, k } => write!(f, "threshold({n},{k})"),
            SetSpec::SubcubeUnion { n, m } => write!(f, "subcube-union({n},{m})"),
            SetSpec::Crossing { l } => write!(f, "crossing({l})"),
            SetSpec::RandomMonotone { n, density, seed } => {
                write!(f, "random-monotone({n},{density},{seed})")
            }
            SetSpec::Explicit { members, .. } => {
                let list: Vec<String> = members.iter().map(BitState::to_bit_string).collect();
                write!(f, "explicit({})", list.join(","))
            }
        }
    }
}

impl Serialize for SetSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for SetSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidSpec {
            spec: text.to_string(),
            reason: reason.to_string(),
        };
        let t = text.trim();
        let open = t.find('(').ok_or_else(|| bad("expected name(args)"))?;
        if !t.ends_with(')') {
            return Err(bad("missing closing parenthesis"));
        }
        let name = t[..open].trim();
        let args: Vec<&str> = t[open + 1..t.len() - 1]
            .split(',')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .collect();
        let int = |k: usize| -> Result<usize> {
            args.get(k)
                .ok_or_else(|| bad("missing argument"))?
                .parse()
                .map_err(|_| bad("expected a nonnegative integer"))
        };
        let arity = |want: usize| -> Result<()> {
            if args.len() != want {
                return Err(bad(&format!("`{name}` takes {want} argument(s)")));
            }
            Ok(())
        };
        let spec = match name {
            "full" => {
                arity(1)?;
                SetSpec::Full { n: int(0)? }
            }
            "dictator" => {
                arity(2)?;
                SetSpec::Dictator {
                    n: int(0)?,
                    i: int(1)?,
                }
            }
            "threshold" => {
                arity(2)?;
                SetSpec::Threshold {
                    n: int(0)?,
                    k: int(1)?,
                }
            }
            "subcube-union" => {
                arity(2)?;
                SetSpec::SubcubeUnion {
                    n: int(0)?,
                    m: int(1)?,
                }
            }
            "crossing" => {
                arity(1)?;
                SetSpec::Crossing { l: int(0)? }
            }
            "random-monotone" => {
                arity(3)?;
                let density: f64 = args[1]
                    .parse()
                    .map_err(|_| bad("density must be a number"))?;
                let seed = args[2]
                    .parse()
                    .map_err(|_| bad("seed must be an integer"))?;
                SetSpec::RandomMonotone {
                    n: int(0)?,
                    density,
                    seed,
                }
            }
            "explicit" => {
                let members = args
                    .iter()
                    .map(|a| BitState::parse(a))
                    .collect::<Result<Vec<_>>>()?;
                let n = members
                    .first()
                    .map(BitState::dim)
                    .ok_or_else(|| bad("explicit set needs at least one state"))?;
                if members.iter().any(|m| m.dim() != n) {
                    return Err(bad("states have different lengths"));
                }
                SetSpec::Explicit { n, members }
            }
            _ => return Err(bad("unknown set family")),
        };
        validate(&spec).map_err(|reason| bad(&reason))?;
        Ok(spec)
    }
}

fn validate(spec: &SetSpec) -> std::result::Result<(), String> {
    match *spec {
        SetSpec::Full { n: 0 } => Err("n must be >= 1".into()),
        SetSpec::Dictator { n, i } if i >= n => {
            Err(format!("coordinate {i} out of range for n = {n}"))
        }
        SetSpec::Threshold { n, k } if k > n => Err(format!("threshold {k} exceeds n = {n}")),
        SetSpec::SubcubeUnion { n, m } if m == 0 || n < 2 * m => Err("need n >= 2m >= 2".into()),
        SetSpec::Crossing { l: 0 } => Err("L must be >= 1".into()),
        SetSpec::RandomMonotone { n, density, .. } if n == 0 || !(0.0..=1.0).contains(&density) => {
            Err("need n >= 1 and density in [0, 1]".into())
        }
        SetSpec::RandomMonotone { n, .. } if n > MAX_EXPLICIT_DIM => {
            Err(format!("random-monotone needs n <= {MAX_EXPLICIT_DIM}"))
        }
        _ => Ok(()),
    }
}

fn subcube_masks(m: usize) -> (usize, usize) {
    let first = (1usize << m) - 1;
    (first, first << m)
}

/// Materializes a spec: explicit when the cube fits the cap, otherwise an
/// upward-closed oracle.
pub fn build(spec: &SetSpec) -> Result<SetRep> {
    validate(spec).map_err(|reason| Error::InvalidSpec {
        spec: spec.to_string(),
        reason,
    })?;
    let n = spec.dim();
    let label = spec.to_string();
    if let SetSpec::Crossing { l } = *spec {
        let lat = HexLattice::new(l);
        return crossing_set(&lat, lat.sites() <= crate::percolation::EXPLICIT_MAX_SITES);
    }
    if let SetSpec::Explicit { members, .. } = spec {
        return Ok(ExplicitSet::from_states(n, members)?.into());
    }
    if n <= MAX_EXPLICIT_DIM {
        let set = match *spec {
            SetSpec::Full { n } => ExplicitSet::full(n)?,
            SetSpec::Dictator { n, i } => ExplicitSet::from_fn(n, |x| x >> i & 1 == 1)?,
            SetSpec::Threshold { n, k } => {
                ExplicitSet::from_fn(n, |x| x.count_ones() as usize >= k)?
            }
            SetSpec::SubcubeUnion { n, m } => {
                let (a, b) = subcube_masks(m);
                ExplicitSet::from_fn(n, |x| x & a == a || x & b == b)?
            }
            SetSpec::RandomMonotone { n, density, seed } => random_monotone(n, density, seed)?,
            SetSpec::Crossing { .. } | SetSpec::Explicit { .. } => unreachable!(),
        };
        debug_assert!(set.is_monotone());
        return Ok(set.into());
    }
    let contains: crate::cube::MembershipFn = match *spec {
        SetSpec::Full { .. } => Arc::new(|_: &BitState| true),
        SetSpec::Dictator { i, .. } => Arc::new(move |x: &BitState| x.get(i)),
        SetSpec::Threshold { k, .. } => Arc::new(move |x: &BitState| x.weight() >= k),
        SetSpec::SubcubeUnion { m, .. } => {
            Arc::new(move |x: &BitState| (0..m).all(|i| x.get(i)) || (m..2 * m).all(|i| x.get(i)))
        }
        _ => unreachable!(),
    };
    Ok(OracleSet::new(n, label, contains).upward_closed().into())
}

/// Like [`build`], but rejects a non-monotone `explicit(..)` list.
pub fn build_monotone(spec: &SetSpec) -> Result<SetRep> {
    let set = build(spec)?;
    if let SetRep::Explicit(s) = &set {
        if !spec.is_monotone_by_construction() && !s.is_monotone() {
            return Err(Error::NotMonotone);
        }
    }
    Ok(set)
}

/// Up-closure of a random generator set: state `x` is a generator with
/// probability `density^(n - |x| + 1)`, decided by one uniform draw per
/// state in index order. The same seed couples all densities, so the set
/// grows with `density`.
pub fn random_monotone(n: usize, density: f64, seed: u64) -> Result<ExplicitSet> {
    let mut rng = stream(seed, 0);
    let generators = ExplicitSet::from_fn(n, |x| {
        let u = draw_unit(&mut rng);
        u < density.powi((n - x.count_ones() as usize + 1) as i32)
    })?;
    Ok(generators.up_closure())
}

/// All monotone subsets of `{0,1}^n`, including the empty set and the cube.
pub fn enumerate_monotone(n: usize) -> Result<Vec<ExplicitSet>> {
    Ok(monotone_masks(n)?
        .iter()
        .map(|&mask| ExplicitSet::from_mask(n, mask))
        .collect())
}

/// The named monotone sets used for the certificate checks at dimension `n`.
pub fn standard_catalog(n: usize) -> Vec<SetSpec> {
    let mut specs = vec![SetSpec::Full { n }];
    specs.extend((0..n).map(|i| SetSpec::Dictator { n, i }));
    specs.extend((1..=n).map(|k| SetSpec::Threshold { n, k }));
    specs.extend((1..=n / 2).map(|m| SetSpec::SubcubeUnion { n, m }));
    let l = (n as f64).sqrt() as usize;
    if l * l == n {
        specs.push(SetSpec::Crossing { l });
    }
    for (density, seed) in [(0.3, 1), (0.5, 1), (0.5, 2), (0.7, 3), (0.9, 4)] {
        specs.push(SetSpec::RandomMonotone { n, density, seed });
    }
    specs
}
