use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use super::state::{index_to_bit_string, up_neighbor_indices, BitState};
use crate::error::{Error, Result};

/// Largest dimension for which a membership bitmap of `2^n` flags is built.
pub const MAX_EXPLICIT_DIM: usize = 20;

/// A subset of `{0,1}^n` stored as a bitmap indexed by packed state.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExplicitSet {
    n: usize,
    words: Vec<u64>,
}

impl ExplicitSet {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_EXPLICIT_DIM {
            return Err(Error::ExplicitCap {
                n,
                cap: MAX_EXPLICIT_DIM,
            });
        }
        Ok(ExplicitSet {
            n,
            words: vec![0; (1usize << n).div_ceil(64)],
        })
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::from_fn(n, |_| true)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        let mut set = Self::empty(n)?;
        for x in 0..1usize << n {
            if f(x) {
                set.insert(x);
            }
        }
        Ok(set)
    }

    pub fn from_indices(n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut set = Self::empty(n)?;
        for x in members {
            if x >> n != 0 {
                return Err(Error::InvalidArgument(format!(
                    "index {x} is not a state of {{0,1}}^{n}"
                )));
            }
            set.insert(x);
        }
        Ok(set)
    }

    pub fn from_states<'a>(
        n: usize,
        members: impl IntoIterator<Item = &'a BitState>,
    ) -> Result<Self> {
        let mut set = Self::empty(n)?;
        for x in members {
            if x.dim() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: x.dim(),
                });
            }
            set.insert(x.index().expect("explicit dimension fits a word") as usize);
        }
        Ok(set)
    }

    /// Set whose membership bitmap is the low `2^n` bits of `mask` (n <= 6).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 6, "mask form holds at most 64 states");
        let used = if n == 6 {
            u64::MAX
        } else {
            (1u64 << (1 << n)) - 1
        };
        ExplicitSet {
            n,
            words: vec![mask & used],
        }
    }

    pub fn as_mask(&self) -> Option<u64> {
        (self.n <= 6).then(|| self.words[0])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn cube_size(&self) -> usize {
        1 << self.n
    }

    pub fn contains_index(&self, x: usize) -> bool {
        self.words[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn contains(&self, x: &BitState) -> bool {
        x.dim() == self.n
            && self.contains_index(x.index().expect("explicit dimension fits a word") as usize)
    }

    pub fn insert(&mut self, x: usize) {
        self.words[x / 64] |= 1 << (x % 64);
    }

    pub fn remove(&mut self, x: usize) {
        self.words[x / 64] &= !(1 << (x % 64));
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(k * 64 + b)
            })
        })
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        let size = self.cube_size();
        for (k, w) in out.words.iter_mut().enumerate() {
            *w = !*w;
            let hi = (k + 1) * 64;
            if hi > size {
                *w &= (1u64 << (size - k * 64)) - 1;
            }
        }
        out
    }

    pub fn symmetric_difference(&self, other: &ExplicitSet) -> Result<Self> {
        self.check_dim(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(ExplicitSet { n: self.n, words })
    }

    pub fn union(&self, other: &ExplicitSet) -> Result<Self> {
        self.check_dim(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a | b)
            .collect();
        Ok(ExplicitSet { n: self.n, words })
    }

    pub fn is_subset(&self, other: &ExplicitSet) -> bool {
        self.n == other.n
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    fn check_dim(&self, other: &ExplicitSet) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Upward closure: a single sweep in increasing index order suffices since
    /// every up-neighbor has a larger index.
    pub fn up_closure(&self) -> Self {
        let mut out = self.clone();
        for x in 0..self.cube_size() {
            if out.contains_index(x) {
                for y in up_neighbor_indices(x, self.n) {
                    out.insert(y);
                }
            }
        }
        out
    }

    /// Edge-local check: every up-neighbor of a member is a member.
    pub fn is_monotone(&self) -> bool {
        self.iter()
            .all(|x| up_neighbor_indices(x, self.n).all(|y| self.contains_index(y)))
    }

    /// Connectivity of the induced hypercube subgraph, by breadth-first search.
    pub fn is_connected(&self) -> Result<bool> {
        let start = self.iter().next().ok_or(Error::EmptySet)?;
        let mut seen = ExplicitSet::empty(self.n)?;
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        let mut reached = 1;
        while let Some(x) = queue.pop_front() {
            for i in 0..self.n {
                let y = x ^ 1 << i;
                if self.contains_index(y) && !seen.contains_index(y) {
                    seen.insert(y);
                    reached += 1;
                    queue.push_back(y);
                }
            }
        }
        Ok(reached == self.len())
    }

    /// Members as sorted little-endian 0/1 strings.
    pub fn member_strings(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .iter()
            .map(|x| index_to_bit_string(x, self.n))
            .collect();
        v.sort();
        v
    }

    /// Bitmap as lowercase hex, most significant word first.
    pub fn to_hex(&self) -> String {
        let digits = self.cube_size().div_ceil(4);
        let mut s: String = self
            .words
            .iter()
            .rev()
            .map(|w| format!("{w:016x}"))
            .collect();
        s.drain(..s.len() - digits);
        s
    }
}

impl fmt::Debug for ExplicitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExplicitSet(n={}, {:?})", self.n, self.member_strings())
    }
}

pub type MembershipFn = Arc<dyn Fn(&BitState) -> bool + Send + Sync>;

/// A subset given by a pure membership predicate.
#[derive(Clone)]
pub struct OracleSet {
    n: usize,
    contains: MembershipFn,
    upward_closed: bool,
    label: String,
}

impl OracleSet {
    pub fn new(n: usize, label: impl Into<String>, contains: MembershipFn) -> Self {
        OracleSet {
            n,
            contains,
            upward_closed: false,
            label: label.into(),
        }
    }

    /// Marks the predicate as describing a monotone set. The chain then
    /// accepts upward proposals without querying it.
    pub fn upward_closed(mut self) -> Self {
        self.upward_closed = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_upward_closed(&self) -> bool {
        self.upward_closed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains(&self, x: &BitState) -> bool {
        x.dim() == self.n && (self.contains)(x)
    }

    /// Materializes the predicate into a bitmap.
    pub fn to_explicit(&self) -> Result<ExplicitSet> {
        let n = self.n;
        ExplicitSet::from_fn(n, |x| {
            (self.contains)(&BitState::from_index(n, x as u64).unwrap())
        })
    }
}

impl fmt::Debug for OracleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OracleSet(n={}, {})", self.n, self.label)
    }
}

#[derive(Clone, Debug)]
pub enum SetRep {
    Explicit(ExplicitSet),
    Oracle(OracleSet),
}

impl SetRep {
    pub fn dim(&self) -> usize {
        match self {
            SetRep::Explicit(s) => s.dim(),
            SetRep::Oracle(o) => o.dim(),
        }
    }

    pub fn contains(&self, x: &BitState) -> bool {
        match self {
            SetRep::Explicit(s) => s.contains(x),
            SetRep::Oracle(o) => o.contains(x),
        }
    }

    /// True when membership is known to be preserved by raising coordinates.
    pub fn known_upward_closed(&self) -> bool {
        match self {
            SetRep::Explicit(s) => s.is_monotone(),
            SetRep::Oracle(o) => o.is_upward_closed(),
        }
    }

    pub fn as_explicit(&self) -> Result<&ExplicitSet> {
        match self {
            SetRep::Explicit(s) => Ok(s),
            SetRep::Oracle(_) => Err(Error::OracleNotSupported(
                "membership predicate cannot be enumerated here",
            )),
        }
    }

    pub fn into_explicit(self) -> Result<ExplicitSet> {
        match self {
            SetRep::Explicit(s) => Ok(s),
            SetRep::Oracle(o) => o.to_explicit(),
        }
    }
}

impl From<ExplicitSet> for SetRep {
    fn from(s: ExplicitSet) -> Self {
        SetRep::Explicit(s)
    }
}

impl From<OracleSet> for SetRep {
    fn from(o: OracleSet) -> Self {
        SetRep::Oracle(o)
    }
}

pub fn is_monotone(s: &SetRep) -> Result<bool> {
    Ok(s.as_explicit()?.is_monotone())
}

pub fn is_connected(s: &SetRep) -> Result<bool> {
    s.as_explicit()?.is_connected()
}
