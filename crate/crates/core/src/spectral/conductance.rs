use num_rational::Ratio;
use serde::Serialize;

use crate::cube::{ExplicitSet, Frac};
use crate::error::{Error, Result};

/// Largest `|A|` for exhaustive subset enumeration.
pub const CONDUCTANCE_CAP: usize = 22;

/// Minimum of `Phi(S) = |boundary(S)| / (n |S|)` over nonempty `S` within
/// `A` with `|S| <= |A| / 2`. Every vertex carries self-loops up to degree
/// `n`; loops never cross the boundary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConductanceResult {
    pub n: usize,
    pub set_size: usize,
    /// `None` when no admissible subset exists (`|A| <= 1`).
    pub phi: Option<Frac>,
    pub boundary_edges: Option<u64>,
    /// Members of the minimizing subset, as bit strings.
    pub witness: Option<Vec<String>>,
    /// `P(A) / (16 n)`.
    pub lower_bound: Frac,
    pub subsets_scanned: u64,
}

impl ConductanceResult {
    pub fn phi_ratio(&self) -> Option<Ratio<u64>> {
        self.phi.map(|f| Ratio::new(f.num, f.den))
    }

    pub fn phi_value(&self) -> Option<f64> {
        self.phi.map(|f| f.num as f64 / f.den as f64)
    }
}

pub(crate) fn lower_bound(a: &ExplicitSet) -> Ratio<u64> {
    let n = a.dim() as u64;
    Ratio::new(a.len() as u64, a.cube_size() as u64 * 16 * n)
}

/// Number of hypercube edges from `s` to `a \ s`.
pub fn boundary_edges(a: &ExplicitSet, s: &ExplicitSet) -> Result<u64> {
    if !s.is_subset(a) {
        return Err(Error::InvalidArgument(
            "cut side must be a subset of A".into(),
        ));
    }
    let n = a.dim();
    Ok(s.iter()
        .map(|x| {
            (0..n)
                .filter(|&i| {
                    let y = x ^ 1 << i;
                    a.contains_index(y) && !s.contains_index(y)
                })
                .count() as u64
        })
        .sum())
}

/// `Phi(S)` for a single nonempty `S` within `A`, ignoring the volume constraint.
pub fn cut_ratio(a: &ExplicitSet, s: &ExplicitSet) -> Result<Ratio<u64>> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(Ratio::new(
        boundary_edges(a, s)?,
        (a.dim() * s.len()) as u64,
    ))
}

pub fn conductance_exact(a: &ExplicitSet) -> Result<ConductanceResult> {
    let n = a.dim();
    let states: Vec<usize> = a.iter().collect();
    let m = states.len();
    if m > CONDUCTANCE_CAP {
        return Err(Error::SizeCap {
            what: "exact conductance",
            size: m,
            cap: CONDUCTANCE_CAP,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let local: Vec<Vec<usize>> = states
        .iter()
        .map(|&x| {
            (0..n)
                .filter_map(|i| states.binary_search(&(x ^ 1 << i)).ok())
                .collect()
        })
        .collect();

    // Gray-code walk over all subsets of A, updating |S| and |boundary(S)|
    // incrementally: toggling v changes the boundary by deg(v) - 2 * (#
    // neighbours of v already in S), with the sign of the toggle.
    let mut in_s = vec![false; m];
    let mut nbrs_in_s = vec![0u64; m];
    let (mut size, mut boundary) = (0u64, 0i64);
    let mut best: Option<(u64, u64, u64)> = None; // (boundary, size, gray code)
    let mut scanned = 0u64;
    for step in 1u64..1 << m {
        let v = step.trailing_zeros() as usize;
        let deg = local[v].len() as i64;
        let inside = nbrs_in_s[v] as i64;
        if in_s[v] {
            boundary -= deg - 2 * inside;
            size -= 1;
            for &u in &local[v] {
                nbrs_in_s[u] -= 1;
            }
        } else {
            boundary += deg - 2 * inside;
            size += 1;
            for &u in &local[v] {
                nbrs_in_s[u] += 1;
            }
        }
        in_s[v] = !in_s[v];
        if 2 * size as usize <= m {
            scanned += 1;
            let b = boundary as u64;
            let better = match best {
                None => true,
                Some((bb, bs, _)) => b * bs < bb * size,
            };
            if better {
                best = Some((b, size, step ^ (step >> 1)));
            }
        }
    }
    let lb = lower_bound(a);
    Ok(match best {
        None => ConductanceResult {
            n,
            set_size: m,
            phi: None,
            boundary_edges: None,
            witness: None,
            lower_bound: lb.into(),
            subsets_scanned: 0,
        },
        Some((b, s, code)) => {
            let witness = ExplicitSet::from_indices(
                n,
                (0..m).filter(|&k| code >> k & 1 == 1).map(|k| states[k]),
            )?;
            debug_assert_eq!(witness.len() as u64, s);
            debug_assert_eq!(boundary_edges(a, &witness)?, b);
            ConductanceResult {
                n,
                set_size: m,
                phi: Some(Ratio::new(b, n as u64 * s).into()),
                boundary_edges: Some(b),
                witness: Some(witness.member_strings()),
                lower_bound: lb.into(),
                subsets_scanned: scanned,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::BitState;

    /// Independent oracle: direct enumeration by bitmask with no
    /// incremental bookkeeping.
    fn brute(a: &ExplicitSet) -> Option<Ratio<u64>> {
        let states: Vec<usize> = a.iter().collect();
        let m = states.len();
        (1u64..1 << m)
            .filter(|mask| 2 * mask.count_ones() as usize <= m)
            .map(|mask| {
                let s = ExplicitSet::from_indices(
                    a.dim(),
                    (0..m).filter(|&k| mask >> k & 1 == 1).map(|k| states[k]),
                )
                .unwrap();
                cut_ratio(a, &s).unwrap()
            })
            .min()
    }

    #[test]
    fn square_examples() {
        let full = ExplicitSet::full(2).unwrap();
        let r = conductance_exact(&full).unwrap();
        assert_eq!(r.phi, Some(Frac { num: 1, den: 2 }));

        let dictator = ExplicitSet::from_fn(2, |x| x & 1 == 1).unwrap();
        let r = conductance_exact(&dictator).unwrap();
        assert_eq!(r.phi, Some(Frac { num: 1, den: 2 }));
        assert_eq!(r.boundary_edges, Some(1));
        assert_eq!(r.witness.unwrap().len(), 1);
    }

    #[test]
    fn full_cube_is_coordinate_cut() {
        let r = conductance_exact(&ExplicitSet::full(4).unwrap()).unwrap();
        assert_eq!(r.phi, Some(Frac { num: 1, den: 4 }));
        assert_eq!(r.lower_bound, Frac { num: 1, den: 64 });
    }

    #[test]
    fn singleton_is_vacuous() {
        let top = ExplicitSet::from_indices(2, [3]).unwrap();
        let r = conductance_exact(&top).unwrap();
        assert_eq!(r.phi, None);
        assert_eq!(r.subsets_scanned, 0);
    }

    #[test]
    fn gray_walk_matches_direct_enumeration() {
        for mask in crate::monotone::monotone_masks(3).unwrap() {
            let a = ExplicitSet::from_mask(3, *mask);
            let got = conductance_exact(&a).unwrap().phi_ratio();
            assert_eq!(got, brute(&a), "mask {mask:#x}");
        }
        // non-monotone and disconnected inputs too
        for mask in [0b1001_0110u64, 0b0110_1001, 0b1000_0001, 0x0f0f_0f0f] {
            let n = if mask > 0xff { 5 } else { 3 };
            let a = ExplicitSet::from_indices(n, (0..32).filter(|&x| mask >> x & 1 == 1)).unwrap();
            assert_eq!(conductance_exact(&a).unwrap().phi_ratio(), brute(&a));
        }
    }

    #[test]
    fn cap_enforced() {
        let a = ExplicitSet::full(5).unwrap();
        assert!(matches!(conductance_exact(&a), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn cut_ratio_of_subcube() {
        // Example-1 set at (6, 3) and its first subcube
        let a = ExplicitSet::from_fn(6, |x| x & 7 == 7 || x & 56 == 56).unwrap();
        let b = ExplicitSet::from_fn(6, |x| x & 7 == 7).unwrap();
        assert_eq!(cut_ratio(&a, &b).unwrap(), Ratio::new(1, 16));
        let outside = ExplicitSet::from_states(6, [&BitState::zeros(6)]).unwrap();
        assert!(cut_ratio(&a, &outside).is_err());
    }
}
