use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::cube::ExplicitSet;
use crate::error::{Error, Result};

/// Largest state count for dense eigen-decomposition.
pub const EIGEN_CAP: usize = 4000;
/// Slack when comparing a floating TV distance with the mixing threshold.
pub const MIX_TOL: f64 = 1e-12;
/// Default cap on the number of steps searched for the mixing time.
pub const DEFAULT_MIX_CAP: usize = 1_000_000;

/// Transition matrix of the censored chain restricted to `A`.
///
/// `P(x, y) = 1/(2n)` for hypercube neighbours inside `A` and
/// `P(x, x) = 1 - deg_A(x)/(2n)`: the coordinate is hit with probability
/// `1/n` and the fresh bit differs with probability `1/2`.
#[derive(Clone, Debug)]
pub struct Kernel {
    n: usize,
    states: Vec<usize>,
    neighbors: Vec<Vec<usize>>,
}

pub fn build_kernel(a: &ExplicitSet) -> Result<Kernel> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = a.dim();
    let states: Vec<usize> = a.iter().collect();
    let mut position = vec![usize::MAX; a.cube_size()];
    for (k, &x) in states.iter().enumerate() {
        position[x] = k;
    }
    let neighbors = states
        .iter()
        .map(|&x| {
            (0..n)
                .map(|i| x ^ 1 << i)
                .filter(|&y| a.contains_index(y))
                .map(|y| position[y])
                .collect()
        })
        .collect();
    Ok(Kernel {
        n,
        states,
        neighbors,
    })
}

impl Kernel {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Packed hypercube index of each state, ascending.
    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn position(&self, x: usize) -> Option<usize> {
        self.states.binary_search(&x).ok()
    }

    pub fn neighbors(&self, k: usize) -> &[usize] {
        &self.neighbors[k]
    }

    pub fn degree(&self, k: usize) -> usize {
        self.neighbors[k].len()
    }

    pub fn move_prob(&self) -> f64 {
        1.0 / (2 * self.n) as f64
    }

    pub fn hold_prob(&self, k: usize) -> f64 {
        1.0 - self.degree(k) as f64 * self.move_prob()
    }

    pub fn entry(&self, j: usize, k: usize) -> f64 {
        if j == k {
            self.hold_prob(j)
        } else if self.neighbors[j].contains(&k) {
            self.move_prob()
        } else {
            0.0
        }
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let m = self.len();
        let mut p = DMatrix::zeros(m, m);
        for j in 0..m {
            p[(j, j)] = self.hold_prob(j);
            for &k in &self.neighbors[j] {
                p[(j, k)] = self.move_prob();
            }
        }
        p
    }

    /// One step of a row distribution: `v -> v P`. `P` is symmetric, so the
    /// neighbour lists serve as columns too.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let q = self.move_prob();
        for (k, o) in out.iter_mut().enumerate() {
            *o =
                v[k] * self.hold_prob(k) + q * self.neighbors[k].iter().map(|&j| v[j]).sum::<f64>();
        }
    }

    fn tv_to_uniform(&self, v: &[f64]) -> f64 {
        let u = 1.0 / self.len() as f64;
        0.5 * v.iter().map(|p| (p - u).abs()).sum::<f64>()
    }
}

/// `d(t)` for `t = 0..=t_max` from the state at position `x0`.
pub fn tv_curve(k: &Kernel, x0: usize, t_max: usize) -> Result<Vec<f64>> {
    if x0 >= k.len() {
        return Err(Error::InvalidArgument(format!(
            "start position {x0} out of range for {} states",
            k.len()
        )));
    }
    let mut v = vec![0.0; k.len()];
    v[x0] = 1.0;
    let mut next = vec![0.0; k.len()];
    let mut curve = Vec::with_capacity(t_max + 1);
    curve.push(k.tv_to_uniform(&v));
    for _ in 0..t_max {
        k.apply(&v, &mut next);
        std::mem::swap(&mut v, &mut next);
        curve.push(k.tv_to_uniform(&v));
    }
    Ok(curve)
}

/// Smallest `t` with `max_x d_x(t) <= eps`, evolving every start at once.
pub fn mixing_time(k: &Kernel, eps: f64, cap: usize) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let m = k.len();
    let mut rows: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            let mut v = vec![0.0; m];
            v[j] = 1.0;
            v
        })
        .collect();
    let worst = |rows: &[Vec<f64>]| {
        rows.par_iter()
            .map(|r| k.tv_to_uniform(r))
            .reduce(|| 0.0, f64::max)
    };
    for t in 0..=cap {
        if worst(&rows) <= eps + MIX_TOL {
            return Ok(t);
        }
        rows = rows
            .par_iter()
            .map(|r| {
                let mut out = vec![0.0; m];
                k.apply(r, &mut out);
                out
            })
            .collect();
    }
    Err(Error::MixingCapExceeded { cap })
}

/// Mixing time in exact arithmetic on the integer matrix `Q = 2n P`:
/// `d_x(t) <= p/q` iff `q * sum_y | |A| Q^t(x,y) - (2n)^t | <= 2 p |A| (2n)^t`.
pub fn mixing_time_exact(k: &Kernel, eps: Ratio<u64>, cap: usize) -> Result<usize> {
    let m = k.len();
    let two_n = BigInt::from(2 * k.n);
    let size = BigInt::from(m);
    let (p, q) = (BigInt::from(*eps.numer()), BigInt::from(*eps.denom()));
    let mut rows: Vec<Vec<BigInt>> = (0..m)
        .map(|j| {
            (0..m)
                .map(|c| {
                    if c == j {
                        BigInt::from(1)
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut scale = BigInt::from(1);
    for t in 0..=cap {
        let limit = BigInt::from(2) * &p * &size * &scale;
        let mixed = rows.iter().all(|r| {
            let dev: BigInt = r.iter().map(|e| (&size * e - &scale).abs()).sum();
            &q * dev <= limit
        });
        if mixed {
            return Ok(t);
        }
        rows = rows
            .iter()
            .map(|r| {
                (0..m)
                    .map(|c| {
                        let hold = BigInt::from(2 * k.n - k.degree(c));
                        k.neighbors[c]
                            .iter()
                            .fold(&r[c] * hold, |acc, &j| acc + &r[j])
                    })
                    .collect()
            })
            .collect();
        scale *= &two_n;
    }
    Err(Error::MixingCapExceeded { cap })
}

/// Eigenvalues of the symmetric kernel, descending.
pub fn eigenvalues(k: &Kernel) -> Result<Vec<f64>> {
    if k.len() > EIGEN_CAP {
        return Err(Error::SizeCap {
            what: "eigensolve",
            size: k.len(),
            cap: EIGEN_CAP,
        });
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(k.dense())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// `1 - lambda_2`; a single-state kernel has gap 1.
pub fn spectral_gap(k: &Kernel) -> Result<f64> {
    let ev = eigenvalues(k)?;
    Ok(if ev.len() < 2 { 1.0 } else { 1.0 - ev[1] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, f: impl Fn(usize) -> bool) -> ExplicitSet {
        ExplicitSet::from_fn(n, f).unwrap()
    }

    #[test]
    fn kernel_examples() {
        // {10, 11}: indices 1 and 3
        let k = build_kernel(&set(2, |x| x & 1 == 1)).unwrap();
        let p = k.dense();
        assert_eq!(p[(0, 1)], 0.25);
        assert_eq!(p[(1, 0)], 0.25);
        assert_eq!(p[(0, 0)], 0.75);

        let k = build_kernel(&set(2, |x| x == 3)).unwrap();
        assert_eq!(k.dense(), DMatrix::from_element(1, 1, 1.0));

        let k = build_kernel(&set(2, |_| true)).unwrap();
        for j in 0..4 {
            assert_eq!(k.hold_prob(j), 0.5);
            assert_eq!(k.degree(j), 2);
        }
        assert!(matches!(
            build_kernel(&ExplicitSet::empty(2).unwrap()),
            Err(Error::EmptySet)
        ));
    }

    #[test]
    fn kernel_invariants() {
        let a = set(4, |x| x.count_ones() >= 2 || x == 1);
        let k = build_kernel(&a).unwrap();
        let p = k.dense();
        let m = k.len();
        for j in 0..m {
            let row: f64 = (0..m).map(|c| p[(j, c)]).sum();
            assert!((row - 1.0).abs() < 1e-12);
            assert!(p[(j, j)] >= 0.5);
            for c in 0..m {
                assert_eq!(p[(j, c)], p[(c, j)]);
            }
        }
        let u = vec![1.0 / m as f64; m];
        let mut out = vec![0.0; m];
        k.apply(&u, &mut out);
        for v in out {
            assert!((v - 1.0 / m as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn full_square_curve_closed_form() {
        let k = build_kernel(&set(2, |_| true)).unwrap();
        for x0 in 0..4 {
            let curve = tv_curve(&k, x0, 30).unwrap();
            for (t, d) in curve.iter().enumerate().skip(1) {
                assert!((d - 0.5f64.powi(t as i32 + 1)).abs() < 1e-15, "t={t}");
            }
        }
        assert_eq!(mixing_time(&k, 0.25, 100).unwrap(), 1);
        assert_eq!(mixing_time_exact(&k, Ratio::new(1, 4), 100).unwrap(), 1);
    }

    #[test]
    fn singleton_kernel() {
        let k = build_kernel(&set(3, |x| x == 7)).unwrap();
        assert!(tv_curve(&k, 0, 5).unwrap().iter().all(|&d| d == 0.0));
        assert_eq!(mixing_time(&k, 0.25, 10).unwrap(), 0);
        assert_eq!(spectral_gap(&k).unwrap(), 1.0);
    }

    #[test]
    fn full_square_spectrum() {
        let k = build_kernel(&set(2, |_| true)).unwrap();
        let ev = eigenvalues(&k).unwrap();
        for (got, want) in ev.iter().zip([1.0, 0.5, 0.5, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!((spectral_gap(&k).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn curve_is_nonincreasing_and_spectrally_bounded() {
        let a = set(4, |x| x & 3 == 3 || x & 12 == 12);
        let k = build_kernel(&a).unwrap();
        let lambda2 = eigenvalues(&k).unwrap()[1];
        for x0 in 0..k.len() {
            let curve = tv_curve(&k, x0, 200).unwrap();
            for t in 1..curve.len() {
                assert!(curve[t] <= curve[t - 1] + 1e-12);
                assert!(curve[t] <= k.len() as f64 * lambda2.powi(t as i32) / 2.0 + 1e-12);
            }
        }
    }

    #[test]
    fn exact_and_float_mixing_agree_n3() {
        for mask in crate::monotone::monotone_masks(3).unwrap() {
            let a = ExplicitSet::from_mask(3, *mask);
            if a.is_empty() {
                continue;
            }
            let k = build_kernel(&a).unwrap();
            assert_eq!(
                mixing_time(&k, 0.25, 10_000).unwrap(),
                mixing_time_exact(&k, Ratio::new(1, 4), 10_000).unwrap()
            );
        }
    }

    #[test]
    fn mixing_cap_and_eps_validation() {
        let k = build_kernel(&set(3, |_| true)).unwrap();
        assert!(matches!(
            mixing_time(&k, 0.01, 1),
            Err(Error::MixingCapExceeded { cap: 1 })
        ));
        assert!(mixing_time(&k, 1.5, 10).is_err());
    }
}
