use num_rational::Ratio;
use serde::{Serialize, Serializer};

use super::set::ExplicitSet;
use crate::error::{Error, Result};

/// Tolerance on the total mass of floating-point measures.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A probability, exact for uniform-measure quantities and floating otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Prob {
    Exact(Ratio<u64>),
    Approx(f64),
}

impl Prob {
    pub fn exact(num: u64, den: u64) -> Self {
        Prob::Exact(Ratio::new(num, den))
    }

    pub fn value(&self) -> f64 {
        match self {
            Prob::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Prob::Approx(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<Ratio<u64>> {
        match self {
            Prob::Exact(r) => Some(*r),
            Prob::Approx(_) => None,
        }
    }
}

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Prob::Exact(r) => Frac::from(*r).serialize(serializer),
            Prob::Approx(v) => serializer.serialize_f64(*v),
        }
    }
}

/// `{num, den}` form used in reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Frac {
    pub num: u64,
    pub den: u64,
}

impl From<Ratio<u64>> for Frac {
    fn from(r: Ratio<u64>) -> Self {
        Frac {
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

/// Explicit per-state weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable {
    n: usize,
    w: Vec<f64>,
}

impl WeightTable {
    /// Accepts an already-normalized table.
    pub fn new(n: usize, w: Vec<f64>) -> Result<Self> {
        if w.len() != 1usize << n {
            return Err(Error::DimensionMismatch {
                left: 1 << n,
                right: w.len(),
            });
        }
        if let Some(index) = w.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidWeight { index });
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Unnormalized { total });
        }
        Ok(WeightTable { n, w })
    }

    /// Rescales nonnegative weights to unit mass.
    pub fn normalized(n: usize, raw: Vec<f64>) -> Result<Self> {
        if let Some(index) = raw.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidWeight { index });
        }
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(Error::Unnormalized { total });
        }
        Self::new(n, raw.into_iter().map(|v| v / total).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }
}

/// Curie-Weiss measure `mu(sigma) ∝ exp(beta * m^2 / (2n))` with
/// `m = sum sigma_i`, `sigma_i = 2 x_i - 1`. Stored by magnetization level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurieWeissMeasure {
    pub n: usize,
    pub beta: f64,
    /// Probability of `{x : |x| = k}` for `k = 0..=n`.
    pub level_prob: Vec<f64>,
}

pub(crate) fn ln_binomial(n: usize, k: usize) -> f64 {
    (1..=k)
        .map(|i| ((n - k + i) as f64).ln() - (i as f64).ln())
        .sum()
}

impl CurieWeissMeasure {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if n < 2 || n % 2 == 1 {
            return Err(Error::OddDimension(n));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "inverse temperature must be finite and >= 0, got {beta}"
            )));
        }
        let log_w: Vec<f64> = (0..=n)
            .map(|k| {
                let m = 2.0 * k as f64 - n as f64;
                ln_binomial(n, k) + beta * m * m / (2.0 * n as f64)
            })
            .collect();
        let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_z = top + log_w.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
        let mut level_prob: Vec<f64> = log_w.iter().map(|l| (l - log_z).exp()).collect();
        // enforce exact spin-flip symmetry
        for k in 0..n / 2 {
            let avg = 0.5 * (level_prob[k] + level_prob[n - k]);
            level_prob[k] = avg;
            level_prob[n - k] = avg;
        }
        Ok(CurieWeissMeasure {
            n,
            beta,
            level_prob,
        })
    }

    /// Weight of one state at level `k`.
    pub fn state_weight(&self, k: usize) -> f64 {
        (self.level_prob[k].ln() - ln_binomial(self.n, k)).exp()
    }

    pub fn to_weight_table(&self) -> Result<WeightTable> {
        let per_level: Vec<f64> = (0..=self.n).map(|k| self.state_weight(k)).collect();
        let w = (0..1usize << self.n)
            .map(|x| per_level[x.count_ones() as usize])
            .collect();
        WeightTable::normalized(self.n, w)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Measure {
    UniformCube { n: usize },
    WeightTable(WeightTable),
    CurieWeiss(CurieWeissMeasure),
}

impl Measure {
    pub fn uniform(n: usize) -> Self {
        Measure::UniformCube { n }
    }

    pub fn dim(&self) -> usize {
        match self {
            Measure::UniformCube { n } => *n,
            Measure::WeightTable(t) => t.n,
            Measure::CurieWeiss(c) => c.n,
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, Measure::UniformCube { .. })
    }

    /// Weight of the state with packed index `x`.
    pub fn weight(&self, x: usize) -> f64 {
        match self {
            Measure::UniformCube { n } => 1.0 / (1u64 << n) as f64,
            Measure::WeightTable(t) => t.w[x],
            Measure::CurieWeiss(c) => c.state_weight(x.count_ones() as usize),
        }
    }

    /// All state weights, indexed by packed state.
    pub fn weights(&self) -> Vec<f64> {
        match self {
            Measure::WeightTable(t) => t.w.clone(),
            Measure::CurieWeiss(c) => {
                let per_level: Vec<f64> = (0..=c.n).map(|k| c.state_weight(k)).collect();
                (0..1usize << c.n)
                    .map(|x| per_level[x.count_ones() as usize])
                    .collect()
            }
            Measure::UniformCube { n } => vec![self.weight(0); 1 << n],
        }
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: n,
            });
        }
        Ok(())
    }
}

/// Mass of `s`; exact `|S| / 2^n` under the uniform measure.
pub fn measure_of(m: &Measure, s: &ExplicitSet) -> Result<Prob> {
    m.check_dim(s.dim())?;
    Ok(match m {
        Measure::UniformCube { n } => Prob::exact(s.len() as u64, 1 << n),
        Measure::WeightTable(t) => Prob::Approx(s.iter().map(|x| t.w[x]).sum()),
        Measure::CurieWeiss(c) => {
            // sum level by level to keep the terms well conditioned
            let mut per_level = vec![0u64; c.n + 1];
            for x in s.iter() {
                per_level[x.count_ones() as usize] += 1;
            }
            Prob::Approx(
                per_level
                    .iter()
                    .enumerate()
                    .map(|(k, &cnt)| cnt as f64 * c.state_weight(k))
                    .sum(),
            )
        }
    })
}
