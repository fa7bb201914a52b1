//! Exact finite-state analysis of the censored chain on an enumerated set:
//! kernel, TV distance curves, mixing times, spectral gap and conductance.

mod bounds;
mod conductance;
mod kernel;

pub use bounds::{
    corollary_bound, corollary_value, example_slow_family, slow_family_set, theorem1_certificate,
    ConductanceCertificate, MixingBoundReport, SlowFamilyReport, Verdict,
};
pub use conductance::{
    boundary_edges, conductance_exact, cut_ratio, ConductanceResult, CONDUCTANCE_CAP,
};
pub use kernel::{
    build_kernel, eigenvalues, mixing_time, mixing_time_exact, spectral_gap, tv_curve, Kernel,
    DEFAULT_MIX_CAP, EIGEN_CAP, MIX_TOL,
};
