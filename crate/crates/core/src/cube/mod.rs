//! Hypercube states, the coordinatewise order, subset representations and
//! probability measures on `{0,1}^n`.

mod measure;
mod set;
mod state;

pub use measure::{
    measure_of, CurieWeissMeasure, Frac, Measure, Prob, WeightTable, NORMALIZATION_TOL,
};
pub use set::{
    is_connected, is_monotone, ExplicitSet, MembershipFn, OracleSet, SetRep, MAX_EXPLICIT_DIM,
};
pub(crate) use state::{index_to_bit_string, up_neighbor_indices};
pub use state::{leq, up_neighbors, BitState};
