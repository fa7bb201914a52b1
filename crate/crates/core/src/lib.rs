//! Censored single-site dynamics on monotone subsets of the Boolean
//! hypercube, with exact desk-scale analysis: monotonicity-testing
//! quantities, conductance, spectral gap, mixing times, a critical
//! percolation crossing sampler and the Curie-Weiss counterexample.

pub mod catalog;
pub mod chain;
pub mod cli;
pub mod cube;
pub mod error;
pub mod flow;
pub mod ising;
pub mod monotone;
pub mod percolation;
pub mod report;
pub mod rng;
pub mod spectral;

pub use cube::{BitState, ExplicitSet, Measure, OracleSet, Prob, SetRep};
pub use error::{Error, Result};
