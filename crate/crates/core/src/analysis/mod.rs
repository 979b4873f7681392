//! Total-variation functionals, maximality and optimality verification,
//! short-time asymptotics, and statistical tests.

pub mod stats;

pub use stats::{
    chi_square_critical, chi_square_gof, ks_one_sample, ks_two_sample, ChiSquareResult, KsResult,
};
