//! Exact heat kernels, exact finite-chain models, and trajectory samplers.

pub mod chains;
pub mod kernels;
pub mod sampler;

pub use chains::{build_chain, ChainSpec, FiniteChain};
pub use kernels::{adaptive_simpson, heat_kernel, log_heat_kernel};
pub use sampler::{
    bm_increment, bridge_crossing_prob, geodesic_rw_step, poisson_clock, sample_bm_trajectory,
    sample_chain_path, Trajectory,
};
