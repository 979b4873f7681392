//! Couplings of diffusion processes on spaces carrying a reflection
//! symmetry.
//!
//! A coupling of two diffusion laws is a joint law on path-space pairs with
//! the two laws as marginals; the coupling time is the first time after
//! which the components agree forever. For any coupling, the probability
//! that the coupling time exceeds `t` is at least half the total-variation
//! distance between the two time-`t` distributions; a coupling attaining
//! that bound for every `t` is called maximal.
//!
//! When the space admits an involution `R` with `R x1 = x2` whose fixed set
//! `H` separates the space into two swapped halves, the mirror coupling —
//! run one path, reflect it until it hits `H`, then let the pair move
//! together — is maximal. This crate builds such reflection structures on
//! concrete model spaces, constructs mirror couplings, coupled geodesic
//! random walks, and the classical counterexample couplings on glued
//! circles and on a star tree, and verifies the relevant identities both
//! exactly (on finite symmetric Markov chains) and by Monte Carlo.
//!
//! The crate is organized as a pipeline:
//!
//! * [`spaces`] — model spaces, exact metrics, exponential maps, frames;
//! * [`reflection`] — reflection structures and the torus bisector;
//! * [`diffusion`] — heat kernels, exact chain models, samplers;
//! * [`couplings`] — coupled trajectories and exact joint chain laws;
//! * [`analysis`] — total-variation functionals, optimality and
//!   short-time asymptotic checks, statistical tests;
//! * [`harness`] — experiment configs, deterministic seeding, manifests.

pub mod analysis;
pub mod couplings;
pub mod diffusion;
pub mod error;
pub mod harness;
pub mod reflection;
pub mod rng;
pub mod spaces;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book;
