//! Coupled trajectories.
