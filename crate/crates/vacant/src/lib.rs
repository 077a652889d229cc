//! Vacant sets of continuous-time random walk on finite d-regular graphs.
//!
//! The crate covers the whole pipeline from graph generation to component
//! statistics, plus exact linear-algebra oracles used to check the
//! potential-theoretic estimates on small graphs:
//!
//! - [`graph`]: random regular graphs, balls, tree excess, spectral gap.
//! - [`walk`]: walk and exact bridge sampling, ranges, vacant sets.
//! - [`potential`]: hitting times, equilibrium potentials, survival probabilities.
//! - [`interlace`]: the branching-process description of interlacements on the regular tree.
//! - [`pim`]: segments, bridges, long-range bridges and sprinkling.
//! - [`vacancy`]: components, local laws, vertex classification, the instrumented exploration.
//! - [`experiments`]: sweeps and reports driven by the command-line tool.

pub mod calibrated;
pub mod experiments;
pub mod graph;
pub mod interlace;
pub mod pim;
pub mod potential;
pub mod rng;
pub mod vacancy;
pub mod walk;

/// Logarithm in base `d - 1`.
pub fn ld(d: usize, x: f64) -> f64 {
    x.ln() / ((d - 1) as f64).ln()
}
