//! Pilot-calibrated constants used by the experiment harness and the acceptance suite.
//!
//! Each value records the pilot it came from. Changing a value means bumping
//! [`VERSION`] and re-running the pilot named next to it.

pub const VERSION: u32 = 1;

/// Intensities with `|u - u⋆|` below this are reported but never asserted on.
pub const NEAR_CRITICAL_WINDOW: f64 = 0.25;

/// Segment exponent for desk-scale segment constructions, `L = n^γ`.
///
/// Pilot: d=3, n=16384, u=6, 10 graphs × 100 explorations. The proper-step
/// decrement frequency was 0.08, 0.33, 0.55, 0.60, 0.65, 0.69, 0.66 at
/// γ = 0.001, 0.4, 0.6, 0.7, 0.75, 0.8, 0.9. Below γ ≈ 0.6 the segments are not
/// much longer than the `ln²n` bridges and cover too little of `[0, un]`.
pub const SEGMENT_GAMMA: f64 = 0.8;

/// Lower bound on `|C_max|/n` below the critical intensity.
///
/// Pilot: d=3, u=2, seeds 0..20, full walk. Minimum 0.318 (n=4096), 0.329 (n=16384).
pub const GIANT_FRACTION: f64 = 0.2;

/// Upper bound on `|C_sec|/n` below the critical intensity.
///
/// Pilot: d=3, u=2, seeds 0..20. Maximum 0.0022 (n=4096), 0.0014 (n=16384).
pub const SECOND_FRACTION: f64 = 0.01;

/// Above the critical intensity `|C_max| ≤ SUBCRITICAL_LOG_FACTOR · ln n`.
///
/// Pilot: d=3, u=8, seeds 0..20. Maximum |C_max| was 9 (n=4096) and 11 (n=16384).
pub const SUBCRITICAL_LOG_FACTOR: f64 = 40.0;

/// Radius `R` of the ball `B_y` in the local-law comparison.
///
/// `β ld n` rounds to 0 at desk scale.
pub const LOCAL_RADIUS: usize = 2;

/// Radius of the ball around `y` that must be a tree in the local-law comparison.
///
/// Pilot: d=3, n=16384. Fraction of vertices with a cycle within distance r:
/// 0.0007, 0.0026, 0.0099, 0.048, 0.17, 0.54 for r = 1..6. `5R = 10` is never tree-like.
pub const LOCAL_TREE_RADIUS: usize = 5;

/// Allowed excursion of the empirical size CDF outside the `u(1±ε)` tree CDFs.
pub const LOCAL_TV_SLACK: f64 = 0.05;

/// Radius of the futures whose properness is recorded during exploration.
///
/// `max(7 ld ld n, 2)` is 26 at n=16384, which covers the whole graph.
pub const FUTURE_RADIUS: usize = 2;

/// The exploration stops after `EXPLORATION_CAP · ld n` vacant vertices.
pub const EXPLORATION_CAP: f64 = 4.0;

/// Radius `R` standing in for `β ld n` when classifying vertices.
pub const CLASSIFY_RADIUS: usize = 1;

/// Constant `h` in the lower bound `|C^R_x| ≥ h m_{u(1+ε)}^R` for proper vertices.
pub const PROPER_H: f64 = 0.5;

/// Upper bound on the fraction of bad vertices at d=3, n=16384, u=2.
///
/// Pilot: seeds 0..5, γ=0.8, R=1, tree radius 5R. Bad fractions 0.169, 0.174, 0.154,
/// 0.154, 0.141, all from cycles within distance 5.
pub const BAD_FRACTION: f64 = 0.2;

/// Largest allowed `max |C_sec|/n` in the uniqueness experiment.
pub const UNIQUENESS_KAPPA: f64 = SECOND_FRACTION;

/// Absolute tolerance on the point and conditional hitting rates at n=1000.
pub const RATE_TOLERANCE: f64 = 0.05;

/// Tree radius required around the target in the rate experiment.
pub const RATE_RADIUS: usize = 4;

/// Lower bound on the fraction of vertices in vacant components larger than `ld² n`.
///
/// Pilot: d=3, n=16384, u=2, seeds 0..5, γ=0.8. Fractions 0.285, 0.263, 0.271, 0.298, 0.274.
pub const CENSUS_FRACTION: f64 = 0.2;
