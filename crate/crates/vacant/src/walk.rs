//! Continuous-time simple random walk: sampling, ranges, vacant sets and
//! exact bridge sampling.

use std::io::Write;

use rand::Rng as _;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::graph::{RegularGraph, VertexSet};
use crate::rng::Rng;

#[derive(Debug, Error, PartialEq)]
pub enum WalkError {
    #[error("interval [{s}, {t}] not inside [0, {horizon}]")]
    BadInterval { s: f64, t: f64, horizon: f64 },
    #[error("horizon {horizon} shorter than u*n = {needed}")]
    HorizonTooShort { horizon: f64, needed: f64 },
    #[error("Poisson truncation for mean {mean} exceeds the budget of {budget} jumps")]
    TruncationBudget { mean: f64, budget: usize },
    #[error("vertex {y} cannot be reached from {x} within the truncated jump range")]
    Unreachable { x: usize, y: usize },
}

/// Path of the continuous-time walk on `[0, horizon]`.
///
/// The walk sits at `vertices[i]` on `[jump_times[i-1], jump_times[i])`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub vertices: Vec<usize>,
    pub jump_times: Vec<f64>,
    pub horizon: f64,
}

impl Trajectory {
    pub fn constant(x: usize, horizon: f64) -> Self {
        Trajectory { vertices: vec![x], jump_times: Vec::new(), horizon }
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().expect("trajectory has a start vertex")
    }

    pub fn jumps(&self) -> usize {
        self.jump_times.len()
    }

    /// Index into `vertices` of the state occupied at time `t`.
    pub fn index_at(&self, t: f64) -> usize {
        self.jump_times.partition_point(|&tau| tau <= t)
    }

    pub fn position_at(&self, t: f64) -> usize {
        self.vertices[self.index_at(t)]
    }

    /// Consecutive states are adjacent and jump times are increasing inside `(0, horizon)`.
    pub fn is_valid_on(&self, g: &RegularGraph) -> bool {
        self.vertices.len() == self.jump_times.len() + 1
            && self.vertices.windows(2).all(|w| g.has_edge(w[0], w[1]))
            && self.jump_times.windows(2).all(|w| w[0] < w[1])
            && self.jump_times.iter().all(|&t| t > 0.0 && t < self.horizon)
    }

    /// The path on `[0, t]`.
    pub fn restrict(&self, t: f64) -> Trajectory {
        let t = t.min(self.horizon);
        let k = self.jump_times.partition_point(|&tau| tau < t);
        Trajectory { vertices: self.vertices[..=k].to_vec(), jump_times: self.jump_times[..k].to_vec(), horizon: t }
    }

    /// Appends `next`, which must start where `self` ends, shifting its jump times by `self.horizon`.
    pub fn append(&mut self, next: &Trajectory) {
        debug_assert_eq!(self.end(), next.start());
        let offset = self.horizon;
        self.vertices.extend_from_slice(&next.vertices[1..]);
        self.jump_times.extend(next.jump_times.iter().map(|t| t + offset));
        self.horizon += next.horizon;
    }

    /// Visited vertices on `[s, t]` as a slice of the skeleton.
    pub fn skeleton_between(&self, s: f64, t: f64) -> &[usize] {
        &self.vertices[self.index_at(s)..=self.index_at(t)]
    }
}

/// Starting rule for [`sample_walk`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Start {
    Vertex(usize),
    Stationary,
}

/// Walk with rate-1 exponential holding times and uniform neighbour steps, run up to time `horizon`.
pub fn sample_walk(g: &RegularGraph, start: Start, horizon: f64, rng: &mut Rng) -> Trajectory {
    let x = match start {
        Start::Vertex(x) => x,
        Start::Stationary => rng.random_range(0..g.n()),
    };
    let mut traj = Trajectory::constant(x, horizon);
    let mut t: f64 = Exp1.sample(rng);
    let mut v = x;
    while t < horizon {
        v = g.neighbours(v)[rng.random_range(0..g.d())];
        traj.vertices.push(v);
        traj.jump_times.push(t);
        let e: f64 = Exp1.sample(rng);
        t += e;
    }
    traj
}

/// `X_{[s,t]}`, including the state at time `s`.
pub fn range_of(traj: &Trajectory, n: usize, s: f64, t: f64) -> Result<VertexSet, WalkError> {
    if !(0.0 <= s && s <= t && t <= traj.horizon) {
        return Err(WalkError::BadInterval { s, t, horizon: traj.horizon });
    }
    Ok(VertexSet::from_vertices(n, traj.skeleton_between(s, t).iter().copied()))
}

/// How a vacant configuration was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    FullWalk,
    Segments,
    SegmentsBridges,
    Sprinkled,
}

/// Indicator of the vertices left unvisited.
#[derive(Clone, Debug, PartialEq)]
pub struct VacantConfig {
    pub vacant: VertexSet,
    pub provenance: Provenance,
    pub u_level: f64,
}

impl VacantConfig {
    pub fn is_vacant(&self, x: usize) -> bool {
        self.vacant.contains(x)
    }

    pub fn n(&self) -> usize {
        self.vacant.universe()
    }

    /// Vacant set left by a collection of visited vertices.
    pub fn from_visited<I: IntoIterator<Item = usize>>(
        n: usize,
        visited: I,
        provenance: Provenance,
        u_level: f64,
    ) -> Self {
        let mut vacant = VertexSet::full(n);
        for x in visited {
            vacant.remove(x);
        }
        VacantConfig { vacant, provenance, u_level }
    }
}

/// Complement of the range of `traj` over `[0, u n]`.
pub fn vacant_set(g: &RegularGraph, traj: &Trajectory, u: f64) -> Result<VacantConfig, WalkError> {
    let needed = u * g.n() as f64;
    if traj.horizon < needed {
        return Err(WalkError::HorizonTooShort { horizon: traj.horizon, needed });
    }
    let visited = traj.skeleton_between(0.0, needed).iter().copied();
    Ok(VacantConfig::from_visited(g.n(), visited, Provenance::FullWalk, u))
}

/// Largest jump count kept when truncating a Poisson(`mean`) law so the dropped tail is below `tail`.
///
/// Starts at `mean + 12 sqrt(mean)` and grows until the Chernoff bound
/// `P[N >= k] <= e^{-mean} (e mean / k)^k` drops below `tail`.
pub fn poisson_truncation(mean: f64, tail: f64) -> usize {
    let mut k = (mean + 12.0 * mean.sqrt()).ceil().max(1.0) as usize;
    loop {
        let kf = k as f64;
        let log_bound = if mean == 0.0 { f64::NEG_INFINITY } else { -mean + kf * (1.0 + mean.ln() - kf.ln()) };
        if kf > mean && log_bound <= tail.ln() {
            return k - 1;
        }
        k += 1 + k / 16;
    }
}

/// `ln(e^{-mean} mean^k / k!)`.
pub fn ln_poisson_pmf(mean: f64, k: usize) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -mean + k as f64 * mean.ln() - ln_gamma(k as f64 + 1.0)
}

pub const POISSON_TAIL: f64 = 1e-12;
pub const MAX_BRIDGE_JUMPS: usize = 10_000_000;

/// Exact sampler for walk bridges of duration `ell` ending at a fixed target.
///
/// Holds `P^j δ_y` for every `j` up to the truncation point, so one table
/// serves any number of bridges into the same target.
pub struct BridgeTable<'g> {
    g: &'g RegularGraph,
    target: usize,
    ell: f64,
    /// `powers[j][z] = P^j(z, target)`.
    powers: Vec<Vec<f64>>,
    ln_pois: Vec<f64>,
}

impl<'g> BridgeTable<'g> {
    pub fn new(g: &'g RegularGraph, target: usize, ell: f64) -> Result<Self, WalkError> {
        let kmax = poisson_truncation(ell, POISSON_TAIL);
        if kmax > MAX_BRIDGE_JUMPS {
            return Err(WalkError::TruncationBudget { mean: ell, budget: MAX_BRIDGE_JUMPS });
        }
        let n = g.n();
        let w = 1.0 / g.d() as f64;
        let mut powers = Vec::with_capacity(kmax + 1);
        let mut h = vec![0.0; n];
        h[target] = 1.0;
        powers.push(h);
        for j in 1..=kmax {
            let prev = &powers[j - 1];
            let next: Vec<f64> = (0..n).map(|z| w * g.neighbours(z).iter().map(|&v| prev[v]).sum::<f64>()).collect();
            powers.push(next);
        }
        let ln_pois = (0..=kmax).map(|k| ln_poisson_pmf(ell, k)).collect();
        Ok(BridgeTable { g, target, ell, powers, ln_pois })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn max_jumps(&self) -> usize {
        self.powers.len() - 1
    }

    /// `P^k(x, target)`.
    pub fn transition_power(&self, x: usize, k: usize) -> f64 {
        self.powers[k][x]
    }

    /// Law of the jump count of a bridge from `x`, unnormalised and scaled by the modal Poisson weight.
    pub fn jump_count_weights(&self, x: usize) -> Vec<f64> {
        let peak = self.ln_pois.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.ln_pois.iter().enumerate().map(|(k, &lp)| (lp - peak).exp() * self.powers[k][x]).collect()
    }

    /// Draws a bridge from `x` to the target.
    pub fn sample(&self, x: usize, rng: &mut Rng) -> Result<Trajectory, WalkError> {
        let weights = self.jump_count_weights(x);
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(WalkError::Unreachable { x, y: self.target });
        }
        let mut pick = rng.random::<f64>() * total;
        let mut k = weights.len() - 1;
        for (j, &w) in weights.iter().enumerate() {
            if pick < w {
                k = j;
                break;
            }
            pick -= w;
        }
        while self.powers[k][x] == 0.0 {
            k -= 1;
        }
        let mut vertices = Vec::with_capacity(k + 1);
        vertices.push(x);
        let mut v = x;
        for j in 0..k {
            let h = &self.powers[k - j - 1];
            let nb = self.g.neighbours(v);
            let total: f64 = nb.iter().map(|&z| h[z]).sum();
            let mut pick = rng.random::<f64>() * total;
            let mut next = *nb.iter().rev().find(|&&z| h[z] > 0.0).expect("positive continuation");
            for &z in nb {
                if h[z] > 0.0 && pick < h[z] {
                    next = z;
                    break;
                }
                pick -= h[z];
            }
            v = next;
            vertices.push(v);
        }
        let mut jump_times: Vec<f64> = (0..k)
            .map(|_| loop {
                let t = rng.random::<f64>() * self.ell;
                if t > 0.0 {
                    break t;
                }
            })
            .collect();
        jump_times.sort_by(f64::total_cmp);
        Ok(Trajectory { vertices, jump_times, horizon: self.ell })
    }
}

/// One bridge of duration `ell` from `x` to `y`.
pub fn sample_bridge(g: &RegularGraph, x: usize, y: usize, ell: f64, rng: &mut Rng) -> Result<Trajectory, WalkError> {
    BridgeTable::new(g, y, ell)?.sample(x, rng)
}

/// Jump-count diagnostics for segments and bridges.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct JumpReport {
    pub segment_jumps: Vec<usize>,
    pub bridge_jumps: Vec<usize>,
    /// Segments whose jump count lies outside `(L/2, 2L)`, with `L` the segment duration.
    pub flagged_segments: Vec<usize>,
    /// Bridges with more than `ln³ n` jumps.
    pub flagged_bridges: Vec<usize>,
}

pub fn jump_stats(n: usize, segments: &[Trajectory], bridges: &[Trajectory]) -> JumpReport {
    let cap = (n as f64).ln().powi(3);
    let segment_jumps: Vec<usize> = segments.iter().map(Trajectory::jumps).collect();
    let bridge_jumps: Vec<usize> = bridges.iter().map(Trajectory::jumps).collect();
    let flagged_segments = segments
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            let (lo, hi, k) = (s.horizon / 2.0, 2.0 * s.horizon, s.jumps() as f64);
            s.horizon > 0.0 && !(lo < k && k < hi)
        })
        .map(|(i, _)| i)
        .collect();
    let flagged_bridges = bridge_jumps.iter().enumerate().filter(|(_, &k)| k as f64 > cap).map(|(i, _)| i).collect();
    JumpReport { segment_jumps, bridge_jumps, flagged_segments, flagged_bridges }
}

/// Debug dump: `n_jumps horizon`, then `vertex time` per state (time = entry time).
pub fn write_trajectory<W: Write>(traj: &Trajectory, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{} {}", traj.jumps(), traj.horizon)?;
    writeln!(out, "{} 0", traj.vertices[0])?;
    for (v, t) in traj.vertices[1..].iter().zip(&traj.jump_times) {
        writeln!(out, "{v} {t}")?;
    }
    Ok(())
}
