//! The piecewise independent measure: i.i.d. walk segments of length `L`
//! joined by bridges of length `ℓ = ln²n`, the vacant sets they leave, and
//! the sprinkling construction that deletes segments at random.

use std::collections::HashMap;
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{RegularGraph, VertexSet};
use crate::interlace::{self, InterlaceError};
use crate::rng::{self, Rng};
use crate::walk::{sample_walk, BridgeTable, Provenance, Start, Trajectory, VacantConfig, WalkError};

#[derive(Debug, Error, PartialEq)]
pub enum PimError {
    #[error("intensity must be positive, got {0}")]
    Intensity(f64),
    #[error("u = {u} is not below the critical value {u_star}")]
    Supercritical { u: f64, u_star: f64 },
    #[error("no dyadic epsilon satisfies both constraints at u = {0}")]
    NoEpsilon(f64),
    #[error("gamma must lie in (0, 1), got {0}")]
    Gamma(f64),
    #[error("delta must be positive, got {0}")]
    Delta(f64),
    #[error("need {needed} segments, bundle has {have}")]
    InsufficientSegments { needed: usize, have: usize },
    #[error("bundle has no bridges")]
    MissingBridges,
    #[error("bundle has no long-range bridges")]
    MissingLongRange,
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Interlace(#[from] InterlaceError),
}

/// Which rounding of `un/(L+ℓ)` sets the number of segments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentCount {
    /// `⌊un/(L+ℓ)⌋`, an upper bound on the walk's vacant set.
    #[default]
    Floor,
    /// `⌈un/(L+ℓ)⌉`, enough segments to cover `[0, un]`.
    Ceil,
}

impl FromStr for SegmentCount {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "floor" => Ok(SegmentCount::Floor),
            "ceil" => Ok(SegmentCount::Ceil),
            other => Err(format!("expected floor or ceil, got {other:?}")),
        }
    }
}

/// How `ε` and `γ` are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpsilonMode {
    /// `u < u⋆` is required; `ε` is the largest admissible dyadic value and `γ = v_{u(1+ε)} β / 2`.
    BelowCritical,
    /// Below `u⋆` as above; at or above it `ε = 0` and `γ = β/2`.
    Any,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PimOptions {
    pub alpha1: f64,
    pub delta: f64,
    /// Replaces the derived `γ`.
    pub gamma: Option<f64>,
    pub mode: EpsilonMode,
}

impl Default for PimOptions {
    fn default() -> Self {
        PimOptions { alpha1: 0.2, delta: 0.1, gamma: None, mode: EpsilonMode::Any }
    }
}

/// Lengths and counts of the segment construction for one `(n, d, u)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PimParams {
    pub n: usize,
    pub d: usize,
    pub u: f64,
    pub epsilon: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Segment length `n^γ`.
    pub big_l: f64,
    /// Bridge length `ln²n`.
    pub ell: f64,
    pub count_floor: usize,
    pub count_ceil: usize,
    pub delta: f64,
    /// Deletion probability `n^{-2δ}`.
    pub q_sprinkle: f64,
    /// Long-range reach `⌊ln n⌋`.
    pub j_max: usize,
}

impl PimParams {
    /// Parameters with explicit segment and bridge lengths.
    pub fn with_lengths(n: usize, d: usize, u: f64, big_l: f64, ell: f64, delta: f64) -> Self {
        let nf = n as f64;
        let ratio = u * nf / (big_l + ell);
        PimParams {
            n,
            d,
            u,
            epsilon: 0.0,
            beta: 0.0,
            gamma: big_l.ln() / nf.ln(),
            big_l,
            ell,
            count_floor: (ratio + 1e-12).floor() as usize,
            count_ceil: (ratio - 1e-12).ceil().max(0.0) as usize,
            delta,
            q_sprinkle: nf.powf(-2.0 * delta),
            j_max: nf.ln().floor() as usize,
        }
    }

    pub fn count(&self, variant: SegmentCount) -> usize {
        match variant {
            SegmentCount::Floor => self.count_floor,
            SegmentCount::Ceil => self.count_ceil,
        }
    }

    /// Total time `un` covered by the walk.
    pub fn horizon(&self) -> f64 {
        self.u * self.n as f64
    }

    /// Same lengths at another intensity.
    pub fn at_level(&self, u: f64) -> Self {
        PimParams { epsilon: self.epsilon, beta: self.beta, ..PimParams::with_lengths(self.n, self.d, u, self.big_l, self.ell, self.delta) }
    }

    /// `u_n = min(u + n^{-δ}, (u + u⋆)/2)`.
    pub fn sprinkled_level(&self) -> Result<f64, PimError> {
        let u_star = interlace::u_star(self.d)?;
        Ok((self.u + (self.n as f64).powf(-self.delta)).min(0.5 * (self.u + u_star)))
    }
}

/// Largest `2^{-k}` with `u(1+ε) < (u+u⋆)/2` and `1/4 + 11ε/4 < u⋆/(2(u+u⋆))`.
pub fn dyadic_epsilon(u: f64, u_star: f64) -> Option<f64> {
    (1..64).map(|k| 0.5f64.powi(k)).find(|&eps| {
        u * (1.0 + eps) < 0.5 * (u + u_star) && 0.25 + 2.75 * eps < u_star / (2.0 * (u + u_star))
    })
}

pub fn derive_params(n: usize, d: usize, u: f64, opts: &PimOptions) -> Result<PimParams, PimError> {
    if !(u > 0.0) {
        return Err(PimError::Intensity(u));
    }
    if !(opts.delta > 0.0) {
        return Err(PimError::Delta(opts.delta));
    }
    let u_star = interlace::u_star(d)?;
    let beta = opts.alpha1 / 100.0;
    let (epsilon, gamma) = if u < u_star {
        let eps = dyadic_epsilon(u, u_star).ok_or(PimError::NoEpsilon(u))?;
        (eps, interlace::params(d, u * (1.0 + eps))?.v_u * beta / 2.0)
    } else if opts.mode == EpsilonMode::BelowCritical {
        return Err(PimError::Supercritical { u, u_star });
    } else {
        (0.0, beta / 2.0)
    };
    let gamma = opts.gamma.unwrap_or(gamma);
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(PimError::Gamma(gamma));
    }
    let nf = n as f64;
    let p = PimParams::with_lengths(n, d, u, nf.powf(gamma), nf.ln().powi(2), opts.delta);
    Ok(PimParams { epsilon, beta, gamma, ..p })
}

/// Segments, optionally with consecutive bridges and long-range bridges.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentBundle {
    pub segments: Vec<Trajectory>,
    /// `bridges[i]` runs from the end of segment `i` to the start of segment `i+1`.
    pub bridges: Option<Vec<Trajectory>>,
    /// `longrange[i][j-1]` runs from the end of segment `i` to the start of segment `i+j`.
    pub longrange: Option<Vec<Vec<Trajectory>>>,
}

pub fn sample_segments(g: &RegularGraph, count: usize, big_l: f64, rng: &mut Rng) -> SegmentBundle {
    let segments = (0..count).map(|_| sample_walk(g, Start::Stationary, big_l, rng)).collect();
    SegmentBundle { segments, bridges: None, longrange: None }
}

/// One bridge request: `(from, to)`.
type Request = (usize, usize);

/// Samples bridges for many endpoint pairs, building one table per distinct target.
///
/// Request `k` draws from `substream(seed, stream, k)`, so output does not depend on grouping.
pub fn sample_bridges_batched(
    g: &RegularGraph,
    requests: &[Request],
    ell: f64,
    seed: u64,
    stream: u64,
) -> Result<Vec<Trajectory>, PimError> {
    let mut by_target: HashMap<usize, Vec<usize>> = HashMap::new();
    for (k, &(_, y)) in requests.iter().enumerate() {
        by_target.entry(y).or_default().push(k);
    }
    let mut groups: Vec<(usize, Vec<usize>)> = by_target.into_iter().collect();
    groups.sort_unstable_by_key(|(y, _)| *y);
    let sampled: Vec<Vec<(usize, Trajectory)>> = groups
        .par_iter()
        .map(|(y, ks)| {
            let table = BridgeTable::new(g, *y, ell)?;
            ks.iter()
                .map(|&k| {
                    let mut r = rng::substream(seed, stream, k as u64);
                    Ok((k, table.sample(requests[k].0, &mut r)?))
                })
                .collect::<Result<Vec<_>, WalkError>>()
        })
        .collect::<Result<_, _>>()?;
    let mut out: Vec<Option<Trajectory>> = vec![None; requests.len()];
    for (k, t) in sampled.into_iter().flatten() {
        out[k] = Some(t);
    }
    Ok(out.into_iter().map(|t| t.expect("every request sampled")).collect())
}

/// Adds `Z^i` from the end of segment `i` to the start of segment `i+1`.
pub fn attach_bridges(g: &RegularGraph, bundle: &mut SegmentBundle, ell: f64, rng: &mut Rng) -> Result<(), PimError> {
    let requests: Vec<Request> = bundle.segments.windows(2).map(|w| (w[0].end(), w[1].start())).collect();
    let seed: u64 = rng.random();
    bundle.bridges = Some(sample_bridges_batched(g, &requests, ell, seed, 0)?);
    Ok(())
}

/// Adds `Z^{i,j}` for `j = 1..=J` and every `i` with `i + J` a segment index.
pub fn attach_longrange(
    g: &RegularGraph,
    bundle: &mut SegmentBundle,
    ell: f64,
    j_max: usize,
    rng: &mut Rng,
) -> Result<(), PimError> {
    let rows = bundle.segments.len().saturating_sub(j_max);
    let requests: Vec<Request> = (0..rows)
        .flat_map(|i| (1..=j_max).map(move |j| (i, j)))
        .map(|(i, j)| (bundle.segments[i].end(), bundle.segments[i + j].start()))
        .collect();
    let seed: u64 = rng.random();
    let mut flat = sample_bridges_batched(g, &requests, ell, seed, 1)?.into_iter();
    bundle.longrange = Some((0..rows).map(|_| flat.by_ref().take(j_max).collect()).collect());
    Ok(())
}

/// Path `Y^0 Z^0 Y^1 Z^1 ...` using every segment and every available bridge.
pub fn concatenate(bundle: &SegmentBundle) -> Result<Trajectory, PimError> {
    let Some(first) = bundle.segments.first() else {
        return Err(PimError::InsufficientSegments { needed: 1, have: 0 });
    };
    let empty = Vec::new();
    let bridges = match &bundle.bridges {
        Some(b) => b,
        None if bundle.segments.len() == 1 => &empty,
        None => return Err(PimError::MissingBridges),
    };
    if bridges.len() + 1 < bundle.segments.len() {
        return Err(PimError::MissingBridges);
    }
    let mut out = first.clone();
    for (seg, bridge) in bundle.segments[1..].iter().zip(bridges) {
        out.append(bridge);
        out.append(seg);
    }
    if bridges.len() >= bundle.segments.len() {
        out.append(&bridges[bundle.segments.len() - 1]);
    }
    Ok(out)
}

/// Vacant set left by the first `count` segments.
pub fn xi_segments(bundle: &SegmentBundle, n: usize, count: usize, u: f64) -> Result<VacantConfig, PimError> {
    if bundle.segments.len() < count {
        return Err(PimError::InsufficientSegments { needed: count, have: bundle.segments.len() });
    }
    let visited = bundle.segments[..count].iter().flat_map(|s| s.vertices.iter().copied());
    Ok(VacantConfig::from_visited(n, visited, Provenance::Segments, u))
}

/// Vacant set left by the first `count` segments and all their long-range bridges.
pub fn xi_prime(bundle: &SegmentBundle, n: usize, count: usize, u: f64) -> Result<VacantConfig, PimError> {
    let lr = bundle.longrange.as_ref().ok_or(PimError::MissingLongRange)?;
    if lr.len() < count {
        return Err(PimError::InsufficientSegments { needed: count, have: lr.len() });
    }
    let visited = bundle.segments[..count]
        .iter()
        .chain(lr[..count].iter().flatten())
        .flat_map(|s| s.vertices.iter().copied());
    Ok(VacantConfig::from_visited(n, visited, Provenance::SegmentsBridges, u))
}

/// Deletion marks `R_k ~ Bernoulli(q)` for `k < count`.
pub fn sprinkle_marks(count: usize, q: f64, rng: &mut Rng) -> Vec<bool> {
    (0..count).map(|_| rng.random::<f64>() < q).collect()
}

/// Kept indices and whether the good event holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoodEvent {
    pub kept: Vec<usize>,
    pub holds: bool,
}

impl GoodEvent {
    /// `I`, the number of kept segments.
    pub fn kept_count(&self) -> usize {
        self.kept.len()
    }
}

/// At least `needed + 1` segments survive and the first `needed` gaps between survivors are at most `j_max`.
pub fn good_event(marks: &[bool], needed: usize, j_max: usize) -> GoodEvent {
    let kept: Vec<usize> = marks.iter().enumerate().filter(|(_, &r)| !r).map(|(k, _)| k).collect();
    let holds = kept.len() > needed && kept[..=needed].windows(2).all(|w| w[1] - w[0] <= j_max);
    GoodEvent { kept, holds }
}

/// Sprinkled vacant configuration, or the failure of the good event.
#[derive(Clone, Debug, PartialEq)]
pub struct SprinkleOutcome {
    pub event: GoodEvent,
    /// Present on the good event.
    pub config: Option<VacantConfig>,
}

/// Deletes segments of a bundle built at level `u_n` and rebuilds a walk of length `u n` from the rest.
///
/// `params` describes the target level `u`; `bundle` must carry long-range bridges
/// for its first `M_{u_n}` segments.
pub fn sprinkle(g: &RegularGraph, bundle: &SegmentBundle, params: &PimParams, rng: &mut Rng) -> Result<SprinkleOutcome, PimError> {
    let lr = bundle.longrange.as_ref().ok_or(PimError::MissingLongRange)?;
    let at_un = params.at_level(params.sprinkled_level()?);
    let m_un = at_un.count_ceil;
    if lr.len() < m_un {
        return Err(PimError::InsufficientSegments { needed: m_un, have: lr.len() });
    }
    let marks = sprinkle_marks(m_un, params.q_sprinkle, rng);
    let event = good_event(&marks, params.count_ceil, params.j_max);
    if !event.holds {
        return Ok(SprinkleOutcome { event, config: None });
    }
    let horizon = params.horizon();
    let mut visited = VertexSet::empty(g.n());
    let mut t = 0.0;
    for w in event.kept[..=params.count_ceil].windows(2) {
        if t > horizon {
            break;
        }
        let (k, gap) = (w[0], w[1] - w[0]);
        for piece in [&bundle.segments[k], &lr[k][gap - 1]] {
            let part = piece.restrict((horizon - t).max(0.0));
            part.vertices.iter().for_each(|&v| {
                visited.insert(v);
            });
            t += piece.horizon;
            if t > horizon {
                break;
            }
        }
    }
    let config = VacantConfig::from_visited(g.n(), visited.iter(), Provenance::Sprinkled, params.u);
    Ok(SprinkleOutcome { event, config: Some(config) })
}

/// Per-vertex vacancy frequencies under the walk and under the segment-bridge concatenation.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RadonNikodymReport {
    pub replicas: usize,
    pub walk_freq: Vec<f64>,
    pub concat_freq: Vec<f64>,
    pub max_abs_diff: f64,
    /// Largest `|Δ|` in units of the pooled standard error.
    pub max_z: f64,
    /// Vertices where `|Δ|` exceeds 3 pooled standard errors.
    pub flagged: Vec<usize>,
}

/// Compares `P^{un}` and `Q^{un}` through per-vertex vacancy frequencies.
///
/// Bridges for all replicas are sampled together, grouped by target vertex.
pub fn radon_nikodym_check(g: &RegularGraph, params: &PimParams, replicas: usize, seed: u64) -> Result<RadonNikodymReport, PimError> {
    if replicas == 0 {
        return Ok(RadonNikodymReport::default());
    }
    let n = g.n();
    let horizon = params.horizon();
    let count = params.count_ceil.max(1);
    let walk_counts: Vec<u32> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::substream(seed, 10, r as u64);
            let t = sample_walk(g, Start::Stationary, horizon, &mut rng);
            VacantConfig::from_visited(n, t.vertices.iter().copied(), Provenance::FullWalk, params.u).vacant
        })
        .fold(|| vec![0u32; n], add_indicator)
        .reduce(|| vec![0u32; n], add_counts);
    // count + 1 segments so the last bridge has a target.
    let bundles: Vec<SegmentBundle> = (0..replicas)
        .into_par_iter()
        .map(|r| sample_segments(g, count + 1, params.big_l, &mut rng::substream(seed, 11, r as u64)))
        .collect();
    let requests: Vec<Request> = bundles
        .iter()
        .flat_map(|b| b.segments.windows(2).map(|w| (w[0].end(), w[1].start())))
        .collect();
    let bridges = sample_bridges_batched(g, &requests, params.ell, seed, 12)?;
    let concat_counts: Vec<u32> = bundles
        .into_par_iter()
        .zip(bridges.par_chunks(count))
        .map(|(mut b, z)| {
            b.bridges = Some(z.to_vec());
            let path = concatenate(&b).expect("bridges attached").restrict(horizon);
            VacantConfig::from_visited(n, path.vertices.iter().copied(), Provenance::SegmentsBridges, params.u).vacant
        })
        .fold(|| vec![0u32; n], add_indicator)
        .reduce(|| vec![0u32; n], add_counts);
    let rf = replicas as f64;
    let walk_freq: Vec<f64> = walk_counts.iter().map(|&c| c as f64 / rf).collect();
    let concat_freq: Vec<f64> = concat_counts.iter().map(|&c| c as f64 / rf).collect();
    let mut report = RadonNikodymReport { replicas, ..Default::default() };
    for x in 0..n {
        let diff = (walk_freq[x] - concat_freq[x]).abs();
        let pooled = 0.5 * (walk_freq[x] + concat_freq[x]);
        let se = (pooled * (1.0 - pooled) * 2.0 / rf).sqrt();
        report.max_abs_diff = report.max_abs_diff.max(diff);
        let z = if se > 0.0 { diff / se } else if diff > 0.0 { f64::INFINITY } else { 0.0 };
        report.max_z = report.max_z.max(z);
        if z > 3.0 {
            report.flagged.push(x);
        }
    }
    report.walk_freq = walk_freq;
    report.concat_freq = concat_freq;
    Ok(report)
}

fn add_indicator(mut acc: Vec<u32>, set: VertexSet) -> Vec<u32> {
    for x in set.iter() {
        acc[x] += 1;
    }
    acc
}

fn add_counts(mut a: Vec<u32>, b: Vec<u32>) -> Vec<u32> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    a
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected key = value")]
    Syntax { line: usize },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key {key:?} given twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: bad value for {key:?}: {reason}")]
    Value { line: usize, key: String, reason: String },
}

/// Experiment settings read from a `key = value` file.
///
/// Keys: `n`, `d`, `u` (comma-separated, sorted on read), `gamma`, `delta`,
/// `seeds`, `replicas`, `variant` (`floor` or `ceil`). Blank lines and text
/// after `#` are ignored.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub u: Vec<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub seeds: Option<usize>,
    pub replicas: Option<usize>,
    pub variant: Option<SegmentCount>,
}

impl FromStr for RunConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::Duplicate { line, key: key.to_string() });
            }
            let bad = |reason: String| ConfigError::Value { line, key: key.to_string(), reason };
            fn positive<T: FromStr + PartialOrd + Default>(v: &str) -> Result<T, String>
            where
                T::Err: std::fmt::Display,
            {
                let x: T = v.parse().map_err(|e: T::Err| e.to_string())?;
                if x > T::default() {
                    Ok(x)
                } else {
                    Err("must be positive".into())
                }
            }
            match key {
                "n" => cfg.n = Some(positive(value).map_err(bad)?),
                "d" => cfg.d = Some(positive(value).map_err(bad)?),
                "seeds" => cfg.seeds = Some(positive(value).map_err(bad)?),
                "replicas" => cfg.replicas = Some(positive(value).map_err(bad)?),
                "gamma" => cfg.gamma = Some(positive(value).map_err(bad)?),
                "delta" => cfg.delta = Some(positive(value).map_err(bad)?),
                "variant" => cfg.variant = Some(value.parse().map_err(bad)?),
                "u" => {
                    let mut grid = Vec::new();
                    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let x: f64 = item.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?;
                        if !(x >= 0.0) {
                            return Err(bad(format!("{x} is negative")));
                        }
                        grid.push(x);
                    }
                    grid.sort_by(f64::total_cmp);
                    cfg.u = grid;
                }
                _ => return Err(ConfigError::UnknownKey { line, key: key.to_string() }),
            }
        }
        Ok(cfg)
    }
}
