//! Reproducible experiments behind the command-line tool: sweeps over the
//! intensity, local-law comparisons, hitting rates and exploration drift.

use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calibrated;
use crate::graph::{self, generate_random_regular, GraphError, RegularGraph, VertexSet};
use crate::interlace::{self, InterlaceError};
use crate::pim::{self, PimError, PimOptions, PimParams, RunConfig};
use crate::potential::{self, PotentialError};
use crate::rng;
use crate::vacancy::{self, VacancyError};
use crate::walk::{sample_walk, vacant_set, Start, WalkError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no vertex with a tree-like ball of radius {0}")]
    NoTreelike(usize),
    #[error("exact oracle refused: n = {n} exceeds {max}")]
    TooLarge { n: usize, max: usize },
    #[error("row {row}: {reason}")]
    Record { row: usize, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Pim(#[from] PimError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Interlace(#[from] InterlaceError),
    #[error(transparent)]
    Vacancy(#[from] VacancyError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Settings shared by all experiments.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub d: usize,
    /// Intensity grid, kept sorted.
    pub u: Vec<f64>,
    /// Number of seeds; seed `s` runs for `s` in `seed..seed + seeds`.
    pub seeds: u64,
    pub replicas: usize,
    pub gamma: Option<f64>,
    pub delta: f64,
    pub seed: u64,
    /// Record wall-clock time per row; off for byte-identical output.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 4096,
            d: 3,
            u: vec![2.0],
            seeds: 20,
            replicas: 1000,
            gamma: None,
            delta: 0.1,
            seed: 0,
            timing: true,
        }
    }
}

impl ExperimentConfig {
    /// Overrides the fields set in a configuration file.
    pub fn apply(mut self, file: &RunConfig) -> Self {
        if let Some(n) = file.n {
            self.n = n;
        }
        if let Some(d) = file.d {
            self.d = d;
        }
        if !file.u.is_empty() {
            self.u = file.u.clone();
        }
        if file.gamma.is_some() {
            self.gamma = file.gamma;
        }
        if let Some(delta) = file.delta {
            self.delta = delta;
        }
        if let Some(s) = file.seeds {
            self.seeds = s as u64;
        }
        if let Some(r) = file.replicas {
            self.replicas = r;
        }
        self
    }

    /// Checks ranges and sorts the intensity grid.
    pub fn validated(mut self) -> Result<Self, ExperimentError> {
        let bad = |s: String| Err(ExperimentError::Config(s));
        if self.d < 3 || self.n <= self.d || (self.n * self.d) % 2 == 1 {
            return bad(format!("need d >= 3, n > d and n*d even (n={}, d={})", self.n, self.d));
        }
        if self.seeds == 0 || self.replicas == 0 {
            return bad("seeds and replicas must be positive".into());
        }
        if let Some(x) = self.u.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
            return bad(format!("intensity {x} must be finite and non-negative"));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g < 1.0) {
                return bad(format!("gamma {g} must lie in (0, 1)"));
            }
        }
        if !(self.delta > 0.0) {
            return bad(format!("delta {} must be positive", self.delta));
        }
        self.u.sort_by(f64::total_cmp);
        Ok(self)
    }

    fn seed_range(&self) -> impl Iterator<Item = u64> + '_ {
        self.seed..self.seed + self.seeds
    }

    fn pim_options(&self) -> PimOptions {
        PimOptions { gamma: Some(self.gamma.unwrap_or(calibrated::SEGMENT_GAMMA)), delta: self.delta, ..PimOptions::default() }
    }

    fn first_u(&self) -> Result<f64, ExperimentError> {
        self.u.first().copied().ok_or_else(|| ExperimentError::Config("empty intensity grid".into()))
    }
}

/// One named pass/fail check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Assertion { name: name.to_string(), passed, detail }
    }
}

pub fn all_passed(assertions: &[Assertion]) -> bool {
    assertions.iter().all(|a| a.passed)
}

fn near_critical(u: f64, u_star: f64) -> bool {
    (u - u_star).abs() < calibrated::NEAR_CRITICAL_WINDOW
}

/// One row of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    pub d: usize,
    pub u: f64,
    pub seed: u64,
    pub c_max: usize,
    pub c_sec: usize,
    pub vacant_count: usize,
    /// Sprinkling good event for the segment construction at `u`; empty at or above `u⋆`.
    pub good_event: Option<bool>,
    pub wall_ms: u64,
}

impl SweepRecord {
    pub fn validate(&self) -> Result<(), String> {
        if self.c_max < self.c_sec {
            return Err(format!("c_max {} < c_sec {}", self.c_max, self.c_sec));
        }
        if self.vacant_count < self.c_max {
            return Err(format!("vacant_count {} < c_max {}", self.vacant_count, self.c_max));
        }
        if self.vacant_count > self.n {
            return Err(format!("vacant_count {} > n {}", self.vacant_count, self.n));
        }
        if !(self.u >= 0.0) {
            return Err(format!("intensity {} is negative", self.u));
        }
        Ok(())
    }
}

pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["n", "d", "u", "seed", "c_max", "c_sec", "vacant_count", "good_event", "wall_ms"])?;
    for (row, r) in records.iter().enumerate() {
        r.validate().map_err(|reason| ExperimentError::Record { row: row + 1, reason })?;
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>, ExperimentError> {
    let mut out = Vec::new();
    for (row, rec) in csv::Reader::from_reader(input).deserialize().enumerate() {
        let rec: SweepRecord = rec?;
        rec.validate().map_err(|reason| ExperimentError::Record { row: row + 1, reason })?;
        out.push(rec);
    }
    Ok(out)
}

fn sweep_good_event(cfg: &ExperimentConfig, u: f64, seed: u64) -> Option<bool> {
    let u_star = interlace::u_star(cfg.d).ok()?;
    if !(u > 0.0 && u < u_star) {
        return None;
    }
    let p = pim::derive_params(cfg.n, cfg.d, u, &cfg.pim_options()).ok()?;
    let m_un = p.at_level(p.sprinkled_level().ok()?).count_ceil;
    let marks = pim::sprinkle_marks(m_un, p.q_sprinkle, &mut rng::substream(seed, 2, u.to_bits()));
    Some(pim::good_event(&marks, p.count_ceil, p.j_max).holds)
}

/// For each seed, one graph and one walk up to `max(u) n`; each grid point reads its vacant set off the same walk.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRecord>, ExperimentError> {
    let Some(&u_max) = cfg.u.last() else { return Ok(Vec::new()) };
    let seeds: Vec<u64> = cfg.seed_range().collect();
    let per_seed: Vec<Vec<SweepRecord>> = seeds
        .par_iter()
        .map(|&seed| -> Result<Vec<SweepRecord>, ExperimentError> {
            let start = Instant::now();
            let g = generate_random_regular(cfg.n, cfg.d, seed)?;
            let walk = sample_walk(&g, Start::Stationary, u_max * cfg.n as f64, &mut rng::stream(seed, 1));
            let shared_ms = start.elapsed().as_millis() as u64;
            cfg.u
                .iter()
                .map(|&u| {
                    let t0 = Instant::now();
                    let config = vacant_set(&g, &walk, u)?;
                    let s = vacancy::components(&g, &config)?;
                    let wall_ms = if cfg.timing { shared_ms + t0.elapsed().as_millis() as u64 } else { 0 };
                    Ok(SweepRecord {
                        n: cfg.n,
                        d: cfg.d,
                        u,
                        seed,
                        c_max: s.c_max_size,
                        c_sec: s.c_sec_size,
                        vacant_count: s.vacant_count(),
                        good_event: sweep_good_event(cfg, u, seed),
                        wall_ms,
                    })
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let mut records: Vec<SweepRecord> = per_seed.into_iter().flatten().collect();
    records.sort_by(|a, b| a.seed.cmp(&b.seed).then(a.u.total_cmp(&b.u)));
    Ok(records)
}

/// Giant component below `u⋆` and logarithmic components above it.
pub fn sweep_assertions(records: &[SweepRecord]) -> Result<Vec<Assertion>, ExperimentError> {
    let mut out = Vec::new();
    for r in records {
        let u_star = interlace::u_star(r.d)?;
        if near_critical(r.u, u_star) || r.u == 0.0 {
            continue;
        }
        let label = format!("u={} seed={}", r.u, r.seed);
        if r.u < u_star {
            let frac = r.c_max as f64 / r.n as f64;
            out.push(Assertion::new("giant", frac >= calibrated::GIANT_FRACTION, format!("{label}: c_max/n = {frac:.4}")));
        } else {
            let bound = calibrated::SUBCRITICAL_LOG_FACTOR * (r.n as f64).ln();
            out.push(Assertion::new("subcritical", r.c_max as f64 <= bound, format!("{label}: c_max = {} vs {bound:.1}", r.c_max)));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniquenessRecord {
    pub seed: u64,
    pub u: f64,
    pub c_max_fraction: f64,
    pub c_sec_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub records: Vec<UniquenessRecord>,
    pub kappa: f64,
    pub assertions: Vec<Assertion>,
}

/// `|C_sec|/n` per seed below `u⋆`, asserted against `kappa` outside the near-critical window.
pub fn cmd_uniqueness(cfg: &ExperimentConfig, kappa: f64) -> Result<UniquenessReport, ExperimentError> {
    let u_star = interlace::u_star(cfg.d)?;
    let sweep = cmd_sweep(cfg)?;
    let records: Vec<UniquenessRecord> = sweep
        .iter()
        .map(|r| UniquenessRecord {
            seed: r.seed,
            u: r.u,
            c_max_fraction: r.c_max as f64 / r.n as f64,
            c_sec_fraction: r.c_sec as f64 / r.n as f64,
        })
        .collect();
    let mut assertions = Vec::new();
    for &u in &cfg.u {
        if u >= u_star || near_critical(u, u_star) {
            continue;
        }
        let worst = records.iter().filter(|r| r.u == u).map(|r| r.c_sec_fraction).fold(0.0, f64::max);
        assertions.push(Assertion::new("second_component", worst <= kappa, format!("u={u}: max c_sec/n = {worst:.5} vs {kappa}")));
    }
    Ok(UniquenessReport { records, kappa, assertions })
}

pub fn write_uniqueness_csv<W: Write>(report: &UniquenessReport, out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    for r in &report.records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Empirical law of a cluster size.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SizeLaw {
    pub counts: Vec<u64>,
    pub samples: u64,
}

impl SizeLaw {
    fn from_sizes(sizes: impl IntoIterator<Item = usize>) -> Self {
        let mut law = SizeLaw::default();
        for s in sizes {
            if law.counts.len() <= s {
                law.counts.resize(s + 1, 0);
            }
            law.counts[s] += 1;
            law.samples += 1;
        }
        law
    }

    pub fn pmf(&self, k: usize) -> f64 {
        self.counts.get(k).copied().unwrap_or(0) as f64 / self.samples as f64
    }

    pub fn cdf(&self, k: usize) -> f64 {
        self.counts.iter().take(k + 1).sum::<u64>() as f64 / self.samples as f64
    }

    pub fn total_variation(&self, other: &SizeLaw) -> f64 {
        let len = self.counts.len().max(other.counts.len());
        0.5 * (0..len).map(|k| (self.pmf(k) - other.pmf(k)).abs()).sum::<f64>()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalLawReport {
    pub n: usize,
    pub d: usize,
    pub u: f64,
    pub epsilon: f64,
    pub center: usize,
    pub radius: usize,
    pub segments: usize,
    pub segment_length: f64,
    pub empirical: SizeLaw,
    /// Tree law at `u(1+ε)`: stochastically smallest.
    pub upper_level: SizeLaw,
    /// Tree law at `u(1-ε)`: stochastically largest.
    pub lower_level: SizeLaw,
    pub tv_upper: f64,
    pub tv_lower: f64,
    /// Largest amount by which the empirical CDF leaves the band between the two tree CDFs.
    pub band_excess: f64,
    pub assertions: Vec<Assertion>,
}

fn treelike_center(g: &RegularGraph, radius: usize) -> Result<usize, ExperimentError> {
    (0..g.n()).find(|&x| graph::ball_tree_excess(g, x, radius) == 0).ok_or(ExperimentError::NoTreelike(radius))
}

/// Law of `|C_y(1_{B_y} ξ_u)|` against the `u(1±ε)` tree clusters cut to the same radius.
pub fn cmd_compare_local(cfg: &ExperimentConfig) -> Result<LocalLawReport, ExperimentError> {
    let u = cfg.first_u()?;
    let (n, d, radius) = (cfg.n, cfg.d, calibrated::LOCAL_RADIUS);
    let g = generate_random_regular(n, d, cfg.seed)?;
    let y = treelike_center(&g, calibrated::LOCAL_TREE_RADIUS.max(radius))?;
    let ball = graph::ball(&g, y, radius);
    let (epsilon, count, big_l) = if u > 0.0 {
        let p = pim::derive_params(n, d, u, &cfg.pim_options())?;
        (p.epsilon, p.count_ceil, p.big_l)
    } else {
        (0.0, 0, 0.0)
    };
    let sizes: Vec<usize> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| -> Result<usize, ExperimentError> {
            let mut rr = rng::substream(cfg.seed, 20, r as u64);
            let bundle = pim::sample_segments(&g, count, big_l, &mut rr);
            let config = pim::xi_segments(&bundle, n, count, u)?;
            Ok(vacancy::local_component(&g, &config, y, &ball)?.len())
        })
        .collect::<Result<_, _>>()?;
    let empirical = SizeLaw::from_sizes(sizes);
    let levels = [u * (1.0 + epsilon), u * (1.0 - epsilon)];
    let pairs: Vec<(usize, usize)> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| -> Result<(usize, usize), ExperimentError> {
            let mut rr = rng::substream(cfg.seed, 21, r as u64);
            let c = interlace::sample_cluster_levels(d, &levels, &mut rr, radius as u32, usize::MAX)?;
            Ok((c[0].size(), c[1].size()))
        })
        .collect::<Result<_, _>>()?;
    let upper_level = SizeLaw::from_sizes(pairs.iter().map(|p| p.0));
    let lower_level = SizeLaw::from_sizes(pairs.iter().map(|p| p.1));
    let top = ball.len();
    let band_excess = (0..=top)
        .map(|k| {
            let f = empirical.cdf(k);
            (lower_level.cdf(k) - f).max(f - upper_level.cdf(k)).max(0.0)
        })
        .fold(0.0, f64::max);
    let assertions = vec![Assertion::new(
        "local_sandwich",
        band_excess <= calibrated::LOCAL_TV_SLACK,
        format!("band excess {band_excess:.4} vs slack {}", calibrated::LOCAL_TV_SLACK),
    )];
    Ok(LocalLawReport {
        n,
        d,
        u,
        epsilon,
        center: y,
        radius,
        segments: count,
        segment_length: big_l,
        tv_upper: empirical.total_variation(&upper_level),
        tv_lower: empirical.total_variation(&lower_level),
        empirical,
        upper_level,
        lower_level,
        band_excess,
        assertions,
    })
}

/// Largest graph on which the rate experiment runs its exact solvers.
pub const RATES_MAX_N: usize = 50_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatesReport {
    pub n: usize,
    pub d: usize,
    pub horizon: f64,
    pub target: usize,
    pub tree_radius: usize,
    pub point_rate: f64,
    pub point_target: f64,
    pub conditional_rate: f64,
    pub conditional_target: f64,
    pub future_proper: bool,
    pub assertions: Vec<Assertion>,
}

/// Exact hitting rates of a tree-like point and of a neighbour given the point is avoided, at `T = n`.
pub fn cmd_rates(cfg: &ExperimentConfig, tree_radius: usize) -> Result<RatesReport, ExperimentError> {
    let (n, d) = (cfg.n, cfg.d);
    if n > RATES_MAX_N {
        return Err(ExperimentError::TooLarge { n, max: RATES_MAX_N });
    }
    let g = generate_random_regular(n, d, cfg.seed)?;
    let target = treelike_center(&g, tree_radius + 1)?;
    let t = n as f64;
    let df = d as f64;
    let point_rate = potential::hitpoint_rate(&g, target, t)?;
    let a = VertexSet::from_vertices(n, [target]);
    let y = g.neighbours(target)[0];
    let conditional_rate = potential::conditional_rate(&g, &a, y, t)?;
    let future_proper = vacancy::future_set(&g, &a, y, tree_radius)?.proper();
    let point_target = (df - 2.0) / (df - 1.0);
    let conditional_target = (df - 2.0).powi(2) / (df * (df - 1.0));
    let tol = calibrated::RATE_TOLERANCE;
    let mut assertions = Vec::new();
    if tree_radius >= 2 {
        assertions.push(Assertion::new(
            "point_rate",
            (point_rate - point_target).abs() <= tol,
            format!("{point_rate:.4} vs {point_target:.4}"),
        ));
        if future_proper {
            assertions.push(Assertion::new(
                "conditional_rate",
                (conditional_rate - conditional_target).abs() <= tol,
                format!("{conditional_rate:.4} vs {conditional_target:.4}"),
            ));
        }
    }
    Ok(RatesReport {
        n,
        d,
        horizon: t,
        target,
        tree_radius,
        point_rate,
        point_target,
        conditional_rate,
        conditional_target,
        future_proper,
        assertions,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeRow {
    pub d: usize,
    pub u: f64,
    pub u_star: f64,
    pub p_u: f64,
    pub m_u: f64,
    pub v_u: f64,
    pub root_vacancy: f64,
    pub extinction: f64,
}

/// Branching-process quantities of the tree model over the intensity grid.
pub fn cmd_tree(cfg: &ExperimentConfig) -> Result<Vec<TreeRow>, ExperimentError> {
    cfg.u
        .iter()
        .map(|&u| {
            let p = interlace::params(cfg.d, u)?;
            Ok(TreeRow {
                d: cfg.d,
                u,
                u_star: p.u_star,
                p_u: p.p_u,
                m_u: p.m_u,
                v_u: p.v_u,
                root_vacancy: p.root_vacancy(),
                extinction: interlace::extinction_probability(cfg.d, u, 1e-13)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BridgeTestReport {
    pub params: PimParams,
    pub report: pim::RadonNikodymReport,
    pub assertions: Vec<Assertion>,
}

/// Per-vertex vacancy under the walk against the segment-bridge concatenation.
pub fn cmd_bridge_test(cfg: &ExperimentConfig) -> Result<BridgeTestReport, ExperimentError> {
    let u = cfg.first_u()?;
    let g = generate_random_regular(cfg.n, cfg.d, cfg.seed)?;
    let params = pim::derive_params(cfg.n, cfg.d, u, &cfg.pim_options())?;
    let report = pim::radon_nikodym_check(&g, &params, cfg.replicas, cfg.seed)?;
    let assertions = vec![Assertion::new(
        "vacancy_agreement",
        report.flagged.is_empty(),
        format!("{} vertices beyond 3 pooled SE, max z {:.2}, max |Δ| {:.5}", report.flagged.len(), report.max_z, report.max_abs_diff),
    )];
    // The per-vertex vectors are too long to print.
    let report = pim::RadonNikodymReport { walk_freq: Vec::new(), concat_freq: Vec::new(), ..report };
    Ok(BridgeTestReport { params, report, assertions })
}

#[derive(Clone, Debug, Serialize)]
pub struct AssumptionCheck {
    pub seed: u64,
    pub report: graph::AssumptionReport,
}

/// Structural assumptions on each seeded graph.
pub fn cmd_check_assumptions(cfg: &ExperimentConfig, alpha1: f64, alpha2: f64) -> Result<(Vec<AssumptionCheck>, Vec<Assertion>), ExperimentError> {
    let seeds: Vec<u64> = cfg.seed_range().collect();
    let checks: Vec<AssumptionCheck> = seeds
        .par_iter()
        .map(|&seed| {
            let g = generate_random_regular(cfg.n, cfg.d, seed)?;
            Ok(AssumptionCheck { seed, report: graph::check_assumptions(&g, alpha1, alpha2)? })
        })
        .collect::<Result<_, ExperimentError>>()?;
    let assertions = checks
        .iter()
        .map(|c| {
            let r = &c.report;
            Assertion::new(
                "assumptions",
                r.a0_ok && r.a1_ok && r.a2_ok,
                format!("seed {}: regular {}, one cycle per ball {}, gap {:.4}", c.seed, r.a0_ok, r.a1_ok, r.spectral_gap),
            )
        })
        .collect();
    Ok((checks, assertions))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftReport {
    pub n: usize,
    pub d: usize,
    pub u: f64,
    pub explorations: usize,
    pub proper_steps: usize,
    pub decrements: usize,
    pub frequency: f64,
    pub properness_failures: usize,
    pub size_cap_hits: usize,
    pub assertions: Vec<Assertion>,
}

/// Queue decrements over proper steps of `replicas` explorations, spread over `seeds` graphs.
pub fn cmd_drift(cfg: &ExperimentConfig) -> Result<DriftReport, ExperimentError> {
    let u = cfg.first_u()?;
    let (n, d) = (cfg.n, cfg.d);
    let seeds: Vec<u64> = cfg.seed_range().collect();
    let per_graph = cfg.replicas.div_ceil(seeds.len());
    let opts = vacancy::ExploreOptions { k_cap: calibrated::EXPLORATION_CAP, future_radius: calibrated::FUTURE_RADIUS };
    let traces: Vec<(usize, usize, usize, bool)> = seeds
        .par_iter()
        .map(|&seed| -> Result<Vec<_>, ExperimentError> {
            let g = generate_random_regular(n, d, seed)?;
            let p = pim::derive_params(n, d, u, &cfg.pim_options())?;
            let bundle = pim::sample_segments(&g, p.count_ceil, p.big_l, &mut rng::stream(seed, 3));
            let index = vacancy::SegmentIndex::new(n, &bundle.segments);
            let mut pick = rng::stream(seed, 4);
            Ok((0..per_graph)
                .map(|_| {
                    let x = rand::Rng::random_range(&mut pick, 0..n);
                    let t = vacancy::bfs_explore_instrumented(&g, &index, x, &opts);
                    let (dec, steps) = t.proper_decrements();
                    (dec, steps, t.proper_failures(), t.termination == vacancy::Termination::SizeCap)
                })
                .collect())
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .take(cfg.replicas)
        .collect();
    let decrements = traces.iter().map(|t| t.0).sum();
    let proper_steps = traces.iter().map(|t| t.1).sum();
    let frequency = decrements as f64 / proper_steps as f64;
    let floor = (d as f64 - 2.0) / (d as f64 - 1.0);
    let assertions = vec![Assertion::new(
        "drift",
        proper_steps > 0 && frequency >= floor,
        format!("{decrements}/{proper_steps} = {frequency:.4} vs {floor:.4}"),
    )];
    Ok(DriftReport {
        n,
        d,
        u,
        explorations: traces.len(),
        proper_steps,
        decrements,
        frequency,
        properness_failures: traces.iter().map(|t| t.2).sum(),
        size_cap_hits: traces.iter().filter(|t| t.3).count(),
        assertions,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub n: usize,
    pub d: usize,
    pub u: f64,
    pub seed: u64,
    pub small: usize,
    pub proper: usize,
    pub bad: usize,
    pub census_threshold: usize,
    pub census: usize,
}

/// Small/proper/bad counts of `ξ_{u_n}` and the number of vertices in components larger than `ld² n`.
pub fn classify_all(cfg: &ExperimentConfig, seed: u64) -> Result<ClassificationReport, ExperimentError> {
    let u = cfg.first_u()?;
    let (n, d) = (cfg.n, cfg.d);
    let g = generate_random_regular(n, d, seed)?;
    let p = pim::derive_params(n, d, u, &cfg.pim_options())?;
    let un = p.sprinkled_level()?;
    let count = p.at_level(un).count_ceil;
    let bundle = pim::sample_segments(&g, count, p.big_l, &mut rng::stream(seed, 5));
    let config = pim::xi_segments(&bundle, n, count, un)?;
    let r = calibrated::CLASSIFY_RADIUS;
    let cp = vacancy::ClassifyParams::with_radius(n, d, u, p.epsilon, r, r + 1, calibrated::PROPER_H)?;
    let classes: Vec<vacancy::VertexClass> =
        (0..n).into_par_iter().map(|x| vacancy::classify_vertex(&g, &config, x, &cp)).collect::<Result<_, _>>()?;
    let count_of = |c| classes.iter().filter(|&&k| k == c).count();
    let summary = vacancy::components(&g, &config)?;
    let census_threshold = cp.size_cap.ceil() as usize;
    Ok(ClassificationReport {
        n,
        d,
        u,
        seed,
        small: count_of(vacancy::VertexClass::Small),
        proper: count_of(vacancy::VertexClass::Proper),
        bad: count_of(vacancy::VertexClass::Bad),
        census_threshold,
        census: vacancy::mesoscopic_census(&summary, census_threshold),
    })
}
