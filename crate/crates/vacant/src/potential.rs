//! Exact potential theory for reversible chains on small graphs: hitting
//! times, equilibrium potentials, Dirichlet forms, survival probabilities and
//! quasi-stationary distributions, plus checks of the inequalities relating them.
//!
//! Time is continuous with rate-1 jumps, so the generator is `Δf(x) = Σ_y p_xy (f(y) - f(x))`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{self, GraphError, RegularGraph, VertexSet};
use crate::walk::{ln_poisson_pmf, poisson_truncation};

pub const MAX_ORACLE_VERTICES: usize = 50_000;
pub const MAX_SURVIVAL_TIME: f64 = 1e7;
pub const SOLVE_RESIDUAL: f64 = 1e-10;
pub const FORM_AGREEMENT: f64 = 1e-10;
/// Relative slack when comparing two sides of an inequality that can hold with equality.
pub const INEQUALITY_SLACK: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum PotentialError {
    #[error("exact oracles are limited to {MAX_ORACLE_VERTICES} vertices, got {0}")]
    TooLarge(usize),
    #[error("the boundary set is empty")]
    EmptySet,
    #[error("the sets overlap")]
    Overlap,
    #[error("vertex {0} cannot reach the boundary; the system is singular")]
    Singular(usize),
    #[error("linear solve residual {0:e} above tolerance")]
    Residual(f64),
    #[error("the two Dirichlet form expressions differ: {0} vs {1}")]
    FormMismatch(f64, f64),
    #[error("time {0} exceeds the uniformization limit")]
    TimeTooLarge(f64),
    #[error("conditioning event has probability {0:e}")]
    NegligibleCondition(f64),
    #[error("power iteration did not converge")]
    NoConvergence,
    #[error("vertex {0} is not adjacent to the set")]
    NotOnBoundary(usize),
    #[error("ball has tree excess {0} > 1")]
    TooManyCycles(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A reversible Markov chain given by transition probabilities and unnormalised stationary weights.
pub trait MarkovChain {
    fn n(&self) -> usize;
    /// Calls `f(y, p_xy)` for every transition out of `x`.
    fn for_each_transition(&self, x: usize, f: impl FnMut(usize, f64));
    /// Stationary weight of `x`, up to a common factor.
    fn weight(&self, x: usize) -> f64;

    fn total_weight(&self) -> f64 {
        (0..self.n()).map(|x| self.weight(x)).sum()
    }

    fn stationary(&self) -> Vec<f64> {
        let z = self.total_weight();
        (0..self.n()).map(|x| self.weight(x) / z).collect()
    }

    /// `1 - λ₂` for the transition operator.
    fn spectral_gap(&self) -> Result<f64, PotentialError> {
        let n = self.n();
        let w: Vec<f64> = (0..n).map(|x| self.weight(x).sqrt()).collect();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for x in 0..n {
            self.for_each_transition(x, |y, p| m[(x, y)] += w[x] * p / w[y]);
        }
        let m = (&m + m.transpose()) * 0.5;
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        Ok(1.0 - ev[1])
    }
}

impl MarkovChain for RegularGraph {
    fn n(&self) -> usize {
        RegularGraph::n(self)
    }

    fn for_each_transition(&self, x: usize, mut f: impl FnMut(usize, f64)) {
        let p = 1.0 / self.d() as f64;
        for &y in self.neighbours(x) {
            f(y, p);
        }
    }

    fn weight(&self, _x: usize) -> f64 {
        1.0
    }

    fn total_weight(&self) -> f64 {
        RegularGraph::n(self) as f64
    }

    fn spectral_gap(&self) -> Result<f64, PotentialError> {
        Ok(graph::spectral_gap(self)?)
    }
}

/// Reversible chain defined by symmetric edge conductances.
#[derive(Clone, Debug)]
pub struct WeightedChain {
    rows: Vec<Vec<(usize, f64)>>,
    weights: Vec<f64>,
}

impl WeightedChain {
    /// Chain with `p_xy = c_xy / Σ_z c_xz`; every vertex needs positive total conductance.
    pub fn from_conductances(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut rows = vec![Vec::new(); n];
        let mut weights = vec![0.0; n];
        for &(x, y, c) in edges {
            rows[x].push((y, c));
            rows[y].push((x, c));
            weights[x] += c;
            weights[y] += c;
        }
        for (row, &w) in rows.iter_mut().zip(&weights) {
            assert!(w > 0.0, "isolated vertex");
            row.iter_mut().for_each(|e| e.1 /= w);
        }
        WeightedChain { rows, weights }
    }

    /// Simple random walk on the path `0 - 1 - ... - len`.
    pub fn path(len: usize) -> Self {
        let edges: Vec<_> = (0..len).map(|k| (k, k + 1, 1.0)).collect();
        Self::from_conductances(len + 1, &edges)
    }

    /// Birth-death chain on `0..=len` stepping up with probability `up` at interior states, reflecting at the ends.
    pub fn birth_death(len: usize, up: f64) -> Self {
        let ratio = up / (1.0 - up);
        let edges: Vec<_> = (0..len).map(|k| (k, k + 1, ratio.powi(k as i32))).collect();
        Self::from_conductances(len + 1, &edges)
    }
}

impl MarkovChain for WeightedChain {
    fn n(&self) -> usize {
        self.rows.len()
    }

    fn for_each_transition(&self, x: usize, mut f: impl FnMut(usize, f64)) {
        for &(y, p) in &self.rows[x] {
            f(y, p);
        }
    }

    fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }
}

fn check_size<C: MarkovChain>(chain: &C) -> Result<(), PotentialError> {
    if chain.n() > MAX_ORACLE_VERTICES {
        return Err(PotentialError::TooLarge(chain.n()));
    }
    Ok(())
}

/// `Δf` at every vertex.
pub fn generator<C: MarkovChain>(chain: &C, f: &[f64]) -> Vec<f64> {
    (0..chain.n())
        .map(|x| {
            let mut acc = 0.0;
            chain.for_each_transition(x, |y, p| acc += p * (f[y] - f[x]));
            acc
        })
        .collect()
}

/// Solves `Δf = source` off `fixed` with `f = values` on `fixed`.
///
/// The restricted generator, weighted by the stationary measure, is symmetric
/// positive definite when every free vertex can reach `fixed`, so the system
/// is solved by Jacobi-preconditioned conjugate gradients followed by
/// residual-correction sweeps until the generator residual is below [`SOLVE_RESIDUAL`].
pub fn solve_dirichlet<C: MarkovChain>(
    chain: &C,
    fixed: &VertexSet,
    values: &[f64],
    source: &[f64],
) -> Result<Vec<f64>, PotentialError> {
    check_size(chain)?;
    let n = chain.n();
    let mut f: Vec<f64> = (0..n).map(|x| if fixed.contains(x) { values[x] } else { 0.0 }).collect();
    if fixed.len() == n {
        return Ok(f);
    }
    if fixed.is_empty() {
        return Err(PotentialError::EmptySet);
    }
    check_reachable(chain, fixed)?;
    let free: Vec<usize> = (0..n).filter(|&x| !fixed.contains(x)).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &x) in free.iter().enumerate() {
        index[x] = i;
    }
    let m = free.len();
    let w: Vec<f64> = free.iter().map(|&x| chain.weight(x)).collect();
    let mut diag = vec![0.0; m];
    for (i, &x) in free.iter().enumerate() {
        let mut stay = 0.0;
        chain.for_each_transition(x, |y, p| {
            if y == x {
                stay += p;
            }
        });
        diag[i] = w[i] * (1.0 - stay);
    }
    let apply = |v: &[f64], out: &mut [f64]| {
        for (i, &x) in free.iter().enumerate() {
            let mut acc = v[i];
            chain.for_each_transition(x, |y, p| {
                if index[y] != usize::MAX {
                    acc -= p * v[index[y]];
                }
            });
            out[i] = w[i] * acc;
        }
    };
    for _sweep in 0..8 {
        let lap = generator(chain, &f);
        let resid: Vec<f64> = free.iter().map(|&x| source[x] - lap[x]).collect();
        let worst = resid.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if worst <= 1e-2 * SOLVE_RESIDUAL {
            break;
        }
        // Correction c solves -Δc = -resid, i.e. K c = -w * resid.
        let b: Vec<f64> = resid.iter().zip(&w).map(|(r, wi)| -r * wi).collect();
        let c = conjugate_gradient(&apply, &diag, &b, 1e-15, 20 * m + 1000);
        for (i, &x) in free.iter().enumerate() {
            f[x] += c[i];
        }
    }
    let lap = generator(chain, &f);
    let worst = free.iter().map(|&x| (source[x] - lap[x]).abs()).fold(0.0, f64::max);
    if worst > SOLVE_RESIDUAL {
        return Err(PotentialError::Residual(worst));
    }
    Ok(f)
}

fn check_reachable<C: MarkovChain>(chain: &C, fixed: &VertexSet) -> Result<(), PotentialError> {
    let n = chain.n();
    // Reversibility makes reachability symmetric, so a forward search from the boundary suffices.
    let mut seen = fixed.clone();
    let mut stack = fixed.to_vec();
    while let Some(x) = stack.pop() {
        chain.for_each_transition(x, |y, p| {
            if p > 0.0 && seen.insert(y) {
                stack.push(y);
            }
        });
    }
    match (0..n).find(|&x| !seen.contains(x)) {
        Some(x) => Err(PotentialError::Singular(x)),
        None => Ok(()),
    }
}

fn conjugate_gradient(
    apply: &impl Fn(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Vec<f64> {
    let m = b.len();
    let mut x = vec![0.0; m];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; m];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        return x;
    }
    for _ in 0..max_iter {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r_norm <= rel_tol * b_norm {
            break;
        }
        for i in 0..m {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..m {
            p[i] = z[i] + beta * p[i];
        }
    }
    x
}

/// Expected hitting times of `A` and the minimiser of the variational problem for `1/E[H_A]`.
#[derive(Clone, Debug, Serialize)]
pub struct HittingSolution {
    /// `E_x[H_A]` for every `x`.
    pub expected_times: Vec<f64>,
    /// `E[H_A]` under the stationary start.
    pub stationary_mean: f64,
    /// `f⋆(x) = 1 - E_x[H_A] / E[H_A]`.
    pub f_star: Vec<f64>,
}

pub fn expected_hitting_time<C: MarkovChain>(chain: &C, a: &VertexSet) -> Result<HittingSolution, PotentialError> {
    if a.is_empty() {
        return Err(PotentialError::EmptySet);
    }
    let n = chain.n();
    let times = solve_dirichlet(chain, a, &vec![0.0; n], &vec![-1.0; n])?;
    let pi = chain.stationary();
    let mean: f64 = times.iter().zip(&pi).map(|(t, p)| t * p).sum();
    let f_star = if mean > 0.0 { times.iter().map(|t| 1.0 - t / mean).collect() } else { vec![1.0; n] };
    Ok(HittingSolution { expected_times: times, stationary_mean: mean, f_star })
}

/// Harmonic function equal to 1 on `A` and 0 on `C`: `g⋆(x) = P_x[H_A ≤ H_C]`.
#[derive(Clone, Debug, Serialize)]
pub struct PotentialField {
    pub values: Vec<f64>,
    #[serde(skip)]
    pub a: VertexSet,
    #[serde(skip)]
    pub c: VertexSet,
}

pub fn equilibrium_potential<C: MarkovChain>(
    chain: &C,
    a: &VertexSet,
    c: &VertexSet,
) -> Result<PotentialField, PotentialError> {
    if a.is_empty() || c.is_empty() {
        return Err(PotentialError::EmptySet);
    }
    if !a.is_disjoint(c) {
        return Err(PotentialError::Overlap);
    }
    let n = chain.n();
    let fixed = a.union(c);
    let boundary: Vec<f64> = (0..n).map(|x| if a.contains(x) { 1.0 } else { 0.0 }).collect();
    let values = solve_dirichlet(chain, &fixed, &boundary, &vec![0.0; n])?;
    Ok(PotentialField { values, a: a.clone(), c: c.clone() })
}

/// Dirichlet form from the edge sum, checked against `-Σ_x π_x Δf(x) h(x)`.
pub fn dirichlet_form<C: MarkovChain>(chain: &C, f: &[f64], h: &[f64]) -> Result<f64, PotentialError> {
    let pi = chain.stationary();
    let mut edge_sum = 0.0;
    for x in 0..chain.n() {
        chain.for_each_transition(x, |y, p| edge_sum += (f[x] - f[y]) * (h[x] - h[y]) * pi[x] * p);
    }
    edge_sum *= 0.5;
    let lap = generator(chain, f);
    let via_generator: f64 = -(0..chain.n()).map(|x| lap[x] * h[x] * pi[x]).sum::<f64>();
    if (edge_sum - via_generator).abs() > FORM_AGREEMENT * edge_sum.abs().max(1.0) {
        return Err(PotentialError::FormMismatch(edge_sum, via_generator));
    }
    Ok(edge_sum)
}

/// `P_z[H̃_A > H_C]` for `z ∈ A` (zero elsewhere), by one-step decomposition through `g⋆`.
pub fn escape_probabilities<C: MarkovChain>(chain: &C, field: &PotentialField) -> Vec<f64> {
    (0..chain.n())
        .map(|z| {
            if !field.a.contains(z) {
                return 0.0;
            }
            let mut acc = 0.0;
            chain.for_each_transition(z, |y, p| acc += p * (1.0 - field.values[y]));
            acc
        })
        .collect()
}

/// `P_ν[H_A > T]` by uniformization of the chain killed on `A`.
pub fn survival_probability<C: MarkovChain>(chain: &C, a: &VertexSet, nu: &[f64], t: f64) -> Result<f64, PotentialError> {
    check_size(chain)?;
    if a.is_empty() {
        return Err(PotentialError::EmptySet);
    }
    if !(0.0..=MAX_SURVIVAL_TIME).contains(&t) {
        return Err(PotentialError::TimeTooLarge(t));
    }
    let n = chain.n();
    let mut v: Vec<f64> = (0..n).map(|x| if a.contains(x) { 0.0 } else { nu[x] }).collect();
    if t == 0.0 {
        return Ok(v.iter().sum());
    }
    let kmax = poisson_truncation(t, 1e-12);
    let mut total = 0.0;
    let mut next = vec![0.0; n];
    for k in 0..=kmax {
        let mass: f64 = v.iter().sum();
        total += ln_poisson_pmf(t, k).exp() * mass;
        if mass == 0.0 {
            break;
        }
        next.iter_mut().for_each(|x| *x = 0.0);
        for x in 0..n {
            if v[x] != 0.0 {
                chain.for_each_transition(x, |y, p| {
                    if !a.contains(y) {
                        next[y] += v[x] * p;
                    }
                });
            }
        }
        std::mem::swap(&mut v, &mut next);
    }
    Ok(total.clamp(0.0, 1.0))
}

/// `P[H_{A∪{y}} > T | H_A > T]` under the stationary start.
pub fn conditional_avoid_probability<C: MarkovChain>(
    chain: &C,
    a: &VertexSet,
    y: usize,
    t: f64,
) -> Result<f64, PotentialError> {
    let pi = chain.stationary();
    let denominator = survival_probability(chain, a, &pi, t)?;
    if denominator < 1e-300 {
        return Err(PotentialError::NegligibleCondition(denominator));
    }
    let mut ay = a.clone();
    ay.insert(y);
    Ok(survival_probability(chain, &ay, &pi, t)? / denominator)
}

/// Principal left eigenvector of the chain killed on `A`, with the associated mean absorption time.
#[derive(Clone, Debug, Serialize)]
pub struct QuasiStationary {
    /// Distribution on `A^c` (zero on `A`).
    pub distribution: Vec<f64>,
    /// Top eigenvalue of the killed one-step operator.
    pub rho: f64,
    /// `E_α[H_A] = 1/(1 - ρ)` for the rate-1 chain.
    pub expected_hitting: f64,
}

pub fn quasi_stationary<C: MarkovChain>(chain: &C, a: &VertexSet) -> Result<QuasiStationary, PotentialError> {
    check_size(chain)?;
    if a.is_empty() {
        return Err(PotentialError::EmptySet);
    }
    let n = chain.n();
    let free = n - a.len();
    if free == 0 {
        return Err(PotentialError::Singular(0));
    }
    let w: Vec<f64> = (0..n).map(|x| chain.weight(x)).collect();
    let mut alpha: Vec<f64> = (0..n).map(|x| if a.contains(x) { 0.0 } else { w[x] }).collect();
    let total: f64 = alpha.iter().sum();
    alpha.iter_mut().for_each(|v| *v /= total);
    let mut next = vec![0.0; n];
    let mut prev_rho = f64::NAN;
    let mut stable = 0;
    for _ in 0..5_000_000 {
        // Lazy step (I + P_A)/2 removes oscillation from near-bipartite structure.
        next.iter_mut().zip(&alpha).for_each(|(nx, ax)| *nx = 0.5 * ax);
        for x in 0..n {
            if alpha[x] != 0.0 {
                chain.for_each_transition(x, |y, p| {
                    if !a.contains(y) {
                        next[y] += 0.5 * alpha[x] * p;
                    }
                });
            }
        }
        // Rayleigh quotient in L²(π) for φ = α/π, which is self-adjoint for reversible chains.
        let num: f64 = (0..n).filter(|&x| alpha[x] != 0.0).map(|x| alpha[x] * next[x] / w[x]).sum();
        let den: f64 = (0..n).filter(|&x| alpha[x] != 0.0).map(|x| alpha[x] * alpha[x] / w[x]).sum();
        let lazy = num / den;
        let rho = 2.0 * lazy - 1.0;
        let s: f64 = next.iter().sum();
        std::mem::swap(&mut alpha, &mut next);
        alpha.iter_mut().for_each(|v| *v /= s);
        if (rho - prev_rho).abs() < 1e-12 * (1.0 - rho).max(1e-300).min(1.0) {
            stable += 1;
            if stable >= 3 {
                return Ok(QuasiStationary { distribution: alpha, rho, expected_hitting: 1.0 / (1.0 - rho) });
            }
        } else {
            stable = 0;
        }
        prev_rho = rho;
    }
    Err(PotentialError::NoConvergence)
}

/// One verified comparison, serialised as `{check, inputs, lhs, rhs, pass}`.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub inputs: serde_json::Value,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// Records `lhs ≤ rhs` up to [`INEQUALITY_SLACK`] relative slack.
    pub fn at_most(check: &str, inputs: serde_json::Value, lhs: f64, rhs: f64) -> Self {
        let pass = lhs <= rhs + INEQUALITY_SLACK * rhs.abs().max(lhs.abs()).max(1e-300);
        CheckRecord { check: check.to_string(), inputs, lhs, rhs, pass }
    }
}

/// Both sides of the two-sided bound on `1/E[H_A]` through `D(g⋆, g⋆)`.
#[derive(Clone, Debug, Serialize)]
pub struct EhReport {
    pub inverse_mean_hitting: f64,
    pub dirichlet_energy: f64,
    pub sup_f_star_on_c: f64,
    pub pi_c: f64,
    pub lower: CheckRecord,
    pub upper: CheckRecord,
    /// `sup_C |f⋆| ≥ 1/2`, so the lower bound is trivially true.
    pub lower_vacuous: bool,
}

impl EhReport {
    pub fn holds(&self) -> bool {
        self.lower.pass && self.upper.pass
    }
}

pub fn verify_eh_bounds<C: MarkovChain>(chain: &C, a: &VertexSet, c: &VertexSet) -> Result<EhReport, PotentialError> {
    let field = equilibrium_potential(chain, a, c)?;
    let hit = expected_hitting_time(chain, a)?;
    let energy = dirichlet_form(chain, &field.values, &field.values)?;
    let pi = chain.stationary();
    let sup = c.iter().map(|x| hit.f_star[x].abs()).fold(0.0, f64::max);
    let pi_c: f64 = c.iter().map(|x| pi[x]).sum();
    let inv = 1.0 / hit.stationary_mean;
    let inputs = serde_json::json!({ "n": chain.n(), "a": a.len(), "c": c.len() });
    Ok(EhReport {
        inverse_mean_hitting: inv,
        dirichlet_energy: energy,
        sup_f_star_on_c: sup,
        pi_c,
        lower: CheckRecord::at_most("eh_lower", inputs.clone(), energy * (1.0 - 2.0 * sup), inv),
        upper: CheckRecord::at_most("eh_upper", inputs, inv, energy / (pi_c * pi_c)),
        lower_vacuous: sup >= 0.5,
    })
}

/// Bounds on the quasi-stationary mean and on the survival curve.
#[derive(Clone, Debug, Serialize)]
pub struct QuasiStationaryReport {
    pub qsd_mean: f64,
    pub stationary_mean: f64,
    pub spectral_gap: f64,
    pub checks: Vec<CheckRecord>,
}

impl QuasiStationaryReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Checks the chain of inequalities around `E_α[H_A]` and the survival sandwich at each `t`.
pub fn verify_quasi_stationary<C: MarkovChain>(
    chain: &C,
    a: &VertexSet,
    times: &[f64],
) -> Result<QuasiStationaryReport, PotentialError> {
    let qsd = quasi_stationary(chain, a)?;
    let hit = expected_hitting_time(chain, a)?;
    let gap = chain.spectral_gap()?;
    let pi = chain.stationary();
    let pi_a: f64 = a.iter().map(|x| pi[x]).sum();
    let mut flow = 0.0;
    for x in a.iter() {
        chain.for_each_transition(x, |y, p| {
            if !a.contains(y) {
                flow += pi[x] * p;
            }
        });
    }
    let e = hit.stationary_mean;
    let ea = qsd.expected_hitting;
    let inputs = serde_json::json!({ "n": chain.n(), "a": a.len() });
    let mut checks = vec![
        CheckRecord::at_most("qsd_flow_bound", inputs.clone(), (1.0 - pi_a) / flow, e / (1.0 - pi_a)),
        CheckRecord::at_most("qsd_lower", inputs.clone(), e / (1.0 - pi_a), ea),
        CheckRecord::at_most("qsd_upper", inputs.clone(), ea, e + 1.0 / gap),
    ];
    for &t in times {
        let surv = survival_probability(chain, a, &pi, t)?;
        let decay = (-t / ea).exp();
        let inputs = serde_json::json!({ "n": chain.n(), "a": a.len(), "t": t });
        checks.push(CheckRecord::at_most("survival_lower", inputs.clone(), (1.0 - 1.0 / (gap * ea)) * decay, surv));
        checks.push(CheckRecord::at_most("survival_upper", inputs, surv, (1.0 - pi_a) * decay));
    }
    Ok(QuasiStationaryReport { qsd_mean: ea, stationary_mean: e, spectral_gap: gap, checks })
}

/// `(q^x - 1)/(q^R - 1)`: probability that a walk stepping right with probability `p`,
/// `q = (1-p)/p`, started at `x`, reaches `R` before 0.
pub fn gamblers_ruin(q: f64, x: u32, r: u32) -> f64 {
    if (q - 1.0).abs() < 1e-15 {
        return x as f64 / r as f64;
    }
    (q.powi(x as i32) - 1.0) / (q.powi(r as i32) - 1.0)
}

/// Exact return probabilities from the sphere of `B(x, r+s)` into `B(x, r)`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryHittingReport {
    pub tree_excess: usize,
    /// `(y, P_y[H_{B(x,r)} < H_{B(x,r+s)^c}])` for each `y` in the inner boundary of `B(x, r+s)`.
    pub values: Vec<(usize, f64)>,
    pub max_value: f64,
    /// Value on the d-regular tree, `(d-2)/((d-1)^{s+1} - 1)`.
    pub tree_value: f64,
    /// Every boundary value equals the tree value (only meaningful when the ball is a tree).
    pub matches_tree: bool,
}

pub fn verify_boundary_hitting(g: &RegularGraph, x: usize, r: usize, s: usize) -> Result<BoundaryHittingReport, PotentialError> {
    check_size(g)?;
    let outer = graph::ball(g, x, r + s);
    let tx = graph::tree_excess(g, &outer)?;
    if tx > 1 {
        return Err(PotentialError::TooManyCycles(tx));
    }
    let inner = graph::ball(g, x, r);
    let values: Vec<(usize, f64)> = if s == 0 {
        graph::inner_boundary(g, &outer).iter().map(|y| (y, 1.0)).collect()
    } else {
        let field = equilibrium_potential(g, &inner, &outer.complement())?;
        graph::inner_boundary(g, &outer).iter().map(|y| (y, field.values[y])).collect()
    };
    let max_value = values.iter().map(|v| v.1).fold(0.0, f64::max);
    let q = (g.d() - 1) as f64;
    let tree_value = gamblers_ruin(q, 1, (s + 1) as u32);
    let matches_tree = values.iter().all(|v| (v.1 - tree_value).abs() <= 1e-12);
    if tx == 0 && !matches_tree {
        return Err(PotentialError::Residual(
            values.iter().map(|v| (v.1 - tree_value).abs()).fold(0.0, f64::max),
        ));
    }
    Ok(BoundaryHittingReport { tree_excess: tx, values, max_value, tree_value, matches_tree })
}

/// `-(n/T) ln P[H_y > T]` under the uniform start; tends to `(d-2)/(d-1)` for tree-like `y`.
pub fn hitpoint_rate(g: &RegularGraph, y: usize, t: f64) -> Result<f64, PotentialError> {
    let pi = g.stationary();
    let a = VertexSet::from_vertices(g.n(), [y]);
    let p = survival_probability(g, &a, &pi, t)?;
    Ok(-(g.n() as f64 / t) * p.ln())
}

/// `-(n/T) ln P[H_{A∪{y}} > T | H_A > T]`; tends to `(d-2)²/(d(d-1))` for proper futures.
pub fn conditional_rate(g: &RegularGraph, a: &VertexSet, y: usize, t: f64) -> Result<f64, PotentialError> {
    if a.contains(y) || !g.neighbours(y).iter().any(|&z| a.contains(z)) {
        return Err(PotentialError::NotOnBoundary(y));
    }
    let f = conditional_avoid_probability(g, a, y, t)?;
    Ok(-(g.n() as f64 / t) * f.ln())
}

/// `sup{|E_y[H_A]/E[H_A] - 1| : dist(y, A) > s}` for `s = 0..=s_max` (NaN when no such `y`).
pub fn hitting_ratio_profile(g: &RegularGraph, a: &VertexSet, s_max: usize) -> Result<Vec<f64>, PotentialError> {
    let hit = expected_hitting_time(g, a)?;
    let mut dist = vec![usize::MAX; g.n()];
    let mut frontier = a.to_vec();
    for &x in &frontier {
        dist[x] = 0;
    }
    let mut level = 0;
    while !frontier.is_empty() {
        level += 1;
        let mut next = Vec::new();
        for &v in &frontier {
            for &w in g.neighbours(v) {
                if dist[w] == usize::MAX {
                    dist[w] = level;
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    Ok((0..=s_max)
        .map(|s| {
            (0..g.n())
                .filter(|&y| dist[y] != usize::MAX && dist[y] > s)
                .map(|y| (hit.expected_times[y] / hit.stationary_mean - 1.0).abs())
                .fold(f64::NAN, f64::max)
        })
        .collect())
}
