//! Random interlacements on the d-regular tree through their Bernoulli
//! description: every vertex `z` is vacant independently with probability
//! `exp(-u f(z))`, so the vacant cluster of the root is a branching process.
//!
//! Conventions. The root has `d` neighbours and every other vertex has
//! `d - 1` children. The root-birth factor `exp(-u f_root)` is kept separate
//! from the offspring process: [`extinction_probability`] and
//! [`generation_survival`] describe the process started from one non-root
//! vertex, whose offspring law is Binomial(d-1, p_u).

use std::collections::VecDeque;

use rand::Rng as _;
use serde::Serialize;
use thiserror::Error;

use crate::rng::Rng;

#[derive(Debug, Error, PartialEq)]
pub enum InterlaceError {
    #[error("degree must be at least 3, got {0}")]
    Degree(usize),
    #[error("intensity must be non-negative, got {0}")]
    Intensity(f64),
    #[error("subtree does not contain the root")]
    Rootless,
    #[error("subtree is not connected: parent of node {0} missing")]
    NotConnected(usize),
    #[error("child index {index} out of range at depth {depth}")]
    ChildIndex { index: u8, depth: usize },
}

/// `d(d-1) ln(d-1) / (d-2)²`, the critical intensity on the d-regular tree.
pub fn u_star(d: usize) -> Result<f64, InterlaceError> {
    if d < 3 {
        return Err(InterlaceError::Degree(d));
    }
    let df = d as f64;
    Ok(df * (df - 1.0) * (df - 1.0).ln() / ((df - 2.0) * (df - 2.0)))
}

/// Derived quantities of the tree model at intensity `u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InterlacementParams {
    pub d: usize,
    pub u: f64,
    /// Vacancy probability of a non-root vertex, `exp(-u f_other)`.
    pub p_u: f64,
    /// Mean offspring `(d-1) p_u`.
    pub m_u: f64,
    /// `log_{d-1} m_u = 1 - u/u_star`.
    pub v_u: f64,
    pub u_star: f64,
    /// `(d-2)/(d-1)`.
    pub f_root: f64,
    /// `(d-2)² / (d(d-1))`.
    pub f_other: f64,
}

impl InterlacementParams {
    /// Vacancy probability of the root, `exp(-u f_root)`.
    pub fn root_vacancy(&self) -> f64 {
        (-self.u * self.f_root).exp()
    }
}

pub fn params(d: usize, u: f64) -> Result<InterlacementParams, InterlaceError> {
    let u_star = u_star(d)?;
    if !(u >= 0.0) {
        return Err(InterlaceError::Intensity(u));
    }
    let df = d as f64;
    let f_root = (df - 2.0) / (df - 1.0);
    let f_other = (df - 2.0) * (df - 2.0) / (df * (df - 1.0));
    let p_u = (-u * f_other).exp();
    Ok(InterlacementParams { d, u, p_u, m_u: (df - 1.0) * p_u, v_u: 1.0 - u / u_star, u_star, f_root, f_other })
}

/// A node of a sampled cluster, linked to its parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TreeNode {
    pub parent: Option<u32>,
    /// Index among the parent's children: `0..d` below the root, `0..d-1` elsewhere.
    pub child: u8,
    pub depth: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Truncation {
    Depth(u32),
    Size(usize),
}

/// Vacant cluster of the root, stored in BFS order with parent links.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TreeClusterSample {
    pub nodes: Vec<TreeNode>,
    /// Set when the cluster had alive nodes beyond a cap.
    pub truncated: Option<Truncation>,
}

impl TreeClusterSample {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Child-index path from the root to node `i`.
    pub fn path(&self, i: usize) -> Vec<u8> {
        let mut out = Vec::new();
        let mut cur = i;
        while let Some(p) = self.nodes[cur].parent {
            out.push(self.nodes[cur].child);
            cur = p as usize;
        }
        out.reverse();
        out
    }

    pub fn paths(&self) -> Vec<Vec<u8>> {
        (0..self.nodes.len()).map(|i| self.path(i)).collect()
    }

    pub fn max_depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }
}

/// Samples the root cluster at each intensity in `levels` from one set of uniforms.
///
/// A node is alive at level `u` when its uniform is below `exp(-u f(z))`, so
/// larger intensities always give sub-clusters of smaller ones.
pub fn sample_cluster_levels(
    d: usize,
    levels: &[f64],
    rng: &mut Rng,
    depth_cap: u32,
    size_cap: usize,
) -> Result<Vec<TreeClusterSample>, InterlaceError> {
    let ps: Vec<InterlacementParams> = levels.iter().map(|&u| params(d, u)).collect::<Result<_, _>>()?;
    let Some(u_min) = levels.iter().copied().reduce(f64::min) else {
        return Ok(Vec::new());
    };
    let base = params(d, u_min)?;
    // Explore the largest cluster, recording each node's uniform.
    let mut nodes: Vec<(TreeNode, f64)> = Vec::new();
    let mut pruned: Vec<(usize, f64)> = Vec::new();
    let mut size_hit = false;
    let root_u: f64 = rng.random();
    if root_u < base.root_vacancy() {
        nodes.push((TreeNode { parent: None, child: 0, depth: 0 }, root_u));
    }
    let mut queue: VecDeque<usize> = (0..nodes.len()).collect();
    while let Some(i) = queue.pop_front() {
        let node = nodes[i].0;
        let children = if node.parent.is_none() { d } else { d - 1 };
        for c in 0..children {
            let w: f64 = rng.random();
            if w >= base.p_u {
                continue;
            }
            if node.depth >= depth_cap {
                pruned.push((i, w));
                continue;
            }
            if nodes.len() >= size_cap {
                size_hit = true;
                continue;
            }
            nodes.push((TreeNode { parent: Some(i as u32), child: c as u8, depth: node.depth + 1 }, w));
            queue.push_back(nodes.len() - 1);
        }
        if size_hit {
            break;
        }
    }
    Ok(ps
        .iter()
        .map(|p| {
            let mut keep: Vec<Option<u32>> = vec![None; nodes.len()];
            let mut out = TreeClusterSample { nodes: Vec::new(), truncated: None };
            for (i, &(node, w)) in nodes.iter().enumerate() {
                let threshold = if node.parent.is_none() { p.root_vacancy() } else { p.p_u };
                let parent_kept = match node.parent {
                    None => Some(None),
                    Some(q) => keep[q as usize].map(Some),
                };
                if let Some(parent) = parent_kept {
                    if w < threshold {
                        keep[i] = Some(out.nodes.len() as u32);
                        out.nodes.push(TreeNode { parent, ..node });
                    }
                }
            }
            if size_hit && out.size() > 0 {
                out.truncated = Some(Truncation::Size(size_cap));
            } else if pruned.iter().any(|&(q, w)| keep[q].is_some() && w < p.p_u) {
                out.truncated = Some(Truncation::Depth(depth_cap));
            }
            out
        })
        .collect())
}

/// Vacant cluster of the root at intensity `u`, explored up to the caps.
pub fn sample_cluster(
    d: usize,
    u: f64,
    rng: &mut Rng,
    depth_cap: u32,
    size_cap: usize,
) -> Result<TreeClusterSample, InterlaceError> {
    Ok(sample_cluster_levels(d, &[u], rng, depth_cap, size_cap)?.remove(0))
}

/// Offspring generating function `φ(s) = (1 - p + p s)^{d-1}`.
pub fn offspring_pgf(d: usize, p: f64, s: f64) -> f64 {
    (1.0 - p + p * s).powi(d as i32 - 1)
}

/// Smallest fixed point of `φ`, by monotone iteration from 0; exactly 1 when `m_u ≤ 1`.
pub fn extinction_probability(d: usize, u: f64, tol: f64) -> Result<f64, InterlaceError> {
    let p = params(d, u)?;
    Ok(extinction_for_p(d, p.p_u, p.m_u, tol))
}

/// Extinction probability for offspring Binomial(d-1, p).
pub fn extinction_for_p(d: usize, p: f64, m: f64, tol: f64) -> f64 {
    if m <= 1.0 {
        return 1.0;
    }
    let mut q = 0.0;
    loop {
        let next = offspring_pgf(d, p, q);
        if (next - q).abs() < tol {
            return next;
        }
        q = next;
    }
}

/// `1 - φ^{(r)}(0)`: probability the offspring process of one vertex survives `r` generations.
pub fn generation_survival(d: usize, u: f64, r: usize) -> Result<f64, InterlaceError> {
    let p = params(d, u)?;
    let mut s = 0.0;
    for _ in 0..r {
        s = offspring_pgf(d, p.p_u, s);
    }
    Ok(1.0 - s)
}

/// `cap(K) = Σ_{x∈K} P_x[no return to K]` for a finite subtree containing the root.
///
/// `K` is given as child-index paths. A walk leaving `K` through one of the
/// `d - deg_K(x)` free edges of `x` never comes back with probability
/// `(d-2)/(d-1)`, because from a child the walk on the tree reaches its parent
/// with probability `1/(d-1)`.
pub fn tree_capacity(d: usize, k: &[Vec<u8>]) -> Result<f64, InterlaceError> {
    if d < 3 {
        return Err(InterlaceError::Degree(d));
    }
    let set: std::collections::HashSet<&[u8]> = k.iter().map(Vec::as_slice).collect();
    if !set.contains(&[][..]) {
        return Err(InterlaceError::Rootless);
    }
    for (i, path) in k.iter().enumerate() {
        for (depth, &c) in path.iter().enumerate() {
            let limit = if depth == 0 { d } else { d - 1 };
            if c as usize >= limit {
                return Err(InterlaceError::ChildIndex { index: c, depth });
            }
        }
        if !path.is_empty() && !set.contains(&path[..path.len() - 1]) {
            return Err(InterlaceError::NotConnected(i));
        }
    }
    let df = d as f64;
    let escape = (df - 2.0) / (df - 1.0);
    let mut degree: std::collections::HashMap<&[u8], usize> = set.iter().map(|&p| (p, 0)).collect();
    for &p in &set {
        if !p.is_empty() {
            *degree.get_mut(p).expect("member") += 1;
            *degree.get_mut(&p[..p.len() - 1]).expect("parent present") += 1;
        }
    }
    Ok(degree.values().map(|&deg| (df - deg as f64) / df * escape).sum())
}

/// Rooted path of `k` edges going down through child 0 at every level.
pub fn path_subtree(k: usize) -> Vec<Vec<u8>> {
    (0..=k).map(|depth| vec![0u8; depth]).collect()
}

/// Monte Carlo law of the root cluster size.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SizeHistogram {
    /// `counts[k]` = samples whose cluster had exactly `k` vertices.
    pub counts: Vec<u64>,
    /// Samples that hit a cap.
    pub capped: u64,
    pub samples: u64,
}

impl SizeHistogram {
    pub fn frequency(&self, k: usize) -> f64 {
        self.counts.get(k).copied().unwrap_or(0) as f64 / self.samples as f64
    }

    pub fn record(&mut self, size: usize) {
        if self.counts.len() <= size {
            self.counts.resize(size + 1, 0);
        }
        self.counts[size] += 1;
        self.samples += 1;
    }

    /// Empirical CDF `P[size ≤ k]` with capped samples counted as larger than every size.
    pub fn cdf(&self, k: usize) -> f64 {
        self.counts.iter().take(k + 1).sum::<u64>() as f64 / self.samples as f64
    }
}

pub fn cluster_size_histogram(
    d: usize,
    u: f64,
    samples: usize,
    rng: &mut Rng,
    size_cap: usize,
) -> Result<SizeHistogram, InterlaceError> {
    params(d, u)?;
    let mut hist = SizeHistogram::default();
    for _ in 0..samples {
        let c = sample_cluster(d, u, rng, u32::MAX, size_cap)?;
        if c.truncated.is_some() {
            hist.capped += 1;
            hist.samples += 1;
        } else {
            hist.record(c.size());
        }
    }
    Ok(hist)
}
