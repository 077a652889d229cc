//! Finite d-regular graphs: representation, random generation, balls, tree
//! excess, spectral gap and the structural assumption checks.

use std::collections::VecDeque;
use std::fmt;
use std::io::{BufRead, Write};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::Serialize;
use thiserror::Error;

use crate::ld;
use crate::rng::{self, Rng};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("n*d must be even (n={n}, d={d})")]
    Parity { n: usize, d: usize },
    #[error("need n > d and d >= 3 (n={n}, d={d})")]
    Size { n: usize, d: usize },
    #[error("configuration model exceeded restart budget of {budget}")]
    RestartBudget { budget: u64 },
    #[error("vertex {vertex}: {reason}")]
    Invalid { vertex: usize, reason: String },
    #[error("vertex set is not connected")]
    NotConnected,
    #[error("graph is not connected")]
    GraphNotConnected,
    #[error("{{{0}, {1}}} is not an edge")]
    NotAnEdge(usize, usize),
    #[error("radius {r} exceeds the assumption radius {max}")]
    RadiusTooLarge { r: usize, max: usize },
    #[error("some ball of radius {radius} contains more than one cycle")]
    LocalTreeLikeness { radius: usize },
    #[error("tree-like ball count {count} below guaranteed bound {bound}")]
    TreelikeBound { count: usize, bound: f64 },
    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Subset of `0..n` stored as a bit vector with a cached cardinality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    words: Vec<u64>,
    universe: usize,
    len: usize,
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        VertexSet { words: vec![0; universe.div_ceil(64)], universe, len: 0 }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for x in 0..universe {
            s.insert(x);
        }
        s
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(universe: usize, vertices: I) -> Self {
        let mut s = Self::empty(universe);
        for x in vertices {
            s.insert(x);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.universe && self.words[x / 64] >> (x % 64) & 1 == 1
    }

    /// Returns true if `x` was newly added.
    pub fn insert(&mut self, x: usize) -> bool {
        assert!(x < self.universe, "vertex {x} outside universe {}", self.universe);
        let w = &mut self.words[x / 64];
        let bit = 1u64 << (x % 64);
        if *w & bit == 0 {
            *w |= bit;
            self.len += 1;
            true
        } else {
            false
        }
    }

    /// Returns true if `x` was present.
    pub fn remove(&mut self, x: usize) -> bool {
        if !self.contains(x) {
            return false;
        }
        self.words[x / 64] &= !(1u64 << (x % 64));
        self.len -= 1;
        true
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self) -> Self {
        let mut out = Self::empty(self.universe);
        for x in 0..self.universe {
            if !self.contains(x) {
                out.insert(x);
            }
        }
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for x in other.iter() {
            out.insert(x);
        }
        out
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self::from_vertices(self.universe, self.iter().filter(|&x| other.contains(x)))
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.iter().all(|x| !other.contains(x))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Simple d-regular graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    adj: Vec<usize>,
    connected: bool,
    restarts: u64,
}

impl RegularGraph {
    /// Builds a graph from neighbour lists, validating regularity, simplicity and symmetry.
    pub fn from_adjacency(lists: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let n = lists.len();
        let d = lists.first().map_or(0, Vec::len);
        if d < 3 || n <= d {
            return Err(GraphError::Size { n, d });
        }
        let mut adj = Vec::with_capacity(n * d);
        for (x, list) in lists.iter().enumerate() {
            if list.len() != d {
                return Err(GraphError::Invalid {
                    vertex: x,
                    reason: format!("degree {} != {d}", list.len()),
                });
            }
            for (i, &y) in list.iter().enumerate() {
                if y >= n {
                    return Err(GraphError::Invalid { vertex: x, reason: format!("neighbour {y} out of range") });
                }
                if y == x {
                    return Err(GraphError::Invalid { vertex: x, reason: "self-loop".into() });
                }
                if list[..i].contains(&y) {
                    return Err(GraphError::Invalid { vertex: x, reason: format!("repeated neighbour {y}") });
                }
                if !lists[y].contains(&x) {
                    return Err(GraphError::Invalid { vertex: x, reason: format!("edge to {y} not symmetric") });
                }
            }
            adj.extend_from_slice(list);
        }
        let mut g = RegularGraph { n, d, adj, connected: false, restarts: 0 };
        g.connected = g.bfs_distances(0).iter().all(|&r| r != usize::MAX);
        Ok(g)
    }

    /// Builds a graph from an undirected edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut lists = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::Invalid { vertex: u.max(v), reason: "endpoint out of range".into() });
            }
            lists[u].push(v);
            lists[v].push(u);
        }
        Self::from_adjacency(lists)
    }

    /// The complete graph on `n >= 4` vertices.
    pub fn complete(n: usize) -> Self {
        let lists = (0..n).map(|x| (0..n).filter(|&y| y != x).collect()).collect();
        Self::from_adjacency(lists).expect("complete graph on n >= 4 vertices")
    }

    /// The Petersen graph: outer 5-cycle 0..5, inner pentagram 5..10, spokes i -- i+5.
    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
            edges.push((i, i + 5));
        }
        Self::from_edges(10, &edges).expect("Petersen graph is 3-regular")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Number of configuration-model restarts needed to produce this graph.
    pub fn restarts(&self) -> u64 {
        self.restarts
    }

    pub fn neighbours(&self, x: usize) -> &[usize] {
        &self.adj[x * self.d..(x + 1) * self.d]
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.neighbours(x).contains(&y)
    }

    /// Each undirected edge once as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = (0..self.n)
            .flat_map(|x| self.neighbours(x).iter().filter(move |&&y| x < y).map(move |&y| (x, y)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Graph distance from `x` to every vertex (`usize::MAX` when unreachable).
    pub fn bfs_distances(&self, x: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::from([x]);
        dist[x] = 0;
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbours(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Re-checks every structural invariant; used by the A0 check.
    pub fn is_valid(&self) -> bool {
        self.adj.len() == self.n * self.d
            && (0..self.n).all(|x| {
                let nb = self.neighbours(x);
                nb.iter().enumerate().all(|(i, &y)| {
                    y < self.n && y != x && !nb[..i].contains(&y) && self.has_edge(y, x)
                })
            })
    }
}

fn restart_budget(d: usize) -> u64 {
    let e = (((d * d) as f64 - 1.0) / 4.0).exp().ceil();
    if e >= (u64::MAX / 10) as f64 {
        u64::MAX
    } else {
        10 * e as u64
    }
}

/// Uniform simple d-regular graph from the pairing model, restarting on any loop or multi-edge.
pub fn generate_random_regular(n: usize, d: usize, seed: u64) -> Result<RegularGraph, GraphError> {
    if (n * d) % 2 == 1 {
        return Err(GraphError::Parity { n, d });
    }
    if d < 3 || n <= d {
        return Err(GraphError::Size { n, d });
    }
    let budget = restart_budget(d);
    let mut rng = rng::stream(seed, 0);
    let mut points: Vec<usize> = (0..n * d).map(|p| p / d).collect();
    let mut adj = vec![usize::MAX; n * d];
    let mut fill = vec![0usize; n];
    let mut restarts = 0u64;
    'attempt: loop {
        points.shuffle(&mut rng);
        fill.iter_mut().for_each(|f| *f = 0);
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || adj[u * d..u * d + fill[u]].contains(&v) {
                restarts += 1;
                if restarts >= budget {
                    return Err(GraphError::RestartBudget { budget });
                }
                continue 'attempt;
            }
            adj[u * d + fill[u]] = v;
            fill[u] += 1;
            adj[v * d + fill[v]] = u;
            fill[v] += 1;
        }
        break;
    }
    let mut g = RegularGraph { n, d, adj, connected: false, restarts };
    g.connected = g.bfs_distances(0).iter().all(|&r| r != usize::MAX);
    Ok(g)
}

/// `B(x, r)`: all vertices within graph distance `r` of `x`.
pub fn ball(g: &RegularGraph, x: usize, r: usize) -> VertexSet {
    let mut out = VertexSet::empty(g.n());
    for (v, _) in ball_layers(g, x, r) {
        out.insert(v);
    }
    out
}

/// `B(A, r)`: all vertices within distance `r` of the set `A`.
pub fn set_neighbourhood(g: &RegularGraph, a: &VertexSet, r: usize) -> VertexSet {
    let mut out = a.clone();
    let mut frontier = a.to_vec();
    for _ in 0..r {
        let mut next = Vec::new();
        for &v in &frontier {
            for &w in g.neighbours(v) {
                if out.insert(w) {
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    out
}

/// Vertices of `B(x, r)` paired with their distance from `x`, in BFS order.
pub fn ball_layers(g: &RegularGraph, x: usize, r: usize) -> Vec<(usize, usize)> {
    let mut seen = std::collections::HashSet::from([x]);
    let mut out = vec![(x, 0)];
    let mut head = 0;
    while head < out.len() {
        let (v, dv) = out[head];
        head += 1;
        if dv == r {
            continue;
        }
        for &w in g.neighbours(v) {
            if seen.insert(w) {
                out.push((w, dv + 1));
            }
        }
    }
    out
}

/// Number of edges with both endpoints in `a`.
pub fn induced_edge_count(g: &RegularGraph, a: &VertexSet) -> usize {
    a.iter().map(|x| g.neighbours(x).iter().filter(|&&y| a.contains(y)).count()).sum::<usize>() / 2
}

/// Whether `a` induces a connected subgraph (the empty set counts as connected).
pub fn is_connected_set(g: &RegularGraph, a: &VertexSet) -> bool {
    let Some(start) = a.iter().next() else { return true };
    let mut seen = VertexSet::empty(g.n());
    seen.insert(start);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in g.neighbours(v) {
            if a.contains(w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == a.len()
}

/// `tx(A) = |E_A| - |A| + 1` for a connected nonempty vertex set.
pub fn tree_excess(g: &RegularGraph, a: &VertexSet) -> Result<usize, GraphError> {
    if a.is_empty() || !is_connected_set(g, a) {
        return Err(GraphError::NotConnected);
    }
    Ok(induced_edge_count(g, a) + 1 - a.len())
}

/// Tree excess of `B(x, r)` without materialising a full-size bit set.
pub fn ball_tree_excess(g: &RegularGraph, x: usize, r: usize) -> usize {
    let layers = ball_layers(g, x, r);
    let members: std::collections::HashSet<usize> = layers.iter().map(|&(v, _)| v).collect();
    let edges: usize = layers
        .iter()
        .map(|&(v, _)| g.neighbours(v).iter().filter(|w| members.contains(w)).count())
        .sum::<usize>()
        / 2;
    edges + 1 - layers.len()
}

/// Number of edges leaving `a`.
pub fn edge_boundary(g: &RegularGraph, a: &VertexSet) -> usize {
    a.iter().map(|x| g.neighbours(x).iter().filter(|&&y| !a.contains(y)).count()).sum()
}

/// Vertices outside `a` with a neighbour in `a`.
pub fn outer_boundary(g: &RegularGraph, a: &VertexSet) -> VertexSet {
    let mut out = VertexSet::empty(g.n());
    for x in a.iter() {
        for &y in g.neighbours(x) {
            if !a.contains(y) {
                out.insert(y);
            }
        }
    }
    out
}

/// Vertices of `a` with a neighbour outside `a`.
pub fn inner_boundary(g: &RegularGraph, a: &VertexSet) -> VertexSet {
    VertexSet::from_vertices(g.n(), a.iter().filter(|&x| g.neighbours(x).iter().any(|&y| !a.contains(y))))
}

/// Smallest `|∂A| / |A|` seen while growing random connected sets up to size `n/2`.
///
/// This is a sampled upper estimate of the edge isoperimetric constant, not a certified value.
pub fn isoperimetric_profile(g: &RegularGraph, samples: usize, rng: &mut Rng) -> f64 {
    let n = g.n();
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        let mut inside = VertexSet::empty(n);
        let start = rng.random_range(0..n);
        let mut frontier = vec![start];
        let mut boundary = 0usize;
        while inside.len() < n / 2 && !frontier.is_empty() {
            let i = rng.random_range(0..frontier.len());
            let v = frontier.swap_remove(i);
            if inside.contains(v) {
                continue;
            }
            let inner = g.neighbours(v).iter().filter(|&&w| inside.contains(w)).count();
            inside.insert(v);
            boundary = boundary + g.d() - 2 * inner;
            best = best.min(boundary as f64 / inside.len() as f64);
            frontier.extend(g.neighbours(v).iter().filter(|&&w| !inside.contains(w)));
        }
    }
    best
}

/// Length of the shortest cycle, or `None` for a forest.
pub fn girth(g: &RegularGraph) -> Option<usize> {
    let n = g.n();
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut touched = Vec::new();
    for s in 0..n {
        for &t in &touched {
            dist[t] = usize::MAX;
        }
        touched.clear();
        dist[s] = 0;
        touched.push(s);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if 2 * dist[v] + 1 >= best {
                break;
            }
            for &w in g.neighbours(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    touched.push(w);
                    queue.push_back(w);
                } else if parent[v] != w {
                    best = best.min(dist[v] + dist[w] + 1);
                }
            }
        }
    }
    (best != usize::MAX).then_some(best)
}

/// Second largest eigenvalue of the transition matrix `A/d`.
pub fn second_eigenvalue(g: &RegularGraph) -> Result<f64, GraphError> {
    if g.n() <= DENSE_LIMIT {
        Ok(dense_second_eigenvalue(g))
    } else {
        iterative_second_eigenvalue(g, 8, 1e-10, 100_000)
    }
}

/// `λ_G = 1 - λ₂` for the one-step transition operator.
pub fn spectral_gap(g: &RegularGraph) -> Result<f64, GraphError> {
    Ok(1.0 - second_eigenvalue(g)?)
}

pub const DENSE_LIMIT: usize = 2048;

fn dense_second_eigenvalue(g: &RegularGraph) -> f64 {
    let n = g.n();
    let w = 1.0 / g.d() as f64;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for x in 0..n {
        for &y in g.neighbours(x) {
            m[(x, y)] = w;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev[1]
}

/// Block orthogonal iteration on `(I + P)/2` with the constant vector projected out.
///
/// The shift makes the spectrum nonnegative so the dominant Ritz value of the
/// deflated block tracks `λ₂` rather than the most negative eigenvalue.
pub fn iterative_second_eigenvalue(
    g: &RegularGraph,
    block: usize,
    tol: f64,
    max_iter: usize,
) -> Result<f64, GraphError> {
    let n = g.n();
    let block = block.min(n - 1).max(1);
    let mut rng = rng::stream(0x5eed, 1);
    let mut x = DMatrix::<f64>::from_fn(n, block, |_, _| rng.random::<f64>() - 0.5);
    let apply = |x: &DMatrix<f64>| {
        let w = 0.5 / g.d() as f64;
        let mut y = x * 0.5;
        for c in 0..x.ncols() {
            for v in 0..n {
                let s: f64 = g.neighbours(v).iter().map(|&u| x[(u, c)]).sum();
                y[(v, c)] += w * s;
            }
        }
        y
    };
    let deflate = |x: &mut DMatrix<f64>| {
        for mut col in x.column_iter_mut() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
        }
    };
    deflate(&mut x);
    x = x.qr().q();
    let mut prev = f64::NAN;
    for _ in 0..max_iter {
        let mut y = apply(&x);
        deflate(&mut y);
        let h = x.transpose() * &y;
        let h = (&h + h.transpose()) * 0.5;
        let theta = SymmetricEigen::new(h).eigenvalues.max();
        if (theta - prev).abs() < tol {
            return Ok(2.0 * theta - 1.0);
        }
        prev = theta;
        x = y.qr().q();
    }
    Err(GraphError::NoConvergence(max_iter))
}

/// Outcome of the structural checks on a graph.
#[derive(Clone, Debug, Serialize)]
pub struct AssumptionReport {
    pub a0_ok: bool,
    pub a1_radius: usize,
    pub a1_ok: bool,
    pub a1_violations: Vec<usize>,
    pub spectral_gap: f64,
    pub a2_threshold: f64,
    pub a2_ok: bool,
    pub girth: Option<usize>,
}

impl AssumptionReport {
    /// Re-evaluates the spectral assumption at another threshold.
    pub fn a2_ok_at(&self, threshold: f64) -> bool {
        self.spectral_gap > threshold
    }
}

/// The radius `⌊α₁ ld n⌋` at which balls may contain at most one cycle.
pub fn a1_radius(g: &RegularGraph, alpha1: f64) -> usize {
    (alpha1 * ld(g.d(), g.n() as f64) + 1e-12).floor().max(0.0) as usize
}

/// Checks regularity, the one-cycle condition on balls of radius `⌊α₁ ld n⌋`, and the spectral gap.
pub fn check_assumptions(g: &RegularGraph, alpha1: f64, alpha2: f64) -> Result<AssumptionReport, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::GraphNotConnected);
    }
    let radius = a1_radius(g, alpha1);
    let a1_violations: Vec<usize> = (0..g.n()).filter(|&x| ball_tree_excess(g, x, radius) > 1).collect();
    let gap = spectral_gap(g)?.clamp(0.0, 2.0);
    Ok(AssumptionReport {
        a0_ok: g.is_valid(),
        a1_radius: radius,
        a1_ok: a1_violations.is_empty(),
        a1_violations,
        spectral_gap: gap,
        a2_threshold: alpha2,
        a2_ok: gap > alpha2,
        girth: girth(g),
    })
}

/// Number of vertices whose radius-`r` ball is a tree.
pub fn treelike_ball_count(g: &RegularGraph, r: usize) -> usize {
    (0..g.n()).filter(|&x| ball_tree_excess(g, x, r) == 0).count()
}

#[derive(Clone, Debug, Serialize)]
pub struct TreelikeCount {
    pub count: usize,
    pub bound: f64,
    pub radius: usize,
    pub a1_radius: usize,
}

/// Counts tree-like balls of radius `r` and checks `count ≥ (1 - (d-1)^{-(R-r)}) n`.
pub fn count_treelike_balls(g: &RegularGraph, r: usize, alpha1: f64) -> Result<TreelikeCount, GraphError> {
    let big_r = a1_radius(g, alpha1);
    if r > big_r {
        return Err(GraphError::RadiusTooLarge { r, max: big_r });
    }
    if (0..g.n()).any(|x| ball_tree_excess(g, x, big_r) > 1) {
        return Err(GraphError::LocalTreeLikeness { radius: big_r });
    }
    let count = treelike_ball_count(g, r);
    let bound = (1.0 - ((g.d() - 1) as f64).powi(-((big_r - r) as i32))) * g.n() as f64;
    if (count as f64) < bound {
        return Err(GraphError::TreelikeBound { count, bound });
    }
    Ok(TreelikeCount { count, bound, radius: r, a1_radius: big_r })
}

/// Disjoint union of `g1` and `g2` with `e1 = {x, y}`, `e2 = {x', y'}` replaced by `{x, x'}`, `{y, y'}`.
///
/// Vertices of `g2` are shifted by `g1.n()`.
pub fn join_with_bottleneck(
    g1: &RegularGraph,
    g2: &RegularGraph,
    e1: (usize, usize),
    e2: (usize, usize),
) -> Result<RegularGraph, GraphError> {
    if g1.d() != g2.d() {
        return Err(GraphError::Invalid { vertex: 0, reason: "degrees differ".into() });
    }
    if !g1.has_edge(e1.0, e1.1) {
        return Err(GraphError::NotAnEdge(e1.0, e1.1));
    }
    if !g2.has_edge(e2.0, e2.1) {
        return Err(GraphError::NotAnEdge(e2.0, e2.1));
    }
    let off = g1.n();
    let mut lists: Vec<Vec<usize>> = (0..g1.n()).map(|x| g1.neighbours(x).to_vec()).collect();
    lists.extend((0..g2.n()).map(|x| g2.neighbours(x).iter().map(|&y| y + off).collect()));
    let mut swap = |a: usize, old: usize, new: usize| {
        let slot = lists[a].iter_mut().find(|v| **v == old).expect("edge endpoint present");
        *slot = new;
    };
    let (x, y) = e1;
    let (xp, yp) = (e2.0 + off, e2.1 + off);
    swap(x, y, xp);
    swap(y, x, yp);
    swap(xp, yp, x);
    swap(yp, xp, y);
    RegularGraph::from_adjacency(lists)
}

/// Writes the plain-text edge list: `n d`, then each edge `u v` once with `u < v`, ascending.
pub fn write_graph<W: Write>(g: &RegularGraph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{} {}", g.n(), g.d())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

/// Parses the plain-text edge list, reporting the first offending line.
pub fn read_graph<R: BufRead>(input: R) -> Result<RegularGraph, GraphError> {
    let parse_err = |line: usize, reason: String| GraphError::Parse { line, reason };
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing header".into()))?;
    let header = header.map_err(|e| parse_err(1, e.to_string()))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(str::parse::<usize>)
        .collect::<Result<_, _>>()
        .map_err(|e| parse_err(1, format!("header: {e}")))?;
    let [n, d] = nums[..] else {
        return Err(parse_err(1, "header must be `n d`".into()));
    };
    if (n * d) % 2 == 1 {
        return Err(parse_err(1, "n*d is odd".into()));
    }
    let expected = n * d / 2;
    let mut edges = Vec::with_capacity(expected);
    let mut last: Option<(usize, usize)> = None;
    for (line, text) in lines {
        let text = text.map_err(|e| parse_err(line, e.to_string()))?;
        if text.trim().is_empty() {
            continue;
        }
        let uv: Vec<usize> = text
            .split_whitespace()
            .map(str::parse::<usize>)
            .collect::<Result<_, _>>()
            .map_err(|e| parse_err(line, e.to_string()))?;
        let [u, v] = uv[..] else {
            return Err(parse_err(line, "expected `u v`".into()));
        };
        if u >= v {
            return Err(parse_err(line, format!("edge ({u}, {v}) not written with u < v")));
        }
        if v >= n {
            return Err(parse_err(line, format!("vertex {v} out of range")));
        }
        if last.is_some_and(|p| p >= (u, v)) {
            return Err(parse_err(line, format!("edge ({u}, {v}) out of order or repeated")));
        }
        last = Some((u, v));
        edges.push((u, v));
        if edges.len() > expected {
            return Err(parse_err(line, format!("more than {expected} edges")));
        }
    }
    if edges.len() != expected {
        return Err(parse_err(0, format!("expected {expected} edges, found {}", edges.len())));
    }
    let g = RegularGraph::from_edges(n, &edges).map_err(|e| parse_err(0, e.to_string()))?;
    if g.d() != d {
        return Err(parse_err(1, format!("header degree {d} does not match edges")));
    }
    Ok(g)
}
