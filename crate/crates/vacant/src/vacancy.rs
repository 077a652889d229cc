//! Connected components of vacant configurations, local cluster views,
//! classification of vertices and the instrumented breadth-first exploration
//! of the vacant cluster of a point.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{self, RegularGraph, VertexSet};
use crate::interlace::{self, InterlaceError};
use crate::ld;
use crate::walk::{Trajectory, VacantConfig};

#[derive(Debug, Error, PartialEq)]
pub enum VacancyError {
    #[error("vertex {0} is not in the given set")]
    NotInSet(usize),
    #[error("vertex {0} is not on the outer boundary of the set")]
    NotOnBoundary(usize),
    #[error("set must be nonempty and connected")]
    BadSet,
    #[error("configuration has {config} vertices but the graph has {graph}")]
    SizeMismatch { config: usize, graph: usize },
    #[error(transparent)]
    Interlace(#[from] InterlaceError),
}

fn check_size(g: &RegularGraph, config: &VacantConfig) -> Result<(), VacancyError> {
    if config.n() != g.n() {
        return Err(VacancyError::SizeMismatch { config: config.n(), graph: g.n() });
    }
    Ok(())
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Components of the vacant set. Each component is labelled by its smallest vertex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentSummary {
    pub labels: Vec<Option<usize>>,
    /// Component sizes, largest first.
    pub sizes: Vec<usize>,
    pub c_max_size: usize,
    pub c_sec_size: usize,
    pub component_count: usize,
}

impl ComponentSummary {
    /// `|C_x|`, zero when `x` is occupied.
    pub fn size_of(&self, x: usize) -> usize {
        match self.labels[x] {
            Some(label) => self.labels.iter().filter(|&&l| l == Some(label)).count(),
            None => 0,
        }
    }

    /// `|C_x|` for every vertex at once.
    pub fn sizes_by_vertex(&self) -> Vec<usize> {
        let mut by_label: HashMap<usize, usize> = HashMap::new();
        for label in self.labels.iter().flatten() {
            *by_label.entry(*label).or_default() += 1;
        }
        self.labels.iter().map(|l| l.map_or(0, |l| by_label[&l])).collect()
    }

    pub fn vacant_count(&self) -> usize {
        self.sizes.iter().sum()
    }
}

pub fn components(g: &RegularGraph, config: &VacantConfig) -> Result<ComponentSummary, VacancyError> {
    check_size(g, config)?;
    let n = g.n();
    let mut uf = UnionFind::new(n);
    for x in config.vacant.iter() {
        for &y in g.neighbours(x) {
            if y > x && config.is_vacant(y) {
                uf.union(x, y);
            }
        }
    }
    let mut smallest: HashMap<usize, usize> = HashMap::new();
    let mut counts: HashMap<usize, usize> = HashMap::new();
    // Vertices are visited in increasing order, so the first member seen is the smallest.
    for x in config.vacant.iter() {
        let root = uf.find(x);
        smallest.entry(root).or_insert(x);
        *counts.entry(root).or_default() += 1;
    }
    let mut labels = vec![None; n];
    for x in config.vacant.iter() {
        labels[x] = Some(smallest[&uf.find(x)]);
    }
    let mut sizes: Vec<usize> = counts.into_values().collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(ComponentSummary {
        c_max_size: sizes.first().copied().unwrap_or(0),
        c_sec_size: sizes.get(1).copied().unwrap_or(0),
        component_count: sizes.len(),
        labels,
        sizes,
    })
}

/// Number of vertices lying in vacant components of size at least `threshold`.
pub fn mesoscopic_census(summary: &ComponentSummary, threshold: usize) -> usize {
    summary.sizes.iter().filter(|&&s| s >= threshold).sum()
}

/// Component of `y` in the vacant set restricted to `b`.
pub fn local_component(
    g: &RegularGraph,
    config: &VacantConfig,
    y: usize,
    b: &VertexSet,
) -> Result<VertexSet, VacancyError> {
    check_size(g, config)?;
    if !b.contains(y) {
        return Err(VacancyError::NotInSet(y));
    }
    let mut out = VertexSet::empty(g.n());
    if !config.is_vacant(y) {
        return Ok(out);
    }
    out.insert(y);
    let mut stack = vec![y];
    while let Some(v) = stack.pop() {
        for &w in g.neighbours(v) {
            if b.contains(w) && config.is_vacant(w) && out.insert(w) {
                stack.push(w);
            }
        }
    }
    Ok(out)
}

/// `C^l_x`: vertices of the inner boundary of `B(x, l)` joined to `x` by a vacant path inside `B(x, l)`.
pub fn boundary_component(g: &RegularGraph, config: &VacantConfig, x: usize, l: usize) -> Result<VertexSet, VacancyError> {
    let b = graph::ball(g, x, l);
    let reached = local_component(g, config, x, &b)?;
    Ok(VertexSet::from_vertices(
        g.n(),
        reached.iter().filter(|&v| g.neighbours(v).iter().any(|&w| !b.contains(w))),
    ))
}

/// `F_A(y, r)` together with the three properness conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct Future {
    pub set: VertexSet,
    /// `tx(F) = 0`.
    pub tree: bool,
    /// `y` has exactly one neighbour in `A`.
    pub unique_parent: bool,
    /// No path inside `B(A, r) \ A` leads from `y` to `A \ {ȳ}`.
    pub isolated: bool,
}

impl Future {
    pub fn proper(&self) -> bool {
        self.tree && self.unique_parent && self.isolated
    }
}

/// The component of `y` in `B(A, r) \ A`, with its properness checks.
pub fn future_set(g: &RegularGraph, a: &VertexSet, y: usize, r: usize) -> Result<Future, VacancyError> {
    if a.is_empty() || !graph::is_connected_set(g, a) {
        return Err(VacancyError::BadSet);
    }
    let parents: Vec<usize> = g.neighbours(y).iter().copied().filter(|&w| a.contains(w)).collect();
    if a.contains(y) || parents.is_empty() {
        return Err(VacancyError::NotOnBoundary(y));
    }
    let region = graph::set_neighbourhood(g, a, r);
    let mut set = VertexSet::empty(g.n());
    set.insert(y);
    let mut stack = vec![y];
    while let Some(v) = stack.pop() {
        for &w in g.neighbours(v) {
            if region.contains(w) && !a.contains(w) && set.insert(w) {
                stack.push(w);
            }
        }
    }
    let tree = graph::induced_edge_count(g, &set) + 1 == set.len();
    let unique_parent = parents.len() == 1;
    let isolated = unique_parent && {
        let y_bar = parents[0];
        set.iter().all(|z| g.neighbours(z).iter().all(|&w| !a.contains(w) || w == y_bar))
    };
    Ok(Future { set, tree, unique_parent, isolated })
}

/// Radii and thresholds for sorting vertices into small, proper and bad.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassifyParams {
    /// Constant in the lower bound on `|C^R_x|`.
    pub h: f64,
    /// `R`, playing the role of `β ld n`.
    pub radius: usize,
    /// Radius of the ball that must be a tree, `5R` by default.
    pub tree_radius: usize,
    /// Size cap `ld² n` for small vertices.
    pub size_cap: f64,
    /// `m_{u(1+ε)}`.
    pub m_plus: f64,
    /// `m_{u(1-ε)}`.
    pub m_minus: f64,
    pub l0: usize,
    pub l1: usize,
}

impl ClassifyParams {
    /// Thresholds with `R = ⌊β ld n⌋`, `l0 = ⌈10 ln ln n / v_{u(1-ε)}⌉`, `l1 = R`.
    pub fn asymptotic(n: usize, d: usize, u: f64, epsilon: f64, beta: f64, h: f64) -> Result<Self, VacancyError> {
        let radius = (beta * ld(d, n as f64)).floor() as usize;
        let minus = interlace::params(d, u * (1.0 - epsilon))?;
        let l0 = if minus.v_u > 0.0 { (10.0 * (n as f64).ln().ln() / minus.v_u).ceil() as usize } else { usize::MAX };
        Self::with_radius(n, d, u, epsilon, radius, l0, h)
    }

    /// Thresholds at a chosen radius and lower scale `l0`.
    pub fn with_radius(n: usize, d: usize, u: f64, epsilon: f64, radius: usize, l0: usize, h: f64) -> Result<Self, VacancyError> {
        Ok(ClassifyParams {
            h,
            radius,
            tree_radius: 5 * radius,
            size_cap: ld(d, n as f64).powi(2),
            m_plus: interlace::params(d, u * (1.0 + epsilon))?.m_u,
            m_minus: interlace::params(d, u * (1.0 - epsilon))?.m_u,
            l0,
            l1: radius,
        })
    }

    /// `h m_{u(1+ε)}^R`.
    pub fn proper_threshold(&self) -> f64 {
        self.h * self.m_plus.powi(self.radius as i32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexClass {
    Small,
    Proper,
    Bad,
}

/// Sizes of `C^l_y` for `l = 0..=max_l`, valid when `B(y, max_l)` is a tree.
fn layer_counts_in_tree(g: &RegularGraph, config: &VacantConfig, y: usize, max_l: usize) -> Vec<usize> {
    let mut counts = vec![0; max_l + 1];
    if !config.is_vacant(y) {
        return counts;
    }
    let mut queue = VecDeque::from([(y, usize::MAX, 0)]);
    while let Some((v, from, dist)) = queue.pop_front() {
        counts[dist] += 1;
        if dist == max_l {
            continue;
        }
        for &w in g.neighbours(v) {
            if w != from && config.is_vacant(w) {
                queue.push_back((w, v, dist + 1));
            }
        }
    }
    counts
}

pub fn classify_vertex(g: &RegularGraph, config: &VacantConfig, x: usize, p: &ClassifyParams) -> Result<VertexClass, VacancyError> {
    check_size(g, config)?;
    if graph::ball_tree_excess(g, x, p.tree_radius) != 0 {
        return Ok(VertexClass::Bad);
    }
    if is_small(g, config, x, p) {
        return Ok(VertexClass::Small);
    }
    // B(x, 5R) is a tree, so B(y, R) is one for every y in B(x, R) and geodesics stay inside.
    let reach = layer_counts_in_tree(g, config, x, p.radius);
    if (reach[p.radius] as f64) < p.proper_threshold() {
        return Ok(VertexClass::Bad);
    }
    if p.l0 <= p.l1 {
        for (y, _) in graph::ball_layers(g, x, p.radius) {
            let counts = layer_counts_in_tree(g, config, y, p.l1);
            for l in p.l0..=p.l1 {
                if counts[l] as f64 > p.m_minus.powf(1.25 * l as f64) {
                    return Ok(VertexClass::Bad);
                }
            }
        }
    }
    Ok(VertexClass::Proper)
}

fn is_small(g: &RegularGraph, config: &VacantConfig, x: usize, p: &ClassifyParams) -> bool {
    if !config.is_vacant(x) {
        return true;
    }
    let inside: HashSet<usize> = graph::ball_layers(g, x, p.radius).into_iter().map(|(v, _)| v).collect();
    let mut seen = HashSet::from([x]);
    let mut stack = vec![x];
    while let Some(v) = stack.pop() {
        for &w in g.neighbours(v) {
            if config.is_vacant(w) && seen.insert(w) {
                if !inside.contains(&w) || seen.len() as f64 > p.size_cap {
                    return false;
                }
                stack.push(w);
            }
        }
    }
    true
}

/// Per-vertex list of segment indices whose range contains the vertex.
#[derive(Clone, Debug)]
pub struct SegmentIndex {
    visits: Vec<Vec<u32>>,
    segments: usize,
}

impl SegmentIndex {
    pub fn new(n: usize, segments: &[Trajectory]) -> Self {
        let mut visits: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (i, seg) in segments.iter().enumerate() {
            for &v in &seg.vertices {
                if visits[v].last() != Some(&(i as u32)) {
                    visits[v].push(i as u32);
                }
            }
        }
        SegmentIndex { visits, segments: segments.len() }
    }

    pub fn segment_count(&self) -> usize {
        self.segments
    }

    pub fn is_vacant(&self, x: usize) -> bool {
        self.visits[x].is_empty()
    }

    pub fn hits(&self, x: usize) -> &[u32] {
        &self.visits[x]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExploredState {
    Vacant,
    Occupied,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    QueueEmpty,
    SizeCap,
}

/// State of the exploration before step `k` and the outcome of that step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub k: usize,
    pub y: usize,
    pub state: ExploredState,
    /// Queue length before the step.
    pub q: usize,
    /// Change of the queue length during the step.
    pub r: i64,
    pub free_count: usize,
    pub tied_count: usize,
    pub explored_vacant: usize,
    pub explored_occupied: usize,
    /// Properness of `F_{E_k}(y_k, r)`; undefined at the first step.
    pub proper_future: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExplorationTrace {
    pub steps: Vec<StepRecord>,
    pub final_queue: usize,
    pub termination: Termination,
}

impl ExplorationTrace {
    pub fn explored_vacant(&self) -> usize {
        self.steps.iter().filter(|s| s.state == ExploredState::Vacant).count()
    }

    pub fn proper_failures(&self) -> usize {
        self.steps.iter().filter(|s| s.proper_future == Some(false)).count()
    }

    /// `(decrements, proper steps)` over steps with a proper future.
    pub fn proper_decrements(&self) -> (usize, usize) {
        let proper: Vec<&StepRecord> = self.steps.iter().filter(|s| s.proper_future == Some(true)).collect();
        (proper.iter().filter(|s| s.r == -1).count(), proper.len())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "k,q_k,r_k,free_count,tied_count,proper")?;
        for s in &self.steps {
            let proper = s.proper_future.map_or(String::new(), |p| p.to_string());
            writeln!(out, "{},{},{},{},{},{}", s.k, s.q, s.r, s.free_count, s.tied_count, proper)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExploreOptions {
    /// The exploration stops once `k_cap · ld n` vacant vertices are explored.
    pub k_cap: f64,
    /// Radius of the futures whose properness is recorded.
    pub future_radius: usize,
}

impl ExploreOptions {
    /// Future radius `max(7 ld ld n, 2)`.
    pub fn asymptotic(n: usize, d: usize, k_cap: f64) -> Self {
        let r = (7.0 * ld(d, ld(d, n as f64))).max(2.0).floor() as usize;
        ExploreOptions { k_cap, future_radius: r }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    NotExplored,
    InQueue,
    Explored,
}

/// Breadth-first exploration of the vacant cluster of `x` with free and tied segment bookkeeping.
pub fn bfs_explore_instrumented(g: &RegularGraph, index: &SegmentIndex, x: usize, opts: &ExploreOptions) -> ExplorationTrace {
    let n = g.n();
    let cap = opts.k_cap * ld(g.d(), n as f64);
    let mut mark = vec![Mark::NotExplored; n];
    let mut tied = vec![false; index.segment_count()];
    let mut tied_count = 0;
    let mut explored = VertexSet::empty(n);
    let (mut ev, mut eo) = (0, 0);
    let mut queue = VecDeque::from([x]);
    mark[x] = Mark::InQueue;
    let mut steps = Vec::new();
    let termination = loop {
        if queue.is_empty() {
            break Termination::QueueEmpty;
        }
        if ev as f64 >= cap {
            break Termination::SizeCap;
        }
        let k = steps.len() + 1;
        let q = queue.len();
        let y = queue.pop_front().expect("queue is nonempty");
        let proper_future = (!explored.is_empty())
            .then(|| future_set(g, &explored, y, opts.future_radius).map(|f| f.proper()).unwrap_or(false));
        let free_count = index.segment_count() - tied_count;
        let before = (tied_count, ev, eo);
        mark[y] = Mark::Explored;
        explored.insert(y);
        let state = if index.is_vacant(y) {
            ev += 1;
            let mut nbrs = g.neighbours(y).to_vec();
            nbrs.sort_unstable();
            for w in nbrs {
                if mark[w] == Mark::NotExplored {
                    mark[w] = Mark::InQueue;
                    queue.push_back(w);
                }
            }
            ExploredState::Vacant
        } else {
            eo += 1;
            for &i in index.hits(y) {
                if !tied[i as usize] {
                    tied[i as usize] = true;
                    tied_count += 1;
                }
            }
            ExploredState::Occupied
        };
        steps.push(StepRecord {
            k,
            y,
            state,
            q,
            r: queue.len() as i64 - q as i64,
            free_count,
            tied_count: before.0,
            explored_vacant: before.1,
            explored_occupied: before.2,
            proper_future,
        });
    };
    ExplorationTrace { steps, final_queue: queue.len(), termination }
}
