use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;
use rand::Rng as _;
use vacant::graph::{generate_random_regular, ball_tree_excess, RegularGraph, VertexSet};
use vacant::pim::{sample_segments, xi_segments};
use vacant::rng;
use vacant::vacancy::*;
use vacant::walk::{Provenance, VacantConfig};

fn config_from(n: usize, vacant: impl IntoIterator<Item = usize>) -> VacantConfig {
    VacantConfig { vacant: VertexSet::from_vertices(n, vacant), provenance: Provenance::Segments, u_level: 0.0 }
}

fn random_config(n: usize, p: f64, seed: u64) -> VacantConfig {
    let mut r = rng::stream(seed, 5);
    config_from(n, (0..n).filter(|_| r.random::<f64>() < p).collect::<Vec<_>>())
}

/// Components as vertex sets via recursive depth-first search on `allowed`.
fn dfs_components(g: &RegularGraph, allowed: &dyn Fn(usize) -> bool) -> Vec<BTreeSet<usize>> {
    fn visit(g: &RegularGraph, allowed: &dyn Fn(usize) -> bool, v: usize, seen: &mut [bool], out: &mut BTreeSet<usize>) {
        seen[v] = true;
        out.insert(v);
        for &w in g.neighbours(v) {
            if allowed(w) && !seen[w] {
                visit(g, allowed, w, seen, out);
            }
        }
    }
    let mut seen = vec![false; g.n()];
    let mut comps = Vec::new();
    for v in 0..g.n() {
        if allowed(v) && !seen[v] {
            let mut c = BTreeSet::new();
            visit(g, allowed, v, &mut seen, &mut c);
            comps.push(c);
        }
    }
    comps
}

fn partition_of(summary: &ComponentSummary) -> BTreeSet<BTreeSet<usize>> {
    let mut by_label: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    for (v, l) in summary.labels.iter().enumerate() {
        if let Some(l) = l {
            by_label.entry(*l).or_default().insert(v);
        }
    }
    by_label.into_values().collect()
}

fn treelike_vertex(g: &RegularGraph, radius: usize) -> usize {
    (0..g.n()).find(|&x| ball_tree_excess(g, x, radius) == 0).expect("some tree-like ball")
}

fn prism() -> RegularGraph {
    RegularGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]).unwrap()
}

#[test]
fn trivial_configurations() {
    let g = generate_random_regular(100, 3, 1).unwrap();
    let full = components(&g, &config_from(100, 0..100)).unwrap();
    assert_eq!((full.component_count, full.c_max_size, full.c_sec_size), (1, 100, 0));
    let empty = components(&g, &config_from(100, [])).unwrap();
    assert_eq!((empty.component_count, empty.c_max_size), (0, 0));
    assert!(empty.labels.iter().all(Option::is_none));
}

#[test]
fn size_mismatch_is_rejected() {
    let g = RegularGraph::complete(4);
    assert!(matches!(components(&g, &config_from(5, [0])), Err(VacancyError::SizeMismatch { .. })));
}

#[test]
fn components_on_k4_match_dfs_for_every_subset() {
    let g = RegularGraph::complete(4);
    for mask in 0u32..16 {
        let vac: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
        let config = config_from(4, vac.clone());
        let s = components(&g, &config).unwrap();
        let expected: BTreeSet<_> = dfs_components(&g, &|v| vac.contains(&v)).into_iter().collect();
        assert_eq!(partition_of(&s), expected);
    }
}

#[test]
fn labels_are_smallest_members() {
    let g = generate_random_regular(500, 3, 4).unwrap();
    let s = components(&g, &random_config(500, 0.5, 4)).unwrap();
    for comp in partition_of(&s) {
        let min = *comp.iter().next().unwrap();
        assert!(comp.iter().all(|&v| s.labels[v] == Some(min)));
    }
}

#[test]
fn local_component_examples() {
    let g = generate_random_regular(200, 3, 2).unwrap();
    let config = random_config(200, 0.6, 2);
    let occupied = (0..200).find(|&v| !config.is_vacant(v)).unwrap();
    let vacant = (0..200).find(|&v| config.is_vacant(v)).unwrap();
    let b = VertexSet::full(200);
    assert!(local_component(&g, &config, occupied, &b).unwrap().is_empty());
    let single = VertexSet::from_vertices(200, [vacant]);
    assert_eq!(local_component(&g, &config, vacant, &single).unwrap().to_vec(), vec![vacant]);
    let outside = VertexSet::from_vertices(200, [occupied]);
    assert_eq!(local_component(&g, &config, vacant, &outside), Err(VacancyError::NotInSet(vacant)));
}

#[test]
fn local_component_matches_restricted_dfs() {
    let g = generate_random_regular(300, 3, 9).unwrap();
    let config = random_config(300, 0.7, 9);
    let b = vacant::graph::ball(&g, 0, 4);
    let oracle = dfs_components(&g, &|v| b.contains(v) && config.is_vacant(v));
    for y in b.iter() {
        let got: BTreeSet<usize> = local_component(&g, &config, y, &b).unwrap().iter().collect();
        let want = oracle.iter().find(|c| c.contains(&y)).cloned().unwrap_or_default();
        assert_eq!(got, want, "y = {y}");
    }
}

#[test]
fn boundary_component_examples() {
    let g = generate_random_regular(4096, 3, 3).unwrap();
    let x = treelike_vertex(&g, 5);
    let all = config_from(4096, 0..4096);
    assert_eq!(boundary_component(&g, &all, x, 0).unwrap().to_vec(), vec![x]);
    for l in 1..=4 {
        assert_eq!(boundary_component(&g, &all, x, l).unwrap().len(), 3 * 2usize.pow(l as u32 - 1));
    }
    let none = config_from(4096, []);
    assert!(boundary_component(&g, &none, x, 0).unwrap().is_empty());
}

#[test]
fn boundary_component_matches_distance_oracle() {
    let g = generate_random_regular(400, 3, 12).unwrap();
    let config = random_config(400, 0.75, 12);
    for x in 0..40 {
        let dist = g.bfs_distances(x);
        for l in 0..5 {
            let reach = dfs_components(&g, &|v| dist[v] <= l && config.is_vacant(v));
            let comp = reach.iter().find(|c| c.contains(&x)).cloned().unwrap_or_default();
            let want: BTreeSet<usize> =
                comp.into_iter().filter(|&v| g.neighbours(v).iter().any(|&w| dist[w] > l)).collect();
            let got: BTreeSet<usize> = boundary_component(&g, &config, x, l).unwrap().iter().collect();
            assert_eq!(got, want, "x = {x}, l = {l}");
        }
    }
}

#[test]
fn future_of_path_tip_in_tree_region_is_proper() {
    let g = generate_random_regular(4096, 3, 8).unwrap();
    let x = treelike_vertex(&g, 6);
    let a1 = g.neighbours(x)[0];
    let a2 = *g.neighbours(a1).iter().find(|&&w| w != x).unwrap();
    let a = VertexSet::from_vertices(4096, [x, a1, a2]);
    let y = *g.neighbours(a2).iter().find(|&&w| w != a1).unwrap();
    let f = future_set(&g, &a, y, 2).unwrap();
    assert!(f.proper());
    // y and its two children; grandchildren are at distance 3 from A.
    assert_eq!(f.set.len(), 3);
}

#[test]
fn future_with_two_parents_is_not_proper() {
    let g = RegularGraph::complete(4);
    let a = VertexSet::from_vertices(4, [0, 1]);
    let f = future_set(&g, &a, 2, 1).unwrap();
    assert!(!f.unique_parent && !f.proper());
}

#[test]
fn future_containing_a_cycle_is_not_proper() {
    let g = RegularGraph::complete(4);
    let a = VertexSet::from_vertices(4, [0]);
    let f = future_set(&g, &a, 1, 1).unwrap();
    assert_eq!(f.set.len(), 3);
    assert!(!f.tree && f.unique_parent && f.isolated && !f.proper());
}

#[test]
fn future_reaching_another_set_vertex_is_not_isolated() {
    let g = prism();
    let a = VertexSet::from_vertices(6, [0, 1]);
    let f = future_set(&g, &a, 3, 1).unwrap();
    assert_eq!(f.set.to_vec(), vec![3, 4]);
    assert!(f.tree && f.unique_parent && !f.isolated);
}

#[test]
fn future_rejects_bad_inputs() {
    let g = prism();
    let a = VertexSet::from_vertices(6, [0, 1]);
    assert_eq!(future_set(&g, &a, 5, 1), Err(VacancyError::NotOnBoundary(5)));
    assert_eq!(future_set(&g, &a, 0, 1), Err(VacancyError::NotOnBoundary(0)));
    assert_eq!(future_set(&g, &VertexSet::from_vertices(6, [0, 5]), 1, 1), Err(VacancyError::BadSet));
}

#[test]
fn classification_of_extreme_configurations() {
    let n = 4096;
    let g = generate_random_regular(n, 3, 6).unwrap();
    let p = ClassifyParams::with_radius(n, 3, 2.0, 0.125, 1, 1, 0.5).unwrap();
    let x = treelike_vertex(&g, p.tree_radius);
    assert_eq!(classify_vertex(&g, &config_from(n, []), x, &p).unwrap(), VertexClass::Small);
    // Fully vacant: C^R_x is the whole sphere, and the upper bound in (ii) fails only for large layers.
    let all = config_from(n, 0..n);
    assert_eq!(boundary_component(&g, &all, x, p.radius).unwrap().len(), 3);
    let loose = ClassifyParams { l0: 2, ..p };
    assert_eq!(classify_vertex(&g, &all, x, &loose).unwrap(), VertexClass::Proper);
    // At l = 1 the bound m_-^{5/4} < 3 rules out a full sphere.
    assert_eq!(classify_vertex(&g, &all, x, &p).unwrap(), VertexClass::Bad);
    let strict = ClassifyParams { h: 10.0, ..loose };
    assert_eq!(classify_vertex(&g, &all, x, &strict).unwrap(), VertexClass::Bad);
}

#[test]
fn non_tree_ball_is_bad() {
    let g = RegularGraph::petersen();
    let n = g.n();
    let p = ClassifyParams::with_radius(n, 3, 1.0, 0.125, 1, 2, 0.1).unwrap();
    assert_eq!(classify_vertex(&g, &config_from(n, []), 0, &p).unwrap(), VertexClass::Bad);
}

#[test]
fn asymptotic_thresholds() {
    let p = ClassifyParams::asymptotic(1 << 14, 3, 2.0, 0.125, 0.002, 1.0).unwrap();
    assert_eq!((p.radius, p.tree_radius, p.l1), (0, 0, 0));
    assert!((p.size_cap - 196.0).abs() < 1e-9);
    assert!(p.l0 > p.l1);
    let o = ExploreOptions::asymptotic(1 << 14, 3, 4.0);
    assert_eq!(o.future_radius, 26);
    assert_eq!(ExploreOptions::asymptotic(64, 3, 4.0).future_radius, 18);
}

#[test]
fn census_extremes() {
    let g = generate_random_regular(300, 3, 5).unwrap();
    let s = components(&g, &random_config(300, 0.6, 5)).unwrap();
    assert_eq!(mesoscopic_census(&s, 1), s.vacant_count());
    assert_eq!(mesoscopic_census(&s, 301), 0);
    assert_eq!(mesoscopic_census(&s, s.c_max_size), s.c_max_size * s.sizes.iter().filter(|&&z| z == s.c_max_size).count());
}

#[test]
fn exploration_of_occupied_start_is_one_step() {
    let g = generate_random_regular(200, 3, 1).unwrap();
    let mut r = rng::stream(1, 0);
    let bundle = sample_segments(&g, 5, 20.0, &mut r);
    let index = SegmentIndex::new(200, &bundle.segments);
    let x = bundle.segments[0].start();
    let t = bfs_explore_instrumented(&g, &index, x, &ExploreOptions { k_cap: 4.0, future_radius: 2 });
    assert_eq!(t.steps.len(), 1);
    assert_eq!(t.termination, Termination::QueueEmpty);
    assert_eq!((t.steps[0].r, t.steps[0].proper_future), (-1, None));
    assert!(t.steps[0].tied_count == 0 && t.final_queue == 0);
}

#[test]
fn exploration_without_segments_fills_to_cap() {
    let n = 1 << 14;
    let g = generate_random_regular(n, 3, 2).unwrap();
    let index = SegmentIndex::new(n, &[]);
    let x = treelike_vertex(&g, 7);
    let t = bfs_explore_instrumented(&g, &index, x, &ExploreOptions { k_cap: 2.0, future_radius: 2 });
    assert_eq!(t.termination, Termination::SizeCap);
    assert_eq!(t.explored_vacant(), 28);
    assert_eq!(t.steps[0].r, 2);
    assert!(t.steps[1..].iter().all(|s| s.r == 1));
    assert!(t.steps[1..].iter().all(|s| s.proper_future == Some(true)));
}

#[test]
fn exploration_recovers_the_vacant_cluster() {
    let n = 2000;
    let g = generate_random_regular(n, 3, 7).unwrap();
    let mut r = rng::stream(7, 0);
    let bundle = sample_segments(&g, 40, 50.0, &mut r);
    let index = SegmentIndex::new(n, &bundle.segments);
    let config = xi_segments(&bundle, n, 40, 1.0).unwrap();
    assert!((0..n).all(|v| index.is_vacant(v) == config.is_vacant(v)));
    let summary = components(&g, &config).unwrap();
    let opts = ExploreOptions { k_cap: 1e9, future_radius: 2 };
    for x in (0..n).step_by(97) {
        let t = bfs_explore_instrumented(&g, &index, x, &opts);
        assert_eq!(t.termination, Termination::QueueEmpty);
        assert_eq!(t.explored_vacant(), summary.size_of(x), "x = {x}");
        let explored: VertexSet = VertexSet::from_vertices(n, t.steps.iter().map(|s| s.y));
        let cluster = VertexSet::from_vertices(n, t.steps.iter().filter(|s| s.state == ExploredState::Vacant).map(|s| s.y));
        if !cluster.is_empty() {
            assert_eq!(explored, cluster.union(&vacant::graph::outer_boundary(&g, &cluster)));
        }
    }
}

#[test]
fn trace_csv_has_one_row_per_step() {
    let g = generate_random_regular(500, 3, 3).unwrap();
    let mut r = rng::stream(3, 0);
    let bundle = sample_segments(&g, 10, 30.0, &mut r);
    let index = SegmentIndex::new(500, &bundle.segments);
    let x = (0..500).find(|&v| index.is_vacant(v)).unwrap();
    let t = bfs_explore_instrumented(&g, &index, x, &ExploreOptions { k_cap: 3.0, future_radius: 2 });
    let mut buf = Vec::new();
    t.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,q_k,r_k,free_count,tied_count,proper");
    assert_eq!(lines.len(), t.steps.len() + 1);
    assert!(lines[1].starts_with("1,1,") && lines[1].ends_with(','));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn components_match_dfs_oracle(half in 5usize..150, seed in any::<u64>(), p in 0.0f64..1.0) {
        let n = 2 * half;
        let g = generate_random_regular(n, 3, seed).unwrap();
        let config = random_config(n, p, seed);
        let s = components(&g, &config).unwrap();
        let expected: BTreeSet<_> = dfs_components(&g, &|v| config.is_vacant(v)).into_iter().collect();
        prop_assert_eq!(partition_of(&s), expected);
        prop_assert_eq!(s.vacant_count(), config.vacant.len());
        prop_assert!(s.c_max_size >= s.c_sec_size);
        prop_assert!(s.sizes.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn removing_vertices_never_grows_a_component(seed in any::<u64>(), extra in 1usize..60) {
        let n = 400;
        let g = generate_random_regular(n, 3, seed).unwrap();
        let config = random_config(n, 0.8, seed);
        let mut r = rng::stream(seed, 6);
        let mut smaller = config.clone();
        for _ in 0..extra {
            smaller.vacant.remove(r.random_range(0..n));
        }
        let before = components(&g, &config).unwrap().sizes_by_vertex();
        let after = components(&g, &smaller).unwrap().sizes_by_vertex();
        prop_assert!(before.iter().zip(&after).all(|(b, a)| a <= b));
    }

    #[test]
    fn exploration_traces_respect_bookkeeping(seed in any::<u64>(), count in 0usize..60, x in 0usize..1000) {
        let n = 1000;
        let d = 3;
        let g = generate_random_regular(n, d, seed).unwrap();
        let mut r = rng::stream(seed, 0);
        let bundle = sample_segments(&g, count, 25.0, &mut r);
        let index = SegmentIndex::new(n, &bundle.segments);
        let t = bfs_explore_instrumented(&g, &index, x, &ExploreOptions { k_cap: 3.0, future_radius: 2 });
        prop_assert!(!t.steps.is_empty());
        for (i, s) in t.steps.iter().enumerate() {
            prop_assert_eq!(s.k, i + 1);
            prop_assert_eq!(s.explored_vacant + s.explored_occupied, s.k - 1);
            prop_assert_eq!(s.free_count + s.tied_count, count);
            if s.k == 1 {
                prop_assert!(s.r == -1 || s.r == d as i64 - 1);
                prop_assert!(s.proper_future.is_none());
            } else {
                prop_assert!((-1..=d as i64 - 2).contains(&s.r));
                prop_assert!(s.proper_future.is_some());
            }
            let next_q = t.steps.get(i + 1).map_or(t.final_queue, |n| n.q);
            prop_assert_eq!(next_q as i64 - s.q as i64, s.r);
            if let Some(next) = t.steps.get(i + 1) {
                prop_assert!(next.tied_count >= s.tied_count);
            }
            if s.state == ExploredState::Occupied {
                prop_assert_eq!(s.r, -1);
            }
        }
        match t.termination {
            Termination::QueueEmpty => prop_assert_eq!(t.final_queue, 0),
            Termination::SizeCap => prop_assert!(t.explored_vacant() as f64 >= 3.0 * vacant::ld(d, n as f64)),
        }
    }
}

#[test]
fn bad_vertices_and_census_at_desk_scale() {
    use vacant::calibrated::{BAD_FRACTION, CENSUS_FRACTION};
    use vacant::experiments::{classify_all, ExperimentConfig};
    let cfg = ExperimentConfig { n: 1 << 14, d: 3, u: vec![2.0], seeds: 2, ..ExperimentConfig::default() };
    for seed in 0..2 {
        let rep = classify_all(&cfg, seed).unwrap();
        assert_eq!(rep.small + rep.proper + rep.bad, rep.n);
        let bad = rep.bad as f64 / rep.n as f64;
        assert!(bad <= BAD_FRACTION, "seed {seed}: bad fraction {bad}");
        let census = rep.census as f64 / rep.n as f64;
        assert!(census >= CENSUS_FRACTION, "seed {seed}: census {census}");
    }
}
