use std::collections::HashSet;

use proptest::prelude::*;
use rand::Rng as _;
use vacant::interlace::*;
use vacant::rng;

fn u_for_p(d: usize, p: f64) -> f64 {
    let df = d as f64;
    -p.ln() * df * (df - 1.0) / ((df - 2.0) * (df - 2.0))
}

fn binom(n: usize, k: usize, p: f64) -> f64 {
    let c: f64 = (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product();
    c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// Law of the root cluster size up to `kmax`, by convolving subtree progeny laws.
fn progeny_oracle(d: usize, u: f64, kmax: usize) -> Vec<f64> {
    let pr = params(d, u).unwrap();
    let p = pr.p_u;
    // g[k] = P[subtree of an alive non-root vertex has k vertices].
    let mut g = vec![0.0; kmax + 1];
    let conv = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; kmax + 1];
        for i in 0..=kmax {
            for j in 0..=kmax - i {
                out[i + j] += a[i] * b[j];
            }
        }
        out
    };
    let mut unit = vec![0.0; kmax + 1];
    unit[0] = 1.0;
    for k in 1..=kmax {
        // Sizes up to k are settled once the j-fold sums use g[..k].
        let mut acc = vec![0.0; kmax + 1];
        let mut pow = unit.clone();
        for j in 0..d {
            for (s, v) in pow.iter().enumerate() {
                acc[s] += binom(d - 1, j, p) * v;
            }
            pow = conv(&pow, &g);
        }
        g[k] = acc[k - 1];
    }
    let mut root = vec![0.0; kmax + 1];
    let mut pow = unit;
    for j in 0..=d {
        for s in 0..kmax {
            root[s + 1] += binom(d, j, p) * pow[s];
        }
        pow = conv(&pow, &g);
    }
    let alive = pr.root_vacancy();
    let mut law: Vec<f64> = root.iter().map(|v| alive * v).collect();
    law[0] = 1.0 - alive;
    law
}

/// Escape probability from a vertex of K through one free edge: the distance to K is a
/// walk stepping away with probability (d-1)/d, solved on `0..=depth` with absorption at both ends.
fn radial_escape(d: usize, depth: usize) -> f64 {
    let up = (d - 1) as f64 / d as f64;
    // h(k) = P_k[reach depth before 0]; h(k) = up h(k+1) + (1-up) h(k-1).
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..200 {
        let slope = 0.5 * (lo + hi);
        let (mut a, mut b) = (0.0, slope);
        for _ in 1..depth {
            let c = (b - (1.0 - up) * a) / up;
            a = b;
            b = c;
        }
        if b > 1.0 {
            hi = slope;
        } else {
            lo = slope;
        }
    }
    lo
}

#[test]
fn critical_intensities() {
    assert!((u_star(3).unwrap() - 4.158883083).abs() < 1e-9);
    assert!((u_star(4).unwrap() - 3.295836866).abs() < 1e-9);
    assert_eq!(u_star(2), Err(InterlaceError::Degree(2)));
    for d in 3..=10 {
        let p = params(d, u_star(d).unwrap()).unwrap();
        assert!((p.m_u - 1.0).abs() < 1e-12 && p.v_u.abs() < 1e-12);
    }
}

#[test]
fn parameter_examples() {
    let p = params(3, 0.0).unwrap();
    assert_eq!((p.p_u, p.m_u, p.v_u), (1.0, 2.0, 1.0));
    let p = params(3, 6.0 * 2f64.ln()).unwrap();
    assert!((p.p_u - 0.5).abs() < 1e-15 && (p.m_u - 1.0).abs() < 1e-15 && p.v_u.abs() < 1e-15);
    let p = params(3, -6.0 * 0.75f64.ln()).unwrap();
    assert!((p.u - 1.726092).abs() < 1e-6);
    assert!((p.m_u - 1.5).abs() < 1e-12);
    assert!(matches!(params(3, -1.0), Err(InterlaceError::Intensity(_))));
    for d in 3..8 {
        for u in [0.0, 0.5, 2.0, 7.0] {
            let p = params(d, u).unwrap();
            assert!((p.m_u.ln() / ((d - 1) as f64).ln() - p.v_u).abs() <= 1e-12);
            assert!((p.f_root - (d - 2) as f64 / (d - 1) as f64).abs() < 1e-15);
        }
    }
}

#[test]
fn zero_intensity_fills_the_tree() {
    let mut r = rng::stream(1, 0);
    let c = sample_cluster(3, 0.0, &mut r, 4, 1_000_000).unwrap();
    assert_eq!(c.size(), 1 + 3 + 6 + 12 + 24);
    assert_eq!(c.truncated, Some(Truncation::Depth(4)));
    assert_eq!(c.max_depth(), 4);
    let c = sample_cluster(4, 0.0, &mut r, 100, 50).unwrap();
    assert_eq!(c.size(), 50);
    assert_eq!(c.truncated, Some(Truncation::Size(50)));
}

#[test]
fn huge_intensity_empties_the_root() {
    let mut r = rng::stream(2, 0);
    let empty = (0..100_000).filter(|_| sample_cluster(3, 50.0, &mut r, 100, 1000).unwrap().size() == 0).count();
    assert!(empty as f64 >= 0.9999 * 100_000.0);
}

#[test]
fn reaching_depth_matches_generation_survival() {
    let d = 3;
    let u = u_for_p(d, 0.75);
    let depth = 20;
    let pr = params(d, u).unwrap();
    // The root has d children, each starting an offspring process that must last depth - 1 generations.
    let s = generation_survival(d, u, depth - 1).unwrap();
    let expect = pr.root_vacancy() * (1.0 - (1.0 - pr.p_u * s).powi(d as i32));
    let samples = 20_000;
    let mut r = rng::stream(3, 0);
    let hits = (0..samples)
        .filter(|_| sample_cluster(d, u, &mut r, depth as u32, usize::MAX).unwrap().max_depth() == depth as u32)
        .count();
    let f = hits as f64 / samples as f64;
    let se = (expect * (1.0 - expect) / samples as f64).sqrt();
    assert!((f - expect).abs() <= 3.0 * se, "{f} vs {expect}");
}

#[test]
fn extinction_examples() {
    let u = u_for_p(3, 0.75);
    let q = extinction_probability(3, u, 1e-14).unwrap();
    assert!((q - 1.0 / 9.0).abs() <= 1e-10);
    let p = params(3, u).unwrap();
    assert!((offspring_pgf(3, p.p_u, q) - q).abs() <= 1e-14);
    assert_eq!(extinction_probability(3, 5.0, 1e-12).unwrap(), 1.0);
    let mut prev = 0.0;
    for i in 0..=40 {
        let u = u_star(3).unwrap() * i as f64 / 40.0;
        let q = extinction_probability(3, u, 1e-13).unwrap();
        assert!(q >= prev - 1e-12);
        prev = q;
    }
    assert!(extinction_probability(3, u_star(3).unwrap() * 0.999, 1e-13).unwrap() > 0.99);
}

#[test]
fn generation_survival_examples() {
    let u = u_for_p(3, 0.75);
    assert_eq!(generation_survival(3, u, 0).unwrap(), 1.0);
    assert!((generation_survival(3, u, 1).unwrap() - (1.0 - 0.25f64.powi(2))).abs() < 1e-15);
    assert!((generation_survival(3, u, 400).unwrap() - 8.0 / 9.0).abs() < 1e-12);
}

#[test]
fn capacity_examples() {
    for d in 3..8 {
        let df = d as f64;
        let p = params(d, 1.0).unwrap();
        assert!((tree_capacity(d, &path_subtree(0)).unwrap() - p.f_root).abs() < 1e-15);
        let two = tree_capacity(d, &path_subtree(1)).unwrap();
        assert!((two - 2.0 * (df - 2.0) / df).abs() < 1e-15);
        assert!((two - p.f_root - p.f_other).abs() < 1e-15);
        let esc = radial_escape(d, 30);
        for k in 0..10 {
            let cap = tree_capacity(d, &path_subtree(k)).unwrap();
            assert!((cap - p.f_root - k as f64 * p.f_other).abs() < 1e-12);
            // Free edges: d at a lone root, otherwise d-1 at both ends and d-2 inside.
            let free = if k == 0 { d } else { 2 * (d - 1) + (k - 1) * (d - 2) };
            let brute = free as f64 / df * esc;
            // Truncation at depth 30 plus rounding in the shooting solve.
            assert!((cap - brute).abs() <= 2.0 * (df - 1.0).powi(-30) * (k + 1) as f64 + 1e-13, "d {d} k {k}");
        }
    }
}

#[test]
fn capacity_errors() {
    assert_eq!(tree_capacity(3, &[vec![0]]), Err(InterlaceError::Rootless));
    assert_eq!(tree_capacity(3, &[vec![], vec![0, 1]]), Err(InterlaceError::NotConnected(1)));
    assert_eq!(tree_capacity(3, &[vec![], vec![3]]), Err(InterlaceError::ChildIndex { index: 3, depth: 0 }));
    assert_eq!(tree_capacity(3, &[vec![], vec![2], vec![2, 2]]), Err(InterlaceError::ChildIndex { index: 2, depth: 1 }));
}

#[test]
fn histogram_against_progeny_law() {
    let d = 3;
    let u = u_for_p(d, 0.4);
    let oracle = progeny_oracle(d, u, 64);
    let mut r = rng::stream(4, 0);
    let hist = cluster_size_histogram(d, u, 1_000_000, &mut r, 10_000).unwrap();
    assert_eq!(hist.capped, 0);
    let tail = 1.0 - oracle.iter().sum::<f64>();
    let emp_tail = 1.0 - hist.cdf(64);
    let tv = 0.5 * ((0..=64).map(|k| (hist.frequency(k) - oracle[k]).abs()).sum::<f64>() + (tail - emp_tail).abs());
    assert!(tv <= 0.01, "tv {tv}");
    // Single-vertex clusters: root alive with all d children vacant-free.
    let pr = params(d, u).unwrap();
    let one = pr.root_vacancy() * (1.0 - pr.p_u).powi(d as i32);
    assert!((oracle[1] - one).abs() < 1e-15);
    let se = (one * (1.0 - one) / 1e6).sqrt();
    assert!((hist.frequency(1) - one).abs() <= 3.0 * se);
}

#[test]
fn huge_intensity_histogram_zero_mass() {
    let mut r = rng::stream(5, 0);
    let u = 8.0;
    let hist = cluster_size_histogram(3, u, 100_000, &mut r, 1000).unwrap();
    let p0 = 1.0 - params(3, u).unwrap().root_vacancy();
    let se = (p0 * (1.0 - p0) / 1e5).sqrt();
    assert!((hist.frequency(0) - p0).abs() <= 3.0 * se);
}

fn random_subtree(d: usize, size: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut r = rng::stream(seed, 9);
    let mut nodes: Vec<Vec<u8>> = vec![vec![]];
    let mut seen: HashSet<Vec<u8>> = nodes.iter().cloned().collect();
    while nodes.len() < size {
        let parent = nodes[r.random_range(0..nodes.len())].clone();
        let limit = if parent.is_empty() { d } else { d - 1 };
        let mut child = parent;
        child.push(r.random_range(0..limit) as u8);
        if seen.insert(child.clone()) {
            nodes.push(child);
        }
    }
    nodes
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn capacity_matches_product_of_marginals(d in 3usize..8, size in 1usize..40, seed in any::<u64>(), u in 0.0f64..10.0) {
        let k = random_subtree(d, size, seed);
        let cap = tree_capacity(d, &k).unwrap();
        let p = params(d, u).unwrap();
        let product = p.root_vacancy() * p.p_u.powi(size as i32 - 1);
        prop_assert!(((-u * cap).exp() - product).abs() <= 1e-12 * product.max(1e-300));
    }

    #[test]
    fn coupled_clusters_are_nested(seed in any::<u64>(), u1 in 0.0f64..6.0, du in 0.0f64..4.0) {
        let mut r = rng::stream(seed, 0);
        let cs = sample_cluster_levels(3, &[u1 + du, u1], &mut r, 12, 5000).unwrap();
        let big: HashSet<Vec<u8>> = cs[1].paths().into_iter().collect();
        for path in cs[0].paths() {
            prop_assert!(big.contains(&path));
        }
        let paths = cs[1].paths();
        let set: HashSet<&Vec<u8>> = paths.iter().collect();
        for path in &paths {
            if !path.is_empty() {
                prop_assert!(set.contains(&path[..path.len() - 1].to_vec()));
            }
        }
    }

    #[test]
    fn vacancy_exponent_is_affine(d in 3usize..12, u in 0.0f64..20.0) {
        let p = params(d, u).unwrap();
        prop_assert!((p.v_u - (1.0 - u / p.u_star)).abs() <= 1e-12);
    }

    #[test]
    fn extinction_is_a_fixed_point(d in 3usize..8, u in 0.0f64..4.0) {
        let p = params(d, u).unwrap();
        let q = extinction_probability(d, u, 1e-12).unwrap();
        prop_assert!((offspring_pgf(d, p.p_u, q) - q).abs() <= 1e-11);
    }
}
