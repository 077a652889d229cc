use std::ffi::CStr;
use std::ptr;

use vacant::experiments::{cmd_sweep, ExperimentConfig};
use vacant_ffi::*;

fn last_error() -> String {
    let p = vacant_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn graph(n: usize, d: usize, seed: u64) -> *mut VacantGraph {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { vacant_graph_generate(n, d, seed, &mut g) }, VacantStatus::Ok);
    g
}

#[test]
fn critical_intensity() {
    let mut u = 0.0;
    assert_eq!(unsafe { vacant_u_star(3, &mut u) }, VacantStatus::Ok);
    assert!((u - 6.0 * 2f64.ln()).abs() < 1e-12);
    assert_eq!(unsafe { vacant_u_star(2, &mut u) }, VacantStatus::InvalidArgument);
    assert_eq!(unsafe { vacant_u_star(3, ptr::null_mut()) }, VacantStatus::NullPointer);
    assert!(last_error().contains("null"));
}

#[test]
fn graph_handle_round_trip() {
    let g = graph(100, 4, 7);
    unsafe {
        assert_eq!((vacant_graph_n(g), vacant_graph_d(g)), (100, 4));
        let mut buf = [usize::MAX; 4];
        assert_eq!(vacant_graph_neighbours(g, 5, buf.as_mut_ptr(), 4), VacantStatus::Ok);
        let expected = vacant::graph::generate_random_regular(100, 4, 7).unwrap();
        assert_eq!(buf.as_slice(), expected.neighbours(5));
        assert_eq!(vacant_graph_neighbours(g, 5, buf.as_mut_ptr(), 3), VacantStatus::InvalidArgument);
        assert_eq!(vacant_graph_neighbours(g, 100, buf.as_mut_ptr(), 4), VacantStatus::OutOfRange);
        assert!(last_error().contains("vertex 100"));
        vacant_graph_free(g);
        assert_eq!(vacant_graph_n(ptr::null()), 0);
        vacant_graph_free(ptr::null_mut());
    }
}

#[test]
fn invalid_graph_parameters() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { vacant_graph_generate(7, 3, 0, &mut g) }, VacantStatus::InvalidArgument);
    assert!(g.is_null());
    assert!(last_error().contains("even"));
}

#[test]
fn vacant_set_matches_the_sweep() {
    let (n, u, seed) = (2000, 2.0, 3);
    let cfg = ExperimentConfig { n, d: 3, u: vec![u], seeds: 1, seed, timing: false, ..ExperimentConfig::default() };
    let record = cmd_sweep(&cfg.validated().unwrap()).unwrap().remove(0);
    let g = graph(n, 3, seed);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(vacant_set_sample(g, u, seed, &mut s), VacantStatus::Ok);
        let (mut c_max, mut c_sec) = (0, 0);
        assert_eq!(vacant_set_largest_components(s, &mut c_max, &mut c_sec), VacantStatus::Ok);
        assert_eq!((c_max, c_sec, vacant_set_count(s)), (record.c_max, record.c_sec, record.vacant_count));
        let mut vacant_total = 0;
        let mut largest = 0;
        for x in 0..n {
            let (mut inside, mut size) = (0, 0);
            assert_eq!(vacant_set_contains(s, x, &mut inside), VacantStatus::Ok);
            assert_eq!(vacant_set_component_size(s, x, &mut size), VacantStatus::Ok);
            assert_eq!(inside == 1, size > 0);
            vacant_total += inside as usize;
            largest = largest.max(size);
        }
        assert_eq!((vacant_total, largest), (record.vacant_count, c_max));
        let mut flag = 0;
        assert_eq!(vacant_set_contains(s, n, &mut flag), VacantStatus::OutOfRange);
        vacant_set_free(s);
        assert_eq!(vacant_set_sample(g, f64::NAN, 0, &mut s), VacantStatus::InvalidArgument);
        assert_eq!(vacant_set_sample(ptr::null(), 1.0, 0, &mut s), VacantStatus::NullPointer);
        vacant_graph_free(g);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/vacant.h")).unwrap();
    for name in [
        "vacant_last_error",
        "vacant_u_star",
        "vacant_graph_generate",
        "vacant_graph_free",
        "vacant_graph_n",
        "vacant_graph_d",
        "vacant_graph_neighbours",
        "vacant_set_sample",
        "vacant_set_free",
        "vacant_set_contains",
        "vacant_set_count",
        "vacant_set_largest_components",
        "vacant_set_component_size",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name}");
    }
    assert!(header.contains("typedef struct VacantGraph VacantGraph;"));
    assert!(header.contains("VACANT_STATUS_OUT_OF_RANGE = 3"));
}
