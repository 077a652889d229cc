//! C interface to random regular graphs and the vacant sets of walks on them.
//!
//! Handles are opaque and owned by the caller once returned. Every fallible
//! call returns a [`VacantStatus`]; the message of the last failure on the
//! calling thread is available from [`vacant_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vacant::graph::{generate_random_regular, RegularGraph};
use vacant::vacancy::{components, ComponentSummary};
use vacant::walk::{sample_walk, vacant_set, Start, VacantConfig};
use vacant::{interlace, rng};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VacantStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Panic = 4,
}

/// A simple d-regular graph on n vertices.
pub struct VacantGraph {
    inner: RegularGraph,
}

/// The vacant set of one walk at one intensity, with its components.
pub struct VacantSet {
    config: VacantConfig,
    summary: ComponentSummary,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: VacantStatus, msg: impl ToString) -> VacantStatus {
    let text = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
    status
}

fn guard(f: impl FnOnce() -> VacantStatus) -> VacantStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(VacantStatus::Panic, "internal panic"))
}

/// Message of the last failed call on this thread, or null if none failed.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn vacant_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Critical intensity of random interlacements on the d-regular tree.
///
/// # Safety
/// `out` must be null or point to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn vacant_u_star(d: usize, out: *mut f64) -> VacantStatus {
    guard(|| {
        if out.is_null() {
            return fail(VacantStatus::NullPointer, "out is null");
        }
        match interlace::u_star(d) {
            Ok(u) => {
                *out = u;
                VacantStatus::Ok
            }
            Err(e) => fail(VacantStatus::InvalidArgument, e),
        }
    })
}

/// Samples a uniform random d-regular graph on n vertices.
///
/// # Safety
/// `out` must be null or point to writable memory for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn vacant_graph_generate(n: usize, d: usize, seed: u64, out: *mut *mut VacantGraph) -> VacantStatus {
    guard(|| {
        if out.is_null() {
            return fail(VacantStatus::NullPointer, "out is null");
        }
        match generate_random_regular(n, d, seed) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(VacantGraph { inner: g }));
                VacantStatus::Ok
            }
            Err(e) => fail(VacantStatus::InvalidArgument, e),
        }
    })
}

/// # Safety
/// `g` must be null or a handle from [`vacant_graph_generate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vacant_graph_free(g: *mut VacantGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn vacant_graph_n(g: *const VacantGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.n())
}

/// Degree, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn vacant_graph_d(g: *const VacantGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.d())
}

/// Copies the d neighbours of `x` into `buf`, which must hold at least `len` entries.
///
/// # Safety
/// `g` must be a live graph handle and `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn vacant_graph_neighbours(g: *const VacantGraph, x: usize, buf: *mut usize, len: usize) -> VacantStatus {
    guard(|| {
        let Some(g) = g.as_ref() else { return fail(VacantStatus::NullPointer, "graph is null") };
        if buf.is_null() {
            return fail(VacantStatus::NullPointer, "buf is null");
        }
        if x >= g.inner.n() {
            return fail(VacantStatus::OutOfRange, format!("vertex {x} outside 0..{}", g.inner.n()));
        }
        let nb = g.inner.neighbours(x);
        if len < nb.len() {
            return fail(VacantStatus::InvalidArgument, format!("buffer holds {len}, need {}", nb.len()));
        }
        ptr::copy_nonoverlapping(nb.as_ptr(), buf, nb.len());
        VacantStatus::Ok
    })
}

/// Runs a stationary walk for time `u·n` and returns the vertices it never visited.
///
/// # Safety
/// `g` must be a live graph handle and `out` must be writable for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn vacant_set_sample(g: *const VacantGraph, u: f64, seed: u64, out: *mut *mut VacantSet) -> VacantStatus {
    guard(|| {
        let Some(g) = g.as_ref() else { return fail(VacantStatus::NullPointer, "graph is null") };
        if out.is_null() {
            return fail(VacantStatus::NullPointer, "out is null");
        }
        if !(u.is_finite() && u >= 0.0) {
            return fail(VacantStatus::InvalidArgument, format!("intensity {u} must be finite and non-negative"));
        }
        let g = &g.inner;
        let walk = sample_walk(g, Start::Stationary, u * g.n() as f64, &mut rng::stream(seed, 1));
        let config = match vacant_set(g, &walk, u) {
            Ok(c) => c,
            Err(e) => return fail(VacantStatus::InvalidArgument, e),
        };
        match components(g, &config) {
            Ok(summary) => {
                *out = Box::into_raw(Box::new(VacantSet { config, summary }));
                VacantStatus::Ok
            }
            Err(e) => fail(VacantStatus::InvalidArgument, e),
        }
    })
}

/// # Safety
/// `s` must be null or a handle from [`vacant_set_sample`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vacant_set_free(s: *mut VacantSet) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Writes 1 to `out` if `x` is vacant and 0 otherwise.
///
/// # Safety
/// `s` must be a live vacant-set handle and `out` writable for one `int`.
#[no_mangle]
pub unsafe extern "C" fn vacant_set_contains(s: *const VacantSet, x: usize, out: *mut i32) -> VacantStatus {
    guard(|| {
        let Some(s) = s.as_ref() else { return fail(VacantStatus::NullPointer, "set is null") };
        if out.is_null() {
            return fail(VacantStatus::NullPointer, "out is null");
        }
        if x >= s.config.n() {
            return fail(VacantStatus::OutOfRange, format!("vertex {x} outside 0..{}", s.config.n()));
        }
        *out = s.config.is_vacant(x) as i32;
        VacantStatus::Ok
    })
}

/// Number of vacant vertices, or 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live vacant-set handle.
#[no_mangle]
pub unsafe extern "C" fn vacant_set_count(s: *const VacantSet) -> usize {
    s.as_ref().map_or(0, |s| s.summary.vacant_count())
}

/// Sizes of the largest and second-largest vacant components.
///
/// # Safety
/// `s` must be a live vacant-set handle; each output must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn vacant_set_largest_components(s: *const VacantSet, c_max: *mut usize, c_sec: *mut usize) -> VacantStatus {
    guard(|| {
        let Some(s) = s.as_ref() else { return fail(VacantStatus::NullPointer, "set is null") };
        if let Some(out) = c_max.as_mut() {
            *out = s.summary.c_max_size;
        }
        if let Some(out) = c_sec.as_mut() {
            *out = s.summary.c_sec_size;
        }
        VacantStatus::Ok
    })
}

/// Size of the vacant component containing `x`, 0 when `x` was visited.
///
/// # Safety
/// `s` must be a live vacant-set handle and `out` writable for one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn vacant_set_component_size(s: *const VacantSet, x: usize, out: *mut usize) -> VacantStatus {
    guard(|| {
        let Some(s) = s.as_ref() else { return fail(VacantStatus::NullPointer, "set is null") };
        if out.is_null() {
            return fail(VacantStatus::NullPointer, "out is null");
        }
        if x >= s.config.n() {
            return fail(VacantStatus::OutOfRange, format!("vertex {x} outside 0..{}", s.config.n()));
        }
        *out = s.summary.size_of(x);
        VacantStatus::Ok
    })
}
