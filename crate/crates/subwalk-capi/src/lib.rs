//! C ABI for the subwalk library.
//!
//! Every constructor hands back an opaque handle that must be released with
//! the matching `_free` function.  Fallible calls return [`SubwalkStatus`];
//! on failure the thread-local message from [`subwalk_last_error_message`]
//! describes what went wrong.  Status codes mirror the command-line exit
//! taxonomy: 0 success, 2 usage/validation errors, 3 numeric/capability
//! failures.
//!
//! Thread safety: handles are immutable after construction and may be shared
//! across threads; the error message is thread-local.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use subwalk::bernstein::PhiSpec;
use subwalk::error::Error;
use subwalk::io::parse_phi;
use subwalk::lattice::{nstep_kernel_spectral, LatticeKernel};
use subwalk::subordination::{weights_quadrature, SubordinationWeights};

/// Result of a fallible call.  Matches the CLI exit-code taxonomy.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubwalkStatus {
    /// The call succeeded.
    SubwalkOk = 0,
    /// Bad arguments: unparsable literal, out-of-range parameter, null or
    /// mis-sized pointer.
    SubwalkErrUsage = 2,
    /// The computation itself failed: unsupported capability, numeric
    /// breakdown, or an internal panic.
    SubwalkErrNumeric = 3,
}

/// Opaque handle to a normalized complete Bernstein function.
pub struct SubwalkPhi(PhiSpec);

/// Opaque handle to a table of one-step subordination weights.
pub struct SubwalkWeights(SubordinationWeights);

/// Opaque handle to an n-step transition kernel on a torus.
pub struct SubwalkKernel(LatticeKernel);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized: String = message.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("nul bytes removed");
    });
}

fn fail(err: &Error) -> SubwalkStatus {
    set_error(&err.to_string());
    match err.exit_code() {
        2 => SubwalkStatus::SubwalkErrUsage,
        _ => SubwalkStatus::SubwalkErrNumeric,
    }
}

fn usage(message: &str) -> SubwalkStatus {
    set_error(message);
    SubwalkStatus::SubwalkErrUsage
}

/// Run a closure, convert panics into a numeric-failure status instead of
/// unwinding across the ABI boundary.
fn guarded(body: impl FnOnce() -> SubwalkStatus) -> SubwalkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            SubwalkStatus::SubwalkErrNumeric
        }
    }
}

/// Message describing the most recent failure on this thread, as a
/// NUL-terminated UTF-8 string.  Empty if no call has failed.  The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn subwalk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

// ---------------------------------------------------------------------------
// Bernstein functions
// ---------------------------------------------------------------------------

/// Parse a Bernstein-function literal (for example `stable:0.5` or
/// `mix:0.3,0.7`) into a handle.  On success writes the new handle to `out`.
///
/// # Safety
/// `literal` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn subwalk_phi_new(
    literal: *const c_char,
    out: *mut *mut SubwalkPhi,
) -> SubwalkStatus {
    guarded(|| {
        if literal.is_null() || out.is_null() {
            return usage("null pointer passed to subwalk_phi_new");
        }
        let text = match unsafe { CStr::from_ptr(literal) }.to_str() {
            Ok(t) => t,
            Err(_) => return usage("literal is not valid UTF-8"),
        };
        match parse_phi(text) {
            Ok(spec) => {
                unsafe { *out = Box::into_raw(Box::new(SubwalkPhi(spec))) };
                SubwalkStatus::SubwalkOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Release a handle returned by [`subwalk_phi_new`].  Null is a no-op.
///
/// # Safety
/// `phi` must be null or a pointer returned by `subwalk_phi_new` that has
/// not been freed already.
#[no_mangle]
pub unsafe extern "C" fn subwalk_phi_free(phi: *mut SubwalkPhi) {
    if !phi.is_null() {
        drop(unsafe { Box::from_raw(phi) });
    }
}

/// Evaluate the normalized function at `lambda >= 0`.
///
/// # Safety
/// `phi` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn subwalk_phi_eval(
    phi: *const SubwalkPhi,
    lambda: f64,
    out: *mut f64,
) -> SubwalkStatus {
    guarded(|| {
        let (Some(phi), false) = (unsafe { phi.as_ref() }, out.is_null()) else {
            return usage("null pointer passed to subwalk_phi_eval");
        };
        match phi.0.eval(lambda) {
            Ok(v) => {
                unsafe { *out = v };
                SubwalkStatus::SubwalkOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Invert the normalized function: find `lambda` with `phi(lambda) = y` for
/// `y` in (0, phi(inf)).
///
/// # Safety
/// `phi` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn subwalk_phi_invert(
    phi: *const SubwalkPhi,
    y: f64,
    out: *mut f64,
) -> SubwalkStatus {
    guarded(|| {
        let (Some(phi), false) = (unsafe { phi.as_ref() }, out.is_null()) else {
            return usage("null pointer passed to subwalk_phi_invert");
        };
        match phi.0.invert(y) {
            Ok(v) => {
                unsafe { *out = v };
                SubwalkStatus::SubwalkOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Evaluate the Lévy density of the subordinator at `t > 0`.  Kinds without
/// a tractable density return the capability status (3).
///
/// # Safety
/// `phi` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn subwalk_phi_levy_density(
    phi: *const SubwalkPhi,
    t: f64,
    out: *mut f64,
) -> SubwalkStatus {
    guarded(|| {
        let (Some(phi), false) = (unsafe { phi.as_ref() }, out.is_null()) else {
            return usage("null pointer passed to subwalk_phi_levy_density");
        };
        match phi.0.levy_density(t) {
            Ok(v) => {
                unsafe { *out = v };
                SubwalkStatus::SubwalkOk
            }
            Err(e) => fail(&e),
        }
    })
}

// ---------------------------------------------------------------------------
// Subordination weights
// ---------------------------------------------------------------------------

/// Build the one-step weight table by Lévy-measure quadrature, truncated so
/// the tail mass is at most `tol` (must lie in (0, 1e-3]).
///
/// # Safety
/// `phi` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn subwalk_weights_new(
    phi: *const SubwalkPhi,
    tol: f64,
    out: *mut *mut SubwalkWeights,
) -> SubwalkStatus {
    guarded(|| {
        let (Some(phi), false) = (unsafe { phi.as_ref() }, out.is_null()) else {
            return usage("null pointer passed to subwalk_weights_new");
        };
        match weights_quadrature(&phi.0, tol) {
            Ok(w) => {
                unsafe { *out = Box::into_raw(Box::new(SubwalkWeights(w))) };
                SubwalkStatus::SubwalkOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Number of stored weights.  A null handle has length 0.
///
/// # Safety
/// `weights` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn subwalk_weights_len(weights: *const SubwalkWeights) -> usize {
    unsafe { weights.as_ref() }.map_or(0, |w| w.0.weights.len())
}

/// Fetch the weight of order `m` (1-based: `m = 1` is the single-step
/// weight).  Out-of-range orders are usage errors.
///
/// # Safety
/// `weights` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn subwalk_weights_get(
    weights: *const SubwalkWeights,
    m: usize,
    out: *mut f64,
) -> SubwalkStatus {
    guarded(|| {
        let (Some(w), false) = (unsafe { weights.as_ref() }, out.is_null()) else {
            return usage("null pointer passed to subwalk_weights_get");
        };
        if m == 0 || m > w.0.weights.len() {
            return usage("weight order out of range (orders are 1-based)");
        }
        unsafe { *out = w.0.weights[m - 1] };
        SubwalkStatus::SubwalkOk
    })
}

/// Mass beyond the truncation, computed independently of the stored entries.
/// A null handle reports NaN.
///
/// # Safety
/// `weights` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn subwalk_weights_tail(weights: *const SubwalkWeights) -> f64 {
    unsafe { weights.as_ref() }.map_or(f64::NAN, |w| w.0.tail_mass)
}

/// Release a handle returned by [`subwalk_weights_new`].  Null is a no-op.
///
/// # Safety
/// `weights` must be null or a pointer returned by `subwalk_weights_new`
/// that has not been freed already.
#[no_mangle]
pub unsafe extern "C" fn subwalk_weights_free(weights: *mut SubwalkWeights) {
    if !weights.is_null() {
        drop(unsafe { Box::from_raw(weights) });
    }
}

// ---------------------------------------------------------------------------
// Transition kernels
// ---------------------------------------------------------------------------

/// Compute the n-step kernel by the spectral route on a torus of side
/// `grid` (a power of two; pass 0 to size it from the radius).  The window
/// half-width `radius` must satisfy `radius < grid / 2`.
///
/// # Safety
/// `phi` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn subwalk_kernel_spectral(
    phi: *const SubwalkPhi,
    d: usize,
    n: u64,
    radius: i64,
    grid: usize,
    out: *mut *mut SubwalkKernel,
) -> SubwalkStatus {
    guarded(|| {
        let (Some(phi), false) = (unsafe { phi.as_ref() }, out.is_null()) else {
            return usage("null pointer passed to subwalk_kernel_spectral");
        };
        let grid = if grid == 0 { None } else { Some(grid) };
        match nstep_kernel_spectral(&phi.0, d, n, radius, grid) {
            Ok(k) => {
                unsafe { *out = Box::into_raw(Box::new(SubwalkKernel(k))) };
                SubwalkStatus::SubwalkOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Read the kernel mass at lattice point `x` (an array of `len`
/// coordinates, where `len` must equal the kernel dimension).  Coordinates
/// are wrapped onto the torus.
///
/// # Safety
/// `kernel` must be a live handle, `x` must point to `len` readable
/// coordinates, and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn subwalk_kernel_value(
    kernel: *const SubwalkKernel,
    x: *const i64,
    len: usize,
    out: *mut f64,
) -> SubwalkStatus {
    guarded(|| {
        let (Some(k), false, false) =
            (unsafe { kernel.as_ref() }, x.is_null(), out.is_null())
        else {
            return usage("null pointer passed to subwalk_kernel_value");
        };
        if len != k.0.d {
            return usage("coordinate count does not match the kernel dimension");
        }
        let coords = unsafe { std::slice::from_raw_parts(x, len) };
        unsafe { *out = k.0.value(coords) };
        SubwalkStatus::SubwalkOk
    })
}

/// Certified upper bound on the kernel's lost mass (truncation defect).  A
/// null handle reports NaN.
///
/// # Safety
/// `kernel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn subwalk_kernel_mass_defect(kernel: *const SubwalkKernel) -> f64 {
    unsafe { kernel.as_ref() }.map_or(f64::NAN, |k| k.0.mass_defect)
}

/// Number of steps the kernel represents.  A null handle reports 0.
///
/// # Safety
/// `kernel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn subwalk_kernel_steps(kernel: *const SubwalkKernel) -> u64 {
    unsafe { kernel.as_ref() }
        .and_then(|k| k.0.steps())
        .unwrap_or(0)
}

/// Release a handle returned by [`subwalk_kernel_spectral`].  Null is a
/// no-op.
///
/// # Safety
/// `kernel` must be null or a pointer returned by `subwalk_kernel_spectral`
/// that has not been freed already.
#[no_mangle]
pub unsafe extern "C" fn subwalk_kernel_free(kernel: *mut SubwalkKernel) {
    if !kernel.is_null() {
        drop(unsafe { Box::from_raw(kernel) });
    }
}
