//! C ABI for graphflux.
//!
//! Handles are opaque pointers created by `gf_*_from_*` / `gf_solve` and
//! released with the matching `gf_*_free`. Every fallible call returns a
//! [`GfStatus`]; on failure [`gf_last_error_message`] describes the cause.
//! Status codes 2–5 match the CLI exit codes.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use graphflux::io::netfile::{parse_network, parse_network_str, LoadedNetwork};
use graphflux::io::InputError;
use graphflux::lp::{SolverOptions, Verdict};
use graphflux::pipeline::{run_pipeline, BoxBounds, GaugePolicy, PipelineError, PipelineRun, RunConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfStatus {
    Ok = 0,
    Internal = 1,
    Infeasible = 2,
    Unbounded = 3,
    InvalidInput = 4,
    Unanchored = 5,
    NullPointer = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfVerdict {
    Compact = 0,
    Bounded = 1,
    BoundedBelow = 2,
    DescentRayFound = 3,
    Inconclusive = 4,
}

/// Run parameters. Obtain defaults from [`gf_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfConfig {
    pub phi_max: f64,
    pub eps: f64,
    /// Nonzero: fix one node per unanchored component at `gauge_value`.
    pub gauge_auto: i32,
    pub gauge_value: f64,
    /// Nonzero: apply `[lower, upper]` to every control.
    pub has_bounds: i32,
    pub lower: f64,
    pub upper: f64,
    pub tol_feas: f64,
    pub tol_opt: f64,
}

/// Scalar validation metrics. Extrema over empty node sets are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfDiagnostics {
    pub objective: f64,
    pub iterations: u64,
    pub max_phi_in: f64,
    pub min_phi_out: f64,
    pub max_edge_sign_violation: f64,
    pub global_conservation: f64,
    pub max_interior_abs_phi: f64,
    pub amount_in: f64,
    pub amount_out: f64,
    pub in_out_mismatch: f64,
    pub max_component_balance: f64,
    pub verdict: GfVerdict,
}

pub struct GfNetwork {
    loaded: LoadedNetwork,
}

pub struct GfResult {
    run: PipelineRun,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

type Failure = (GfStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            GfStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            GfStatus::Panic
        }
    }
}

fn null() -> Failure {
    (GfStatus::NullPointer, "null pointer argument".into())
}

unsafe fn c_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| (GfStatus::InvalidInput, "string is not UTF-8".into()))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

fn input_failure(e: InputError) -> Failure {
    (GfStatus::InvalidInput, e.to_string())
}

fn pipeline_failure(e: PipelineError) -> Failure {
    let status = match e.exit_code() {
        2 => GfStatus::Infeasible,
        3 => GfStatus::Unbounded,
        4 => GfStatus::InvalidInput,
        5 => GfStatus::Unanchored,
        _ => GfStatus::Internal,
    };
    (status, e.to_string())
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

#[no_mangle]
pub extern "C" fn gf_config_default() -> GfConfig {
    let s = SolverOptions::default();
    GfConfig {
        phi_max: 1.0,
        eps: 0.0,
        gauge_auto: 1,
        gauge_value: graphflux::pipeline::DEFAULT_GAUGE_VALUE,
        has_bounds: 0,
        lower: 0.0,
        upper: 0.0,
        tol_feas: s.tol_feas,
        tol_opt: s.tol_opt,
    }
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next `gf_*` call on the same thread.
#[no_mangle]
pub extern "C" fn gf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a network JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_network_from_json(json: *const c_char, out: *mut *mut GfNetwork) -> GfStatus {
    guard(|| {
        let text = c_str(json)?;
        let loaded = parse_network_str(text).map_err(input_failure)?;
        store(out, GfNetwork { loaded })
    })
}

/// Reads and parses a network file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_network_from_path(path: *const c_char, out: *mut *mut GfNetwork) -> GfStatus {
    guard(|| {
        let path = c_str(path)?;
        let loaded = parse_network(path).map_err(input_failure)?;
        store(out, GfNetwork { loaded })
    })
}

/// # Safety
/// `net` must come from `gf_network_from_*` and not be freed twice; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gf_network_free(net: *mut GfNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// # Safety
/// `net` must be a live handle; `nodes` and `edges` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_network_size(net: *const GfNetwork, nodes: *mut usize, edges: *mut usize) -> GfStatus {
    guard(|| {
        let n = &deref(net)?.loaded.network;
        if nodes.is_null() || edges.is_null() {
            return Err(null());
        }
        *nodes = n.n_nodes();
        *edges = n.n_edges();
        Ok(())
    })
}

/// Fixes the potential of the node with external id `id`.
///
/// # Safety
/// `net` must be a live handle; `id` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gf_network_set_fixed(net: *mut GfNetwork, id: *const c_char, value: f64) -> GfStatus {
    guard(|| {
        let net = net.as_mut().ok_or_else(null)?;
        let id = c_str(id)?;
        let v = net.loaded.index_of(id).ok_or((GfStatus::InvalidInput, format!("unknown node id {id:?}")))?;
        if !value.is_finite() {
            return Err((GfStatus::InvalidInput, "fixed potential must be finite".into()));
        }
        net.loaded.boundary.fixed.insert(v, value);
        Ok(())
    })
}

fn to_run_config(c: &GfConfig) -> RunConfig {
    RunConfig {
        phi_max: c.phi_max,
        eps: c.eps,
        gauge: if c.gauge_auto != 0 { GaugePolicy::AutoFix { value: c.gauge_value } } else { GaugePolicy::Error },
        bounds: if c.has_bounds != 0 {
            BoxBounds::Global { lower: c.lower, upper: c.upper }
        } else {
            BoxBounds::None
        },
        solver: SolverOptions { tol_feas: c.tol_feas, tol_opt: c.tol_opt, max_iterations: None },
        ..RunConfig::default()
    }
}

/// Runs the full pipeline. A null `config` uses the defaults.
///
/// # Safety
/// `net` must be a live handle, `config` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_solve(net: *const GfNetwork, config: *const GfConfig, out: *mut *mut GfResult) -> GfStatus {
    guard(|| {
        let net = deref(net)?;
        let cfg = config.as_ref().copied().unwrap_or_else(|| gf_config_default());
        let loaded = &net.loaded;
        let run = run_pipeline(&to_run_config(&cfg), &loaded.network, &loaded.boundary).map_err(pipeline_failure)?;
        store(out, GfResult { run })
    })
}

/// # Safety
/// `res` must come from `gf_solve` and not be freed twice; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gf_result_free(res: *mut GfResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfField {
    /// Optimal control vector `g`, one entry per control node (ascending node index).
    Controls = 0,
    /// Node potentials `u`.
    Potentials = 1,
    /// Signed edge fluxes `q`.
    Fluxes = 2,
    /// Nodal balances `Φ`.
    Balances = 3,
}

/// Copies a result vector into `buf`. `len_out` always receives the full
/// length; when `buf_len` is too small nothing is copied and
/// `BufferTooSmall` is returned. Pass `buf = NULL` to query the length.
///
/// # Safety
/// `res` must be a live handle, `buf` valid for `buf_len` writes or null,
/// `len_out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_result_copy(
    res: *const GfResult,
    field: GfField,
    buf: *mut f64,
    buf_len: usize,
    len_out: *mut usize,
) -> GfStatus {
    guard(|| {
        let s = &deref(res)?.run.state;
        if len_out.is_null() {
            return Err(null());
        }
        let v = match field {
            GfField::Controls => &s.g_opt,
            GfField::Potentials => &s.u,
            GfField::Fluxes => &s.q,
            GfField::Balances => &s.phi,
        };
        *len_out = v.len();
        if buf.is_null() {
            return if buf_len == 0 { Ok(()) } else { Err(null()) };
        }
        if buf_len < v.len() {
            return Err((GfStatus::BufferTooSmall, format!("need {} entries, got {buf_len}", v.len())));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        Ok(())
    })
}

/// # Safety
/// `res` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_result_diagnostics(res: *const GfResult, out: *mut GfDiagnostics) -> GfStatus {
    guard(|| {
        let run = &deref(res)?.run;
        if out.is_null() {
            return Err(null());
        }
        let r = &run.report;
        *out = GfDiagnostics {
            objective: run.solution.objective,
            iterations: run.solution.iterations as u64,
            max_phi_in: r.max_phi_in.unwrap_or(f64::NAN),
            min_phi_out: r.min_phi_out.unwrap_or(f64::NAN),
            max_edge_sign_violation: r.max_edge_sign_violation,
            global_conservation: r.global_conservation,
            max_interior_abs_phi: r.max_interior_abs_phi,
            amount_in: r.amount_in,
            amount_out: r.amount_out,
            in_out_mismatch: r.in_out_mismatch,
            max_component_balance: r.max_component_balance,
            verdict: match run.boundedness.verdict {
                Verdict::Compact => GfVerdict::Compact,
                Verdict::Bounded => GfVerdict::Bounded,
                Verdict::BoundedBelow => GfVerdict::BoundedBelow,
                Verdict::DescentRayFound => GfVerdict::DescentRayFound,
                Verdict::Inconclusive => GfVerdict::Inconclusive,
            },
        };
        Ok(())
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
