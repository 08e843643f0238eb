//! C ABI for qtraj.
//!
//! Objects are opaque handles created by `*_new`/`*_run` and released with the
//! matching `*_free`. Every fallible function returns a [`QtrajStatus`]; on
//! failure a message is kept per thread and can be read with
//! [`qtraj_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qtraj::ensemble::slice_values;
use qtraj::wavefield::{self, UnitSystem};
use qtraj::{
    run_ensemble, DoubleSlitParams, EnsembleConfig, EnsembleResult, InitialCondition, IntegrationSchedule,
    Observable, QtrajError, Theory,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QtrajStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NodeSingularity = 3,
    SliceOutOfRange = 4,
    BufferTooSmall = 5,
    Io = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QtrajTheory {
    Dbb = 0,
    Revised = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QtrajObservable {
    Position = 0,
    Momentum = 1,
}

/// Slit geometry and units.
pub struct QtrajParams {
    inner: DoubleSlitParams,
}

/// A completed trajectory ensemble.
pub struct QtrajEnsemble {
    inner: EnsembleResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: QtrajStatus, message: impl Into<String>) -> QtrajStatus {
    set_error(message.into());
    status
}

fn from_error(err: QtrajError) -> QtrajStatus {
    let status = match err {
        QtrajError::NodeSingularity { .. } => QtrajStatus::NodeSingularity,
        QtrajError::SliceOutOfRange { .. } => QtrajStatus::SliceOutOfRange,
        QtrajError::Config { .. } => QtrajStatus::InvalidArgument,
        QtrajError::Io { .. } => QtrajStatus::Io,
        QtrajError::EnvelopeViolation { .. } => QtrajStatus::Internal,
    };
    fail(status, err.to_string())
}

fn guarded(body: impl FnOnce() -> QtrajStatus) -> QtrajStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(QtrajStatus::Internal, "panic inside qtraj"),
    }
}

/// # Safety
/// `ptr` must be null or point to a live `T`.
unsafe fn borrow<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, QtrajStatus> {
    ptr.as_ref()
        .ok_or_else(|| fail(QtrajStatus::NullPointer, format!("{what} is null")))
}

/// # Safety
/// `ptr` must be null or valid for a write of `T`.
unsafe fn store<T>(ptr: *mut T, value: T, what: &str) -> QtrajStatus {
    if ptr.is_null() {
        return fail(QtrajStatus::NullPointer, format!("{what} is null"));
    }
    ptr.write(value);
    QtrajStatus::Ok
}

fn theory(t: QtrajTheory) -> Theory {
    match t {
        QtrajTheory::Dbb => Theory::Dbb,
        QtrajTheory::Revised => Theory::Revised,
    }
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL,
/// or 0 if there is no message.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn qtraj_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qtraj_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Create parameters: half slit separation and packet width in nm, mass in
/// electron masses.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qtraj_params_new(
    x_half_nm: f64,
    sigma_nm: f64,
    mass_me: f64,
    out: *mut *mut QtrajParams,
) -> QtrajStatus {
    guarded(|| {
        let made = UnitSystem::with_mass(mass_me).and_then(|u| DoubleSlitParams::new(x_half_nm, sigma_nm, u));
        match made {
            Ok(inner) => store(out, Box::into_raw(Box::new(QtrajParams { inner })), "out"),
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `params` must be null or a handle from `qtraj_params_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qtraj_params_free(params: *mut QtrajParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// ψ(x, t) as real and imaginary parts.
///
/// # Safety
/// `params` must be a live handle; `re` and `im` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qtraj_psi(
    params: *const QtrajParams,
    x: f64,
    t: f64,
    re: *mut f64,
    im: *mut f64,
) -> QtrajStatus {
    guarded(|| {
        let p = match borrow(params, "params") {
            Ok(p) => &p.inner,
            Err(s) => return s,
        };
        if re.is_null() || im.is_null() {
            return fail(QtrajStatus::NullPointer, "output pointer is null");
        }
        let z = wavefield::psi(x, t, p);
        re.write(z.re);
        im.write(z.im);
        QtrajStatus::Ok
    })
}

/// |ψ(x, t)|².
///
/// # Safety
/// `params` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qtraj_rho(params: *const QtrajParams, x: f64, t: f64, out: *mut f64) -> QtrajStatus {
    guarded(|| match borrow(params, "params") {
        Ok(p) => store(out, wavefield::rho(x, t, &p.inner), "out"),
        Err(s) => s,
    })
}

/// de Broglie–Bohm momentum field.
///
/// # Safety
/// `params` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qtraj_p_bb(params: *const QtrajParams, x: f64, t: f64, out: *mut f64) -> QtrajStatus {
    guarded(|| match borrow(params, "params") {
        Ok(p) => match wavefield::p_bb(x, t, &p.inner) {
            Ok(v) => store(out, v, "out"),
            Err(e) => from_error(e),
        },
        Err(s) => s,
    })
}

/// Revised momentum field anchored at (x0, t0) with momentum p0.
///
/// # Safety
/// `params` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qtraj_p_revised(
    params: *const QtrajParams,
    x: f64,
    t: f64,
    x0: f64,
    p0: f64,
    t0: f64,
    out: *mut f64,
) -> QtrajStatus {
    guarded(|| {
        let p = match borrow(params, "params") {
            Ok(p) => &p.inner,
            Err(s) => return s,
        };
        let ic = InitialCondition { x0, p0, t0, theory: Theory::Revised };
        match wavefield::p_revised(x, t, &ic, p) {
            Ok(v) => store(out, v, "out"),
            Err(e) => from_error(e),
        }
    })
}

/// Momentum-space density of the initial superposition.
///
/// # Safety
/// `params` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qtraj_momentum_density(params: *const QtrajParams, p: f64, out: *mut f64) -> QtrajStatus {
    guarded(|| match borrow(params, "params") {
        Ok(h) => store(out, wavefield::momentum_density(p, &h.inner), "out"),
        Err(s) => s,
    })
}

/// Integrate `n_traj` trajectories from t = 0 to `t_final_ps` with base step
/// `dt_ps`. Other settings take their library defaults.
///
/// # Safety
/// `params` must be a live handle; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qtraj_ensemble_run(
    params: *const QtrajParams,
    theory_kind: QtrajTheory,
    n_traj: usize,
    seed: u64,
    t_final_ps: f64,
    dt_ps: f64,
    out: *mut *mut QtrajEnsemble,
) -> QtrajStatus {
    guarded(|| {
        let p = match borrow(params, "params") {
            Ok(p) => &p.inner,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(QtrajStatus::NullPointer, "out is null");
        }
        let mut config = EnsembleConfig::defaults(p);
        config.n_traj = n_traj;
        config.theory = theory(theory_kind);
        config.master_seed = seed;
        config.schedule = IntegrationSchedule::for_params(p, 0.0, t_final_ps, dt_ps);
        config.slice_times = vec![0.0, t_final_ps];
        match run_ensemble(&config, p) {
            Ok(inner) => store(out, Box::into_raw(Box::new(QtrajEnsemble { inner })), "out"),
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `ensemble` must be null or a handle from `qtraj_ensemble_run` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qtraj_ensemble_free(ensemble: *mut QtrajEnsemble) {
    if !ensemble.is_null() {
        drop(Box::from_raw(ensemble));
    }
}

/// Number of trajectories.
///
/// # Safety
/// `ensemble` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qtraj_ensemble_len(ensemble: *const QtrajEnsemble, out: *mut usize) -> QtrajStatus {
    guarded(|| match borrow(ensemble, "ensemble") {
        Ok(e) => store(out, e.inner.trajectories.len(), "out"),
        Err(s) => s,
    })
}

/// Trajectories that completed, left the domain, or stalled.
///
/// # Safety
/// `ensemble` must be a live handle; the outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qtraj_ensemble_status_counts(
    ensemble: *const QtrajEnsemble,
    completed: *mut usize,
    exited_domain: *mut usize,
    node_stalled: *mut usize,
) -> QtrajStatus {
    guarded(|| {
        let e = match borrow(ensemble, "ensemble") {
            Ok(e) => e,
            Err(s) => return s,
        };
        if completed.is_null() || exited_domain.is_null() || node_stalled.is_null() {
            return fail(QtrajStatus::NullPointer, "output pointer is null");
        }
        let c = e.inner.status_counts();
        completed.write(c.completed);
        exited_domain.write(c.exited_domain);
        node_stalled.write(c.node_stalled);
        QtrajStatus::Ok
    })
}

/// Observable values of all contributing trajectories at time `t`.
///
/// `*len` receives the number of values. If it exceeds `capacity`, nothing is
/// copied and `BufferTooSmall` is returned; `values` may be null to query the
/// size.
///
/// # Safety
/// `ensemble` must be a live handle; `values` null or valid for `capacity`
/// doubles; `len` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qtraj_ensemble_slice(
    ensemble: *const QtrajEnsemble,
    t: f64,
    observable: QtrajObservable,
    values: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> QtrajStatus {
    guarded(|| {
        let e = match borrow(ensemble, "ensemble") {
            Ok(e) => e,
            Err(s) => return s,
        };
        if len.is_null() {
            return fail(QtrajStatus::NullPointer, "len is null");
        }
        let obs = match observable {
            QtrajObservable::Position => Observable::Position,
            QtrajObservable::Momentum => Observable::Momentum,
        };
        let slice = match slice_values(&e.inner, t, obs) {
            Ok(s) => s,
            Err(err) => return from_error(err),
        };
        len.write(slice.values.len());
        if slice.values.len() > capacity || (values.is_null() && !slice.values.is_empty()) {
            return fail(
                QtrajStatus::BufferTooSmall,
                format!("slice holds {} values, buffer {capacity}", slice.values.len()),
            );
        }
        if !slice.values.is_empty() {
            ptr::copy_nonoverlapping(slice.values.as_ptr(), values, slice.values.len());
        }
        QtrajStatus::Ok
    })
}
