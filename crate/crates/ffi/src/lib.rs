//! C ABI for `lmg-core`.
//!
//! Every function returns an [`LmgStatus`] and writes its result through an
//! out-pointer. On failure a description is kept per thread and can be
//! fetched with [`lmg_last_error`]. Finite-N thermal state lives behind the
//! opaque [`LmgEnsemble`] handle, created by [`lmg_ensemble_new`] and released
//! with [`lmg_ensemble_free`].

use lmg_core::limit::{self, Phase, RicciMethod, Variant};
use lmg_core::metric::{self, MetricTensor2};
use lmg_core::spectrum;
use lmg_core::{Error, ModelParams, ThermalEnsemble};
use std::cell::RefCell;
use std::ffi::{c_char, c_int, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    Domain = 3,
    Resource = 4,
    Singular = 5,
    Numeric = 6,
    Panic = 7,
}

pub const LMG_PHASE_ORDERED: c_int = 0;
pub const LMG_PHASE_PARAMAGNETIC: c_int = 1;
pub const LMG_PHASE_BOUNDARY: c_int = 2;

pub const LMG_VARIANT_CORRECTED: c_int = 0;
pub const LMG_VARIANT_PRINTED: c_int = 1;

pub const LMG_RICCI_CHRISTOFFEL: c_int = 0;
pub const LMG_RICCI_ORTHOGONAL: c_int = 1;
pub const LMG_RICCI_PRINTED: c_int = 2;

/// Opaque canonical ensemble at fixed `(N, beta, h)`.
pub struct LmgEnsemble(ThermalEnsemble);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LmgMoments {
    pub mean_h: f64,
    pub var_h: f64,
    pub mean_sz: f64,
    pub var_sz: f64,
    pub cov_h_sz: f64,
}

/// Symmetric 2x2 metric in `(beta, h)` coordinates.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LmgMetric {
    pub g_bb: f64,
    pub g_bh: f64,
    pub g_hh: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LmgPhasePoint {
    pub beta: f64,
    pub h: f64,
    /// One of the `LMG_PHASE_*` constants.
    pub phase: c_int,
    pub mu_xy: f64,
    pub r: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LmgStatus {
    match e {
        Error::InvalidParams(_) => LmgStatus::InvalidParams,
        Error::Domain(_) => LmgStatus::Domain,
        Error::Resource(_) => LmgStatus::Resource,
        Error::Singular { .. } => LmgStatus::Singular,
        Error::Bracket { .. } | Error::Unstable { .. } => LmgStatus::Numeric,
    }
}

/// Runs `f`, writes its value to `out`, and maps errors and panics to codes.
fn guard<T, F>(out: *mut T, f: F) -> LmgStatus
where
    F: FnOnce() -> lmg_core::Result<T>,
{
    if out.is_null() {
        set_error("output pointer is null".into());
        return LmgStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: checked non-null above; the caller guarantees it is valid for writes
            unsafe { out.write(v) };
            LmgStatus::Ok
        }
        Ok(Err(e)) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            LmgStatus::Panic
        }
    }
}

/// [`guard`] for calls on an ensemble handle.
fn with_ensemble<T, F>(e: *const LmgEnsemble, out: *mut T, f: F) -> LmgStatus
where
    F: FnOnce(&ThermalEnsemble) -> lmg_core::Result<T>,
{
    // SAFETY: a non-null handle must come from `lmg_ensemble_new` and not yet be freed
    match unsafe { e.as_ref() } {
        Some(ens) => guard(out, || f(&ens.0)),
        None => {
            set_error("ensemble handle is null".into());
            LmgStatus::NullPointer
        }
    }
}

fn variant(v: c_int) -> lmg_core::Result<Variant> {
    match v {
        LMG_VARIANT_CORRECTED => Ok(Variant::Corrected),
        LMG_VARIANT_PRINTED => Ok(Variant::AsPrinted),
        _ => Err(Error::InvalidParams(format!("unknown variant {v}"))),
    }
}

fn metric_out(g: MetricTensor2) -> LmgMetric {
    LmgMetric { g_bb: g.g_bb, g_bh: g.g_bh, g_hh: g.g_hh }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len` bytes) and returns the full message length, or 0 when
/// no error has been recorded. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn lmg_last_error(buf: *mut c_char, len: usize) -> usize {
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
pub extern "C" fn lmg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds the ensemble for even `n`, `beta > 0` and finite `h`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lmg_ensemble_new(n: u32, beta: f64, h: f64, out: *mut *mut LmgEnsemble) -> LmgStatus {
    guard(out, || {
        let ens = ThermalEnsemble::new(ModelParams::new(n, beta, h)?)?;
        Ok(Box::into_raw(Box::new(LmgEnsemble(ens))))
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `e` must be null or a handle from [`lmg_ensemble_new`] not freed before.
#[no_mangle]
pub unsafe extern "C" fn lmg_ensemble_free(e: *mut LmgEnsemble) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// `ln Z`.
///
/// # Safety
/// `e` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lmg_ensemble_log_partition(e: *const LmgEnsemble, out: *mut f64) -> LmgStatus {
    with_ensemble(e, out, |ens| Ok(ens.log_partition()))
}

/// Free energy per spin `-ln Z / (beta N)`.
///
/// # Safety
/// `e` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lmg_ensemble_free_energy(e: *const LmgEnsemble, out: *mut f64) -> LmgStatus {
    with_ensemble(e, out, |ens| Ok(ens.free_energy_per_spin()))
}

/// # Safety
/// `e` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lmg_ensemble_moments(e: *const LmgEnsemble, out: *mut LmgMoments) -> LmgStatus {
    with_ensemble(e, out, |ens| {
        let m = ens.moments();
        Ok(LmgMoments { mean_h: m.mean_h, var_h: m.var_h, mean_sz: m.mean_sz, var_sz: m.var_sz, cov_h_sz: m.cov_h_sz })
    })
}

/// Fidelity metric from thermal fluctuations.
///
/// # Safety
/// `e` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lmg_ensemble_metric(e: *const LmgEnsemble, out: *mut LmgMetric) -> LmgStatus {
    with_ensemble(e, out, |ens| Ok(metric_out(metric::from_ensemble(ens))))
}

/// Fidelity metric from finite differences of `ln Z`; `step <= 0` selects the default.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lmg_metric_fd(n: u32, beta: f64, h: f64, step: f64, out: *mut LmgMetric) -> LmgStatus {
    guard(out, || {
        let step = if step > 0.0 { step } else { metric::default_fd_step(beta) };
        metric::metric_fd_free_energy(ModelParams::new(n, beta, h)?, step).map(metric_out)
    })
}

/// Level `E_SM` of the sector `s` with magnetic number `m`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lmg_energy_level(n: u32, s: u32, m: i64, h: f64, out: *mut f64) -> LmgStatus {
    guard(out, || spectrum::energy_level(n, s, m, h))
}

/// `ln d_S`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lmg_log_multiplicity(n: u32, s: u32, out: *mut f64) -> LmgStatus {
    guard(out, || spectrum::multiplicity(n, s).map(|d| d.log))
}

/// Phase and order parameter in the thermodynamic limit.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lmg_classify(beta: f64, h: f64, out: *mut LmgPhasePoint) -> LmgStatus {
    guard(out, || {
        let p = limit::classify(beta, h)?;
        let phase = match p.phase {
            Phase::Ordered => LMG_PHASE_ORDERED,
            Phase::Paramagnetic => LMG_PHASE_PARAMAGNETIC,
            Phase::Boundary => LMG_PHASE_BOUNDARY,
        };
        Ok(LmgPhasePoint { beta: p.beta, h: p.h, phase, mu_xy: p.mu_xy, r: p.r })
    })
}

/// Inverse critical temperature at field `h`, `|h| <= 1`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lmg_critical_beta(h: f64, out: *mut f64) -> LmgStatus {
    guard(out, || limit::critical_beta(h))
}

/// Per-spin metric in the thermodynamic limit; `variant` is an `LMG_VARIANT_*` constant.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lmg_limit_metric(beta: f64, h: f64, variant_id: c_int, out: *mut LmgMetric) -> LmgStatus {
    guard(out, || limit::metric_limit(beta, h, variant(variant_id)?).map(|m| metric_out(m.tensor)))
}

/// Coefficient of the reduced one-parameter paramagnetic metric at `hbar = beta h`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lmg_reduced_metric(hbar: f64, variant_id: c_int, out: *mut f64) -> LmgStatus {
    guard(out, || limit::reduced_metric(hbar, variant(variant_id)?).map(|r| r.coefficient))
}

/// Ricci scalar of the limit metric; `method` is an `LMG_RICCI_*` constant.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lmg_ricci_limit(beta: f64, h: f64, method: c_int, out: *mut f64) -> LmgStatus {
    guard(out, || {
        let m = match method {
            LMG_RICCI_CHRISTOFFEL => RicciMethod::ChristoffelFD,
            LMG_RICCI_ORTHOGONAL => RicciMethod::OrthogonalClosedForm,
            LMG_RICCI_PRINTED => RicciMethod::AsPrinted,
            _ => return Err(Error::InvalidParams(format!("unknown Ricci method {method}"))),
        };
        limit::ricci_limit(beta, h, m)
    })
}
