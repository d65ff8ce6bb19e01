//! C ABI over `zapmmv`.
//!
//! Matrices and results are opaque heap handles released with their `_free`
//! function. Every fallible call returns a [`ZapStatus`]; on failure a
//! human-readable message is available from [`zap_last_error_message`] on the
//! same thread. Output pointers are only written on success. Panics are
//! caught at the boundary and reported as `ZAP_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use zapmmv::linalg::io::{load_matrix, save_matrix};
use zapmmv::problem::{generate, ProblemSize};
use zapmmv::{somp_solve, zap_solve, DenseMatrix, Error, SolveResult, SompResult, StopReason};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidShape = 2,
    NonFinite = 3,
    DimensionMismatch = 4,
    NotUnderdetermined = 5,
    SingularGram = 6,
    NumericalDivergence = 7,
    DegenerateSupport = 8,
    ZeroColumn = 9,
    InvalidParameter = 10,
    Parse = 11,
    Io = 12,
    BufferTooSmall = 13,
    Other = 14,
    Panic = 15,
}

impl From<&Error> for ZapStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } => ZapStatus::DimensionMismatch,
            Error::InvalidShape { .. } => ZapStatus::InvalidShape,
            Error::NonFinite { .. } => ZapStatus::NonFinite,
            Error::NotUnderdetermined { .. } => ZapStatus::NotUnderdetermined,
            Error::SingularGram { .. } => ZapStatus::SingularGram,
            Error::NumericalDivergence { .. } => ZapStatus::NumericalDivergence,
            Error::DegenerateSupport { .. } => ZapStatus::DegenerateSupport,
            Error::ZeroColumn { .. } => ZapStatus::ZeroColumn,
            Error::InvalidParameter(_) => ZapStatus::InvalidParameter,
            Error::Parse(_) => ZapStatus::Parse,
            Error::Io(_) => ZapStatus::Io,
            _ => ZapStatus::Other,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZapStopReason {
    StepSizeFloor = 0,
    IterationBudget = 1,
}

/// Selects a per-iteration trace of a ZAP solve.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZapTrace {
    Penalty = 0,
    Kappa = 1,
    Feasibility = 2,
}

/// ZAP iteration parameters. Obtain defaults from [`zap_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZapSolverConfig {
    pub alpha: f64,
    pub kappa0: f64,
    pub eta: f64,
    pub q: usize,
    pub kappa_min: f64,
    pub t_max: usize,
}

impl From<ZapSolverConfig> for zapmmv::ZapConfig {
    fn from(c: ZapSolverConfig) -> Self {
        Self {
            alpha: c.alpha,
            kappa0: c.kappa0,
            eta: c.eta,
            q: c.q,
            kappa_min: c.kappa_min,
            t_max: c.t_max,
        }
    }
}

/// Dense row-major matrix.
pub struct ZapMatrix(DenseMatrix);

pub struct ZapSolveResult(SolveResult);

pub struct ZapSompResult(SompResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(ZapStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(ZapStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ZapStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ZapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(String::new());
            ZapStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            ZapStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn path_arg(p: *const c_char) -> Result<String, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Failure(ZapStatus::InvalidParameter, "path is not valid UTF-8".into()))
}

unsafe fn copy_out<T: Copy>(src: &[T], out: *mut T, len: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output buffer"));
    }
    if len < src.len() {
        return Err(Failure(
            ZapStatus::BufferTooSmall,
            format!("buffer holds {len} elements, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

/// Message for the most recent failure on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn zap_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn zap_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn zap_config_default() -> ZapSolverConfig {
    let d = zapmmv::ZapConfig::default();
    ZapSolverConfig {
        alpha: d.alpha,
        kappa0: d.kappa0,
        eta: d.eta,
        q: d.q,
        kappa_min: d.kappa_min,
        t_max: d.t_max,
    }
}

/// Copies `rows * cols` row-major values into a new matrix.
///
/// # Safety
/// `data` must point to `rows * cols` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zap_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut ZapMatrix,
) -> ZapStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Failure(ZapStatus::InvalidShape, "rows * cols overflows".into()))?;
        let values = std::slice::from_raw_parts(data, len).to_vec();
        emit(out, ZapMatrix(DenseMatrix::new(rows, cols, values)?))
    })
}

/// # Safety
/// `m` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn zap_matrix_free(m: *mut ZapMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Row count, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn zap_matrix_rows(m: *const ZapMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.rows())
}

/// Column count, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn zap_matrix_cols(m: *const ZapMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.cols())
}

/// Writes the row-major entries into `out`, which holds `len` doubles.
///
/// # Safety
/// `m` must be a live handle and `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn zap_matrix_copy_data(m: *const ZapMatrix, out: *mut f64, len: usize) -> ZapStatus {
    guard(|| copy_out(borrow(m, "matrix")?.0.as_slice(), out, len))
}

/// Reads a matrix file (`rows,cols` header, then comma-separated rows).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zap_matrix_load(path: *const c_char, out: *mut *mut ZapMatrix) -> ZapStatus {
    guard(|| {
        let path = path_arg(path)?;
        emit(out, ZapMatrix(load_matrix(path)?))
    })
}

/// Writes a matrix file at full precision.
///
/// # Safety
/// `m` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn zap_matrix_save(m: *const ZapMatrix, path: *const c_char) -> ZapStatus {
    guard(|| {
        let m = borrow(m, "matrix")?;
        save_matrix(&m.0, path_arg(path)?)?;
        Ok(())
    })
}

/// Runs ZAP on `Y = A X`. A null `config` selects the defaults.
///
/// # Safety
/// `a` and `y` must be live handles, `config` null or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zap_solve_mmv(
    a: *const ZapMatrix,
    y: *const ZapMatrix,
    config: *const ZapSolverConfig,
    out: *mut *mut ZapSolveResult,
) -> ZapStatus {
    guard(|| {
        let (a, y) = (borrow(a, "a")?, borrow(y, "y")?);
        let cfg = config.as_ref().copied().unwrap_or_else(|| zap_config_default());
        let result = zap_solve(&a.0, &y.0, &cfg.into())?;
        emit(out, ZapSolveResult(result))
    })
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn zap_solve_result_free(r: *mut ZapSolveResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// New matrix handle holding a copy of the recovered `X`.
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zap_solve_result_solution(r: *const ZapSolveResult, out: *mut *mut ZapMatrix) -> ZapStatus {
    guard(|| {
        let r = borrow(r, "result")?;
        emit(out, ZapMatrix(r.0.solution.clone()))
    })
}

/// Completed iterations, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn zap_solve_result_iterations(r: *const ZapSolveResult) -> usize {
    r.as_ref().map_or(0, |r| r.0.iterations_run)
}

/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zap_solve_result_stop_reason(r: *const ZapSolveResult, out: *mut ZapStopReason) -> ZapStatus {
    guard(|| {
        let r = borrow(r, "result")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = match r.0.stop_reason {
            StopReason::StepSizeFloor => ZapStopReason::StepSizeFloor,
            StopReason::IterationBudget => ZapStopReason::IterationBudget,
        };
        Ok(())
    })
}

/// Length of every trace (iterations + 1), or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn zap_solve_result_trace_len(r: *const ZapSolveResult) -> usize {
    r.as_ref().map_or(0, |r| r.0.kappa_trace.len())
}

/// # Safety
/// `r` must be a live handle and `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn zap_solve_result_copy_trace(
    r: *const ZapSolveResult,
    which: ZapTrace,
    out: *mut f64,
    len: usize,
) -> ZapStatus {
    guard(|| {
        let r = &borrow(r, "result")?.0;
        let trace = match which {
            ZapTrace::Penalty => &r.penalty_trace,
            ZapTrace::Kappa => &r.kappa_trace,
            ZapTrace::Feasibility => &r.feasibility_trace,
        };
        copy_out(trace, out, len)
    })
}

/// Runs simultaneous OMP with at most `k` atoms.
///
/// # Safety
/// `a` and `y` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zap_somp_solve(
    a: *const ZapMatrix,
    y: *const ZapMatrix,
    k: usize,
    residual_tol: f64,
    out: *mut *mut ZapSompResult,
) -> ZapStatus {
    guard(|| {
        let (a, y) = (borrow(a, "a")?, borrow(y, "y")?);
        emit(out, ZapSompResult(somp_solve(&a.0, &y.0, k, residual_tol)?))
    })
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn zap_somp_result_free(r: *mut ZapSompResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zap_somp_result_solution(r: *const ZapSompResult, out: *mut *mut ZapMatrix) -> ZapStatus {
    guard(|| {
        let r = borrow(r, "result")?;
        emit(out, ZapMatrix(r.0.solution.clone()))
    })
}

/// Number of selected columns, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn zap_somp_result_support_len(r: *const ZapSompResult) -> usize {
    r.as_ref().map_or(0, |r| r.0.support.len())
}

/// Selected column indices in selection order.
///
/// # Safety
/// `r` must be a live handle and `out` must have room for `len` entries.
#[no_mangle]
pub unsafe extern "C" fn zap_somp_result_copy_support(
    r: *const ZapSompResult,
    out: *mut usize,
    len: usize,
) -> ZapStatus {
    guard(|| copy_out(&borrow(r, "result")?.0.support, out, len))
}

/// Draws a seeded instance. When `noisy` is false `snr_db` is ignored.
/// Any of the three outputs may be null if the caller does not need it.
///
/// # Safety
/// Non-null output pointers must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn zap_generate(
    n: usize,
    m: usize,
    l: usize,
    k: usize,
    noisy: bool,
    snr_db: f64,
    seed: u64,
    out_a: *mut *mut ZapMatrix,
    out_y: *mut *mut ZapMatrix,
    out_x: *mut *mut ZapMatrix,
) -> ZapStatus {
    guard(|| {
        let p = generate(ProblemSize { n, m, l, k }, noisy.then_some(snr_db), seed)?;
        for (out, value) in [(out_a, p.a), (out_y, p.y), (out_x, p.x_true)] {
            if !out.is_null() {
                emit(out, ZapMatrix(value))?;
            }
        }
        Ok(())
    })
}
