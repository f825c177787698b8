//! C ABI for `lensvar`.
//!
//! Objects are opaque handles created by [`lv_expr_parse`] and [`lv_analyze`]
//! and released with the matching `lv_*_free`. Every fallible call returns an
//! [`LvStatus`]; on failure a message is kept per thread and can be copied
//! out with [`lv_last_error`].
//!
//! Buffers are caller-owned. Functions that fill a buffer take its capacity
//! and report the size they need through an out-parameter, so a call with a
//! null buffer and zero capacity sizes the allocation.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lensvar::expr::{parse, MeroExpr};
use lensvar::output::summary_to_json;
use lensvar::quadrature::{spectral_summary, QuadConfig, SpectralSummary};
use lensvar::slices::{parse_interval, slice_measure, Slice};
use lensvar::Complex64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Precondition = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Parsed expression handle.
pub struct LvExpr(MeroExpr);

/// Spectral summary handle.
pub struct LvSummary(SpectralSummary);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: LvStatus, msg: impl Into<String>) -> LvStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into [`LvStatus::Panic`].
fn guard(f: impl FnOnce() -> LvStatus) -> LvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(LvStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, LvStatus> {
    if p.is_null() {
        return Err(fail(LvStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(LvStatus::InvalidUtf8, "string is not UTF-8"))
}

/// Copies `text` plus a NUL into `buf`; `needed` receives the full size.
/// Returns `false` if the buffer is too small. Leaves the last error alone.
unsafe fn copy_str(text: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> bool {
    let size = text.len() + 1;
    if !needed.is_null() {
        *needed = size;
    }
    if buf.is_null() || cap < size {
        return false;
    }
    ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
    *buf.add(text.len()) = 0;
    true
}

unsafe fn write_str(text: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> LvStatus {
    if copy_str(text, buf, cap, needed) {
        LvStatus::Ok
    } else {
        fail(LvStatus::BufferTooSmall, format!("buffer needs {} bytes", text.len() + 1))
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf`. The stored
/// message is kept, so a sizing call can be followed by the real copy.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes; `needed` null or writable.
#[no_mangle]
pub unsafe extern "C" fn lv_last_error(buf: *mut c_char, cap: usize, needed: *mut usize) -> LvStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    if copy_str(&msg, buf, cap, needed) {
        LvStatus::Ok
    } else {
        LvStatus::BufferTooSmall
    }
}

/// Parses `text` as a function of `n` variables.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lv_expr_parse(text: *const c_char, n: u32, out: *mut *mut LvExpr) -> LvStatus {
    guard(|| {
        if out.is_null() {
            return fail(LvStatus::NullPointer, "null output handle");
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        if n == 0 {
            return fail(LvStatus::Precondition, "n must be positive");
        }
        match parse(text, n as usize) {
            Ok(e) => {
                *out = Box::into_raw(Box::new(LvExpr(e)));
                LvStatus::Ok
            }
            Err(e) => fail(LvStatus::Parse, format!("parse error {e}")),
        }
    })
}

/// # Safety
/// `expr` must be null or a handle from [`lv_expr_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lv_expr_free(expr: *mut LvExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// Number of variables and components of `expr`.
///
/// # Safety
/// `expr` must be a live handle; `n` and `k` null or writable.
#[no_mangle]
pub unsafe extern "C" fn lv_expr_shape(expr: *const LvExpr, n: *mut usize, k: *mut usize) -> LvStatus {
    let Some(e) = expr.as_ref() else {
        return fail(LvStatus::NullPointer, "null expression");
    };
    if !n.is_null() {
        *n = e.0.n();
    }
    if !k.is_null() {
        *k = e.0.k();
    }
    LvStatus::Ok
}

/// Evaluates `expr` at the point `(re[j] + i im[j])`, `j < n`, writing the
/// `k` components to `out_re`/`out_im`.
///
/// # Safety
/// Input arrays must hold `n` values and output arrays `k` values, matching
/// [`lv_expr_shape`].
#[no_mangle]
pub unsafe extern "C" fn lv_expr_eval(
    expr: *const LvExpr,
    re: *const f64,
    im: *const f64,
    n: usize,
    out_re: *mut f64,
    out_im: *mut f64,
    k: usize,
) -> LvStatus {
    guard(|| {
        let Some(e) = expr.as_ref() else {
            return fail(LvStatus::NullPointer, "null expression");
        };
        if re.is_null() || im.is_null() || out_re.is_null() || out_im.is_null() {
            return fail(LvStatus::NullPointer, "null array");
        }
        if n != e.0.n() || k != e.0.k() {
            return fail(LvStatus::Precondition, format!("expression has shape n={}, k={}", e.0.n(), e.0.k()));
        }
        let point: Vec<Complex64> = (0..n).map(|j| Complex64::new(*re.add(j), *im.add(j))).collect();
        match e.0.eval(&point) {
            Ok(v) => {
                for (j, z) in v.iter().enumerate() {
                    *out_re.add(j) = z.re;
                    *out_im.add(j) = z.im;
                }
                LvStatus::Ok
            }
            Err(err) => fail(LvStatus::Precondition, err.to_string()),
        }
    })
}

/// Spectral summary of `expr` on the torus of radius `lambda`.
///
/// # Safety
/// `expr` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lv_analyze(expr: *const LvExpr, lambda: f64, out: *mut *mut LvSummary) -> LvStatus {
    guard(|| {
        if out.is_null() {
            return fail(LvStatus::NullPointer, "null output handle");
        }
        *out = ptr::null_mut();
        let Some(e) = expr.as_ref() else {
            return fail(LvStatus::NullPointer, "null expression");
        };
        if !(lambda > 0.0 && lambda.is_finite()) {
            return fail(LvStatus::Precondition, format!("lambda must be positive, got {lambda}"));
        }
        match spectral_summary(&e.0, lambda, &QuadConfig::default()) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(LvSummary(s)));
                LvStatus::Ok
            }
            Err(err) => fail(LvStatus::Precondition, err.to_string()),
        }
    })
}

/// # Safety
/// `summary` must be null or a handle from [`lv_analyze`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lv_summary_free(summary: *mut LvSummary) {
    if !summary.is_null() {
        drop(Box::from_raw(summary));
    }
}

/// Scalar fields of a summary.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LvScalars {
    pub lambda: f64,
    pub variance: f64,
    pub variance_model: f64,
    pub tail_energy: f64,
    pub sigma_bound: f64,
    pub est_error: f64,
    pub grid_n: usize,
    /// Components `k`.
    pub k: usize,
    /// Variables `n`.
    pub n: usize,
}

/// # Safety
/// `summary` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lv_summary_scalars(summary: *const LvSummary, out: *mut LvScalars) -> LvStatus {
    let (Some(s), false) = (summary.as_ref(), out.is_null()) else {
        return fail(LvStatus::NullPointer, "null argument");
    };
    let s = &s.0;
    *out = LvScalars {
        lambda: s.lambda,
        variance: s.variance,
        variance_model: s.variance_model(),
        tail_energy: s.tail_energy,
        sigma_bound: s.sigma_bound(),
        est_error: s.est_error,
        grid_n: s.grid_n,
        k: s.eta.rows(),
        n: s.eta.cols(),
    };
    LvStatus::Ok
}

/// Which matrix [`lv_summary_matrix`] copies.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LvMatrix {
    /// Residues, `k × n`.
    Eta = 0,
    /// First-order coefficients, `k × n`.
    Jacobian = 1,
    /// Constant term, `k × 1`.
    Core = 2,
}

/// Copies the matrix selected by `which` (an [`LvMatrix`] value) row-major
/// into `re`/`im`, each of capacity `cap`; `needed` receives the entry count.
///
/// # Safety
/// `summary` must be a live handle; `re`/`im` valid for `cap` values or
/// null when sizing; `needed` null or writable.
#[no_mangle]
pub unsafe extern "C" fn lv_summary_matrix(
    summary: *const LvSummary,
    which: u32,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
    needed: *mut usize,
) -> LvStatus {
    let Some(s) = summary.as_ref() else {
        return fail(LvStatus::NullPointer, "null summary");
    };
    let s = &s.0;
    let values: Vec<Complex64> = match which {
        w if w == LvMatrix::Eta as u32 => s.eta.iter().copied().collect(),
        w if w == LvMatrix::Jacobian as u32 => s.jacobian.iter().copied().collect(),
        w if w == LvMatrix::Core as u32 => s.core.clone(),
        _ => return fail(LvStatus::Precondition, format!("unknown matrix selector {which}")),
    };
    if !needed.is_null() {
        *needed = values.len();
    }
    if re.is_null() || im.is_null() || cap < values.len() {
        return fail(LvStatus::BufferTooSmall, format!("matrix has {} entries", values.len()));
    }
    for (j, z) in values.iter().enumerate() {
        *re.add(j) = z.re;
        *im.add(j) = z.im;
    }
    LvStatus::Ok
}

/// Summary as JSON text with a trailing NUL.
///
/// # Safety
/// `summary` must be a live handle; `buf` valid for `cap` bytes or null when
/// sizing; `needed` null or writable.
#[no_mangle]
pub unsafe extern "C" fn lv_summary_json(summary: *const LvSummary, buf: *mut c_char, cap: usize, needed: *mut usize) -> LvStatus {
    let Some(s) = summary.as_ref() else {
        return fail(LvStatus::NullPointer, "null summary");
    };
    write_str(&summary_to_json(&s.0), buf, cap, needed)
}

/// Exterior measure of the slice given as interval text such as `"0:pi/2"`.
///
/// # Safety
/// `interval` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lv_slice_measure(interval: *const c_char, lambda: f64, out: *mut f64) -> LvStatus {
    guard(|| {
        if out.is_null() {
            return fail(LvStatus::NullPointer, "null output");
        }
        let text = match read_str(interval) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let iv = match parse_interval(text) {
            Ok(iv) => iv,
            Err(e) => return fail(LvStatus::Parse, format!("parse error at offset {}: {}", e.offset, e.message)),
        };
        match Slice::new(lambda, iv) {
            Ok(s) => {
                *out = slice_measure(&s);
                LvStatus::Ok
            }
            Err(e) => fail(LvStatus::Precondition, e.to_string()),
        }
    })
}
