//! C ABI over `bsmlab`.
//!
//! Conventions:
//! - every fallible function returns a [`BsmStatus`]; results go through out
//!   pointers, which are left untouched on failure;
//! - on failure a message is stored per thread and can be read with
//!   [`bsm_last_error_message`];
//! - matrices are opaque [`BsmMatrix`] handles released with
//!   [`bsm_matrix_free`]; strings returned by the library are released with
//!   [`bsm_string_free`];
//! - panics never cross the boundary and are reported as `BSM_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bsmlab::io::load_matrix;
use bsmlab::{
    analyze_full, beta_exact, beta_monte_carlo, build, normalize_rows, BetaEstimate, ConstructionKind,
    ConstructionSpec, Error, Method, RowNormalizedMatrix, SquareMatrix,
};

/// Status codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BsmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    ZeroRow = 4,
    TooLarge = 5,
    Unsupported = 6,
    Numerical = 7,
    Io = 8,
    Parse = 9,
    Panic = 10,
}

impl From<&Error> for BsmStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::ZeroRow(_) => BsmStatus::ZeroRow,
            Error::Parse { .. } => BsmStatus::Parse,
            Error::DimensionMismatch(_) => BsmStatus::DimensionMismatch,
            Error::TooLarge { .. } => BsmStatus::TooLarge,
            Error::NonFinite { .. } | Error::RankDeficient(_) | Error::NotPsd(_) | Error::NotSymmetric => {
                BsmStatus::Numerical
            }
            Error::NotPrime { .. } | Error::BadResidue { .. } | Error::Unsupported(_) => BsmStatus::Unsupported,
            Error::InvalidArgument(_) => BsmStatus::InvalidArgument,
            Error::Io(_) => BsmStatus::Io,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BsmMethod {
    Exact = 0,
    MonteCarlo = 1,
}

/// A β value with its uncertainty. `seed` is meaningful only when
/// `has_seed` is true (Monte Carlo).
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BsmBetaEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub has_seed: bool,
    pub method: BsmMethod,
}

impl From<BetaEstimate> for BsmBetaEstimate {
    fn from(e: BetaEstimate) -> Self {
        BsmBetaEstimate {
            value: e.value,
            std_error: e.stderr,
            samples: e.samples,
            seed: e.seed.unwrap_or(0),
            has_seed: e.seed.is_some(),
            method: match e.method {
                Method::Exact => BsmMethod::Exact,
                Method::MonteCarlo => BsmMethod::MonteCarlo,
            },
        }
    }
}

/// Opaque row-normalized square matrix.
pub struct BsmMatrix {
    inner: RowNormalizedMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(BsmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(BsmStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(BsmStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BsmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BsmStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            BsmStatus::Panic
        }
    }
}

unsafe fn matrix_ref<'a>(m: *const BsmMatrix) -> Result<&'a BsmMatrix, Failure> {
    m.as_ref().ok_or_else(|| null("matrix"))
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(BsmStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn put_matrix(out: *mut *mut BsmMatrix, m: RowNormalizedMatrix) {
    *out = Box::into_raw(Box::new(BsmMatrix { inner: m }));
}

/// Message for the most recent failure on this thread, or NULL if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bsm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bsm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a matrix from `n * n` row-major entries and normalizes its rows.
///
/// # Safety
/// `entries` must point to `n * n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bsm_matrix_from_rows(entries: *const f64, n: usize, out: *mut *mut BsmMatrix) -> BsmStatus {
    guard(|| {
        if entries.is_null() {
            return Err(null("entries"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let len = n
            .checked_mul(n)
            .ok_or_else(|| Failure(BsmStatus::TooLarge, format!("n = {n} overflows")))?;
        let data = std::slice::from_raw_parts(entries, len).to_vec();
        let m = normalize_rows(&SquareMatrix::new(n, data)?)?;
        put_matrix(out, m);
        Ok(())
    })
}

/// Builds a named construction: "identity", "random-sign", "oah", "tree",
/// "known-optimal" or "hadamard". `seed` is used by "random-sign" only.
///
/// # Safety
/// `kind` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bsm_matrix_construct(
    kind: *const c_char,
    n: usize,
    seed: u64,
    out: *mut *mut BsmMatrix,
) -> BsmStatus {
    guard(|| {
        let kind: ConstructionKind = c_str(kind, "kind")?.parse()?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = build(&ConstructionSpec::new(kind, n, seed)?)?;
        put_matrix(out, c.matrix);
        Ok(())
    })
}

/// Reads a matrix file and normalizes its rows.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bsm_matrix_load(path: *const c_char, out: *mut *mut BsmMatrix) -> BsmStatus {
    guard(|| {
        let path = c_str(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let m = normalize_rows(&load_matrix(path)?)?;
        put_matrix(out, m);
        Ok(())
    })
}

/// Releases a matrix. NULL is ignored.
///
/// # Safety
/// `m` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bsm_matrix_free(m: *mut BsmMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of the matrix, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bsm_matrix_dim(m: *const BsmMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.n())
}

/// Copies the row-major entries into `out`, which holds `len` doubles.
///
/// # Safety
/// `m` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bsm_matrix_entries(m: *const BsmMatrix, out: *mut f64, len: usize) -> BsmStatus {
    guard(|| {
        let m = matrix_ref(m)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let src = m.inner.entries();
        if len < src.len() {
            return Err(Failure(
                BsmStatus::DimensionMismatch,
                format!("buffer holds {len} values, matrix has {}", src.len()),
            ));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
        Ok(())
    })
}

/// Exact β by enumeration (n ≤ 26).
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bsm_beta_exact(m: *const BsmMatrix, out: *mut BsmBetaEstimate) -> BsmStatus {
    guard(|| {
        let m = matrix_ref(m)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = beta_exact(&m.inner)?.into();
        Ok(())
    })
}

/// Monte Carlo β with `samples` draws (at least 2).
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bsm_beta_monte_carlo(
    m: *const BsmMatrix,
    samples: u64,
    seed: u64,
    out: *mut BsmBetaEstimate,
) -> BsmStatus {
    guard(|| {
        let m = matrix_ref(m)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = beta_monte_carlo(&m.inner, samples, seed)?.into();
        Ok(())
    })
}

/// Cell analysis as a JSON document (report fields plus `sizes`, `ties`,
/// `degenerate`). Release the string with [`bsm_string_free`].
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bsm_analyze_json(m: *const BsmMatrix, out: *mut *mut c_char) -> BsmStatus {
    guard(|| {
        let m = matrix_ref(m)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let a = analyze_full(&m.inner)?;
        let mut doc = serde_json::to_value(&a.report).expect("report serializes");
        doc["n"] = m.inner.n().into();
        doc["sizes"] = a.cells.sizes.clone().into();
        doc["ties"] = a.cells.ties.into();
        doc["degenerate"] = a.cells.degenerate.into();
        let text = CString::new(doc.to_string()).expect("JSON has no NUL");
        *out = text.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bsm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_mapping() {
        assert_eq!(BsmStatus::from(&Error::ZeroRow(1)), BsmStatus::ZeroRow);
        assert_eq!(BsmStatus::from(&Error::NotPsd(0)), BsmStatus::Numerical);
        assert_eq!(BsmStatus::from(&Error::Unsupported("x".into())), BsmStatus::Unsupported);
        assert_eq!(
            BsmStatus::from(&Error::TooLarge {
                what: "exact enumeration",
                n: 30,
                max: 26
            }),
            BsmStatus::TooLarge
        );
    }

    #[test]
    fn panic_is_contained() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, BsmStatus::Panic);
        let msg = unsafe { CStr::from_ptr(bsm_last_error_message()) }.to_str().unwrap();
        assert_eq!(msg, "panic: boom");
    }

    #[test]
    fn version_is_package_version() {
        let v = unsafe { CStr::from_ptr(bsm_version()) }.to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}
