//! C interface.
//!
//! Objects are handed out as opaque pointers and released with the matching
//! `*_free` function. Every fallible call returns a [`GenutStatus`]; on
//! failure a description is available from [`genut_last_error`] on the same
//! thread until the next failing call.
//!
//! Matrices cross the boundary as row-major `f64` buffers.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use genut::{DistributionSpec, GenutError, MomentSpec, SigmaPointSet, TransformFn, TransformResult, UChoice};
use nalgebra::{DMatrix, DVector};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenutStatus {
    Ok = 0,
    NullPointer,
    InvalidArgument,
    ParameterDomain,
    DimensionMismatch,
    NonFinite,
    NotSymmetric,
    Factorization,
    Infeasible,
    Constraint,
    Evaluation,
    BufferTooSmall,
    Io,
    Panic,
}

/// How `u` is chosen by [`genut_sigma_generate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenutUMode {
    /// Match the diagonal kurtosis; infeasible components are an error.
    MatchKurtosis = 0,
    /// Match where feasible, otherwise fall back per component.
    Default,
    /// Use the caller's `u` buffer.
    Explicit,
}

/// First four moments of a univariate distribution.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GenutMoments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Opaque moment spec.
pub struct GenutMomentSpec(MomentSpec);

/// Opaque sigma point set.
pub struct GenutSigmaSet(SigmaPointSet);

/// Opaque propagation result.
pub struct GenutResult(TransformResult);

/// `y = f(x)`: write `m` outputs for `n` inputs, return 0 on success.
pub type GenutTransformCallback =
    Option<unsafe extern "C" fn(user: *mut c_void, x: *const f64, n: usize, y: *mut f64, m: usize) -> i32>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &GenutError) -> GenutStatus {
    use GenutError::*;
    match e {
        ParameterDomain { .. } | DegenerateVariance { .. } => GenutStatus::ParameterDomain,
        DimensionMismatch { .. } => GenutStatus::DimensionMismatch,
        NonFinite { .. } | DivisionByZero { .. } => GenutStatus::NonFinite,
        NotSymmetric { .. } => GenutStatus::NotSymmetric,
        Factorization { .. } => GenutStatus::Factorization,
        Infeasible { .. } | InfeasibleV { .. } | NonPositiveU { .. } => GenutStatus::Infeasible,
        MeanOutsideBounds { .. } | ConstraintUnsatisfied { .. } => GenutStatus::Constraint,
        Evaluation { .. } => GenutStatus::Evaluation,
        Io { .. } => GenutStatus::Io,
        InvalidArgument(_) | Json(_) | Csv(_) => GenutStatus::InvalidArgument,
    }
}

struct Failure(GenutStatus, String);

impl From<GenutError> for Failure {
    fn from(e: GenutError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GenutStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> GenutStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => GenutStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GenutStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(GenutStatus::InvalidArgument, format!("`{what}` is not UTF-8: {e}")))
}

fn copy_to(src: impl ExactSizeIterator<Item = f64>, out: *mut f64, cap: usize) -> Result<(), Failure> {
    if src.len() > cap {
        return Err(Failure(
            GenutStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} required", src.len()),
        ));
    }
    if src.len() > 0 && out.is_null() {
        return Err(null("out"));
    }
    for (i, v) in src.enumerate() {
        unsafe { *out.add(i) = v };
    }
    Ok(())
}

fn row_major(m: &DMatrix<f64>) -> impl ExactSizeIterator<Item = f64> + '_ {
    let (r, c) = m.shape();
    (0..r * c).map(move |k| m[(k / c, k % c)])
}

/// Description of the most recent failure on this thread, or null. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn genut_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Clears the stored error message.
#[no_mangle]
pub extern "C" fn genut_clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Closed-form moments of a distribution given as JSON, e.g.
/// `{"kind":"poisson","lambda":2}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn genut_moments_of(json: *const c_char, out: *mut GenutMoments) -> GenutStatus {
    guard(|| {
        let d: DistributionSpec = serde_json::from_str(c_str(json, "json")?).map_err(GenutError::from)?;
        let m = genut::moments_of(&d)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = GenutMoments {
            mean: m.mean,
            variance: m.variance,
            skewness: m.skewness,
            kurtosis: m.kurtosis,
        };
        Ok(())
    })
}

/// Builds a moment spec from dimension `n`, a mean of length `n`, a
/// row-major `n × n` covariance, and diagonal skewness and kurtosis.
///
/// # Safety
/// Buffers must hold the stated number of values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn genut_moment_spec_new(
    n: usize,
    mean: *const f64,
    covariance: *const f64,
    skew_diag: *const f64,
    kurt_diag: *const f64,
    out: *mut *mut GenutMomentSpec,
) -> GenutStatus {
    guard(|| {
        if n == 0 {
            return Err(Failure(
                GenutStatus::InvalidArgument,
                "dimension must be at least 1".into(),
            ));
        }
        let spec = MomentSpec::new(
            DVector::from_column_slice(slice(mean, n, "mean")?),
            DMatrix::from_row_slice(n, n, slice(covariance, n * n, "covariance")?),
            DVector::from_column_slice(slice(skew_diag, n, "skew_diag")?),
            DVector::from_column_slice(slice(kurt_diag, n, "kurt_diag")?),
        )?;
        write_out(out, GenutMomentSpec(spec))
    })
}

/// Joint moment spec of independent distributions given as a JSON array.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn genut_moment_spec_from_json(
    json: *const c_char,
    out: *mut *mut GenutMomentSpec,
) -> GenutStatus {
    guard(|| {
        let ds: Vec<DistributionSpec> = serde_json::from_str(c_str(json, "json")?).map_err(GenutError::from)?;
        write_out(out, GenutMomentSpec(genut::independent_joint(&ds)?))
    })
}

/// Dimension of a moment spec; 0 for null.
///
/// # Safety
/// `spec` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn genut_moment_spec_dim(spec: *const GenutMomentSpec) -> usize {
    spec.as_ref().map_or(0, |s| s.0.dim())
}

/// # Safety
/// `spec` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn genut_moment_spec_free(spec: *mut GenutMomentSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Generalized sigma points. `u` is read only for [`GenutUMode::Explicit`]
/// and must then hold `n` values.
///
/// # Safety
/// Pointers must be valid as described.
#[no_mangle]
pub unsafe extern "C" fn genut_sigma_generate(
    spec: *const GenutMomentSpec,
    mode: GenutUMode,
    u: *const f64,
    out: *mut *mut GenutSigmaSet,
) -> GenutStatus {
    guard(|| {
        let spec = &borrow(spec, "spec")?.0;
        let choice = match mode {
            GenutUMode::MatchKurtosis => UChoice::MatchKurtosis,
            GenutUMode::Default => UChoice::Default,
            GenutUMode::Explicit => UChoice::Explicit(DVector::from_column_slice(slice(u, spec.dim(), "u")?)),
        };
        write_out(out, GenutSigmaSet(genut::generate(spec, &choice)?))
    })
}

/// Repairs `base` so every point lies in `[lower, upper]`. Use `±INFINITY`
/// for absent bounds.
///
/// # Safety
/// `lower` and `upper` must hold `n` values; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn genut_sigma_constrain(
    spec: *const GenutMomentSpec,
    base: *const GenutSigmaSet,
    lower: *const f64,
    upper: *const f64,
    theta: f64,
    out: *mut *mut GenutSigmaSet,
) -> GenutStatus {
    guard(|| {
        let spec = &borrow(spec, "spec")?.0;
        let base = &borrow(base, "base")?.0;
        let n = spec.dim();
        let c = genut::BoxConstraint::new(
            DVector::from_column_slice(slice(lower, n, "lower")?),
            DVector::from_column_slice(slice(upper, n, "upper")?),
            theta,
        )?;
        write_out(out, GenutSigmaSet(genut::constrain(spec, base, &c)?))
    })
}

/// Symmetric unscented transform points for the moment spec mean and
/// covariance.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn genut_ut_sigma_points(
    spec: *const GenutMomentSpec,
    kappa: f64,
    out: *mut *mut GenutSigmaSet,
) -> GenutStatus {
    guard(|| {
        let spec = &borrow(spec, "spec")?.0;
        write_out(
            out,
            GenutSigmaSet(genut::ut_sigma_points(spec.mean(), spec.covariance(), kappa)?),
        )
    })
}

/// Dimension `n` of the set; 0 for null.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn genut_sigma_set_dim(set: *const GenutSigmaSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.dim())
}

/// Number of points `2n + 1`; 0 for null.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn genut_sigma_set_len(set: *const GenutSigmaSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// Copies the `n × (2n+1)` point matrix, row-major.
///
/// # Safety
/// `out` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn genut_sigma_set_points(set: *const GenutSigmaSet, out: *mut f64, cap: usize) -> GenutStatus {
    guard(|| copy_to(row_major(borrow(set, "set")?.0.points()), out, cap))
}

/// Copies the `2n + 1` weights.
///
/// # Safety
/// `out` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn genut_sigma_set_weights(set: *const GenutSigmaSet, out: *mut f64, cap: usize) -> GenutStatus {
    guard(|| copy_to(borrow(set, "set")?.0.weights().iter().copied(), out, cap))
}

/// Copies the `n` values of `u`.
///
/// # Safety
/// `out` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn genut_sigma_set_u(set: *const GenutSigmaSet, out: *mut f64, cap: usize) -> GenutStatus {
    guard(|| copy_to(borrow(set, "set")?.0.u().iter().copied(), out, cap))
}

/// Copies the `n` values of `v`.
///
/// # Safety
/// `out` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn genut_sigma_set_v(set: *const GenutSigmaSet, out: *mut f64, cap: usize) -> GenutStatus {
    guard(|| copy_to(borrow(set, "set")?.0.v().iter().copied(), out, cap))
}

/// # Safety
/// `set` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn genut_sigma_set_free(set: *mut GenutSigmaSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

struct Callback {
    f: unsafe extern "C" fn(*mut c_void, *const f64, usize, *mut f64, usize) -> i32,
    user: *mut c_void,
}

// Points are transformed one at a time on the calling thread.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

impl Callback {
    fn call(&self, x: &[f64], m: usize) -> Vec<f64> {
        let mut y = vec![0.0; m];
        let rc = unsafe { (self.f)(self.user, x.as_ptr(), x.len(), y.as_mut_ptr(), m) };
        if rc != 0 {
            y.fill(f64::NAN);
        }
        y
    }
}

/// Propagates the set through `f`, which maps `n` inputs to `m` outputs and
/// is called once per point on the calling thread. A non-zero return from
/// `f` fails the call with [`GenutStatus::Evaluation`].
///
/// # Safety
/// `f` must be safe to call with the arguments described; `user` is passed
/// through untouched.
#[no_mangle]
pub unsafe extern "C" fn genut_propagate(
    set: *const GenutSigmaSet,
    f: GenutTransformCallback,
    user: *mut c_void,
    m: usize,
    out: *mut *mut GenutResult,
) -> GenutStatus {
    guard(|| {
        let set = &borrow(set, "set")?.0;
        let f = f.ok_or_else(|| null("f"))?;
        if m == 0 {
            return Err(Failure(
                GenutStatus::InvalidArgument,
                "output dimension must be at least 1".into(),
            ));
        }
        let cb = Callback { f, user };
        let n = set.dim();
        let transform = TransformFn::new("callback", n, m, move |x| cb.call(x, m));
        write_out(out, GenutResult(genut::propagate(set, &transform)?))
    })
}

/// Output dimension `m`; 0 for null.
///
/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn genut_result_dim(res: *const GenutResult) -> usize {
    res.as_ref().map_or(0, |r| r.0.mean.len())
}

/// Copies the `m` mean values.
///
/// # Safety
/// `out` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn genut_result_mean(res: *const GenutResult, out: *mut f64, cap: usize) -> GenutStatus {
    guard(|| copy_to(borrow(res, "res")?.0.mean.iter().copied(), out, cap))
}

/// Copies the `m × m` covariance, row-major.
///
/// # Safety
/// `out` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn genut_result_covariance(res: *const GenutResult, out: *mut f64, cap: usize) -> GenutStatus {
    guard(|| copy_to(row_major(&borrow(res, "res")?.0.covariance), out, cap))
}

/// Copies the `m` diagonal third central moments.
///
/// # Safety
/// `out` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn genut_result_skew_diag(res: *const GenutResult, out: *mut f64, cap: usize) -> GenutStatus {
    guard(|| copy_to(borrow(res, "res")?.0.skew_diag.iter().copied(), out, cap))
}

/// Copies the `m` diagonal fourth central moments.
///
/// # Safety
/// `out` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn genut_result_kurt_diag(res: *const GenutResult, out: *mut f64, cap: usize) -> GenutStatus {
    guard(|| copy_to(borrow(res, "res")?.0.kurt_diag.iter().copied(), out, cap))
}

/// # Safety
/// `res` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn genut_result_free(res: *mut GenutResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}
