//! C ABI over `bergman-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_parse` / `*_new`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`BergmanStatus`]; on failure the message is kept per thread and
//! can be read with [`bergman_last_error_message`]. Panics never unwind into
//! the caller: they are caught and reported as [`BergmanStatus::Panic`].
//!
//! Output buffers follow one convention: the caller passes a pointer and a
//! capacity, the library writes at most that many elements and reports the
//! full length through `needed` (when non-null). A too-small buffer yields
//! [`BergmanStatus::BufferTooSmall`] with `needed` filled in.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bergman_core::analysis::classify;
use bergman_core::kernels::dbar_kernel_norm;
use bergman_core::operators::{apply_integral_form, FracDerivative};
use bergman_core::projection::{bloch_factored, project, project_factored, DiskSample, Gate, PolarGrid};
use bergman_core::series::{parse_series_literal, PowerSeries};
use bergman_core::weights::{parse_weight_spec, RadialWeight};
use bergman_core::Error;
use num_complex::Complex64;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BergmanStatus {
    Ok = 0,
    NullPointer = 1,
    /// Argument outside the domain of the operation.
    Domain = 2,
    Parse = 3,
    NonConvergence = 4,
    Integration = 5,
    LogSingularity = 6,
    LengthMismatch = 7,
    DegreeOverflow = 8,
    UnderResolved = 9,
    WeightRejected = 10,
    Config = 11,
    UnknownExperiment = 12,
    Io = 13,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 14,
    BufferTooSmall = 15,
    Panic = 16,
}

impl From<&Error> for BergmanStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => BergmanStatus::Domain,
            Error::LogSingularity => BergmanStatus::LogSingularity,
            Error::NonConvergence { .. } => BergmanStatus::NonConvergence,
            Error::Integration(_) => BergmanStatus::Integration,
            Error::LengthMismatch { .. } => BergmanStatus::LengthMismatch,
            Error::DegreeOverflow { .. } => BergmanStatus::DegreeOverflow,
            Error::UnderResolved { .. } => BergmanStatus::UnderResolved,
            Error::WeightRejected(_) => BergmanStatus::WeightRejected,
            Error::Parse { .. } => BergmanStatus::Parse,
            Error::Config(_) => BergmanStatus::Config,
            Error::UnknownExperiment(_) => BergmanStatus::UnknownExperiment,
            Error::Io(_) => BergmanStatus::Io,
        }
    }
}

/// Opaque radial weight.
pub struct BergmanWeight {
    inner: RadialWeight,
}

/// Opaque truncated power series.
pub struct BergmanSeries {
    inner: PowerSeries,
}

/// Opaque coefficient multiplier `R^{ω,ν}` prepared up to a fixed degree.
pub struct BergmanFracDerivative {
    inner: FracDerivative,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(BergmanStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(BergmanStatus::from(&e), e.to_string())
    }
}

type FfiResult<T> = std::result::Result<T, Failure>;

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> BergmanStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            BergmanStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            BergmanStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(BergmanStatus::NullPointer, format!("`{what}` is null"))
}

/// # Safety
/// `p` must be null or point to a NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(BergmanStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

/// # Safety
/// `p` must be null or point to a live handle.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn put<T>(out: *mut T, value: T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Copies `src` into `(dst, cap)` following the buffer convention.
///
/// # Safety
/// `dst` must be valid for `cap` writes; `needed` null or valid.
unsafe fn fill<T: Copy>(src: &[T], dst: *mut T, cap: usize, needed: *mut usize) -> FfiResult<()> {
    if !needed.is_null() {
        needed.write(src.len());
    }
    if cap < src.len() {
        return Err(Failure(
            BergmanStatus::BufferTooSmall,
            format!("buffer holds {cap} elements, {} needed", src.len()),
        ));
    }
    if src.is_empty() {
        return Ok(());
    }
    if dst.is_null() {
        return Err(null("buffer"));
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

/// Copies `s` as a NUL-terminated string; `needed` counts the terminator.
///
/// # Safety
/// As for [`fill`].
unsafe fn fill_str(s: &str, dst: *mut c_char, cap: usize, needed: *mut usize) -> FfiResult<()> {
    let mut bytes: Vec<c_char> = s.bytes().map(|b| b as c_char).collect();
    bytes.push(0);
    fill(&bytes, dst, cap, needed)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bergman_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message (empty after a success).
///
/// # Safety
/// `buf` must be valid for `cap` bytes; `needed` null or valid.
#[no_mangle]
pub unsafe extern "C" fn bergman_last_error_message(buf: *mut c_char, cap: usize, needed: *mut usize) -> BergmanStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    // reading the message must not overwrite it
    match fill_str(&msg, buf, cap, needed) {
        Ok(()) => BergmanStatus::Ok,
        Err(Failure(status, _)) => status,
    }
}

/// Parses a weight from the weight mini-language, e.g. `std:alpha=1` or
/// `zero:[0.3,0.4]:std:alpha=1`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bergman_weight_parse(spec: *const c_char, out: *mut *mut BergmanWeight) -> BergmanStatus {
    guard(|| {
        let spec = str_arg(spec, "spec")?;
        let w = parse_weight_spec(spec)?;
        put(out, Box::into_raw(Box::new(BergmanWeight { inner: w })), "out")
    })
}

/// Releases a weight. Null is ignored.
///
/// # Safety
/// `w` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bergman_weight_free(w: *mut BergmanWeight) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Writes the canonical spec of `w`.
///
/// # Safety
/// `w` a live handle; buffer convention as in the module docs.
#[no_mangle]
pub unsafe extern "C" fn bergman_weight_label(
    w: *const BergmanWeight,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> BergmanStatus {
    guard(|| fill_str(&handle(w, "w")?.inner.to_string(), buf, cap, needed))
}

/// `ω(r)`.
///
/// # Safety
/// `w` a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bergman_weight_eval(w: *const BergmanWeight, r: f64, out: *mut f64) -> BergmanStatus {
    guard(|| put(out, handle(w, "w")?.inner.eval(r)?, "out"))
}

/// `ω̂(r) = ∫_r^1 ω(s) ds`.
///
/// # Safety
/// `w` a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bergman_weight_tail(w: *const BergmanWeight, r: f64, out: *mut f64) -> BergmanStatus {
    guard(|| put(out, handle(w, "w")?.inner.tail_hat(r)?, "out"))
}

/// Moments `ω_0 … ω_{max_index}` (that is, `max_index + 1` values).
///
/// # Safety
/// `w` a live handle; buffer convention as in the module docs.
#[no_mangle]
pub unsafe extern "C" fn bergman_weight_moments(
    w: *const BergmanWeight,
    max_index: usize,
    buf: *mut f64,
    cap: usize,
    needed: *mut usize,
) -> BergmanStatus {
    guard(|| {
        let table = handle(w, "w")?.inner.moments_upto(max_index)?;
        fill(&table.values, buf, cap, needed)
    })
}

/// Classification report of `w` with lower-doubling parameter `k` as JSON.
///
/// # Safety
/// `w` a live handle; buffer convention as in the module docs.
#[no_mangle]
pub unsafe extern "C" fn bergman_weight_classify_json(
    w: *const BergmanWeight,
    k: f64,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> BergmanStatus {
    guard(|| {
        let w = handle(w, "w")?;
        if k.is_nan() || k <= 1.0 {
            return Err(Error::Domain(format!("K must exceed 1, got {k}")).into());
        }
        fill_str(&classify(&w.inner, k)?.to_json(), buf, cap, needed)
    })
}

/// Series with coefficients `re[k] + i·im[k]`, `k < len`. `im` may be null
/// for real coefficients.
///
/// # Safety
/// `re` (and `im` when non-null) valid for `len` reads; `out` for writes.
#[no_mangle]
pub unsafe extern "C" fn bergman_series_new(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut BergmanSeries,
) -> BergmanStatus {
    guard(|| {
        if len == 0 {
            return Err(Error::Domain("a series needs at least one coefficient".into()).into());
        }
        if re.is_null() {
            return Err(null("re"));
        }
        let re = std::slice::from_raw_parts(re, len);
        let coeffs = if im.is_null() {
            re.iter().map(|&x| Complex64::new(x, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, len);
            re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect()
        };
        put(out, Box::into_raw(Box::new(BergmanSeries { inner: PowerSeries::new(coeffs) })), "out")
    })
}

/// Parses `poly:[...]`, `logfn@N` or `geom@N`.
///
/// # Safety
/// `literal` NUL-terminated; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bergman_series_parse(literal: *const c_char, out: *mut *mut BergmanSeries) -> BergmanStatus {
    guard(|| {
        let s = parse_series_literal(str_arg(literal, "literal")?)?;
        put(out, Box::into_raw(Box::new(BergmanSeries { inner: s })), "out")
    })
}

/// Releases a series. Null is ignored.
///
/// # Safety
/// `s` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bergman_series_free(s: *mut BergmanSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Degree `N` (the series holds `N + 1` coefficients).
///
/// # Safety
/// `s` a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bergman_series_degree(s: *const BergmanSeries, out: *mut usize) -> BergmanStatus {
    guard(|| put(out, handle(s, "s")?.inner.degree(), "out"))
}

/// Coefficients split into real and imaginary parts; both buffers follow the
/// buffer convention with the same capacity.
///
/// # Safety
/// `s` a live handle; `re`, `im` valid for `cap` writes; `needed` null or valid.
#[no_mangle]
pub unsafe extern "C" fn bergman_series_coeffs(
    s: *const BergmanSeries,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
    needed: *mut usize,
) -> BergmanStatus {
    guard(|| {
        let c = handle(s, "s")?.inner.coeffs();
        let (a, b): (Vec<f64>, Vec<f64>) = c.iter().map(|z| (z.re, z.im)).unzip();
        fill(&a, re, cap, needed)?;
        fill(&b, im, cap, std::ptr::null_mut())
    })
}

/// `f(z)` for `|z| < 1`.
///
/// # Safety
/// `s` a live handle; `out_re`, `out_im` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bergman_series_eval(
    s: *const BergmanSeries,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> BergmanStatus {
    guard(|| {
        let v = handle(s, "s")?.inner.eval(Complex64::new(re, im))?;
        put(out_re, v.re, "out_re")?;
        put(out_im, v.im, "out_im")
    })
}

/// Prepares `R^{ω,ν}` for series of degree at most `degree`.
///
/// # Safety
/// `omega`, `nu` live handles; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bergman_fracd_new(
    omega: *const BergmanWeight,
    nu: *const BergmanWeight,
    degree: usize,
    out: *mut *mut BergmanFracDerivative,
) -> BergmanStatus {
    guard(|| {
        let r = FracDerivative::build(&handle(omega, "omega")?.inner, &handle(nu, "nu")?.inner, degree)?;
        put(out, Box::into_raw(Box::new(BergmanFracDerivative { inner: r })), "out")
    })
}

/// Releases a fractional derivative. Null is ignored.
///
/// # Safety
/// `r` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bergman_fracd_free(r: *mut BergmanFracDerivative) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// `R^{ω,ν} f` as a new series.
///
/// # Safety
/// `r`, `f` live handles; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bergman_fracd_apply(
    r: *const BergmanFracDerivative,
    f: *const BergmanSeries,
    out: *mut *mut BergmanSeries,
) -> BergmanStatus {
    guard(|| {
        let g = handle(r, "r")?.inner.apply(&handle(f, "f")?.inner)?;
        put(out, Box::into_raw(Box::new(BergmanSeries { inner: g })), "out")
    })
}

/// `R^{ω,ν} f(z)` through the integral form `⟨f, B_z^ν⟩_ω`, independent of
/// the multiplier path.
///
/// # Safety
/// Handles live; outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bergman_fracd_integral_form(
    omega: *const BergmanWeight,
    nu: *const BergmanWeight,
    f: *const BergmanSeries,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> BergmanStatus {
    guard(|| {
        let v = apply_integral_form(
            &handle(omega, "omega")?.inner,
            &handle(nu, "nu")?.inner,
            &handle(f, "f")?.inner,
            Complex64::new(re, im),
        )?;
        put(out_re, v.re, "out_re")?;
        put(out_im, v.im, "out_im")
    })
}

/// Projects the bounded pre-image `g_α = (1 − |z|)^α R^{ω,ω_α} h` back onto
/// polynomials of degree `deg h`. With `radial == 0` the projection is taken
/// in factored form; otherwise `g_α` is sampled on a polar grid with
/// `radial` nodes and `angles` angles first. `force != 0` skips the
/// classifier gate.
///
/// # Safety
/// Handles live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bergman_preimage_roundtrip(
    omega: *const BergmanWeight,
    h: *const BergmanSeries,
    alpha: f64,
    force: i32,
    radial: usize,
    angles: usize,
    out: *mut *mut BergmanSeries,
) -> BergmanStatus {
    guard(|| {
        let w = &handle(omega, "omega")?.inner;
        let h = &handle(h, "h")?.inner;
        let gate = if force != 0 { Gate::Force } else { Gate::Classify };
        let g = bloch_factored(w, h, alpha, gate)?;
        let p = if radial == 0 {
            project_factored(w, &g, h.degree())?
        } else {
            let grid = PolarGrid::for_weight(w, radial, angles)?;
            project(w, &DiskSample::from_factored(&grid, g)?, h.degree())?
        };
        put(out, Box::into_raw(Box::new(BergmanSeries { inner: p })), "out")
    })
}

/// `(1 − |z|²)‖∂_z̄ B_z^ω‖_{A¹_ν}` at `z = modulus ∈ (0, 1)`.
///
/// # Safety
/// Handles live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bergman_dbar_kernel_norm(
    omega: *const BergmanWeight,
    nu: *const BergmanWeight,
    modulus: f64,
    radial: usize,
    out: *mut f64,
) -> BergmanStatus {
    guard(|| {
        let row = dbar_kernel_norm(&handle(omega, "omega")?.inner, &handle(nu, "nu")?.inner, modulus, radial)?;
        put(out, row.scaled_norm, "out")
    })
}
