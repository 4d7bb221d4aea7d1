//! C ABI for `scmodes`.
//!
//! Fallible functions return an [`ScmStatus`] and write results through out
//! pointers. The message of the last failure on the calling thread is
//! available from [`scm_last_error`]. Wavefunctions live behind the opaque
//! [`ScmWavefunction`] handle and must be released with
//! [`scm_wavefunction_free`]; strings returned by the library are released
//! with [`scm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use scmodes::elliptic::EllipticData;
use scmodes::fields::{Axis, Grid, GridWavefunction};
use scmodes::flows::{flow_p0, p0, PhasePoint1D};
use scmodes::modes::{beta, mode_eval, ModeIndex, ModeVector};
use scmodes::propagators::{
    gyrator, q1_singularity_probe, q2_propagator, t0_fio_propagator, warmup_propagator, ChartedTime,
};
use scmodes::spectral::{truncated_propagator_auto, Generator};
use scmodes::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScmStatus {
    Ok = 0,
    /// Bad argument, unsupported combination or value outside the domain.
    InvalidInput = 1,
    /// Blow-up, caustic, non-convergence or another numerical failure.
    Numerical = 2,
    /// File or serialization failure.
    Io = 3,
    /// A required pointer was null.
    NullPointer = 4,
    /// The library panicked; this is a bug.
    Panic = 5,
}

/// A sampled wavefunction on a uniform grid.
pub struct ScmWavefunction(GridWavefunction);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ScmStatus {
    match e.exit_code() {
        2 => ScmStatus::InvalidInput,
        4 => ScmStatus::Io,
        _ => ScmStatus::Numerical,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ScmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ScmStatus::Ok
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&format!("{}: {e}", e.kind()));
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            ScmStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic");
            ScmStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn handle<'a>(p: *const ScmWavefunction) -> Result<&'a GridWavefunction, Fail> {
    p.as_ref().map(|w| &w.0).ok_or(Fail::Null("wavefunction"))
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Lib(Error::InvalidInput(format!("{what} is not UTF-8"))))
}

fn boxed(w: GridWavefunction) -> *mut ScmWavefunction {
    Box::into_raw(Box::new(ScmWavefunction(w)))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn scm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn scm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Coupling `beta_m^n` of the cubic generators.
#[no_mangle]
pub extern "C" fn scm_beta(m: usize, n: usize) -> f64 {
    beta(m, n)
}

/// The symbol `p0(x, xi)` at semiclassical parameter `h`.
#[no_mangle]
pub extern "C" fn scm_p0(x: f64, xi: f64, h: f64) -> f64 {
    p0(x, xi, h)
}

/// Closed-form `p0` flow of `(x, xi)` for time `t`.
///
/// # Safety
/// `out_x` and `out_xi` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scm_flow_p0(x: f64, xi: f64, h: f64, t: f64, out_x: *mut f64, out_xi: *mut f64) -> ScmStatus {
    guard(|| {
        let (ox, oxi) = (out(out_x, "out_x")?, out(out_xi, "out_xi")?);
        let q = flow_p0(PhasePoint1D::new(x, xi, h), t)?;
        (*ox, *oxi) = (q.x, q.xi);
        Ok(())
    })
}

/// Weierstrass `P(z)` for invariants `g2`, `g3` at `z = re + i im`.
///
/// # Safety
/// `out_re` and `out_im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scm_wp(g2: f64, g3: f64, re: f64, im: f64, out_re: *mut f64, out_im: *mut f64) -> ScmStatus {
    guard(|| {
        let (ore, oim) = (out(out_re, "out_re")?, out(out_im, "out_im")?);
        let w = EllipticData::new(g2, g3)?.wp(Complex64::new(re, im))?;
        (*ore, *oim) = (w.re, w.im);
        Ok(())
    })
}

/// Coefficient of `|m_out, n_out>` after the truncated-basis propagator of
/// `gen` (`"t4"`, `"t5"`, `"t38"`, `"t0"`, `"p0"`) acts on `|m_in, n_in>`.
///
/// # Safety
/// `gen` must be a NUL-terminated string; `out_re`, `out_im` valid for writes.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn scm_truncated_coefficient(
    gen: *const c_char,
    t: f64,
    h: f64,
    m_in: usize,
    n_in: usize,
    m_out: usize,
    n_out: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> ScmStatus {
    guard(|| {
        let generator: Generator = text(gen, "gen")?.parse()?;
        let (ore, oim) = (out(out_re, "out_re")?, out(out_im, "out_im")?);
        let w = truncated_propagator_auto(generator, t, h, &ModeVector::basis(m_in, n_in))?;
        let c = w.get(ModeIndex::new(m_out, n_out));
        (*ore, *oim) = (c.re, c.im);
        Ok(())
    })
}

/// Growth exponent fitted at the moving singular point of the `Q1` flow.
///
/// # Safety
/// `out_slope` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scm_q1_singularity_slope(alpha: f64, t: f64, out_slope: *mut f64) -> ScmStatus {
    guard(|| {
        let o = out(out_slope, "out_slope")?;
        *o = q1_singularity_probe(alpha, t)?.slope;
        Ok(())
    })
}

/// Samples `|m,n>` on a square grid of `dims` (1 or 2) axes with `points`
/// samples on `[-extent, extent)`. In one dimension `n` must be 0.
///
/// # Safety
/// `out_handle` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scm_wavefunction_mode(
    m: usize,
    n: usize,
    h: f64,
    dims: usize,
    points: usize,
    extent: f64,
    out_handle: *mut *mut ScmWavefunction,
) -> ScmStatus {
    guard(|| {
        let o = out(out_handle, "out_handle")?;
        let ax = Axis::new(points, extent)?;
        let grid = Grid::from_axes(vec![ax; dims], h)?;
        *o = boxed(mode_eval(ModeIndex::new(m, n), h, &grid)?.value);
        Ok(())
    })
}

/// Parses the grid JSON format.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_handle` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scm_wavefunction_from_json(
    json: *const c_char,
    out_handle: *mut *mut ScmWavefunction,
) -> ScmStatus {
    guard(|| {
        let o = out(out_handle, "out_handle")?;
        *o = boxed(GridWavefunction::from_json(text(json, "json")?)?);
        Ok(())
    })
}

/// Serializes to the grid JSON format; free the string with [`scm_string_free`].
///
/// # Safety
/// `w` must be a live handle; `out_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scm_wavefunction_to_json(w: *const ScmWavefunction, out_json: *mut *mut c_char) -> ScmStatus {
    guard(|| {
        let o = out(out_json, "out_json")?;
        let s = handle(w)?.to_json()?;
        *o = CString::new(s).map_err(|_| Error::Consistency("NUL in JSON".into()))?.into_raw();
        Ok(())
    })
}

/// Number of complex samples, or 0 for a null handle.
///
/// # Safety
/// `w` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scm_wavefunction_len(w: *const ScmWavefunction) -> usize {
    handle(w).map(|f| f.values().len()).unwrap_or(0)
}

/// Number of grid axes, or 0 for a null handle.
///
/// # Safety
/// `w` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scm_wavefunction_dims(w: *const ScmWavefunction) -> usize {
    handle(w).map(|f| f.grid().dims()).unwrap_or(0)
}

/// L2 norm, or NaN for a null handle.
///
/// # Safety
/// `w` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scm_wavefunction_norm(w: *const ScmWavefunction) -> f64 {
    handle(w).map(|f| f.norm()).unwrap_or(f64::NAN)
}

/// Copies the samples as interleaved `(re, im)` pairs in row-major order.
/// `capacity` counts doubles and must be at least twice the sample count.
///
/// # Safety
/// `w` must be a live handle; `buf` valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn scm_wavefunction_values(
    w: *const ScmWavefunction,
    buf: *mut f64,
    capacity: usize,
) -> ScmStatus {
    guard(|| {
        let f = handle(w)?;
        if buf.is_null() {
            return Err(Fail::Null("buf"));
        }
        let need = 2 * f.values().len();
        if capacity < need {
            return Err(Error::InvalidInput(format!("buffer holds {capacity} doubles, need {need}")).into());
        }
        let dst = std::slice::from_raw_parts_mut(buf, need);
        for (pair, z) in dst.chunks_exact_mut(2).zip(f.values()) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

/// Applies `gen` for time `t`: `"warmup"` and `"gyrator"` on 2-D grids,
/// `"t0-fio"` and `"q2"` on 1-D grids. The gyrator picks its chart
/// automatically and uses the grid's `h`.
///
/// # Safety
/// `w` must be a live handle, `gen` a NUL-terminated string and
/// `out_handle` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scm_propagate(
    w: *const ScmWavefunction,
    gen: *const c_char,
    t: f64,
    h: f64,
    out_handle: *mut *mut ScmWavefunction,
) -> ScmStatus {
    guard(|| {
        let o = out(out_handle, "out_handle")?;
        let v = handle(w)?;
        let r = match text(gen, "gen")? {
            "warmup" => warmup_propagator(v, t, h)?,
            "gyrator" => gyrator(v, ChartedTime::auto(t))?,
            "t0-fio" => t0_fio_propagator(v, t, h)?,
            "q2" => q2_propagator(v, t, h)?,
            g => return Err(Error::InvalidInput(format!("unknown propagator {g:?}")).into()),
        };
        *o = boxed(r.value);
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `w` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn scm_wavefunction_free(w: *mut ScmWavefunction) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Releases a string returned by the library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn scm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
