//! C ABI for tfkit.
//!
//! Objects cross the boundary as opaque handles created by `*_new` functions
//! and released with the matching `*_free`. Every fallible call returns a
//! [`TfkitStatus`]; on failure the message is available from
//! [`tfkit_last_error`] on the same thread. Measures live on atomic spaces.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tfkit::cli::{execute, Command, Overrides};
use tfkit::extension::extend_signed;
use tfkit::measure::{total_variation, BanachSpace, MeasurableSpace, Norm, SignedMeasure, VectorMeasure};
use tfkit::transfunction::{operator_norm, NormMethod, SamplerConfig, Transfunction};
use tfkit::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfkitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    SpaceMismatch = 4,
    InvalidDocument = 5,
    HypothesisFailed = 6,
    Unbounded = 7,
    TooLarge = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfkitNorm {
    L1 = 0,
    L2 = 1,
    Linf = 2,
}

/// A signed measure on `{0, ..., n-1}`. Positive measures are the ones with
/// nonnegative masses.
pub struct TfkitMeasure(SignedMeasure);

/// A measure with values in `R^d` under a chosen norm.
pub struct TfkitVectorMeasure(VectorMeasure);

pub struct TfkitTransfunction(Transfunction);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(TfkitStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::SpaceMismatch { .. } | Error::DimensionMismatch { .. } => TfkitStatus::SpaceMismatch,
            Error::Document { .. } => TfkitStatus::InvalidDocument,
            Error::HypothesisFailed { .. } => TfkitStatus::HypothesisFailed,
            Error::Unbounded { .. } => TfkitStatus::Unbounded,
            Error::TooLargeForEnumeration { .. } => TfkitStatus::TooLarge,
            _ => TfkitStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TfkitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TfkitStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            TfkitStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(TfkitStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(TfkitStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn space(count: usize) -> Result<MeasurableSpace, Failure> {
    Ok(MeasurableSpace::atomic(count)?)
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tfkit_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tfkit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Signed measure with `mass[a]` on atom `a`, `a < count`.
///
/// # Safety
/// `mass` must point to `count` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfkit_measure_new(mass: *const f64, count: usize, out: *mut *mut TfkitMeasure) -> TfkitStatus {
    guard(|| {
        let mass = slice(mass, count, "mass")?.to_vec();
        emit(out, TfkitMeasure(SignedMeasure::new(space(count)?, mass)?))
    })
}

/// # Safety
/// `m` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tfkit_measure_free(m: *mut TfkitMeasure) {
    release(m)
}

/// Number of atoms, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tfkit_measure_len(m: *const TfkitMeasure) -> usize {
    m.as_ref().map_or(0, |m| m.0.mass().len())
}

/// Copies the masses into `out`, which must hold `tfkit_measure_len(m)` doubles.
///
/// # Safety
/// `m` must be a live handle; `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tfkit_measure_mass(m: *const TfkitMeasure, out: *mut f64, len: usize) -> TfkitStatus {
    guard(|| {
        let mass = borrow(m, "m")?.0.mass();
        if len != mass.len() {
            return Err(Failure(
                TfkitStatus::InvalidArgument,
                format!("buffer holds {len} values, measure has {}", mass.len()),
            ));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(mass.as_ptr(), out, len);
        Ok(())
    })
}

/// Total variation norm `Σ |μ(a)|`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfkit_measure_norm(m: *const TfkitMeasure, out: *mut f64) -> TfkitStatus {
    guard(|| {
        let value = borrow(m, "m")?.0.norm();
        *out.as_mut().ok_or_else(|| null("out"))? = value;
        Ok(())
    })
}

/// Splits `m` into its positive and negative parts.
///
/// # Safety
/// `m` must be a live handle; `positive` and `negative` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfkit_measure_jordan(
    m: *const TfkitMeasure,
    positive: *mut *mut TfkitMeasure,
    negative: *mut *mut TfkitMeasure,
) -> TfkitStatus {
    guard(|| {
        if positive.is_null() || negative.is_null() {
            return Err(null("out"));
        }
        let (pos, neg) = borrow(m, "m")?.0.jordan();
        emit(positive, TfkitMeasure(pos.to_signed()))?;
        emit(negative, TfkitMeasure(neg.to_signed()))
    })
}

/// Vector measure with `values[a * dim .. (a + 1) * dim]` on atom `a`.
///
/// # Safety
/// `values` must point to `count * dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfkit_vector_measure_new(
    values: *const f64,
    count: usize,
    dim: usize,
    norm: TfkitNorm,
    out: *mut *mut TfkitVectorMeasure,
) -> TfkitStatus {
    guard(|| {
        let norm = match norm {
            TfkitNorm::L1 => Norm::L1,
            TfkitNorm::L2 => Norm::L2,
            TfkitNorm::Linf => Norm::Linf,
        };
        let codomain = BanachSpace::new(dim, norm)?;
        let flat = slice(values, count * dim, "values")?;
        let rows = flat.chunks(dim.max(1)).map(<[f64]>::to_vec).collect();
        emit(out, TfkitVectorMeasure(VectorMeasure::new(space(count)?, codomain, rows)?))
    })
}

/// # Safety
/// `v` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tfkit_vector_measure_free(v: *mut TfkitVectorMeasure) {
    release(v)
}

/// `|ω|` as a (positive) measure handle.
///
/// # Safety
/// `v` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfkit_total_variation(v: *const TfkitVectorMeasure, out: *mut *mut TfkitMeasure) -> TfkitStatus {
    guard(|| {
        let tv = total_variation(&borrow(v, "v")?.0);
        emit(out, TfkitMeasure(tv.to_signed()))
    })
}

/// Kernel transfunction from a row-major `rows × cols` nonnegative matrix.
///
/// # Safety
/// `matrix` must point to `rows * cols` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfkit_transfunction_kernel(
    matrix: *const f64,
    rows: usize,
    cols: usize,
    out: *mut *mut TfkitTransfunction,
) -> TfkitStatus {
    guard(|| {
        let flat = slice(matrix, rows * cols, "matrix")?;
        let matrix = flat.chunks(cols.max(1)).map(<[f64]>::to_vec).collect();
        emit(out, TfkitTransfunction(Transfunction::kernel(space(rows)?, space(cols)?, matrix)?))
    })
}

/// Pushforward along `map`, sending atom `a` to `map[a] < codomain`.
///
/// # Safety
/// `map` must point to `domain` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfkit_transfunction_pushforward(
    map: *const usize,
    domain: usize,
    codomain: usize,
    out: *mut *mut TfkitTransfunction,
) -> TfkitStatus {
    guard(|| {
        let map = slice(map, domain, "map")?.to_vec();
        emit(out, TfkitTransfunction(Transfunction::pushforward(space(domain)?, space(codomain)?, map)?))
    })
}

/// `μ ↦ μ(X) · uniform`: norm preserving on positives, not on signed measures.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfkit_transfunction_uniform_spread(
    domain: usize,
    codomain: usize,
    out: *mut *mut TfkitTransfunction,
) -> TfkitStatus {
    guard(|| emit(out, TfkitTransfunction(Transfunction::uniform_spread(space(domain)?, space(codomain)?))))
}

/// # Safety
/// `t` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tfkit_transfunction_free(t: *mut TfkitTransfunction) {
    release(t)
}

/// `Φμ` for a measure with nonnegative masses.
///
/// # Safety
/// `t` and `m` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfkit_transfunction_apply(
    t: *const TfkitTransfunction,
    m: *const TfkitMeasure,
    out: *mut *mut TfkitMeasure,
) -> TfkitStatus {
    guard(|| {
        let phi = &borrow(t, "t")?.0;
        let mu = borrow(m, "m")?.0.to_positive()?;
        emit(out, TfkitMeasure(phi.apply(&mu)?.to_signed()))
    })
}

/// `Φμ⁺ − Φμ⁻`.
///
/// # Safety
/// `t` and `m` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfkit_extend_signed(
    t: *const TfkitTransfunction,
    m: *const TfkitMeasure,
    out: *mut *mut TfkitMeasure,
) -> TfkitStatus {
    guard(|| {
        let image = extend_signed(&borrow(t, "t")?.0, &borrow(m, "m")?.0)?;
        emit(out, TfkitMeasure(image))
    })
}

/// Operator norm of `t`. `exact` is set when the value is exact rather than
/// a sampled lower bound; sampling uses `seed` and `trials`.
///
/// # Safety
/// `t` must be a live handle; `value` and `exact` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfkit_operator_norm(
    t: *const TfkitTransfunction,
    seed: u64,
    trials: usize,
    value: *mut f64,
    exact: *mut bool,
) -> TfkitStatus {
    guard(|| {
        if value.is_null() || exact.is_null() {
            return Err(null("out"));
        }
        let config = SamplerConfig::default().with_seed(seed).with_trials(trials);
        config.validate()?;
        let norm = operator_norm(&borrow(t, "t")?.0, &config)?;
        *value = norm.value;
        *exact = norm.method == NormMethod::Exact;
        Ok(())
    })
}

/// Runs a CLI command on a JSON job document (null for commands without
/// input) and returns the JSON report, to be freed with
/// [`tfkit_string_free`]. `exit_code` receives the CLI exit code; a report
/// is produced for invalid documents too.
///
/// # Safety
/// `command` must be a NUL-terminated string; `document` null or one;
/// `report` and `exit_code` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfkit_run_job(
    command: *const c_char,
    document: *const c_char,
    report: *mut *mut c_char,
    exit_code: *mut i32,
) -> TfkitStatus {
    guard(|| {
        if report.is_null() || exit_code.is_null() {
            return Err(null("out"));
        }
        let name = string(command, "command")?;
        let command = Command::from_name(name)
            .ok_or_else(|| Failure(TfkitStatus::InvalidArgument, format!("unknown command `{name}`")))?;
        let input = if document.is_null() { None } else { Some(string(document, "document")?) };
        let run = execute(command, input, &Overrides::default());
        *exit_code = run.exit_code;
        *report = CString::new(run.render()).expect("JSON has no NUL bytes").into_raw();
        Ok(())
    })
}
