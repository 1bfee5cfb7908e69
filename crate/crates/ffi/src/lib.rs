//! C ABI for `bosondist`.
//!
//! Every function returns a [`BdStatus`] and writes results through out
//! pointers. On failure the message is available from
//! [`bd_last_error_message`] on the same thread. Handles are created by the
//! `*_new`/constructor functions and released by the matching `*_free`.
//! Ports are 0-based.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bosondist::distinguishability::{ds_closed_form, ds_exact, DistFunctionA, DistFunctionB};
use bosondist::interference::{
    prob_a, prob_a_ideal, prob_b, prob_b_ideal, Experiment, OutputTuple,
};
use bosondist::linalg::{
    beam_splitter_50_50, haar_unitary, permanent, ComplexMatrix, UnitaryMatrix,
};
use bosondist::metrics::{deviation_bound, required_purity, tvd_a, tvd_b};
use bosondist::photon_model::{purity_approx, purity_order_n, GaussianModel, TimeTuple};
use bosondist::Error;
use num_complex::Complex64;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SizeLimit = 3,
    Validation = 4,
    NumericRange = 5,
    Io = 6,
    Panic = 7,
}

/// Opaque unitary matrix.
pub struct BdUnitary(UnitaryMatrix);

/// Opaque photon model.
pub struct BdModel(GaussianModel);

/// Opaque experiment: a model and a unitary.
pub struct BdExperiment(Experiment);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(BdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Size { .. } => BdStatus::SizeLimit,
            Error::NumericRange(_) => BdStatus::NumericRange,
            Error::NotUnitary { .. } | Error::Config(_) | Error::Json(_) => BdStatus::Validation,
            Error::Io(_) => BdStatus::Io,
            _ => BdStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn set_last_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn guard(f: impl FnOnce() -> Outcome) -> BdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BdStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal panic: {msg}"));
            BdStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(BdStatus::NullPointer, format!("`{name}` is null"))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write<T>(p: *mut T, name: &str, value: T) -> Outcome {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(value);
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn read_path<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(BdStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

unsafe fn read_ports(
    exp: &Experiment,
    p: *const usize,
    len: usize,
) -> Result<OutputTuple, Failure> {
    Ok(OutputTuple::new(
        slice(p, len, "ports")?.to_vec(),
        exp.n_modes(),
    )?)
}

unsafe fn read_times(p: *const f64, len: usize) -> Result<TimeTuple, Failure> {
    Ok(TimeTuple::new(slice(p, len, "times")?.to_vec())?)
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns its full length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bd_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let bytes = e.borrow();
        let bytes = bytes.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Haar-random `m × m` unitary from `seed`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bd_unitary_haar(
    m: usize,
    seed: u64,
    out: *mut *mut BdUnitary,
) -> BdStatus {
    guard(|| {
        let u = haar_unitary(m, seed)?;
        write(out, "out", boxed(BdUnitary(u)))
    })
}

/// Balanced two-mode beam splitter.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bd_unitary_beam_splitter(out: *mut *mut BdUnitary) -> BdStatus {
    guard(|| write(out, "out", boxed(BdUnitary(beam_splitter_50_50()))))
}

/// Unitary from row-major real and imaginary parts of length `m * m`.
///
/// # Safety
/// `re` and `im` must point to `m * m` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bd_unitary_from_parts(
    m: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut BdUnitary,
) -> BdStatus {
    guard(|| {
        let len = m
            .checked_mul(m)
            .ok_or_else(|| Failure(BdStatus::SizeLimit, format!("dimension {m} overflows")))?;
        let re = slice(re, len, "re")?;
        let im = slice(im, len, "im")?;
        let data = re
            .iter()
            .zip(im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        let u = UnitaryMatrix::new(ComplexMatrix::from_row_major(m, m, data)?)?;
        write(out, "out", boxed(BdUnitary(u)))
    })
}

/// Unitary read from a JSON file of the form `{"m", "re", "im"}`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bd_unitary_from_json_file(
    path: *const c_char,
    out: *mut *mut BdUnitary,
) -> BdStatus {
    guard(|| {
        let u = UnitaryMatrix::read_json(read_path(path)?)?;
        write(out, "out", boxed(BdUnitary(u)))
    })
}

/// Writes the unitary as JSON.
///
/// # Safety
/// `u` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bd_unitary_write_json_file(
    u: *const BdUnitary,
    path: *const c_char,
) -> BdStatus {
    guard(|| Ok(deref(u, "u")?.0.write_json(read_path(path)?)?))
}

/// Dimension of the unitary, or 0 for a null handle.
///
/// # Safety
/// `u` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bd_unitary_dim(u: *const BdUnitary) -> usize {
    u.as_ref().map_or(0, |u| u.0.dim())
}

/// Entry `(row, col)` of the unitary.
///
/// # Safety
/// `u` must be a live handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bd_unitary_get(
    u: *const BdUnitary,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> BdStatus {
    guard(|| {
        let u = &deref(u, "u")?.0;
        let m = u.dim();
        if row >= m {
            return Err(Error::OutOfRange {
                what: "row",
                index: row,
                bound: m,
            }
            .into());
        }
        if col >= m {
            return Err(Error::OutOfRange {
                what: "col",
                index: col,
                bound: m,
            }
            .into());
        }
        let z = u.get(row, col);
        write(re, "re", z.re)?;
        write(im, "im", z.im)
    })
}

/// Releases a unitary handle. Null is ignored.
///
/// # Safety
/// `u` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bd_unitary_free(u: *mut BdUnitary) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// Photon model with `n` photons, pulse width, arrival-time spread and
/// optional per-photon frequencies (`frequencies` may be null for all zero).
///
/// # Safety
/// `frequencies` must be null or point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bd_model_new(
    n: usize,
    pulse_width: f64,
    arrival_spread: f64,
    frequencies: *const f64,
    out: *mut *mut BdModel,
) -> BdStatus {
    guard(|| {
        let freqs = if frequencies.is_null() {
            vec![0.0; n]
        } else {
            slice(frequencies, n, "frequencies")?.to_vec()
        };
        let model = GaussianModel::new(pulse_width, arrival_spread, freqs)?;
        write(out, "out", boxed(BdModel(model)))
    })
}

/// Dimensionless spread `Δτ / 2T` of the model.
///
/// # Safety
/// `model` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bd_model_eta(model: *const BdModel, out: *mut f64) -> BdStatus {
    guard(|| write(out, "out", deref(model, "model")?.0.eta()))
}

/// Releases a model handle. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bd_model_free(model: *mut BdModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Experiment from copies of `model` and `unitary`; both handles stay owned
/// by the caller.
///
/// # Safety
/// Both handles must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bd_experiment_new(
    model: *const BdModel,
    unitary: *const BdUnitary,
    out: *mut *mut BdExperiment,
) -> BdStatus {
    guard(|| {
        let model = deref(model, "model")?.0.clone();
        let unitary = deref(unitary, "unitary")?.0.clone();
        let exp = Experiment::new(model, unitary)?;
        write(out, "out", boxed(BdExperiment(exp)))
    })
}

/// Releases an experiment handle. Null is ignored.
///
/// # Safety
/// `exp` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bd_experiment_free(exp: *mut BdExperiment) {
    if !exp.is_null() {
        drop(Box::from_raw(exp));
    }
}

/// Permanent of an `n × n` complex matrix given as row-major parts.
///
/// # Safety
/// `re` and `im` must point to `n * n` doubles; outputs valid.
#[no_mangle]
pub unsafe extern "C" fn bd_permanent(
    n: usize,
    re: *const f64,
    im: *const f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> BdStatus {
    guard(|| {
        let len = n
            .checked_mul(n)
            .ok_or_else(|| Failure(BdStatus::SizeLimit, format!("dimension {n} overflows")))?;
        let re = slice(re, len, "re")?;
        let im = slice(im, len, "im")?;
        let data = re
            .iter()
            .zip(im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        let p = permanent(&ComplexMatrix::from_row_major(n, n, data)?)?;
        write(out_re, "out_re", p.re)?;
        write(out_im, "out_im", p.im)
    })
}

/// `Tr(ρⁿ)` for spread `eta`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bd_purity(eta: f64, n: usize, out: *mut f64) -> BdStatus {
    guard(|| write(out, "out", purity_order_n(eta, n)?))
}

/// `exp(-n η²)`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bd_purity_approx(eta: f64, n: usize, out: *mut f64) -> BdStatus {
    guard(|| {
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(
                Error::Domain(format!("eta must be finite and non-negative, got {eta}")).into(),
            );
        }
        write(out, "out", purity_approx(eta, n))
    })
}

/// Closed-form `d_s` for `n` photons.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bd_ds_closed_form(n: usize, eta: f64, out: *mut f64) -> BdStatus {
    guard(|| {
        if n == 0 || !(eta.is_finite() && eta >= 0.0) {
            return Err(Error::Domain(format!(
                "need n >= 1 and finite eta >= 0, got n={n}, eta={eta}"
            ))
            .into());
        }
        write(out, "out", ds_closed_form(n, eta))
    })
}

/// Exact `d_s` by summing over the symmetric group.
///
/// # Safety
/// `model` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bd_ds_exact(model: *const BdModel, out: *mut f64) -> BdStatus {
    guard(|| {
        let model = &deref(model, "model")?.0;
        write(out, "out", ds_exact(&DistFunctionA::new(model))?)
    })
}

/// Monte Carlo `d_s` from sampled arrival times.
///
/// # Safety
/// `model` must be a live handle; outputs valid.
#[no_mangle]
pub unsafe extern "C" fn bd_ds_monte_carlo(
    model: *const BdModel,
    seed: u64,
    samples: usize,
    out_estimate: *mut f64,
    out_std_error: *mut f64,
) -> BdStatus {
    guard(|| {
        let model = &deref(model, "model")?.0;
        let mc = DistFunctionB::new(model).ds_monte_carlo(seed, samples)?;
        write(out_estimate, "out_estimate", mc.estimate)?;
        write(out_std_error, "out_std_error", mc.std_error)
    })
}

/// Probability of the ordered output `ports` without time resolution.
///
/// # Safety
/// `exp` must be a live handle; `ports` must point to `n` entries.
#[no_mangle]
pub unsafe extern "C" fn bd_prob_a(
    exp: *const BdExperiment,
    ports: *const usize,
    n: usize,
    out: *mut f64,
) -> BdStatus {
    guard(|| {
        let exp = &deref(exp, "exp")?.0;
        write(out, "out", prob_a(exp, &read_ports(exp, ports, n)?)?)
    })
}

/// Same as [`bd_prob_a`] for identical photons.
///
/// # Safety
/// As for [`bd_prob_a`].
#[no_mangle]
pub unsafe extern "C" fn bd_prob_a_ideal(
    exp: *const BdExperiment,
    ports: *const usize,
    n: usize,
    out: *mut f64,
) -> BdStatus {
    guard(|| {
        let exp = &deref(exp, "exp")?.0;
        write(out, "out", prob_a_ideal(exp, &read_ports(exp, ports, n)?)?)
    })
}

/// Joint density of `ports` and detection `times` (units `1/T^n`).
///
/// # Safety
/// `exp` must be a live handle; `ports` and `times` must point to `n` entries.
#[no_mangle]
pub unsafe extern "C" fn bd_prob_b(
    exp: *const BdExperiment,
    ports: *const usize,
    times: *const f64,
    n: usize,
    out: *mut f64,
) -> BdStatus {
    guard(|| {
        let exp = &deref(exp, "exp")?.0;
        let l = read_ports(exp, ports, n)?;
        write(out, "out", prob_b(exp, &l, &read_times(times, n)?)?)
    })
}

/// Same as [`bd_prob_b`] for identical photons.
///
/// # Safety
/// As for [`bd_prob_b`].
#[no_mangle]
pub unsafe extern "C" fn bd_prob_b_ideal(
    exp: *const BdExperiment,
    ports: *const usize,
    times: *const f64,
    n: usize,
    out: *mut f64,
) -> BdStatus {
    guard(|| {
        let exp = &deref(exp, "exp")?.0;
        let l = read_ports(exp, ports, n)?;
        write(out, "out", prob_b_ideal(exp, &l, &read_times(times, n)?)?)
    })
}

/// Total variation distance to the ideal distribution without time resolution.
///
/// # Safety
/// `exp` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bd_tvd_a(exp: *const BdExperiment, out: *mut f64) -> BdStatus {
    guard(|| write(out, "out", tvd_a(&deref(exp, "exp")?.0)?))
}

/// Monte Carlo total variation distance with time resolution.
///
/// # Safety
/// `exp` must be a live handle; outputs valid.
#[no_mangle]
pub unsafe extern "C" fn bd_tvd_b(
    exp: *const BdExperiment,
    seed: u64,
    samples: usize,
    out_estimate: *mut f64,
    out_std_error: *mut f64,
) -> BdStatus {
    guard(|| {
        let mc = tvd_b(&deref(exp, "exp")?.0, seed, samples)?;
        write(out_estimate, "out_estimate", mc.estimate)?;
        write(out_std_error, "out_std_error", mc.std_error)
    })
}

/// Upper bound on either distance for `n` photons of two-photon purity `purity`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bd_deviation_bound(n: usize, purity: f64, out: *mut f64) -> BdStatus {
    guard(|| write(out, "out", deviation_bound(n, purity)?))
}

/// Smallest purity keeping the bound at or below `target`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bd_required_purity(n: usize, target: f64, out: *mut f64) -> BdStatus {
    guard(|| write(out, "out", required_purity(n, target)?))
}
