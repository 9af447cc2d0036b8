//! C interface to `bestchoice`.
//!
//! Every function returns a [`BcStatus`] and writes results through out
//! pointers. On failure the out pointers are left untouched and
//! [`bc_last_error_message`] describes the error. Strategies and priors are
//! opaque handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bestchoice::cli::StrategySpec;
use bestchoice::{exact, simulate, CutoffStrategy, Error, SampleSizeDistribution, Strategy};

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcStatus {
    Ok = 0,
    InvalidArgument = 1,
    UnsupportedStrategy = 2,
    UnsupportedComparison = 3,
    ConstructionFailed = 4,
    DegenerateState = 5,
    /// A strategy string did not parse.
    ParseError = 6,
    NullPointer = 7,
    /// A Rust panic was caught at the boundary.
    Panic = 8,
}

/// Opaque strategy handle.
pub struct BcStrategy(Strategy);

/// Opaque sample-size distribution handle.
pub struct BcPrior(SampleSizeDistribution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(BcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidArgument(_) => BcStatus::InvalidArgument,
            Error::UnsupportedStrategy(_) => BcStatus::UnsupportedStrategy,
            Error::UnsupportedComparison(_) => BcStatus::UnsupportedComparison,
            Error::ConstructionFailed { .. } => BcStatus::ConstructionFailed,
            Error::DegenerateState(_) => BcStatus::DegenerateState,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: Option<String>) {
    let msg = msg.map(|m| CString::new(m.replace('\0', " ")).unwrap_or_default());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

fn guard<F: FnOnce() -> Result<(), Failure>>(body: F) -> BcStatus {
    let result = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        Err(Failure(BcStatus::Panic, format!("panic: {msg}")))
    });
    match result {
        Ok(()) => {
            set_last_error(None);
            BcStatus::Ok
        }
        Err(Failure(status, msg)) => {
            set_last_error(Some(msg));
            status
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(BcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn strategy<'a>(p: *const BcStrategy) -> Result<&'a Strategy, Failure> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null("strategy"))
}

unsafe fn prior<'a>(p: *const BcPrior) -> Result<&'a SampleSizeDistribution, Failure> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null("prior"))
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

/// Message for the last failed call on this thread, or null after a
/// successful call. Valid until the next call into the library.
#[no_mangle]
pub extern "C" fn bc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Parse a strategy string such as `x:0.3`, `d:4`, `onee`,
/// `cutoffs:0.9,0.5;tail=0.3`, `skipfirst:a1=1,x=0.36` or `restart:x=0.4,y=0.3`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_strategy_parse(text: *const c_char, out: *mut *mut BcStrategy) -> BcStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure(BcStatus::ParseError, format!("strategy text is not UTF-8: {e}")))?;
        let spec: StrategySpec = text.parse().map_err(|e| Failure(BcStatus::ParseError, format!("{e}")))?;
        *out = Box::into_raw(Box::new(BcStrategy(spec.to_strategy()?)));
        Ok(())
    })
}

/// Cutoff strategy `a_1, ..., a_len` followed by `tail` for every later index.
///
/// # Safety
/// `cutoffs` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_strategy_from_cutoffs(
    cutoffs: *const f64,
    len: usize,
    tail: f64,
    out: *mut *mut BcStrategy,
) -> BcStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        let a = slice(cutoffs, len, "cutoffs")?.to_vec();
        let s = CutoffStrategy::new(a, tail)?;
        *out = Box::into_raw(Box::new(BcStrategy(s.into())));
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn bc_strategy_free(s: *mut BcStrategy) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Exact probability of selecting the best of `n` items.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_strategy_win_prob(s: *const BcStrategy, n: u64, out: *mut f64) -> BcStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        *out = exact::win_prob(strategy(s)?, n)?;
        Ok(())
    })
}

/// Monte Carlo estimate; the result depends only on `seed`, not on the
/// number of threads.
///
/// # Safety
/// `s` must be a live handle; `p` and `std_error` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_strategy_estimate(
    s: *const BcStrategy,
    n: u64,
    trials: u64,
    seed: u64,
    p: *mut f64,
    std_error: *mut f64,
) -> BcStatus {
    guard(|| {
        let p = out(p, "p")?;
        let std_error = out(std_error, "std_error")?;
        let n = usize::try_from(n).map_err(|_| Failure(BcStatus::InvalidArgument, format!("n = {n} too large")))?;
        let e = simulate::estimate(strategy(s)?, n, trials, seed)?;
        *p = e.p;
        *std_error = e.stderr;
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_prior_point_mass(n: u64, out: *mut *mut BcPrior) -> BcStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        *out = Box::into_raw(Box::new(BcPrior(SampleSizeDistribution::point_mass(n)?)));
        Ok(())
    })
}

/// Finite prior with `weights[i]` on `ns[i]`; weights must sum to one.
///
/// # Safety
/// `ns` and `weights` must point to `len` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_prior_finite(
    ns: *const u64,
    weights: *const f64,
    len: usize,
    out: *mut *mut BcPrior,
) -> BcStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        let ns = slice(ns, len, "ns")?;
        let weights = slice(weights, len, "weights")?;
        let points = ns.iter().copied().zip(weights.iter().copied()).collect();
        *out = Box::into_raw(Box::new(BcPrior(SampleSizeDistribution::finite(points)?)));
        Ok(())
    })
}

/// `P(N = n) = θ (1 + θ)^{-n}`, `n >= 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_prior_geometric(theta: f64, out: *mut *mut BcPrior) -> BcStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        *out = Box::into_raw(Box::new(BcPrior(SampleSizeDistribution::geometric(theta)?)));
        Ok(())
    })
}

/// # Safety
/// `p` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn bc_prior_free(p: *mut BcPrior) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Win probability averaged over the prior. `error_bound` is zero for
/// finite priors and bounds the truncated tail for geometric ones.
///
/// # Safety
/// Handles must be live; `value` and `error_bound` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_mixture_value(
    s: *const BcStrategy,
    p: *const BcPrior,
    value: *mut f64,
    error_bound: *mut f64,
) -> BcStatus {
    guard(|| {
        let value = out(value, "value")?;
        let error_bound = out(error_bound, "error_bound")?;
        let s = strategy(s)?;
        let m = exact::mixture_value(|n| exact::win_prob(s, n), prior(p)?)?;
        *value = m.value;
        *error_bound = m.error_bound;
        Ok(())
    })
}

/// Win probability of "first record from index `d` on" with `n` items.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_win_prob_d(d: u64, n: u64, out: *mut f64) -> BcStatus {
    guard(|| {
        *self::out(out, "out")? = exact::win_prob_d(d, n)?;
        Ok(())
    })
}

/// Win probability of "first record after time `x`" with `n` items.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_win_prob_x(n: u64, x: f64, out: *mut f64) -> BcStatus {
    guard(|| {
        *self::out(out, "out")? = exact::win_prob_x(n, x)?;
        Ok(())
    })
}

/// Best index threshold for a known `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_optimal_d(n: u64, out: *mut u64) -> BcStatus {
    guard(|| {
        *self::out(out, "out")? = exact::optimal_d(n)?;
        Ok(())
    })
}

/// Best time threshold for a known `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_argmax_x(n: u64, out: *mut f64) -> BcStatus {
    guard(|| {
        *self::out(out, "out")? = exact::argmax_x(n)?;
        Ok(())
    })
}
