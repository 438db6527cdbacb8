//! C ABI over the RADS grammar, output normalisation, ROUGE-L, paired
//! significance tests and severity tallies.
//!
//! Conventions:
//! - every fallible call returns a [`RadliteStatus`]; on failure
//!   [`radlite_last_error_message`] describes the cause on the calling thread;
//! - strings passed in are NUL-terminated UTF-8 and are never retained;
//! - strings handed out must be released with [`radlite_string_free`];
//! - handles are opaque and released by their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use radlite::metrics::{rouge_l_f1, strip_think};
use radlite::rads::{self, classify_error, ErrorDirection, Inventory, ParseOutcome, RadsGrammar};
use radlite::stats::{mcnemar, wilcoxon_signed_rank, TestMethod, TestResult};
use radlite::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadliteStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    NoDiscordantPairs = 4,
    InsufficientData = 5,
    Unparseable = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadliteTestMethod {
    McnemarExact = 0,
    McnemarChi2 = 1,
    WilcoxonNormal = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadliteErrorDirection {
    Exact = 0,
    Undercall = 1,
    Overcall = 2,
    SafeMisclassify = 3,
    CrossSystemUndefined = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RadliteRouge {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadliteTestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n_effective: usize,
    pub method: RadliteTestMethod,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RadliteSeverityCounts {
    pub exact: usize,
    pub undercall: usize,
    pub overcall: usize,
    pub safe_misclassify: usize,
    pub cross_system_undefined: usize,
}

/// A RADS grammar bound to one category inventory.
pub struct RadliteInventory {
    grammar: RadsGrammar,
}

/// Running counts of error directions.
pub struct RadliteSeverityTally {
    counts: RadliteSeverityCounts,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(RadliteStatus, String);

type FfiResult<T = ()> = Result<T, Failure>;

fn fail<T>(status: RadliteStatus, message: impl Into<String>) -> FfiResult<T> {
    Err(Failure(status, message.into()))
}

/// Runs `f`, converting failures and panics into a status code.
fn guard(f: impl FnOnce() -> FfiResult) -> RadliteStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RadliteStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RadliteStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(RadliteStatus::NullPointer, format!("`{name}` is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(RadliteStatus::InvalidUtf8, format!("`{name}` is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> FfiResult {
    if out.is_null() {
        return fail(RadliteStatus::NullPointer, format!("`{name}` is null"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> FfiResult {
    let c = CString::new(s).or_else(|_| fail(RadliteStatus::InvalidArgument, "result contains NUL"))?;
    if out.is_null() {
        return fail(RadliteStatus::NullPointer, "`out` is null");
    }
    out.write(c.into_raw());
    Ok(())
}

unsafe fn read_slice<'a, T>(p: *const T, len: usize, name: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(RadliteStatus::NullPointer, format!("`{name}` is null"));
    }
    Ok(slice::from_raw_parts(p, len))
}

fn map_error(e: Error) -> Failure {
    let status = match e {
        Error::NoDiscordantPairs => RadliteStatus::NoDiscordantPairs,
        Error::InsufficientDifferences { .. } | Error::Empty(_) => RadliteStatus::InsufficientData,
        _ => RadliteStatus::InvalidArgument,
    };
    Failure(status, e.to_string())
}

fn test_result(r: TestResult) -> RadliteTestResult {
    RadliteTestResult {
        statistic: r.statistic,
        p_value: r.p_value,
        n_effective: r.n_effective,
        method: match r.method {
            TestMethod::McNemarExact => RadliteTestMethod::McnemarExact,
            TestMethod::McNemarChi2 => RadliteTestMethod::McnemarChi2,
            TestMethod::WilcoxonNormal => RadliteTestMethod::WilcoxonNormal,
        },
    }
}

/// Message for the most recent failure on this thread; empty after a success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn radlite_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn radlite_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a pointer returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn radlite_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Canonical form ("BI-RADS 4A") of the first category mentioned in `text`
/// under the shipped inventory; `RADLITE_STATUS_UNPARSEABLE` if none.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radlite_rads_canonical(text: *const c_char, out: *mut *mut c_char) -> RadliteStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        match rads::parse(text) {
            ParseOutcome::Valid(c) => write_string(out, c.canonical()),
            ParseOutcome::Invalid(_) => fail(RadliteStatus::Unparseable, "no RADS category found"),
        }
    })
}

/// Direction of `prediction` relative to the ground-truth category `truth`.
///
/// # Safety
/// Both strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radlite_rads_classify(
    prediction: *const c_char,
    truth: *const c_char,
    out: *mut RadliteErrorDirection,
) -> RadliteStatus {
    guard(|| {
        let direction = classify(read_str(prediction, "prediction")?, read_str(truth, "truth")?)?;
        write_out(out, direction, "out")
    })
}

fn classify(prediction: &str, truth: &str) -> FfiResult<RadliteErrorDirection> {
    let ParseOutcome::Valid(gt) = rads::parse(truth) else {
        return fail(RadliteStatus::Unparseable, "ground truth is not a RADS category");
    };
    Ok(match classify_error(&rads::parse(prediction), &gt) {
        ErrorDirection::Exact => RadliteErrorDirection::Exact,
        ErrorDirection::Undercall => RadliteErrorDirection::Undercall,
        ErrorDirection::Overcall => RadliteErrorDirection::Overcall,
        ErrorDirection::SafeMisclassify => RadliteErrorDirection::SafeMisclassify,
        ErrorDirection::CrossSystemUndefined => RadliteErrorDirection::CrossSystemUndefined,
    })
}

/// Builds a grammar from an inventory TOML document.
///
/// # Safety
/// `toml` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radlite_inventory_from_toml(
    toml: *const c_char,
    out: *mut *mut RadliteInventory,
) -> RadliteStatus {
    guard(|| {
        let inventory = Inventory::from_toml(read_str(toml, "toml")?).map_err(map_error)?;
        let handle = Box::new(RadliteInventory { grammar: RadsGrammar::new(inventory) });
        write_out(out, Box::into_raw(handle), "out")
    })
}

/// A new handle on the inventory shipped with the library.
#[no_mangle]
pub extern "C" fn radlite_inventory_shipped() -> *mut RadliteInventory {
    Box::into_raw(Box::new(RadliteInventory { grammar: RadsGrammar::shipped().clone() }))
}

/// Number of categories in the inventory, or 0 for a null handle.
///
/// # Safety
/// `inventory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn radlite_inventory_len(inventory: *const RadliteInventory) -> usize {
    inventory.as_ref().map_or(0, |i| i.grammar.inventory().entries().len())
}

/// Like [`radlite_rads_canonical`] but against `inventory`.
///
/// # Safety
/// `inventory` must be a live handle; `text` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn radlite_inventory_canonical(
    inventory: *const RadliteInventory,
    text: *const c_char,
    out: *mut *mut c_char,
) -> RadliteStatus {
    guard(|| {
        let Some(inv) = inventory.as_ref() else {
            return fail(RadliteStatus::NullPointer, "`inventory` is null");
        };
        match inv.grammar.parse(read_str(text, "text")?) {
            ParseOutcome::Valid(c) => write_string(out, c.canonical()),
            ParseOutcome::Invalid(_) => fail(RadliteStatus::Unparseable, "no RADS category found"),
        }
    })
}

/// # Safety
/// `inventory` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn radlite_inventory_free(inventory: *mut RadliteInventory) {
    if !inventory.is_null() {
        drop(Box::from_raw(inventory));
    }
}

/// Removes reasoning spans and trims.
///
/// # Safety
/// `text` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn radlite_strip_think(text: *const c_char, out: *mut *mut c_char) -> RadliteStatus {
    guard(|| write_string(out, strip_think(read_str(text, "text")?)))
}

/// ROUGE-L precision, recall and F1 of `prediction` against `reference`.
///
/// # Safety
/// Both strings NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn radlite_rouge_l(
    prediction: *const c_char,
    reference: *const c_char,
    out: *mut RadliteRouge,
) -> RadliteStatus {
    guard(|| {
        let s = rouge_l_f1(read_str(prediction, "prediction")?, read_str(reference, "reference")?);
        write_out(out, RadliteRouge { precision: s.precision, recall: s.recall, f1: s.f1 }, "out")
    })
}

/// McNemar's test on per-sample correctness of two models over `len` samples.
///
/// # Safety
/// `a` and `b` must each point to `len` readable bools; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn radlite_mcnemar(
    a: *const bool,
    b: *const bool,
    len: usize,
    out: *mut RadliteTestResult,
) -> RadliteStatus {
    guard(|| {
        let a = read_slice(a, len, "a")?;
        let b = read_slice(b, len, "b")?;
        let pairs: Vec<(bool, bool)> = a.iter().copied().zip(b.iter().copied()).collect();
        let r = mcnemar(&pairs).map_err(map_error)?;
        write_out(out, test_result(r), "out")
    })
}

/// Wilcoxon signed-rank test on paired scores.
///
/// # Safety
/// `a` and `b` must each point to `len` readable doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn radlite_wilcoxon(
    a: *const f64,
    b: *const f64,
    len: usize,
    out: *mut RadliteTestResult,
) -> RadliteStatus {
    guard(|| {
        let r = wilcoxon_signed_rank(read_slice(a, len, "a")?, read_slice(b, len, "b")?).map_err(map_error)?;
        write_out(out, test_result(r), "out")
    })
}

#[no_mangle]
pub extern "C" fn radlite_severity_tally_new() -> *mut RadliteSeverityTally {
    Box::into_raw(Box::new(RadliteSeverityTally { counts: RadliteSeverityCounts::default() }))
}

/// Classifies one (prediction, truth) pair and counts it. An unparseable
/// truth leaves the tally unchanged.
///
/// # Safety
/// `tally` must be a live handle; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn radlite_severity_tally_add(
    tally: *mut RadliteSeverityTally,
    prediction: *const c_char,
    truth: *const c_char,
) -> RadliteStatus {
    guard(|| {
        let Some(t) = tally.as_mut() else {
            return fail(RadliteStatus::NullPointer, "`tally` is null");
        };
        let c = &mut t.counts;
        match classify(read_str(prediction, "prediction")?, read_str(truth, "truth")?)? {
            RadliteErrorDirection::Exact => c.exact += 1,
            RadliteErrorDirection::Undercall => c.undercall += 1,
            RadliteErrorDirection::Overcall => c.overcall += 1,
            RadliteErrorDirection::SafeMisclassify => c.safe_misclassify += 1,
            RadliteErrorDirection::CrossSystemUndefined => c.cross_system_undefined += 1,
        }
        Ok(())
    })
}

/// # Safety
/// `tally` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn radlite_severity_tally_counts(
    tally: *const RadliteSeverityTally,
    out: *mut RadliteSeverityCounts,
) -> RadliteStatus {
    guard(|| {
        let Some(t) = tally.as_ref() else {
            return fail(RadliteStatus::NullPointer, "`tally` is null");
        };
        write_out(out, t.counts, "out")
    })
}

/// # Safety
/// `tally` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn radlite_severity_tally_free(tally: *mut RadliteSeverityTally) {
    if !tally.is_null() {
        drop(Box::from_raw(tally));
    }
}
