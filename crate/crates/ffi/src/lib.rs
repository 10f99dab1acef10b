//! C ABI for `harmonic-sieve`.
//!
//! Tables are handed out as opaque `HsvTable` pointers that the caller owns
//! and releases with `hsv_table_free`. Every fallible function returns an
//! `HsvStatus` and writes its result through an out-pointer; on failure the
//! message is available from `hsv_last_error_message` on the same thread.
//! Strings returned by the library are freed with `hsv_string_free`.
//!
//! No function unwinds across the boundary: a panic is reported as
//! `HSV_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use harmonic_sieve::equivalence::compare_constructions;
use harmonic_sieve::goldbach::{decompose_weak, verify_range, VerifyConfig};
use harmonic_sieve::plot::{render_predefined, FigureId, PlotSpec};
use harmonic_sieve::{
    classical_sieve, materialize, read_cache, spawn_construction, write_cache, zero_cross, Class,
    ClassificationTable, Error, SieveTerm, SpawnRule, Variant,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsvStatus {
    Ok = 0,
    /// Two constructions classify some number differently. Output is still written.
    Divergence = 1,
    Config = 2,
    Capacity = 3,
    /// A weak Goldbach counterexample candidate. Output is still written where
    /// the function produces a report.
    Counterexample = 4,
    OutOfRange = 5,
    Io = 6,
    Corrupt = 7,
    Complexity = 8,
    NullPointer = 9,
    InvalidUtf8 = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsvVariant {
    Full = 0,
    OddOnly = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsvSpawnRule {
    CaseI = 1,
    CaseII = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsvClass {
    Survivor = 0,
    Crossed = 1,
    Untouched = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HsvTriple {
    pub p1: u64,
    pub p2: u64,
    pub p3: u64,
}

/// Opaque classification table.
pub struct HsvTable {
    inner: ClassificationTable,
}

impl From<HsvVariant> for Variant {
    fn from(v: HsvVariant) -> Self {
        match v {
            HsvVariant::Full => Variant::Full,
            HsvVariant::OddOnly => Variant::OddOnly,
        }
    }
}

impl From<HsvSpawnRule> for SpawnRule {
    fn from(r: HsvSpawnRule) -> Self {
        match r {
            HsvSpawnRule::CaseI => SpawnRule::CaseI,
            HsvSpawnRule::CaseII => SpawnRule::CaseII,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Utf8(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn status_of(err: &Error) -> HsvStatus {
    match err {
        Error::Config(_) => HsvStatus::Config,
        Error::Capacity { .. } => HsvStatus::Capacity,
        Error::OutOfRange { .. } => HsvStatus::OutOfRange,
        Error::NoTripleFound(_) => HsvStatus::Counterexample,
        Error::Complexity(_) => HsvStatus::Complexity,
        Error::Corrupt { .. } => HsvStatus::Corrupt,
        Error::Io(_) => HsvStatus::Io,
        Error::Json(_) => HsvStatus::Config,
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<HsvStatus, Failure>) -> HsvStatus {
    set_last_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(name))) => {
            set_last_error(&format!("{name} must not be null"));
            HsvStatus::NullPointer
        }
        Ok(Err(Failure::Utf8(name))) => {
            set_last_error(&format!("{name} is not valid UTF-8"));
            HsvStatus::InvalidUtf8
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            HsvStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn table_ref<'a>(p: *const HsvTable) -> Result<&'a ClassificationTable, Failure> {
    p.as_ref().map(|t| &t.inner).ok_or(Failure::Null("table"))
}

unsafe fn path_arg(p: *const c_char, name: &'static str) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Utf8(name))?;
    Ok(PathBuf::from(s))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s)
        .expect("library output has no NUL bytes")
        .into_raw()
}

fn boxed(table: ClassificationTable) -> *mut HsvTable {
    Box::into_raw(Box::new(HsvTable { inner: table }))
}

/// Message for the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn hsv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Sieves `[2, bound]` with the segmented classical sieve.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one table pointer.
#[no_mangle]
pub unsafe extern "C" fn hsv_classical_sieve(bound: u64, out: *mut *mut HsvTable) -> HsvStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = boxed(classical_sieve(bound)?);
        Ok(HsvStatus::Ok)
    })
}

/// Spawns a harmonic construction over `[2, bound]` and materializes it.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one table pointer.
#[no_mangle]
pub unsafe extern "C" fn hsv_materialize(
    variant: HsvVariant,
    rule: HsvSpawnRule,
    bound: u64,
    odd_primes_only: bool,
    out: *mut *mut HsvTable,
) -> HsvStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let construction = spawn_construction(variant.into(), rule.into(), bound, odd_primes_only)?;
        *out = boxed(materialize(&construction)?);
        Ok(HsvStatus::Ok)
    })
}

/// Releases a table. Null is ignored.
///
/// # Safety
/// `table` must be null or a pointer obtained from this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn hsv_table_free(table: *mut HsvTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Upper bound of the table, or 0 for a null table.
///
/// # Safety
/// `table` must be null or a live table pointer.
#[no_mangle]
pub unsafe extern "C" fn hsv_table_bound(table: *const HsvTable) -> u64 {
    table.as_ref().map_or(0, |t| t.inner.bound())
}

/// Number of primes `<= x`.
///
/// # Safety
/// `table` must be a live table pointer and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hsv_table_prime_count(
    table: *const HsvTable,
    x: u64,
    out: *mut u64,
) -> HsvStatus {
    guard(|| {
        let t = table_ref(table)?;
        let out = out_ref(out, "out")?;
        *out = t.prime_count(x)?;
        Ok(HsvStatus::Ok)
    })
}

/// Classification of `n`.
///
/// # Safety
/// `table` must be a live table pointer and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hsv_table_classify(
    table: *const HsvTable,
    n: u64,
    out: *mut HsvClass,
) -> HsvStatus {
    guard(|| {
        let t = table_ref(table)?;
        let out = out_ref(out, "out")?;
        *out = match t.class(n)? {
            Class::Survivor => HsvClass::Survivor,
            Class::Crossed => HsvClass::Crossed,
            Class::Untouched => HsvClass::Untouched,
        };
        Ok(HsvStatus::Ok)
    })
}

/// Writes the table as an HSV1 cache file.
///
/// # Safety
/// `table` must be a live table pointer and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hsv_write_cache(table: *const HsvTable, path: *const c_char) -> HsvStatus {
    guard(|| {
        let t = table_ref(table)?;
        write_cache(t, &path_arg(path, "path")?)?;
        Ok(HsvStatus::Ok)
    })
}

/// Loads an HSV1 cache file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hsv_read_cache(path: *const c_char, out: *mut *mut HsvTable) -> HsvStatus {
    guard(|| {
        let path = path_arg(path, "path")?;
        let out = out_ref(out, "out")?;
        *out = boxed(read_cache(&path)?);
        Ok(HsvStatus::Ok)
    })
}

/// Whether the term anchored at `anchor` zero-crosses `n`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hsv_zero_cross(
    variant: HsvVariant,
    anchor: u64,
    n: u64,
    out: *mut bool,
) -> HsvStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = zero_cross(SieveTerm::new(anchor, variant.into())?, n);
        Ok(HsvStatus::Ok)
    })
}

/// Lexicographically smallest odd-prime triple for odd `n > 7`.
/// Returns `HSV_STATUS_COUNTEREXAMPLE` if none exists within the table.
///
/// # Safety
/// `table` must be a live table pointer and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hsv_decompose_weak(
    table: *const HsvTable,
    n: u64,
    out: *mut HsvTriple,
) -> HsvStatus {
    guard(|| {
        let t = table_ref(table)?;
        let out = out_ref(out, "out")?;
        let [p1, p2, p3] = decompose_weak(n, t)?.primes();
        *out = HsvTriple { p1, p2, p3 };
        Ok(HsvStatus::Ok)
    })
}

/// Compares the Case I and Case II constructions and returns the report as
/// JSON. `HSV_STATUS_DIVERGENCE` still sets `out_json`.
///
/// # Safety
/// `out_json` must be valid for one write; free the string with
/// `hsv_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hsv_compare_json(
    variant: HsvVariant,
    bound: u64,
    odd_primes_only: bool,
    out_json: *mut *mut c_char,
) -> HsvStatus {
    guard(|| {
        let out = out_ref(out_json, "out_json")?;
        let report = compare_constructions(variant.into(), bound, odd_primes_only)?;
        *out = into_c_string(serde_json::to_string(&report).map_err(Error::from)?);
        Ok(if report.equivalent() {
            HsvStatus::Ok
        } else {
            HsvStatus::Divergence
        })
    })
}

/// Verifies the weak Goldbach property over `[lo, hi]` and returns the
/// report as JSON. `checkpoint_path` may be null. A `checkpoint_every` or
/// `workers` of 0 selects the default. `HSV_STATUS_COUNTEREXAMPLE` still sets
/// `out_json`.
///
/// # Safety
/// `table` must be a live table pointer, `checkpoint_path` null or a
/// NUL-terminated string, and `out_json` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hsv_verify_json(
    table: *const HsvTable,
    lo: u64,
    hi: u64,
    checkpoint_path: *const c_char,
    checkpoint_every: u64,
    workers: u32,
    out_json: *mut *mut c_char,
) -> HsvStatus {
    guard(|| {
        let t = table_ref(table)?;
        let out = out_ref(out_json, "out_json")?;
        let mut cfg = VerifyConfig::new(lo, hi);
        if !checkpoint_path.is_null() {
            cfg = cfg.checkpoint(path_arg(checkpoint_path, "checkpoint_path")?);
        }
        if checkpoint_every > 0 {
            cfg = cfg.every(checkpoint_every);
        }
        if workers > 0 {
            cfg = cfg.workers(workers as usize);
        }
        let report = verify_range(&cfg, t)?;
        *out = into_c_string(report.to_json()?);
        Ok(if report.success {
            HsvStatus::Ok
        } else {
            set_last_error(&format!("counterexample candidates {:?}", report.failures));
            HsvStatus::Counterexample
        })
    })
}

/// Renders a predefined figure (for example `"full23"` or `"odd_all"`) as SVG.
///
/// # Safety
/// `figure_id` must be a NUL-terminated string and `out_svg` valid for one
/// write; free the string with `hsv_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hsv_render_figure(
    figure_id: *const c_char,
    out_svg: *mut *mut c_char,
) -> HsvStatus {
    guard(|| {
        if figure_id.is_null() {
            return Err(Failure::Null("figure_id"));
        }
        let id = CStr::from_ptr(figure_id)
            .to_str()
            .map_err(|_| Failure::Utf8("figure_id"))?;
        let out = out_ref(out_svg, "out_svg")?;
        let figure: FigureId = id.parse()?;
        *out = into_c_string(render_predefined(&PlotSpec::for_figure(figure))?);
        Ok(HsvStatus::Ok)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string obtained from this library that has not been
/// freed yet.
#[no_mangle]
pub unsafe extern "C" fn hsv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hsv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
