//! C ABI for the workbench, so other languages can bind against it.
//!
//! Conventions:
//!
//! * All state lives behind the opaque [`MalcevAlgebra`] handle created by
//!   `malcev_algebra_parse` and released by `malcev_algebra_free`.
//! * Every function returns a status code; `MALCEV_OK` (0) means the call
//!   itself succeeded. Mathematical verdicts come back through out-pointers,
//!   never through the status code.
//! * Result strings are heap-allocated, UTF-8, NUL-terminated, and must be
//!   released with `malcev_string_free`. Structured results are JSON.
//! * On any non-zero status, `malcev_last_error_message` returns a
//!   description valid until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use malcev::algebra::AlgTerm;
use malcev::commutator::CommutatorEngine;
use malcev::error::Error;
use malcev::fileio::{parse_algebra_file, print_algebra_file, AlgebraFile};
use malcev::pwgen::{eq_commutator, eq_standard, MalcevCondition};
use malcev::rel::Partition;
use malcev::relcalc::{check_eq_exhaustive, con_lattice, ExhaustiveOutcome};
use malcev::searchcheck::{
    check_commutator_eq, check_fails_on_3set, find_condition_witness,
    scenario_taylor_counterexample, CommEqOutcome, SearchOutcome,
};
use malcev::termgraph::build_graph;
use malcev::termlang::{herringbone, RelTerm};

pub const MALCEV_OK: i32 = 0;
/// A required pointer argument was NULL.
pub const MALCEV_ERR_NULL_ARGUMENT: i32 = 1;
/// A string argument was not valid UTF-8.
pub const MALCEV_ERR_UTF8: i32 = 2;
/// Input could not be parsed (file, term, partition or condition document).
pub const MALCEV_ERR_PARSE: i32 = 3;
/// The inputs parsed but are mathematically unusable (not a congruence,
/// size mismatch, unbound symbol, ...).
pub const MALCEV_ERR_DOMAIN: i32 = 4;
/// A configured budget or capacity was exceeded.
pub const MALCEV_ERR_BUDGET: i32 = 5;

/// Opaque algebra handle: the parsed algebra plus its element aliases.
pub struct MalcevAlgebra {
    file: AlgebraFile,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(cleaned).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::File { .. } => MALCEV_ERR_PARSE,
        Error::BudgetExceeded { .. } | Error::CapacityExceeded { .. } => MALCEV_ERR_BUDGET,
        _ => MALCEV_ERR_DOMAIN,
    }
}

fn fail(err: &Error) -> i32 {
    set_error(&err.to_string());
    status_of(err)
}

/// # Safety
/// `s` must be NULL or a valid NUL-terminated string.
unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, i32> {
    if s.is_null() {
        set_error("argument is NULL");
        return Err(MALCEV_ERR_NULL_ARGUMENT);
    }
    unsafe { CStr::from_ptr(s) }.to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        MALCEV_ERR_UTF8
    })
}

unsafe fn alg_arg<'a>(h: *const MalcevAlgebra) -> Result<&'a MalcevAlgebra, i32> {
    if h.is_null() {
        set_error("algebra handle is NULL");
        return Err(MALCEV_ERR_NULL_ARGUMENT);
    }
    Ok(unsafe { &*h })
}

fn emit_string(text: String, out: *mut *mut c_char) -> i32 {
    if out.is_null() {
        set_error("output pointer is NULL");
        return MALCEV_ERR_NULL_ARGUMENT;
    }
    let cleaned = text.replace('\0', " ");
    match CString::new(cleaned) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            MALCEV_OK
        }
        Err(_) => {
            set_error("result contained an interior NUL");
            MALCEV_ERR_DOMAIN
        }
    }
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn malcev_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string produced by this library.
///
/// # Safety
/// `s` must have been returned by a `malcev_*` function and not freed yet.
#[no_mangle]
pub unsafe extern "C" fn malcev_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parses the algebra file format into a fresh handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn malcev_algebra_parse(
    text: *const c_char,
    out: *mut *mut MalcevAlgebra,
) -> i32 {
    if out.is_null() {
        set_error("output pointer is NULL");
        return MALCEV_ERR_NULL_ARGUMENT;
    }
    let text = match unsafe { str_arg(text) } {
        Ok(t) => t,
        Err(code) => return code,
    };
    match parse_algebra_file(text) {
        Ok(file) => {
            unsafe { *out = Box::into_raw(Box::new(MalcevAlgebra { file })) };
            MALCEV_OK
        }
        Err(e) => fail(&e),
    }
}

/// Releases an algebra handle.
///
/// # Safety
/// `h` must come from `malcev_algebra_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn malcev_algebra_free(h: *mut MalcevAlgebra) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Universe size of the algebra, or 0 when the handle is NULL.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn malcev_algebra_size(h: *const MalcevAlgebra) -> usize {
    match unsafe { alg_arg(h) } {
        Ok(a) => a.file.algebra.size(),
        Err(_) => 0,
    }
}

/// Renders the algebra in canonical file form.
///
/// # Safety
/// Pointer arguments as documented on the crate.
#[no_mangle]
pub unsafe extern "C" fn malcev_algebra_print(
    h: *const MalcevAlgebra,
    out: *mut *mut c_char,
) -> i32 {
    let a = match unsafe { alg_arg(h) } {
        Ok(a) => a,
        Err(code) => return code,
    };
    emit_string(print_algebra_file(&a.file), out)
}

/// Lists every congruence as a JSON array of block-notation strings, in
/// lattice enumeration order.
///
/// # Safety
/// Pointer arguments as documented on the crate.
#[no_mangle]
pub unsafe extern "C" fn malcev_congruences(
    h: *const MalcevAlgebra,
    out_json: *mut *mut c_char,
) -> i32 {
    let a = match unsafe { alg_arg(h) } {
        Ok(a) => a,
        Err(code) => return code,
    };
    match con_lattice(&a.file.algebra) {
        Ok(lattice) => {
            let strings: Vec<String> = lattice.iter().map(|p| p.to_string()).collect();
            emit_string(serde_json::to_string(&strings).expect("json"), out_json)
        }
        Err(e) => fail(&e),
    }
}

fn parse_congruence(file: &AlgebraFile, text: &str) -> Result<Partition, Error> {
    let p = Partition::parse(file.algebra.size(), text)?;
    file.algebra.check_congruence(&p)?;
    Ok(p)
}

/// Computes the TC-commutator `[alpha, beta]` of two congruences given in
/// block notation; the result is a block-notation string.
///
/// # Safety
/// Pointer arguments as documented on the crate.
#[no_mangle]
pub unsafe extern "C" fn malcev_commutator(
    h: *const MalcevAlgebra,
    alpha: *const c_char,
    beta: *const c_char,
    out: *mut *mut c_char,
) -> i32 {
    let a = match unsafe { alg_arg(h) } {
        Ok(a) => a,
        Err(code) => return code,
    };
    let (alpha, beta) = match (unsafe { str_arg(alpha) }, unsafe { str_arg(beta) }) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(code), _) | (_, Err(code)) => return code,
    };
    let run = || -> Result<String, Error> {
        let alpha = parse_congruence(&a.file, alpha)?;
        let beta = parse_congruence(&a.file, beta)?;
        let result = CommutatorEngine::new(&a.file.algebra).commutator(&alpha, &beta)?;
        Ok(result.to_string())
    };
    match run() {
        Ok(text) => emit_string(text, out),
        Err(e) => fail(&e),
    }
}

/// Checks `lhs ≤ rhs` over every congruence assignment. `out_holds` receives
/// 1 or 0; on failure `out_report` (optional) receives a JSON object naming
/// the assignment and witness pair.
///
/// # Safety
/// Pointer arguments as documented on the crate.
#[no_mangle]
pub unsafe extern "C" fn malcev_check_eq_exhaustive(
    h: *const MalcevAlgebra,
    lhs: *const c_char,
    rhs: *const c_char,
    out_holds: *mut i32,
    out_report: *mut *mut c_char,
) -> i32 {
    let a = match unsafe { alg_arg(h) } {
        Ok(a) => a,
        Err(code) => return code,
    };
    if out_holds.is_null() {
        set_error("out_holds is NULL");
        return MALCEV_ERR_NULL_ARGUMENT;
    }
    let (lhs, rhs) = match (unsafe { str_arg(lhs) }, unsafe { str_arg(rhs) }) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(code), _) | (_, Err(code)) => return code,
    };
    let run = || -> Result<ExhaustiveOutcome, Error> {
        let lhs = RelTerm::parse(lhs)?;
        let rhs = RelTerm::parse(rhs)?;
        check_eq_exhaustive(&a.file.algebra, &lhs, &rhs, None)
    };
    match run() {
        Ok(ExhaustiveOutcome::Holds) => {
            unsafe { *out_holds = 1 };
            if !out_report.is_null() {
                unsafe { *out_report = ptr::null_mut() };
            }
            MALCEV_OK
        }
        Ok(ExhaustiveOutcome::Fails { assignment, witness }) => {
            unsafe { *out_holds = 0 };
            if out_report.is_null() {
                return MALCEV_OK;
            }
            let named: std::collections::BTreeMap<String, String> =
                assignment.iter().map(|(k, p)| (k.clone(), p.to_string())).collect();
            let doc = serde_json::json!({ "assignment": named, "witness": [witness.0, witness.1] });
            emit_string(doc.to_string(), out_report)
        }
        Err(e) => fail(&e),
    }
}

/// Checks the commutator equation `lhs ≈_C rhs` for algebra terms such as
/// `plus(x1,neg(x2))`. Same out-parameter conventions as
/// `malcev_check_eq_exhaustive`.
///
/// # Safety
/// Pointer arguments as documented on the crate.
#[no_mangle]
pub unsafe extern "C" fn malcev_check_commutator_eq(
    h: *const MalcevAlgebra,
    lhs: *const c_char,
    rhs: *const c_char,
    out_holds: *mut i32,
    out_report: *mut *mut c_char,
) -> i32 {
    let a = match unsafe { alg_arg(h) } {
        Ok(a) => a,
        Err(code) => return code,
    };
    if out_holds.is_null() {
        set_error("out_holds is NULL");
        return MALCEV_ERR_NULL_ARGUMENT;
    }
    let (lhs, rhs) = match (unsafe { str_arg(lhs) }, unsafe { str_arg(rhs) }) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(code), _) | (_, Err(code)) => return code,
    };
    let run = || -> Result<CommEqOutcome, Error> {
        let lhs = AlgTerm::parse(lhs)?;
        let rhs = AlgTerm::parse(rhs)?;
        check_commutator_eq(&a.file.algebra, &lhs, &rhs, None)
    };
    match run() {
        Ok(CommEqOutcome::Holds) => {
            unsafe { *out_holds = 1 };
            if !out_report.is_null() {
                unsafe { *out_report = ptr::null_mut() };
            }
            MALCEV_OK
        }
        Ok(CommEqOutcome::Fails { theta, tuple }) => {
            unsafe { *out_holds = 0 };
            if out_report.is_null() {
                return MALCEV_OK;
            }
            let doc = serde_json::json!({ "theta": theta.to_string(), "tuple": tuple });
            emit_string(doc.to_string(), out_report)
        }
        Err(e) => fail(&e),
    }
}

/// Runs the Pixley-Wille construction on `lhs ≤ rhs` and returns the
/// machine-format JSON document. `k < 0` means no join fold; `commutator`
/// non-zero emits `≈_C` equations.
///
/// # Safety
/// Pointer arguments as documented on the crate.
#[no_mangle]
pub unsafe extern "C" fn malcev_pixley_wille(
    lhs: *const c_char,
    rhs: *const c_char,
    k: i64,
    commutator: i32,
    out_json: *mut *mut c_char,
) -> i32 {
    let (lhs, rhs) = match (unsafe { str_arg(lhs) }, unsafe { str_arg(rhs) }) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(code), _) | (_, Err(code)) => return code,
    };
    let run = || -> Result<String, Error> {
        let p = RelTerm::parse(lhs)?;
        let q = RelTerm::parse(rhs)?;
        let fold = if k < 0 { None } else { Some(k as usize) };
        let cond = if commutator != 0 {
            eq_commutator(&p, &q, fold)?
        } else {
            eq_standard(&p, &q, fold)?
        };
        Ok(cond.render_machine())
    };
    match run() {
        Ok(doc) => emit_string(doc, out_json),
        Err(e) => fail(&e),
    }
}

/// Renders the herringbone term `y^n` in the crate's term syntax.
///
/// # Safety
/// Pointer arguments as documented on the crate.
#[no_mangle]
pub unsafe extern "C" fn malcev_herringbone(n: usize, out: *mut *mut c_char) -> i32 {
    emit_string(herringbone(n).to_string(), out)
}

/// Builds the labelled graph of a `{meet, composition}`-term; `dot` non-zero
/// selects GraphViz output, otherwise one `xi -label-> xj` line per edge.
///
/// # Safety
/// Pointer arguments as documented on the crate.
#[no_mangle]
pub unsafe extern "C" fn malcev_graph(term: *const c_char, dot: i32, out: *mut *mut c_char) -> i32 {
    let term = match unsafe { str_arg(term) } {
        Ok(t) => t,
        Err(code) => return code,
    };
    let run = || -> Result<String, Error> {
        let t = RelTerm::parse(term)?;
        let g = build_graph(&t)?;
        Ok(if dot != 0 { g.render_dot() } else { g.render_edges() })
    };
    match run() {
        Ok(text) => emit_string(text, out),
        Err(e) => fail(&e),
    }
}

/// Searches the algebra for terms witnessing a machine-format condition
/// document. `budget < 0` selects the default. `out_found` receives 1 when a
/// witness exists and `out_json` a document with the terms; a proven absence
/// sets `out_found` to 0 with a JSON explanation. Running out of budget is
/// `MALCEV_ERR_BUDGET`.
///
/// # Safety
/// Pointer arguments as documented on the crate.
#[no_mangle]
pub unsafe extern "C" fn malcev_search_condition(
    h: *const MalcevAlgebra,
    condition_json: *const c_char,
    budget: i64,
    out_found: *mut i32,
    out_json: *mut *mut c_char,
) -> i32 {
    let a = match unsafe { alg_arg(h) } {
        Ok(a) => a,
        Err(code) => return code,
    };
    if out_found.is_null() {
        set_error("out_found is NULL");
        return MALCEV_ERR_NULL_ARGUMENT;
    }
    let text = match unsafe { str_arg(condition_json) } {
        Ok(t) => t,
        Err(code) => return code,
    };
    let run = || -> Result<SearchOutcome, Error> {
        let cond = MalcevCondition::parse_machine(text)?;
        let budget = if budget < 0 { None } else { Some(budget as usize) };
        find_condition_witness(&a.file.algebra, &cond, budget)
    };
    match run() {
        Ok(SearchOutcome::Witness(w)) => {
            unsafe { *out_found = 1 };
            let terms: std::collections::BTreeMap<&String, String> =
                w.assignments.iter().map(|(k, t)| (k, t.to_string())).collect();
            let doc = serde_json::json!({
                "found": true,
                "witness": terms,
                "stats": { "generated": w.stats.generated, "explored": w.stats.explored },
            });
            emit_string(doc.to_string(), out_json)
        }
        Ok(SearchOutcome::ProvenAbsent { stats }) => {
            unsafe { *out_found = 0 };
            let doc = serde_json::json!({
                "found": false,
                "proven_absent": true,
                "stats": { "generated": stats.generated, "explored": stats.explored },
            });
            emit_string(doc.to_string(), out_json)
        }
        Err(e) => fail(&e),
    }
}

/// Runs the 8-element counterexample scenario over the given herringbone
/// levels and returns the JSON report.
///
/// # Safety
/// `levels` must point to `levels_len` readable values (or be NULL with 0).
#[no_mangle]
pub unsafe extern "C" fn malcev_scenario_taylor_counterexample(
    levels: *const usize,
    levels_len: usize,
    out_json: *mut *mut c_char,
) -> i32 {
    let ns: Vec<usize> = if levels.is_null() {
        if levels_len != 0 {
            set_error("levels is NULL but levels_len is nonzero");
            return MALCEV_ERR_NULL_ARGUMENT;
        }
        vec![0, 1, 2, 3]
    } else {
        unsafe { std::slice::from_raw_parts(levels, levels_len) }.to_vec()
    };
    match scenario_taylor_counterexample(&ns) {
        Ok(report) => emit_string(report.render(), out_json),
        Err(e) => fail(&e),
    }
}

/// Looks for a failing pairwise-trivial-meet assignment of `lhs ≤ rhs` on
/// the 3-element set. `out_fails` receives 1 with a JSON description when a
/// failure exists, 0 otherwise.
///
/// # Safety
/// Pointer arguments as documented on the crate.
#[no_mangle]
pub unsafe extern "C" fn malcev_check_fails_on_3set(
    lhs: *const c_char,
    rhs: *const c_char,
    out_fails: *mut i32,
    out_json: *mut *mut c_char,
) -> i32 {
    if out_fails.is_null() {
        set_error("out_fails is NULL");
        return MALCEV_ERR_NULL_ARGUMENT;
    }
    let (lhs, rhs) = match (unsafe { str_arg(lhs) }, unsafe { str_arg(rhs) }) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(code), _) | (_, Err(code)) => return code,
    };
    let run = || -> Result<_, Error> {
        let p = RelTerm::parse(lhs)?;
        let q = RelTerm::parse(rhs)?;
        check_fails_on_3set(&p, &q)
    };
    match run() {
        Ok(Some(failure)) => {
            unsafe { *out_fails = 1 };
            if out_json.is_null() {
                return MALCEV_OK;
            }
            let named: std::collections::BTreeMap<String, String> =
                failure.assignment.iter().map(|(k, p)| (k.clone(), p.to_string())).collect();
            let doc = serde_json::json!({
                "assignment": named,
                "witness": [failure.witness.0, failure.witness.1],
            });
            emit_string(doc.to_string(), out_json)
        }
        Ok(None) => {
            unsafe { *out_fails = 0 };
            if !out_json.is_null() {
                unsafe { *out_json = ptr::null_mut() };
            }
            MALCEV_OK
        }
        Err(e) => fail(&e),
    }
}
