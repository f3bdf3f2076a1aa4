//! C ABI over `auctionlab`.
//!
//! Instances and traces are opaque heap handles owned by the caller and
//! released with `al_instance_free` / `al_trace_free`. Every fallible call
//! returns an [`AlStatus`]; on failure a description is kept per thread and
//! can be fetched with `al_last_error_message`. Strings returned to the caller
//! must be released with `al_string_free`.
//!
//! Actions cross the boundary as two `int64_t` arrays (`first`, `second`),
//! one entry per keyword in arrival order, with `-1` in `first` meaning skip.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use auctionlab::format::{instance_to_json, parse_instance, trace_to_json};
use auctionlab::offline::{reverse_match, top_c};
use auctionlab::online::{run_online, run_online_matching, Greedy, Ranking, RankingSimulate};
use auctionlab::{execute, max_matching, opt_2paa, opt_2pm, Action, AuctionTrace, Instance, OracleError, SearchLimits};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInstance = 3,
    IllegalAction = 4,
    InvalidArgument = 5,
    SearchTooLarge = 6,
    OutOfRange = 7,
    Panic = 8,
}

/// Opaque auction instance.
pub struct AlInstance {
    inner: Instance,
}

/// Opaque executed trace; keeps its instance for id lookups.
pub struct AlTrace {
    instance: Instance,
    trace: AuctionTrace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn fail(status: AlStatus, msg: impl Into<String>) -> AlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg.into()));
    status
}

fn guard(f: impl FnOnce() -> AlStatus + UnwindSafe) -> AlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(f).unwrap_or_else(|_| fail(AlStatus::Panic, "internal panic"))
}

fn oracle_status(e: OracleError) -> AlStatus {
    let status = match e {
        OracleError::TooLarge { .. } => AlStatus::SearchTooLarge,
        _ => AlStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

unsafe fn put_trace(out: *mut *mut AlTrace, instance: &Instance, trace: AuctionTrace) -> AlStatus {
    *out = Box::into_raw(Box::new(AlTrace {
        instance: instance.clone(),
        trace,
    }));
    AlStatus::Ok
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> AlStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            AlStatus::Ok
        }
        Err(_) => fail(AlStatus::InvalidUtf8, "string contains NUL"),
    }
}

/// Copies the calling thread's last error message into a new string, or
/// returns NULL when the last call succeeded.
#[no_mangle]
pub extern "C" fn al_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match e.borrow().as_deref() {
        Some(msg) => CString::new(msg.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    })
}

#[no_mangle]
pub unsafe extern "C" fn al_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance document (NUL-terminated UTF-8 JSON).
#[no_mangle]
pub unsafe extern "C" fn al_instance_from_json(json: *const c_char, out: *mut *mut AlInstance) -> AlStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(AlStatus::NullPointer, "null argument");
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(e) => return fail(AlStatus::InvalidUtf8, e.to_string()),
        };
        match parse_instance(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(AlInstance { inner }));
                AlStatus::Ok
            }
            Err(e) => fail(AlStatus::InvalidInstance, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn al_instance_free(instance: *mut AlInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

#[no_mangle]
pub unsafe extern "C" fn al_instance_to_json(instance: *const AlInstance, out: *mut *mut c_char) -> AlStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            return fail(AlStatus::NullPointer, "null argument");
        }
        put_string(out, instance_to_json(&(*instance).inner))
    })
}

/// Number of keywords, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn al_instance_num_keywords(instance: *const AlInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.num_keywords())
}

/// Number of bidders, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn al_instance_num_bidders(instance: *const AlInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.num_bidders())
}

/// Executes `len` actions (`len` must equal the keyword count).
#[no_mangle]
pub unsafe extern "C" fn al_execute(
    instance: *const AlInstance,
    first: *const i64,
    second: *const i64,
    len: usize,
    out: *mut *mut AlTrace,
) -> AlStatus {
    guard(|| {
        if instance.is_null() || out.is_null() || (len > 0 && (first.is_null() || second.is_null())) {
            return fail(AlStatus::NullPointer, "null argument");
        }
        let inst = &(*instance).inner;
        let (fs, ss) = if len == 0 {
            (&[][..], &[][..])
        } else {
            (
                std::slice::from_raw_parts(first, len),
                std::slice::from_raw_parts(second, len),
            )
        };
        let mut actions = Vec::with_capacity(len);
        for (i, (&f, &s)) in fs.iter().zip(ss).enumerate() {
            if f < 0 {
                actions.push(Action::Skip);
            } else if s < 0 {
                return fail(
                    AlStatus::InvalidArgument,
                    format!("keyword {i}: assignment without a second bidder"),
                );
            } else {
                actions.push(Action::assign(f as usize, s as usize));
            }
        }
        match execute(inst, &actions) {
            Ok(t) => put_trace(out, inst, t),
            Err(e) => fail(AlStatus::IllegalAction, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn al_solve_top_c(instance: *const AlInstance, c: usize, out: *mut *mut AlTrace) -> AlStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            return fail(AlStatus::NullPointer, "null argument");
        }
        let inst = &(*instance).inner;
        match top_c(inst, c) {
            Ok(r) => put_trace(out, inst, r.trace),
            Err(e) => fail(AlStatus::InvalidArgument, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn al_solve_reverse_match(instance: *const AlInstance, out: *mut *mut AlTrace) -> AlStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            return fail(AlStatus::NullPointer, "null argument");
        }
        let inst = &(*instance).inner;
        match reverse_match(inst) {
            Ok(r) => put_trace(out, inst, r.trace),
            Err(e) => fail(AlStatus::InvalidArgument, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn al_solve_greedy(instance: *const AlInstance, out: *mut *mut AlTrace) -> AlStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            return fail(AlStatus::NullPointer, "null argument");
        }
        let inst = &(*instance).inner;
        match run_online(inst, &mut Greedy, 0) {
            Ok(t) => put_trace(out, inst, t),
            Err(e) => fail(AlStatus::IllegalAction, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn al_solve_ranking_simulate(
    instance: *const AlInstance,
    seed: u64,
    out: *mut *mut AlTrace,
) -> AlStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            return fail(AlStatus::NullPointer, "null argument");
        }
        let inst = &(*instance).inner;
        match run_online(inst, &mut RankingSimulate::new(), seed) {
            Ok(t) => put_trace(out, inst, t),
            Err(e) => fail(AlStatus::IllegalAction, e.to_string()),
        }
    })
}

/// Size of the first-price matching found by Ranking under the ranking drawn
/// from `seed`.
#[no_mangle]
pub unsafe extern "C" fn al_ranking_matching_size(instance: *const AlInstance, seed: u64, out: *mut usize) -> AlStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            return fail(AlStatus::NullPointer, "null argument");
        }
        match run_online_matching(&(*instance).inner, &mut Ranking::new(), seed) {
            Ok(m) => {
                *out = m.size();
                AlStatus::Ok
            }
            Err(e) => fail(AlStatus::IllegalAction, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn al_max_matching_size(instance: *const AlInstance, out: *mut usize) -> AlStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            return fail(AlStatus::NullPointer, "null argument");
        }
        *out = max_matching(&(*instance).inner).size();
        AlStatus::Ok
    })
}

/// Optimal 0/1 second-price matching; `max_nodes == 0` uses the default
/// search budget.
#[no_mangle]
pub unsafe extern "C" fn al_opt_2pm(instance: *const AlInstance, max_nodes: u64, out: *mut *mut AlTrace) -> AlStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            return fail(AlStatus::NullPointer, "null argument");
        }
        let inst = &(*instance).inner;
        match opt_2pm(inst, limits(max_nodes)) {
            Ok(r) => put_trace(out, inst, r.witness),
            Err(e) => oracle_status(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn al_opt_2paa(instance: *const AlInstance, max_nodes: u64, out: *mut *mut AlTrace) -> AlStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            return fail(AlStatus::NullPointer, "null argument");
        }
        let inst = &(*instance).inner;
        match opt_2paa(inst, limits(max_nodes)) {
            Ok(r) => put_trace(out, inst, r.witness),
            Err(e) => oracle_status(e),
        }
    })
}

fn limits(max_nodes: u64) -> SearchLimits {
    if max_nodes == 0 {
        SearchLimits::default()
    } else {
        SearchLimits::nodes(max_nodes)
    }
}

#[no_mangle]
pub unsafe extern "C" fn al_trace_free(trace: *mut AlTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Total revenue, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn al_trace_value(trace: *const AlTrace) -> u64 {
    trace.as_ref().map_or(0, |t| t.trace.value())
}

/// Number of steps (one per keyword), or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn al_trace_len(trace: *const AlTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.trace.steps.len())
}

/// Step `index`: bidder indices (-1 for a skip) and price.
#[no_mangle]
pub unsafe extern "C" fn al_trace_step(
    trace: *const AlTrace,
    index: usize,
    first: *mut i64,
    second: *mut i64,
    price: *mut u64,
) -> AlStatus {
    guard(|| {
        if trace.is_null() || first.is_null() || second.is_null() || price.is_null() {
            return fail(AlStatus::NullPointer, "null argument");
        }
        let steps: &[auctionlab::TraceStep] = &(*trace).trace.steps;
        let Some(step) = steps.get(index) else {
            return fail(AlStatus::OutOfRange, format!("step {index} out of range"));
        };
        let (f, s) = match step.action {
            Action::Skip => (-1, -1),
            Action::Assign { first, second } => (first as i64, second as i64),
        };
        *first = f;
        *second = s;
        *price = step.price;
        AlStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn al_trace_to_json(trace: *const AlTrace, out: *mut *mut c_char) -> AlStatus {
    guard(|| {
        if trace.is_null() || out.is_null() {
            return fail(AlStatus::NullPointer, "null argument");
        }
        let t = &*trace;
        put_string(out, trace_to_json(&t.instance, &t.trace))
    })
}
