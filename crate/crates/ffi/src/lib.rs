//! C ABI over the fraclearn library.
//!
//! Tutors and agents are opaque handles created by `*_new` functions and
//! released by the matching `*_free`. Every fallible call returns an
//! [`FlStatus`]; on failure the message is available from
//! [`fl_last_error_message`] on the same thread. Strings returned through
//! out-parameters are owned by the caller and must be released with
//! [`fl_string_free`]. Structured results are passed as JSON or CSV text.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fraclearn::logs::{learning_curve, parse_transactions};
use fraclearn::tutor::{Feedback, StepAction, Value};
use fraclearn::{Agent, AgentConfig, FieldId, Problem, Schema, TutorState};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    Tutor = 5,
    Panic = 6,
}

/// Opaque tutor state for one problem.
pub struct FlTutor(TutorState);

/// Opaque simulated learner.
pub struct FlAgent(Agent);

struct Failure(FlStatus, String);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FlStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(msg);
            FlStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(FlStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(FlStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(FlStatus::NullPointer, format!("{name} is null")))
}

unsafe fn handle<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(FlStatus::NullPointer, "handle is null".to_string()))
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

fn parse_err(e: impl std::fmt::Display) -> Failure {
    Failure(FlStatus::Parse, e.to_string())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
///
/// `s` must be null or a pointer obtained from this library that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn fl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a tutor for a problem written like `1/2+1/3` or `2/3*4/5`.
///
/// # Safety
///
/// `problem` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fl_tutor_new(problem: *const c_char, out: *mut *mut FlTutor) -> FlStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let p: Problem = str_arg(problem, "problem")?.parse().map_err(parse_err)?;
        *out = Box::into_raw(Box::new(FlTutor(TutorState::new(p))));
        Ok(())
    })
}

/// # Safety
///
/// `tutor` must be null or a handle from [`fl_tutor_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fl_tutor_free(tutor: *mut FlTutor) {
    if !tutor.is_null() {
        drop(Box::from_raw(tutor));
    }
}

/// Submits a value for a field. Boolean fields read `value != 0`. On success
/// `out_correct` receives the tutor's verdict.
///
/// # Safety
///
/// Pointers must be valid; `field` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn fl_tutor_check_step(
    tutor: *mut FlTutor,
    field: *const c_char,
    value: i64,
    out_correct: *mut bool,
) -> FlStatus {
    guard(|| {
        let t = handle(tutor)?;
        let out = out_arg(out_correct, "out_correct")?;
        let field: FieldId = str_arg(field, "field")?.parse().map_err(parse_err)?;
        let value = if field.is_boolean() { Value::Bool(value != 0) } else { Value::Int(value) };
        let fb = t
            .0
            .check_step(StepAction { field, value })
            .map_err(|e| Failure(FlStatus::Tutor, e.to_string()))?;
        *out = fb == Feedback::Correct;
        Ok(())
    })
}

/// Applies the next bottom-out hint and reports the demonstrated step.
/// Boolean values are reported as 0 or 1.
///
/// # Safety
///
/// Pointers must be valid. `out_field` receives an owned string.
#[no_mangle]
pub unsafe extern "C" fn fl_tutor_apply_hint(
    tutor: *mut FlTutor,
    out_field: *mut *mut c_char,
    out_value: *mut i64,
) -> FlStatus {
    guard(|| {
        let t = handle(tutor)?;
        let out_field = out_arg(out_field, "out_field")?;
        let out_value = out_arg(out_value, "out_value")?;
        let demo = t.0.apply_hint().map_err(|e| Failure(FlStatus::Tutor, e.to_string()))?;
        *out_value = match demo.value {
            Value::Int(v) => v,
            Value::Bool(b) => b as i64,
        };
        *out_field = owned(demo.field.to_string());
        Ok(())
    })
}

/// # Safety
///
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fl_tutor_is_done(tutor: *const FlTutor, out_done: *mut bool) -> FlStatus {
    guard(|| {
        let t = tutor.as_ref().ok_or_else(|| Failure(FlStatus::NullPointer, "handle is null".into()))?;
        *out_arg(out_done, "out_done")? = t.0.is_done();
        Ok(())
    })
}

/// Creates an agent from a JSON configuration. Null or empty `config_json`
/// selects the default whole-number-only configuration.
///
/// # Safety
///
/// `config_json` must be null or NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fl_agent_new(config_json: *const c_char, seed: u64, out: *mut *mut FlAgent) -> FlStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let config = if config_json.is_null() {
            AgentConfig::default()
        } else {
            match str_arg(config_json, "config_json")? {
                "" => AgentConfig::default(),
                s => serde_json::from_str(s).map_err(parse_err)?,
            }
        };
        *out = Box::into_raw(Box::new(FlAgent(Agent::new(config, seed))));
        Ok(())
    })
}

/// Restores an agent from a snapshot made by [`fl_agent_to_json`].
///
/// # Safety
///
/// `json` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fl_agent_from_json(json: *const c_char, out: *mut *mut FlAgent) -> FlStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let agent: Agent = serde_json::from_str(str_arg(json, "json")?).map_err(parse_err)?;
        *out = Box::into_raw(Box::new(FlAgent(agent)));
        Ok(())
    })
}

/// # Safety
///
/// `agent` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fl_agent_free(agent: *mut FlAgent) {
    if !agent.is_null() {
        drop(Box::from_raw(agent));
    }
}

/// Serializes the agent's skills, value tables, parameters and random state.
///
/// # Safety
///
/// Pointers must be valid. `out_json` receives an owned string.
#[no_mangle]
pub unsafe extern "C" fn fl_agent_to_json(agent: *const FlAgent, out_json: *mut *mut c_char) -> FlStatus {
    guard(|| {
        let a = agent.as_ref().ok_or_else(|| Failure(FlStatus::NullPointer, "handle is null".into()))?;
        let out = out_arg(out_json, "out_json")?;
        *out = owned(serde_json::to_string(&a.0).map_err(parse_err)?);
        Ok(())
    })
}

/// Works one problem to completion. `out_json` receives the first-attempt
/// records as a JSON array.
///
/// # Safety
///
/// Pointers must be valid; `problem` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn fl_agent_run_problem(
    agent: *mut FlAgent,
    problem: *const c_char,
    out_json: *mut *mut c_char,
) -> FlStatus {
    guard(|| {
        let a = handle(agent)?;
        let out = out_arg(out_json, "out_json")?;
        let p: Problem = str_arg(problem, "problem")?.parse().map_err(parse_err)?;
        let run = a.0.run_problem(p);
        *out = owned(serde_json::to_string(&run.records).map_err(parse_err)?);
        Ok(())
    })
}

/// Generates a practice sequence (`blocked-a`, `blocked-b`, `interleaved` or
/// `faded`) as a JSON array of problem ids.
///
/// # Safety
///
/// `schema` must be NUL-terminated; `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fl_sequence_generate(schema: *const c_char, seed: u64, out_json: *mut *mut c_char) -> FlStatus {
    guard(|| {
        let out = out_arg(out_json, "out_json")?;
        let schema: Schema = str_arg(schema, "schema")?
            .parse()
            .map_err(|e: String| Failure(FlStatus::InvalidArgument, e))?;
        *out = owned(schema.generate(seed).to_json());
        Ok(())
    })
}

/// Computes one student's learning curve from transaction CSV text and
/// returns it as CSV.
///
/// # Safety
///
/// String arguments must be NUL-terminated; `out_csv` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fl_learning_curve_csv(
    transactions_csv: *const c_char,
    student_id: *const c_char,
    out_csv: *mut *mut c_char,
) -> FlStatus {
    guard(|| {
        let out = out_arg(out_csv, "out_csv")?;
        let student = str_arg(student_id, "student_id")?;
        let logs = parse_transactions(str_arg(transactions_csv, "transactions_csv")?).map_err(parse_err)?;
        let log = logs
            .into_iter()
            .find(|l| l.student_id == student)
            .ok_or_else(|| Failure(FlStatus::InvalidArgument, format!("student {student:?} not found")))?;
        *out = owned(learning_curve(&log.first_attempts).to_csv());
        Ok(())
    })
}
