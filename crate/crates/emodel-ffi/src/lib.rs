//! C ABI for `emodel-lab`.
//!
//! Two opaque handles: [`EmodelConfig`] holds an experiment configuration and
//! [`EmodelReport`] holds the result of running it. Every fallible call returns an
//! [`EmodelStatus`]; the message of the last failure on the calling thread is available
//! from [`emodel_last_error`]. Panics never cross the boundary.
//!
//! Strings returned by a handle stay valid until that handle is freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use emodel_lab::cli::{self, ExperimentConfig, Outcome};

/// Status codes. `EMODEL_STATUS_OK` is zero; everything else is a failure.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmodelStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    Panic = 4,
}

/// Opaque experiment configuration.
pub struct EmodelConfig {
    inner: ExperimentConfig,
    text: Option<CString>,
}

/// Opaque result of [`emodel_run`].
pub struct EmodelReport {
    exit_code: i32,
    json: CString,
    csv: Option<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> Result<(), (EmodelStatus, String)>) -> EmodelStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            EmodelStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EmodelStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (EmodelStatus, String)> {
    if p.is_null() {
        return Err((EmodelStatus::NullPointer, format!("`{what}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (EmodelStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

fn to_cstring(s: String) -> CString {
    CString::new(s).expect("reports and configs contain no nul bytes")
}

/// Message of the last failed call on this thread; empty after a success. Never null.
#[no_mangle]
pub extern "C" fn emodel_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn emodel_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// A configuration with default settings and no command.
#[no_mangle]
pub extern "C" fn emodel_config_new() -> *mut EmodelConfig {
    Box::into_raw(Box::new(EmodelConfig {
        inner: ExperimentConfig::default(),
        text: None,
    }))
}

/// Parses flat `key = value` text into a new configuration written to `*out`.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn emodel_config_parse(text: *const c_char, out: *mut *mut EmodelConfig) -> EmodelStatus {
    guard(|| {
        if out.is_null() {
            return Err((EmodelStatus::NullPointer, "`out` is null".into()));
        }
        *out = ptr::null_mut();
        let text = read_str(text, "text")?;
        let inner = ExperimentConfig::parse(text).map_err(|e| (EmodelStatus::InvalidConfig, e.to_string()))?;
        *out = Box::into_raw(Box::new(EmodelConfig { inner, text: None }));
        Ok(())
    })
}

/// Sets one key, with the same names and syntax as the config file.
///
/// # Safety
/// `config` must come from this library; `key` and `value` must be nul-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn emodel_config_set(
    config: *mut EmodelConfig,
    key: *const c_char,
    value: *const c_char,
) -> EmodelStatus {
    guard(|| {
        let cfg = config
            .as_mut()
            .ok_or((EmodelStatus::NullPointer, "`config` is null".to_string()))?;
        let key = read_str(key, "key")?;
        let value = read_str(value, "value")?;
        let mut next = cfg.inner.clone();
        next.set(key, value)
            .map_err(|e| (EmodelStatus::InvalidConfig, e.to_string()))?;
        cfg.inner = next;
        Ok(())
    })
}

/// Serialised configuration; parses back to an equal configuration. Null on a null handle.
///
/// # Safety
/// `config` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn emodel_config_text(config: *mut EmodelConfig) -> *const c_char {
    match config.as_mut() {
        Some(cfg) => cfg.text.insert(to_cstring(cfg.inner.to_text())).as_ptr(),
        None => ptr::null(),
    }
}

/// # Safety
/// `config` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn emodel_config_free(config: *mut EmodelConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Validates and runs the experiment. A report is produced whenever the configuration is
/// valid, including for tolerance failures and numerical aborts; inspect
/// [`emodel_report_exit_code`]. Nothing is written to disk.
///
/// # Safety
/// `config` must come from this library and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn emodel_run(config: *const EmodelConfig, out: *mut *mut EmodelReport) -> EmodelStatus {
    guard(|| {
        if out.is_null() {
            return Err((EmodelStatus::NullPointer, "`out` is null".into()));
        }
        *out = ptr::null_mut();
        let cfg = config
            .as_ref()
            .ok_or((EmodelStatus::NullPointer, "`config` is null".to_string()))?;
        cfg.inner
            .validate()
            .map_err(|e| (EmodelStatus::InvalidConfig, e.to_string()))?;
        if cfg.inner.command.is_none() {
            return Err((EmodelStatus::InvalidConfig, "invalid value for `command`: not set".into()));
        }
        let outcome: Outcome = cli::run(&cfg.inner);
        *out = Box::into_raw(Box::new(EmodelReport {
            exit_code: outcome.code,
            json: to_cstring(outcome.report_json()),
            csv: outcome.csv.map(to_cstring),
        }));
        Ok(())
    })
}

/// 0 pass, 2 tolerance failure, 3 numerical abort, 64 usage; -1 on a null handle.
///
/// # Safety
/// `report` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn emodel_report_exit_code(report: *const EmodelReport) -> i32 {
    report.as_ref().map_or(-1, |r| r.exit_code)
}

/// JSON report with stable key order. Null on a null handle.
///
/// # Safety
/// `report` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn emodel_report_json(report: *const EmodelReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// Trajectory CSV for `simulate` and `lax-check`, null otherwise.
///
/// # Safety
/// `report` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn emodel_report_csv(report: *const EmodelReport) -> *const c_char {
    report
        .as_ref()
        .and_then(|r| r.csv.as_ref())
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// # Safety
/// `report` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn emodel_report_free(report: *mut EmodelReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
