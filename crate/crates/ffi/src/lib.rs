//! C ABI for the `hetcorr` simulator.
//!
//! Handles are opaque heap objects owned by the caller and released with
//! the matching `hc_*_free` function. Every fallible call returns an
//! [`HcStatus`]; on failure a description is available from
//! [`hc_last_error_message`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hetcorr::channel::{path_loss, ChannelParams};
use hetcorr::harness::rng::replication_stream;
use hetcorr::harness::{self, HarnessError, RunConfig};
use hetcorr::interference::{conditional_success_rayleigh, Deployment, MacSpec};
use hetcorr::point_process::{Point, PointPattern, ProcessSpec, Window};
use hetcorr::Error;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    ParameterDomain = 4,
    SingularGeometry = 5,
    Runtime = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Axis-aligned sampling window.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HcWindow {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

/// Parsed run configuration.
pub struct HcConfig(RunConfig);

/// CSV document produced by [`hc_run`].
pub struct HcCsv(CString);

/// Sampled point pattern.
pub struct HcPattern(PointPattern);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: HcStatus, msg: impl Into<String>) -> HcStatus {
    set_error(msg);
    status
}

fn from_sim(e: Error) -> HcStatus {
    let status = match e {
        Error::ParameterDomain(_) | Error::InfiniteDelay(_) => HcStatus::ParameterDomain,
        Error::SingularGeometry(_) => HcStatus::SingularGeometry,
        Error::Usage(_) | Error::InvalidConfiguration(_) => HcStatus::Runtime,
    };
    fail(status, e.to_string())
}

fn from_harness(e: HarnessError) -> HcStatus {
    match e {
        HarnessError::Config(c) => fail(HcStatus::Config, c.to_string()),
        HarnessError::Runtime(s) => from_sim(s),
        HarnessError::Io(io) => fail(HcStatus::Runtime, io.to_string()),
    }
}

fn guard(body: impl FnOnce() -> HcStatus) -> HcStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|_| fail(HcStatus::Panic, "panic inside hetcorr"))
}

/// Message describing the last failure on this thread, or NULL if none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn hc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Parses a `key = value` configuration document (NUL-terminated UTF-8).
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_config_parse(text: *const c_char, out: *mut *mut HcConfig) -> HcStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(HcStatus::NullPointer, "null argument");
        }
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(HcStatus::InvalidUtf8, "config text is not UTF-8");
        };
        match harness::parse_config(text) {
            Ok(config) => {
                *out = Box::into_raw(Box::new(HcConfig(config)));
                HcStatus::Ok
            }
            Err(e) => fail(HcStatus::Config, e.to_string()),
        }
    })
}

/// # Safety
/// `config` must come from [`hc_config_parse`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn hc_config_free(config: *mut HcConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_config_set_seed(config: *mut HcConfig, seed: u64) -> HcStatus {
    match config.as_mut() {
        Some(c) => {
            c.0.seed = seed;
            HcStatus::Ok
        }
        None => fail(HcStatus::NullPointer, "null config"),
    }
}

/// Sets the worker-thread count (0 = one per core).
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_config_set_threads(config: *mut HcConfig, threads: usize) -> HcStatus {
    match config.as_mut() {
        Some(c) => {
            c.0.threads = threads;
            HcStatus::Ok
        }
        None => fail(HcStatus::NullPointer, "null config"),
    }
}

/// Runs the configured experiment; the CSV is returned in a new handle.
/// The config's `out` path is ignored.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_run(config: *const HcConfig, out: *mut *mut HcCsv) -> HcStatus {
    guard(|| {
        let (Some(config), false) = (config.as_ref(), out.is_null()) else {
            return fail(HcStatus::NullPointer, "null argument");
        };
        match harness::run(&config.0) {
            Ok(csv) => {
                let csv = CString::new(csv).expect("CSV has no interior NUL");
                *out = Box::into_raw(Box::new(HcCsv(csv)));
                HcStatus::Ok
            }
            Err(e) => from_harness(e),
        }
    })
}

/// NUL-terminated CSV text owned by the handle.
///
/// # Safety
/// `csv` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_csv_data(csv: *const HcCsv) -> *const c_char {
    csv.as_ref().map_or(ptr::null(), |c| c.0.as_ptr())
}

/// Length of the CSV text in bytes, excluding the terminator.
///
/// # Safety
/// `csv` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn hc_csv_len(csv: *const HcCsv) -> usize {
    csv.as_ref().map_or(0, |c| c.0.as_bytes().len())
}

/// # Safety
/// `csv` must come from [`hc_run`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn hc_csv_free(csv: *mut HcCsv) {
    if !csv.is_null() {
        drop(Box::from_raw(csv));
    }
}

/// `max(distance, r0)^(-alpha)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_path_loss(distance: f64, alpha: f64, r0: f64, out: *mut f64) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return fail(HcStatus::NullPointer, "null out");
        }
        let value = ChannelParams::new(alpha, r0, 0.0, 1.0).and_then(|p| path_loss(distance, &p));
        match value {
            Ok(v) => {
                *out = v;
                HcStatus::Ok
            }
            Err(e) => from_sim(e),
        }
    })
}

/// Fading- and ALOHA-averaged success probability of a link of length `d`
/// to a receiver at the origin, given `n` unit-power interferers at
/// `(xs[i], ys[i])`. `aloha_p = 1` means always on.
///
/// # Safety
/// `xs` and `ys` must each point to `n` doubles (or be NULL when `n == 0`);
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_conditional_success_rayleigh(
    d: f64,
    theta: f64,
    xs: *const f64,
    ys: *const f64,
    n: usize,
    alpha: f64,
    r0: f64,
    noise: f64,
    aloha_p: f64,
    out: *mut f64,
) -> HcStatus {
    guard(|| {
        if out.is_null() || (n > 0 && (xs.is_null() || ys.is_null())) {
            return fail(HcStatus::NullPointer, "null argument");
        }
        let (xs, ys) = if n == 0 {
            (&[][..], &[][..])
        } else {
            (std::slice::from_raw_parts(xs, n), std::slice::from_raw_parts(ys, n))
        };
        let result = (|| {
            let params = ChannelParams::new(alpha, r0, noise, 1.0)?;
            let mac = MacSpec::aloha(aloha_p)?;
            let points: Vec<Point> = xs.iter().zip(ys).map(|(&x, &y)| Point::new(x, y)).collect();
            let extent = points.iter().fold(d.abs() + 1.0, |m, p| m.max(p.x.abs()).max(p.y.abs()));
            let window = Window::centered_square(extent)?;
            let dep = Deployment::uniform(PointPattern::new(points, window)?, 1.0)?;
            conditional_success_rayleigh(d, theta, &dep, &mac, &params)
        })();
        match result {
            Ok(v) => {
                *out = v;
                HcStatus::Ok
            }
            Err(e) => from_sim(e),
        }
    })
}

unsafe fn sample_into(
    spec: ProcessSpec,
    window: HcWindow,
    seed: u64,
    stream: u64,
    out: *mut *mut HcPattern,
) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return fail(HcStatus::NullPointer, "null out");
        }
        let result = Window::new(window.x_min, window.x_max, window.y_min, window.y_max)
            .and_then(|w| spec.sample(&w, &mut replication_stream(seed, "ffi", stream)));
        match result {
            Ok(p) => {
                *out = Box::into_raw(Box::new(HcPattern(p)));
                HcStatus::Ok
            }
            Err(e) => from_sim(e),
        }
    })
}

/// Homogeneous PPP sample from substream `stream` of `seed`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_sample_ppp(
    lambda: f64,
    window: HcWindow,
    seed: u64,
    stream: u64,
    out: *mut *mut HcPattern,
) -> HcStatus {
    sample_into(ProcessSpec::HomogeneousPpp { lambda }, window, seed, stream, out)
}

/// Matérn type-II hard-core sample.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_sample_matern_hardcore(
    lambda_parent: f64,
    r_min: f64,
    window: HcWindow,
    seed: u64,
    stream: u64,
    out: *mut *mut HcPattern,
) -> HcStatus {
    sample_into(ProcessSpec::MaternHardCore { lambda_parent, r_min }, window, seed, stream, out)
}

/// Thomas cluster sample.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_sample_thomas(
    lambda_parent: f64,
    mean_daughters: f64,
    sigma: f64,
    window: HcWindow,
    seed: u64,
    stream: u64,
    out: *mut *mut HcPattern,
) -> HcStatus {
    sample_into(ProcessSpec::ThomasCluster { lambda_parent, mean_daughters, sigma }, window, seed, stream, out)
}

/// # Safety
/// `pattern` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn hc_pattern_len(pattern: *const HcPattern) -> usize {
    pattern.as_ref().map_or(0, |p| p.0.len())
}

/// Copies the points as interleaved `x, y` pairs into `xy`, which holds
/// room for `capacity` points. `written` receives the number of points.
///
/// # Safety
/// `pattern` must be a live handle, `xy` must hold `2 * capacity` doubles
/// and `written` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_pattern_copy_points(
    pattern: *const HcPattern,
    xy: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> HcStatus {
    guard(|| {
        let Some(pattern) = pattern.as_ref() else {
            return fail(HcStatus::NullPointer, "null pattern");
        };
        if written.is_null() || (xy.is_null() && !pattern.0.is_empty()) {
            return fail(HcStatus::NullPointer, "null argument");
        }
        let n = pattern.0.len();
        *written = n;
        if n > capacity {
            return fail(HcStatus::BufferTooSmall, format!("{n} points do not fit in {capacity}"));
        }
        if n > 0 {
            let dst = std::slice::from_raw_parts_mut(xy, 2 * n);
            for (chunk, p) in dst.chunks_exact_mut(2).zip(pattern.0.points()) {
                chunk[0] = p.x;
                chunk[1] = p.y;
            }
        }
        HcStatus::Ok
    })
}

/// # Safety
/// `pattern` must come from an `hc_sample_*` call or be NULL.
#[no_mangle]
pub unsafe extern "C" fn hc_pattern_free(pattern: *mut HcPattern) {
    if !pattern.is_null() {
        drop(Box::from_raw(pattern));
    }
}
