//! C ABI for `nucgrow`.
//!
//! Every fallible function returns an [`NgStatus`] and writes results
//! through out-pointers. On failure a message is available from
//! [`ng_last_error`] on the same thread. Objects are opaque handles created
//! by `ng_*_new`/producer functions and released by the matching `ng_*_free`.
//! Panics never cross the boundary; they surface as `NG_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nucgrow::analytics::{exp_sum_tail, predict_tau, Regime};
use nucgrow::bootstrap::closure;
use nucgrow::kinetics::{
    droplet_times, relaxation_time, simulate, Cause, DropletTimes, EventTrace, Flavor, KineticsError, ProcessParams,
    StopRule,
};
use nucgrow::lattice::{centred_square, Rect, Site, SiteSet};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NgStatus {
    Ok = 0,
    Null = 1,
    InvalidArgument = 2,
    Budget = 3,
    Io = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NgFlavor {
    Ds = 0,
    Ks = 1,
    ModifiedKs = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NgStopKind {
    OriginInfected = 0,
    SquareFilled = 1,
    RectReached = 2,
    TimeHorizon = 3,
    BoxFilled = 4,
}

/// A stop rule. `arg` is `m` for the square and rectangle rules and the
/// horizon for `TimeHorizon`; it is ignored otherwise.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NgStopRule {
    pub kind: NgStopKind,
    pub arg: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NgCause {
    Nucleation = 0,
    OneNeighbour = 1,
    TwoNeighbour = 2,
    Instantaneous = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgEvent {
    pub t: f64,
    pub x: i64,
    pub y: i64,
    pub cause: NgCause,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NgRegime {
    A = 0,
    B = 1,
    C = 2,
    Boundary = 3,
}

/// Process parameters on the box `S(halfwidth)`.
pub struct NgParams(ProcessParams);

/// A recorded event trace.
pub struct NgTrace(EventTrace);

/// Droplet observables of one KS run.
pub struct NgDroplet(DropletTimes);

/// A finite set of sites, in sorted order.
pub struct NgSites(Vec<Site>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("nul bytes removed")));
}

struct Failure(NgStatus, String);

impl From<KineticsError> for Failure {
    fn from(e: KineticsError) -> Self {
        let status = match e {
            KineticsError::Budget { .. } => NgStatus::Budget,
            _ => NgStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl std::fmt::Display) -> Failure {
    Failure(NgStatus::InvalidArgument, msg.to_string())
}

fn null(what: &str) -> Failure {
    Failure(NgStatus::Null, format!("{what} is null"))
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NgStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            NgStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Read `len` coordinate pairs `x0, y0, x1, y1, …` from `xy`.
unsafe fn read_sites(xy: *const i64, len: usize) -> Result<SiteSet, Failure> {
    if len == 0 {
        return Ok(SiteSet::new());
    }
    if xy.is_null() {
        return Err(null("xy"));
    }
    let flat = std::slice::from_raw_parts(xy, 2 * len);
    Ok(flat.chunks_exact(2).map(|c| Site::new(c[0], c[1])).collect())
}

fn flavor(f: NgFlavor) -> Flavor {
    match f {
        NgFlavor::Ds => Flavor::Ds,
        NgFlavor::Ks => Flavor::Ks,
        NgFlavor::ModifiedKs => Flavor::ModifiedKs,
    }
}

fn stop_rule(s: NgStopRule) -> Result<StopRule, Failure> {
    let count = || {
        if s.arg >= 0.0 && s.arg.fract() == 0.0 && s.arg < u64::MAX as f64 {
            Ok(s.arg as u64)
        } else {
            Err(invalid(format!("stop argument {} is not a nonnegative integer", s.arg)))
        }
    };
    Ok(match s.kind {
        NgStopKind::OriginInfected => StopRule::OriginInfected,
        NgStopKind::SquareFilled => StopRule::SquareFilled(count()?),
        NgStopKind::RectReached => StopRule::RectReached(count()?),
        NgStopKind::TimeHorizon if s.arg >= 0.0 => StopRule::TimeHorizon(s.arg),
        NgStopKind::TimeHorizon => return Err(invalid("time horizon must be nonnegative")),
        NgStopKind::BoxFilled => StopRule::BoxFilled,
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ng_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ng_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ng_params_new(
    n: f64,
    k: f64,
    halfwidth: u64,
    flavor_: NgFlavor,
    out_params: *mut *mut NgParams,
) -> NgStatus {
    guard(|| {
        let slot = out(out_params, "out_params")?;
        let bx = centred_square(halfwidth).map_err(invalid)?;
        let p = ProcessParams::new(n, k, bx, flavor(flavor_))?;
        *slot = Box::into_raw(Box::new(NgParams(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from [`ng_params_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ng_params_free(p: *mut NgParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Time the origin is first infected under DS dynamics.
///
/// # Safety
/// `params` must be a live handle and `out_tau` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ng_relaxation_time(
    params: *const NgParams,
    seed: u64,
    budget: u64,
    out_tau: *mut f64,
) -> NgStatus {
    guard(|| {
        let p = deref(params, "params")?;
        let slot = out(out_tau, "out_tau")?;
        *slot = relaxation_time(&p.0, seed, budget)?;
        Ok(())
    })
}

/// Run the chain from the `len` sites in `xy` (pairs `x, y`) until `stop`.
///
/// # Safety
/// `params` must be a live handle, `xy` must hold `2·len` values (or be
/// null with `len = 0`), and `out_trace` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ng_simulate(
    params: *const NgParams,
    xy: *const i64,
    len: usize,
    stop: NgStopRule,
    seed: u64,
    budget: u64,
    out_trace: *mut *mut NgTrace,
) -> NgStatus {
    guard(|| {
        let p = deref(params, "params")?;
        let slot = out(out_trace, "out_trace")?;
        let initial = read_sites(xy, len)?;
        let trace = simulate(&p.0, &initial, stop_rule(stop)?, seed, budget)?;
        *slot = Box::into_raw(Box::new(NgTrace(trace)));
        Ok(())
    })
}

/// # Safety
/// `trace` must be a live handle and `out_len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ng_trace_len(trace: *const NgTrace, out_len: *mut usize) -> NgStatus {
    guard(|| {
        *out(out_len, "out_len")? = deref(trace, "trace")?.0.len();
        Ok(())
    })
}

/// Final time of the run.
///
/// # Safety
/// `trace` must be a live handle and `out_t` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ng_trace_end_time(trace: *const NgTrace, out_t: *mut f64) -> NgStatus {
    guard(|| {
        *out(out_t, "out_t")? = deref(trace, "trace")?.0.t_end;
        Ok(())
    })
}

/// # Safety
/// `trace` must be a live handle and `out_event` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ng_trace_event(trace: *const NgTrace, index: usize, out_event: *mut NgEvent) -> NgStatus {
    guard(|| {
        let t = deref(trace, "trace")?;
        let slot = out(out_event, "out_event")?;
        let ev = t.0.events.get(index).ok_or_else(|| invalid(format!("event index {index} out of range")))?;
        let cause = match ev.cause {
            Cause::Nucleation => NgCause::Nucleation,
            Cause::OneNeighbour => NgCause::OneNeighbour,
            Cause::TwoNeighbour => NgCause::TwoNeighbour,
            Cause::Instantaneous => NgCause::Instantaneous,
        };
        *slot = NgEvent { t: ev.t, x: ev.site.x, y: ev.site.y, cause };
        Ok(())
    })
}

/// Write the trace as JSON lines to `path`.
///
/// # Safety
/// `trace` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ng_trace_write_jsonl(trace: *const NgTrace, path: *const c_char) -> NgStatus {
    guard(|| {
        let t = deref(trace, "trace")?;
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path).to_str().map_err(|_| invalid("path is not UTF-8"))?;
        let io = |e: std::io::Error| Failure(NgStatus::Io, format!("{path}: {e}"));
        let f = std::fs::File::create(path).map_err(io)?;
        t.0.write_jsonl(std::io::BufWriter::new(f)).map_err(io)
    })
}

/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ng_trace_free(trace: *mut NgTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// KS growth from the origin until `S(m)` is full.
///
/// # Safety
/// `params` must be a live handle and `out_droplet` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ng_droplet_times(
    params: *const NgParams,
    m: u64,
    seed: u64,
    budget: u64,
    out_droplet: *mut *mut NgDroplet,
) -> NgStatus {
    guard(|| {
        let p = deref(params, "params")?;
        let slot = out(out_droplet, "out_droplet")?;
        let d = droplet_times(&p.0, m, seed, budget)?;
        *slot = Box::into_raw(Box::new(NgDroplet(d)));
        Ok(())
    })
}

unsafe fn droplet_value(
    d: *const NgDroplet,
    m: u64,
    out_t: *mut f64,
    f: fn(&DropletTimes, u64) -> Option<f64>,
) -> NgStatus {
    guard(|| {
        let d = deref(d, "droplet")?;
        let slot = out(out_t, "out_t")?;
        *slot = f(&d.0, m).ok_or_else(|| invalid(format!("no value recorded for m={m}")))?;
        Ok(())
    })
}

/// # Safety
/// `d` must be a live handle and `out_t` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ng_droplet_t_minus(d: *const NgDroplet, m: u64, out_t: *mut f64) -> NgStatus {
    droplet_value(d, m, out_t, DropletTimes::t_minus)
}

/// # Safety
/// `d` must be a live handle and `out_t` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ng_droplet_t_plus(d: *const NgDroplet, m: u64, out_t: *mut f64) -> NgStatus {
    droplet_value(d, m, out_t, DropletTimes::t_plus)
}

/// # Safety
/// `d` must be a live handle and `out_t` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ng_droplet_t_rect(d: *const NgDroplet, m: u64, out_t: *mut f64) -> NgStatus {
    droplet_value(d, m, out_t, DropletTimes::t_rect)
}

/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ng_droplet_free(d: *mut NgDroplet) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// 2-neighbour bootstrap closure of the `len` sites in `xy` inside the box
/// `[x0, x1] × [y0, y1]`.
///
/// # Safety
/// `xy` must hold `2·len` values (or be null with `len = 0`) and
/// `out_sites` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ng_closure(
    xy: *const i64,
    len: usize,
    x0: i64,
    x1: i64,
    y0: i64,
    y1: i64,
    out_sites: *mut *mut NgSites,
) -> NgStatus {
    guard(|| {
        let slot = out(out_sites, "out_sites")?;
        let a = read_sites(xy, len)?;
        let bx = Rect::new(x0, x1, y0, y1).map_err(invalid)?;
        let c = closure(&a, &bx).map_err(invalid)?;
        *slot = Box::into_raw(Box::new(NgSites(c.sorted())));
        Ok(())
    })
}

/// # Safety
/// `sites` must be a live handle and `out_len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ng_sites_len(sites: *const NgSites, out_len: *mut usize) -> NgStatus {
    guard(|| {
        *out(out_len, "out_len")? = deref(sites, "sites")?.0.len();
        Ok(())
    })
}

/// # Safety
/// `sites` must be a live handle; `out_x` and `out_y` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ng_sites_get(sites: *const NgSites, index: usize, out_x: *mut i64, out_y: *mut i64) -> NgStatus {
    guard(|| {
        let s = deref(sites, "sites")?;
        let site = *s.0.get(index).ok_or_else(|| invalid(format!("site index {index} out of range")))?;
        *out(out_x, "out_x")? = site.x;
        *out(out_y, "out_y")? = site.y;
        Ok(())
    })
}

/// # Safety
/// `sites` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ng_sites_free(sites: *mut NgSites) {
    if !sites.is_null() {
        drop(Box::from_raw(sites));
    }
}

/// `P(X_1 + … + X_s ≤ t)` for i.i.d. exponentials of mean `lambda`.
///
/// # Safety
/// `out_p` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ng_exp_sum_tail(s: u64, lambda: f64, t: f64, out_p: *mut f64) -> NgStatus {
    guard(|| {
        let slot = out(out_p, "out_p")?;
        if s == 0 || !(lambda > 0.0) || !(t >= 0.0) {
            return Err(invalid("need s >= 1, lambda > 0 and t >= 0"));
        }
        *slot = exp_sum_tail(s, lambda, t);
        Ok(())
    })
}

/// Regime and predicted relaxation time for `(n, k)`.
///
/// # Safety
/// `out_regime` and `out_tau` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ng_predict_tau(n: f64, k: f64, out_regime: *mut NgRegime, out_tau: *mut f64) -> NgStatus {
    guard(|| {
        let r = out(out_regime, "out_regime")?;
        let t = out(out_tau, "out_tau")?;
        let p = predict_tau(n, k).map_err(invalid)?;
        *r = match p.regime {
            Regime::A => NgRegime::A,
            Regime::B => NgRegime::B,
            Regime::C => NgRegime::C,
            Regime::Boundary => NgRegime::Boundary,
        };
        *t = p.tau_predicted;
        Ok(())
    })
}
