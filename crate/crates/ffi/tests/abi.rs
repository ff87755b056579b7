use std::ffi::{CStr, CString};
use std::ptr;

use nucgrow_ffi::*;

fn last_error() -> String {
    let p = ng_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn params(n: f64, k: f64, h: u64, f: NgFlavor) -> *mut NgParams {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ng_params_new(n, k, h, f, &mut p) }, NgStatus::Ok);
    p
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(ng_version()) };
    assert_eq!(v.to_str().unwrap(), nucgrow::VERSION);
}

#[test]
fn invalid_params_reported() {
    let mut p = ptr::null_mut();
    let st = unsafe { ng_params_new(10.0, 20.0, 2, NgFlavor::Ds, &mut p) };
    assert_eq!(st, NgStatus::InvalidArgument);
    assert!(p.is_null());
    assert!(last_error().contains("k"));
    assert_eq!(unsafe { ng_params_new(10.0, 1.0, 2, NgFlavor::Ds, ptr::null_mut()) }, NgStatus::Null);
}

#[test]
fn relaxation_time_matches_library() {
    let p = params(100.0, 10.0, 2, NgFlavor::Ds);
    let mut tau = 0.0;
    assert_eq!(unsafe { ng_relaxation_time(p, 7, 1_000_000, &mut tau) }, NgStatus::Ok);
    let direct = nucgrow::kinetics::relaxation_time(
        &nucgrow::kinetics::ProcessParams::new(
            100.0,
            10.0,
            nucgrow::lattice::centred_square(2).unwrap(),
            nucgrow::kinetics::Flavor::Ds,
        )
        .unwrap(),
        7,
        1_000_000,
    )
    .unwrap();
    assert_eq!(tau, direct);
    assert_eq!(unsafe { ng_relaxation_time(ptr::null(), 7, 10, &mut tau) }, NgStatus::Null);
    unsafe { ng_params_free(p) };
}

#[test]
fn budget_status() {
    let p = params(1e4, 10.0, 50, NgFlavor::Ds);
    let mut tau = 0.0;
    assert_eq!(unsafe { ng_relaxation_time(p, 1, 1, &mut tau) }, NgStatus::Budget);
    assert!(last_error().contains("budget"));
    unsafe { ng_params_free(p) };
}

#[test]
fn trace_round_trip() {
    let p = params(100.0, 10.0, 3, NgFlavor::Ks);
    let xy = [0i64, 0];
    let stop = NgStopRule { kind: NgStopKind::BoxFilled, arg: 0.0 };
    let mut tr = ptr::null_mut();
    assert_eq!(unsafe { ng_simulate(p, xy.as_ptr(), 1, stop, 3, 1_000_000, &mut tr) }, NgStatus::Ok);
    let mut len = 0;
    assert_eq!(unsafe { ng_trace_len(tr, &mut len) }, NgStatus::Ok);
    assert_eq!(len, 48);
    let mut ev = NgEvent { t: 0.0, x: 0, y: 0, cause: NgCause::Nucleation };
    let mut last = 0.0;
    for i in 0..len {
        assert_eq!(unsafe { ng_trace_event(tr, i, &mut ev) }, NgStatus::Ok);
        assert!(ev.t >= last);
        assert_ne!(ev.cause, NgCause::Nucleation);
        last = ev.t;
    }
    let mut t_end = 0.0;
    assert_eq!(unsafe { ng_trace_end_time(tr, &mut t_end) }, NgStatus::Ok);
    assert_eq!(t_end, last);
    assert_eq!(unsafe { ng_trace_event(tr, len, &mut ev) }, NgStatus::InvalidArgument);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let c = CString::new(path.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { ng_trace_write_jsonl(tr, c.as_ptr()) }, NgStatus::Ok);
    let read = nucgrow::kinetics::EventTrace::read_jsonl(std::io::BufReader::new(std::fs::File::open(&path).unwrap()))
        .unwrap();
    assert_eq!(read.len(), 48);
    let bad = CString::new("/nonexistent-dir/x.jsonl").unwrap();
    assert_eq!(unsafe { ng_trace_write_jsonl(tr, bad.as_ptr()) }, NgStatus::Io);
    unsafe {
        ng_trace_free(tr);
        ng_params_free(p);
    }
}

#[test]
fn stop_rule_argument_checked() {
    let p = params(100.0, 10.0, 3, NgFlavor::Ks);
    let stop = NgStopRule { kind: NgStopKind::SquareFilled, arg: 1.5 };
    let mut tr = ptr::null_mut();
    let xy = [0i64, 0];
    assert_eq!(unsafe { ng_simulate(p, xy.as_ptr(), 1, stop, 3, 100, &mut tr) }, NgStatus::InvalidArgument);
    assert_eq!(unsafe { ng_simulate(p, ptr::null(), 1, stop, 3, 100, &mut tr) }, NgStatus::Null);
    unsafe { ng_params_free(p) };
}

#[test]
fn droplet_ordering() {
    let p = params(1e3, 10.0, 6, NgFlavor::Ks);
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { ng_droplet_times(p, 5, 11, 1_000_000, &mut d) }, NgStatus::Ok);
    for m in 1..=5 {
        let (mut lo, mut hi, mut r) = (0.0, 0.0, 0.0);
        assert_eq!(unsafe { ng_droplet_t_minus(d, m, &mut lo) }, NgStatus::Ok);
        assert_eq!(unsafe { ng_droplet_t_plus(d, m, &mut hi) }, NgStatus::Ok);
        assert_eq!(unsafe { ng_droplet_t_rect(d, m, &mut r) }, NgStatus::Ok);
        assert!(lo <= hi);
    }
    let mut x = 0.0;
    assert_eq!(unsafe { ng_droplet_t_plus(d, 9, &mut x) }, NgStatus::InvalidArgument);
    unsafe {
        ng_droplet_free(d);
        ng_params_free(p);
    }
}

#[test]
fn closure_of_diagonal_pair() {
    let xy = [0i64, 0, 1, 1];
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ng_closure(xy.as_ptr(), 2, -5, 5, -5, 5, &mut s) }, NgStatus::Ok);
    let mut len = 0;
    assert_eq!(unsafe { ng_sites_len(s, &mut len) }, NgStatus::Ok);
    assert_eq!(len, 4);
    let (mut x, mut y) = (0, 0);
    assert_eq!(unsafe { ng_sites_get(s, 3, &mut x, &mut y) }, NgStatus::Ok);
    assert!((0..=1).contains(&x) && (0..=1).contains(&y));
    unsafe { ng_sites_free(s) };
    assert_eq!(unsafe { ng_closure(xy.as_ptr(), 2, 5, 6, 5, 6, &mut s) }, NgStatus::InvalidArgument);
}

#[test]
fn analytics() {
    let mut p = 0.0;
    assert_eq!(unsafe { ng_exp_sum_tail(1, 2.0, 2.0, &mut p) }, NgStatus::Ok);
    assert!((p - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    assert_eq!(unsafe { ng_exp_sum_tail(0, 2.0, 2.0, &mut p) }, NgStatus::InvalidArgument);
    let (mut r, mut tau) = (NgRegime::A, 0.0);
    assert_eq!(unsafe { ng_predict_tau(1e6, 1e3, &mut r, &mut tau) }, NgStatus::Ok);
    assert_eq!(r, NgRegime::B);
    assert!((tau - 1070.0).abs() < 1.0);
}

#[test]
fn free_null_is_noop() {
    unsafe {
        ng_params_free(ptr::null_mut());
        ng_trace_free(ptr::null_mut());
        ng_droplet_free(ptr::null_mut());
        ng_sites_free(ptr::null_mut());
    }
}
