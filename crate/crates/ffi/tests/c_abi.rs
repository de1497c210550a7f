use std::ffi::{c_char, CStr, CString};
use std::ptr;

use fglab_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { fglab_string_free(s) };
    out
}

fn last_error() -> String {
    let p = fglab_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn law(family: &str, order: u32) -> *mut FglabLaw {
    let name = CString::new(family).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { fglab_law_new(name.as_ptr(), order, &mut h) }, FglabStatus::Ok);
    h
}

fn coeff(h: *const FglabLaw, i: u32, j: u32) -> String {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { fglab_law_coeff(h, i, j, &mut s) }, FglabStatus::Ok);
    take(s)
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(fglab_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn multiplicative_law_coefficients() {
    let h = law("multiplicative", 6);
    assert_eq!(unsafe { fglab_law_order(h) }, 6);
    assert_eq!(coeff(h, 1, 0), "1");
    assert_eq!(coeff(h, 1, 1), "beta");
    assert_eq!(coeff(h, 2, 1), "0");
    let mut n = usize::MAX;
    assert_eq!(unsafe { fglab_law_assoc_defect(h, 6, &mut n) }, FglabStatus::Ok);
    assert_eq!(n, 0);
    unsafe { fglab_law_free(h) };
}

#[test]
fn tate_law_is_associative_and_serializes() {
    let h = law("tate", 7);
    let mut n = usize::MAX;
    assert_eq!(unsafe { fglab_law_assoc_defect(h, 7, &mut n) }, FglabStatus::Ok);
    assert_eq!(n, 0);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { fglab_law_to_json(h, &mut s) }, FglabStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert!(v.is_object());
    unsafe { fglab_law_free(h) };
}

#[test]
fn bad_arguments_report_status_and_message() {
    let name = CString::new("nope").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { fglab_law_new(name.as_ptr(), 6, &mut h) }, FglabStatus::Usage);
    assert!(h.is_null());
    assert!(last_error().contains("nope"));

    assert_eq!(unsafe { fglab_law_new(ptr::null(), 6, &mut h) }, FglabStatus::NullPointer);
    let good = CString::new("additive").unwrap();
    assert_eq!(unsafe { fglab_law_new(good.as_ptr(), 6, ptr::null_mut()) }, FglabStatus::NullPointer);

    let h = law("additive", 4);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { fglab_law_coeff(h, 3, 3, &mut s) }, FglabStatus::Usage);
    assert!(s.is_null());
    assert_eq!(coeff(h, 1, 1), "0");
    assert!(fglab_last_error().is_null());
    unsafe { fglab_law_free(h) };
    unsafe { fglab_law_free(ptr::null_mut()) };
    unsafe { fglab_string_free(ptr::null_mut()) };
}

fn presentation(ring: &str, cutoff: u32, linear: bool) -> *mut FglabPresentation {
    let name = CString::new(ring).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { fglab_presentation_new(name.as_ptr(), cutoff, linear, &mut p) }, FglabStatus::Ok);
    p
}

fn rho_values(p: *const FglabPresentation, max_n: u32) -> Vec<i64> {
    (1..=max_n)
        .map(|n| {
            let mut r = 0;
            assert_eq!(unsafe { fglab_rho(p, n, &mut r) }, FglabStatus::Ok);
            r
        })
        .collect()
}

#[test]
fn rho_of_buchstaber_ring() {
    let p = presentation("RB", 8, true);
    let inf = FGLAB_RHO_INFINITE;
    assert_eq!(rho_values(p, 8), vec![inf, inf, inf, inf, 5, 2, 7, 2]);
    unsafe { fglab_presentation_free(p) };
}

#[test]
fn presentation_json_roundtrip() {
    let p = presentation("R2", 6, false);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { fglab_presentation_to_json(p, &mut s) }, FglabStatus::Ok);
    let json = CString::new(take(s)).unwrap();
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { fglab_presentation_from_json(json.as_ptr(), &mut q) }, FglabStatus::Ok);
    assert_eq!(rho_values(p, 6), rho_values(q, 6));
    unsafe {
        fglab_presentation_free(p);
        fglab_presentation_free(q);
    }

    let junk = CString::new("{\"generators\": 3}").unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { fglab_presentation_from_json(junk.as_ptr(), &mut r) }, FglabStatus::Parse);
    assert!(r.is_null());
}

fn run(args: &[&str]) -> (FglabStatus, i32, String) {
    let owned: Vec<CString> = args.iter().map(|a| CString::new(*a).unwrap()).collect();
    let ptrs: Vec<*const c_char> = owned.iter().map(|a| a.as_ptr()).collect();
    let mut report = ptr::null_mut();
    let mut code = -1;
    let status = unsafe { fglab_run_command(ptrs.as_ptr(), ptrs.len(), &mut report, &mut code) };
    let text = if report.is_null() { String::new() } else { take(report) };
    (status, code, text)
}

#[test]
fn run_command_matches_cli() {
    let (status, code, text) = run(&["assoc", "--family", "tate", "--order", "6"]);
    assert_eq!(status, FglabStatus::Ok);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["command"], "assoc");
    assert_eq!(v["status"], "ok");

    let (status, code, _) = run(&["no-such-command"]);
    assert_eq!(status, FglabStatus::Ok);
    assert_eq!(code, 2);

    let (status, code, text) = run(&["rho-table", "--ring", "RB/J4", "--max-n", "4"]);
    assert_eq!(status, FglabStatus::Ok);
    assert_eq!(code, 1);
    assert!(text.contains("first mismatch at n = 3"));
}
