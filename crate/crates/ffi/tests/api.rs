use std::ffi::{CStr, CString};
use std::ptr;

use wittop_ffi::*;

fn owned(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { wittop_string_free(s) };
    out
}

fn parse(s: &str, p: u64, len: usize) -> *mut WittopWitt {
    let c = CString::new(s).unwrap();
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { wittop_witt_parse(c.as_ptr(), p, 1, len, &mut w) }, WittopStatus::Ok);
    w
}

#[test]
fn witt_arithmetic() {
    let a = parse("[1;0]", 2, 2);
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(wittop_witt_add(a, a, &mut s), WittopStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(wittop_witt_to_string(s, &mut text), WittopStatus::Ok);
        assert_eq!(owned(text), "[0;1]");
        let two = parse("[0;1]", 2, 2);
        let mut eq = false;
        assert_eq!(wittop_witt_equal(s, two, &mut eq), WittopStatus::Ok);
        assert!(eq);
        let t = parse("[T;1]", 2, 2);
        let mut g = ptr::null_mut();
        assert_eq!(wittop_witt_embed(t, &mut g), WittopStatus::Ok);
        assert_eq!(owned(g), "T1^2 + 2");
        for h in [a, s, two, t] {
            wittop_witt_free(h);
        }
    }
}

#[test]
fn operators() {
    let op = CString::new("{d1}_{1/2}").unwrap();
    let mut q = ptr::null_mut();
    unsafe {
        assert_eq!(wittop_operator_parse(op.as_ptr(), 2, 1, 2, 4, 0, &mut q), WittopStatus::Ok);
        let w = parse("[T^2;0]", 2, 2);
        let mut out = ptr::null_mut();
        assert_eq!(wittop_operator_apply(q, w, &mut out), WittopStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(wittop_witt_to_string(out, &mut text), WittopStatus::Ok);
        assert_eq!(owned(text), "[0;0]");
        let mut qq = ptr::null_mut();
        assert_eq!(wittop_operator_compose(q, q, &mut qq), WittopStatus::Ok);
        let mut nf = ptr::null_mut();
        assert_eq!(wittop_operator_to_string(qq, &mut nf), WittopStatus::Ok);
        assert!(!owned(nf).is_empty());
        wittop_operator_free(q);
        wittop_operator_free(qq);
        wittop_witt_free(w);
        wittop_witt_free(out);
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("[1;").unwrap();
    let mut w = ptr::null_mut();
    unsafe {
        assert_eq!(wittop_witt_parse(bad.as_ptr(), 2, 1, 2, &mut w), WittopStatus::Parse);
        assert!(w.is_null());
        let msg = CStr::from_ptr(wittop_last_error()).to_str().unwrap();
        assert!(msg.contains("parse"), "{msg}");
        let ok = CString::new("[1]").unwrap();
        assert_eq!(wittop_witt_parse(ok.as_ptr(), 4, 1, 1, &mut w), WittopStatus::InvalidInput);
        assert_eq!(wittop_witt_parse(ptr::null(), 2, 1, 1, &mut w), WittopStatus::NullPointer);
        assert_eq!(wittop_witt_add(ptr::null(), ptr::null(), &mut w), WittopStatus::NullPointer);
        let a = parse("[1;0]", 2, 2);
        let b = parse("[1;0;0]", 2, 3);
        assert_eq!(wittop_witt_add(a, b, &mut w), WittopStatus::InvalidInput);
        wittop_witt_free(a);
        wittop_witt_free(b);
        // success clears the message
        assert_eq!(wittop_witt_parse(ok.as_ptr(), 2, 1, 1, &mut w), WittopStatus::Ok);
        assert_eq!(CStr::from_ptr(wittop_last_error()).to_bytes().len(), 0);
        wittop_witt_free(w);
    }
}

#[test]
fn verify_report() {
    let suite = CString::new("identities").unwrap();
    let (mut passed, mut report) = (false, ptr::null_mut());
    unsafe {
        assert_eq!(wittop_verify(suite.as_ptr(), 1, 2, &mut passed, &mut report), WittopStatus::Ok);
    }
    assert!(passed);
    assert!(owned(report).contains("\"schema\": 1"));
    let bad = CString::new("nope").unwrap();
    unsafe {
        assert_eq!(wittop_verify(bad.as_ptr(), 1, 2, &mut passed, &mut report), WittopStatus::InvalidInput);
    }
}
