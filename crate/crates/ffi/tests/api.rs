use std::ffi::{CStr, CString};
use std::ptr;

use vaw_ffi::*;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    vaw_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(vaw_last_error()).to_str().unwrap().to_string()
}

unsafe fn algebra(desc: &str) -> *mut VawAlgebra {
    let mut a = ptr::null_mut();
    assert_eq!(vaw_algebra_new(cs(desc).as_ptr(), &mut a), VawStatus::Ok);
    a
}

unsafe fn element(a: *const VawAlgebra, e: &str) -> *mut VawElement {
    let mut x = ptr::null_mut();
    assert_eq!(vaw_element_parse(a, cs(e).as_ptr(), &mut x), VawStatus::Ok, "{}", last_error());
    x
}

#[test]
fn products_through_handles() {
    unsafe {
        let a = algebra("wfree-sln:4");
        let mut n = 0usize;
        assert_eq!(vaw_algebra_generator_count(a, &mut n), VawStatus::Ok);
        assert_eq!(n, 3);
        let w3 = element(a, "W3");
        let mut p = ptr::null_mut();
        assert_eq!(vaw_element_nth_product(w3, 5, w3, &mut p), VawStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(vaw_element_to_json(p, &mut json), VawStatus::Ok);
        assert_eq!(take(json), r#"{"terms":[{"coeff":"1","legs":[]}]}"#);

        let mut no = ptr::null_mut();
        assert_eq!(vaw_element_normal_order(w3, w3, &mut no), VawStatus::Ok);
        let mut d = ptr::null_mut();
        assert_eq!(vaw_element_derivative(no, 1, &mut d), VawStatus::Ok);
        let expected = element(a, "2 * U(1,1,0,1)");
        let mut eq = false;
        assert_eq!(vaw_element_equal(d, expected, &mut eq), VawStatus::Ok);
        assert!(eq);

        let mut s = ptr::null_mut();
        assert_eq!(vaw_element_add(d, expected, &mut s), VawStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(vaw_element_pretty(s, &mut text), VawStatus::Ok);
        assert_eq!(take(text), "4 :DW3 W3:");

        for x in [w3, p, no, d, expected, s] {
            vaw_element_free(x);
        }
        vaw_algebra_free(a);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let a = algebra("wfree-sln:4");
        let mut x = ptr::null_mut();
        assert_eq!(vaw_element_parse(a, cs("prod(W3, )").as_ptr(), &mut x), VawStatus::ParseError);
        assert!(last_error().contains("offset 9"));
        assert!(x.is_null());
        assert_eq!(vaw_element_parse(a, cs("W11").as_ptr(), &mut x), VawStatus::DomainError);
        assert_eq!(vaw_element_parse(a, ptr::null(), &mut x), VawStatus::NullPointer);
        assert_eq!(vaw_element_parse(ptr::null(), cs("W3").as_ptr(), &mut x), VawStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(vaw_element_parse(a, bad.as_ptr().cast(), &mut x), VawStatus::InvalidUtf8);
        let mut b = ptr::null_mut();
        assert_eq!(vaw_algebra_new(cs("nope:1").as_ptr(), &mut b), VawStatus::DomainError);

        let other = algebra("wfree-sln:5");
        let (u, v) = (element(a, "W3"), element(other, "W3"));
        let mut p = ptr::null_mut();
        assert_eq!(vaw_element_nth_product(u, 0, v, &mut p), VawStatus::DomainError);
        assert_eq!(vaw_element_add(u, v, &mut p), VawStatus::DomainError);
        let mut eq = true;
        assert_eq!(vaw_element_equal(u, v, &mut eq), VawStatus::Ok);
        assert!(!eq);
        assert_eq!(last_error(), "");
        vaw_element_free(u);
        vaw_element_free(v);
        vaw_algebra_free(a);
        vaw_algebra_free(other);
        vaw_element_free(ptr::null_mut());
        vaw_string_free(ptr::null_mut());
    }
}

#[test]
fn run_command() {
    unsafe {
        let args: Vec<CString> = ["verify", "--identity", "wt14"].iter().map(|s| cs(s)).collect();
        let ptrs: Vec<_> = args.iter().map(|a| a.as_ptr()).collect();
        let mut out = ptr::null_mut();
        assert_eq!(vaw_run(ptrs.len(), ptrs.as_ptr(), &mut out), 0);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["holds"], true);

        let args: Vec<CString> = ["verify", "--identity", "odd8", "--param", "i=2"].iter().map(|s| cs(s)).collect();
        let ptrs: Vec<_> = args.iter().map(|a| a.as_ptr()).collect();
        assert_eq!(vaw_run(ptrs.len(), ptrs.as_ptr(), &mut out), 2);
        vaw_string_free(out);
    }
}

#[test]
fn header_declares_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/vaw.h")).unwrap();
    for f in [
        "vaw_algebra_new",
        "vaw_algebra_free",
        "vaw_element_parse",
        "vaw_element_nth_product",
        "vaw_element_normal_order",
        "vaw_element_derivative",
        "vaw_element_equal",
        "vaw_element_to_json",
        "vaw_string_free",
        "vaw_run",
        "vaw_last_error",
    ] {
        assert!(h.contains(&format!("{f}(")), "missing {f}");
    }
    assert!(h.contains("typedef struct VawAlgebra VawAlgebra;"));
    assert!(h.contains("VAW_STATUS_PARSE_ERROR = 3"));
    assert!(h.contains("VAW_STATUS_DOMAIN_ERROR = 4"));
}

#[test]
fn header_is_valid_c() {
    let Ok(cc) = which_cc() else { return };
    let h = concat!(env!("CARGO_MANIFEST_DIR"), "/include/vaw.h");
    let status = std::process::Command::new(cc).args(["-fsyntax-only", "-x", "c", "-std=c99", h]).status().unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "clang", "gcc"] {
        if std::process::Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
