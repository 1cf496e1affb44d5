//! C interface to the vaw engine.
//!
//! Every function returns a [`VawStatus`]; on failure a message is available from
//! [`vaw_last_error`] until the next call on the same thread. Handles are opaque and must
//! be released with the matching `_free` function. Strings returned through out-pointers
//! are owned by the caller and released with [`vaw_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use vaw_core::cli::{self, Algebra, CliError};
use vaw_core::fock::FieldElement;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VawStatus {
    Ok = 0,
    /// A predicate or command evaluated to false or infeasible.
    False = 2,
    ParseError = 3,
    DomainError = 4,
    NullPointer = 10,
    InvalidUtf8 = 11,
    Panic = 12,
}

/// A selected free-field algebra.
pub struct VawAlgebra {
    inner: Algebra,
}

/// An element of some algebra.
pub struct VawElement {
    inner: FieldElement,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

type Fallible<T> = Result<T, (VawStatus, String)>;

fn guard(f: impl FnOnce() -> Fallible<VawStatus>) -> VawStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            VawStatus::Panic
        }
    }
}

fn from_cli(e: CliError) -> (VawStatus, String) {
    let s = match e {
        CliError::Parse(_) => VawStatus::ParseError,
        _ => VawStatus::DomainError,
    };
    (s, e.to_string())
}

unsafe fn text<'a>(p: *const c_char) -> Fallible<&'a str> {
    if p.is_null() {
        return Err((VawStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (VawStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Fallible<&'a T> {
    p.as_ref().ok_or((VawStatus::NullPointer, "null handle".into()))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Fallible<VawStatus> {
    if out.is_null() {
        return Err((VawStatus::NullPointer, "null out-pointer".into()));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(VawStatus::Ok)
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Fallible<VawStatus> {
    if out.is_null() {
        return Err((VawStatus::NullPointer, "null out-pointer".into()));
    }
    *out = CString::new(s).map_err(|_| (VawStatus::DomainError, "interior NUL".into()))?.into_raw();
    Ok(VawStatus::Ok)
}

/// Message for the last failed call on this thread; empty after a success. Never null.
#[no_mangle]
pub extern "C" fn vaw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses an algebra description such as `wfree-sln:4`, `heis:2` or `oodd:3:1`.
///
/// # Safety
/// `desc` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vaw_algebra_new(desc: *const c_char, out: *mut *mut VawAlgebra) -> VawStatus {
    guard(|| {
        let alg = Algebra::parse(text(desc)?).map_err(from_cli)?;
        put(out, VawAlgebra { inner: alg })
    })
}

/// # Safety
/// `alg` must come from [`vaw_algebra_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn vaw_algebra_free(alg: *mut VawAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Number of generators of the algebra.
///
/// # Safety
/// `alg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vaw_algebra_generator_count(alg: *const VawAlgebra, out: *mut usize) -> VawStatus {
    guard(|| {
        let a = handle(alg)?;
        if out.is_null() {
            return Err((VawStatus::NullPointer, "null out-pointer".into()));
        }
        *out = a.inner.spec.len();
        Ok(VawStatus::Ok)
    })
}

/// Evaluates an expression in the element grammar.
///
/// # Safety
/// `alg` must be a live handle, `expr` a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vaw_element_parse(
    alg: *const VawAlgebra,
    expr: *const c_char,
    out: *mut *mut VawElement,
) -> VawStatus {
    guard(|| {
        let a = handle(alg)?;
        let x = a.inner.element(text(expr)?).map_err(from_cli)?;
        put(out, VawElement { inner: x })
    })
}

/// # Safety
/// `x` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn vaw_element_free(x: *mut VawElement) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

unsafe fn binary(
    a: *const VawElement,
    b: *const VawElement,
    out: *mut *mut VawElement,
    f: impl FnOnce(&FieldElement, &FieldElement) -> Result<FieldElement, String>,
) -> VawStatus {
    guard(|| {
        let (a, b) = (handle(a)?, handle(b)?);
        let r = f(&a.inner, &b.inner).map_err(|m| (VawStatus::DomainError, m))?;
        put(out, VawElement { inner: r })
    })
}

/// a_(n) b for any integer n; n = -1 is the normally ordered product.
///
/// # Safety
/// `a`, `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vaw_element_nth_product(
    a: *const VawElement,
    n: i64,
    b: *const VawElement,
    out: *mut *mut VawElement,
) -> VawStatus {
    binary(a, b, out, |x, y| x.nth_product(n, y).map_err(|e| e.to_string()))
}

/// :a b:
///
/// # Safety
/// As for [`vaw_element_nth_product`].
#[no_mangle]
pub unsafe extern "C" fn vaw_element_normal_order(
    a: *const VawElement,
    b: *const VawElement,
    out: *mut *mut VawElement,
) -> VawStatus {
    binary(a, b, out, |x, y| x.normal_order(y).map_err(|e| e.to_string()))
}

/// # Safety
/// As for [`vaw_element_nth_product`].
#[no_mangle]
pub unsafe extern "C" fn vaw_element_add(a: *const VawElement, b: *const VawElement, out: *mut *mut VawElement) -> VawStatus {
    binary(a, b, out, |x, y| {
        if x.spec() != y.spec() {
            return Err("elements belong to different algebras".into());
        }
        Ok(x.add(y))
    })
}

/// k-th derivative.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vaw_element_derivative(a: *const VawElement, k: u32, out: *mut *mut VawElement) -> VawStatus {
    guard(|| {
        let a = handle(a)?;
        put(out, VawElement { inner: a.inner.derivative_k(k) })
    })
}

/// Writes whether the two elements are equal; elements of different algebras are unequal.
///
/// # Safety
/// `a`, `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vaw_element_equal(a: *const VawElement, b: *const VawElement, out: *mut bool) -> VawStatus {
    guard(|| {
        let (a, b) = (handle(a)?, handle(b)?);
        if out.is_null() {
            return Err((VawStatus::NullPointer, "null out-pointer".into()));
        }
        *out = a.inner == b.inner;
        Ok(VawStatus::Ok)
    })
}

/// Element JSON, the same document the command line prints.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vaw_element_to_json(a: *const VawElement, out: *mut *mut c_char) -> VawStatus {
    guard(|| put_string(out, handle(a)?.inner.to_json().to_string()))
}

/// Human-readable rendering.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vaw_element_pretty(a: *const VawElement, out: *mut *mut c_char) -> VawStatus {
    guard(|| put_string(out, handle(a)?.inner.pretty()))
}

/// Runs a command-line invocation (without the program name) and returns its exit code;
/// the output is stored in `out`.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vaw_run(argc: usize, argv: *const *const c_char, out: *mut *mut c_char) -> i32 {
    let mut code = 0;
    let status = guard(|| {
        if argv.is_null() && argc > 0 {
            return Err((VawStatus::NullPointer, "null argv".into()));
        }
        let mut args = vec!["vaw".to_string()];
        for k in 0..argc {
            args.push(text(*argv.add(k))?.to_string());
        }
        let r = cli::run(args);
        code = r.code;
        put_string(out, r.output)
    });
    if status != VawStatus::Ok {
        return status as i32;
    }
    code
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn vaw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
