//! C ABI for `fglab`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` functions
//! and released by the matching `*_free`. Every fallible call returns an
//! [`FglabStatus`]; on failure the message is available from
//! [`fglab_last_error`] on the same thread. Strings returned through out
//! parameters are owned by the caller and released with [`fglab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use clap::ValueEnum;
use fglab::algebra::Rat;
use fglab::cli::{self, LawFamily};
use fglab::fgl::FormalGroupLaw;
use fglab::gradedring::{build_linear_presentation, build_presentation, rho, Family, GradedPresentation};
use fglab::{ElementOrder, Error};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FglabStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// Bad argument: unknown name, invalid UTF-8, out-of-range value.
    Usage = 2,
    /// Input text did not parse.
    Parse = 3,
    /// A computation failed or a check did not hold.
    Verification = 4,
    /// A resource guard tripped.
    Guard = 5,
    /// Internal failure, including a caught panic.
    Internal = 6,
}

/// Formal group law over the rationals.
pub struct FglabLaw(FormalGroupLaw<Rat>);

/// Graded ring presentation.
pub struct FglabPresentation(GradedPresentation);

/// `rho` value reported for an element of infinite order.
pub const FGLAB_RHO_INFINITE: i64 = -1;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FglabStatus {
    match e {
        Error::Parse(_) | Error::Json(_) => FglabStatus::Parse,
        Error::Guard(_) => FglabStatus::Guard,
        Error::Internal(_) => FglabStatus::Internal,
        Error::Usage(_)
        | Error::UnknownVariable(_)
        | Error::ForbiddenVariable(_)
        | Error::DuplicateVariable(_)
        | Error::Io(_) => FglabStatus::Usage,
        _ => FglabStatus::Verification,
    }
}

struct Fail(FglabStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FglabStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FglabStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside fglab");
            FglabStatus::Internal
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(FglabStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `s` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail(FglabStatus::Usage, format!("{what} is not valid UTF-8")))
}

fn to_c(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s).map(CString::into_raw).map_err(|_| Fail(FglabStatus::Internal, "interior NUL in output".into()))
}

/// # Safety
/// `out` must be null or valid for a pointer write.
unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn fglab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fglab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fglab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build a law by family name (`additive`, `multiplicative`, `buchstaber`,
/// `tate`, `level2` .. `level6`) through total degree `order`.
///
/// # Safety
/// `family` must be a valid C string; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fglab_law_new(family: *const c_char, order: u32, out: *mut *mut FglabLaw) -> FglabStatus {
    guard(|| {
        let name = read_str(family, "family")?;
        let fam = LawFamily::from_str(name, true).map_err(|_| Fail(FglabStatus::Usage, format!("unknown family `{name}`")))?;
        if order < 2 {
            return Err(Fail(FglabStatus::Usage, "order must be at least 2".into()));
        }
        let law = cli::build_law(fam, order)?;
        write_out(out, Box::into_raw(Box::new(FglabLaw(law))), "out")
    })
}

/// # Safety
/// `law` must be null or a handle from [`fglab_law_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fglab_law_free(law: *mut FglabLaw) {
    if !law.is_null() {
        drop(Box::from_raw(law));
    }
}

/// Truncation order of the law, or 0 for a null handle.
///
/// # Safety
/// `law` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fglab_law_order(law: *const FglabLaw) -> u32 {
    law.as_ref().map_or(0, |l| l.0.order())
}

/// Coefficient `a[i, j]` as an expression string.
///
/// # Safety
/// `law` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fglab_law_coeff(law: *const FglabLaw, i: u32, j: u32, out: *mut *mut c_char) -> FglabStatus {
    guard(|| {
        let law = law.as_ref().ok_or_else(|| null("law"))?;
        if i + j > law.0.order() {
            return Err(Fail(FglabStatus::Usage, format!("a[{i},{j}] is beyond order {}", law.0.order())));
        }
        write_out(out, to_c(law.0.coeff(i, j).to_string())?, "out")
    })
}

/// Number of nonzero associativity defect coefficients through `order`.
///
/// # Safety
/// `law` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fglab_law_assoc_defect(law: *const FglabLaw, order: u32, out: *mut usize) -> FglabStatus {
    guard(|| {
        let law = law.as_ref().ok_or_else(|| null("law"))?;
        let n = law.0.assoc_defect(order)?.len();
        write_out(out, n, "out")
    })
}

/// Coefficient table of the law as JSON.
///
/// # Safety
/// `law` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fglab_law_to_json(law: *const FglabLaw, out: *mut *mut c_char) -> FglabStatus {
    guard(|| {
        let law = law.as_ref().ok_or_else(|| null("law"))?;
        let text = serde_json::to_string_pretty(&law.0.to_json()).map_err(Error::from)?;
        write_out(out, to_c(text)?, "out")
    })
}

/// Presentation of a coefficient ring (`RB`, `R2`, `R3`, `R4`, `RB/J2` ..
/// `RB/J6`) through weight `cutoff`. With `linear` nonzero only the relations
/// modulo decomposables are kept, which suffices for [`fglab_rho`].
///
/// # Safety
/// `ring` must be a valid C string; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fglab_presentation_new(
    ring: *const c_char,
    cutoff: u32,
    linear: bool,
    out: *mut *mut FglabPresentation,
) -> FglabStatus {
    guard(|| {
        let family: Family = read_str(ring, "ring")?.parse()?;
        let pres = if linear { build_linear_presentation(family, cutoff)? } else { build_presentation(family, cutoff)? };
        write_out(out, Box::into_raw(Box::new(FglabPresentation(pres))), "out")
    })
}

/// Load a presentation from its JSON form.
///
/// # Safety
/// `json` must be a valid C string; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fglab_presentation_from_json(
    json: *const c_char,
    out: *mut *mut FglabPresentation,
) -> FglabStatus {
    guard(|| {
        let parsed = serde_json::from_str(read_str(json, "json")?).map_err(Error::from)?;
        let pres = GradedPresentation::from_json(&parsed)?;
        write_out(out, Box::into_raw(Box::new(FglabPresentation(pres))), "out")
    })
}

/// Presentation as JSON.
///
/// # Safety
/// `pres` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fglab_presentation_to_json(pres: *const FglabPresentation, out: *mut *mut c_char) -> FglabStatus {
    guard(|| {
        let pres = pres.as_ref().ok_or_else(|| null("presentation"))?;
        let text = serde_json::to_string_pretty(&pres.0.to_json()).map_err(Error::from)?;
        write_out(out, to_c(text)?, "out")
    })
}

/// # Safety
/// `pres` must be null or a live handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fglab_presentation_free(pres: *mut FglabPresentation) {
    if !pres.is_null() {
        drop(Box::from_raw(pres));
    }
}

/// `rho(n)`: order of the class of `e_n` among indecomposables, with
/// [`FGLAB_RHO_INFINITE`] for infinite order.
///
/// # Safety
/// `pres` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fglab_rho(pres: *const FglabPresentation, n: u32, out: *mut i64) -> FglabStatus {
    guard(|| {
        let pres = pres.as_ref().ok_or_else(|| null("presentation"))?;
        let value = match rho(&pres.0, n)? {
            ElementOrder::Infinite => FGLAB_RHO_INFINITE,
            finite => finite.as_i64().ok_or_else(|| Fail(FglabStatus::Internal, "order exceeds i64".into()))?,
        };
        write_out(out, value, "out")
    })
}

/// Run a command line (without the program name) as the `fglab` binary
/// would. The report goes to `out_report` and the process exit code
/// (0 ok, 1 verification failed, 2 usage, 3 guard) to `out_exit`.
///
/// # Safety
/// `argv` must point to `argc` valid C strings; out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fglab_run_command(
    argv: *const *const c_char,
    argc: usize,
    out_report: *mut *mut c_char,
    out_exit: *mut i32,
) -> FglabStatus {
    guard(|| {
        if argv.is_null() && argc > 0 {
            return Err(null("argv"));
        }
        let mut args = vec!["fglab".to_string()];
        for k in 0..argc {
            args.push(read_str(*argv.add(k), "argument")?.to_string());
        }
        let (code, report) = cli::run(args);
        write_out(out_report, to_c(report)?, "out_report")?;
        write_out(out_exit, code, "out_exit")
    })
}
