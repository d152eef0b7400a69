//! C ABI over `cvphase`.
//!
//! Every fallible call returns a [`CvpStatus`]; results go through out-pointers.
//! On failure the message is available from [`cvp_last_error_message`] on the
//! same thread. Handles are opaque and must be released with their `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cvphase::error::Error;
use cvphase::gaussian::{covariance_from_squeezing, wigner_gaussian, GaussianState, PhasePoint, SqueezingParams};
use cvphase::pseudospin::{bw_triple, gkmr_triple, larsson_triple, maximize_bell, SpinTriple};
use cvphase::{infotheory, wavepacket_chsh as wp};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Truncation = 3,
    Numerical = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvpSpinFamily {
    Bw = 0,
    Gkmr = 1,
    Larsson = 2,
}

/// Two-mode squeezed Gaussian state.
pub struct CvpGaussianState {
    params: SqueezingParams,
    state: GaussianState,
}

/// Pseudo-spin operator triple on a truncated Fock space.
pub struct CvpSpinTriple {
    triple: SpinTriple,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CvpStatus {
    match e {
        Error::Invalid(_) | Error::Range(_) | Error::Config(_) | Error::Dimension(_) | Error::Domain(_) => CvpStatus::InvalidArgument,
        Error::Truncation { .. } => CvpStatus::Truncation,
        _ => CvpStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), CvpStatus>) -> CvpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CvpStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            CvpStatus::Panic
        }
    }
}

fn lib<T>(r: cvphase::error::Result<T>) -> Result<T, CvpStatus> {
    r.map_err(|e| {
        let s = status_of(&e);
        set_error(e.to_string());
        s
    })
}

fn out<'a, T>(p: *mut T) -> Result<&'a mut T, CvpStatus> {
    // SAFETY: caller passes either null or a valid, aligned, writable pointer.
    unsafe { p.as_mut() }.ok_or_else(|| {
        set_error("null pointer argument".into());
        CvpStatus::NullPointer
    })
}

fn get<'a, T>(p: *const T) -> Result<&'a T, CvpStatus> {
    // SAFETY: caller passes either null or a live handle from this library.
    unsafe { p.as_ref() }.ok_or_else(|| {
        set_error("null handle".into());
        CvpStatus::NullPointer
    })
}

/// Last error message on this thread; empty if none. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn cvp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cvp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Quantum discord of the two-mode squeezed vacuum, in bits.
#[no_mangle]
pub extern "C" fn cvp_discord_tmss(r: f64, value: *mut f64) -> CvpStatus {
    guard(|| {
        let v = out(value)?;
        *v = lib(infotheory::discord_tmss(r))?;
        Ok(())
    })
}

/// Smallest x > 0 where the Bell-letter state violates CHSH at settings (−2x, x, 0, 3x).
#[no_mangle]
pub extern "C" fn cvp_bell_letter_threshold(value: *mut f64) -> CvpStatus {
    guard(|| {
        let v = out(value)?;
        let bp = lib(wp::BellStateParams::letter(0.0, 1.0))?;
        *v = lib(wp::bell_violation_threshold(&bp))?;
        Ok(())
    })
}

/// Wigner function of the even cat state with centres ±q0.
#[no_mangle]
pub extern "C" fn cvp_cat_wigner(q0: f64, p0: f64, m: f64, omega: f64, q: f64, p: f64, value: *mut f64) -> CvpStatus {
    guard(|| {
        let v = out(value)?;
        let c = lib(wp::CatParams::new(q0, p0, m, omega))?;
        *v = wp::cat_wigner(&c, q, p);
        Ok(())
    })
}

/// Semiclassical Wigner function of oscillator level n.
#[no_mangle]
pub extern "C" fn cvp_berry_wigner_ho(n: u32, q: f64, p: f64, value: *mut f64) -> CvpStatus {
    guard(|| {
        let v = out(value)?;
        *v = lib(wp::berry_wigner_ho(n as usize, q, p))?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn cvp_gaussian_state_new(r: f64, phi: f64, handle: *mut *mut CvpGaussianState) -> CvpStatus {
    guard(|| {
        let h = out(handle)?;
        *h = ptr::null_mut();
        let params = lib(SqueezingParams::new(r, phi))?;
        let state = covariance_from_squeezing(params);
        *h = Box::into_raw(Box::new(CvpGaussianState { params, state }));
        Ok(())
    })
}

/// Releases a state; null is ignored.
#[no_mangle]
pub extern "C" fn cvp_gaussian_state_free(handle: *mut CvpGaussianState) {
    if !handle.is_null() {
        // SAFETY: handle came from cvp_gaussian_state_new and is freed once.
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Squeezing parameters (r, φ) the state was built from.
#[no_mangle]
pub extern "C" fn cvp_gaussian_state_params(handle: *const CvpGaussianState, r: *mut f64, phi: *mut f64) -> CvpStatus {
    guard(|| {
        let s = get(handle)?;
        *out(r)? = s.params.r;
        *out(phi)? = s.params.phi;
        Ok(())
    })
}

/// Covariance matrix in row-major order over (q1, p1, q2, p2); `out16` holds 16 doubles.
#[no_mangle]
pub extern "C" fn cvp_gaussian_state_covariance(handle: *const CvpGaussianState, out16: *mut f64) -> CvpStatus {
    guard(|| {
        let s = get(handle)?;
        out(out16)?;
        // SAFETY: non-null, caller guarantees room for 16 values.
        let dst = unsafe { std::slice::from_raw_parts_mut(out16, 16) };
        for i in 0..4 {
            for j in 0..4 {
                dst[4 * i + j] = s.state.covariance[(i, j)];
            }
        }
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn cvp_gaussian_state_wigner(
    handle: *const CvpGaussianState,
    q1: f64,
    p1: f64,
    q2: f64,
    p2: f64,
    value: *mut f64,
) -> CvpStatus {
    guard(|| {
        let s = get(handle)?;
        let v = out(value)?;
        *v = lib(wigner_gaussian(&s.state, &PhasePoint([q1, p1, q2, p2])))?;
        Ok(())
    })
}

/// `family` is a `CvpSpinFamily` value; `ell` is only read for Larsson.
#[no_mangle]
pub extern "C" fn cvp_spin_triple_new(family: u32, truncation: u32, ell: f64, handle: *mut *mut CvpSpinTriple) -> CvpStatus {
    guard(|| {
        let h = out(handle)?;
        *h = ptr::null_mut();
        let n = truncation as usize;
        let triple = lib(match family {
            f if f == CvpSpinFamily::Bw as u32 => bw_triple(n),
            f if f == CvpSpinFamily::Gkmr as u32 => gkmr_triple(n),
            f if f == CvpSpinFamily::Larsson as u32 => larsson_triple(n, ell),
            f => Err(Error::Invalid(format!("unknown spin family {f}"))),
        })?;
        *h = Box::into_raw(Box::new(CvpSpinTriple { triple }));
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn cvp_spin_triple_free(handle: *mut CvpSpinTriple) {
    if !handle.is_null() {
        // SAFETY: handle came from cvp_spin_triple_new and is freed once.
        drop(unsafe { Box::from_raw(handle) });
    }
}

#[no_mangle]
pub extern "C" fn cvp_spin_triple_truncation(handle: *const CvpSpinTriple, n: *mut u32) -> CvpStatus {
    guard(|| {
        *out(n)? = get(handle)?.triple.truncation() as u32;
        Ok(())
    })
}

/// Maximum CHSH value of the pseudo-spin triple on the state with
/// parameters (r, φ). `settings4` receives (θn, θn′, θm, θm′); may be null.
#[no_mangle]
pub extern "C" fn cvp_pseudospin_bell_max(
    handle: *const CvpSpinTriple,
    r: f64,
    phi: f64,
    value: *mut f64,
    settings4: *mut f64,
) -> CvpStatus {
    guard(|| {
        let t = get(handle)?;
        let v = out(value)?;
        let p = lib(SqueezingParams::new(r, phi))?;
        let m = lib(maximize_bell(p, &t.triple))?;
        *v = m.value;
        if !settings4.is_null() {
            // SAFETY: caller guarantees room for 4 values.
            unsafe { std::slice::from_raw_parts_mut(settings4, 4) }.copy_from_slice(&m.settings);
        }
        Ok(())
    })
}
