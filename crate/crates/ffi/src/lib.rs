//! C ABI over `hessian_blowup`.
//!
//! Every fallible entry point returns an [`HbStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`hb_last_error`] on the same thread until the next failing call.
//! Panics never cross the boundary; they come back as `HB_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hessian_blowup::hessian::{cone_membership, sigma, EigenSpectrum};
use hessian_blowup::profile::{NonlinearitySpec, ProfileFns, WeightSpec};
use hessian_blowup::radial::{integrate_blowup_ivp_with, shoot_blowup_radius, IvpOptions, RadialProblem, RadialWeight};
use hessian_blowup::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// A structural condition failed: Keller-Osserman (f2) or (1.5).
    ConditionViolation = 3,
    ComputationFailed = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HbNonlinearity {
    /// f(u) = u^p for u > 0.
    Power = 0,
    /// f(u) = exp(p u).
    Exponential = 1,
}

/// Opaque profile handle: nonlinearity, Hessian order and unit weight.
pub struct HbProfile {
    f: NonlinearitySpec,
    fns: ProfileFns,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HbStatus {
    match e {
        Error::Parameter(_) | Error::Geometry(_) => HbStatus::InvalidArgument,
        Error::KellerOssermanViolation { .. } | Error::ConditionViolation { .. } => HbStatus::ConditionViolation,
        _ => HbStatus::ComputationFailed,
    }
}

/// Runs `body`, converting errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), (HbStatus, String)>) -> HbStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => HbStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            HbStatus::Panic
        }
    }
}

fn lib<T>(r: hessian_blowup::Result<T>) -> Result<T, (HbStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (HbStatus, String) {
    (HbStatus::NullPointer, format!("{name} is NULL"))
}

fn nonlinearity(kind: HbNonlinearity, param: f64) -> hessian_blowup::Result<NonlinearitySpec> {
    match kind {
        HbNonlinearity::Power => NonlinearitySpec::power(param),
        HbNonlinearity::Exponential => NonlinearitySpec::exponential(param),
    }
}

/// Copies `n` doubles into a spectrum.
///
/// # Safety
/// `lambda` must point to `n` readable doubles.
unsafe fn spectrum(lambda: *const f64, n: usize) -> Result<EigenSpectrum, (HbStatus, String)> {
    if lambda.is_null() {
        return Err(null("lambda"));
    }
    let values = std::slice::from_raw_parts(lambda, n).to_vec();
    lib(EigenSpectrum::new(values))
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn hb_status_name(status: HbStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        HbStatus::Ok => b"ok\0",
        HbStatus::NullPointer => b"null pointer\0",
        HbStatus::InvalidArgument => b"invalid argument\0",
        HbStatus::ConditionViolation => b"condition violation\0",
        HbStatus::ComputationFailed => b"computation failed\0",
        HbStatus::Panic => b"panic\0",
    };
    s.as_ptr().cast()
}

/// σ_j of the `n` eigenvalues at `lambda`.
///
/// # Safety
/// `lambda` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hb_sigma(lambda: *const f64, n: usize, j: u32, out: *mut f64) -> HbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = spectrum(lambda, n)?;
        *out = sigma(j as usize, &spec);
        Ok(())
    })
}

/// Strict test λ ∈ Γ_k.
///
/// # Safety
/// `lambda` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hb_in_gamma_k(lambda: *const f64, n: usize, k: u32, out: *mut bool) -> HbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = spectrum(lambda, n)?;
        *out = lib(cone_membership(&spec, k as usize))?.admissible;
        Ok(())
    })
}

/// Builds the profile of f for order `k`. Release with [`hb_profile_free`].
///
/// # Safety
/// `out` must be writable; on failure `*out` is set to NULL.
#[no_mangle]
pub unsafe extern "C" fn hb_profile_new(
    kind: HbNonlinearity,
    param: f64,
    k: u32,
    out: *mut *mut HbProfile,
) -> HbStatus {
    if out.is_null() {
        set_error("out is NULL".into());
        return HbStatus::NullPointer;
    }
    *out = ptr::null_mut();
    guard(|| {
        let f = lib(nonlinearity(kind, param))?;
        let fns = lib(ProfileFns::new(&f, k as usize, WeightSpec::unit()))?;
        *out = Box::into_raw(Box::new(HbProfile { f, fns }));
        Ok(())
    })
}

/// # Safety
/// `profile` must come from [`hb_profile_new`] and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn hb_profile_free(profile: *mut HbProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// φ(t) and φ′(t).
///
/// # Safety
/// `profile` must be a live handle; `phi` and `phi_prime` writable (either may be NULL to skip).
#[no_mangle]
pub unsafe extern "C" fn hb_profile_phi(
    profile: *const HbProfile,
    t: f64,
    phi: *mut f64,
    phi_prime: *mut f64,
) -> HbStatus {
    guard(|| {
        let p = profile.as_ref().ok_or_else(|| null("profile"))?;
        let v = lib(p.fns.profile.phi(t))?;
        if !phi.is_null() {
            *phi = v;
        }
        if !phi_prime.is_null() {
            *phi_prime = lib(p.fns.profile.phi_prime(t))?;
        }
        Ok(())
    })
}

/// Limit constants C_f and C_m (C_m = 1 for the unit weight).
///
/// # Safety
/// `profile` must be a live handle; outputs writable (NULL skips).
#[no_mangle]
pub unsafe extern "C" fn hb_profile_constants(profile: *const HbProfile, c_f: *mut f64, c_m: *mut f64) -> HbStatus {
    guard(|| {
        let p = profile.as_ref().ok_or_else(|| null("profile"))?;
        if !c_f.is_null() {
            *c_f = p.fns.c_f;
        }
        if !c_m.is_null() {
            *c_m = p.fns.c_m;
        }
        Ok(())
    })
}

fn radial_problem(p: &HbProfile, n: u32, radius: f64) -> Result<RadialProblem, (HbStatus, String)> {
    lib(RadialProblem::new(n as usize, p.fns.k, radius, p.f.clone(), RadialWeight::FromWeight(WeightSpec::unit())))
}

/// Blow-up radius R* of the radial problem in ℝⁿ started from u(0) = u0.
///
/// # Safety
/// `profile` must be a live handle; `rstar` writable.
#[no_mangle]
pub unsafe extern "C" fn hb_radial_blowup_radius(
    profile: *const HbProfile,
    n: u32,
    u0: f64,
    tol: f64,
    rstar: *mut f64,
) -> HbStatus {
    guard(|| {
        let p = profile.as_ref().ok_or_else(|| null("profile"))?;
        if rstar.is_null() {
            return Err(null("rstar"));
        }
        let prob = radial_problem(p, n, 1.0)?;
        let sol = lib(integrate_blowup_ivp_with(&prob, u0, &IvpOptions { tol, ..Default::default() }))?;
        *rstar = sol.rstar;
        Ok(())
    })
}

/// Centre value u(0) of the radial solution blowing up exactly at `radius`.
///
/// # Safety
/// `profile` must be a live handle; `u0` writable.
#[no_mangle]
pub unsafe extern "C" fn hb_radial_shoot(
    profile: *const HbProfile,
    n: u32,
    radius: f64,
    tol: f64,
    u0: *mut f64,
) -> HbStatus {
    guard(|| {
        let p = profile.as_ref().ok_or_else(|| null("profile"))?;
        if u0.is_null() {
            return Err(null("u0"));
        }
        let prob = radial_problem(p, n, radius)?;
        let sol = lib(shoot_blowup_radius(&prob, &IvpOptions { tol, ..Default::default() }, 1e-10))?;
        *u0 = sol.u[0];
        Ok(())
    })
}
