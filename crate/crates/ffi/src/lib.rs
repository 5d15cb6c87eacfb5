//! C interface to the `sbstoch` library.
//!
//! Every fallible call returns an [`SbStatus`] and writes its result through
//! an out-pointer. On failure the message is kept per thread and can be read
//! with [`sb_last_error_message`]. Densities are opaque handles owned by the
//! caller and released with [`sb_density_free`].

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use sbstoch::dynamics::{p_scalar_with, uniform_grid, vacuum_evolution_trace, FrequencyBranch};
use sbstoch::limits::{
    classify_regime, coefficients_finite_temperature, coefficients_zero_temperature, solve_damping_condition,
    AmplitudeFamily, LimitCoefficients, Regime, RegimeTolerances,
};
use sbstoch::oracle::{discretize_bath, sigma_z_expectation_rescaled, OracleOptions};
use sbstoch::spectral::{hilbert_pv, QuadratureSettings};
use sbstoch::{eigensystem, Basis, Eigensystem, Error, SpectralDensity, SpinState, SystemParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbStatus {
    Ok = 0,
    InvalidParameter = 1,
    NonConvergence = 2,
    InvalidCutoff = 3,
    DivergentI0 = 4,
    DivergentPrincipalValue = 5,
    NoSolution = 6,
    DimensionBudgetExceeded = 7,
    StepControlFailure = 8,
    NullPointer = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbRegime {
    PureDamping = 0,
    PureOscillation = 1,
    DampedOscillation = 2,
    Frozen = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbBranch {
    Printed = 0,
    Correlator = 1,
}

/// Limit coefficients. `beta` is 0 at zero temperature.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SbCoefficients {
    pub gamma: f64,
    pub sigma: f64,
    pub phi: f64,
    pub beta: f64,
    pub resonant_density: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SbOracleResult {
    pub sup_error: f64,
    pub sup_error_other_branch: f64,
    pub max_norm_drift: f64,
    pub terminal_sigma_z: f64,
}

/// Opaque spectral density.
pub struct SbDensity(SpectralDensity);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> SbStatus {
    match err {
        Error::InvalidParameter { .. } => SbStatus::InvalidParameter,
        Error::NonConvergence { .. } => SbStatus::NonConvergence,
        Error::InvalidCutoff { .. } => SbStatus::InvalidCutoff,
        Error::DivergentI0 => SbStatus::DivergentI0,
        Error::DivergentPrincipalValue { .. } => SbStatus::DivergentPrincipalValue,
        Error::NoSolution { .. } => SbStatus::NoSolution,
        Error::DimensionBudgetExceeded { .. } => SbStatus::DimensionBudgetExceeded,
        Error::StepControlFailure { .. } => SbStatus::StepControlFailure,
    }
}

enum Failure {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SbStatus::Ok
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer passed for `{name}`"));
            SbStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic".to_string());
            SbStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn write<T>(p: *mut T, name: &'static str, value: T) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    p.write(value);
    Ok(())
}

fn eig(epsilon: f64, delta: f64) -> Result<Eigensystem, Failure> {
    Ok(eigensystem(&SystemParams::new(epsilon, delta))?)
}

fn to_c(c: &LimitCoefficients) -> SbCoefficients {
    SbCoefficients {
        gamma: c.gamma,
        sigma: c.sigma,
        phi: c.phi,
        beta: c.beta.unwrap_or(0.0),
        resonant_density: c.resonant_density,
    }
}

fn from_c(c: &SbCoefficients) -> LimitCoefficients {
    LimitCoefficients {
        beta: (c.beta > 0.0).then_some(c.beta),
        resonant_density: c.resonant_density,
        ..LimitCoefficients::from_values(c.gamma, c.sigma, c.phi)
    }
}

fn branch(b: SbBranch) -> FrequencyBranch {
    match b {
        SbBranch::Printed => FrequencyBranch::Printed,
        SbBranch::Correlator => FrequencyBranch::Correlator,
    }
}

unsafe fn emit(out: *mut *mut SbDensity, d: sbstoch::Result<SpectralDensity>) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    out.write(Box::into_raw(Box::new(SbDensity(d?))));
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn sb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// `α ω_c (ω/ω_c)^s e^{−ω/ω_c}`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_density_power_law(alpha: f64, s: f64, omega_c: f64, out: *mut *mut SbDensity) -> SbStatus {
    guard(|| emit(out, SpectralDensity::power_law(alpha, s, omega_c)))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_density_ohmic(alpha: f64, omega_c: f64, out: *mut *mut SbDensity) -> SbStatus {
    guard(|| emit(out, SpectralDensity::ohmic(alpha, omega_c)))
}

/// `α` on `[omega_lo, omega_hi]`, zero elsewhere.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_density_box(alpha: f64, omega_lo: f64, omega_hi: f64, out: *mut *mut SbDensity) -> SbStatus {
    guard(|| emit(out, SpectralDensity::boxcar(alpha, omega_lo, omega_hi)))
}

/// Piecewise-linear table with `len` nodes.
///
/// # Safety
/// `omega` and `values` must point to `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sb_density_table(
    omega: *const f64,
    values: *const f64,
    len: usize,
    out: *mut *mut SbDensity,
) -> SbStatus {
    guard(|| {
        if omega.is_null() || values.is_null() {
            return Err(Failure::Null("omega/values"));
        }
        let w = std::slice::from_raw_parts(omega, len).to_vec();
        let v = std::slice::from_raw_parts(values, len).to_vec();
        emit(out, SpectralDensity::table(w, v))
    })
}

/// # Safety
/// `density` must be null or a handle from one of the constructors, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sb_density_free(density: *mut SbDensity) {
    if !density.is_null() {
        drop(Box::from_raw(density));
    }
}

/// `J(ω)`; NaN for a null handle.
///
/// # Safety
/// `density` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sb_density_evaluate(density: *const SbDensity, omega: f64) -> f64 {
    density.as_ref().map_or(f64::NAN, |d| d.0.evaluate(omega))
}

/// Principal-value transform `I(ω)` with default quadrature settings.
///
/// # Safety
/// `density` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sb_hilbert(density: *const SbDensity, omega: f64, out: *mut f64) -> SbStatus {
    guard(|| {
        let d = deref(density, "density")?;
        write(out, "out", hilbert_pv(&d.0, omega, &QuadratureSettings::default())?)
    })
}

/// Limit coefficients; `beta <= 0` selects zero temperature.
///
/// # Safety
/// `density` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sb_coefficients(
    epsilon: f64,
    delta: f64,
    density: *const SbDensity,
    beta: f64,
    out: *mut SbCoefficients,
) -> SbStatus {
    guard(|| {
        let d = deref(density, "density")?;
        let e = eig(epsilon, delta)?;
        let q = QuadratureSettings::default();
        let c = if beta > 0.0 {
            coefficients_finite_temperature(&e, &d.0, beta, &q)?
        } else {
            coefficients_zero_temperature(&e, &d.0, &q)?
        };
        write(out, "out", to_c(&c))
    })
}

/// Regime of `coefficients` with tolerances scaled to `density`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sb_classify_regime(
    epsilon: f64,
    delta: f64,
    density: *const SbDensity,
    coefficients: *const SbCoefficients,
    out: *mut SbRegime,
) -> SbStatus {
    guard(|| {
        let d = deref(density, "density")?;
        let c = from_c(deref(coefficients, "coefficients")?);
        let e = eig(epsilon, delta)?;
        let r = classify_regime(&c, &e, RegimeTolerances::scale_free(&e, &d.0));
        let regime = match r.regime {
            Regime::PureDamping => SbRegime::PureDamping,
            Regime::PureOscillation => SbRegime::PureOscillation,
            Regime::DampedOscillation => SbRegime::DampedOscillation,
            Regime::Frozen => SbRegime::Frozen,
        };
        write(out, "out", regime)
    })
}

/// Amplitude α* such that `α*·shape` stops the oscillation.
///
/// # Safety
/// `shape` must be a live handle; `alpha` and `residual` valid.
#[no_mangle]
pub unsafe extern "C" fn sb_solve_damping(
    epsilon: f64,
    delta: f64,
    shape: *const SbDensity,
    alpha: *mut f64,
    residual: *mut f64,
) -> SbStatus {
    guard(|| {
        let d = deref(shape, "shape")?;
        let e = eig(epsilon, delta)?;
        let s = solve_damping_condition(&AmplitudeFamily::Scaling(d.0.clone()), &e, &QuadratureSettings::default())?;
        write(alpha, "alpha", s.alpha)?;
        write(residual, "residual", s.residual)
    })
}

/// `⟨ψ|P(t)|ψ⟩` for `ψ = (up, down)` in the σ_z basis, given as
/// `[re_up, im_up, re_down, im_down]` and normalized here.
///
/// # Safety
/// `coefficients` must be valid, `state` must point to 4 doubles, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sb_p_scalar(
    epsilon: f64,
    delta: f64,
    coefficients: *const SbCoefficients,
    state: *const f64,
    t: f64,
    frequency_branch: SbBranch,
    out: *mut f64,
) -> SbStatus {
    guard(|| {
        let c = from_c(deref(coefficients, "coefficients")?);
        if state.is_null() {
            return Err(Failure::Null("state"));
        }
        let s = std::slice::from_raw_parts(state, 4);
        let psi = SpinState::normalized(Basis::SigmaZ, [Complex64::new(s[0], s[1]), Complex64::new(s[2], s[3])])?;
        let e = eig(epsilon, delta)?;
        write(out, "out", p_scalar_with(&c, &e, &psi, t, branch(frequency_branch))?)
    })
}

/// Trace of the vacuum evolution at `t`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sb_vacuum_trace(
    coefficients: *const SbCoefficients,
    t: f64,
    re: *mut f64,
    im: *mut f64,
) -> SbStatus {
    guard(|| {
        let z = vacuum_evolution_trace(&from_c(deref(coefficients, "coefficients")?), t)?;
        write(re, "re", z.re)?;
        write(im, "im", z.im)
    })
}

/// Exact discretized-bath run at one coupling λ, spin up, compared with the
/// limit on `n_points` limit times in `[0, t_max]`.
///
/// # Safety
/// `density` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sb_oracle(
    epsilon: f64,
    delta: f64,
    density: *const SbDensity,
    modes: usize,
    omega_max: f64,
    fock_truncation: usize,
    lambda: f64,
    t_max: f64,
    n_points: usize,
    frequency_branch: SbBranch,
    out: *mut SbOracleResult,
) -> SbStatus {
    guard(|| {
        let d = deref(density, "density")?;
        let bath = discretize_bath(&d.0, modes, omega_max, fock_truncation)?;
        let opts = OracleOptions { branch: branch(frequency_branch), ..OracleOptions::default() };
        let grid = uniform_grid(t_max, n_points);
        let run = sigma_z_expectation_rescaled(&SystemParams::new(epsilon, delta), &bath, lambda, &grid, &opts)?;
        write(
            out,
            "out",
            SbOracleResult {
                sup_error: run.sup_error,
                sup_error_other_branch: run.sup_error_other_branch,
                max_norm_drift: run.max_norm_drift,
                terminal_sigma_z: run.terminal_sigma_z,
            },
        )
    })
}
