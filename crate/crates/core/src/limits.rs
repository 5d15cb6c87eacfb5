//! Coefficients `(γ, σ, φ)` of the weak-coupling limit equation
//!
//! ```text
//! dU/dt = D b†(t) U − D† U b(t) − (γ + iσ) D†D U − iφ U
//! ```
//!
//! and the regime analysis built on them. `γ` comes from the density at the
//! level splitting `νΔ`, while `σ` and `φ` come from its principal-value
//! transform. Together they are the real and imaginary parts of the one-sided
//! Fourier integral of the bath correlation.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Eigensystem;
use crate::spectral::{hilbert_pv_detailed, thermal_split, Density, PrincipalValue, QuadratureSettings, SpectralDensity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantity {
    #[serde(rename = "J")]
    J,
    #[serde(rename = "I")]
    I,
    #[serde(rename = "J+")]
    JPlus,
    #[serde(rename = "J-")]
    JMinus,
    #[serde(rename = "I+")]
    IPlus,
    #[serde(rename = "I-")]
    IMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub quantity: Quantity,
    pub omega: f64,
    pub value: f64,
    pub abs_error: f64,
}

/// Every density and transform value a coefficient set was built from.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Provenance {
    pub evaluations: Vec<Evaluation>,
    /// `ν⁻²πJ(νΔ)coth(βνΔ/2)`, the closed form of the finite-temperature γ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_coth: Option<f64>,
    /// φ at finite temperature follows the zero-temperature pattern with
    /// `I → I_±`; it is not an independently derived result.
    pub phi_extrapolated: bool,
}

impl Provenance {
    fn record(&mut self, quantity: Quantity, omega: f64, value: f64, abs_error: f64) -> f64 {
        self.evaluations.push(Evaluation { quantity, omega, value, abs_error });
        value
    }

    fn record_pv(&mut self, quantity: Quantity, omega: f64, pv: PrincipalValue) -> f64 {
        self.record(quantity, omega, pv.value, pv.abs_error)
    }

    pub fn find(&self, quantity: Quantity, omega: f64) -> Option<f64> {
        self.evaluations.iter().find(|e| e.quantity == quantity && e.omega == omega).map(|e| e.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitCoefficients {
    pub gamma: f64,
    pub sigma: f64,
    pub phi: f64,
    /// Inverse temperature; `None` is zero temperature.
    pub beta: Option<f64>,
    /// Density value entering γ: `J(νΔ)` or `J_+(νΔ) + J_−(νΔ)`.
    pub resonant_density: f64,
    pub provenance: Provenance,
}

impl LimitCoefficients {
    /// Bare coefficients without provenance, mainly for evaluating dynamics.
    pub fn from_values(gamma: f64, sigma: f64, phi: f64) -> Self {
        Self { gamma, sigma, phi, beta: None, resonant_density: gamma, provenance: Provenance::default() }
    }

    /// Coefficients for physical (unrescaled) time at coupling λ: the limit
    /// equation lives on the time scale `t = λ²τ`, so every rate picks up λ².
    pub fn at_coupling(&self, lambda: f64) -> Self {
        let l2 = lambda * lambda;
        Self { gamma: self.gamma * l2, sigma: self.sigma * l2, phi: self.phi * l2, ..self.clone() }
    }
}

/// Assembles `(γ, σ, φ)` from a resonant density value and a transform
/// `I(ω)`. `I(0)` is only requested for a biased system (`ε ≠ 0`), where the
/// diagonal part of σ_z couples to the bath.
pub fn coefficients_from_spectrum<F>(eig: &Eigensystem, resonant_density: f64, mut transform: F) -> Result<LimitCoefficients>
where
    F: FnMut(f64) -> Result<PrincipalValue>,
{
    let gap = eig.gap();
    let inv_nu2 = 1.0 / (eig.nu * eig.nu);
    let mut prov = Provenance::default();
    prov.record(Quantity::J, gap, resonant_density, 0.0);
    let i_below = prov.record_pv(Quantity::I, -gap, transform(-gap)?);
    let i_above = prov.record_pv(Quantity::I, gap, transform(gap)?);
    let i_zero = if eig.d_pp != 0.0 || eig.d_mm != 0.0 {
        prov.record_pv(Quantity::I, 0.0, transform(0.0)?)
    } else {
        0.0
    };
    let diag = eig.d_pp * eig.d_pp - eig.d_mm * eig.d_mm;
    Ok(LimitCoefficients {
        gamma: PI * inv_nu2 * resonant_density,
        sigma: inv_nu2 * (i_below - i_above) + diag * i_zero,
        phi: inv_nu2 * i_below + eig.d_pp * eig.d_pp * i_zero,
        beta: None,
        resonant_density,
        provenance: prov,
    })
}

pub fn coefficients_zero_temperature(
    eig: &Eigensystem,
    density: &SpectralDensity,
    q: &QuadratureSettings,
) -> Result<LimitCoefficients> {
    let resonant = density.evaluate(eig.gap());
    coefficients_from_spectrum(eig, resonant, |w| hilbert_pv_detailed(density, w, q))
}

pub fn coefficients_finite_temperature(
    eig: &Eigensystem,
    density: &SpectralDensity,
    beta: f64,
    q: &QuadratureSettings,
) -> Result<LimitCoefficients> {
    let thermal = thermal_split(density, beta)?;
    let gap = eig.gap();
    let inv_nu2 = 1.0 / (eig.nu * eig.nu);
    let mut prov = Provenance::default();

    let j_plus = prov.record(Quantity::JPlus, gap, thermal.j_plus(gap), 0.0);
    let j_minus = prov.record(Quantity::JMinus, gap, thermal.j_minus(gap), 0.0);
    let j = prov.record(Quantity::J, gap, density.evaluate(gap), 0.0);
    let resonant = j_plus + j_minus;
    prov.gamma_coth = Some(PI * inv_nu2 * j / (0.5 * beta * gap).tanh());

    let plus = thermal.plus();
    let minus = thermal.minus();
    let mut pv = |quantity, branch: &dyn Density, w: f64| -> Result<f64> {
        let r = hilbert_pv_detailed(branch, w, q)?;
        Ok(prov.record_pv(quantity, w, r))
    };
    let ip_below = pv(Quantity::IPlus, &plus, -gap)?;
    let ip_above = pv(Quantity::IPlus, &plus, gap)?;
    let im_below = pv(Quantity::IMinus, &minus, -gap)?;
    let im_above = pv(Quantity::IMinus, &minus, gap)?;
    let i_zero_sum = if eig.d_pp != 0.0 || eig.d_mm != 0.0 {
        pv(Quantity::IPlus, &plus, 0.0)? + pv(Quantity::IMinus, &minus, 0.0)?
    } else {
        0.0
    };
    prov.phi_extrapolated = true;

    let diag = eig.d_pp * eig.d_pp - eig.d_mm * eig.d_mm;
    Ok(LimitCoefficients {
        gamma: PI * inv_nu2 * resonant,
        sigma: diag * i_zero_sum + inv_nu2 * (ip_below - ip_above + im_below - im_above),
        phi: inv_nu2 * ip_below + eig.d_pp * eig.d_pp * i_zero_sum,
        beta: Some(beta),
        resonant_density: resonant,
        provenance: prov,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    PureDamping,
    PureOscillation,
    DampedOscillation,
    Frozen,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::PureDamping => "PureDamping",
            Regime::PureOscillation => "PureOscillation",
            Regime::DampedOscillation => "DampedOscillation",
            Regime::Frozen => "Frozen",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeTolerances {
    pub gamma_tol: f64,
    pub omega_tol: f64,
}

impl RegimeTolerances {
    /// `γ_tol = 10⁻¹² · max(1, πν⁻² sup J)`, `ω_tol = 10⁻⁸ νΔ`.
    pub fn scale_free(eig: &Eigensystem, density: &SpectralDensity) -> Self {
        let gamma_scale = PI * density.sup() / (eig.nu * eig.nu);
        Self { gamma_tol: 1e-12 * gamma_scale.max(1.0), omega_tol: 1e-8 * eig.gap() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub gamma: f64,
    /// `σ − νΔ`, the oscillation frequency of `P(t)`.
    pub effective_frequency: f64,
    pub tolerances: RegimeTolerances,
    /// `J(νΔ) = 0`: the level splitting lies outside the bath spectrum.
    pub off_resonance: bool,
}

pub fn classify_regime(c: &LimitCoefficients, eig: &Eigensystem, tol: RegimeTolerances) -> RegimeReport {
    let effective_frequency = c.sigma - eig.gap();
    let undamped = c.gamma < tol.gamma_tol;
    let still = effective_frequency.abs() < tol.omega_tol;
    let regime = match (undamped, still) {
        (true, true) => Regime::Frozen,
        (true, false) => Regime::PureOscillation,
        (false, true) => Regime::PureDamping,
        (false, false) => Regime::DampedOscillation,
    };
    RegimeReport { regime, gamma: c.gamma, effective_frequency, tolerances: tol, off_resonance: c.resonant_density == 0.0 }
}

/// A one-parameter family of densities in the amplitude α.
pub enum AmplitudeFamily<'a> {
    /// `α · shape`; σ is linear in α and the condition is solved directly.
    Scaling(SpectralDensity),
    /// Arbitrary dependence on α, solved by bisection inside `bracket`.
    Parametrized {
        build: &'a dyn Fn(f64) -> Result<SpectralDensity>,
        bracket: (f64, f64),
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DampingSolution {
    pub alpha: f64,
    /// σ at unit amplitude, for scaling families.
    pub sigma_unit: Option<f64>,
    /// `|σ(α*) − νΔ|`, recomputed from scratch at α*.
    pub residual: f64,
    pub iterations: usize,
}

const DAMPING_RESIDUAL_TOL: f64 = 1e-8;

/// Finds the amplitude α* at which `σ(α*) = νΔ`, the condition for the
/// oscillation in `P(t)` to stop.
pub fn solve_damping_condition(
    family: &AmplitudeFamily<'_>,
    eig: &Eigensystem,
    q: &QuadratureSettings,
) -> Result<DampingSolution> {
    let gap = eig.gap();
    let sigma_of = |d: &SpectralDensity| coefficients_zero_temperature(eig, d, q).map(|c| c.sigma);
    match family {
        AmplitudeFamily::Scaling(shape) => {
            let sigma_unit = sigma_of(shape)?;
            if sigma_unit.is_nan() || sigma_unit <= 0.0 {
                return Err(Error::NoSolution {
                    reason: format!("σ_unit ≤ 0 (σ_unit = {sigma_unit}); no positive amplitude reaches σ = νΔ"),
                });
            }
            let alpha = gap / sigma_unit;
            let residual = (sigma_of(&shape.scaled(alpha)?)? - gap).abs();
            if residual >= DAMPING_RESIDUAL_TOL {
                return Err(Error::NonConvergence { estimate: residual, target: DAMPING_RESIDUAL_TOL });
            }
            Ok(DampingSolution { alpha, sigma_unit: Some(sigma_unit), residual, iterations: 1 })
        }
        AmplitudeFamily::Parametrized { build, bracket } => {
            let (mut lo, mut hi) = *bracket;
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(Error::invalid("bracket", format!("need 0 < lo < hi, got ({lo}, {hi})")));
            }
            let f = |a: f64| -> Result<f64> { Ok(sigma_of(&build(a)?)? - gap) };
            let mut f_lo = f(lo)?;
            let f_hi = f(hi)?;
            if f_lo == 0.0 {
                return Ok(DampingSolution { alpha: lo, sigma_unit: None, residual: 0.0, iterations: 0 });
            }
            if f_lo.signum() == f_hi.signum() {
                return Err(Error::NoSolution {
                    reason: format!("σ − νΔ has the same sign at both ends of [{lo}, {hi}]"),
                });
            }
            let mut iterations = 0;
            let mut mid = 0.5 * (lo + hi);
            while iterations < 200 {
                iterations += 1;
                mid = 0.5 * (lo + hi);
                let f_mid = f(mid)?;
                if f_mid.abs() < 0.01 * DAMPING_RESIDUAL_TOL || hi - lo < 1e-15 * mid {
                    break;
                }
                if f_mid.signum() == f_lo.signum() {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            let residual = f(mid)?.abs();
            if residual >= DAMPING_RESIDUAL_TOL {
                return Err(Error::NonConvergence { estimate: residual, target: DAMPING_RESIDUAL_TOL });
            }
            Ok(DampingSolution { alpha: mid, sigma_unit: None, residual, iterations })
        }
    }
}
