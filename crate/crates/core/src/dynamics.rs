//! Closed-form reduced dynamics in the limit: the vacuum evolution amplitude
//! `⟨U(t)⟩`, the Heisenberg σ_z expectation operator `P(t)`, and the
//! symmetrized correlator `C(t) = ½{P(t), P(0)}`.
//!
//! All operators are in the energy eigenbasis with `D = |e_+⟩⟨e_−|`.
//!
//! The coherent part of `P(t)` oscillates at `σ − νΔ` in the form used for
//! the regime analysis ([`FrequencyBranch::Printed`]), while the closed-form
//! trace of `C(t)` oscillates at `σ + νΔ` ([`FrequencyBranch::Correlator`]).
//! Both are available; second-order perturbation theory for a discrete bath
//! (see [`crate::oracle`]) agrees with the latter.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::LimitCoefficients;
use crate::model::Eigensystem;
use crate::operator::{Basis, SpinOperator, SpinState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyBranch {
    /// `D† e^{i(σ−νΔ)t} + D e^{−i(σ−νΔ)t}`.
    #[default]
    Printed,
    /// `D† e^{−i(σ+νΔ)t} + D e^{i(σ+νΔ)t}`.
    Correlator,
}

impl FrequencyBranch {
    pub fn other(self) -> Self {
        match self {
            Self::Printed => Self::Correlator,
            Self::Correlator => Self::Printed,
        }
    }

    /// Phase multiplying `D†` at time `t`.
    fn phase(self, c: &LimitCoefficients, eig: &Eigensystem, t: f64) -> f64 {
        match self {
            Self::Printed => (c.sigma - eig.gap()) * t,
            Self::Correlator => -(c.sigma + eig.gap()) * t,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("t", format!("time must be finite and >= 0, got {t}")))
    }
}

/// `⟨U(t)⟩ = e^{−iφt}·1 + e^{−iφt}(e^{−(γ+iσ)t} − 1)·D†D`.
pub fn vacuum_evolution(c: &LimitCoefficients, t: f64) -> Result<SpinOperator> {
    check_time(t)?;
    let global = Complex64::from_polar(1.0, -c.phi * t);
    let decay = Complex64::new(-c.gamma * t, -c.sigma * t).exp();
    Ok(SpinOperator::identity(Basis::Energy).scale(global)
        + SpinOperator::lower_projector().scale(global * (decay - 1.0)))
}

/// `e^{−[γ + i(σ+φ)]t}`: the trace of `⟨U(t)⟩` restricted to the `D†D`
/// sector, i.e. `tr(D†D ⟨U(t)⟩)`.
pub fn vacuum_evolution_trace(c: &LimitCoefficients, t: f64) -> Result<Complex64> {
    check_time(t)?;
    Ok(Complex64::new(-c.gamma * t, -(c.sigma + c.phi) * t).exp())
}

fn population_part(c: &LimitCoefficients, eig: &Eigensystem, t: f64) -> SpinOperator {
    let relax = (-2.0 * c.gamma * t).exp();
    SpinOperator::identity(Basis::Energy).scale_real(eig.d_pp)
        + SpinOperator::lower_projector().scale_real((eig.d_mm - eig.d_pp) * relax)
}

pub fn p_operator(c: &LimitCoefficients, eig: &Eigensystem, t: f64) -> Result<SpinOperator> {
    p_operator_with(c, eig, t, FrequencyBranch::Printed)
}

/// `P(t) = ν⁻¹e^{−γt}(D† e^{iθ} + D e^{−iθ}) + D†D (d_mm − d_pp) e^{−2γt} + d_pp`
/// with θ chosen by `branch`. At `t = 0` this is σ_z.
pub fn p_operator_with(c: &LimitCoefficients, eig: &Eigensystem, t: f64, branch: FrequencyBranch) -> Result<SpinOperator> {
    check_time(t)?;
    let amp = Complex64::from_polar((-c.gamma * t).exp() / eig.nu, branch.phase(c, eig, t));
    Ok(population_part(c, eig, t)
        + SpinOperator::lowering().scale(amp)
        + SpinOperator::raising().scale(amp.conj()))
}

/// `⟨ψ|P(t)|ψ⟩` through the operator; real up to rounding.
pub fn p_expectation(
    c: &LimitCoefficients,
    eig: &Eigensystem,
    state: &SpinState,
    t: f64,
    branch: FrequencyBranch,
) -> Result<Complex64> {
    let psi = eig.state_in_energy_basis(state);
    Ok(p_operator_with(c, eig, t, branch)?.expectation(&psi))
}

/// Complex signal whose real part is `⟨ψ|P(t)|ψ⟩`: the population part plus
/// twice the positive-frequency coherence `⟨ψ|D†|ψ⟩ ν⁻¹ e^{−γt} e^{iθ}`. Its
/// modulus tracks the oscillation envelope.
pub fn p_analytic(
    c: &LimitCoefficients,
    eig: &Eigensystem,
    state: &SpinState,
    t: f64,
    branch: FrequencyBranch,
) -> Result<Complex64> {
    check_time(t)?;
    let psi = eig.state_in_energy_basis(state);
    let a = psi.amplitudes();
    let populations = population_part(c, eig, t).expectation(&psi);
    let coherence = a[1].conj() * a[0] * Complex64::from_polar((-c.gamma * t).exp() / eig.nu, branch.phase(c, eig, t));
    Ok(Complex64::new(populations.re, 0.0) + 2.0 * coherence)
}

pub fn p_scalar(c: &LimitCoefficients, eig: &Eigensystem, state: &SpinState, t: f64) -> Result<f64> {
    p_scalar_with(c, eig, state, t, FrequencyBranch::Printed)
}

pub fn p_scalar_with(
    c: &LimitCoefficients,
    eig: &Eigensystem,
    state: &SpinState,
    t: f64,
    branch: FrequencyBranch,
) -> Result<f64> {
    p_analytic(c, eig, state, t, branch).map(|z| z.re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorReport {
    /// `½{P(t), P(0)}`.
    pub operator: SpinOperator,
    pub trace_anticommutator: Complex64,
    /// `2ν⁻²e^{−γt}cos((σ+νΔ)t) + 2e^{−2γt}(d_mm − d_pp)d_mm`.
    pub trace_closed_form: f64,
    /// `|trace_anticommutator − trace_closed_form|`.
    pub residual: f64,
}

pub fn correlator(c: &LimitCoefficients, eig: &Eigensystem, t: f64) -> Result<CorrelatorReport> {
    correlator_with(c, eig, t, FrequencyBranch::Printed)
}

pub fn correlator_with(
    c: &LimitCoefficients,
    eig: &Eigensystem,
    t: f64,
    branch: FrequencyBranch,
) -> Result<CorrelatorReport> {
    let p_t = p_operator_with(c, eig, t, branch)?;
    let p_0 = p_operator_with(c, eig, 0.0, branch)?;
    let operator = p_t.anticommutator(&p_0).scale_real(0.5);
    let trace_anticommutator = operator.trace();
    let trace_closed_form = correlator_trace_closed_form(c, eig, t)?;
    Ok(CorrelatorReport {
        operator,
        trace_anticommutator,
        trace_closed_form,
        residual: (trace_anticommutator - trace_closed_form).norm(),
    })
}

pub fn correlator_trace(c: &LimitCoefficients, eig: &Eigensystem, t: f64) -> Result<Complex64> {
    correlator(c, eig, t).map(|r| r.trace_anticommutator)
}

pub fn correlator_trace_closed_form(c: &LimitCoefficients, eig: &Eigensystem, t: f64) -> Result<f64> {
    check_time(t)?;
    let inv_nu2 = 1.0 / (eig.nu * eig.nu);
    Ok(2.0 * inv_nu2 * (-c.gamma * t).exp() * ((c.sigma + eig.gap()) * t).cos()
        + 2.0 * (-2.0 * c.gamma * t).exp() * (eig.d_mm - eig.d_pp) * eig.d_mm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// [`vacuum_evolution_trace`].
    UTrace,
    /// [`p_analytic`]; the real part is `p_scalar`.
    PScalar,
    /// [`correlator_trace`].
    CTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub observable: Observable,
    pub branch: FrequencyBranch,
    pub gamma: f64,
    pub sigma: f64,
    pub phi: f64,
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "must not be empty"));
    }
    if grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::invalid("grid", "times must be finite and >= 0"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("grid", "times must be strictly increasing"));
    }
    Ok(())
}

/// `n` equally spaced points on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
    }
}

pub fn sample_series(
    observable: Observable,
    c: &LimitCoefficients,
    eig: &Eigensystem,
    state: Option<&SpinState>,
    grid: &[f64],
    branch: FrequencyBranch,
) -> Result<TimeSeries> {
    validate_grid(grid)?;
    let values = grid
        .iter()
        .map(|&t| match observable {
            Observable::UTrace => vacuum_evolution_trace(c, t),
            Observable::PScalar => {
                let state = state.ok_or_else(|| Error::invalid("state", "P_scalar needs an initial spin state"))?;
                p_analytic(c, eig, state, t, branch)
            }
            Observable::CTrace => correlator_with(c, eig, t, branch).map(|r| r.trace_anticommutator),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeSeries {
        observable,
        branch,
        gamma: c.gamma,
        sigma: c.sigma,
        phi: c.phi,
        grid: grid.to_vec(),
        values,
    })
}
