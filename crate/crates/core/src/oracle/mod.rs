//! Brute-force check of the weak-coupling limit: the full spin–boson
//! Hamiltonian with a finite, Fock-truncated bath is propagated exactly and
//! `⟨σ_z⟩` at physical time `τ = t/λ²` is compared with the limit formula at
//! limit time `t`.
//!
//! The comparison is made against the limit of the *simulated* model: the
//! coefficients come from the discrete spectrum `Σ_j g_j² δ(ω − ω_j)` of the
//! bath that is actually propagated, so that the only difference left is the
//! finite coupling. Rates are converted to physical time with
//! [`LimitCoefficients::at_coupling`] and the free precession at `νΔ` is
//! evaluated at `τ`, which is the same as running the limit formula with the
//! splitting `νΔ/λ²` at limit time `t`.
//!
//! Zero temperature only: the bath starts in its vacuum.

mod hamiltonian;
mod propagate;

use std::f64::consts::PI;
use std::thread;

use num_complex::Complex64;
use serde::Serialize;

pub use hamiltonian::{build_hamiltonian, SparseHamiltonian};
pub use propagate::{evolve_exact, StepControl, Trajectory};

use crate::dynamics::{p_scalar_with, FrequencyBranch};
use crate::error::{Error, Result};
use crate::limits::{coefficients_from_spectrum, LimitCoefficients};
use crate::model::{eigensystem, SystemParams};
use crate::operator::{Basis, SpinState};
use crate::spectral::{PrincipalValue, SpectralDensity};

/// Largest Hilbert-space dimension the oracle accepts by default.
pub const DEFAULT_DIMENSION_BUDGET: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizedBath {
    pub frequencies: Vec<f64>,
    pub couplings: Vec<f64>,
    pub fock_truncation: usize,
    pub omega_max: f64,
}

impl DiscretizedBath {
    pub fn mode_count(&self) -> usize {
        self.frequencies.len()
    }

    pub fn spacing(&self) -> f64 {
        self.omega_max / self.mode_count() as f64
    }

    pub fn dimension(&self) -> u128 {
        2 * (self.fock_truncation as u128 + 1).pow(self.mode_count() as u32)
    }

    /// `2π/Δω`, after which the finite bath revives.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * PI / self.spacing()
    }

    /// `Σ_j g_j²`, the discrete counterpart of `∫₀^{ω_max} J`.
    pub fn total_weight(&self) -> f64 {
        self.couplings.iter().map(|g| g * g).sum()
    }

    /// `Σ_j g_j² / (ω_j − ω)`, the transform of the discrete spectrum.
    pub fn hilbert(&self, w: f64) -> Result<f64> {
        let mut total = 0.0;
        for (&wj, &g) in self.frequencies.iter().zip(&self.couplings) {
            if g == 0.0 {
                continue;
            }
            if wj == w {
                return Err(Error::DivergentPrincipalValue { omega: w });
            }
            total += g * g / (wj - w);
        }
        Ok(total)
    }

    /// Limit coefficients of the discrete bath at zero temperature. γ is zero:
    /// no mode sits exactly at the splitting (that case is rejected).
    pub fn limit_coefficients(&self, params: &SystemParams) -> Result<LimitCoefficients> {
        let eig = eigensystem(params)?;
        coefficients_from_spectrum(&eig, 0.0, |w| {
            self.hilbert(w).map(|value| PrincipalValue { value, abs_error: 0.0, evaluations: self.mode_count() })
        })
    }
}

pub fn discretize_bath(density: &SpectralDensity, modes: usize, omega_max: f64, n_max: usize) -> Result<DiscretizedBath> {
    discretize_bath_with_budget(density, modes, omega_max, n_max, DEFAULT_DIMENSION_BUDGET)
}

/// Midpoints `ω_j = (j − ½)Δω` of a uniform partition of `(0, ω_max]` with
/// couplings `g_j = √(J(ω_j)Δω)`.
pub fn discretize_bath_with_budget(
    density: &SpectralDensity,
    modes: usize,
    omega_max: f64,
    n_max: usize,
    budget: usize,
) -> Result<DiscretizedBath> {
    if modes == 0 {
        return Err(Error::invalid("modes", "need at least one mode"));
    }
    if !(omega_max.is_finite() && omega_max > 0.0) {
        return Err(Error::invalid("omega_max", format!("must be finite and > 0, got {omega_max}")));
    }
    if n_max == 0 {
        return Err(Error::invalid("fock_truncation", "need at least one quantum per mode"));
    }
    let dimension = (n_max as u128 + 1)
        .checked_pow(modes as u32)
        .map(|b| 2 * b)
        .unwrap_or(u128::MAX);
    if dimension > budget as u128 {
        return Err(Error::DimensionBudgetExceeded { dimension, budget });
    }
    let dw = omega_max / modes as f64;
    let frequencies: Vec<f64> = (0..modes).map(|j| (j as f64 + 0.5) * dw).collect();
    let couplings = frequencies.iter().map(|&w| (density.evaluate(w) * dw).sqrt()).collect();
    Ok(DiscretizedBath { frequencies, couplings, fock_truncation: n_max, omega_max })
}

/// `5 · max(ω_c, νΔ)`.
pub fn default_omega_max(density: &SpectralDensity, params: &SystemParams) -> Result<f64> {
    let eig = eigensystem(params)?;
    Ok(5.0 * density.characteristic_frequency().max(eig.gap()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Which oscillation-frequency form of `P(t)` the raw series is compared with.
    pub branch: FrequencyBranch,
    /// Initial spin state in the σ_z basis; the bath starts in its vacuum.
    pub initial: SpinState,
    pub step_control: StepControl,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { branch: FrequencyBranch::Correlator, initial: SpinState::spin_up(), step_control: StepControl::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleRow {
    pub t_limit: f64,
    pub t_physical: f64,
    pub re_sigma_z: f64,
    pub p_limit: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRun {
    pub lambda: f64,
    pub branch: FrequencyBranch,
    pub rows: Vec<OracleRow>,
    pub sup_error: f64,
    /// Sup-error against the other frequency branch, for comparison.
    pub sup_error_other_branch: f64,
    pub max_norm_drift: f64,
    pub max_energy_drift: f64,
    pub halving_change: f64,
    pub recurrence_time: f64,
    /// Whether the last physical time exceeds the bath recurrence time.
    pub beyond_recurrence: bool,
    /// Limit coefficients of the discrete bath (limit time units).
    pub gamma: f64,
    pub sigma: f64,
    pub phi: f64,
    pub terminal_sigma_z: f64,
}

fn initial_state(bath: &DiscretizedBath, spin: &SpinState) -> Result<Vec<Complex64>> {
    if spin.basis() != Basis::SigmaZ {
        return Err(Error::invalid("initial", "oracle initial state must be given in the σ_z basis"));
    }
    let dim = usize::try_from(bath.dimension()).map_err(|_| Error::invalid("bath", "dimension overflows"))?;
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    let [up, down] = *spin.amplitudes();
    psi[0] = up;
    psi[dim / 2] = down;
    Ok(psi)
}

/// Full-model `⟨σ_z⟩` at physical times `t/λ²` for each limit time `t`.
pub fn sigma_z_expectation_rescaled(
    params: &SystemParams,
    bath: &DiscretizedBath,
    lambda: f64,
    limit_grid: &[f64],
    opts: &OracleOptions,
) -> Result<OracleRun> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::invalid("lambda", format!("must lie in (0, 1], got {lambda}")));
    }
    crate::dynamics::validate_grid(limit_grid)?;
    let eig = eigensystem(params)?;
    let limit = bath.limit_coefficients(params)?;
    let physical = limit.at_coupling(lambda);

    let h = build_hamiltonian(params, bath, lambda)?;
    let psi0 = initial_state(bath, &opts.initial)?;
    let inv_l2 = 1.0 / (lambda * lambda);
    let times: Vec<f64> = limit_grid.iter().map(|t| t * inv_l2).collect();
    let traj = evolve_exact(&h, &psi0, &times, &opts.step_control)?;

    let mut rows = Vec::with_capacity(times.len());
    let mut sup_other = 0.0_f64;
    for ((&t_limit, &t_physical), psi) in limit_grid.iter().zip(&times).zip(&traj.states) {
        let raw = h.sigma_z(psi);
        let p_limit = p_scalar_with(&physical, &eig, &opts.initial, t_physical, opts.branch)?;
        let p_other = p_scalar_with(&physical, &eig, &opts.initial, t_physical, opts.branch.other())?;
        sup_other = sup_other.max((raw - p_other).abs());
        rows.push(OracleRow { t_limit, t_physical, re_sigma_z: raw, p_limit, abs_error: (raw - p_limit).abs() });
    }
    let sup_error = rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
    let recurrence_time = bath.recurrence_time();
    Ok(OracleRun {
        lambda,
        branch: opts.branch,
        sup_error,
        sup_error_other_branch: sup_other,
        max_norm_drift: traj.max_norm_drift(),
        max_energy_drift: traj.max_energy_drift(),
        halving_change: traj.halving_change,
        recurrence_time,
        beyond_recurrence: times.last().is_some_and(|&t| t > recurrence_time),
        gamma: limit.gamma,
        sigma: limit.sigma,
        phi: limit.phi,
        terminal_sigma_z: rows.last().map_or(f64::NAN, |r| r.re_sigma_z),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub lambda: f64,
    pub sup_error: f64,
    pub sup_error_other_branch: f64,
    pub max_norm_drift: f64,
    pub max_energy_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Sup-error strictly decreases along the (decreasing) λ list.
    pub monotone: bool,
    #[serde(skip)]
    pub runs: Vec<OracleRun>,
}

/// One oracle run per λ (in parallel), tabulating the sup-error over the grid.
pub fn convergence_study(
    params: &SystemParams,
    bath: &DiscretizedBath,
    lambdas: &[f64],
    limit_grid: &[f64],
    opts: &OracleOptions,
) -> Result<ConvergenceStudy> {
    if lambdas.is_empty() {
        return Err(Error::invalid("lambda_list", "must not be empty"));
    }
    if lambdas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("lambda_list", "must be strictly decreasing"));
    }
    let runs: Vec<Result<OracleRun>> = thread::scope(|scope| {
        let handles: Vec<_> = lambdas
            .iter()
            .map(|&lambda| scope.spawn(move || sigma_z_expectation_rescaled(params, bath, lambda, limit_grid, opts)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("oracle worker panicked")).collect()
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let rows: Vec<ConvergenceRow> = runs
        .iter()
        .map(|r| ConvergenceRow {
            lambda: r.lambda,
            sup_error: r.sup_error,
            sup_error_other_branch: r.sup_error_other_branch,
            max_norm_drift: r.max_norm_drift,
            max_energy_drift: r.max_energy_drift,
        })
        .collect();
    let monotone = rows.windows(2).all(|w| w[1].sup_error < w[0].sup_error);
    Ok(ConvergenceStudy { rows, monotone, runs })
}
