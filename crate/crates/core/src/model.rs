//! Two-level system algebra: the eigensystem of
//! `H_S = −½Δσ_x + ½εσ_z`, the free Heisenberg evolution of σ_z in that
//! eigenbasis, and its split into transition (jump) operators.
//!
//! Only the two-level case is implemented. The limit construction applies to
//! any system operator coupled linearly to the bath, but nothing here is
//! generic over the system dimension.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{Basis, Matrix2, SpinOperator, SpinState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Bias ε between the two wells.
    pub epsilon: f64,
    /// Tunneling amplitude Δ, strictly positive.
    pub delta: f64,
    /// Dimensionless system–bath coupling λ. Only the exact oracle reads it.
    #[serde(default)]
    pub lambda: f64,
}

impl SystemParams {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        Self { epsilon, delta, lambda: 0.0 }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::invalid("delta", format!("must be finite and > 0, got {}", self.delta)));
        }
        if !self.epsilon.is_finite() {
            return Err(Error::invalid("epsilon", "must be finite"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::invalid("lambda", format!("must be finite and >= 0, got {}", self.lambda)));
        }
        Ok(())
    }
}

/// Derived quantities of `H_S`. Eigenvectors are given in the σ_z basis with
/// a real positive first component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigensystem {
    pub epsilon: f64,
    pub delta: f64,
    pub nu: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub e_plus: [Complex64; 2],
    pub e_minus: [Complex64; 2],
    /// `⟨e_+|σ_z|e_+⟩ = (1−μ_−²)/(1+μ_−²)`.
    pub d_pp: f64,
    /// `⟨e_−|σ_z|e_−⟩ = (1−μ_+²)/(1+μ_+²)`.
    pub d_mm: f64,
    /// `⟨e_+|σ_z|e_−⟩ = 1/ν`.
    pub d_pm: f64,
}

/// `(1−μ²)/(1+μ²)`, evaluated without overflow for large |μ|.
fn sigma_z_diagonal(mu: f64) -> f64 {
    if mu.abs() <= 1.0 {
        let m2 = mu * mu;
        (1.0 - m2) / (1.0 + m2)
    } else {
        let inv2 = 1.0 / (mu * mu);
        (inv2 - 1.0) / (inv2 + 1.0)
    }
}

fn unit_ket(mu: f64) -> [Complex64; 2] {
    let norm = 1.0_f64.hypot(mu);
    [Complex64::new(1.0 / norm, 0.0), Complex64::new(mu / norm, 0.0)]
}

pub fn eigensystem(params: &SystemParams) -> Result<Eigensystem> {
    SystemParams { lambda: 0.0, ..*params }.validate()?;
    let ratio = params.epsilon / params.delta;
    let nu = 1.0_f64.hypot(ratio);
    // Take the root without cancellation and get the other from μ_+μ_− = −1.
    let (mu_plus, mu_minus) = if ratio >= 0.0 {
        let mp = ratio + nu;
        (mp, -1.0 / mp)
    } else {
        let mm = ratio - nu;
        (-1.0 / mm, mm)
    };
    let half_gap = 0.5 * params.delta * nu;
    Ok(Eigensystem {
        epsilon: params.epsilon,
        delta: params.delta,
        nu,
        mu_plus,
        mu_minus,
        lambda_plus: half_gap,
        lambda_minus: -half_gap,
        e_plus: unit_ket(mu_minus),
        e_minus: unit_ket(mu_plus),
        d_pp: sigma_z_diagonal(mu_minus),
        d_mm: sigma_z_diagonal(mu_plus),
        d_pm: 1.0 / nu,
    })
}

impl Eigensystem {
    /// Level splitting `νΔ`.
    pub fn gap(&self) -> f64 {
        self.nu * self.delta
    }

    /// Rows are `⟨e_+|` and `⟨e_−|` in the σ_z basis.
    fn energy_rows(&self) -> Matrix2 {
        [
            [self.e_plus[0].conj(), self.e_plus[1].conj()],
            [self.e_minus[0].conj(), self.e_minus[1].conj()],
        ]
    }

    fn energy_columns(&self) -> Matrix2 {
        [[self.e_plus[0], self.e_minus[0]], [self.e_plus[1], self.e_minus[1]]]
    }

    /// σ_z written in the energy eigenbasis.
    pub fn sigma_z(&self) -> SpinOperator {
        let c = |x: f64| Complex64::new(x, 0.0);
        SpinOperator::new(
            Basis::Energy,
            [[c(self.d_pp), c(self.d_pm)], [c(self.d_pm), c(self.d_mm)]],
        )
    }

    pub fn to_sigma_z_basis(&self, op: &SpinOperator) -> SpinOperator {
        match op.basis() {
            Basis::SigmaZ => *op,
            Basis::Energy => op.conjugated(&self.energy_columns(), Basis::SigmaZ),
        }
    }

    pub fn to_energy_basis(&self, op: &SpinOperator) -> SpinOperator {
        match op.basis() {
            Basis::Energy => *op,
            Basis::SigmaZ => op.conjugated(&self.energy_rows(), Basis::Energy),
        }
    }

    pub fn state_in_energy_basis(&self, state: &SpinState) -> SpinState {
        match state.basis() {
            Basis::Energy => *state,
            Basis::SigmaZ => state.transformed(&self.energy_rows(), Basis::Energy),
        }
    }
}

/// Free Heisenberg evolution `e^{itH_S} σ_z e^{−itH_S}` in the energy basis.
pub fn sigma_z_heisenberg(eig: &Eigensystem, t: f64) -> SpinOperator {
    let phase = Complex64::from_polar(eig.d_pm, t * eig.gap());
    SpinOperator::upper_projector().scale_real(eig.d_pp)
        + SpinOperator::lower_projector().scale_real(eig.d_mm)
        + SpinOperator::raising().scale(phase)
        + SpinOperator::lowering().scale(phase.conj())
}

/// Transition operators coupled to the bath, with the frequency each one
/// shifts the bath dispersion by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpOperators {
    /// Down transition, `ν⁻¹D`.
    pub down: SpinOperator,
    /// Diagonal part of σ_z.
    pub zero: SpinOperator,
    /// Up transition, `ν⁻¹D†`.
    pub up: SpinOperator,
    /// `(−νΔ, 0, +νΔ)` in the order (down, zero, up).
    pub offsets: [f64; 3],
}

impl JumpOperators {
    pub fn operators(&self) -> [SpinOperator; 3] {
        [self.down, self.zero, self.up]
    }

    /// `Σ_α e^{−i t ω_α} D_α`, which reproduces [`sigma_z_heisenberg`].
    pub fn recombine(&self, t: f64) -> SpinOperator {
        self.operators()
            .iter()
            .zip(self.offsets)
            .map(|(op, w)| op.scale(Complex64::from_polar(1.0, -t * w)))
            .fold(SpinOperator::zero(Basis::Energy), |acc, x| acc + x)
    }
}

pub fn jump_operators(eig: &Eigensystem) -> JumpOperators {
    let inv_nu = 1.0 / eig.nu;
    JumpOperators {
        down: SpinOperator::raising().scale_real(inv_nu),
        zero: SpinOperator::upper_projector().scale_real(eig.d_pp)
            + SpinOperator::lower_projector().scale_real(eig.d_mm),
        up: SpinOperator::lowering().scale_real(inv_nu),
        offsets: [-eig.gap(), 0.0, eig.gap()],
    }
}
