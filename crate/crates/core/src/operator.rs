//! 2×2 spin operators and spin states with an explicit basis tag.
//!
//! Row/column 0 is `|e_+⟩` and row/column 1 is `|e_−⟩` in the energy
//! eigenbasis; in the σ_z basis they are spin-up and spin-down.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// `{|e_+⟩, |e_−⟩}`, eigenvectors of the free spin Hamiltonian.
    Energy,
    /// `{|↑⟩, |↓⟩}`, eigenvectors of σ_z.
    SigmaZ,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinOperator {
    basis: Basis,
    entries: Matrix2,
}

impl SpinOperator {
    pub fn new(basis: Basis, entries: Matrix2) -> Self {
        Self { basis, entries }
    }

    pub fn zero(basis: Basis) -> Self {
        Self::new(basis, [[ZERO; 2]; 2])
    }

    pub fn identity(basis: Basis) -> Self {
        Self::new(basis, [[ONE, ZERO], [ZERO, ONE]])
    }

    /// `D = |e_+⟩⟨e_−|`.
    pub fn raising() -> Self {
        Self::new(Basis::Energy, [[ZERO, ONE], [ZERO, ZERO]])
    }

    /// `D† = |e_−⟩⟨e_+|`.
    pub fn lowering() -> Self {
        Self::new(Basis::Energy, [[ZERO, ZERO], [ONE, ZERO]])
    }

    /// `DD† = |e_+⟩⟨e_+|`.
    pub fn upper_projector() -> Self {
        Self::new(Basis::Energy, [[ONE, ZERO], [ZERO, ZERO]])
    }

    /// `D†D = |e_−⟩⟨e_−|`.
    pub fn lower_projector() -> Self {
        Self::new(Basis::Energy, [[ZERO, ZERO], [ZERO, ONE]])
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn entries(&self) -> &Matrix2 {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = *self;
        for row in out.entries.iter_mut() {
            for x in row.iter_mut() {
                *x *= factor;
            }
        }
        out
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.entries;
        Self::new(
            self.basis,
            [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    /// Anticommutator `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.basis, other.basis, "operators in different bases");
        let mut worst = 0.0_f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.entries[r][c] - other.entries[r][c]).norm());
            }
        }
        worst
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let m = &self.entries;
        let a = m[0][0].re;
        let d = m[1][1].re;
        let b = 0.5 * (m[0][1] + m[1][0].conj());
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - radius, mean + radius]
    }

    /// Expectation value `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, state: &SpinState) -> Complex64 {
        assert_eq!(self.basis, state.basis(), "state and operator in different bases");
        let v = state.amplitudes();
        let m = &self.entries;
        let mut acc = ZERO;
        for r in 0..2 {
            for c in 0..2 {
                acc += v[r].conj() * m[r][c] * v[c];
            }
        }
        acc
    }

    /// Similarity transform `U A U†` with `U` mapping into `basis`.
    pub(crate) fn conjugated(&self, u: &Matrix2, basis: Basis) -> Self {
        let tmp = matmul(u, &self.entries);
        let u_dag = [[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]];
        Self::new(basis, matmul(&tmp, &u_dag))
    }
}

fn matmul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

impl Add for SpinOperator {
    type Output = SpinOperator;

    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.basis, rhs.basis, "operators in different bases");
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.entries[r][c] += rhs.entries[r][c];
            }
        }
        out
    }
}

impl Sub for SpinOperator {
    type Output = SpinOperator;

    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale_real(-1.0)
    }
}

impl Mul for SpinOperator {
    type Output = SpinOperator;

    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.basis, rhs.basis, "operators in different bases");
        Self::new(self.basis, matmul(&self.entries, &rhs.entries))
    }
}

/// A normalized two-component state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    basis: Basis,
    amplitudes: [Complex64; 2],
}

impl SpinState {
    pub const NORM_TOL: f64 = 1e-12;

    /// Accepts only amplitudes already normalized to within [`Self::NORM_TOL`].
    pub fn new(basis: Basis, amplitudes: [Complex64; 2]) -> Result<Self> {
        let norm = (amplitudes[0].norm_sqr() + amplitudes[1].norm_sqr()).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::invalid("state", format!("norm {norm} is not 1")));
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn normalized(basis: Basis, amplitudes: [Complex64; 2]) -> Result<Self> {
        let norm = (amplitudes[0].norm_sqr() + amplitudes[1].norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid("state", "amplitudes must be finite and not all zero"));
        }
        let inv = 1.0 / norm;
        Ok(Self { basis, amplitudes: [amplitudes[0] * inv, amplitudes[1] * inv] })
    }

    pub fn spin_up() -> Self {
        Self { basis: Basis::SigmaZ, amplitudes: [ONE, ZERO] }
    }

    pub fn spin_down() -> Self {
        Self { basis: Basis::SigmaZ, amplitudes: [ZERO, ONE] }
    }

    /// `(|↑⟩ + |↓⟩)/√2`.
    pub fn plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { basis: Basis::SigmaZ, amplitudes: [h, h] }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64; 2] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        (self.amplitudes[0].norm_sqr() + self.amplitudes[1].norm_sqr()).sqrt()
    }

    pub(crate) fn transformed(&self, u: &Matrix2, basis: Basis) -> Self {
        let v = &self.amplitudes;
        Self {
            basis,
            amplitudes: [u[0][0] * v[0] + u[0][1] * v[1], u[1][0] * v[0] + u[1][1] * v[1]],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_products_are_projectors() {
        let d = SpinOperator::raising();
        let dd = SpinOperator::lowering();
        assert_eq!(d * dd, SpinOperator::upper_projector());
        assert_eq!(dd * d, SpinOperator::lower_projector());
        assert_eq!(d.adjoint(), dd);
        assert_eq!((dd * d).trace(), ONE);
    }

    #[test]
    fn hermitian_eigenvalues_of_pauli_x() {
        let x = SpinOperator::raising() + SpinOperator::lowering();
        let ev = x.hermitian_eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn state_rejects_unnormalized_amplitudes() {
        assert!(SpinState::new(Basis::SigmaZ, [ONE, ONE]).is_err());
        assert!(SpinState::normalized(Basis::SigmaZ, [ZERO, ZERO]).is_err());
        let s = SpinState::normalized(Basis::SigmaZ, [ONE, ONE]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    #[should_panic(expected = "different bases")]
    fn mixing_bases_panics() {
        let _ = SpinOperator::identity(Basis::Energy) + SpinOperator::identity(Basis::SigmaZ);
    }
}
