use nalgebra::DMatrix;
use num_complex::Complex64;

use super::DiscretizedBath;
use crate::error::{Error, Result};
use crate::model::SystemParams;

/// Real symmetric matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHamiltonian {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    /// σ_z eigenvalue (±1) of each basis state.
    spin_sign: Vec<f64>,
}

impl SparseHamiltonian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (row, out) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += x[self.cols[k]] * self.vals[k];
            }
            *out = acc;
        }
    }

    /// `Re⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        let mut hpsi = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply(psi, &mut hpsi);
        psi.iter().zip(&hpsi).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// `⟨ψ|σ_z ⊗ 1|ψ⟩`.
    pub fn sigma_z(&self, psi: &[Complex64]) -> f64 {
        psi.iter().zip(&self.spin_sign).map(|(a, s)| a.norm_sqr() * s).sum()
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.vals[self.row_ptr[r]..self.row_ptr[r + 1]].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] += self.vals[k];
            }
        }
        m
    }

    /// `max |H_ij − H_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let d = self.to_dense();
        (&d - d.transpose()).amax()
    }
}

/// `H = −½Δσ_x + ½εσ_z + Σ_j ω_j a_j†a_j + λσ_z Σ_j g_j (a_j + a_j†)` on
/// spin ⊗ Fock states with at most `n_max` quanta per mode.
///
/// Basis index: `spin · (n_max+1)^M + Σ_j n_j (n_max+1)^j`, spin 0 = `|↑⟩`.
pub fn build_hamiltonian(params: &SystemParams, bath: &DiscretizedBath, lambda: f64) -> Result<SparseHamiltonian> {
    if !params.epsilon.is_finite() {
        return Err(Error::invalid("epsilon", "must be finite"));
    }
    if !(params.delta.is_finite() && params.delta >= 0.0) {
        return Err(Error::invalid("delta", "must be finite and >= 0"));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::invalid("lambda", "must be finite and >= 0"));
    }
    let levels = bath.fock_truncation + 1;
    let modes = bath.mode_count();
    let block = levels.pow(modes as u32);
    let dim = 2 * block;

    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::with_capacity(dim * (2 * modes + 2));
    let mut vals = Vec::with_capacity(dim * (2 * modes + 2));
    let mut spin_sign = Vec::with_capacity(dim);
    let mut occupation = vec![0usize; modes];
    let mut entries: Vec<(usize, f64)> = Vec::with_capacity(2 * modes + 2);

    row_ptr.push(0);
    for row in 0..dim {
        let spin = row / block;
        let sz = if spin == 0 { 1.0 } else { -1.0 };
        spin_sign.push(sz);
        let mut rest = row % block;
        for n in occupation.iter_mut() {
            *n = rest % levels;
            rest /= levels;
        }

        entries.clear();
        let free: f64 = occupation.iter().zip(&bath.frequencies).map(|(&n, w)| n as f64 * w).sum();
        entries.push((row, 0.5 * params.epsilon * sz + free));
        if params.delta != 0.0 {
            let flipped = if spin == 0 { row + block } else { row - block };
            entries.push((flipped, -0.5 * params.delta));
        }
        if lambda != 0.0 {
            let mut stride = 1;
            for (j, &n) in occupation.iter().enumerate() {
                let g = lambda * sz * bath.couplings[j];
                if g != 0.0 {
                    if n > 0 {
                        entries.push((row - stride, g * (n as f64).sqrt()));
                    }
                    if n < bath.fock_truncation {
                        entries.push((row + stride, g * (n as f64 + 1.0).sqrt()));
                    }
                }
                stride *= levels;
            }
        }
        entries.sort_by_key(|e| e.0);
        for &(c, v) in &entries {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    Ok(SparseHamiltonian { dim, row_ptr, cols, vals, spin_sign })
}
