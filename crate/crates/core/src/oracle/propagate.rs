//! Schrödinger propagation `ψ(t) = e^{−iHt}ψ(0)` by Lanczos (Krylov)
//! approximation of the matrix exponential, with fixed outer steps and a
//! step-halving accuracy check.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::hamiltonian::SparseHamiltonian;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Outer step; `None` uses `8 / ‖H‖`.
    pub step: Option<f64>,
    /// Required agreement of the terminal state between step `h` and `h/2`.
    pub tolerance: f64,
    pub max_halvings: u32,
    pub krylov_dim: usize,
    /// Per-step Lanczos error target.
    pub krylov_tol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { step: None, tolerance: 1e-6, max_halvings: 4, krylov_dim: 40, krylov_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub norms: Vec<f64>,
    pub energies: Vec<f64>,
    /// Step used for the accepted run.
    pub step: f64,
    /// ‖ψ_h(T) − ψ_{h/2}(T)‖ at the last output time. This bounds the
    /// change of any expectation of a unit-norm observable by twice its value.
    pub halving_change: f64,
}

impl Trajectory {
    pub fn max_norm_drift(&self) -> f64 {
        self.norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energies.first().copied().unwrap_or(0.0);
        self.energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `e^{−i dt T} e_1` for the symmetric tridiagonal `T` given by its diagonal
/// and off-diagonal.
fn tridiagonal_exp(alpha: &[f64], beta: &[f64], dt: f64) -> Vec<Complex64> {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    (0..m)
        .map(|k| {
            (0..m)
                .map(|l| {
                    let q = eig.eigenvectors[(k, l)] * eig.eigenvectors[(0, l)];
                    Complex64::from_polar(q, -dt * eig.eigenvalues[l])
                })
                .sum()
        })
        .collect()
}

struct Krylov<'a> {
    h: &'a SparseHamiltonian,
    max_dim: usize,
    tol: f64,
    basis: Vec<Vec<Complex64>>,
    w: Vec<Complex64>,
}

impl<'a> Krylov<'a> {
    fn new(h: &'a SparseHamiltonian, max_dim: usize, tol: f64) -> Self {
        Self { h, max_dim, tol, basis: Vec::new(), w: vec![Complex64::new(0.0, 0.0); h.dim()] }
    }

    /// Attempts `psi ← e^{−i dt H} psi`; returns false (leaving `psi`
    /// untouched) if the subspace did not converge.
    fn try_step(&mut self, psi: &mut [Complex64], dt: f64) -> bool {
        let beta0 = norm(psi);
        if beta0 == 0.0 {
            return true;
        }
        self.basis.clear();
        self.basis.push(psi.iter().map(|x| x / beta0).collect());
        let mut alpha = Vec::with_capacity(self.max_dim);
        let mut beta: Vec<f64> = Vec::with_capacity(self.max_dim);
        let mut coeffs = None;
        for j in 0..self.max_dim {
            self.h.apply(&self.basis[j], &mut self.w);
            let a = dot(&self.basis[j], &self.w).re;
            alpha.push(a);
            // Full reorthogonalization (twice is enough).
            for _ in 0..2 {
                for v in &self.basis {
                    let c = dot(v, &self.w);
                    for (wi, vi) in self.w.iter_mut().zip(v) {
                        *wi -= c * vi;
                    }
                }
            }
            let b = norm(&self.w);
            let m = j + 1;
            let scale = a.abs() + beta.last().copied().unwrap_or(0.0) + f64::MIN_POSITIVE;
            if b <= 1e-13 * scale {
                coeffs = Some(tridiagonal_exp(&alpha, &beta, dt));
                break;
            }
            if m >= 4 && (m % 4 == 0 || m == self.max_dim) {
                let c = tridiagonal_exp(&alpha, &beta, dt);
                if b * c[m - 1].norm() <= self.tol {
                    coeffs = Some(c);
                    break;
                }
            }
            if m == self.max_dim {
                break;
            }
            beta.push(b);
            self.basis.push(self.w.iter().map(|x| x / b).collect());
        }
        let Some(c) = coeffs else { return false };
        for x in psi.iter_mut() {
            *x = Complex64::new(0.0, 0.0);
        }
        for (ck, v) in c.iter().zip(&self.basis) {
            let ck = ck * beta0;
            for (x, vi) in psi.iter_mut().zip(v) {
                *x += ck * vi;
            }
        }
        true
    }

    fn step(&mut self, psi: &mut [Complex64], dt: f64, depth: u32) -> bool {
        if self.try_step(psi, dt) {
            return true;
        }
        depth < 24 && self.step(psi, 0.5 * dt, depth + 1) && self.step(psi, 0.5 * dt, depth + 1)
    }
}

fn run(h: &SparseHamiltonian, psi0: &[Complex64], times: &[f64], step: f64, control: &StepControl) -> Result<Trajectory> {
    let mut krylov = Krylov::new(h, control.krylov_dim.max(4), control.krylov_tol);
    let mut psi = psi0.to_vec();
    let mut now = 0.0;
    let mut traj = Trajectory {
        times: Vec::with_capacity(times.len()),
        states: Vec::with_capacity(times.len()),
        norms: Vec::with_capacity(times.len()),
        energies: Vec::with_capacity(times.len()),
        step,
        halving_change: 0.0,
    };
    for &target in times {
        while now < target {
            let dt = step.min(target - now);
            if !krylov.step(&mut psi, dt, 0) {
                return Err(Error::StepControlFailure { target: control.krylov_tol, halvings: 24, change: f64::NAN });
            }
            now = if target - now <= step { target } else { now + dt };
        }
        traj.times.push(target);
        traj.norms.push(norm(&psi));
        traj.energies.push(h.expectation(&psi));
        traj.states.push(psi.clone());
    }
    Ok(traj)
}

/// Propagates `psi0` under `h` and returns the state at each of `times`
/// (ascending, nonnegative). The run is repeated with the step halved until
/// the terminal states agree to `control.tolerance / 2`.
pub fn evolve_exact(
    h: &SparseHamiltonian,
    psi0: &[Complex64],
    times: &[f64],
    control: &StepControl,
) -> Result<Trajectory> {
    if psi0.len() != h.dim() {
        return Err(Error::invalid("psi0", format!("length {} does not match dimension {}", psi0.len(), h.dim())));
    }
    if (norm(psi0) - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("psi0", "initial state must be normalized"));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("times", "must be finite, nonnegative and ascending"));
    }
    let t_end = times.last().copied().unwrap_or(0.0);
    let mut step = control.step.unwrap_or_else(|| 8.0 / h.norm_bound().max(1e-300));
    if t_end > 0.0 {
        step = step.min(t_end);
    } else {
        step = 1.0;
    }
    let mut coarse = run(h, psi0, times, step, control)?;
    let mut change = f64::INFINITY;
    for halvings in 0..=control.max_halvings {
        let fine = run(h, psi0, times, 0.5 * step, control)?;
        change = match (coarse.states.last(), fine.states.last()) {
            (Some(a), Some(b)) => a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt(),
            _ => 0.0,
        };
        if change <= 0.5 * control.tolerance {
            let mut accepted = fine;
            accepted.halving_change = change;
            return Ok(accepted);
        }
        if halvings == control.max_halvings {
            break;
        }
        step *= 0.5;
        coarse = fine;
    }
    Err(Error::StepControlFailure { target: control.tolerance, halvings: control.max_halvings, change })
}
