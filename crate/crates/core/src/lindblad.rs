//! Dense master-equation reference solver in a truncated Fock basis.
//!
//! `dρ/dt = −i[H, ρ] + γ(aρa† − ½{a†a, ρ})` with
//! `H = Δa†a + χ″a†²a² + i(E a† − E* a)`.
//!
//! Density matrices are vectorized row-major, `vec(ρ)[i·d + j] = ρ_ij`, so
//! `vec(AρB) = (A ⊗ Bᵀ) vec(ρ)`.

use crate::fock;
use crate::linalg::{self, CMat, LinalgError};
use crate::model::KerrParams;
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LindbladError {
    #[error("Fock cutoff must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("population {tail:.3e} above level {from} exceeds 1e-8; raise the cutoff {dim}")]
    CutoffTooSmall { dim: usize, from: usize, tail: f64 },
    #[error("g2(0) undefined for mean photon number {0:.3e}")]
    VacuumG2Undefined(f64),
    #[error("trace drifted to {trace} at step {step}")]
    TraceDrift { step: usize, trace: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid time grid dt = {dt}, t_end = {t_end}")]
    InvalidTimeGrid { dt: f64, t_end: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;
pub const TAIL_TOL: f64 = 1e-8;
const TRACE_DRIFT_TOL: f64 = 1e-6;

/// Validated density matrix on a `dim`-level Fock space.
#[derive(Debug, Clone)]
pub struct FockDensityMatrix {
    dim: usize,
    rho: CMat,
}

impl FockDensityMatrix {
    pub fn new(rho: CMat) -> Result<Self, LindbladError> {
        let dim = rho.nrows();
        if rho.ncols() != dim {
            return Err(LindbladError::InvalidDensity(format!("not square: {}x{}", dim, rho.ncols())));
        }
        let herm = linalg::max_abs_diff(&rho, &linalg::adjoint(&rho));
        if herm > HERMITICITY_TOL {
            return Err(LindbladError::InvalidDensity(format!("hermiticity defect {herm:.3e}")));
        }
        let tr = linalg::trace(&rho);
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(LindbladError::InvalidDensity(format!("trace {tr}")));
        }
        let (vals, _) = linalg::eigh(&rho)?;
        if let Some(&lo) = vals.first() {
            if lo < -POSITIVITY_TOL {
                return Err(LindbladError::InvalidDensity(format!("negative eigenvalue {lo:.3e}")));
            }
        }
        Ok(Self { dim, rho })
    }

    /// Symmetrize and renormalize before validating; for numerically
    /// produced matrices whose Hermitian defect is round-off.
    pub fn from_approx(rho: &CMat) -> Result<Self, LindbladError> {
        let h = linalg::scale(&linalg::add(rho, &linalg::adjoint(rho)), C64::new(0.5, 0.0));
        let tr = linalg::trace(&h).re;
        Self::new(linalg::scale(&h, C64::new(1.0 / tr, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.rho
    }

    pub fn into_matrix(self) -> CMat {
        self.rho
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim).map(|k| self.rho[(k, k)].re).collect()
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&linalg::matmul(&self.rho, &self.rho)).re
    }

    /// `⟨ψ|ρ|ψ⟩` for a normalized pure state.
    pub fn fidelity_with_pure(&self, psi: &[C64]) -> f64 {
        let r = linalg::apply(&self.rho, psi);
        psi.iter().zip(&r).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }
}

/// Hamiltonian `Δa†a + χ″a†²a² + i(E a† − E* a)` truncated to `dim` levels.
pub fn hamiltonian(p: &KerrParams, dim: usize) -> CMat {
    let i = C64::i();
    linalg::from_fn(dim, dim, |r, c| {
        let mut v = C64::new(0.0, 0.0);
        if r == c {
            let n = r as f64;
            v += p.delta * n + p.chi2 * n * (n - 1.0);
        }
        // a†: ⟨r|a†|c⟩ = √r for r = c + 1
        if r == c + 1 {
            v += i * p.drive * (r as f64).sqrt();
        }
        if c == r + 1 {
            v -= i * p.drive.conj() * (c as f64).sqrt();
        }
        v
    })
}

/// Vectorized Liouvillian, `dim² × dim²`.
pub fn build_liouvillian(p: &KerrParams, dim: usize) -> Result<CMat, LindbladError> {
    if dim < 2 {
        return Err(LindbladError::DimensionTooSmall(dim));
    }
    let h = hamiltonian(p, dim);
    let a = fock::annihilation(dim);
    let n = fock::number(dim);
    let d2 = dim * dim;
    let g = p.gamma;
    let i = C64::i();
    // every factor is at most bidiagonal, so fill entries directly
    let mut l = linalg::zeros(d2, d2);
    for r in 0..dim {
        for c in 0..dim {
            let row = r * dim + c;
            // −i H ρ : ρ_kc with coefficient H_rk
            for k in r.saturating_sub(1)..(r + 2).min(dim) {
                l[(row, k * dim + c)] += -i * h[(r, k)];
            }
            // +i ρ H : ρ_rk with coefficient H_kc
            for k in c.saturating_sub(1)..(c + 2).min(dim) {
                l[(row, r * dim + k)] += i * h[(k, c)];
            }
            // γ a ρ a† : a_{r,r+1} ρ_{r+1,c+1} a_{c,c+1}
            if r + 1 < dim && c + 1 < dim {
                l[(row, (r + 1) * dim + c + 1)] += g * a[(r, r + 1)] * a[(c, c + 1)].conj();
            }
            l[(row, row)] += -0.5 * g * (n[(r, r)] + n[(c, c)]);
        }
    }
    Ok(l)
}

/// Population above level `dim − 5`.
fn tail_population(rho: &CMat) -> (usize, f64) {
    let dim = rho.nrows();
    let from = dim.saturating_sub(5);
    (from, (from..dim).map(|k| rho[(k, k)].re).sum())
}

/// Stationary state from the Liouvillian with row 0 replaced by the trace
/// constraint.
pub fn steady_state(p: &KerrParams, dim: usize) -> Result<FockDensityMatrix, LindbladError> {
    let mut l = build_liouvillian(p, dim)?;
    let d2 = dim * dim;
    for j in 0..d2 {
        l[(0, j)] = C64::new(0.0, 0.0);
    }
    for k in 0..dim {
        l[(0, k * dim + k)] = C64::new(1.0, 0.0);
    }
    let mut b = linalg::zeros(d2, 1);
    b[(0, 0)] = C64::new(1.0, 0.0);
    let x = linalg::solve(&l, &b)?;
    let rho = linalg::from_fn(dim, dim, |r, c| x[(r * dim + c, 0)]);
    let (from, tail) = tail_population(&rho);
    if tail > TAIL_TOL {
        return Err(LindbladError::CutoffTooSmall { dim, from, tail });
    }
    FockDensityMatrix::from_approx(&rho)
}

/// Moments of a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expectations {
    pub mean_a: C64,
    pub n: f64,
    pub g2: f64,
}

pub fn mean_a(rho: &FockDensityMatrix) -> C64 {
    // ⟨a⟩ = Σ_k √(k+1) ρ_{k+1,k}
    let m = rho.matrix();
    (0..rho.dim() - 1).map(|k| m[(k + 1, k)] * ((k + 1) as f64).sqrt()).sum()
}

pub fn mean_n(rho: &FockDensityMatrix) -> f64 {
    rho.populations().iter().enumerate().map(|(k, p)| k as f64 * p).sum()
}

pub fn expectations(rho: &FockDensityMatrix) -> Result<Expectations, LindbladError> {
    let pops = rho.populations();
    let n: f64 = pops.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    if n < 1e-12 {
        return Err(LindbladError::VacuumG2Undefined(n));
    }
    let nn: f64 = pops.iter().enumerate().map(|(k, p)| (k as f64) * (k as f64 - 1.0) * p).sum();
    Ok(Expectations { mean_a: mean_a(rho), n, g2: nn / (n * n) })
}

/// Right-hand side of the master equation in matrix form.
fn lindblad_rhs(h: &CMat, a: &CMat, gamma: f64, rho: &CMat) -> CMat {
    let dim = rho.nrows();
    let i = C64::i();
    let hr = linalg::matmul(h, rho);
    let ar = linalg::matmul(a, rho);
    let jump = linalg::matmul(&ar, &linalg::adjoint(a));
    linalg::from_fn(dim, dim, |r, c| {
        // [H,ρ]_rc = (Hρ)_rc − conj((Hρ)_cr) since ρ and H are Hermitian
        let comm = hr[(r, c)] - hr[(c, r)].conj();
        -i * comm + gamma * (jump[(r, c)] - 0.5 * (r as f64 + c as f64) * rho[(r, c)])
    })
}

/// RK4 integration; returns states at t = 0, dt, …, t_end.
pub fn evolve_master(
    rho0: &FockDensityMatrix,
    p: &KerrParams,
    dt: f64,
    t_end: f64,
) -> Result<Vec<FockDensityMatrix>, LindbladError> {
    let mut out = Vec::new();
    evolve_master_with(rho0, p, dt, t_end, |_, rho| {
        out.push(rho.clone());
    })?;
    Ok(out)
}

/// RK4 integration calling `observe(t, ρ)` at every grid time, without
/// storing the trajectory.
pub fn evolve_master_with(
    rho0: &FockDensityMatrix,
    p: &KerrParams,
    dt: f64,
    t_end: f64,
    mut observe: impl FnMut(f64, &FockDensityMatrix),
) -> Result<FockDensityMatrix, LindbladError> {
    if !(dt > 0.0) || !(t_end >= 0.0) || !dt.is_finite() || !t_end.is_finite() {
        return Err(LindbladError::InvalidTimeGrid { dt, t_end });
    }
    let dim = rho0.dim();
    let h = hamiltonian(p, dim);
    let a = fock::annihilation(dim);
    let g = p.gamma;
    let steps = (t_end / dt).round() as usize;
    let mut rho = rho0.matrix().clone();
    observe(0.0, rho0);
    let half = C64::new(0.5 * dt, 0.0);
    let full = C64::new(dt, 0.0);
    for step in 1..=steps {
        let k1 = lindblad_rhs(&h, &a, g, &rho);
        let k2 = lindblad_rhs(&h, &a, g, &(&rho + &linalg::scale(&k1, half)));
        let k3 = lindblad_rhs(&h, &a, g, &(&rho + &linalg::scale(&k2, half)));
        let k4 = lindblad_rhs(&h, &a, g, &(&rho + &linalg::scale(&k3, full)));
        let incr = linalg::scale(&(&(&k1 + &k2) + &(&(&k2 + &k3) + &(&k3 + &k4))), C64::new(dt / 6.0, 0.0));
        rho = &rho + &incr;
        let tr = linalg::trace(&rho).re;
        if (tr - 1.0).abs() > TRACE_DRIFT_TOL || !tr.is_finite() {
            return Err(LindbladError::TraceDrift { step, trace: tr });
        }
        let state = FockDensityMatrix::from_approx(&rho)?;
        observe(step as f64 * dt, &state);
        if step == steps {
            return Ok(state);
        }
    }
    Ok(rho0.clone())
}
