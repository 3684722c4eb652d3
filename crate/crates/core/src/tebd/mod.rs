//! Real-time evolution of system + chain by time-evolving block decimation.
//!
//! The system oscillator sits on site 0 and the reservoir chain on sites
//! 1..=N. The combined state is closed; damping of the oscillator emerges
//! from emission into the chain.

pub mod checkpoint;
pub mod correlation;
pub mod evolve;
pub mod gates;
pub mod mps;

pub use correlation::{stationary_correlators, two_time_correlation, Ladder, StationarityPolicy};
pub use evolve::{evolve, evolve_with, step, system_observables, TebdRecord, TruncationReport};
pub use gates::{build_gates, GateSet};
pub use mps::MatrixProductState;

use crate::chain_map::{self, ChainCoefficients, ChainError};
use crate::lindblad::{FockDensityMatrix, LindbladError};
use crate::linalg::{self, LinalgError};
use crate::model::{BathSpec, InitialState, KerrParams, ModelError};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TebdError {
    #[error("coherent tail {tail:.3e} exceeds 1e-6 at system cutoff {dim}")]
    CutoffTooSmall { dim: usize, tail: f64 },
    #[error("local dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("SVD failed on bond {bond}")]
    SvdFailure { bond: usize },
    #[error("invalid time grid dt = {dt}, t_end = {t_end}")]
    InvalidTimeGrid { dt: f64, t_end: f64 },
    #[error("state is not stationary: relative drift {drift:.3e} over τ = {window}")]
    StationarityViolated { drift: f64, window: f64 },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Density(#[from] LindbladError),
}

pub const COHERENT_TAIL_TOL: f64 = 1e-6;

/// Local Hilbert-space dimensions of the system site and of each chain site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDims {
    pub system: usize,
    pub chain: usize,
}

/// Named truncation and grid settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TebdPreset {
    pub n_chain: usize,
    pub chi_max: usize,
    pub dims: SystemDims,
    pub dt: f64,
    pub t_end: f64,
    pub omega_c: f64,
}

impl TebdPreset {
    /// N = 61, χ = 36, M = 20, dt = 1e-2, t_end = 2.
    pub const PAPER: Self = Self {
        n_chain: 61,
        chi_max: 36,
        dims: SystemDims { system: 40, chain: 20 },
        dt: 1e-2,
        t_end: 2.0,
        omega_c: BathSpec::PAPER_OMEGA_C,
    };

    /// N = 31, χ = 16, M = 10, dt = 1e-2, t_end = 2.
    pub const DESK: Self = Self {
        n_chain: 31,
        chi_max: 16,
        dims: SystemDims { system: 32, chain: 10 },
        dt: 1e-2,
        t_end: 2.0,
        omega_c: BathSpec::PAPER_OMEGA_C,
    };

    pub fn bath(&self, p: &KerrParams) -> Result<BathSpec, TebdError> {
        Ok(BathSpec::for_params(p, self.omega_c, self.n_chain)?)
    }

    pub fn coefficients(&self, p: &KerrParams) -> Result<ChainCoefficients, TebdError> {
        Ok(chain_map::chain_coefficients(&self.bath(p)?, self.n_chain)?)
    }
}

/// Coherent system state times chain vacuum.
pub fn init_state(a0: &InitialState, dims: SystemDims, n_chain: usize, chi_max: usize) -> Result<MatrixProductState, TebdError> {
    if dims.system < 2 {
        return Err(TebdError::DimensionTooSmall(dims.system));
    }
    if dims.chain < 2 {
        return Err(TebdError::DimensionTooSmall(dims.chain));
    }
    let (sys, tail) = evolve::coherent_local(a0.alpha(), dims.system);
    if tail >= COHERENT_TAIL_TOL {
        return Err(TebdError::CutoffTooSmall { dim: dims.system, tail });
    }
    let mut vac = vec![C64::new(0.0, 0.0); dims.chain];
    vac[0] = C64::new(1.0, 0.0);
    let mut locals = vec![sys];
    locals.extend(std::iter::repeat_n(vac, n_chain));
    Ok(MatrixProductState::product(&locals, chi_max))
}

/// Reduced density matrix of `site` with every other site traced out.
pub fn reduced_density_matrix(state: &MatrixProductState, site: usize) -> Result<FockDensityMatrix, TebdError> {
    Ok(FockDensityMatrix::from_approx(&state.site_density(site))?)
}

/// Exact system amplitude for a linear cavity on the same closed chain:
/// coherent product states stay coherent and the amplitudes obey
/// `i dα/dt = h α + iE e₀` with `h` the single-particle chain Hamiltonian.
pub fn linear_chain_reference(p: &KerrParams, coeffs: &ChainCoefficients, a0: C64, times: &[f64]) -> Result<Vec<C64>, TebdError> {
    let h = chain_map::chain_single_particle(coeffs, p.delta);
    let (vals, v) = linalg::eigh(&h)?;
    let n = vals.len();
    // β = V† α, f = V† E e₀
    let beta0: Vec<C64> = (0..n).map(|k| v[(0, k)].conj() * a0).collect();
    let f: Vec<C64> = (0..n).map(|k| v[(0, k)].conj() * p.drive).collect();
    Ok(times
        .iter()
        .map(|&t| {
            (0..n)
                .map(|k| {
                    let lam = vals[k];
                    let ph = C64::from_polar(1.0, -lam * t);
                    let drive = if (lam * t).abs() < 1e-8 { C64::new(t, 0.0) } else { (C64::new(1.0, 0.0) - ph) / (C64::i() * lam) };
                    v[(0, k)] * (ph * beta0[k] + drive * f[k])
                })
                .sum()
        })
        .collect())
}
