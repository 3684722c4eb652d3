//! Driven dissipative Kerr oscillator coupled to a flat zero-temperature
//! reservoir.
//!
//! Solvers: mean-field and stochastic trajectories ([`semiclassical`]), the
//! closed-form quantum steady state ([`exact_steady`]), a dense master
//! equation reference ([`lindblad`]), and MPS evolution of the oscillator
//! plus the chain-mapped reservoir ([`chain_map`], [`tebd`]). Fluctuation
//! spectra and Wigner functions are in [`spectra`] and [`wigner`].

pub mod chain_map;
pub mod exact_steady;
pub mod fock;
pub mod lindblad;
pub mod linalg;
pub mod model;
pub mod semiclassical;
pub mod spectra;
pub mod tebd;
pub mod wigner;

pub use model::{BathSpec, InitialState, KerrParams};
pub use num_complex::Complex64 as C64;

use thiserror::Error;

/// Union of the per-module errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Semiclassical(#[from] semiclassical::SemiclassicalError),
    #[error(transparent)]
    Lindblad(#[from] lindblad::LindbladError),
    #[error(transparent)]
    Exact(#[from] exact_steady::ExactError),
    #[error(transparent)]
    Chain(#[from] chain_map::ChainError),
    #[error(transparent)]
    Tebd(#[from] tebd::TebdError),
    #[error(transparent)]
    Spectra(#[from] spectra::SpectraError),
    #[error(transparent)]
    Wigner(#[from] wigner::WignerError),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
}

impl Error {
    /// Stable machine-readable category.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Model(_) => "invalid_parameters",
            Error::Semiclassical(_) => "semiclassical",
            Error::Lindblad(_) => "master_equation",
            Error::Exact(_) => "exact_steady_state",
            Error::Chain(_) => "chain_map",
            Error::Tebd(_) => "tebd",
            Error::Spectra(_) => "spectra",
            Error::Wigner(_) => "wigner",
            Error::Linalg(_) => "linear_algebra",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
