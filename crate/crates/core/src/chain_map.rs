//! Star-to-chain mapping of the flat reservoir.
//!
//! A flat band on [−ω_c, ω_c] coupled with strength c₀ maps, through the
//! normalized shifted Legendre polynomials, onto a semi-infinite chain with
//! zero on-site frequencies, system coupling `η′ = c₀√(2ω_c)` and hoppings
//! `η_n = ω_c (n+1)/√((2n+1)(2n+3))`.

use crate::linalg::{self, CMat};
use crate::model::BathSpec;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("chain needs at least 2 sites, got {0}")]
    TooFewSites(usize),
    #[error("quadrature with {n_quad} nodes cannot resolve {n_polys} polynomials")]
    QuadratureTooCoarse { n_polys: usize, n_quad: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainCoefficients {
    /// System to first-site coupling η′.
    pub eta_prime: f64,
    /// On-site frequencies ω_n, one per site.
    pub omegas: Vec<f64>,
    /// Nearest-neighbour hoppings η_n between sites n and n+1.
    pub etas: Vec<f64>,
}

impl ChainCoefficients {
    pub fn n_sites(&self) -> usize {
        self.omegas.len()
    }
}

pub fn legendre_hopping(omega_c: f64, n: usize) -> f64 {
    let n = n as f64;
    omega_c * (n + 1.0) / ((2.0 * n + 1.0) * (2.0 * n + 3.0)).sqrt()
}

pub fn chain_coefficients(bath: &BathSpec, n_sites: usize) -> Result<ChainCoefficients, ChainError> {
    if n_sites < 2 {
        return Err(ChainError::TooFewSites(n_sites));
    }
    Ok(ChainCoefficients {
        eta_prime: bath.c0 * (2.0 * bath.omega_c).sqrt(),
        omegas: vec![0.0; n_sites],
        etas: (0..n_sites - 1).map(|n| legendre_hopping(bath.omega_c, n)).collect(),
    })
}

/// Legendre polynomials P_0..P_{n-1} at x.
fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let (mut p0, mut p1) = (1.0, x);
    for k in 0..n {
        match k {
            0 => out.push(p0),
            1 => out.push(p1),
            _ => {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
                out.push(p2);
            }
        }
    }
    out
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Max deviation of the Gram matrix of
/// `U_n(x) = √((2n+1)/(2x_m)) P_n(x/x_m)` from the identity under an
/// `n_quad`-point Gauss–Legendre rule on [−x_m, x_m].
pub fn unitary_orthonormality_check(n_polys: usize, n_quad: usize) -> Result<f64, ChainError> {
    if n_quad < 2 * n_polys {
        return Err(ChainError::QuadratureTooCoarse { n_polys, n_quad });
    }
    let x_m = BathSpec::PAPER_OMEGA_C;
    let (t, w) = gauss_legendre(n_quad);
    let table: Vec<Vec<f64>> = t
        .iter()
        .map(|&tk| {
            legendre_all(n_polys, tk)
                .into_iter()
                .enumerate()
                .map(|(n, p)| ((2.0 * n as f64 + 1.0) / (2.0 * x_m)).sqrt() * p)
                .collect()
        })
        .collect();
    let mut dev: f64 = 0.0;
    for m in 0..n_polys {
        for n in 0..=m {
            let g: f64 = (0..n_quad).map(|k| w[k] * x_m * table[k][m] * table[k][n]).sum();
            dev = dev.max((g - if m == n { 1.0 } else { 0.0 }).abs());
        }
    }
    Ok(dev)
}

/// Single-excitation Hamiltonian of system + chain, system first.
pub fn chain_single_particle(coeffs: &ChainCoefficients, system_freq: f64) -> CMat {
    let n = coeffs.n_sites() + 1;
    linalg::from_fn(n, n, |i, j| {
        let v = if i == j {
            if i == 0 { system_freq } else { coeffs.omegas[i - 1] }
        } else if i.abs_diff(j) == 1 {
            let k = i.min(j);
            if k == 0 { coeffs.eta_prime } else { coeffs.etas[k - 1] }
        } else {
            0.0
        };
        C64::new(v, 0.0)
    })
}

/// Single-excitation Hamiltonian of system + star bath discretized on an
/// `n_modes`-point Gauss–Legendre grid: modes `ω_c x_k` with couplings
/// `c₀√(ω_c w_k)`.
pub fn star_single_particle(bath: &BathSpec, n_modes: usize, system_freq: f64) -> CMat {
    let (x, w) = gauss_legendre(n_modes);
    let n = n_modes + 1;
    linalg::from_fn(n, n, |i, j| {
        let v = match (i, j) {
            (0, 0) => system_freq,
            (0, k) | (k, 0) => bath.c0 * (bath.omega_c * w[k - 1]).sqrt(),
            (a, b) if a == b => bath.omega_c * x[a - 1],
            _ => 0.0,
        };
        C64::new(v, 0.0)
    })
}
