//! Truncated Fock-space building blocks shared by the dense solvers.

use crate::linalg::{self, CMat};
use num_complex::Complex64 as C64;

/// Annihilation operator `a` on a `dim`-level truncated space.
pub fn annihilation(dim: usize) -> CMat {
    linalg::from_fn(dim, dim, |i, j| if j == i + 1 { C64::new((j as f64).sqrt(), 0.0) } else { C64::new(0.0, 0.0) })
}

pub fn creation(dim: usize) -> CMat {
    linalg::adjoint(&annihilation(dim))
}

pub fn number(dim: usize) -> CMat {
    linalg::from_fn(dim, dim, |i, j| if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.0, 0.0) })
}

/// Fock amplitudes `e^{-|α|²/2} αⁿ/√n!` for n < dim, and the norm of the
/// discarded tail `‖|α⟩ − |α⟩_trunc‖`.
pub fn coherent_amplitudes(alpha: C64, dim: usize) -> (Vec<C64>, f64) {
    let mut amps = Vec::with_capacity(dim);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    let mut kept = 0.0;
    for n in 0..dim {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
        }
        kept += c.norm_sqr();
        amps.push(c);
    }
    // 1 - kept loses precision once the tail is tiny; sum it directly instead
    let mut tail = 0.0;
    let mut t = c;
    for n in dim..dim + 400 {
        t *= alpha / (n as f64).sqrt();
        tail += t.norm_sqr();
        if t.norm_sqr() < 1e-40 * (tail + 1e-300) && n > dim + 10 {
            break;
        }
    }
    let tail = if tail > 0.0 { tail } else { (1.0 - kept).max(0.0) };
    (amps, tail.sqrt())
}

/// Density matrix `|α⟩⟨α|` of the truncated (renormalized) coherent state.
pub fn coherent_density(alpha: C64, dim: usize) -> CMat {
    let (amps, _) = coherent_amplitudes(alpha, dim);
    let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    linalg::from_fn(dim, dim, |i, j| amps[i] * amps[j].conj() / norm)
}

/// Thermal state with mean occupation `n_bar`, truncated and renormalized.
pub fn thermal_density(n_bar: f64, dim: usize) -> CMat {
    let r = n_bar / (1.0 + n_bar);
    let w: Vec<f64> = (0..dim).map(|k| r.powi(k as i32)).collect();
    let z: f64 = w.iter().sum();
    linalg::from_fn(dim, dim, |i, j| if i == j { C64::new(w[i] / z, 0.0) } else { C64::new(0.0, 0.0) })
}

/// Projector onto the Fock state `|k⟩`.
pub fn fock_density(k: usize, dim: usize) -> CMat {
    linalg::from_fn(dim, dim, |i, j| if i == k && j == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}
