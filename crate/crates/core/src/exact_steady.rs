//! Closed-form quantum steady state of the driven Kerr cavity.
//!
//! With `p = Δ/χ″ + γ/(2iχ″)`, `q = p*` and `z = 2(E/χ″)²` the stationary
//! field and second-order coherence are ratios of ₀F₂ series,
//!
//! `⟨a⟩ = (E/iχ″) · F(p+1, q, z) / (p F(p, q, z))`,
//! `g²(0) = p q F(p,q,z) F(p+2,q+2,z) / ((p+1)(q+1) F(p+1,q+1,z)²)`.
//!
//! The overall sign of ⟨a⟩ follows the drive convention of [`crate::model`].

use crate::model::KerrParams;
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("Pochhammer parameter {0} is a non-positive integer")]
    PoleInParameter(C64),
    #[error("series did not reach relative tail {tol:e} within {terms} terms")]
    NonConvergence { terms: usize, tol: f64 },
    #[error("closed form requires a nonzero anharmonicity")]
    LinearCavity,
    #[error("closed form requires a real drive, got {0}")]
    ComplexDrive(C64),
    #[error("g2(0) undefined without drive")]
    ZeroDrive,
    #[error("g2(0) has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
}

pub const TAIL_TOL: f64 = 1e-14;
pub const MAX_TERMS: usize = 100_000;
const IMAG_TOL: f64 = 1e-10;

/// Arguments of the ₀F₂ series built from the oscillator parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    pub p: C64,
    pub q: C64,
    pub z: f64,
}

impl HyperParams {
    pub fn from_params(k: &KerrParams) -> Result<Self, ExactError> {
        if k.chi2 == 0.0 {
            return Err(ExactError::LinearCavity);
        }
        if k.drive.im != 0.0 {
            return Err(ExactError::ComplexDrive(k.drive));
        }
        let e = k.drive.re;
        let p = C64::new(k.delta / k.chi2, 0.0) + k.gamma / (2.0 * C64::i() * k.chi2);
        Ok(Self { p, q: p.conj(), z: 2.0 * (e / k.chi2).powi(2) })
    }
}

fn is_nonpositive_integer(x: C64) -> bool {
    x.im == 0.0 && x.re <= 0.0 && x.re.fract() == 0.0
}

/// ₀F₂(;p,q;z) = Σ zⁿ / ((p)ₙ (q)ₙ n!) with Kahan-compensated summation.
pub fn hyper0f2(p: C64, q: C64, z: C64) -> Result<C64, ExactError> {
    for x in [p, q] {
        if is_nonpositive_integer(x) {
            return Err(ExactError::PoleInParameter(x));
        }
    }
    let mut sum = C64::new(1.0, 0.0);
    let mut comp = C64::new(0.0, 0.0);
    let mut term = C64::new(1.0, 0.0);
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let ratio = z / ((p + nf) * (q + nf) * (nf + 1.0));
        term *= ratio;
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        // once the ratio is below 1/2 the remaining tail is bounded by |term|
        if ratio.norm() < 0.5 && term.norm() <= TAIL_TOL * sum.norm() {
            return Ok(sum);
        }
        if term == C64::new(0.0, 0.0) {
            return Ok(sum);
        }
    }
    Err(ExactError::NonConvergence { terms: MAX_TERMS, tol: TAIL_TOL })
}

/// Stationary field amplitude ⟨a⟩.
pub fn mean_field(k: &KerrParams) -> Result<C64, ExactError> {
    let h = HyperParams::from_params(k)?;
    let e = k.drive.re;
    if e == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let z = C64::new(h.z, 0.0);
    let num = hyper0f2(h.p + 1.0, h.q, z)?;
    let den = h.p * hyper0f2(h.p, h.q, z)?;
    Ok(e / (C64::i() * k.chi2) * num / den)
}

/// Mean photon number `⟨a†a⟩ = (E/χ″)² F(p+1,q+1,z) / (p q F(p,q,z))`.
pub fn photon_number(k: &KerrParams) -> Result<f64, ExactError> {
    let h = HyperParams::from_params(k)?;
    let z = C64::new(h.z, 0.0);
    let v = 0.5 * h.z * hyper0f2(h.p + 1.0, h.q + 1.0, z)? / (h.p * h.q * hyper0f2(h.p, h.q, z)?);
    Ok(v.re)
}

/// Zero-delay second-order coherence g²(0).
pub fn g2_zero(k: &KerrParams) -> Result<f64, ExactError> {
    let h = HyperParams::from_params(k)?;
    if k.drive.re == 0.0 {
        return Err(ExactError::ZeroDrive);
    }
    let z = C64::new(h.z, 0.0);
    let (p, q) = (h.p, h.q);
    let f00 = hyper0f2(p, q, z)?;
    let f11 = hyper0f2(p + 1.0, q + 1.0, z)?;
    let f22 = hyper0f2(p + 2.0, q + 2.0, z)?;
    let g2 = p * q * f00 * f22 / ((p + 1.0) * (q + 1.0) * f11 * f11);
    if g2.im.abs() > IMAG_TOL * g2.norm().max(1.0) {
        return Err(ExactError::ImaginaryResidue(g2.im));
    }
    Ok(g2.re)
}
