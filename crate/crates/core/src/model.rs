//! Physical parameters, bath description and the mean-field equation of motion.
//!
//! All quantities are dimensionless, measured in units of the inverse density
//! of states `g` of the reservoir. Frequencies are in the frame rotating at the
//! drive frequency, so `delta` is the cavity detuning.
//!
//! Drive convention: the system Hamiltonian is
//! `H = Δ a†a + χ″ a†²a² + i(E a† − E* a)`, whose Heisenberg equation gives
//! `ȧ = −iΔa − 2iχ″ a†a a + E − (γ/2) a`. Every solver in this crate uses this
//! sign of the drive.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dissipation rate must be positive, got {0}")]
    NonPositiveGamma(f64),
    #[error("bath cutoff must be positive, got {0}")]
    NonPositiveCutoff(f64),
    #[error("bath needs at least one chain site")]
    EmptyBath,
    #[error("initial amplitude must be non-negative, got {0}")]
    NegativeAmplitude(f64),
    #[error("parameter {name} is not finite")]
    NonFinite { name: &'static str },
}

/// Parameters of the driven, damped Kerr oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KerrParams {
    /// Detuning Δ = ω_S − ω_L.
    pub delta: f64,
    /// Anharmonicity χ″ multiplying a†²a². Zero means a linear cavity.
    pub chi2: f64,
    /// Energy dissipation rate γ.
    pub gamma: f64,
    /// Coherent drive amplitude E.
    pub drive: C64,
}

impl KerrParams {
    pub const PAPER_DELTA: f64 = -12.0;
    pub const PAPER_CHI2: f64 = 1.5;
    pub const PAPER_GAMMA: f64 = 6.28;

    pub fn new(delta: f64, chi2: f64, gamma: f64, drive: C64) -> Result<Self, ModelError> {
        let p = Self { delta, chi2, gamma, drive };
        p.validate()?;
        Ok(p)
    }

    /// Δ = −12, χ″ = 1.5, γ = 6.28 with a real drive `e`.
    pub fn paper(e: f64) -> Self {
        Self { delta: Self::PAPER_DELTA, chi2: Self::PAPER_CHI2, gamma: Self::PAPER_GAMMA, drive: C64::new(e, 0.0) }
    }

    pub fn with_drive(self, e: f64) -> Self {
        Self { drive: C64::new(e, 0.0), ..self }
    }

    pub fn with_chi2(self, chi2: f64) -> Self {
        Self { chi2, ..self }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, v) in [
            ("delta", self.delta),
            ("chi2", self.chi2),
            ("gamma", self.gamma),
            ("drive.re", self.drive.re),
            ("drive.im", self.drive.im),
        ] {
            if !v.is_finite() {
                return Err(ModelError::NonFinite { name });
            }
        }
        if self.gamma <= 0.0 {
            return Err(ModelError::NonPositiveGamma(self.gamma));
        }
        Ok(())
    }

    pub fn is_linear(&self) -> bool {
        self.chi2 == 0.0
    }
}

/// Flat (wide-band) zero-temperature reservoir with a hard cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    /// Cutoff ω_c = g·x_m.
    pub omega_c: f64,
    /// Mode-independent coupling c₀ with γ = 2π c₀².
    pub c0: f64,
    /// Number of chain oscillators N.
    pub n_sites: usize,
}

impl BathSpec {
    /// Cutoff `x_max = 60` used for all published runs.
    pub const PAPER_OMEGA_C: f64 = 60.0;

    /// Bath reproducing damping rate `gamma`.
    pub fn flat(gamma: f64, omega_c: f64, n_sites: usize) -> Result<Self, ModelError> {
        if gamma <= 0.0 {
            return Err(ModelError::NonPositiveGamma(gamma));
        }
        if omega_c <= 0.0 || !omega_c.is_finite() {
            return Err(ModelError::NonPositiveCutoff(omega_c));
        }
        if n_sites == 0 {
            return Err(ModelError::EmptyBath);
        }
        Ok(Self { omega_c, c0: (gamma / (2.0 * PI)).sqrt(), n_sites })
    }

    pub fn for_params(p: &KerrParams, omega_c: f64, n_sites: usize) -> Result<Self, ModelError> {
        Self::flat(p.gamma, omega_c, n_sites)
    }

    /// Damping rate implied by the coupling, γ = 2π c₀².
    pub fn gamma(&self) -> f64 {
        2.0 * PI * self.c0 * self.c0
    }
}

/// Coherent initial state α(0) = r·e^{iφ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub amplitude: f64,
    /// Phase in radians.
    pub phase: f64,
}

impl InitialState {
    pub const VACUUM: Self = Self { amplitude: 0.0, phase: 0.0 };

    pub fn new(amplitude: f64, phase: f64) -> Result<Self, ModelError> {
        if !(amplitude >= 0.0) {
            return Err(ModelError::NegativeAmplitude(amplitude));
        }
        if !phase.is_finite() {
            return Err(ModelError::NonFinite { name: "phase" });
        }
        Ok(Self { amplitude, phase })
    }

    /// Phase given as a multiple of π, the way the initial states are quoted:
    /// `[1.5, 0.33π]` is `from_pi_units(1.5, 0.33)`.
    pub fn from_pi_units(amplitude: f64, phase_over_pi: f64) -> Result<Self, ModelError> {
        Self::new(amplitude, phase_over_pi * PI)
    }

    /// The three coherent starting points used throughout: ground state,
    /// metastable-branch state and upper-branch state.
    pub fn paper_set() -> [Self; 3] {
        [
            Self::VACUUM,
            Self { amplitude: 1.5, phase: 0.33 * PI },
            Self { amplitude: 2.5, phase: -0.37 * PI },
        ]
    }

    pub fn alpha(&self) -> C64 {
        C64::from_polar(self.amplitude, self.phase)
    }
}

/// Heaviside step with Θ(0) = 1/2.
fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Bath spectral density J(ω) = (γ/2) Θ(ω + ω_c) Θ(ω_c − ω).
///
/// At the band edges |ω| = ω_c one factor is Θ(0) = 1/2, so J = γ/4 there.
pub fn spectral_density(omega: f64, bath: &BathSpec) -> f64 {
    0.5 * bath.gamma() * heaviside(omega + bath.omega_c) * heaviside(bath.omega_c - omega)
}

/// Mean-field drift `ȧ = −iΔa − 2iχ″|a|²a + E − (γ/2)a`.
pub fn eom_rhs(a: C64, p: &KerrParams) -> C64 {
    let i = C64::i();
    -i * p.delta * a - 2.0 * i * p.chi2 * a.norm_sqr() * a + p.drive - 0.5 * p.gamma * a
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bath(gamma: f64) -> BathSpec {
        BathSpec::flat(gamma, 60.0, 10).unwrap()
    }

    #[test]
    fn spectral_density_examples() {
        assert!((spectral_density(0.0, &bath(6.28)) - 3.14).abs() < 1e-12);
        assert_eq!(spectral_density(100.0, &bath(6.28)), 0.0);
        assert!((spectral_density(-30.0, &bath(2.0)) - 1.0).abs() < 1e-12);
        assert!((spectral_density(60.0, &bath(2.0)) - 0.5).abs() < 1e-12);
        assert!((spectral_density(-60.0, &bath(2.0)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn spectral_density_integrates_to_gamma_omega_c() {
        // composite Simpson on (-ω_c, ω_c); the integrand is flat inside
        let b = bath(6.28);
        let n = 2000;
        let h = 2.0 * b.omega_c / n as f64;
        let mut acc = 0.0;
        for k in 0..=n {
            let w = -b.omega_c + k as f64 * h;
            // open interval: use interior values at the endpoints
            let f = spectral_density(w.clamp(-b.omega_c * (1.0 - 1e-15), b.omega_c * (1.0 - 1e-15)), &b);
            let c = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += c * f;
        }
        acc *= h / 3.0;
        let expect = 6.28 * 60.0;
        assert!(((acc - expect) / expect).abs() < 1e-10, "{acc}");
    }

    #[test]
    fn c0_matches_gamma() {
        let b = bath(6.28);
        assert!(((b.gamma() - 6.28) / 6.28).abs() < 1e-12);
        assert!((b.c0 - 0.99975).abs() < 1e-5);
    }

    #[test]
    fn eom_examples() {
        let p = KerrParams::new(-3.0, 0.7, 2.0, C64::new(1.0, 0.0)).unwrap();
        assert_eq!(eom_rhs(C64::new(0.0, 0.0), &p), C64::new(1.0, 0.0));
        let lin = KerrParams::new(1.0, 0.0, 2.0, C64::new(0.0, 0.0)).unwrap();
        assert!((eom_rhs(C64::new(1.0, 0.0), &lin) - C64::new(-1.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(KerrParams::new(0.0, 0.0, 0.0, C64::new(0.0, 0.0)), Err(ModelError::NonPositiveGamma(0.0)));
        assert!(BathSpec::flat(1.0, 0.0, 3).is_err());
        assert!(BathSpec::flat(1.0, 1.0, 0).is_err());
        assert!(InitialState::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn paper_initial_states() {
        let [v, m, u] = InitialState::paper_set();
        assert_eq!(v.alpha(), C64::new(0.0, 0.0));
        assert!((m.alpha().norm() - 1.5).abs() < 1e-15);
        assert!((u.alpha().arg() + 0.37 * PI).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn spectral_density_is_even(w in -200.0f64..200.0, g in 0.1f64..20.0) {
            let b = bath(g);
            prop_assert_eq!(spectral_density(w, &b), spectral_density(-w, &b));
        }

        #[test]
        fn linear_drift_is_affine(
            d in -20.0f64..20.0, g in 0.1f64..10.0, er in -5.0f64..5.0, ei in -5.0f64..5.0,
            a1r in -3.0f64..3.0, a1i in -3.0f64..3.0, a2r in -3.0f64..3.0, a2i in -3.0f64..3.0,
        ) {
            let p = KerrParams::new(d, 0.0, g, C64::new(er, ei)).unwrap();
            let a1 = C64::new(a1r, a1i);
            let a2 = C64::new(a2r, a2i);
            let lhs = eom_rhs(a1 + a2, &p) - eom_rhs(a1, &p) - eom_rhs(a2, &p);
            // with the +E drive convention the affine offset is −E
            prop_assert!((lhs + p.drive).norm() < 1e-12);
        }
    }
}
