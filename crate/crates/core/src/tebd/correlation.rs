//! Two-time correlators of the system field by quantum regression.
//!
//! `⟨A(t+τ) B(t)⟩ = ⟨Ψ(τ)| A |Φ_B(τ)⟩ · ‖B Ψ‖` where `Ψ(τ)` is the state
//! propagated for τ and `Φ_B(τ)` the propagated normalized `B|Ψ⟩`.

use super::evolve::{step, system_observables};
use super::gates::GateSet;
use super::mps::MatrixProductState;
use super::TebdError;
use crate::fock;
use crate::linalg::CMat;
use crate::spectra::StationaryCorrelators;
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    A,
    Adag,
}

impl Ladder {
    fn matrix(self, dim: usize) -> CMat {
        match self {
            Ladder::A => fock::annihilation(dim),
            Ladder::Adag => fock::creation(dim),
        }
    }
}

/// What to do when the input state drifts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StationarityPolicy {
    /// Fail if ⟨a⟩ moves by more than `tol` relative over `window`.
    Enforce { window: f64, tol: f64 },
    /// Compute regardless.
    Report,
}

impl StationarityPolicy {
    /// 2% relative drift of ⟨a⟩ over 0.2 time units.
    pub const DEFAULT: Self = Self::Enforce { window: 0.2, tol: 0.02 };
}

/// Relative drift measure `|⟨a⟩(τ) − ⟨a⟩(0)| / max(|⟨a⟩(0)|, 0.05)`.
fn drift(a0: C64, a: C64) -> f64 {
    (a - a0).norm() / a0.norm().max(0.05)
}

/// `⟨A(t+τ) B(t)⟩` on τ = 0, dt, …, tau_max (not connected).
pub fn two_time_correlation(
    state: &MatrixProductState,
    gates: &GateSet,
    ops: (Ladder, Ladder),
    tau_max: f64,
) -> Result<Vec<C64>, TebdError> {
    let dim = state.local_dims[0];
    let (a_op, b_op) = (ops.0.matrix(dim), ops.1.matrix(dim));
    let mut psi = state.clone();
    let mut phi = state.clone();
    let nb = phi.apply_site0(&b_op)?;
    let steps = (tau_max / gates.dt).round() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        if k > 0 {
            step(&mut psi, gates)?;
            if nb > 0.0 {
                step(&mut phi, gates)?;
            }
        }
        out.push(if nb > 0.0 { nb * phi.overlap_with_site0(&psi, Some(&a_op)) } else { C64::new(0.0, 0.0) });
    }
    Ok(out)
}

/// All four connected correlators `⟨δA(τ) δB⟩`, A, B ∈ {a, a†}, with the
/// means taken at τ = 0.
pub fn stationary_correlators(
    state: &MatrixProductState,
    gates: &GateSet,
    gamma: f64,
    tau_max: f64,
    policy: StationarityPolicy,
) -> Result<(StationaryCorrelators, f64), TebdError> {
    let dim = state.local_dims[0];
    let a = fock::annihilation(dim);
    let ad = fock::creation(dim);
    let (mean_a, _, _) = system_observables(state);
    let mut psi = state.clone();
    let mut phi_a = state.clone();
    let mut phi_ad = state.clone();
    let na = phi_a.apply_site0(&a)?;
    let nad = phi_ad.apply_site0(&ad)?;
    let steps = (tau_max / gates.dt).round() as usize;
    let window = match policy {
        StationarityPolicy::Enforce { window, .. } => window,
        StationarityPolicy::Report => 0.2,
    };
    let mut max_drift: f64 = 0.0;
    let zero = C64::new(0.0, 0.0);
    let mut c = StationaryCorrelators {
        tau: vec![],
        gamma,
        a_a: vec![],
        ad_a: vec![],
        a_ad: vec![],
        ad_ad: vec![],
        mean_a,
    };
    let ma = mean_a;
    let mad = mean_a.conj();
    for k in 0..=steps {
        if k > 0 {
            step(&mut psi, gates)?;
            if na > 0.0 {
                step(&mut phi_a, gates)?;
            }
            step(&mut phi_ad, gates)?;
        }
        let tau = k as f64 * gates.dt;
        if tau <= window + 1e-12 {
            max_drift = max_drift.max(drift(mean_a, system_observables(&psi).0));
        }
        let (xa, xad) = if na > 0.0 {
            (na * phi_a.overlap_with_site0(&psi, Some(&a)), na * phi_a.overlap_with_site0(&psi, Some(&ad)))
        } else {
            (zero, zero)
        };
        let ya = nad * phi_ad.overlap_with_site0(&psi, Some(&a));
        let yad = nad * phi_ad.overlap_with_site0(&psi, Some(&ad));
        c.tau.push(tau);
        c.a_a.push(xa - ma * ma);
        c.ad_a.push(xad - mad * ma);
        c.a_ad.push(ya - ma * mad);
        c.ad_ad.push(yad - mad * mad);
    }
    if let StationarityPolicy::Enforce { tol, window } = policy {
        if max_drift > tol {
            return Err(TebdError::StationarityViolated { drift: max_drift, window });
        }
    }
    Ok((c, max_drift))
}
