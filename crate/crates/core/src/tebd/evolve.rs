//! Gate application, truncation and time stepping.

use super::gates::{Gate, GateSet};
use super::mps::{MatrixProductState, SiteTensor};
use super::TebdError;
use crate::fock;
use crate::linalg;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Relative Schmidt weight below which singular values are dropped.
pub const WEIGHT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    /// Discarded weight per step, summed over bonds.
    pub per_step: Vec<f64>,
    pub cumulative: f64,
    pub max_bond: usize,
}

impl TruncationReport {
    pub fn push(&mut self, discarded: f64, max_bond: usize) {
        self.per_step.push(discarded);
        self.cumulative += discarded;
        self.max_bond = self.max_bond.max(max_bond);
    }

    pub fn merge(&mut self, other: &TruncationReport) {
        for &d in &other.per_step {
            self.push(d, other.max_bond);
        }
    }
}

/// Apply a two-site gate on `bond` and truncate; returns the discarded
/// relative weight.
pub fn apply_gate(state: &mut MatrixProductState, gate: &Gate) -> Result<f64, TebdError> {
    let b = gate.bond;
    let lam_l = state.left_lambda(b);
    let (ta, tb) = (&state.tensors[b], &state.tensors[b + 1]);
    let (dl, d1, d2, dr) = (ta.dl, ta.d, tb.d, tb.dr);
    // Θ[(l s1), (s2 r)]
    let theta = linalg::matmul(&ta.as_left_matrix(), &tb.as_right_matrix());
    // T[(s1 s2), (l r)]
    let t = linalg::from_fn(d1 * d2, dl * dr, |i, j| {
        let (s1, s2) = (i / d2, i % d2);
        let (l, r) = (j / dr, j % dr);
        theta[(l * d1 + s1, s2 * dr + r)]
    });
    let tp = linalg::matmul(&gate.u, &t);
    let thetap = linalg::from_fn(dl * d1, d2 * dr, |i, j| {
        let (l, s1) = (i / d1, i % d1);
        let (s2, r) = (j / dr, j % dr);
        tp[(s1 * d2 + s2, l * dr + r)]
    });
    let phi = linalg::from_fn(dl * d1, d2 * dr, |i, j| thetap[(i, j)] * lam_l[i / d1]);
    let svd = linalg::thin_svd(&phi).map_err(|_| TebdError::SvdFailure { bond: b })?;
    let total: f64 = svd.s.iter().map(|s| s * s).sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(TebdError::SvdFailure { bond: b });
    }
    let floor_keep = svd.s.iter().take_while(|&&s| s * s / total >= state.weight_floor).count().max(1);
    let keep = floor_keep.min(state.chi_max.max(1));
    let kept: f64 = svd.s[..keep].iter().map(|s| s * s).sum();
    let discarded = ((total - kept) / total).max(0.0);
    let scale = kept.sqrt();
    let v = linalg::from_fn(d2 * dr, keep, |i, j| svd.v[(i, j)]);
    let new_b = linalg::from_fn(keep, d2 * dr, |i, j| v[(j, i)].conj());
    let new_a = linalg::scale(&linalg::matmul(&thetap, &v), C64::new(1.0 / scale, 0.0));
    state.tensors[b] = SiteTensor::from_left_matrix(&new_a, dl, d1);
    state.tensors[b + 1] = SiteTensor::from_right_matrix(&new_b, d2, dr);
    state.lambdas[b] = svd.s[..keep].iter().map(|s| s / scale).collect();
    Ok(discarded)
}

/// One second-order step `F(dt/2) G(dt) F(dt/2)`; returns the discarded
/// weight summed over all gate applications.
pub fn step(state: &mut MatrixProductState, gates: &GateSet) -> Result<f64, TebdError> {
    let mut disc = 0.0;
    for g in &gates.half_step_odd {
        disc += apply_gate(state, g)?;
    }
    for g in &gates.even_gates {
        disc += apply_gate(state, g)?;
    }
    for g in &gates.half_step_odd {
        disc += apply_gate(state, g)?;
    }
    state.restore_canonical()?;
    Ok(disc)
}

/// System-site observables along a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TebdRecord {
    pub times: Vec<f64>,
    pub mean_a: Vec<C64>,
    pub n: Vec<f64>,
    /// ⟨a†²a²⟩/⟨a†a⟩²; reported as 0 while ⟨a†a⟩ < 1e-12.
    pub g2: Vec<f64>,
}

impl TebdRecord {
    pub fn push(&mut self, t: f64, state: &MatrixProductState) {
        let (a, n, g2) = system_observables(state);
        self.times.push(t);
        self.mean_a.push(a);
        self.n.push(n);
        self.g2.push(g2);
    }

    pub fn as_trajectory(&self, dt: f64) -> crate::semiclassical::TrajectoryRecord {
        crate::semiclassical::TrajectoryRecord { times: self.times.clone(), values: self.mean_a.clone(), dt, seed: None }
    }
}

/// ⟨a⟩, ⟨a†a⟩ and g²(0) on the system site.
pub fn system_observables(state: &MatrixProductState) -> (C64, f64, f64) {
    let rho = state.site_density(0);
    let d = rho.nrows();
    let mut a = C64::new(0.0, 0.0);
    for k in 0..d - 1 {
        a += rho[(k + 1, k)] * ((k + 1) as f64).sqrt();
    }
    let tr: f64 = (0..d).map(|k| rho[(k, k)].re).sum();
    let n: f64 = (0..d).map(|k| k as f64 * rho[(k, k)].re).sum::<f64>() / tr;
    let nn: f64 = (0..d).map(|k| (k as f64) * (k as f64 - 1.0) * rho[(k, k)].re).sum::<f64>() / tr;
    let g2 = if n < 1e-12 { 0.0 } else { nn / (n * n) };
    (a / tr, n, g2)
}

/// Repeated steps from `t = 0` to `t_end`, recording system observables at
/// every grid time including `t = 0`.
pub fn evolve(
    state: &mut MatrixProductState,
    gates: &GateSet,
    t_end: f64,
) -> Result<(TebdRecord, TruncationReport), TebdError> {
    evolve_with(state, gates, t_end, |_, _| {})
}

/// As [`evolve`], additionally calling `observe(t, state)` after each step.
pub fn evolve_with(
    state: &mut MatrixProductState,
    gates: &GateSet,
    t_end: f64,
    mut observe: impl FnMut(f64, &MatrixProductState),
) -> Result<(TebdRecord, TruncationReport), TebdError> {
    let dt = gates.dt;
    if !(t_end >= dt * (1.0 - 1e-9)) || !t_end.is_finite() {
        return Err(TebdError::InvalidTimeGrid { dt, t_end });
    }
    let steps = (t_end / dt).round() as usize;
    let mut rec = TebdRecord::default();
    let mut report = TruncationReport::default();
    rec.push(0.0, state);
    observe(0.0, state);
    for k in 1..=steps {
        let d = step(state, gates)?;
        report.push(d, state.max_bond());
        let t = k as f64 * dt;
        rec.push(t, state);
        observe(t, state);
    }
    Ok((rec, report))
}

/// Normalized truncated coherent amplitudes and the norm of the dropped tail.
pub fn coherent_local(alpha: C64, dim: usize) -> (Vec<C64>, f64) {
    let (amps, tail) = fock::coherent_amplitudes(alpha, dim);
    let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    (amps.into_iter().map(|c| c / norm).collect(), tail)
}
