//! Two-site Trotter gates for the system + chain Hamiltonian.
//!
//! Bond 0 couples the system to the first chain site, bond `b ≥ 1` couples
//! chain sites `b` and `b+1`. Odd bonds in one-based counting (0, 2, 4, …
//! here) form the F layer and the rest the G layer of the second-order
//! splitting `F(dt/2) G(dt) F(dt/2)`.

use super::{SystemDims, TebdError};
use crate::chain_map::ChainCoefficients;
use crate::fock;
use crate::lindblad;
use crate::linalg::{self, CMat};
use crate::model::KerrParams;
use num_complex::Complex64 as C64;

#[derive(Debug, Clone)]
pub struct Gate {
    pub bond: usize,
    pub u: CMat,
}

#[derive(Debug, Clone)]
pub struct GateSet {
    pub dt: f64,
    /// Full-step gates on the F layer.
    pub odd_gates: Vec<Gate>,
    /// Full-step gates on the G layer.
    pub even_gates: Vec<Gate>,
    /// Half-step gates on the F layer.
    pub half_step_odd: Vec<Gate>,
}

impl GateSet {
    pub fn max_unitarity_defect(&self) -> f64 {
        self.odd_gates
            .iter()
            .chain(&self.even_gates)
            .chain(&self.half_step_odd)
            .map(|g| {
                let p = linalg::matmul(&linalg::adjoint(&g.u), &g.u);
                linalg::max_abs_diff(&p, &linalg::identity(p.nrows()))
            })
            .fold(0.0, f64::max)
    }
}

/// Two-site bond Hamiltonians, bond `b` acting on sites `b` and `b + 1`,
/// as `(d_b·d_{b+1})`-dimensional matrices with row index `s_b·d_{b+1} + s_{b+1}`.
pub fn bond_hamiltonians(p: &KerrParams, coeffs: &ChainCoefficients, dims: SystemDims) -> Vec<CMat> {
    let n_chain = coeffs.n_sites();
    let n_sites = n_chain + 1;
    let local_dim = |k: usize| if k == 0 { dims.system } else { dims.chain };
    let site_term = |k: usize| -> CMat {
        if k == 0 {
            lindblad::hamiltonian(p, dims.system)
        } else {
            linalg::scale(&fock::number(dims.chain), C64::new(coeffs.omegas[k - 1], 0.0))
        }
    };
    (0..n_sites - 1)
        .map(|b| {
            let (dl, dr) = (local_dim(b), local_dim(b + 1));
            let (al, ar) = (fock::annihilation(dl), fock::annihilation(dr));
            let coupling = if b == 0 { coeffs.eta_prime } else { coeffs.etas[b - 1] };
            let hop = linalg::add(
                &linalg::kron(&linalg::adjoint(&al), &ar),
                &linalg::kron(&al, &linalg::adjoint(&ar)),
            );
            let mut h = linalg::scale(&hop, C64::new(coupling, 0.0));
            // left site: full share if it has no bond to its left
            let wl = if b == 0 { 1.0 } else { 0.5 };
            let wr = if b + 1 == n_sites - 1 { 1.0 } else { 0.5 };
            h = linalg::add(&h, &linalg::kron(&linalg::scale(&site_term(b), C64::new(wl, 0.0)), &linalg::identity(dr)));
            h = linalg::add(&h, &linalg::kron(&linalg::identity(dl), &linalg::scale(&site_term(b + 1), C64::new(wr, 0.0))));
            h
        })
        .collect()
}

pub fn build_gates(p: &KerrParams, coeffs: &ChainCoefficients, dt: f64, dims: SystemDims) -> Result<GateSet, TebdError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(TebdError::InvalidTimeGrid { dt, t_end: f64::NAN });
    }
    let hs = bond_hamiltonians(p, coeffs, dims);
    let mut set = GateSet { dt, odd_gates: vec![], even_gates: vec![], half_step_odd: vec![] };
    for (b, h) in hs.iter().enumerate() {
        let (vals, v) = linalg::eigh(h)?;
        let expm = |t: f64| {
            let n = h.nrows();
            let phased = linalg::from_fn(n, n, |i, k| v[(i, k)] * C64::from_polar(1.0, -vals[k] * t));
            linalg::matmul(&phased, &linalg::adjoint(&v))
        };
        if b % 2 == 0 {
            set.odd_gates.push(Gate { bond: b, u: expm(dt) });
            set.half_step_odd.push(Gate { bond: b, u: expm(0.5 * dt) });
        } else {
            set.even_gates.push(Gate { bond: b, u: expm(dt) });
        }
    }
    Ok(set)
}

/// Dense closed-system Hamiltonian of system + chain, for small instances.
pub fn dense_hamiltonian(p: &KerrParams, coeffs: &ChainCoefficients, dims: SystemDims) -> CMat {
    let n_sites = coeffs.n_sites() + 1;
    let local_dim = |k: usize| if k == 0 { dims.system } else { dims.chain };
    let total: usize = (0..n_sites).map(local_dim).product();
    let mut h = linalg::zeros(total, total);
    for (b, hb) in bond_hamiltonians(p, coeffs, dims).iter().enumerate() {
        let left: usize = (0..b).map(local_dim).product();
        let right: usize = (b + 2..n_sites).map(local_dim).product();
        let term = linalg::kron(&linalg::kron(&linalg::identity(left), hb), &linalg::identity(right));
        h = linalg::add(&h, &term);
    }
    h
}
