//! Matrix product state of system site plus chain.
//!
//! Tensors are kept in right-canonical Vidal form: site `k` stores
//! `B^{[k]} = Γ^{[k]} λ^{[k]}` with index order (left bond, physical, right bond),
//! flattened row-major, and `lambdas[k]` holds the Schmidt values of the bond
//! between sites `k` and `k + 1`. The left boundary Schmidt vector is `[1]`.
//! With this layout the same buffer is both the `(χ_l·d) × χ_r` and the
//! `χ_l × (d·χ_r)` matrix, and gate updates never divide by Schmidt values.

use super::TebdError;
use crate::linalg::{self, CMat};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Rank-3 tensor `T[l, s, r]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteTensor {
    pub dl: usize,
    pub d: usize,
    pub dr: usize,
    pub data: Vec<C64>,
}

impl SiteTensor {
    pub fn zeros(dl: usize, d: usize, dr: usize) -> Self {
        Self { dl, d, dr, data: vec![ZERO; dl * d * dr] }
    }

    #[inline]
    pub fn idx(&self, l: usize, s: usize, r: usize) -> usize {
        (l * self.d + s) * self.dr + r
    }

    #[inline]
    pub fn get(&self, l: usize, s: usize, r: usize) -> C64 {
        self.data[self.idx(l, s, r)]
    }

    /// `(χ_l·d) × χ_r` matrix view, copied.
    pub fn as_left_matrix(&self) -> CMat {
        let cols = self.dr;
        linalg::from_fn(self.dl * self.d, cols, |i, j| self.data[i * cols + j])
    }

    /// `χ_l × (d·χ_r)` matrix view, copied.
    pub fn as_right_matrix(&self) -> CMat {
        let cols = self.d * self.dr;
        linalg::from_fn(self.dl, cols, |i, j| self.data[i * cols + j])
    }

    pub fn from_left_matrix(m: &CMat, dl: usize, d: usize) -> Self {
        let dr = m.ncols();
        let mut data = Vec::with_capacity(dl * d * dr);
        for i in 0..dl * d {
            for j in 0..dr {
                data.push(m[(i, j)]);
            }
        }
        Self { dl, d, dr, data }
    }

    pub fn from_right_matrix(m: &CMat, d: usize, dr: usize) -> Self {
        let dl = m.nrows();
        let mut data = Vec::with_capacity(dl * d * dr);
        for i in 0..dl {
            for j in 0..d * dr {
                data.push(m[(i, j)]);
            }
        }
        Self { dl, d, dr, data }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixProductState {
    pub local_dims: Vec<usize>,
    pub tensors: Vec<SiteTensor>,
    pub lambdas: Vec<Vec<f64>>,
    pub chi_max: usize,
    /// Schmidt values with σ²/Σσ² below this are dropped.
    #[serde(default = "default_floor")]
    pub weight_floor: f64,
}

fn default_floor() -> f64 {
    super::evolve::WEIGHT_FLOOR
}

impl MatrixProductState {
    /// Product state from normalized local vectors.
    pub fn product(locals: &[Vec<C64>], chi_max: usize) -> Self {
        let tensors = locals
            .iter()
            .map(|v| SiteTensor { dl: 1, d: v.len(), dr: 1, data: v.clone() })
            .collect();
        Self {
            local_dims: locals.iter().map(|v| v.len()).collect(),
            tensors,
            lambdas: vec![vec![1.0]; locals.len().saturating_sub(1)],
            chi_max,
            weight_floor: super::evolve::WEIGHT_FLOOR,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.tensors.len()
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.lambdas.iter().map(|l| l.len()).collect()
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Schmidt values entering site `k` from the left.
    pub fn left_lambda(&self, k: usize) -> Vec<f64> {
        if k == 0 {
            vec![1.0]
        } else {
            self.lambdas[k - 1].clone()
        }
    }

    /// Γ tensor of site `k`, recovered as `B^{[k]} / λ^{[k]}`; columns with
    /// vanishing Schmidt value are set to zero.
    pub fn gamma(&self, k: usize) -> SiteTensor {
        let b = &self.tensors[k];
        let lam = if k + 1 < self.n_sites() { self.lambdas[k].clone() } else { vec![1.0] };
        let mut g = b.clone();
        for l in 0..b.dl {
            for s in 0..b.d {
                for r in 0..b.dr {
                    let i = b.idx(l, s, r);
                    g.data[i] = if lam[r] > 1e-300 { b.data[i] / lam[r] } else { ZERO };
                }
            }
        }
        g
    }

    /// Reduced density matrix of site `k`, `ρ_{ss'} = Σ λ_l² B[l,s,r] B*[l,s',r]`.
    pub fn site_density(&self, k: usize) -> CMat {
        let b = &self.tensors[k];
        let lam = self.left_lambda(k);
        let mut rho = linalg::zeros(b.d, b.d);
        for l in 0..b.dl {
            let w = lam[l] * lam[l];
            for s in 0..b.d {
                for t in 0..b.d {
                    let mut acc = ZERO;
                    for r in 0..b.dr {
                        acc += b.get(l, s, r) * b.get(l, t, r).conj();
                    }
                    rho[(s, t)] += w * acc;
                }
            }
        }
        rho
    }

    /// `⟨Ψ|Ψ⟩` by full contraction.
    pub fn norm_squared(&self) -> f64 {
        self.overlap_with_site0(self, None).re
    }

    /// `⟨other| A_0 |self⟩` with `A_0` acting on site 0 (identity if `None`).
    pub fn overlap_with_site0(&self, other: &Self, op: Option<&CMat>) -> C64 {
        assert_eq!(self.local_dims, other.local_dims);
        let n = self.n_sites();
        // right environment E[r, r'] for self (r) and other (r')
        let mut env = linalg::identity(1);
        for k in (0..n).rev() {
            let a = &self.tensors[k];
            let b = &other.tensors[k];
            let mut next = linalg::zeros(a.dl, b.dl);
            // tmp[l, s, r'] = Σ_r A[l,s,r] E[r,r']
            let am = linalg::from_fn(a.dl * a.d, a.dr, |i, j| a.data[i * a.dr + j]);
            let tmp = linalg::matmul(&am, &env);
            let opm = if k == 0 { op } else { None };
            for l in 0..a.dl {
                for lp in 0..b.dl {
                    let mut acc = ZERO;
                    for s in 0..a.d {
                        for rp in 0..b.dr {
                            let t = match opm {
                                // (A ψ)_s = Σ_u A[s,u] ψ_u
                                Some(o) => (0..a.d).map(|u| o[(s, u)] * tmp[(l * a.d + u, rp)]).sum::<C64>(),
                                None => tmp[(l * a.d + s, rp)],
                            };
                            acc += t * b.get(lp, s, rp).conj();
                        }
                    }
                    next[(l, lp)] = acc;
                }
            }
            env = next;
        }
        env[(0, 0)]
    }

    /// Apply a single-site operator to site 0 and renormalize; returns the
    /// norm `‖A|Ψ⟩‖` that was divided out. Schmidt values are refreshed.
    pub fn apply_site0(&mut self, op: &CMat) -> Result<f64, TebdError> {
        let b = &self.tensors[0];
        let mut out = SiteTensor::zeros(b.dl, b.d, b.dr);
        for s in 0..b.d {
            for u in 0..b.d {
                let o = op[(s, u)];
                if o == ZERO {
                    continue;
                }
                for r in 0..b.dr {
                    let i = out.idx(0, s, r);
                    out.data[i] += o * b.get(0, u, r);
                }
            }
        }
        let norm = out.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            out.data.iter_mut().for_each(|x| *x /= norm);
        }
        self.tensors[0] = out;
        if norm > 0.0 {
            self.canonicalize()?;
        }
        Ok(norm)
    }

    /// Recompute all Schmidt values by a left-to-right SVD sweep, assuming
    /// every tensor right of site 0 is right-isometric and site 0 is
    /// normalized. No truncation is applied.
    pub fn canonicalize(&mut self) -> Result<(), TebdError> {
        let n = self.n_sites();
        let mut lam_left = vec![1.0];
        for k in 0..n - 1 {
            let b = &self.tensors[k];
            let m = linalg::from_fn(b.dl * b.d, b.dr, |i, j| lam_left[i / b.d] * b.data[i * b.dr + j]);
            let svd = linalg::thin_svd(&m).map_err(|_| TebdError::SvdFailure { bond: k })?;
            let keep = svd.s.iter().take_while(|&&s| s > 1e-300).count().max(1);
            let v = linalg::from_fn(b.dr, keep, |i, j| svd.v[(i, j)]);
            // B_k ← B_k V, B_{k+1} ← V† B_{k+1}
            let newb = linalg::matmul(&b.as_left_matrix(), &v);
            let (dl, d) = (b.dl, b.d);
            self.tensors[k] = SiteTensor::from_left_matrix(&newb, dl, d);
            let nb = &self.tensors[k + 1];
            let nextm = linalg::matmul(&linalg::adjoint(&v), &nb.as_right_matrix());
            let (d2, dr2) = (nb.d, nb.dr);
            self.tensors[k + 1] = SiteTensor::from_right_matrix(&nextm, d2, dr2);
            self.lambdas[k] = svd.s[..keep].to_vec();
            lam_left = self.lambdas[k].clone();
        }
        Ok(())
    }

    /// Re-establish exact canonical form after truncated updates: a
    /// right-to-left SVD sweep makes every tensor right-isometric, site 0 is
    /// renormalized, then [`canonicalize`](Self::canonicalize) refreshes the
    /// Schmidt values. Returns `⟨Ψ|Ψ⟩` before renormalization.
    pub fn restore_canonical(&mut self) -> Result<f64, TebdError> {
        let n = self.n_sites();
        for k in (1..n).rev() {
            let b = &self.tensors[k];
            let (d, dr) = (b.d, b.dr);
            let svd = linalg::thin_svd(&b.as_right_matrix()).map_err(|_| TebdError::SvdFailure { bond: k - 1 })?;
            let keep = svd.s.iter().take_while(|&&s| s > 1e-300).count().max(1);
            let rows = svd.u.nrows();
            // B_k ← V†, B_{k−1} ← B_{k−1} U S
            let vh = linalg::from_fn(keep, d * dr, |i, j| svd.v[(j, i)].conj());
            let us = linalg::from_fn(rows, keep, |i, j| svd.u[(i, j)] * svd.s[j]);
            self.tensors[k] = SiteTensor::from_right_matrix(&vh, d, dr);
            let prev = &self.tensors[k - 1];
            let (dl, dp) = (prev.dl, prev.d);
            let m = linalg::matmul(&prev.as_left_matrix(), &us);
            self.tensors[k - 1] = SiteTensor::from_left_matrix(&m, dl, dp);
        }
        let norm2: f64 = self.tensors[0].data.iter().map(|x| x.norm_sqr()).sum();
        if !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(TebdError::SvdFailure { bond: 0 });
        }
        let inv = 1.0 / norm2.sqrt();
        self.tensors[0].data.iter_mut().for_each(|x| *x *= inv);
        self.canonicalize()?;
        Ok(norm2)
    }

    /// Largest deviation from the canonical conditions: right isometry
    /// `Σ B B† = 1` and left condition `Σ λ_l² B† B = diag(λ_r²)`.
    pub fn canonical_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.n_sites() {
            let b = &self.tensors[k];
            let rm = b.as_right_matrix();
            let g = linalg::matmul(&rm, &linalg::adjoint(&rm));
            worst = worst.max(linalg::max_abs_diff(&g, &linalg::identity(b.dl)));
            let lam = self.left_lambda(k);
            let lw = linalg::from_fn(b.dl * b.d, b.dr, |i, j| lam[i / b.d] * b.data[i * b.dr + j]);
            let h = linalg::matmul(&linalg::adjoint(&lw), &lw);
            let lr = if k + 1 < self.n_sites() { self.lambdas[k].clone() } else { vec![1.0] };
            let target = linalg::from_fn(b.dr, b.dr, |i, j| if i == j { C64::new(lr[i] * lr[i], 0.0) } else { ZERO });
            worst = worst.max(linalg::max_abs_diff(&h, &target));
        }
        worst
    }

    /// Dense state vector, for small test instances only.
    pub fn to_dense(&self) -> Vec<C64> {
        let mut acc = vec![C64::new(1.0, 0.0)];
        let mut dl = 1;
        for t in &self.tensors {
            let rows = acc.len() / dl;
            let mut next = vec![ZERO; rows * t.d * t.dr];
            for i in 0..rows {
                for l in 0..dl {
                    let a = acc[i * dl + l];
                    if a == ZERO {
                        continue;
                    }
                    for s in 0..t.d {
                        for r in 0..t.dr {
                            next[(i * t.d + s) * t.dr + r] += a * t.get(l, s, r);
                        }
                    }
                }
            }
            acc = next;
            dl = t.dr;
        }
        acc
    }
}
