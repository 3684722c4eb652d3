//! Wigner quasiprobability of a truncated Fock density matrix.
//!
//! Coordinates are the complex amplitude β = x + iy with measure d²β = dx dy
//! and normalization ∫W d²β = 1, so the vacuum is `(2/π) e^{−2|β|²}` and a
//! coherent state |α⟩ is the same Gaussian centred at β = α.
//!
//! The Fock-basis kernel for |m⟩⟨n|, m ≥ n, is
//! `(2/π)(−1)ⁿ √(n!/m!) (2β*)^{m−n} e^{−2|β|²} L_n^{(m−n)}(4|β|²)`,
//! with the generalized Laguerre polynomials built by their three-term
//! recurrence.

use crate::lindblad::FockDensityMatrix;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WignerError {
    #[error("grid needs at least 32 points per axis, got {0}")]
    TooFewPoints(usize),
    #[error("half width {half_width} does not cover ⟨a†a⟩ = {n:.3}; need half_width² ≥ 4(n+1)")]
    WindowTooSmall { half_width: f64, n: f64 },
    #[error("grid too coarse: ∫W = {integral:.6}")]
    GridTooCoarse { integral: f64 },
}

pub const DEFAULT_POINTS: usize = 201;

#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    pub re_grid: Vec<f64>,
    pub im_grid: Vec<f64>,
    /// `values[j][i]` = W(re_grid[i] + i·im_grid[j]).
    pub values: Vec<Vec<f64>>,
    pub dx: f64,
}

impl WignerField {
    pub fn integral(&self) -> f64 {
        self.values.iter().flatten().sum::<f64>() * self.dx * self.dx
    }

    /// π ∫W² d²β, equal to Tr ρ².
    pub fn purity(&self) -> f64 {
        PI * self.values.iter().flatten().map(|w| w * w).sum::<f64>() * self.dx * self.dx
    }

    pub fn min(&self) -> f64 {
        self.values.iter().flatten().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Matrix dump with `#` header, first row the Re β axis and first column
    /// the Im β axis.
    pub fn to_csv(&self, extra_header: &[(String, String)]) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        let _ = writeln!(s, "# wigner convention: integral over d2beta = 1");
        for (k, v) in extra_header {
            let _ = writeln!(s, "# {k}: {v}");
        }
        s.push_str("im\\re");
        for x in &self.re_grid {
            let _ = write!(s, ",{x:.8e}");
        }
        s.push('\n');
        for (j, y) in self.im_grid.iter().enumerate() {
            let _ = write!(s, "{y:.8e}");
            for w in &self.values[j] {
                let _ = write!(s, ",{w:.10e}");
            }
            s.push('\n');
        }
        s
    }
}

/// Per-point evaluation of the Fock-basis sum.
pub fn wigner_at(rho: &FockDensityMatrix, beta: C64) -> f64 {
    let m = rho.matrix();
    let dim = rho.dim();
    let r2 = beta.norm_sqr();
    let x = 4.0 * r2;
    let gauss = (2.0 / PI) * (-2.0 * r2).exp();
    let two_bc = 2.0 * beta.conj();
    let mut total = 0.0;
    // k = m − n ≥ 0; factor (2β*)^k / √((n+1)…(n+k)) accumulated alongside the recurrence
    let mut pow = C64::new(1.0, 0.0);
    for k in 0..dim {
        if k > 0 {
            pow *= two_bc;
        }
        let kf = k as f64;
        let (mut l_prev, mut l_cur) = (0.0, 1.0);
        // √(n!/(n+k)!) for n = 0
        let mut ratio = (1..=k).map(|j| 1.0 / (j as f64).sqrt()).product::<f64>();
        let mut acc = C64::new(0.0, 0.0);
        for n in 0..dim - k {
            if n > 0 {
                let nf = (n - 1) as f64;
                let l_next = ((2.0 * nf + 1.0 + kf - x) * l_cur - (nf + kf) * l_prev) / (nf + 1.0);
                l_prev = l_cur;
                l_cur = l_next;
                ratio *= ((n as f64) / ((n + k) as f64)).sqrt();
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            acc += m[(n + k, n)] * (sign * ratio * l_cur);
        }
        let term = acc * pow;
        total += if k == 0 { term.re } else { 2.0 * term.re };
    }
    gauss * total
}

/// Wigner function on a square `n_points × n_points` grid over
/// `[−half_width, half_width]²`.
pub fn wigner_from_density(rho: &FockDensityMatrix, half_width: f64, n_points: usize) -> Result<WignerField, WignerError> {
    if n_points < 32 {
        return Err(WignerError::TooFewPoints(n_points));
    }
    let n = crate::lindblad::mean_n(rho);
    if half_width * half_width < 4.0 * (n + 1.0) {
        return Err(WignerError::WindowTooSmall { half_width, n });
    }
    let axis = crate::spectra::linspace(-half_width, half_width, n_points);
    let dx = axis[1] - axis[0];
    let values = axis.iter().map(|&y| axis.iter().map(|&x| wigner_at(rho, C64::new(x, y))).collect()).collect();
    let field = WignerField { re_grid: axis.clone(), im_grid: axis, values, dx };
    let integral = field.integral();
    if (integral - 1.0).abs() > 1e-2 {
        return Err(WignerError::GridTooCoarse { integral });
    }
    Ok(field)
}

/// Half width covering the state: `max(2√(n+1), √n + 3)`.
pub fn default_half_width(rho: &FockDensityMatrix) -> f64 {
    let n = crate::lindblad::mean_n(rho);
    (2.0 * (n + 1.0).sqrt()).max(n.sqrt() + 3.0)
}

/// Local maxima above `threshold_frac · max W`, as β, sorted by |β|.
pub fn lobe_locations(field: &WignerField, threshold_frac: f64) -> Vec<C64> {
    let thr = threshold_frac * field.max();
    let ny = field.im_grid.len();
    let nx = field.re_grid.len();
    let v = &field.values;
    let mut out = Vec::new();
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let w = v[j][i];
            if w <= thr {
                continue;
            }
            let is_max = (j - 1..=j + 1).all(|jj| {
                (i - 1..=i + 1).all(|ii| (jj == j && ii == i) || v[jj][ii] < w || (v[jj][ii] == w && (jj, ii) > (j, i)))
            });
            if is_max {
                out.push(C64::new(field.re_grid[i], field.im_grid[j]));
            }
        }
    }
    out.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
    out
}
