//! Fluctuation and squeezing spectra.
//!
//! Analytic spectra come from the equations of motion linearized around a
//! stationary amplitude α. Numerical estimators work on stochastic Langevin
//! trajectories (Welch periodogram of a quadrature) and on two-time
//! correlators obtained by quantum regression on an MPS.
//!
//! Absolute normalization differs between the routes, so every estimator
//! can be rescaled to unit peak with [`SpectrumResult::normalized`] and only
//! peak positions and shapes are compared across methods.

use crate::model::KerrParams;
use crate::semiclassical::TrajectoryRecord;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("response denominator vanishes at ω = {omega}")]
    PoleHit { omega: f64 },
    #[error("no splitting regime: requires χ″Δ < 0 (χ″ = {chi2}, Δ = {delta})")]
    NoSplittingRegime { chi2: f64, delta: f64 },
    #[error("stationary segment of {samples} samples is shorter than 4 windows of {window}")]
    TooShort { samples: usize, window: usize },
    #[error("need at least {required} trajectories, got {got}")]
    TooFewTrajectories { required: usize, got: usize },
    #[error("trajectories have mismatched length or time step")]
    InconsistentTrajectories,
    #[error("correlator record too short: τ_max·γ = {tau_gamma:.3} < 4")]
    CorrelatorTooShort { tau_gamma: f64 },
    #[error("input state is not stationary: {0}")]
    StationarityViolated(String),
}

/// Coefficients of the linearized fluctuation equations at frequency ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizedCoefficients {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl LinearizedCoefficients {
    pub fn new(p: &KerrParams, alpha: C64, omega: f64) -> Self {
        let n = alpha.norm_sqr();
        let i = C64::i();
        let a = -i * omega + i * p.delta + 0.5 * p.gamma + 4.0 * i * p.chi2 * n;
        let b = 2.0 * i * p.chi2 * alpha * alpha;
        let c = -i * omega - i * p.delta + 0.5 * p.gamma - 4.0 * i * p.chi2 * n;
        Self { a, b, c }
    }

    pub fn determinant(&self) -> C64 {
        self.a * self.c - self.b.norm_sqr()
    }
}

/// Direct and cross susceptibilities (χ_d, χ_x) at frequency ω.
pub fn susceptibilities(p: &KerrParams, alpha: C64, omega: f64) -> Result<(C64, C64), SpectraError> {
    let k = LinearizedCoefficients::new(p, alpha, omega);
    let det = k.determinant();
    let scale = k.a.norm() * k.c.norm() + k.b.norm_sqr();
    if det.norm() <= 1e-14 * scale || det.norm() == 0.0 {
        return Err(SpectraError::PoleHit { omega });
    }
    let sg = p.gamma.sqrt();
    Ok((sg * k.c / det, -sg * k.b / det))
}

/// Radicand `(Δ + 4χ″n)² − 4χ″²n²` of the pole formula.
pub fn pole_radicand(p: &KerrParams, n: f64) -> f64 {
    let s = p.delta + 4.0 * p.chi2 * n;
    s * s - 4.0 * p.chi2 * p.chi2 * n * n
}

/// Poles `ω± = ½[±iγ ∓ 2√R]` of the fluctuation spectrum.
///
/// With the principal square root, ω₊ has imaginary part γ/2 − Re√(−R) and
/// ω₋ its negative; both decay iff `ω₊.im > 0` and `ω₋.im < 0`.
pub fn poles(p: &KerrParams, alpha: C64) -> (C64, C64) {
    let root = C64::new(pole_radicand(p, alpha.norm_sqr()), 0.0).sqrt();
    let ig = C64::new(0.0, p.gamma);
    (0.5 * (ig - 2.0 * root), 0.5 * (-ig + 2.0 * root))
}

/// Photon-number limits (n_low, n_high) for normal-mode splitting: splitting
/// occurs for n ≤ n_low or n ≥ n_high.
pub fn splitting_bounds(p: &KerrParams) -> Result<(f64, f64), SpectraError> {
    if p.chi2 * p.delta >= 0.0 {
        return Err(SpectraError::NoSplittingRegime { chi2: p.chi2, delta: p.delta });
    }
    Ok((-p.delta / (6.0 * p.chi2), -p.delta / (2.0 * p.chi2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Linearized around a fixed point of the mean-field equation.
    AnalyticSemiclassical,
    /// Linearized around the exact quantum mean field.
    AnalyticQuantumAlpha,
    NumericLangevin,
    NumericTebd,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::AnalyticSemiclassical => "analytic_semiclassical",
            Provenance::AnalyticQuantumAlpha => "analytic_quantum_alpha",
            Provenance::NumericLangevin => "numeric_langevin",
            Provenance::NumericTebd => "numeric_tebd",
        }
    }
}

/// S^θ(ω) sampled on a (θ, ω) grid; `values[i_theta][i_omega]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub omegas: Vec<f64>,
    pub thetas: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub provenance: Provenance,
    pub alpha_used: C64,
}

impl SpectrumResult {
    pub fn max_value(&self) -> f64 {
        self.values.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Copy rescaled so the global maximum is 1.
    pub fn normalized(&self) -> Self {
        let m = self.max_value();
        let mut out = self.clone();
        if m > 0.0 && m.is_finite() {
            for row in out.values.iter_mut() {
                row.iter_mut().for_each(|v| *v /= m);
            }
        }
        out
    }

    /// θ-averaged spectrum.
    pub fn theta_mean(&self) -> Vec<f64> {
        let nt = self.thetas.len().max(1) as f64;
        (0..self.omegas.len()).map(|k| self.values.iter().map(|row| row[k]).sum::<f64>() / nt).collect()
    }

    /// Largest spread over θ at any ω, relative to the global peak.
    pub fn theta_variation(&self) -> f64 {
        let peak = self.max_value();
        (0..self.omegas.len())
            .map(|k| {
                let col = self.values.iter().map(|row| row[k]);
                let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                hi - lo
            })
            .fold(0.0, f64::max)
            / peak
    }

    /// CSV with `#` header lines, then `omega,theta,value` rows (θ-major).
    pub fn to_csv(&self, extra_header: &[(String, String)]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# provenance: {}", self.provenance.as_str());
        let _ = writeln!(s, "# alpha_used: {:.12e},{:.12e}", self.alpha_used.re, self.alpha_used.im);
        for (k, v) in extra_header {
            let _ = writeln!(s, "# {k}: {v}");
        }
        s.push_str("omega,theta,value\n");
        for (it, th) in self.thetas.iter().enumerate() {
            for (iw, w) in self.omegas.iter().enumerate() {
                let _ = writeln!(s, "{w:.10e},{th:.10e},{:.12e}", self.values[it][iw]);
            }
        }
        s
    }
}

/// Default frequency grid: 512 points on [−3|Δ|, 3|Δ|].
pub fn default_omega_grid(p: &KerrParams) -> Vec<f64> {
    linspace(-3.0 * p.delta.abs(), 3.0 * p.delta.abs(), 512)
}

/// Default phase grid: 64 points on [0, π).
pub fn default_theta_grid() -> Vec<f64> {
    (0..64).map(|k| PI * k as f64 / 64.0).collect()
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Analytic squeezing spectrum of the linearized fluctuations around `alpha`.
pub fn analytic_spectrum(
    p: &KerrParams,
    alpha: C64,
    omega_grid: &[f64],
    theta_grid: &[f64],
    provenance: Provenance,
) -> Result<SpectrumResult, SpectraError> {
    let mut parts = Vec::with_capacity(omega_grid.len());
    for &w in omega_grid {
        let (dp, xp) = susceptibilities(p, alpha, w)?;
        let (dm, xm) = susceptibilities(p, alpha, -w)?;
        let base = dp.norm_sqr() + dm.norm_sqr() + xp.norm_sqr() + xm.norm_sqr();
        let mix = dp * xm + dm * xp;
        parts.push((base, mix.norm(), mix.arg()));
    }
    let values = theta_grid
        .iter()
        .map(|&th| parts.iter().map(|&(base, m, phi)| 0.25 * (base + 2.0 * (2.0 * th - phi).cos() * m)).collect())
        .collect();
    Ok(SpectrumResult { omegas: omega_grid.to_vec(), thetas: theta_grid.to_vec(), values, provenance, alpha_used: alpha })
}

fn hann(n: usize) -> Vec<f64> {
    (0..n).map(|k| (PI * k as f64 / n as f64).sin().powi(2)).collect()
}

/// Welch settings for the Langevin estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchWindow {
    /// Segment length in samples; `None` picks min(stationary/4, 4096).
    pub segment: Option<usize>,
    /// Leading fraction of each trajectory discarded as transient.
    pub discard_fraction: f64,
}

impl Default for WelchWindow {
    fn default() -> Self {
        Self { segment: None, discard_fraction: 0.25 }
    }
}

pub const MIN_LANGEVIN_TRAJECTORIES: usize = 8;

/// Welch-averaged quadrature spectrum of an ensemble of Langevin
/// trajectories, folded onto ω ≥ 0.
///
/// For each trajectory the quadrature `X^θ = (a* e^{iθ} + a e^{−iθ})/√2` of
/// the stationary segment is taken relative to its own mean, cut into
/// Hann-windowed segments with 50% overlap and averaged. Reported values
/// are one-sided, `P(ω) + P(−ω)` for ω > 0.
pub fn numeric_spectrum_langevin(
    trajectories: &[TrajectoryRecord],
    theta_grid: &[f64],
    window: WelchWindow,
) -> Result<SpectrumResult, SpectraError> {
    if trajectories.len() < MIN_LANGEVIN_TRAJECTORIES {
        return Err(SpectraError::TooFewTrajectories { required: MIN_LANGEVIN_TRAJECTORIES, got: trajectories.len() });
    }
    let len = trajectories[0].len();
    let dt = trajectories[0].dt;
    if trajectories.iter().any(|t| t.len() != len || (t.dt - dt).abs() > 1e-12 * dt) {
        return Err(SpectraError::InconsistentTrajectories);
    }
    let start = (window.discard_fraction * len as f64).ceil() as usize;
    let samples = len.saturating_sub(start);
    let seg = window.segment.unwrap_or_else(|| (samples / 4).min(4096));
    if seg < 2 || samples < 4 * seg {
        return Err(SpectraError::TooShort { samples, window: seg });
    }
    let hop = seg / 2;
    let w = hann(seg);
    let wsum: f64 = w.iter().map(|x| x * x).sum();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(seg);
    let n_pos = seg / 2 + 1;
    let omegas: Vec<f64> = (0..n_pos).map(|k| 2.0 * PI * k as f64 / (seg as f64 * dt)).collect();

    let mut values = Vec::with_capacity(theta_grid.len());
    let mut mean_alpha = C64::new(0.0, 0.0);
    for tr in trajectories {
        mean_alpha += tr.values[start..].iter().sum::<C64>() / samples as f64;
    }
    mean_alpha /= trajectories.len() as f64;

    for &th in theta_grid {
        let rot = C64::from_polar(1.0, -th);
        let mut acc = vec![0.0; n_pos];
        let mut count = 0usize;
        for tr in trajectories {
            let x: Vec<f64> = tr.values[start..].iter().map(|a| std::f64::consts::SQRT_2 * (a * rot).re).collect();
            let mean = x.iter().sum::<f64>() / x.len() as f64;
            let mut off = 0;
            while off + seg <= x.len() {
                let mut buf: Vec<C64> = (0..seg).map(|k| C64::new((x[off + k] - mean) * w[k], 0.0)).collect();
                fft.process(&mut buf);
                for k in 0..n_pos {
                    let fold = if k == 0 || (seg % 2 == 0 && k == seg / 2) { 1.0 } else { 2.0 };
                    acc[k] += fold * buf[k].norm_sqr();
                }
                count += 1;
                off += hop;
            }
        }
        let norm = dt / (wsum * count as f64);
        values.push(acc.into_iter().map(|v| v * norm).collect());
    }
    Ok(SpectrumResult {
        omegas,
        thetas: theta_grid.to_vec(),
        values,
        provenance: Provenance::NumericLangevin,
        alpha_used: mean_alpha,
    })
}

/// Connected two-time correlators of a stationary state on a uniform τ grid
/// starting at τ = 0: `⟨δA(τ) δB(0)⟩` for A, B ∈ {a, a†}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryCorrelators {
    pub tau: Vec<f64>,
    pub gamma: f64,
    /// ⟨δa(τ) δa⟩
    pub a_a: Vec<C64>,
    /// ⟨δa†(τ) δa⟩
    pub ad_a: Vec<C64>,
    /// ⟨δa(τ) δa†⟩
    pub a_ad: Vec<C64>,
    /// ⟨δa†(τ) δa†⟩
    pub ad_ad: Vec<C64>,
    pub mean_a: C64,
}

impl StationaryCorrelators {
    /// Symmetrized quadrature correlator Re⟨δX^θ(τ) δX^θ(0)⟩.
    pub fn quadrature(&self, theta: f64) -> Vec<f64> {
        let e2 = C64::from_polar(1.0, -2.0 * theta);
        (0..self.tau.len())
            .map(|k| {
                let v = e2 * self.a_a[k] + self.a_ad[k] + self.ad_a[k] + e2.conj() * self.ad_ad[k];
                0.5 * v.re
            })
            .collect()
    }
}

/// Spectrum from quantum-regression correlators: Hann-tapered cosine
/// transform of the symmetrized quadrature correlator,
/// `S^θ(ω) = 2 Re ∫₀^{τ_max} e^{iωτ} w(τ) C^θ(τ) dτ`.
pub fn numeric_spectrum_tebd(
    correlators: &StationaryCorrelators,
    omega_grid: &[f64],
    theta_grid: &[f64],
) -> Result<SpectrumResult, SpectraError> {
    let n = correlators.tau.len();
    if n < 2 {
        return Err(SpectraError::CorrelatorTooShort { tau_gamma: 0.0 });
    }
    let tau_max = correlators.tau[n - 1] - correlators.tau[0];
    let tau_gamma = tau_max * correlators.gamma;
    if tau_gamma < 4.0 {
        return Err(SpectraError::CorrelatorTooShort { tau_gamma });
    }
    let dtau = tau_max / (n - 1) as f64;
    // half-Hann taper, 1 at τ = 0 and 0 at τ_max
    let taper: Vec<f64> = (0..n).map(|k| (0.5 * PI * k as f64 / (n - 1) as f64).cos().powi(2)).collect();
    let values = theta_grid
        .iter()
        .map(|&th| {
            let c = correlators.quadrature(th);
            omega_grid
                .iter()
                .map(|&w| {
                    let mut acc = 0.0;
                    for k in 0..n {
                        let weight = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                        acc += weight * taper[k] * c[k] * (w * correlators.tau[k]).cos();
                    }
                    2.0 * dtau * acc
                })
                .collect()
        })
        .collect();
    Ok(SpectrumResult {
        omegas: omega_grid.to_vec(),
        thetas: theta_grid.to_vec(),
        values,
        provenance: Provenance::NumericTebd,
        alpha_used: correlators.mean_a,
    })
}

/// Indices of strict interior local maxima exceeding `threshold`.
pub fn local_maxima(values: &[f64], threshold: f64) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&k| values[k] > values[k - 1] && values[k] >= values[k + 1] && values[k] > threshold)
        .collect()
}

/// Peak position refined by a least-squares parabola through the samples
/// around the maximum whose value exceeds `level` times the peak.
pub fn refined_peak(omegas: &[f64], values: &[f64], level: f64) -> f64 {
    let (imax, &vmax) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("non-empty spectrum");
    let mut lo = imax;
    while lo > 0 && values[lo - 1] > level * vmax {
        lo -= 1;
    }
    let mut hi = imax;
    while hi + 1 < values.len() && values[hi + 1] > level * vmax {
        hi += 1;
    }
    if hi - lo < 2 {
        return omegas[imax];
    }
    // normal equations for v ≈ c0 + c1 x + c2 x², x centred on the maximum
    let x0 = omegas[imax];
    let mut s = [0.0f64; 5];
    let mut t = [0.0f64; 3];
    for k in lo..=hi {
        let x = omegas[k] - x0;
        let mut xp = 1.0;
        for j in 0..5 {
            s[j] += xp;
            if j < 3 {
                t[j] += xp * values[k];
            }
            xp *= x;
        }
    }
    let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-300 {
        return x0;
    }
    let mut m1 = m;
    let mut m2 = m;
    for r in 0..3 {
        m1[r][1] = t[r];
        m2[r][2] = t[r];
    }
    let (c1, c2) = (det(m1) / d, det(m2) / d);
    if c2 >= 0.0 {
        return x0;
    }
    let shift = -c1 / (2.0 * c2);
    x0 + shift.clamp(omegas[lo] - x0, omegas[hi] - x0)
}
