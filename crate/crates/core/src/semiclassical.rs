//! Mean-field steady states, bistability analysis and Euler propagation of
//! the semiclassical equation of motion.

use crate::model::{eom_rhs, InitialState, KerrParams};
use crate::spectra;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemiclassicalError {
    #[error("no bistability: Δ² = {delta_sq} must exceed 3γ²/4 = {threshold} with χ″Δ < 0")]
    NoBistability { delta_sq: f64, threshold: f64 },
    #[error("trajectory diverged (|a| = {magnitude:.3e}) at step {step}; reduce dt")]
    Diverged { step: usize, magnitude: f64 },
    #[error("invalid time grid: dt = {dt}, t_end = {t_end}")]
    InvalidTimeGrid { dt: f64, t_end: f64 },
    #[error("at least one trajectory is required")]
    NoTrajectories,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Lower,
    Metastable,
    Upper,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Lower => "lower",
            Branch::Metastable => "metastable",
            Branch::Upper => "upper",
        }
    }
}

/// One fixed point of the mean-field equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    /// Photon number |α|².
    pub n: f64,
    pub alpha: C64,
    pub branch: Branch,
    pub stable: bool,
}

/// Uniformly sampled time series of the field amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub values: Vec<C64>,
    pub dt: f64,
    pub seed: Option<u64>,
}

impl TrajectoryRecord {
    pub fn last(&self) -> C64 {
        *self.values.last().expect("trajectory records at least the initial point")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Signed area swept around `center` by the phase-space path
    /// (Re a, Im a); counterclockwise is positive.
    pub fn swept_area(&self, center: C64) -> f64 {
        self.values
            .windows(2)
            .map(|w| {
                let (p, q) = (w[0] - center, w[1] - center);
                0.5 * (p.re * q.im - p.im * q.re)
            })
            .sum()
    }
}

/// Left-hand side of the steady-state condition, |E|² as a function of n.
pub fn drive_squared_at(n: f64, p: &KerrParams) -> f64 {
    let shift = p.delta + 2.0 * p.chi2 * n;
    n * (shift * shift + 0.25 * p.gamma * p.gamma)
}

/// Field amplitude on the fixed point with photon number `n`.
pub fn alpha_for(n: f64, p: &KerrParams) -> C64 {
    p.drive / C64::new(0.5 * p.gamma, p.delta + 2.0 * p.chi2 * n)
}

/// Real roots of the monic cubic `x³ + b x² + c x + d`.
fn real_cubic_roots(b: f64, c: f64, d: f64) -> Vec<f64> {
    // depressed form t³ + pt + q with x = t − b/3
    let shift = b / 3.0;
    let pp = c - b * b / 3.0;
    let qq = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (qq / 2.0).powi(2) + (pp / 3.0).powi(3);
    let scale = 1.0f64.max(pp.abs().sqrt()).max(qq.abs().cbrt());
    let mut roots = Vec::with_capacity(3);
    if disc > 1e-14 * scale.powi(6) {
        let sq = disc.sqrt();
        let t = (-qq / 2.0 + sq).cbrt() + (-qq / 2.0 - sq).cbrt();
        roots.push(t - shift);
    } else if pp.abs() < 1e-300 {
        roots.push(-shift);
    } else {
        // three real roots (possibly coincident): trigonometric form
        let m = 2.0 * (-pp / 3.0).max(0.0).sqrt();
        let arg = if m > 0.0 { (3.0 * qq / (pp * m)).clamp(-1.0, 1.0) } else { 0.0 };
        let theta = arg.acos() / 3.0;
        for k in 0..3 {
            roots.push(m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift);
        }
    }
    roots
}

/// All fixed points, ascending in photon number.
///
/// Solves `n((Δ + 2χ″n)² + γ²/4) = |E|²` in closed form and polishes every
/// root with Newton steps; roots within `1e-9·max(1, n)` of each other are
/// merged (turning points).
pub fn steady_states(p: &KerrParams) -> Vec<BranchPoint> {
    let e2 = p.drive.norm_sqr();
    let lin = p.delta * p.delta + 0.25 * p.gamma * p.gamma;
    let mut ns: Vec<f64> = if e2 == 0.0 {
        vec![0.0]
    } else if p.chi2 == 0.0 {
        vec![e2 / lin]
    } else {
        let a3 = 4.0 * p.chi2 * p.chi2;
        real_cubic_roots(4.0 * p.chi2 * p.delta / a3, lin / a3, -e2 / a3)
    };
    for n in ns.iter_mut() {
        *n = newton_polish(*n, p);
    }
    ns.retain(|n| *n >= -1e-12);
    ns.iter_mut().for_each(|n| *n = n.max(0.0));
    ns.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ns.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * a.abs().max(1.0));

    let turning = turning_points(p).ok();
    let three = ns.len() == 3;
    ns.iter()
        .enumerate()
        .map(|(k, &n)| {
            let alpha = alpha_for(n, p);
            let branch = if three {
                [Branch::Lower, Branch::Metastable, Branch::Upper][k]
            } else {
                match turning {
                    Some((_, n_u)) if n >= n_u => Branch::Upper,
                    _ => Branch::Lower,
                }
            };
            BranchPoint { n, alpha, branch, stable: is_stable(p, alpha) }
        })
        .collect()
}

fn newton_polish(mut n: f64, p: &KerrParams) -> f64 {
    let e2 = p.drive.norm_sqr();
    for _ in 0..50 {
        let shift = p.delta + 2.0 * p.chi2 * n;
        let f = n * (shift * shift + 0.25 * p.gamma * p.gamma) - e2;
        let df = shift * shift + 0.25 * p.gamma * p.gamma + 4.0 * p.chi2 * n * shift;
        if df.abs() < 1e-300 {
            break;
        }
        let step = f / df;
        n -= step;
        if step.abs() <= 1e-16 * n.abs().max(1e-300) {
            break;
        }
    }
    n
}

/// Linear stability of a fixed point from the poles of the fluctuation
/// response: stable iff both poles decay.
pub fn is_stable(p: &KerrParams, alpha: C64) -> bool {
    let (plus, minus) = spectra::poles(p, alpha);
    plus.im > 0.0 && minus.im < 0.0
}

/// Photon numbers (n_l, n_u) bounding the bistable window.
pub fn turning_points(p: &KerrParams) -> Result<(f64, f64), SemiclassicalError> {
    let delta_sq = p.delta * p.delta;
    let threshold = 0.75 * p.gamma * p.gamma;
    if delta_sq <= threshold || p.chi2 * p.delta >= 0.0 {
        return Err(SemiclassicalError::NoBistability { delta_sq, threshold });
    }
    let root = (delta_sq - threshold).sqrt();
    let n_l = (-2.0 * p.delta - root) / (6.0 * p.chi2);
    let n_u = (-2.0 * p.delta + root) / (6.0 * p.chi2);
    Ok((n_l, n_u))
}

/// Drive amplitudes (E_down, E_up) between which three fixed points exist:
/// `E_down = |E|(n_u)`, `E_up = |E|(n_l)`.
pub fn bistable_drive_window(p: &KerrParams) -> Result<(f64, f64), SemiclassicalError> {
    let (n_l, n_u) = turning_points(p)?;
    Ok((drive_squared_at(n_u, p).sqrt(), drive_squared_at(n_l, p).sqrt()))
}

pub const DEFAULT_DIVERGENCE_GUARD: f64 = 1e6;

fn time_grid(dt: f64, t_end: f64) -> Result<usize, SemiclassicalError> {
    if !(dt > 0.0) || !(t_end >= dt) || !t_end.is_finite() {
        return Err(SemiclassicalError::InvalidTimeGrid { dt, t_end });
    }
    Ok((t_end / dt).round() as usize)
}

/// Forward-Euler propagation `a ← a + dt·f(a)`, recording t = 0 and every step.
pub fn evolve_euler(p: &KerrParams, a0: InitialState, dt: f64, t_end: f64) -> Result<TrajectoryRecord, SemiclassicalError> {
    evolve_euler_guarded(p, a0, dt, t_end, DEFAULT_DIVERGENCE_GUARD)
}

pub fn evolve_euler_guarded(
    p: &KerrParams,
    a0: InitialState,
    dt: f64,
    t_end: f64,
    guard: f64,
) -> Result<TrajectoryRecord, SemiclassicalError> {
    em_path(p, a0.alpha(), dt, time_grid(dt, t_end)?, guard, None)
}

/// Euler–Maruyama ensemble with vacuum input noise.
///
/// Each step adds `sqrt(γ dt / 2)·(ξ₁ + iξ₂)/√2`, which makes the
/// stationary symmetrized occupation of the linear, undriven cavity 1/2.
/// Trajectory `k` draws from the ChaCha8 stream `k` of `seed`, so runs are
/// reproducible and independent of evaluation order.
pub fn evolve_euler_maruyama(
    p: &KerrParams,
    a0: InitialState,
    dt: f64,
    t_end: f64,
    seed: u64,
    n_traj: usize,
) -> Result<Vec<TrajectoryRecord>, SemiclassicalError> {
    if n_traj == 0 {
        return Err(SemiclassicalError::NoTrajectories);
    }
    let steps = time_grid(dt, t_end)?;
    (0..n_traj)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            em_path(p, a0.alpha(), dt, steps, DEFAULT_DIVERGENCE_GUARD, Some((&mut rng, seed)))
        })
        .collect()
}

fn em_path(
    p: &KerrParams,
    a0: C64,
    dt: f64,
    steps: usize,
    guard: f64,
    mut noise: Option<(&mut ChaCha8Rng, u64)>,
) -> Result<TrajectoryRecord, SemiclassicalError> {
    let amp = (0.25 * p.gamma * dt).sqrt();
    let mut a = a0;
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    times.push(0.0);
    values.push(a);
    for step in 1..=steps {
        a += dt * eom_rhs(a, p);
        if let Some((rng, _)) = noise.as_mut() {
            let x: f64 = StandardNormal.sample(*rng);
            let y: f64 = StandardNormal.sample(*rng);
            a += amp * C64::new(x, y);
        }
        let mag = a.norm();
        if !(mag <= guard) {
            return Err(SemiclassicalError::Diverged { step, magnitude: mag });
        }
        times.push(step as f64 * dt);
        values.push(a);
    }
    Ok(TrajectoryRecord { times, values, dt, seed: noise.map(|(_, s)| s) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: bisection on sign changes of the cubic over a
    /// fine grid.
    fn cubic_roots_by_bisection(p: &KerrParams) -> Vec<f64> {
        let e2 = p.drive.norm_sqr();
        let f = |n: f64| drive_squared_at(n, p) - e2;
        let hi = 2.0 * e2.max(1.0) / (0.25 * p.gamma * p.gamma) + 10.0;
        let m = 200_000;
        let mut out = Vec::new();
        for k in 0..m {
            let (mut a, mut b) = (hi * k as f64 / m as f64, hi * (k + 1) as f64 / m as f64);
            if f(a) == 0.0 {
                out.push(a);
                continue;
            }
            if f(a) * f(b) < 0.0 {
                for _ in 0..200 {
                    let c = 0.5 * (a + b);
                    if f(a) * f(c) <= 0.0 {
                        b = c
                    } else {
                        a = c
                    }
                }
                out.push(0.5 * (a + b));
            }
        }
        out
    }

    #[test]
    fn zero_drive_single_vacuum_root() {
        let r = steady_states(&KerrParams::paper(0.0));
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].n, 0.0);
        assert_eq!(r[0].alpha, C64::new(0.0, 0.0));
        assert!(r[0].stable);
    }

    #[test]
    fn linear_cavity_root() {
        let p = KerrParams::new(0.0, 0.0, 2.0, C64::new(1.0, 0.0)).unwrap();
        let r = steady_states(&p);
        assert_eq!(r.len(), 1);
        assert!((r[0].n - 1.0).abs() < 1e-14);
        assert!((r[0].alpha - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn three_roots_at_e8_match_bisection() {
        let p = KerrParams::paper(8.0);
        let r = steady_states(&p);
        let oracle = cubic_roots_by_bisection(&p);
        assert_eq!(r.len(), 3);
        assert_eq!(oracle.len(), 3);
        for (bp, n) in r.iter().zip(&oracle) {
            assert!((bp.n - n).abs() < 1e-9, "{} vs {}", bp.n, n);
            assert!(eom_rhs(bp.alpha, &p).norm() < 1e-10);
            assert!((bp.alpha.norm_sqr() - bp.n).abs() < 1e-10 * bp.n);
        }
        assert_eq!(r.iter().map(|b| b.branch).collect::<Vec<_>>(), vec![Branch::Lower, Branch::Metastable, Branch::Upper]);
        assert!(r[0].stable && !r[1].stable && r[2].stable);
    }

    #[test]
    fn turning_point_values() {
        let (nl, nu) = turning_points(&KerrParams::paper(1.0)).unwrap();
        let root = (144.0f64 - 0.75 * 6.28 * 6.28).sqrt();
        assert!((nl - (24.0 - root) / 9.0).abs() < 1e-12);
        assert!((nu - (24.0 + root) / 9.0).abs() < 1e-12);
        assert!((nl - 1.478135).abs() < 1e-6, "{nl}");
        assert!((nu - 3.855198).abs() < 1e-6, "{nu}");
        let p = KerrParams { gamma: 1e-12, ..KerrParams::paper(1.0) };
        let (nl, nu) = turning_points(&p).unwrap();
        assert!((nl - 4.0 / 3.0).abs() < 1e-9);
        assert!((nu - 4.0).abs() < 1e-9);
        let weak = KerrParams { delta: -1.0, ..KerrParams::paper(1.0) };
        assert!(matches!(turning_points(&weak), Err(SemiclassicalError::NoBistability { .. })));
    }

    #[test]
    fn turning_points_are_extrema_of_drive_curve() {
        let p = KerrParams::paper(1.0);
        let (nl, nu) = turning_points(&p).unwrap();
        let h = 1e-6;
        for n in [nl, nu] {
            let d = (drive_squared_at(n + h, &p) - drive_squared_at(n - h, &p)) / (2.0 * h);
            assert!(d.abs() < 1e-6, "{d}");
        }
    }

    #[test]
    fn euler_zero_drive_stays_zero() {
        let tr = evolve_euler(&KerrParams::paper(0.0), InitialState::VACUUM, 1e-2, 2.0).unwrap();
        assert_eq!(tr.len(), 201);
        assert!(tr.values.iter().all(|a| *a == C64::new(0.0, 0.0)));
        assert!(tr.times.windows(2).all(|w| ((w[1] - w[0]) - 1e-2).abs() < 1e-12));
    }

    #[test]
    fn euler_linear_converges_at_first_order() {
        let p = KerrParams::new(-3.0, 0.0, 2.0, C64::new(1.5, -0.5)).unwrap();
        let a0 = InitialState::new(0.7, 0.4).unwrap();
        let lam = C64::new(0.5 * p.gamma, p.delta);
        let ss = p.drive / lam;
        let t = 1.0;
        let exact = ss + (a0.alpha() - ss) * (-lam * t).exp();
        let err = |dt: f64| (evolve_euler(&p, a0, dt, t).unwrap().last() - exact).norm();
        let (e1, e2) = (err(1e-3), err(5e-4));
        assert!(e1 < 1e-2);
        let order = (e1 / e2).log2();
        assert!((order - 1.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn euler_reports_divergence() {
        let p = KerrParams::paper(20.0);
        let a0 = InitialState::new(50.0, 0.0).unwrap();
        assert!(matches!(evolve_euler(&p, a0, 1e-2, 2.0), Err(SemiclassicalError::Diverged { .. })));
        assert!(matches!(evolve_euler(&p, a0, 0.0, 2.0), Err(SemiclassicalError::InvalidTimeGrid { .. })));
    }

    #[test]
    fn euler_maruyama_is_reproducible() {
        let p = KerrParams::paper(8.0);
        let a = evolve_euler_maruyama(&p, InitialState::VACUUM, 1e-2, 1.0, 7, 3).unwrap();
        let b = evolve_euler_maruyama(&p, InitialState::VACUUM, 1e-2, 1.0, 7, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0].values, a[1].values);
        assert_eq!(a[0].seed, Some(7));
    }

    #[test]
    fn euler_maruyama_without_noise_is_euler() {
        // γ = 0 switches the noise off
        let p = KerrParams { delta: -2.0, chi2: 0.3, gamma: 0.0, drive: C64::new(1.0, 0.0) };
        let em = evolve_euler_maruyama(&p, InitialState::VACUUM, 1e-2, 1.0, 11, 1).unwrap();
        let eu = evolve_euler(&p, InitialState::VACUUM, 1e-2, 1.0).unwrap();
        assert_eq!(em[0].values, eu.values);
    }

    #[test]
    fn euler_maruyama_vacuum_variance() {
        // χ″ = 0, E = 0: stationary ⟨|a|²⟩ = 1/2 (symmetrized vacuum)
        let p = KerrParams::new(-12.0, 0.0, 6.28, C64::new(0.0, 0.0)).unwrap();
        let trs = evolve_euler_maruyama(&p, InitialState::VACUUM, 2e-3, 20.0, 3, 16).unwrap();
        let mut acc = 0.0;
        let mut cnt = 0;
        for tr in &trs {
            for a in tr.values.iter().skip(2000) {
                acc += a.norm_sqr();
                cnt += 1;
            }
        }
        let var = acc / cnt as f64;
        // Euler–Maruyama bias is O(γ dt) and the statistical error a few %
        assert!((var - 0.5).abs() < 0.05, "{var}");
    }

    #[test]
    fn euler_maruyama_mean_tracks_deterministic_linear() {
        let p = KerrParams::new(-12.0, 0.0, 6.28, C64::new(3.0, 0.0)).unwrap();
        let trs = evolve_euler_maruyama(&p, InitialState::VACUUM, 1e-2, 2.0, 5, 400).unwrap();
        let det = evolve_euler(&p, InitialState::VACUUM, 1e-2, 2.0).unwrap();
        let mean: C64 = trs.iter().map(|t| t.last()).sum::<C64>() / trs.len() as f64;
        // standard error of the mean: sqrt(0.5 / 400) ≈ 0.035
        assert!((mean - det.last()).norm() < 0.12);
    }

    proptest! {
        #[test]
        fn roots_are_fixed_points(e in 0.0f64..25.0) {
            let p = KerrParams::paper(e);
            for bp in steady_states(&p) {
                prop_assert!(eom_rhs(bp.alpha, &p).norm() < 1e-10);
                prop_assert!((bp.alpha.norm_sqr() - bp.n).abs() <= 1e-10 * bp.n.max(1e-300));
            }
        }
    }
}
