//! `steady`, `dynamics`, `wigner` and `spectrum` runners.
//!
//! Sweep points are evaluated in parallel and gathered in sweep order, so
//! output files do not depend on the thread count.

use crate::config::{RunConfig, Solver};
use crate::error::{CliError, Result};
use crate::output::{header, num, tag, OutputDir};
use kerr_core::lindblad::{self, FockDensityMatrix};
use kerr_core::semiclassical::{self, BranchPoint};
use kerr_core::spectra::{self, Provenance, SpectrumResult};
use kerr_core::tebd::{self, MatrixProductState, StationarityPolicy, TebdRecord};
use kerr_core::{exact_steady, fock, wigner, KerrParams, C64};
use rayon::prelude::*;
use std::fmt::Write as _;

fn sweep_map<T: Send>(cfg: &RunConfig, f: impl Fn(usize, f64, &KerrParams) -> T + Sync) -> Result<Vec<(f64, KerrParams, T)>> {
    let points = cfg.sweep_points()?;
    Ok(points.into_par_iter().enumerate().map(|(i, (v, p))| (v, p, f(i, v, &p))).collect())
}

fn value_column(cfg: &RunConfig) -> Option<&str> {
    match cfg.sweep_field() {
        "drive" => None,
        f => Some(f),
    }
}

struct TebdRun {
    state: MatrixProductState,
    record: TebdRecord,
    gates: tebd::GateSet,
    discarded: f64,
}

fn run_tebd(cfg: &RunConfig, p: &KerrParams) -> Result<TebdRun> {
    let preset = cfg.tebd_preset();
    let coeffs = preset.coefficients(p)?;
    let gates = tebd::build_gates(p, &coeffs, preset.dt, preset.dims)?;
    let mut state = tebd::init_state(&cfg.initial_state(), preset.dims, preset.n_chain, preset.chi_max)?;
    let (record, report) = tebd::evolve(&mut state, &gates, preset.t_end)?;
    Ok(TebdRun { state, record, gates, discarded: report.cumulative })
}

/// `⟨a⟩`, n, g² from a density matrix; g² is NaN for the vacuum.
fn density_moments(rho: &FockDensityMatrix) -> (C64, f64, f64) {
    match lindblad::expectations(rho) {
        Ok(e) => (e.mean_a, e.n, e.g2),
        Err(_) => (lindblad::mean_a(rho), lindblad::mean_n(rho), f64::NAN),
    }
}

struct SteadyRow {
    a: C64,
    n: f64,
    g2: f64,
    branch: String,
    stable: Option<bool>,
}

fn steady_point(cfg: &RunConfig, p: &KerrParams) -> Result<Vec<SteadyRow>> {
    let quantum = |a, n, g2, branch: &str| vec![SteadyRow { a, n, g2, branch: branch.to_string(), stable: None }];
    match cfg.solver {
        Solver::Exact => {
            let a = exact_steady::mean_field(p)?;
            let n = exact_steady::photon_number(p)?;
            let g2 = exact_steady::g2_zero(p)?;
            Ok(quantum(a, n, g2, "quantum"))
        }
        Solver::Lindblad => {
            let rho = lindblad::steady_state(p, cfg.lindblad.dim)?;
            let (a, n, g2) = density_moments(&rho);
            Ok(quantum(a, n, g2, "quantum"))
        }
        Solver::Tebd => {
            let run = run_tebd(cfg, p)?;
            let k = run.record.times.len() - 1;
            Ok(quantum(run.record.mean_a[k], run.record.n[k], run.record.g2[k], "t_end"))
        }
        Solver::Semiclassical => Ok(semiclassical::steady_states(p)
            .into_iter()
            .map(|b: BranchPoint| SteadyRow { a: b.alpha, n: b.n, g2: 1.0, branch: b.branch.as_str().into(), stable: Some(b.stable) })
            .collect()),
    }
}

pub fn steady(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let results = sweep_map(cfg, |_, _, p| steady_point(cfg, p))?;
    let mut s = header(cfg, "steady");
    let extra = value_column(cfg);
    if let Some(f) = extra {
        let _ = write!(s, "{f},");
    }
    s.push_str("E,solver,abs_a,arg_a,n,g2,branch,stable,status\n");
    for (v, p, res) in results {
        let lead = extra.map(|_| format!("{},", num(v))).unwrap_or_default();
        match res {
            Ok(rows) => {
                for r in rows {
                    let stable = r.stable.map(|b| b.to_string()).unwrap_or_default();
                    let _ = writeln!(
                        s,
                        "{lead}{},{},{},{},{},{},{},{stable},ok",
                        num(p.drive.re),
                        cfg.solver.as_str(),
                        num(r.a.norm()),
                        num(r.a.arg()),
                        num(r.n),
                        num(r.g2),
                        r.branch
                    );
                }
            }
            Err(e) => {
                let _ = writeln!(s, "{lead}{},{},nan,nan,nan,nan,,,error:{}", num(p.drive.re), cfg.solver.as_str(), e.category());
            }
        }
    }
    out.write("steady.csv", &s)?;
    out.plot_stub("steady", "steady.csv", "E", &["abs_a", "n", "g2"])
}

struct Sample {
    t: f64,
    a: C64,
    n: f64,
    g2: f64,
}

fn stride(sample_dt: f64, dt: f64) -> usize {
    ((sample_dt / dt).round() as usize).max(1)
}

fn dynamics_point(cfg: &RunConfig, p: &KerrParams) -> Result<Vec<Sample>> {
    let d = &cfg.dynamics;
    match cfg.solver {
        Solver::Semiclassical => {
            let dt = cfg.semiclassical.dt;
            let rec = semiclassical::evolve_euler(p, cfg.initial_state(), dt, d.t_end)?;
            let k = stride(d.sample_dt, dt);
            Ok(rec
                .times
                .iter()
                .zip(&rec.values)
                .step_by(k)
                .map(|(&t, &a)| Sample { t, a, n: a.norm_sqr(), g2: 1.0 })
                .collect())
        }
        Solver::Lindblad => {
            let dim = cfg.lindblad.dim;
            let rho0 = FockDensityMatrix::from_approx(&fock::coherent_density(cfg.initial_state().alpha(), dim))?;
            let k = stride(d.sample_dt, cfg.lindblad.dt);
            let mut out = Vec::new();
            let mut count = 0usize;
            lindblad::evolve_master_with(&rho0, p, cfg.lindblad.dt, d.t_end, |t, rho| {
                if count % k == 0 {
                    let (a, n, g2) = density_moments(rho);
                    out.push(Sample { t, a, n, g2 });
                }
                count += 1;
            })?;
            Ok(out)
        }
        Solver::Tebd => {
            let r = run_tebd(cfg, p)?.record;
            Ok((0..r.times.len()).map(|i| Sample { t: r.times[i], a: r.mean_a[i], n: r.n[i], g2: r.g2[i] }).collect())
        }
        Solver::Exact => Err(CliError::Unsupported { solver: "exact", command: "dynamics" }),
    }
}

pub fn dynamics(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    if cfg.solver == Solver::Exact {
        return Err(CliError::Unsupported { solver: "exact", command: "dynamics" });
    }
    let results = sweep_map(cfg, |_, _, p| dynamics_point(cfg, p))?;
    let mut s = header(cfg, "dynamics");
    let extra = value_column(cfg);
    if let Some(f) = extra {
        let _ = write!(s, "{f},");
    }
    s.push_str("E,t,re_a,im_a,n,g2,status\n");
    for (v, p, res) in results {
        let lead = extra.map(|_| format!("{},", num(v))).unwrap_or_default();
        let e = num(p.drive.re);
        match res {
            Ok(samples) => {
                for x in samples {
                    let _ = writeln!(s, "{lead}{e},{},{},{},{},{},ok", num(x.t), num(x.a.re), num(x.a.im), num(x.n), num(x.g2));
                }
            }
            Err(err) => {
                let _ = writeln!(s, "{lead}{e},nan,nan,nan,nan,nan,error:{}", err.category());
            }
        }
    }
    out.write("dynamics.csv", &s)?;
    out.plot_stub("dynamics", "dynamics.csv", "t", &["re_a", "im_a", "n", "g2"])
}

fn wigner_density(cfg: &RunConfig, p: &KerrParams) -> Result<FockDensityMatrix> {
    match cfg.solver {
        Solver::Lindblad => Ok(lindblad::steady_state(p, cfg.lindblad.dim)?),
        Solver::Tebd => {
            let run = run_tebd(cfg, p)?;
            Ok(tebd::reduced_density_matrix(&run.state, 0)?)
        }
        Solver::Exact => Err(CliError::Unsupported { solver: "exact", command: "wigner" }),
        Solver::Semiclassical => Err(CliError::Unsupported { solver: "semiclassical", command: "wigner" }),
    }
}

pub fn wigner(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    if matches!(cfg.solver, Solver::Exact | Solver::Semiclassical) {
        return Err(CliError::Unsupported { solver: cfg.solver.as_str(), command: "wigner" });
    }
    let n_points = cfg.wigner.n_points;
    let results = sweep_map(cfg, |_, _, p| -> Result<_> {
        let rho = wigner_density(cfg, p)?;
        let field = wigner::wigner_from_density(&rho, wigner::default_half_width(&rho), n_points)?;
        Ok((field, rho.purity()))
    })?;
    let field_name = cfg.sweep_field();
    let mut lobes = header(cfg, "wigner_lobes");
    lobes.push_str("value,lobe_re,lobe_im,nearest_branch,branch_distance,status\n");
    for (v, p, res) in results {
        match res {
            Ok((field, purity)) => {
                let extra = vec![
                    (field_name.to_string(), v.to_string()),
                    ("integral".to_string(), num(field.integral())),
                    ("purity_phase_space".to_string(), num(field.purity())),
                    ("purity_density".to_string(), num(purity)),
                    ("min".to_string(), num(field.min())),
                ];
                let mut body = header(cfg, "wigner");
                body.push_str(&field.to_csv(&extra));
                out.write(&format!("wigner_{field_name}_{}.csv", tag(v)), &body)?;
                let roots = semiclassical::steady_states(&p);
                for l in wigner::lobe_locations(&field, 0.2) {
                    let nearest = roots.iter().min_by(|a, b| (a.alpha - l).norm().total_cmp(&(b.alpha - l).norm()));
                    let (name, dist) = nearest.map(|b| (b.branch.as_str(), (b.alpha - l).norm())).unwrap_or(("", f64::NAN));
                    let _ = writeln!(lobes, "{},{},{},{name},{},ok", num(v), num(l.re), num(l.im), num(dist));
                }
            }
            Err(e) => {
                let _ = writeln!(lobes, "{},nan,nan,,nan,error:{}", num(v), e.category());
            }
        }
    }
    out.write("wigner_lobes.csv", &lobes)?;
    out.plot_stub("wigner", "wigner_lobes.csv", "lobe_re", &["lobe_im"])
}

struct Labelled {
    label: String,
    spectrum: SpectrumResult,
    poles: Option<(C64, C64)>,
    note: Option<(String, String)>,
}

fn spectrum_point(cfg: &RunConfig, index: usize, p: &KerrParams) -> Result<Vec<Labelled>> {
    let sc = &cfg.spectrum;
    let w = 3.0 * p.delta.abs();
    let omegas = spectra::linspace(-w, w, sc.n_omega);
    let thetas: Vec<f64> = (0..sc.n_theta).map(|k| std::f64::consts::PI * k as f64 / sc.n_theta as f64).collect();
    let analytic = |alpha: C64, prov: Provenance, label: String| -> Result<Labelled> {
        Ok(Labelled {
            label,
            spectrum: spectra::analytic_spectrum(p, alpha, &omegas, &thetas, prov)?,
            poles: Some(spectra::poles(p, alpha)),
            note: None,
        })
    };
    let quantum_alpha = || -> Result<Labelled> {
        let alpha = exact_steady::mean_field(p)?;
        analytic(alpha, Provenance::AnalyticQuantumAlpha, "quantum_alpha".into())
    };
    match cfg.solver {
        Solver::Exact => Ok(vec![quantum_alpha()?]),
        Solver::Semiclassical => {
            let mut out = Vec::new();
            for b in semiclassical::steady_states(p).into_iter().filter(|b| b.stable) {
                out.push(analytic(b.alpha, Provenance::AnalyticSemiclassical, b.branch.as_str().into())?);
            }
            if !p.is_linear() {
                out.push(quantum_alpha()?);
            }
            let s = &cfg.semiclassical;
            let seed = cfg.seed.wrapping_add(index as u64);
            let trajs = semiclassical::evolve_euler_maruyama(p, cfg.initial_state(), s.langevin_dt, s.langevin_t_end, seed, s.trajectories)?;
            let lv = spectra::numeric_spectrum_langevin(&trajs, &thetas, spectra::WelchWindow::default())?;
            out.push(Labelled { label: "langevin".into(), spectrum: lv, poles: None, note: Some(("trajectory_seed".into(), seed.to_string())) });
            Ok(out)
        }
        Solver::Tebd => {
            let run = run_tebd(cfg, p)?;
            let tau_max = sc.tau_gamma / p.gamma;
            let (corr, drift) =
                tebd::stationary_correlators(&run.state, &run.gates, p.gamma, tau_max, StationarityPolicy::Report)?;
            let s = spectra::numeric_spectrum_tebd(&corr, &omegas, &thetas)?;
            let note = format!("{} (truncation {})", num(drift), num(run.discarded));
            Ok(vec![Labelled { label: "tebd".into(), spectrum: s, poles: None, note: Some(("stationarity_drift".into(), note)) }])
        }
        Solver::Lindblad => Err(CliError::Unsupported { solver: "lindblad", command: "spectrum" }),
    }
}

pub fn spectrum(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    if cfg.solver == Solver::Lindblad {
        return Err(CliError::Unsupported { solver: "lindblad", command: "spectrum" });
    }
    let results = sweep_map(cfg, |i, _, p| spectrum_point(cfg, i, p))?;
    let field_name = cfg.sweep_field();
    let mut peaks = header(cfg, "spectrum_peaks");
    peaks.push_str("value,provenance,label,peak_omega,pole_re_plus,pole_re_minus,theta_variation,status\n");
    for (v, _, res) in results {
        match res {
            Ok(list) => {
                for l in list {
                    let mut extra = vec![(field_name.to_string(), v.to_string())];
                    extra.extend(l.note.clone());
                    let mut body = header(cfg, "spectrum");
                    body.push_str(&l.spectrum.to_csv(&extra));
                    out.write(&format!("spectrum_{field_name}_{}_{}.csv", tag(v), l.label), &body)?;
                    let mean = l.spectrum.theta_mean();
                    let peak = spectra::refined_peak(&l.spectrum.omegas, &mean, 0.5);
                    let (pp, pm) = l.poles.map(|(a, b)| (num(a.re), num(b.re))).unwrap_or(("nan".into(), "nan".into()));
                    let _ = writeln!(
                        peaks,
                        "{},{},{},{},{pp},{pm},{},ok",
                        num(v),
                        l.spectrum.provenance.as_str(),
                        l.label,
                        num(peak),
                        num(l.spectrum.theta_variation())
                    );
                }
            }
            Err(e) => {
                let _ = writeln!(peaks, "{},,,nan,nan,nan,nan,error:{}", num(v), e.category());
            }
        }
    }
    out.write("spectrum_peaks.csv", &peaks)?;
    out.plot_stub("spectrum", "spectrum_peaks.csv", "value", &["peak_omega", "theta_variation"])
}
