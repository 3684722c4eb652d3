//! Quick invariant suite over every solver module.

use crate::error::{CliError, Result};
use kerr_core::chain_map;
use kerr_core::semiclassical;
use kerr_core::spectra;
use kerr_core::tebd::{self, TebdPreset};
use kerr_core::{exact_steady, fock, lindblad, linalg, wigner, BathSpec, KerrParams, C64};
use serde::Deserialize;
use std::path::Path;

pub const EMBEDDED_FIXTURE: &str = include_str!("../../core/tests/fixtures/exact_steady_reference.json");

#[derive(Debug, Deserialize)]
struct Fixture {
    delta: f64,
    chi2: f64,
    gamma: f64,
    rows: Vec<FixtureRow>,
}

#[derive(Debug, Deserialize)]
struct FixtureRow {
    drive: f64,
    mean_field: [f64; 2],
    photon_number: f64,
    g2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub module: &'static str,
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.value <= self.tolerance
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn fixture_error(text: &str) -> f64 {
    let Ok(fx) = serde_json::from_str::<Fixture>(text) else {
        return f64::INFINITY;
    };
    if fx.rows.is_empty() {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for r in &fx.rows {
        let Ok(p) = KerrParams::new(fx.delta, fx.chi2, fx.gamma, C64::new(r.drive, 0.0)) else {
            return f64::INFINITY;
        };
        let (Ok(a), Ok(n), Ok(g2)) = (exact_steady::mean_field(&p), exact_steady::photon_number(&p), exact_steady::g2_zero(&p))
        else {
            return f64::INFINITY;
        };
        let expect = C64::new(r.mean_field[0], r.mean_field[1]);
        worst = worst.max((a - expect).norm() / expect.norm()).max(rel(n, r.photon_number)).max(rel(g2, r.g2));
    }
    worst
}

fn oracle_error() -> f64 {
    let mut worst: f64 = 0.0;
    for e in [2.0, 10.0, 20.0] {
        let p = KerrParams::paper(e);
        let Ok(rho) = lindblad::steady_state(&p, 40) else { return f64::INFINITY };
        let (Ok(x), Ok(a), Ok(g2)) = (lindblad::expectations(&rho), exact_steady::mean_field(&p), exact_steady::g2_zero(&p)) else {
            return f64::INFINITY;
        };
        worst = worst.max(rel(x.mean_a.norm(), a.norm())).max(rel(x.g2, g2));
    }
    worst
}

fn root_count_error() -> f64 {
    let p = KerrParams::paper(0.0);
    let Ok((lo, hi)) = semiclassical::bistable_drive_window(&p) else { return f64::INFINITY };
    let inside = semiclassical::steady_states(&p.with_drive(0.5 * (lo + hi)));
    let outside = semiclassical::steady_states(&p.with_drive(2.0 * hi));
    let unstable_middle = inside.iter().filter(|b| !b.stable).count();
    ((inside.len() as f64 - 3.0).abs() + (outside.len() as f64 - 1.0).abs() + (unstable_middle as f64 - 1.0).abs()) as f64
}

fn chain_star_error() -> f64 {
    let Ok(bath) = BathSpec::flat(KerrParams::PAPER_GAMMA, BathSpec::PAPER_OMEGA_C, 4) else { return f64::INFINITY };
    let Ok(coeffs) = chain_map::chain_coefficients(&bath, 4) else { return f64::INFINITY };
    let chain = chain_map::chain_single_particle(&coeffs, KerrParams::PAPER_DELTA);
    let star = chain_map::star_single_particle(&bath, 4, KerrParams::PAPER_DELTA);
    let (Ok((a, _)), Ok((b, _))) = (linalg::eigh(&chain), linalg::eigh(&star)) else { return f64::INFINITY };
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn wigner_error() -> f64 {
    let Ok(rho) = lindblad::FockDensityMatrix::from_approx(&fock::coherent_density(C64::new(1.5, -0.5), 30)) else {
        return f64::INFINITY;
    };
    match wigner::wigner_from_density(&rho, wigner::default_half_width(&rho), 121) {
        Ok(f) => (f.integral() - 1.0).abs().max((f.purity() - 1.0).abs()),
        Err(_) => f64::INFINITY,
    }
}

fn gate_error() -> f64 {
    let p = KerrParams::paper(1.0);
    let d = TebdPreset::DESK;
    let Ok(c) = d.coefficients(&p) else { return f64::INFINITY };
    match tebd::build_gates(&p, &c, d.dt, d.dims) {
        Ok(g) => g.max_unitarity_defect(),
        Err(_) => f64::INFINITY,
    }
}

fn radicand_error() -> f64 {
    let p = KerrParams::paper(0.0);
    let n1 = -p.delta / (6.0 * p.chi2);
    let n2 = -p.delta / (2.0 * p.chi2);
    spectra::pole_radicand(&p, n1).abs().max(spectra::pole_radicand(&p, n2).abs())
}

pub fn run_checks(fixture: &str) -> Vec<Check> {
    let ortho = chain_map::unitary_orthonormality_check(61, 200).unwrap_or(f64::INFINITY);
    vec![
        Check { module: "exact_steady", name: "reference_fixture_rel", value: fixture_error(fixture), tolerance: 1e-9 },
        Check { module: "lindblad_oracle", name: "exact_vs_master_rel", value: oracle_error(), tolerance: 1e-6 },
        Check { module: "semiclassical", name: "root_count_mismatch", value: root_count_error(), tolerance: 0.0 },
        Check { module: "chain_map", name: "legendre_orthonormality", value: ortho, tolerance: 1e-10 },
        Check { module: "chain_map", name: "chain_vs_star_spectrum", value: chain_star_error(), tolerance: 1e-10 },
        Check { module: "wigner", name: "coherent_norm_and_purity", value: wigner_error(), tolerance: 1e-3 },
        Check { module: "tebd", name: "gate_unitarity", value: gate_error(), tolerance: 1e-12 },
        Check { module: "spectra", name: "degenerate_pole_radicand", value: radicand_error(), tolerance: 1e-10 },
    ]
}

pub fn selfcheck(fixture_path: Option<&Path>) -> Result<()> {
    let text = match fixture_path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?,
        None => EMBEDDED_FIXTURE.to_string(),
    };
    let checks = run_checks(&text);
    println!("module,check,value,tolerance,result");
    for c in &checks {
        println!("{},{},{:.3e},{:.1e},{}", c.module, c.name, c.value, c.tolerance, if c.passed() { "PASS" } else { "FAIL" });
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        return Err(CliError::Selfcheck { failed });
    }
    Ok(())
}
