//! Run configuration: TOML file, presets and command-line overrides.

use crate::error::{CliError, Result};
use kerr_core::tebd::{SystemDims, TebdPreset};
use kerr_core::{BathSpec, InitialState, KerrParams, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Semiclassical,
    Lindblad,
    Exact,
    Tebd,
}

impl Solver {
    pub fn as_str(&self) -> &'static str {
        match self {
            Solver::Semiclassical => "semiclassical",
            Solver::Lindblad => "lindblad",
            Solver::Exact => "exact",
            Solver::Tebd => "tebd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Paper,
    Desk,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub delta: f64,
    pub chi2: f64,
    pub gamma: f64,
    pub drive: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self { delta: KerrParams::PAPER_DELTA, chi2: KerrParams::PAPER_CHI2, gamma: KerrParams::PAPER_GAMMA, drive: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BathConfig {
    pub omega_c: f64,
    pub n_sites: usize,
}

impl Default for BathConfig {
    fn default() -> Self {
        Self { omega_c: BathSpec::PAPER_OMEGA_C, n_sites: TebdPreset::DESK.n_chain }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct InitialConfig {
    pub amplitude: f64,
    /// Phase as a multiple of π.
    pub phase_pi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub field: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TebdConfig {
    pub chi_max: usize,
    pub system_dim: usize,
    pub chain_dim: usize,
    pub dt: f64,
    pub t_end: f64,
}

impl Default for TebdConfig {
    fn default() -> Self {
        let d = TebdPreset::DESK;
        Self { chi_max: d.chi_max, system_dim: d.dims.system, chain_dim: d.dims.chain, dt: d.dt, t_end: d.t_end }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LindbladConfig {
    pub dim: usize,
    pub dt: f64,
}

impl Default for LindbladConfig {
    fn default() -> Self {
        Self { dim: 40, dt: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemiclassicalConfig {
    pub dt: f64,
    pub trajectories: usize,
    pub langevin_dt: f64,
    pub langevin_t_end: f64,
}

impl Default for SemiclassicalConfig {
    fn default() -> Self {
        Self { dt: 1e-2, trajectories: 64, langevin_dt: 2e-3, langevin_t_end: 40.0 }
    }
}

/// Horizon and output spacing for the semiclassical and master-equation
/// dynamics; MPS runs use the `tebd` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsConfig {
    pub t_end: f64,
    pub sample_dt: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self { t_end: 2.0, sample_dt: 1e-2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub n_omega: usize,
    pub n_theta: usize,
    /// Correlator length for the MPS estimator, in units of 1/γ.
    pub tau_gamma: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { n_omega: 512, n_theta: 64, tau_gamma: 4.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WignerConfig {
    pub n_points: usize,
}

impl Default for WignerConfig {
    fn default() -> Self {
        Self { n_points: kerr_core::wigner::DEFAULT_POINTS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsConfig,
    pub bath: BathConfig,
    pub initial: InitialConfig,
    pub solver: Solver,
    pub preset: Preset,
    pub sweep: Option<Sweep>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub tebd: TebdConfig,
    pub lindblad: LindbladConfig,
    pub semiclassical: SemiclassicalConfig,
    pub dynamics: DynamicsConfig,
    pub spectrum: SpectrumConfig,
    pub wigner: WignerConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ParamsConfig::default(),
            bath: BathConfig::default(),
            initial: InitialConfig::default(),
            solver: Solver::Exact,
            preset: Preset::Desk,
            sweep: None,
            output_dir: PathBuf::from("out"),
            seed: 0,
            tebd: TebdConfig::default(),
            lindblad: LindbladConfig::default(),
            semiclassical: SemiclassicalConfig::default(),
            dynamics: DynamicsConfig::default(),
            spectrum: SpectrumConfig::default(),
            wigner: WignerConfig::default(),
        }
    }
}

pub const SWEEP_FIELDS: [&str; 4] = ["drive", "delta", "chi2", "gamma"];

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Pin chain and truncation settings of a named preset.
    pub fn apply_preset(&mut self) {
        let p = match self.preset {
            Preset::Paper => TebdPreset::PAPER,
            Preset::Desk => TebdPreset::DESK,
            Preset::Custom => return,
        };
        self.bath.n_sites = p.n_chain;
        self.bath.omega_c = p.omega_c;
        self.tebd.chi_max = p.chi_max;
        self.tebd.chain_dim = p.dims.chain;
        self.tebd.system_dim = p.dims.system;
        self.tebd.dt = p.dt;
        self.tebd.t_end = p.t_end;
    }

    pub fn validate(&self) -> Result<()> {
        self.kerr_params()?;
        InitialState::new(self.initial.amplitude, self.initial.phase_pi * std::f64::consts::PI)?;
        if let Some(s) = &self.sweep {
            if !SWEEP_FIELDS.contains(&s.field.as_str()) {
                return Err(CliError::Config(format!("unknown sweep field {:?}; expected one of {:?}", s.field, SWEEP_FIELDS)));
            }
        }
        let d = &self.dynamics;
        if !(d.sample_dt > 0.0) || d.t_end < 0.0 {
            return Err(CliError::Config(format!("dynamics grid t_end = {}, sample_dt = {} is invalid", d.t_end, d.sample_dt)));
        }
        if self.tebd.dt <= 0.0 || self.tebd.t_end < self.tebd.dt {
            return Err(CliError::Config(format!("tebd time grid dt = {}, t_end = {} is invalid", self.tebd.dt, self.tebd.t_end)));
        }
        Ok(())
    }

    pub fn kerr_params(&self) -> Result<KerrParams> {
        let p = &self.params;
        Ok(KerrParams::new(p.delta, p.chi2, p.gamma, C64::new(p.drive, 0.0))?)
    }

    pub fn initial_state(&self) -> InitialState {
        InitialState { amplitude: self.initial.amplitude, phase: self.initial.phase_pi * std::f64::consts::PI }
    }

    pub fn tebd_preset(&self) -> TebdPreset {
        TebdPreset {
            n_chain: self.bath.n_sites,
            chi_max: self.tebd.chi_max,
            dims: SystemDims { system: self.tebd.system_dim, chain: self.tebd.chain_dim },
            dt: self.tebd.dt,
            t_end: self.tebd.t_end,
            omega_c: self.bath.omega_c,
        }
    }

    /// Parameter sets of the sweep, in sweep order; the base parameters
    /// alone when no sweep is given.
    pub fn sweep_points(&self) -> Result<Vec<(f64, KerrParams)>> {
        let base = self.kerr_params()?;
        let Some(s) = &self.sweep else {
            return Ok(vec![(base.drive.re, base)]);
        };
        if s.values.is_empty() {
            return Ok(vec![(base.drive.re, base)]);
        }
        s.values
            .iter()
            .map(|&v| {
                let mut p = base;
                match s.field.as_str() {
                    "drive" => p.drive = C64::new(v, 0.0),
                    "delta" => p.delta = v,
                    "chi2" => p.chi2 = v,
                    "gamma" => p.gamma = v,
                    other => return Err(CliError::Config(format!("unknown sweep field {other:?}"))),
                }
                p.validate()?;
                Ok((v, p))
            })
            .collect()
    }

    pub fn sweep_field(&self) -> &str {
        self.sweep.as_ref().map(|s| s.field.as_str()).unwrap_or("drive")
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    /// Hash of every setting that affects results; the output directory is excluded.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(m) = v.as_object_mut() {
            m.remove("output_dir");
        }
        let json = v.to_string();
        hex::encode(Sha256::digest(json.as_bytes()))[..16].to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = RunConfig::default();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = RunConfig::from_toml("solver = \"lindblad\"\n[params]\ndrive = 3.0\n[sweep]\nfield = \"drive\"\nvalues = [1.0, 2.0]\n").unwrap();
        assert_eq!(c.solver, Solver::Lindblad);
        assert_eq!(c.params.drive, 3.0);
        assert_eq!(c.params.delta, -12.0);
        assert_eq!(c.sweep_points().unwrap().len(), 2);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("[params]\ndetuning = 1.0\n").is_err());
    }

    #[test]
    fn presets_pin_truncation() {
        let mut c = RunConfig { preset: Preset::Paper, ..Default::default() };
        c.tebd.chi_max = 3;
        c.apply_preset();
        assert_eq!((c.bath.n_sites, c.tebd.chi_max, c.tebd.chain_dim), (61, 36, 20));
        let mut d = RunConfig { preset: Preset::Custom, ..Default::default() };
        d.tebd.chi_max = 3;
        d.apply_preset();
        assert_eq!(d.tebd.chi_max, 3);
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 7;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn sweep_validation() {
        let c = RunConfig { sweep: Some(Sweep { field: "omega".into(), values: vec![1.0] }), ..Default::default() };
        assert!(c.validate().is_err());
        let c = RunConfig { sweep: Some(Sweep { field: "drive".into(), values: vec![] }), ..Default::default() };
        assert_eq!(c.sweep_points().unwrap().len(), 1);
    }
}
