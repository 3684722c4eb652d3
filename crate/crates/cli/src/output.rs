//! Header blocks, file writing and plot-script stubs.

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `#`-prefixed header: artifact version, config hash, parameter echo.
pub fn header(cfg: &RunConfig, artifact: &str) -> String {
    let mut s = String::new();
    let p = &cfg.params;
    let _ = writeln!(s, "# kerrsim {VERSION} artifact: {artifact}");
    let _ = writeln!(s, "# config_sha256: {}", cfg.hash());
    let _ = writeln!(s, "# solver: {}", cfg.solver.as_str());
    let _ = writeln!(s, "# preset: {}", format!("{:?}", cfg.preset).to_lowercase());
    let _ = writeln!(s, "# params: delta={} chi2={} gamma={} drive={}", p.delta, p.chi2, p.gamma, p.drive);
    let _ = writeln!(s, "# bath: omega_c={} n_sites={}", cfg.bath.omega_c, cfg.bath.n_sites);
    let _ = writeln!(s, "# initial: amplitude={} phase_pi={}", cfg.initial.amplitude, cfg.initial.phase_pi);
    let _ = writeln!(s, "# seed: {}", cfg.seed);
    match &cfg.sweep {
        Some(sw) => {
            let vals: Vec<String> = sw.values.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "# sweep: {}=[{}]", sw.field, vals.join(","));
        }
        None => {
            let _ = writeln!(s, "# sweep: none");
        }
    }
    s
}

/// Scalar formatting shared by every table.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.10e}")
    } else {
        "nan".to_string()
    }
}

/// File-name-safe rendering of a sweep value.
pub fn tag(x: f64) -> String {
    format!("{x}").replace('-', "m").replace('.', "p")
}

pub struct OutputDir {
    root: PathBuf,
    pub written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), written: vec![] })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.root.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    /// Generic matplotlib stub for a table written by `command`.
    pub fn plot_stub(&mut self, command: &str, csv: &str, x: &str, ys: &[&str]) -> Result<()> {
        let ys: Vec<String> = ys.iter().map(|y| format!("{y:?}")).collect();
        let body = format!(
            "\"\"\"Plot {csv} produced by `kerrsim {command}`.\"\"\"\n\
             import sys\n\
             import pandas as pd\n\
             import matplotlib.pyplot as plt\n\
             \n\
             path = sys.argv[1] if len(sys.argv) > 1 else {csv:?}\n\
             df = pd.read_csv(path, comment=\"#\")\n\
             fig, axes = plt.subplots({n}, 1, sharex=True, squeeze=False)\n\
             for ax, col in zip(axes[:, 0], [{cols}]):\n\
             \x20   ax.plot(df[{x:?}], df[col], \".\", ms=2)\n\
             \x20   ax.set_ylabel(col)\n\
             axes[-1, 0].set_xlabel({x:?})\n\
             fig.savefig(path.rsplit(\".\", 1)[0] + \".png\", dpi=150)\n",
            n = ys.len(),
            cols = ys.join(", "),
        );
        self.write(&format!("plot_{command}.py"), &body)
    }
}
