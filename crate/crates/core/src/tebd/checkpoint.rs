//! Versioned JSON checkpoints of an MPS run.

use super::evolve::TruncationReport;
use super::mps::MatrixProductState;
use super::TebdError;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const FORMAT: &str = "kerr-mps-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub step: usize,
    pub state: MatrixProductState,
    pub truncation: TruncationReport,
}

impl Checkpoint {
    pub fn new(state: MatrixProductState, step: usize, truncation: TruncationReport) -> Self {
        Self { format: FORMAT.to_string(), version: VERSION, step, state, truncation }
    }

    pub fn to_json(&self) -> Result<String, TebdError> {
        serde_json::to_string(self).map_err(|e| TebdError::Checkpoint(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self, TebdError> {
        let c: Self = serde_json::from_str(s).map_err(|e| TebdError::Checkpoint(e.to_string()))?;
        if c.format != FORMAT {
            return Err(TebdError::Checkpoint(format!("unknown format {:?}", c.format)));
        }
        if c.version != VERSION {
            return Err(TebdError::Checkpoint(format!("unsupported version {}", c.version)));
        }
        let s = &c.state;
        let consistent = s.tensors.len() == s.local_dims.len()
            && s.lambdas.len() + 1 == s.tensors.len()
            && s.tensors.iter().zip(&s.local_dims).all(|(t, &d)| t.d == d && t.data.len() == t.dl * t.d * t.dr)
            && s.tensors.windows(2).zip(&s.lambdas).all(|(w, l)| w[0].dr == w[1].dl && w[0].dr == l.len());
        if !consistent {
            return Err(TebdError::Checkpoint("tensor shapes are inconsistent".into()));
        }
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<(), TebdError> {
        std::fs::write(path, self.to_json()?).map_err(|e| TebdError::Checkpoint(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, TebdError> {
        let s = std::fs::read_to_string(path).map_err(|e| TebdError::Checkpoint(e.to_string()))?;
        Self::from_json(&s)
    }
}
