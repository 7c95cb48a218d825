//! Run configurations: every command's resolved knobs, serializable to JSON
//! so an emitted config re-executes bit-identically.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One fully resolved run. The canonical form is the compact JSON encoding;
/// output files are named by the FNV-1a hash of that encoding.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Volume {
        group: String,
        spectrum: Vec<f64>,
        method: String,
        nodes: usize,
        samples: u64,
        seed: u64,
        out: String,
    },
    Curves {
        group: String,
        grid: usize,
        out: String,
    },
    CoarseGrain {
        ell: usize,
        k: usize,
        observables: Vec<String>,
        weyl_filter: bool,
        out: String,
    },
    So4Compare {
        count: usize,
        samples: u64,
        seed: u64,
        out: String,
    },
    Asymptotics {
        n_list: Vec<usize>,
        level: f64,
        weighting: String,
        out: String,
    },
    Fidelity {
        rho: Vec<f64>,
        sigma: Vec<f64>,
        rho_basis: Vec<f64>,
        sigma_basis: Vec<f64>,
        method: String,
        budget: usize,
        seed: u64,
        out: String,
    },
}

impl RunConfig {
    pub fn command_name(&self) -> &'static str {
        match self {
            RunConfig::Volume { .. } => "volume",
            RunConfig::Curves { .. } => "curves",
            RunConfig::CoarseGrain { .. } => "coarse-grain",
            RunConfig::So4Compare { .. } => "so4-compare",
            RunConfig::Asymptotics { .. } => "asymptotics",
            RunConfig::Fidelity { .. } => "fidelity",
        }
    }

    pub fn out_dir(&self) -> &str {
        match self {
            RunConfig::Volume { out, .. }
            | RunConfig::Curves { out, .. }
            | RunConfig::CoarseGrain { out, .. }
            | RunConfig::So4Compare { out, .. }
            | RunConfig::Asymptotics { out, .. }
            | RunConfig::Fidelity { out, .. } => out,
        }
    }

    /// Canonical JSON encoding: compact, field order fixed by declaration.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serialization cannot fail")
    }

    /// Stable 64-bit content hash of the canonical encoding.
    pub fn hash(&self) -> u64 {
        fnv1a(self.canonical_json().as_bytes())
    }

    /// `<command>-<hash>` prefix shared by all files of this run.
    pub fn file_stem(&self) -> String {
        format!("{}-{:016x}", self.command_name(), self.hash())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
