//! The subcommands.

mod bessel;
mod search;
mod stats;
mod verify;

use std::path::{Path, PathBuf};

use anyhow::Result;
use maass_core::hejhal::{Hejhal, Symmetry};
use maass_core::special_functions::BesselEvaluator;
use serde::{Deserialize, Serialize};

use crate::cli::{Cli, Command};
use crate::config::{RunConfig, Settings, OUTPUT_DIR_ENV};
use crate::threads::RayonParallel;
use crate::{Outcome, UsageError};

pub use bessel::bessel_csv;
pub use stats::weighted_cdf;

pub fn run(cli: Cli) -> Result<Outcome> {
    let file = cli.config.as_deref().map(Settings::load).transpose()?;
    let env_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    let cfg = RunConfig::resolve(cli.settings(), file, env_dir)?;
    match &cli.command {
        Command::Search(a) => search::run(&cfg, a.output.overwrite, a.resume),
        Command::Verify(a) => verify::run(&cfg, &a.record, a.output.overwrite),
        Command::Stats(a) => stats::run(&cfg, &a.record, a.output.overwrite),
        Command::Bessel(a) => bessel::run(a),
        Command::Eisenstein(a) => bessel::eisenstein(a),
    }
}

fn solver(cfg: &RunConfig) -> Result<Hejhal<RayonParallel>> {
    Ok(Hejhal::new(BesselEvaluator::default(), RayonParallel::new(cfg.threads)?))
}

/// What a coefficient file holds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[default]
    Cusp,
    Eisenstein,
}

/// The fields `verify` and `stats` need. Eigenvalue records parse as this
/// too; their other fields are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    #[serde(default)]
    pub kind: Kind,
    pub r: f64,
    pub symmetry: Symmetry,
    /// `a_1, a_2, …`
    pub coefficients: Vec<f64>,
}

impl CoefficientFile {
    pub fn read(path: &Path) -> Result<CoefficientFile> {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        let file: CoefficientFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            UsageError(format!("{}: field `{field}`: {}", path.display(), e.inner()))
        })?;
        if file.coefficients.is_empty() {
            return Err(UsageError(format!("{}: field `coefficients`: empty", path.display())).into());
        }
        if let Some(i) = file.coefficients.iter().position(|a| !a.is_finite()) {
            return Err(UsageError(format!("{}: field `coefficients[{i}]`: not finite", path.display())).into());
        }
        Ok(file)
    }
}

/// File stem used to name derived outputs.
fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "record".into())
}
