//! Run configuration: flags override the TOML file, which overrides defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use maass_core::hejhal::Symmetry;
use maass_core::statistics::{Region, REFERENCE_REGION};
use serde::Deserialize;

use crate::UsageError;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "MAASS_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "maass-output";
pub const DEFAULT_EPS: f64 = 1e-7;
pub const DEFAULT_R_TOL: f64 = 1e-12;
pub const DEFAULT_GRID_N: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryChoice {
    Even,
    Odd,
    Both,
}

impl SymmetryChoice {
    pub fn symmetries(self) -> Vec<Symmetry> {
        match self {
            SymmetryChoice::Even => vec![Symmetry::Even],
            SymmetryChoice::Odd => vec![Symmetry::Odd],
            SymmetryChoice::Both => vec![Symmetry::Odd, Symmetry::Even],
        }
    }
}

/// Statistics region: scaled default, the fixed `r ≈ 40000` square, or explicit bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionChoice {
    Scaled,
    Reference,
    Custom(Region),
}

impl RegionChoice {
    pub fn region_for(&self, r: f64) -> maass_core::Result<Region> {
        match self {
            RegionChoice::Scaled => Region::scaled_for(r),
            RegionChoice::Reference => Ok(REFERENCE_REGION),
            RegionChoice::Custom(reg) => Ok(*reg),
        }
    }
}

impl FromStr for RegionChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "scaled" => return Ok(RegionChoice::Scaled),
            "reference" => return Ok(RegionChoice::Reference),
            _ => {}
        }
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| format!("region must be `scaled`, `reference` or `x_min,x_max,y_min,y_max`, got `{s}`"))?;
        let [x0, x1, y0, y1] = parts[..] else {
            return Err(format!("region needs four numbers x_min,x_max,y_min,y_max, got {}", parts.len()));
        };
        let reg = Region::new(x0, x1, y0, y1).map_err(|e| e.to_string())?;
        if x0 >= x1 {
            return Err("region has zero width".into());
        }
        Ok(RegionChoice::Custom(reg))
    }
}

/// Optional settings as they come from the command line or the config file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub eps: Option<f64>,
    pub symmetry: Option<SymmetryChoice>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub r_tol: Option<f64>,
    pub initial_step: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub grid_n: Option<usize>,
    pub region: Option<String>,
    pub threads: Option<usize>,
}

impl Settings {
    /// Field-wise `self`, falling back to `lower`.
    pub fn or(self, lower: Settings) -> Settings {
        Settings {
            eps: self.eps.or(lower.eps),
            symmetry: self.symmetry.or(lower.symmetry),
            r_min: self.r_min.or(lower.r_min),
            r_max: self.r_max.or(lower.r_max),
            r_tol: self.r_tol.or(lower.r_tol),
            initial_step: self.initial_step.or(lower.initial_step),
            output_dir: self.output_dir.or(lower.output_dir),
            grid_n: self.grid_n.or(lower.grid_n),
            region: self.region.or(lower.region),
            threads: self.threads.or(lower.threads),
        }
    }

    pub fn load(path: &Path) -> Result<Settings, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| UsageError(format!("config {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub eps: f64,
    pub symmetry: SymmetryChoice,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub r_tol: f64,
    pub initial_step: Option<f64>,
    pub output_dir: PathBuf,
    pub grid_n: usize,
    pub region: RegionChoice,
    pub threads: usize,
}

fn positive(name: &str, v: f64) -> Result<f64, UsageError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(UsageError(format!("{name} must be a positive number, got {v}")))
    }
}

impl RunConfig {
    /// `env_output_dir` sits between the file and the built-in default.
    pub fn resolve(flags: Settings, file: Option<Settings>, env_output_dir: Option<PathBuf>) -> Result<RunConfig, UsageError> {
        let s = flags.or(file.unwrap_or_default());
        let region = match &s.region {
            Some(text) => text.parse().map_err(UsageError)?,
            None => RegionChoice::Scaled,
        };
        let grid_n = s.grid_n.unwrap_or(DEFAULT_GRID_N);
        if grid_n < 32 {
            return Err(UsageError(format!("grid_n must be at least 32, got {grid_n}")));
        }
        let cfg = RunConfig {
            eps: positive("eps", s.eps.unwrap_or(DEFAULT_EPS))?,
            symmetry: s.symmetry.unwrap_or(SymmetryChoice::Both),
            r_min: s.r_min,
            r_max: s.r_max,
            r_tol: positive("r_tol", s.r_tol.unwrap_or(DEFAULT_R_TOL))?,
            initial_step: s.initial_step.map(|h| positive("initial_step", h)).transpose()?,
            output_dir: s
                .output_dir
                .or(env_output_dir.filter(|p| !p.as_os_str().is_empty()))
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
            grid_n,
            region,
            threads: s.threads.unwrap_or(0),
        };
        Ok(cfg)
    }

    /// `(r_min, r_max)` for a search, both required and ordered.
    pub fn search_range(&self) -> Result<(f64, f64), UsageError> {
        let (Some(lo), Some(hi)) = (self.r_min, self.r_max) else {
            return Err(UsageError("search needs both r_min and r_max".into()));
        };
        if !(lo > 0.0 && hi.is_finite() && lo < hi) {
            return Err(UsageError(format!("need 0 < r_min < r_max, got r_min={lo}, r_max={hi}")));
        }
        Ok((lo, hi))
    }
}
