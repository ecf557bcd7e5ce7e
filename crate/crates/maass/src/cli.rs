//! Command-line flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Settings, SymmetryChoice};

#[derive(Debug, Parser)]
#[command(name = "maass", version, about = "Maass cusp forms for PSL(2,Z): eigenvalue search, verification and statistics")]
pub struct Cli {
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find eigenvalues in an interval and write one JSON record per eigenvalue.
    Search(SearchArgs),
    /// Re-run the arithmetic checks on a record or coefficient file.
    Verify(VerifyArgs),
    /// Value-distribution and Sato–Tate data for a record.
    Stats(StatsArgs),
    /// Tabulate the scaled K-Bessel function e^{πr/2} K_{ir}(x).
    Bessel(BesselArgs),
    /// Write Eisenstein series coefficients as a coefficient file.
    Eisenstein(EisensteinArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Output directory [default: $MAASS_OUTPUT_DIR, else ./maass-output].
    #[arg(long, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// Replace existing files whose content differs.
    #[arg(long)]
    pub overwrite: bool,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Symmetry class to search [default: both].
    #[arg(long, value_enum)]
    pub symmetry: Option<SymmetryChoice>,
    /// Lower end of the interval.
    #[arg(long)]
    pub r_min: Option<f64>,
    /// Upper end of the interval.
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Truncation accuracy ε [default: 1e-7].
    #[arg(long)]
    pub eps: Option<f64>,
    /// Relative eigenvalue tolerance [default: 1e-12].
    #[arg(long)]
    pub r_tol: Option<f64>,
    /// First step of the r-grid [default: 0.01·min(1, 100/r_min)].
    #[arg(long)]
    pub initial_step: Option<f64>,
    /// Continue from the last grid point in the progress log.
    #[arg(long, conflicts_with = "overwrite")]
    pub resume: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Eigenvalue record or coefficient file (JSON).
    pub record: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Eigenvalue record (JSON).
    pub record: PathBuf,
    /// `scaled`, `reference` or `x_min,x_max,y_min,y_max` [default: scaled].
    #[arg(long, allow_hyphen_values = true)]
    pub region: Option<String>,
    /// Lattice points per side [default: 64].
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BesselArgs {
    /// Spectral parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub r: f64,
    /// First abscissa (must be positive).
    #[arg(long)]
    pub x_min: f64,
    /// Last abscissa.
    #[arg(long)]
    pub x_max: f64,
    /// Number of equally spaced points.
    #[arg(long)]
    pub n_points: usize,
    /// CSV file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Replace an existing output file.
    #[arg(long)]
    pub overwrite: bool,
}

#[derive(Debug, Args)]
pub struct EisensteinArgs {
    /// Spectral parameter.
    #[arg(long)]
    pub r: f64,
    /// Number of coefficients.
    #[arg(long, default_value_t = 1000)]
    pub n_max: usize,
    /// JSON file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Replace an existing output file.
    #[arg(long)]
    pub overwrite: bool,
}

impl Cli {
    /// Settings given on the command line, to be layered over the config file.
    pub fn settings(&self) -> Settings {
        let mut s = Settings { threads: self.threads, ..Settings::default() };
        match &self.command {
            Command::Search(a) => {
                s.symmetry = a.symmetry;
                s.r_min = a.r_min;
                s.r_max = a.r_max;
                s.eps = a.eps;
                s.r_tol = a.r_tol;
                s.initial_step = a.initial_step;
                s.output_dir = a.output.output_dir.clone();
            }
            Command::Verify(a) => s.output_dir = a.output.output_dir.clone(),
            Command::Stats(a) => {
                s.region = a.region.clone();
                s.grid_n = a.grid_n;
                s.output_dir = a.output.output_dir.clone();
            }
            Command::Bessel(_) | Command::Eisenstein(_) => {}
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_reach_settings() {
        let cli = Cli::parse_from(["maass", "--threads", "2", "search", "--symmetry", "odd", "--r-min", "9", "--r-max", "10.5"]);
        let s = cli.settings();
        assert_eq!(s.threads, Some(2));
        assert_eq!(s.symmetry, Some(SymmetryChoice::Odd));
        assert_eq!((s.r_min, s.r_max), (Some(9.0), Some(10.5)));
        assert!(Cli::try_parse_from(["maass", "search", "--resume", "--overwrite"]).is_err());
        let cli = Cli::parse_from(["maass", "stats", "rec.json", "--region", "-0.1,0.1,1,1.2"]);
        assert_eq!(cli.settings().region.as_deref(), Some("-0.1,0.1,1,1.2"));
    }
}
