//! Command-line front end: design sparse co-prime geometries, analyze their
//! difference sets against the closed-form expressions, and run seeded
//! correlogram estimation experiments.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{cmd_analyze, cmd_design, cmd_estimate, CliError};
use config::{ExperimentConfig, FactorKind, Family, SubarrayParams};

#[derive(Parser)]
#[command(
    name = "exsca",
    version,
    about = "Co-prime sparse array design, difference-set analysis, and sub-Nyquist spectrum estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct element positions and export the geometry as JSON
    Design(CommonArgs),
    /// Compare brute-force weights/windows with the closed-form expressions
    Analyze(CommonArgs),
    /// Run seeded correlogram estimation trials and export the spectrum
    Estimate(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment config; flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,

    /// Array family: apca | exsca | generalized | hybrid2d
    #[arg(long)]
    family: Option<Family>,

    /// Co-prime spacing M
    #[arg(short = 'M', long)]
    m: Option<u32>,

    /// Co-prime spacing N
    #[arg(short = 'N', long)]
    n: Option<u32>,

    /// Pivot selection / shift parameter s
    #[arg(short = 's', long)]
    shift: Option<i64>,

    /// Sparsity factor (exsca and hybrid2d)
    #[arg(long = "ex")]
    sparsity: Option<u32>,

    /// Allow shifts beyond the canonical range (displaced form)
    #[arg(long)]
    displaced: bool,

    /// Generalized subarrays as elements:spacing:compression:sparsity:periods:shift,...
    #[arg(long, value_delimiter = ',')]
    subarrays: Option<Vec<SubarrayParams>>,

    /// Signal peak frequencies in units of pi, e.g. 0.1,0.3,0.6
    #[arg(long, value_delimiter = ',')]
    peaks: Option<Vec<f64>>,

    /// 2D peaks as f1:f2 pairs, e.g. 0.1:0,0.3:0
    #[arg(long, value_parser = parse_peak2d, value_delimiter = ',')]
    peaks_2d: Option<Vec<[f64; 2]>>,

    /// Per-peak amplitudes (defaults to 1)
    #[arg(long, value_delimiter = ',')]
    amplitudes: Option<Vec<f64>>,

    /// Complex Gaussian noise variance
    #[arg(long)]
    noise: Option<f64>,

    /// Spectral width of each peak band, units of pi (0 = pure tones)
    #[arg(long)]
    bandwidth: Option<f64>,

    /// Snapshots per trial (one co-prime period each)
    #[arg(short = 'K', long)]
    snapshots: Option<usize>,

    /// Number of independent trials
    #[arg(long)]
    trials: Option<usize>,

    /// Base seed for reproducible experiments
    #[arg(long)]
    seed: Option<u64>,

    /// Frequency grid size over [0, 2)
    #[arg(long)]
    grid: Option<usize>,

    /// Per-dimension grid size for 2D spectra
    #[arg(long)]
    grid_2d: Option<usize>,

    /// Peak search band, e.g. 0,1
    #[arg(long, value_delimiter = ',')]
    band: Option<Vec<f64>>,

    /// Window scale constant (divides raw bias windows)
    #[arg(long)]
    scale: Option<f64>,

    /// First 2D factor: exsca | nyquist
    #[arg(long)]
    dim1: Option<FactorKind>,

    /// Second 2D factor: exsca | nyquist
    #[arg(long)]
    dim2: Option<FactorKind>,

    /// Output directory (default: $EXSCA_OUT_DIR or ./out)
    #[arg(long)]
    out_dir: Option<PathBuf>,

    /// Exit with code 3 when the closed form is inapplicable
    #[arg(long)]
    strict: bool,
}

fn parse_peak2d(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err(format!("2D peak '{s}' must be f1:f2"));
    }
    let f1 = parts[0].parse().map_err(|e| format!("'{}': {e}", parts[0]))?;
    let f2 = parts[1].parse().map_err(|e| format!("'{}': {e}", parts[1]))?;
    Ok([f1, f2])
}

impl CommonArgs {
    fn into_config(self) -> Result<ExperimentConfig, CliError> {
        let from_file = self.config.is_some();
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Config(format!("cannot read {}: {e}", path.display()))
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::Config(format!("invalid config {}: {e}", path.display()))
                })?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.family {
            cfg.family = v;
        }
        if let Some(v) = self.m {
            cfg.m = v;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.shift {
            cfg.shift = v;
        }
        if let Some(v) = self.sparsity {
            cfg.sparsity = v;
        }
        if self.displaced {
            cfg.displaced = true;
        }
        if let Some(v) = self.subarrays {
            cfg.subarrays = v;
        }
        if let Some(v) = self.peaks {
            cfg.peaks = v;
        }
        if let Some(v) = self.peaks_2d {
            cfg.peaks_2d = v;
        }
        if let Some(v) = self.amplitudes {
            cfg.amplitudes = Some(v);
        }
        if let Some(v) = self.noise {
            cfg.noise_variance = v;
        }
        if let Some(v) = self.bandwidth {
            cfg.bandwidth = v;
        }
        if let Some(v) = self.snapshots {
            cfg.snapshots = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.grid {
            cfg.grid = v;
        }
        if let Some(v) = self.grid_2d {
            cfg.grid_2d = v;
        }
        if let Some(v) = self.band {
            if v.len() != 2 || v[0] >= v[1] {
                return Err(CliError::Config("band must be lo,hi with lo < hi".into()));
            }
            cfg.band = [v[0], v[1]];
        }
        if let Some(v) = self.scale {
            if v <= 0.0 {
                return Err(CliError::Config("scale must be positive".into()));
            }
            cfg.scale = v;
        }
        if let Some(v) = self.dim1 {
            cfg.dim1 = v;
        }
        if let Some(v) = self.dim2 {
            cfg.dim2 = v;
        }
        if let Some(v) = self.out_dir {
            cfg.out_dir = Some(v);
        }
        if self.strict {
            cfg.strict = true;
        }
        if !from_file {
            // without a config file the geometry must be spelled out
            if self.family.is_none() {
                return Err(CliError::Config("--family is required".into()));
            }
            match cfg.family {
                Family::Generalized => {
                    if cfg.subarrays.is_empty() {
                        return Err(CliError::Config(
                            "--subarrays is required for the generalized family".into(),
                        ));
                    }
                }
                _ => {
                    if self.m.is_none() || self.n.is_none() {
                        return Err(CliError::Config("-M and -N are required".into()));
                    }
                }
            }
        }
        validate(&cfg)?;
        Ok(cfg)
    }
}

fn validate(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if cfg.grid < 8 || cfg.grid_2d < 8 {
        return Err(CliError::Config("grid sizes must be at least 8".into()));
    }
    if cfg.snapshots == 0 || cfg.trials == 0 {
        return Err(CliError::Config(
            "snapshots and trials must be positive".into(),
        ));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Design(args) => args.into_config().and_then(|cfg| cmd_design(&cfg)),
        Command::Analyze(args) => args.into_config().and_then(|cfg| cmd_analyze(&cfg)),
        Command::Estimate(args) => args.into_config().and_then(|cfg| cmd_estimate(&cfg)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
