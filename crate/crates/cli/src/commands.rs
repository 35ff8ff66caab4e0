//! The three pipeline commands. Each is a thin composition of library
//! operations; everything they compute is available programmatically.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use exsca_core::closedform::{
    bias_closed_apca, bias_closed_exsca, bias_closed_generalized, relative_amplitude,
    weight_closed_apca, weight_closed_exsca, weight_closed_generalized, BiasWindow,
};
use exsca_core::diffset::{continuous_range, lag_statistics, weight_function, WeightFunction};
use exsca_core::geometry::{GeneralizedConfig, GeometryReport, Overlap};
use exsca_core::multidim::{
    find_peaks_2d, Estimation2dRun, Pattern1d, PatternNd, Signal2dModel,
};
use exsca_core::spectral::{EstimationRun, SignalModel};
use exsca_core::Error as CoreError;

use crate::config::{ExperimentConfig, Family, FactorKind};

/// Command failure, carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration (exit 2).
    Config(String),
    /// Closed form inapplicable under --strict (exit 3).
    Inapplicable(String),
    /// Anything else, e.g. I/O (exit 1).
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Inapplicable(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Inapplicable(m) => write!(f, "closed form inapplicable: {m}"),
            CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

pub type CmdResult = Result<(), CliError>;

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Other(format!("serialization failed: {e}")))?;
    write_file(dir, name, &(text + "\n"))
}

fn family_params(cfg: &ExperimentConfig) -> serde_json::Value {
    match cfg.family {
        Family::Apca => json!({"M": cfg.m, "N": cfg.n, "s": cfg.shift, "displaced": cfg.displaced}),
        Family::Exsca => json!({
            "M": cfg.m, "N": cfg.n, "s": cfg.shift, "ex": cfg.sparsity,
            "displaced": cfg.displaced,
        }),
        Family::Generalized => json!({ "subarrays": cfg.subarrays }),
        Family::Hybrid2d => json!({
            "M": cfg.m, "N": cfg.n, "s": cfg.shift, "ex": cfg.sparsity,
            "dim1": cfg.dim1, "dim2": cfg.dim2,
        }),
    }
}

/// `design`: construct the geometry and export it as JSON.
pub fn cmd_design(cfg: &ExperimentConfig) -> CmdResult {
    let (layout, _) = match cfg.family {
        Family::Hybrid2d => {
            return Err(CliError::Config(
                "design describes 1D families; use estimate for hybrid2d".into(),
            ))
        }
        _ => cfg.layout_and_period()?,
    };
    let pivot = match cfg.family {
        Family::Apca => cfg.apca()?.pivot(),
        Family::Exsca => cfg.exsca()?.pivot(),
        _ => None,
    };
    let family = format!("{:?}", cfg.family).to_lowercase();
    let report = GeometryReport::new(&family, family_params(cfg), &layout, pivot);
    let out = cfg.resolve_out_dir();
    let path = write_json(&out, "geometry.json", &report)?;
    println!(
        "{}: {} elements, pivot {:?}, {} overlap(s) -> {}",
        family,
        report.union.len(),
        report.pivot,
        report.overlaps.len(),
        path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct ComparisonReport {
    family: String,
    params: serde_json::Value,
    elements: usize,
    unique_count: usize,
    continuous_range: i64,
    extremes: (i64, i64),
    holes: usize,
    relative_amplitude: Option<f64>,
    closed_form_applicable: bool,
    overlaps: Vec<Overlap>,
    /// Peak-normalized deviation between closed-form and simulated windows.
    max_abs_dev: Option<f64>,
    weight_routes_equal: Option<bool>,
}

/// Closed-form routes for one configuration, when applicable.
fn closed_routes(
    cfg: &ExperimentConfig,
) -> Result<Result<(WeightFunction, BiasWindow), Vec<Overlap>>, CliError> {
    let gen_routes = |gen: &GeneralizedConfig| match (
        weight_closed_generalized(gen),
        bias_closed_generalized(gen, cfg.grid),
    ) {
        (Ok(w), Ok(b)) => Ok(Ok((w, b))),
        _ => {
            let layout = exsca_core::geometry::positions_generalized(gen);
            Ok(Err(layout.overlaps()))
        }
    };
    match cfg.family {
        Family::Apca => {
            let apca = cfg.apca()?;
            if apca.shift() < cfg.n as i64 {
                Ok(Ok((
                    weight_closed_apca(cfg.m, cfg.n, cfg.shift)?,
                    bias_closed_apca(cfg.m, cfg.n, cfg.shift, cfg.grid)?,
                )))
            } else {
                // shifts beyond the canonical range go through the
                // generalized expressions
                gen_routes(&GeneralizedConfig::from(&apca))
            }
        }
        Family::Exsca => {
            let ex = cfg.exsca()?;
            if ex.sparsity() == 2 && ex.shift() < 2 * cfg.n as i64 {
                Ok(Ok((
                    weight_closed_exsca(cfg.m, cfg.n, cfg.shift, ex.pivot())?,
                    bias_closed_exsca(cfg.m, cfg.n, cfg.shift, ex.pivot(), cfg.grid)?,
                )))
            } else {
                // other sparsity factors and displaced forms go through the
                // generalized expressions
                gen_routes(&GeneralizedConfig::from(&ex))
            }
        }
        Family::Generalized => gen_routes(&cfg.generalized()?),
        Family::Hybrid2d => Err(CliError::Config(
            "analyze describes 1D families; use estimate for hybrid2d".into(),
        )),
    }
}

/// `analyze`: brute-force difference-set analytics next to the closed-form
/// expressions, with CSV window exports and a JSON comparison record.
pub fn cmd_analyze(cfg: &ExperimentConfig) -> CmdResult {
    let (layout, _) = cfg.layout_and_period()?;
    let z = weight_function(&layout.union);
    let stats = lag_statistics(&z);
    let simulated = BiasWindow::from_weights(&z, cfg.grid).scaled(cfg.scale);
    let out = cfg.resolve_out_dir();

    write_file(&out, "weights.csv", &z.to_csv())?;
    write_file(&out, "bias_simulated.csv", &simulated.to_csv())?;
    write_file(
        &out,
        "bias_simulated_normalized.csv",
        &simulated.peak_normalized().to_csv(),
    )?;

    let routes = closed_routes(cfg)?;
    let (applicable, overlaps, max_abs_dev, weights_equal) = match routes {
        Ok((zc, wc)) => {
            let wc = wc.scaled(cfg.scale);
            write_file(&out, "bias_theory.csv", &wc.to_csv())?;
            write_file(
                &out,
                "bias_theory_normalized.csv",
                &wc.peak_normalized().to_csv(),
            )?;
            let dev = wc
                .peak_normalized()
                .max_abs_deviation(&simulated.peak_normalized())?;
            (true, layout.overlaps(), Some(dev), Some(zc == z))
        }
        Err(overlaps) => (false, overlaps, None, None),
    };

    let family = format!("{:?}", cfg.family).to_lowercase();
    let report = ComparisonReport {
        family: family.clone(),
        params: family_params(cfg),
        elements: layout.union.len(),
        unique_count: stats.unique_count,
        continuous_range: continuous_range(&z),
        extremes: stats.extremes,
        holes: stats.holes.len(),
        relative_amplitude: relative_amplitude(&simulated).ok(),
        closed_form_applicable: applicable,
        overlaps,
        max_abs_dev,
        weight_routes_equal: weights_equal,
    };
    let path = write_json(&out, "comparison.json", &report)?;
    println!(
        "{}: {} unique lags, continuous range +/-{}, closed form {} -> {}",
        family,
        report.unique_count,
        report.continuous_range,
        if applicable { "ok" } else { "inapplicable" },
        path.display()
    );
    if !applicable && cfg.strict {
        return Err(CliError::Inapplicable(format!(
            "{} overlapping position(s)",
            report.overlaps.len()
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct PeaksReport {
    family: String,
    params: serde_json::Value,
    seed: u64,
    snapshots: usize,
    trials: usize,
    truth: Vec<f64>,
    peaks: Vec<f64>,
    mean_error: f64,
    per_trial_errors: Vec<f64>,
}

#[derive(Serialize)]
struct Peaks2dReport {
    family: String,
    params: serde_json::Value,
    seed: u64,
    snapshots: usize,
    trials: usize,
    truth: Vec<[f64; 2]>,
    peaks: Vec<[f64; 2]>,
    mean_error: f64,
}

fn build_model(cfg: &ExperimentConfig) -> Result<SignalModel, CliError> {
    let mut model = SignalModel::new(cfg.peaks.clone(), cfg.seed)?;
    if let Some(amps) = &cfg.amplitudes {
        model = model.with_amplitudes(amps.clone())?;
    }
    model = model
        .with_noise(cfg.noise_variance)?
        .with_bandwidth(cfg.bandwidth)?;
    Ok(model)
}

fn factor(kind: FactorKind, cfg: &ExperimentConfig) -> Result<Pattern1d, CliError> {
    let ex = cfg.exsca()?;
    let period = ex.period();
    match kind {
        FactorKind::Nyquist => Ok(Pattern1d::nyquist(period)?),
        FactorKind::Exsca => {
            let layout = exsca_core::geometry::positions_exsca(&ex);
            Ok(Pattern1d::from_union(&layout.union, period)?)
        }
    }
}

/// `estimate`: seeded multi-trial correlogram estimation; emits the
/// trial-averaged spectrum and detected peaks.
pub fn cmd_estimate(cfg: &ExperimentConfig) -> CmdResult {
    let out = cfg.resolve_out_dir();
    let family = format!("{:?}", cfg.family).to_lowercase();
    write_json(&out, "config.json", cfg)?;
    if cfg.family == Family::Hybrid2d {
        let pattern = PatternNd::new(vec![factor(cfg.dim1, cfg)?, factor(cfg.dim2, cfg)?])?;
        let peaks: Vec<(f64, f64)> = cfg.peaks_2d.iter().map(|p| (p[0], p[1])).collect();
        let weights = exsca_core::multidim::weight_nd(&pattern);
        write_file(&out, "weights2d.csv", &weights.to_csv_triples()?)?;
        let run = Estimation2dRun {
            pattern,
            model: Signal2dModel::new(peaks.clone(), cfg.seed)?,
            snapshots: cfg.snapshots,
            trials: cfg.trials,
            grid_size: cfg.grid_2d,
        };
        let spectrum = run.execute()?;
        write_file(&out, "spectrum2d.csv", &spectrum.to_csv_triples())?;
        write_file(&out, "spectrum2d.json", &(spectrum.to_json_matrix() + "\n"))?;
        let found = find_peaks_2d(&spectrum, peaks.len()).unwrap_or_default();
        let mean_error = if found.is_empty() {
            f64::NAN
        } else {
            peaks
                .iter()
                .map(|t| {
                    found
                        .iter()
                        .map(|f| ((f.0 - t.0).powi(2) + (f.1 - t.1).powi(2)).sqrt())
                        .fold(f64::INFINITY, f64::min)
                })
                .sum::<f64>()
                / peaks.len() as f64
        };
        let report = Peaks2dReport {
            family,
            params: family_params(cfg),
            seed: cfg.seed,
            snapshots: cfg.snapshots,
            trials: cfg.trials,
            truth: cfg.peaks_2d.clone(),
            peaks: found.iter().map(|&(a, b)| [a, b]).collect(),
            mean_error,
        };
        let path = write_json(&out, "peaks.json", &report)?;
        println!(
            "hybrid2d: {} peak(s) found, mean error {:.4} -> {}",
            report.peaks.len(),
            report.mean_error,
            path.display()
        );
        return Ok(());
    }

    let (layout, period) = cfg.layout_and_period()?;
    let run = EstimationRun {
        weights: weight_function(&layout.union),
        union: layout.union,
        period,
        model: build_model(cfg)?,
        snapshots: cfg.snapshots,
        trials: cfg.trials,
        grid_size: cfg.grid,
        band: (cfg.band[0], cfg.band[1]),
    };
    let report = run.execute()?;
    write_file(&out, "spectrum.csv", &report.mean_spectrum.to_csv())?;
    let peaks_report = PeaksReport {
        family: family.clone(),
        params: family_params(cfg),
        seed: cfg.seed,
        snapshots: cfg.snapshots,
        trials: cfg.trials,
        truth: cfg.peaks.clone(),
        peaks: report.mean_spectrum_peaks.clone(),
        mean_error: report.mean_error,
        per_trial_errors: report.per_trial_errors.clone(),
    };
    let path = write_json(&out, "peaks.json", &peaks_report)?;
    println!(
        "{}: mean peak error {:.4} over {} trial(s) -> {}",
        family,
        report.mean_error,
        cfg.trials,
        path.display()
    );
    Ok(())
}
