//! Synthetic signals, sparse sampling, and correlogram power spectra.
//!
//! The signal model is a sum of constant-amplitude complex exponentials
//! whose phases are redrawn independently for every snapshot (one co-prime
//! period), optionally plus circular complex Gaussian noise. Its theoretical
//! autocorrelation is `sum_k a_k^2 e^{j pi f_k l}`, which makes every
//! estimator here checkable against a closed form.
//!
//! Autocorrelation estimates average lag products over the element pairs
//! the array provides: `r(l) = (1/(K z(l))) sum_k sum_{a-b=l} x_k(a)
//! conj(x_k(b))`. Lags with `z(l) = 0` (holes) are simply absent and
//! contribute nothing to the correlogram sum; they are never interpolated.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::diffset::WeightFunction;
use crate::error::{Error, Result};
use crate::geometry::ElementSet;
use crate::rng::SplitMix64;

/// Stream tag so noise draws never disturb the phase sequence.
const NOISE_STREAM: u64 = 0x6e6f_6973;

/// A multi-tone random-phase process.
///
/// With a nonzero `bandwidth`, each tone becomes a frequency band: every
/// snapshot draws the tone's frequency uniformly from
/// `[f_k - bandwidth/2, f_k + bandwidth/2]`, turning the line spectrum into
/// narrow bands while keeping the autocorrelation in closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalModel {
    peaks: Vec<f64>,
    amplitudes: Vec<f64>,
    noise_variance: f64,
    bandwidth: f64,
    seed: u64,
}

impl SignalModel {
    /// Unit-amplitude, noise-free model. Peak frequencies are in units of
    /// pi and must lie strictly inside the Nyquist band (0, 1).
    pub fn new(peaks: Vec<f64>, seed: u64) -> Result<Self> {
        if peaks.is_empty() {
            return Err(Error::Empty { what: "peak list" });
        }
        if peaks.iter().any(|&f| !(0.0..1.0).contains(&f) || f == 0.0) {
            return Err(Error::InvalidParameter(
                "peak frequencies must lie strictly inside (0, 1)".into(),
            ));
        }
        let amplitudes = vec![1.0; peaks.len()];
        Ok(Self {
            peaks,
            amplitudes,
            noise_variance: 0.0,
            bandwidth: 0.0,
            seed,
        })
    }

    pub fn with_amplitudes(mut self, amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != self.peaks.len() {
            return Err(Error::LengthMismatch {
                left: amplitudes.len(),
                right: self.peaks.len(),
            });
        }
        if amplitudes.iter().any(|&a| a <= 0.0) {
            return Err(Error::InvalidParameter(
                "amplitudes must be positive".into(),
            ));
        }
        self.amplitudes = amplitudes;
        Ok(self)
    }

    pub fn with_noise(mut self, variance: f64) -> Result<Self> {
        if variance < 0.0 {
            return Err(Error::InvalidParameter(
                "noise variance must be nonnegative".into(),
            ));
        }
        self.noise_variance = variance;
        Ok(self)
    }

    /// Spread each spectral line into a band of the given width (units of
    /// pi). Zero keeps pure tones.
    pub fn with_bandwidth(mut self, bandwidth: f64) -> Result<Self> {
        if bandwidth < 0.0 {
            return Err(Error::InvalidParameter(
                "bandwidth must be nonnegative".into(),
            ));
        }
        self.bandwidth = bandwidth;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn peaks(&self) -> &[f64] {
        &self.peaks
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Theoretical autocorrelation of the model at lag `l`. A nonzero
    /// bandwidth multiplies each tone's term by sinc(bandwidth * l / 2).
    pub fn theoretical_autocorrelation(&self, l: i64) -> Complex64 {
        let spread = if self.bandwidth > 0.0 && l != 0 {
            let h = PI * self.bandwidth * l as f64 / 2.0;
            h.sin() / h
        } else {
            1.0
        };
        self.peaks
            .iter()
            .zip(&self.amplitudes)
            .map(|(&f, &a)| Complex64::from_polar(a * a * spread, PI * f * l as f64))
            .sum()
    }
}

/// Generate `total_length` Nyquist-rate samples. Phases are redrawn per
/// snapshot of `period` samples; the sequence is a pure function of the
/// model seed.
pub fn generate_signal(
    model: &SignalModel,
    period: usize,
    total_length: usize,
) -> Result<Vec<Complex64>> {
    if period == 0 {
        return Err(Error::InvalidParameter("period must be positive".into()));
    }
    let mut phase_rng = SplitMix64::new(model.seed);
    let mut noise_rng = SplitMix64::derive(model.seed, NOISE_STREAM);
    let base_omegas: Vec<f64> = model.peaks.iter().map(|&f| PI * f).collect();
    let noise_scale = (model.noise_variance / 2.0).sqrt();

    let mut signal = Vec::with_capacity(total_length);
    let snapshots = total_length.div_ceil(period);
    for k in 0..snapshots {
        let phases: Vec<f64> = base_omegas.iter().map(|_| phase_rng.next_phase()).collect();
        let omegas: Vec<f64> = if model.bandwidth > 0.0 {
            base_omegas
                .iter()
                .map(|&w| w + PI * model.bandwidth * (phase_rng.next_f64() - 0.5))
                .collect()
        } else {
            base_omegas.clone()
        };
        let start = k * period;
        let stop = (start + period).min(total_length);
        for t in start..stop {
            let mut x = Complex64::new(0.0, 0.0);
            for ((&omega, &amp), &phase) in omegas.iter().zip(&model.amplitudes).zip(&phases) {
                let arg = omega * t as f64 + phase;
                x += Complex64::new(amp * arg.cos(), amp * arg.sin());
            }
            if noise_scale > 0.0 {
                x += Complex64::new(
                    noise_scale * noise_rng.next_gaussian(),
                    noise_scale * noise_rng.next_gaussian(),
                );
            }
            signal.push(x);
        }
    }
    Ok(signal)
}

/// Samples of a signal at the pattern positions, one row per snapshot.
#[derive(Debug, Clone)]
pub struct SnapshotSet {
    period: usize,
    positions: Vec<i64>,
    snapshots: Vec<Vec<Complex64>>,
}

impl SnapshotSet {
    pub fn count(&self) -> usize {
        self.snapshots.len()
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn snapshot(&self, k: usize) -> &[Complex64] {
        &self.snapshots[k]
    }
}

/// Extract `snapshots` snapshots: snapshot `k` holds the signal at
/// `{p + k * period : p in union}`.
pub fn sample_pattern(
    signal: &[Complex64],
    union: &ElementSet,
    period: usize,
    snapshots: usize,
) -> Result<SnapshotSet> {
    if snapshots == 0 {
        return Err(Error::InvalidParameter(
            "need at least one snapshot".into(),
        ));
    }
    for &p in union.positions() {
        if p < 0 || p >= period as i64 {
            return Err(Error::PositionOutsidePeriod {
                position: p,
                period,
            });
        }
    }
    let needed = snapshots * period;
    if signal.len() < needed {
        return Err(Error::SignalTooShort {
            needed,
            got: signal.len(),
        });
    }
    let rows = (0..snapshots)
        .map(|k| {
            union
                .positions()
                .iter()
                .map(|&p| signal[k * period + p as usize])
                .collect()
        })
        .collect();
    Ok(SnapshotSet {
        period,
        positions: union.positions().to_vec(),
        snapshots: rows,
    })
}

/// Lag-domain autocorrelation estimate over the lags the pattern supports.
#[derive(Debug, Clone)]
pub struct LagEstimate {
    values: BTreeMap<i64, Complex64>,
    weights: WeightFunction,
}

impl LagEstimate {
    pub fn value(&self, l: i64) -> Option<Complex64> {
        self.values.get(&l).copied()
    }

    /// Available lags in ascending order.
    pub fn lags(&self) -> impl Iterator<Item = i64> + '_ {
        self.values.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.values.iter().map(|(&l, &v)| (l, v))
    }

    pub fn weights(&self) -> &WeightFunction {
        &self.weights
    }

    /// Feed a weight function through as if it were a lag estimate; the
    /// correlogram of this equals the weight transform window.
    pub fn from_weights(z: &WeightFunction) -> Self {
        let values = z
            .iter()
            .filter(|&(_, c)| c > 0)
            .map(|(l, c)| (l, Complex64::new(c as f64, 0.0)))
            .collect();
        Self {
            values,
            weights: z.clone(),
        }
    }
}

/// Average lag products over snapshots and contributor pairs:
/// `r(l) = (1/(K z(l))) sum_k sum_{(a,b): a-b=l} x_k(a) conj(x_k(b))`.
pub fn estimate_autocorrelation(snap: &SnapshotSet, z: &WeightFunction) -> Result<LagEstimate> {
    let p = snap.positions().len();
    if z.z(0) != p as u64 {
        return Err(Error::WeightMismatch {
            z0: z.z(0),
            elements: p,
        });
    }
    let mut acc: BTreeMap<i64, Complex64> = BTreeMap::new();
    for k in 0..snap.count() {
        let row = snap.snapshot(k);
        for i in 0..p {
            for j in 0..p {
                let l = snap.positions()[i] - snap.positions()[j];
                *acc.entry(l).or_insert(Complex64::new(0.0, 0.0)) += row[i] * row[j].conj();
            }
        }
    }
    let k_count = snap.count() as f64;
    let values = acc
        .into_iter()
        .map(|(l, sum)| (l, sum / (k_count * z.z(l) as f64)))
        .collect();
    Ok(LagEstimate {
        values,
        weights: z.clone(),
    })
}

/// Power spectrum on the uniform grid `f_k = 2k / grid_size`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid_size: usize,
    power: Vec<f64>,
}

impl Spectrum {
    pub fn from_power(power: Vec<f64>) -> Self {
        let grid_size = power.len();
        Self { grid_size, power }
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn freq(&self, k: usize) -> f64 {
        2.0 * k as f64 / self.grid_size as f64
    }

    /// CSV export with header `f,power`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("f,power\n");
        for (k, v) in self.power.iter().enumerate() {
            let _ = writeln!(out, "{},{v}", self.freq(k));
        }
        out
    }
}

fn grid_phasor(k: usize, grid: usize, lag: i64) -> Complex64 {
    // e^{-j pi f_k l} with the angle reduced exactly in integers
    let g = grid as i64;
    let steps = (k as i64 * 2 * lag).rem_euclid(2 * g);
    let theta = PI * steps as f64 / g as f64;
    Complex64::new(theta.cos(), -theta.sin())
}

fn correlogram_complex(est: &LagEstimate, grid_size: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); grid_size];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut sum = Complex64::new(0.0, 0.0);
        for (l, r) in est.iter() {
            sum += r * grid_phasor(k, grid_size, l);
        }
        *slot = sum;
    }
    out
}

/// Correlogram estimate `P(f) = Re sum_l r(l) e^{-j pi f l}` over the
/// available lags; holes contribute zero.
pub fn correlogram(est: &LagEstimate, grid_size: usize) -> Spectrum {
    let power = correlogram_complex(est, grid_size)
        .into_iter()
        .map(|c| c.re)
        .collect();
    Spectrum::from_power(power)
}

/// Largest imaginary residue of the correlogram sum before the real
/// projection, relative to the peak power. Conjugate symmetry of the lag
/// estimate keeps this at rounding level.
pub fn correlogram_imag_residual(est: &LagEstimate, grid_size: usize) -> f64 {
    let complex = correlogram_complex(est, grid_size);
    let scale = complex
        .iter()
        .map(|c| c.re.abs())
        .fold(f64::MIN_POSITIVE, f64::max);
    complex.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / scale
}

/// Strict local maxima of the spectrum with frequency in `(f_lo, f_hi)`,
/// as `(frequency, power)` pairs in ascending frequency.
pub fn local_maxima_in_band(spec: &Spectrum, f_lo: f64, f_hi: f64) -> Vec<(f64, f64)> {
    let v = spec.power();
    let mut maxima = Vec::new();
    for i in 1..v.len().saturating_sub(1) {
        let f = spec.freq(i);
        if f <= f_lo || f >= f_hi {
            continue;
        }
        if v[i] > v[i - 1] && v[i] >= v[i + 1] {
            maxima.push((f, v[i]));
        }
    }
    maxima
}

/// The `count` largest local maxima inside the band, in ascending
/// frequency order.
pub fn find_peaks_in_band(
    spec: &Spectrum,
    count: usize,
    f_lo: f64,
    f_hi: f64,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidParameter(
            "must request at least one peak".into(),
        ));
    }
    let mut maxima = local_maxima_in_band(spec, f_lo, f_hi);
    if maxima.len() < count {
        return Err(Error::NotEnoughPeaks {
            requested: count,
            found: maxima.len(),
            locations: maxima.iter().map(|&(f, _)| f).collect(),
        });
    }
    maxima.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let mut peaks: Vec<f64> = maxima[..count].iter().map(|&(f, _)| f).collect();
    peaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(peaks)
}

/// Peaks over the Nyquist band (0, 1).
pub fn find_peaks(spec: &Spectrum, count: usize) -> Result<Vec<f64>> {
    find_peaks_in_band(spec, count, 0.0, 1.0)
}

/// Mean absolute difference between two sorted, equally long location
/// lists.
pub fn peak_error(found: &[f64], truth: &[f64]) -> Result<f64> {
    if found.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: found.len(),
            right: truth.len(),
        });
    }
    let total: f64 = found
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(total / found.len() as f64)
}

/// Trial-level error that tolerates merged peaks: with a full set of found
/// peaks this is [`peak_error`]; with fewer (the estimator failed to
/// resolve them) every true peak is charged its distance to the nearest
/// found maximum, and an empty list costs the whole band.
fn trial_error(found: &[f64], truth: &[f64], band: (f64, f64)) -> f64 {
    if found.len() == truth.len() {
        return peak_error(found, truth).expect("lengths match");
    }
    if found.is_empty() {
        return band.1 - band.0;
    }
    let total: f64 = truth
        .iter()
        .map(|t| {
            found
                .iter()
                .map(|f| (f - t).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / truth.len() as f64
}

/// A seeded multi-trial estimation experiment on one sampling pattern.
#[derive(Debug, Clone)]
pub struct EstimationRun {
    pub union: ElementSet,
    pub weights: WeightFunction,
    pub period: usize,
    pub model: SignalModel,
    pub snapshots: usize,
    pub trials: usize,
    pub grid_size: usize,
    /// Band searched for peaks, in units of pi.
    pub band: (f64, f64),
}

/// Aggregate outcome of an [`EstimationRun`].
#[derive(Debug, Clone)]
pub struct EstimationReport {
    /// Per-trial mean absolute peak location error.
    pub per_trial_errors: Vec<f64>,
    /// Average of the per-trial errors.
    pub mean_error: f64,
    /// Power spectrum averaged over all trials.
    pub mean_spectrum: Spectrum,
    /// Peaks of the trial-averaged spectrum, when enough maxima exist.
    pub mean_spectrum_peaks: Vec<f64>,
}

impl EstimationRun {
    /// Run all trials (trial `t` reseeds the model deterministically from
    /// the base seed) and aggregate errors and spectra.
    pub fn execute(&self) -> Result<EstimationReport> {
        let truth = self.model.peaks().to_vec();
        let outcomes: Vec<(f64, Vec<f64>)> = (0..self.trials)
            .into_par_iter()
            .map(|trial| -> Result<(f64, Vec<f64>)> {
                let seed = SplitMix64::derive(self.model.seed(), trial as u64).next_u64();
                let model = self.model.clone().with_seed(seed);
                let signal = generate_signal(&model, self.period, self.snapshots * self.period)?;
                let snap = sample_pattern(&signal, &self.union, self.period, self.snapshots)?;
                let est = estimate_autocorrelation(&snap, &self.weights)?;
                let spectrum = correlogram(&est, self.grid_size);
                let mut maxima = local_maxima_in_band(&spectrum, self.band.0, self.band.1);
                maxima.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
                let mut found: Vec<f64> = maxima
                    .iter()
                    .take(truth.len())
                    .map(|&(f, _)| f)
                    .collect();
                found.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let error = trial_error(&found, &truth, self.band);
                Ok((error, spectrum.power().to_vec()))
            })
            .collect::<Result<Vec<_>>>()?;

        let per_trial_errors: Vec<f64> = outcomes.iter().map(|(e, _)| *e).collect();
        let mean_error = per_trial_errors.iter().sum::<f64>() / self.trials.max(1) as f64;
        let mut mean_power = vec![0.0; self.grid_size];
        for (_, power) in &outcomes {
            for (acc, &v) in mean_power.iter_mut().zip(power) {
                *acc += v;
            }
        }
        for v in &mut mean_power {
            *v /= self.trials.max(1) as f64;
        }
        let mean_spectrum = Spectrum::from_power(mean_power);
        let mean_spectrum_peaks =
            find_peaks_in_band(&mean_spectrum, truth.len(), self.band.0, self.band.1)
                .unwrap_or_default();
        Ok(EstimationReport {
            per_trial_errors,
            mean_error,
            mean_spectrum,
            mean_spectrum_peaks,
        })
    }
}
