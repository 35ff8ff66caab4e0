//! Separable multidimensional sampling patterns and 2D estimation.
//!
//! A multidimensional pattern is the outer product of 1D patterns, so its
//! weight function is the outer product of the 1D weight functions and its
//! bias window the outer product of the 1D windows. Both identities are
//! exercised against direct computation: [`weight_nd`] autocorrelates the
//! pattern itself and [`bias_nd_from_weight`] transforms that weight, while
//! [`weight_outer`] and [`bias_nd`] build the same objects from 1D factors.
//!
//! Mixing factor families (a Nyquist comb in one dimension, a sparse
//! co-prime pattern in another) gives the hybrid patterns.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::closedform::BiasWindow;
use crate::diffset::{weight_function, WeightFunction};
use crate::error::{Error, Result};
use crate::geometry::ElementSet;
use crate::rng::SplitMix64;

/// A binary sampling function over one period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern1d {
    indicator: Vec<bool>,
    label: String,
}

impl Pattern1d {
    /// Dense sampling: all ones.
    pub fn nyquist(length: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::Empty { what: "pattern" });
        }
        Ok(Self {
            indicator: vec![true; length],
            label: "nyquist".into(),
        })
    }

    /// Sparse sampling at the union positions of an array.
    pub fn from_union(union: &ElementSet, period: usize) -> Result<Self> {
        let mut indicator = vec![false; period];
        for &p in union.positions() {
            if p < 0 || p >= period as i64 {
                return Err(Error::PositionOutsidePeriod {
                    position: p,
                    period,
                });
            }
            indicator[p as usize] = true;
        }
        Ok(Self {
            indicator,
            label: "sparse".into(),
        })
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.into();
        self
    }

    pub fn len(&self) -> usize {
        self.indicator.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indicator.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn indicator(&self) -> &[bool] {
        &self.indicator
    }

    /// Indices carrying a sample.
    pub fn positions(&self) -> Vec<i64> {
        self.indicator
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as i64)
            .collect()
    }

    pub fn count_ones(&self) -> usize {
        self.indicator.iter().filter(|&&b| b).count()
    }

    /// 1D weight function of this pattern.
    pub fn weight(&self) -> WeightFunction {
        let set = ElementSet::from_positions(self.positions()).expect("pattern has a sample");
        weight_function(&set)
    }
}

/// Outer product of 1D patterns: `p(k_1, ..) = prod_i p_i(k_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternNd {
    factors: Vec<Pattern1d>,
}

impl PatternNd {
    pub fn new(factors: Vec<Pattern1d>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::TooFewSubarrays {
                min: 2,
                got: factors.len(),
            });
        }
        Ok(Self { factors })
    }

    pub fn dims(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Pattern1d] {
        &self.factors
    }

    /// All sample coordinates (cartesian product of factor positions).
    pub fn positions(&self) -> Vec<Vec<i64>> {
        let per_dim: Vec<Vec<i64>> = self.factors.iter().map(|f| f.positions()).collect();
        let mut out: Vec<Vec<i64>> = vec![vec![]];
        for dim in &per_dim {
            let mut next = Vec::with_capacity(out.len() * dim.len());
            for prefix in &out {
                for &p in dim {
                    let mut row = prefix.clone();
                    row.push(p);
                    next.push(row);
                }
            }
            out = next;
        }
        out
    }
}

/// A dense nonnegative-count array over a centered lag box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdWeight {
    /// Per-dimension maximum lag magnitude.
    offsets: Vec<i64>,
    shape: Vec<usize>,
    data: Vec<u64>,
}

impl NdWeight {
    fn index(&self, lags: &[i64]) -> Option<usize> {
        if lags.len() != self.offsets.len() {
            return None;
        }
        let mut idx = 0usize;
        for (d, (&l, &off)) in lags.iter().zip(&self.offsets).enumerate() {
            if l.abs() > off {
                return None;
            }
            idx = idx * self.shape[d] + (l + off) as usize;
        }
        Some(idx)
    }

    pub fn dims(&self) -> usize {
        self.offsets.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    /// Count at a lag tuple (0 outside the box).
    pub fn z(&self, lags: &[i64]) -> u64 {
        self.index(lags).map_or(0, |i| self.data[i])
    }

    pub fn total(&self) -> u64 {
        self.data.iter().sum()
    }

    /// CSV export as `l1,l2,count` triples (2D only).
    pub fn to_csv_triples(&self) -> Result<String> {
        if self.dims() != 2 {
            return Err(Error::InvalidParameter(
                "triple export is for 2D weights".into(),
            ));
        }
        let mut out = String::from("l1,l2,count\n");
        for (lags, c) in self.iter() {
            let _ = writeln!(out, "{},{},{c}", lags[0], lags[1]);
        }
        Ok(out)
    }

    /// Iterate `(lag tuple, count)` over the whole box.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, u64)> + '_ {
        let shape = self.shape.clone();
        let offsets = self.offsets.clone();
        self.data.iter().enumerate().map(move |(flat, &c)| {
            let mut rem = flat;
            let mut lags = vec![0i64; shape.len()];
            for d in (0..shape.len()).rev() {
                lags[d] = (rem % shape[d]) as i64 - offsets[d];
                rem /= shape[d];
            }
            (lags, c)
        })
    }
}

/// Direct multidimensional autocorrelation of the pattern indicator.
pub fn weight_nd(pattern: &PatternNd) -> NdWeight {
    let positions = pattern.positions();
    let dims = pattern.dims();
    let offsets: Vec<i64> = (0..dims)
        .map(|d| {
            let coords: Vec<i64> = positions.iter().map(|p| p[d]).collect();
            coords.iter().max().unwrap() - coords.iter().min().unwrap()
        })
        .collect();
    let shape: Vec<usize> = offsets.iter().map(|&o| (2 * o + 1) as usize).collect();
    let mut w = NdWeight {
        offsets,
        shape,
        data: Vec::new(),
    };
    w.data = vec![0; w.shape.iter().product()];
    let mut lags = vec![0i64; dims];
    for a in &positions {
        for b in &positions {
            for d in 0..dims {
                lags[d] = a[d] - b[d];
            }
            let idx = w.index(&lags).expect("lag inside box");
            w.data[idx] += 1;
        }
    }
    w
}

/// Outer product of 1D weight functions.
pub fn weight_outer(factors: &[WeightFunction]) -> NdWeight {
    let offsets: Vec<i64> = factors.iter().map(|z| z.lmax()).collect();
    let shape: Vec<usize> = offsets.iter().map(|&o| (2 * o + 1) as usize).collect();
    let mut data = vec![1u64; shape.iter().product()];
    let mut stride: usize = shape.iter().product();
    for (d, z) in factors.iter().enumerate() {
        stride /= shape[d];
        for (flat, value) in data.iter_mut().enumerate() {
            let coord = (flat / stride) % shape[d];
            *value *= z.z(coord as i64 - offsets[d]);
        }
    }
    NdWeight {
        offsets,
        shape,
        data,
    }
}

/// A real window sampled on the grid `f = 2k / grid_size` per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct NdWindow {
    dims: usize,
    grid_size: usize,
    data: Vec<f64>,
}

impl NdWindow {
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn value(&self, index: &[usize]) -> f64 {
        debug_assert_eq!(index.len(), self.dims);
        let mut flat = 0usize;
        for &i in index {
            flat = flat * self.grid_size + i;
        }
        self.data[flat]
    }

    pub fn freq(&self, k: usize) -> f64 {
        2.0 * k as f64 / self.grid_size as f64
    }

    pub fn peak_normalized(&self) -> Self {
        let peak = self.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Self {
            dims: self.dims,
            grid_size: self.grid_size,
            data: self.data.iter().map(|v| v / peak).collect(),
        }
    }

    pub fn max_abs_deviation(&self, other: &NdWindow) -> Result<f64> {
        if self.grid_size != other.grid_size || self.dims != other.dims {
            return Err(Error::GridMismatch {
                left: self.grid_size,
                right: other.grid_size,
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn min_value(&self) -> f64 {
        self.data.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// CSV export as `i,j,value` triples (2D only).
    pub fn to_csv_triples(&self) -> Result<String> {
        if self.dims != 2 {
            return Err(Error::InvalidParameter(
                "triple export is for 2D windows".into(),
            ));
        }
        let mut out = String::from("i,j,value\n");
        for i in 0..self.grid_size {
            for j in 0..self.grid_size {
                let _ = writeln!(out, "{i},{j},{}", self.value(&[i, j]));
            }
        }
        Ok(out)
    }

    /// JSON export as `{grid_size, values}` with a nested row-major matrix
    /// (2D only).
    pub fn to_json_matrix(&self) -> Result<String> {
        if self.dims != 2 {
            return Err(Error::InvalidParameter(
                "matrix export is for 2D windows".into(),
            ));
        }
        let rows: Vec<&[f64]> = self.data.chunks(self.grid_size).collect();
        Ok(serde_json::json!({"grid_size": self.grid_size, "values": rows}).to_string())
    }
}

/// Outer product of 1D bias windows on a shared grid.
pub fn bias_nd(windows: &[&BiasWindow]) -> Result<NdWindow> {
    if windows.len() < 2 {
        return Err(Error::TooFewSubarrays {
            min: 2,
            got: windows.len(),
        });
    }
    let grid = windows[0].grid_size();
    for w in windows {
        if w.grid_size() != grid {
            return Err(Error::GridMismatch {
                left: grid,
                right: w.grid_size(),
            });
        }
    }
    let dims = windows.len();
    let mut data = vec![1.0f64; grid.pow(dims as u32)];
    let mut stride = data.len();
    for w in windows {
        stride /= grid;
        for (flat, value) in data.iter_mut().enumerate() {
            let coord = (flat / stride) % grid;
            *value *= w.values()[coord];
        }
    }
    Ok(NdWindow {
        dims,
        grid_size: grid,
        data,
    })
}

fn grid_phasor(k: usize, grid: usize, lag: i64) -> Complex64 {
    let g = grid as i64;
    let steps = (k as i64 * 2 * lag).rem_euclid(2 * g);
    let theta = PI * steps as f64 / g as f64;
    Complex64::new(theta.cos(), -theta.sin())
}

/// Multidimensional transform of a weight array, axis by axis. This is the
/// simulated window the outer-product route is checked against.
pub fn bias_nd_from_weight(w: &NdWeight, grid_size: usize) -> NdWindow {
    let dims = w.dims();
    let mut shape: Vec<usize> = w.shape().to_vec();
    let mut data: Vec<Complex64> = w
        .data
        .iter()
        .map(|&c| Complex64::new(c as f64, 0.0))
        .collect();
    // Each pass transforms the leading axis and moves it to the back, so
    // after `dims` passes every axis is in frequency and order is restored.
    for pass in 0..dims {
        let rest: usize = shape[1..].iter().product();
        let offset = w.offsets()[pass];
        let mut next = vec![Complex64::new(0.0, 0.0); rest * grid_size];
        for (l_idx, chunk) in data.chunks(rest).enumerate() {
            let lag = l_idx as i64 - offset;
            for k in 0..grid_size {
                let ph = grid_phasor(k, grid_size, lag);
                for (r, &v) in chunk.iter().enumerate() {
                    next[r * grid_size + k] += v * ph;
                }
            }
        }
        data = next;
        shape = shape[1..].iter().copied().chain([grid_size]).collect();
    }
    NdWindow {
        dims,
        grid_size,
        data: data.into_iter().map(|c| c.re).collect(),
    }
}

/// A 2D multi-tone random-phase model; peak components are in units of pi,
/// each inside `[0, 1)`, not both zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Signal2dModel {
    peaks: Vec<(f64, f64)>,
    amplitudes: Vec<f64>,
    seed: u64,
}

impl Signal2dModel {
    pub fn new(peaks: Vec<(f64, f64)>, seed: u64) -> Result<Self> {
        if peaks.is_empty() {
            return Err(Error::Empty { what: "peak list" });
        }
        for &(f1, f2) in &peaks {
            if !(0.0..1.0).contains(&f1) || !(0.0..1.0).contains(&f2) || (f1 == 0.0 && f2 == 0.0) {
                return Err(Error::InvalidParameter(
                    "2D peaks need components in [0, 1), not both zero".into(),
                ));
            }
        }
        let amplitudes = vec![1.0; peaks.len()];
        Ok(Self {
            peaks,
            amplitudes,
            seed,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn peaks(&self) -> &[(f64, f64)] {
        &self.peaks
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// One block of 2D samples per snapshot, row-major `shape.0 x shape.1`,
/// phases redrawn per snapshot per peak.
pub fn generate_blocks_2d(
    model: &Signal2dModel,
    shape: (usize, usize),
    snapshots: usize,
) -> Vec<Vec<Complex64>> {
    let mut rng = SplitMix64::new(model.seed);
    let mut blocks = Vec::with_capacity(snapshots);
    for _ in 0..snapshots {
        let phases: Vec<f64> = model.peaks.iter().map(|_| rng.next_phase()).collect();
        let mut block = vec![Complex64::new(0.0, 0.0); shape.0 * shape.1];
        for t1 in 0..shape.0 {
            for t2 in 0..shape.1 {
                let mut x = Complex64::new(0.0, 0.0);
                for ((&(f1, f2), &a), &phase) in
                    model.peaks.iter().zip(&model.amplitudes).zip(&phases)
                {
                    let arg = PI * (f1 * t1 as f64 + f2 * t2 as f64) + phase;
                    x += Complex64::new(a * arg.cos(), a * arg.sin());
                }
                block[t1 * shape.1 + t2] = x;
            }
        }
        blocks.push(block);
    }
    blocks
}

/// 2D pattern samples per snapshot.
#[derive(Debug, Clone)]
pub struct SnapshotSet2d {
    positions: Vec<(i64, i64)>,
    snapshots: Vec<Vec<Complex64>>,
}

impl SnapshotSet2d {
    pub fn count(&self) -> usize {
        self.snapshots.len()
    }

    pub fn positions(&self) -> &[(i64, i64)] {
        &self.positions
    }
}

/// Pick the pattern's sample positions out of each snapshot block.
pub fn sample_pattern_2d(
    blocks: &[Vec<Complex64>],
    pattern: &PatternNd,
    shape: (usize, usize),
) -> Result<SnapshotSet2d> {
    if pattern.dims() != 2 {
        return Err(Error::InvalidParameter(
            "2D sampling needs a 2-factor pattern".into(),
        ));
    }
    if pattern.factors()[0].len() > shape.0 || pattern.factors()[1].len() > shape.1 {
        return Err(Error::InvalidParameter(
            "pattern period exceeds the block shape".into(),
        ));
    }
    let positions: Vec<(i64, i64)> = pattern
        .positions()
        .into_iter()
        .map(|p| (p[0], p[1]))
        .collect();
    let snapshots = blocks
        .iter()
        .map(|block| {
            positions
                .iter()
                .map(|&(a, b)| block[a as usize * shape.1 + b as usize])
                .collect()
        })
        .collect();
    Ok(SnapshotSet2d {
        positions,
        snapshots,
    })
}

/// 2D lag-domain autocorrelation estimate.
#[derive(Debug, Clone)]
pub struct Lag2dEstimate {
    values: BTreeMap<(i64, i64), Complex64>,
}

impl Lag2dEstimate {
    pub fn value(&self, l1: i64, l2: i64) -> Option<Complex64> {
        self.values.get(&(l1, l2)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        self.values.iter().map(|(&l, &v)| (l, v))
    }
}

/// Average 2D lag products over snapshots and contributor pairs.
pub fn estimate_autocorrelation_2d(snap: &SnapshotSet2d, z: &NdWeight) -> Result<Lag2dEstimate> {
    if z.dims() != 2 {
        return Err(Error::InvalidParameter(
            "2D estimation needs a 2D weight".into(),
        ));
    }
    if z.z(&[0, 0]) != snap.positions().len() as u64 {
        return Err(Error::WeightMismatch {
            z0: z.z(&[0, 0]),
            elements: snap.positions().len(),
        });
    }
    let p = snap.positions.len();
    let mut acc: BTreeMap<(i64, i64), Complex64> = BTreeMap::new();
    for row in &snap.snapshots {
        for i in 0..p {
            for j in 0..p {
                let l = (
                    snap.positions[i].0 - snap.positions[j].0,
                    snap.positions[i].1 - snap.positions[j].1,
                );
                *acc.entry(l).or_insert(Complex64::new(0.0, 0.0)) += row[i] * row[j].conj();
            }
        }
    }
    let k = snap.count() as f64;
    let values = acc
        .into_iter()
        .map(|(l, sum)| (l, sum / (k * z.z(&[l.0, l.1]) as f64)))
        .collect();
    Ok(Lag2dEstimate { values })
}

/// 2D power spectrum on a `grid_size x grid_size` frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2d {
    grid_size: usize,
    power: Vec<f64>,
}

impl Spectrum2d {
    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.power[i * self.grid_size + j]
    }

    pub fn freq(&self, k: usize) -> f64 {
        2.0 * k as f64 / self.grid_size as f64
    }

    pub fn to_csv_triples(&self) -> String {
        let mut out = String::from("i,j,power\n");
        for i in 0..self.grid_size {
            for j in 0..self.grid_size {
                let _ = writeln!(out, "{i},{j},{}", self.value(i, j));
            }
        }
        out
    }

    /// JSON export as `{grid_size, values}` with a nested row-major matrix.
    pub fn to_json_matrix(&self) -> String {
        let rows: Vec<&[f64]> = self.power.chunks(self.grid_size).collect();
        serde_json::json!({"grid_size": self.grid_size, "values": rows}).to_string()
    }
}

/// 2D correlogram over the available lags, evaluated in two separable
/// passes (inner axis first).
pub fn periodogram_2d(est: &Lag2dEstimate, grid_size: usize) -> Spectrum2d {
    // group lags by l1
    let mut by_l1: BTreeMap<i64, Vec<(i64, Complex64)>> = BTreeMap::new();
    for ((l1, l2), v) in est.iter() {
        by_l1.entry(l1).or_default().push((l2, v));
    }
    // partial[l1][k2] = sum_l2 r e^{-j pi f2 l2}
    let mut partial: Vec<(i64, Vec<Complex64>)> = Vec::with_capacity(by_l1.len());
    for (l1, terms) in by_l1 {
        let mut row = vec![Complex64::new(0.0, 0.0); grid_size];
        for (k2, slot) in row.iter_mut().enumerate() {
            let mut sum = Complex64::new(0.0, 0.0);
            for &(l2, v) in &terms {
                sum += v * grid_phasor(k2, grid_size, l2);
            }
            *slot = sum;
        }
        partial.push((l1, row));
    }
    let mut power = vec![0.0f64; grid_size * grid_size];
    for k1 in 0..grid_size {
        for k2 in 0..grid_size {
            let mut sum = Complex64::new(0.0, 0.0);
            for (l1, row) in &partial {
                sum += row[k2] * grid_phasor(k1, grid_size, *l1);
            }
            power[k1 * grid_size + k2] = sum.re;
        }
    }
    Spectrum2d { grid_size, power }
}

/// The `count` largest strict local maxima (8-neighborhood, wrapping at the
/// grid edges) with both frequency components in `[0, 1)`, sorted.
pub fn find_peaks_2d(spec: &Spectrum2d, count: usize) -> Result<Vec<(f64, f64)>> {
    let g = spec.grid_size();
    let mut maxima: Vec<(f64, f64, f64)> = Vec::new();
    for i in 0..g / 2 {
        for j in 0..g / 2 {
            let v = spec.value(i, j);
            let mut is_max = true;
            for di in [-1i64, 0, 1] {
                for dj in [-1i64, 0, 1] {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let ni = (i as i64 + di).rem_euclid(g as i64) as usize;
                    let nj = (j as i64 + dj).rem_euclid(g as i64) as usize;
                    if spec.value(ni, nj) >= v {
                        is_max = false;
                    }
                }
            }
            if is_max {
                maxima.push((spec.freq(i), spec.freq(j), v));
            }
        }
    }
    if maxima.len() < count {
        return Err(Error::NotEnoughPeaks {
            requested: count,
            found: maxima.len(),
            locations: maxima.iter().map(|&(f1, _, _)| f1).collect(),
        });
    }
    maxima.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap());
    let mut peaks: Vec<(f64, f64)> = maxima[..count].iter().map(|&(a, b, _)| (a, b)).collect();
    peaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(peaks)
}

/// Seeded multi-trial 2D estimation; reports the trial-averaged spectrum.
#[derive(Debug, Clone)]
pub struct Estimation2dRun {
    pub pattern: PatternNd,
    pub model: Signal2dModel,
    pub snapshots: usize,
    pub trials: usize,
    pub grid_size: usize,
}

impl Estimation2dRun {
    pub fn execute(&self) -> Result<Spectrum2d> {
        let shape = (
            self.pattern.factors()[0].len(),
            self.pattern.factors()[1].len(),
        );
        let z = weight_nd(&self.pattern);
        let mut mean = vec![0.0f64; self.grid_size * self.grid_size];
        for trial in 0..self.trials {
            let seed = SplitMix64::derive(self.model.seed(), trial as u64).next_u64();
            let model = self.model.clone().with_seed(seed);
            let blocks = generate_blocks_2d(&model, shape, self.snapshots);
            let snap = sample_pattern_2d(&blocks, &self.pattern, shape)?;
            let est = estimate_autocorrelation_2d(&snap, &z)?;
            let spec = periodogram_2d(&est, self.grid_size);
            for (acc, v) in mean.iter_mut().zip(&spec.power) {
                *acc += v;
            }
        }
        for v in &mut mean {
            *v /= self.trials.max(1) as f64;
        }
        Ok(Spectrum2d {
            grid_size: self.grid_size,
            power: mean,
        })
    }
}
