//! Element-position construction for co-prime array families.
//!
//! All positions are exact integers in units of the Nyquist distance `d`;
//! `d` itself only matters when a caller maps positions to physical units.
//! The two-subarray families are:
//!
//! * APCA — subarrays `{M*n}` and `{N*m + s}` with an adjustable pivot
//!   (the single element the two subarrays share).
//! * ExSCA — the same structure stretched by a sparsity factor `E`, giving
//!   subarrays `{E*M*n}` and `{E*N*m + s}`. For `E = 2` a pivot exists
//!   exactly when `s` is even.
//!
//! The generalized form allows `q` subarrays, each with its own element
//! count, base spacing, compression, sparsity, period count and shift.

use serde::Serialize;

use crate::error::{Error, Result};

/// Greatest common divisor.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// True iff `(m, n)` is usable as a co-prime spacing pair: gcd 1 and both >= 2.
pub fn validate_coprime(m: u64, n: u64) -> bool {
    m >= 2 && n >= 2 && gcd(m, n) == 1
}

/// A validated co-prime pair `(M, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoPrimePair {
    m: u32,
    n: u32,
}

impl CoPrimePair {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if !validate_coprime(m as u64, n as u64) {
            return Err(Error::NotCoprime {
                m: m as u64,
                n: n as u64,
            });
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

/// Adjustable pivot co-prime array: subarrays `{M*n}` (N elements, fixed at
/// the origin) and `{N*m + s}` (M elements, shifted).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ApcaConfig {
    pair: CoPrimePair,
    shift: i64,
    displaced: bool,
}

impl ApcaConfig {
    /// Canonical form: requires `0 <= s <= N-1`.
    pub fn new(m: u32, n: u32, shift: i64) -> Result<Self> {
        let pair = CoPrimePair::new(m, n)?;
        let max = n as i64 - 1;
        if shift < 0 || shift > max {
            return Err(Error::ShiftOutOfRange { s: shift, max });
        }
        Ok(Self {
            pair,
            shift,
            displaced: false,
        })
    }

    /// Displaced form: any `s >= 0`. No coarray claims are made outside the
    /// canonical shift range.
    pub fn displaced(m: u32, n: u32, shift: i64) -> Result<Self> {
        let pair = CoPrimePair::new(m, n)?;
        if shift < 0 {
            return Err(Error::ShiftOutOfRange {
                s: shift,
                max: i64::MAX,
            });
        }
        Ok(Self {
            pair,
            shift,
            displaced: true,
        })
    }

    pub fn pair(&self) -> CoPrimePair {
        self.pair
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn is_displaced(&self) -> bool {
        self.displaced
    }

    /// One co-prime period, `M*N` samples.
    pub fn period(&self) -> usize {
        (self.pair.m as usize) * (self.pair.n as usize)
    }

    /// Pivot location parameters `(n_p, m_p)` with `M*n_p = N*m_p + s`,
    /// unique when it exists. Always present for canonical shifts.
    pub fn pivot(&self) -> Option<(u32, u32)> {
        solve_pivot(self.pair.m, self.pair.n, self.shift)
    }
}

/// Extremely sparse co-prime array: subarrays `{E*M*n}` and `{E*N*m + s}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExscaConfig {
    pair: CoPrimePair,
    shift: i64,
    sparsity: u32,
    displaced: bool,
}

impl ExscaConfig {
    /// Canonical form: requires `E >= 1` and `0 <= s <= E*N - 1`.
    pub fn new(m: u32, n: u32, sparsity: u32, shift: i64) -> Result<Self> {
        let pair = CoPrimePair::new(m, n)?;
        if sparsity < 1 {
            return Err(Error::InvalidParameter(
                "sparsity factor must be >= 1".into(),
            ));
        }
        let max = (sparsity as i64) * (n as i64) - 1;
        if shift < 0 || shift > max {
            return Err(Error::ShiftOutOfRange { s: shift, max });
        }
        Ok(Self {
            pair,
            shift,
            sparsity,
            displaced: false,
        })
    }

    /// Displaced form (ExSCADiS when the shifted subarray clears the fixed
    /// one entirely): any `s >= 0`.
    pub fn displaced(m: u32, n: u32, sparsity: u32, shift: i64) -> Result<Self> {
        let pair = CoPrimePair::new(m, n)?;
        if sparsity < 1 {
            return Err(Error::InvalidParameter(
                "sparsity factor must be >= 1".into(),
            ));
        }
        if shift < 0 {
            return Err(Error::ShiftOutOfRange {
                s: shift,
                max: i64::MAX,
            });
        }
        Ok(Self {
            pair,
            shift,
            sparsity,
            displaced: true,
        })
    }

    pub fn pair(&self) -> CoPrimePair {
        self.pair
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn sparsity(&self) -> u32 {
        self.sparsity
    }

    pub fn is_displaced(&self) -> bool {
        self.displaced
    }

    /// One co-prime period, `E*M*N` samples.
    pub fn period(&self) -> usize {
        (self.sparsity as usize) * (self.pair.m as usize) * (self.pair.n as usize)
    }

    /// Pivot `(n_p, m_p)` with `E*M*n_p = E*N*m_p + s`. Exists only when the
    /// sparsity factor divides the shift (for `E = 2`: even shifts).
    pub fn pivot(&self) -> Option<(u32, u32)> {
        let e = self.sparsity as i64;
        if self.shift % e != 0 {
            return None;
        }
        solve_pivot(self.pair.m, self.pair.n, self.shift / e)
    }
}

/// Solve `M*n = N*m + s` for `n in [0, N-1]`, `m in [0, M-1]`.
fn solve_pivot(m_spacing: u32, n_spacing: u32, s: i64) -> Option<(u32, u32)> {
    let m_spacing = m_spacing as i64;
    let n_spacing = n_spacing as i64;
    for m in 0..m_spacing {
        let num = n_spacing * m + s;
        if num % m_spacing == 0 {
            let n = num / m_spacing;
            if (0..n_spacing).contains(&n) {
                return Some((n as u32, m as u32));
            }
        }
    }
    None
}

/// One subarray of a generalized configuration. Element positions are
/// `{E * (M/p) * n + s : 0 <= n <= r*N - 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubarraySpec {
    /// Elements per period, `N_i`.
    pub elements: u32,
    /// Base spacing, `M_i`.
    pub spacing_base: u32,
    /// Compression factor `p_i`; must divide the base spacing.
    pub compression: u32,
    /// Sparsity factor `E_i`.
    pub sparsity: u32,
    /// Number of periods, `r_i`.
    pub periods: u32,
    /// Shift `s_i`.
    pub shift: i64,
}

impl SubarraySpec {
    pub fn new(
        elements: u32,
        spacing_base: u32,
        compression: u32,
        sparsity: u32,
        periods: u32,
        shift: i64,
    ) -> Result<Self> {
        if elements < 1 || periods < 1 || sparsity < 1 || compression < 1 || spacing_base < 1 {
            return Err(Error::InvalidParameter(
                "subarray counts and factors must be >= 1".into(),
            ));
        }
        if !spacing_base.is_multiple_of(compression) {
            return Err(Error::CompressionMismatch {
                p: compression as u64,
                m: spacing_base as u64,
            });
        }
        if shift < 0 {
            return Err(Error::ShiftOutOfRange {
                s: shift,
                max: i64::MAX,
            });
        }
        Ok(Self {
            elements,
            spacing_base,
            compression,
            sparsity,
            periods,
            shift,
        })
    }

    /// Compressed spacing `M_i / p_i`.
    pub fn compressed_spacing(&self) -> u32 {
        self.spacing_base / self.compression
    }

    /// Inter-element distance `E_i * M_i / p_i`.
    pub fn step(&self) -> i64 {
        (self.sparsity as i64) * (self.compressed_spacing() as i64)
    }

    /// Total element count `r_i * N_i`.
    pub fn count(&self) -> usize {
        (self.periods as usize) * (self.elements as usize)
    }

    pub fn positions(&self) -> Vec<i64> {
        let step = self.step();
        (0..self.count() as i64).map(|n| step * n + self.shift).collect()
    }
}

/// A generalized configuration of `q >= 2` subarrays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneralizedConfig {
    subarrays: Vec<SubarraySpec>,
}

impl GeneralizedConfig {
    pub fn new(subarrays: Vec<SubarraySpec>) -> Result<Self> {
        if subarrays.len() < 2 {
            return Err(Error::TooFewSubarrays {
                min: 2,
                got: subarrays.len(),
            });
        }
        Ok(Self { subarrays })
    }

    pub fn subarrays(&self) -> &[SubarraySpec] {
        &self.subarrays
    }

    /// Largest element position across all subarrays.
    pub fn span(&self) -> i64 {
        self.subarrays
            .iter()
            .map(|s| s.step() * (s.count() as i64 - 1) + s.shift)
            .max()
            .unwrap_or(0)
    }

    /// Snapshot length: one sample past the largest position.
    pub fn period(&self) -> usize {
        (self.span() + 1) as usize
    }
}

impl From<&ApcaConfig> for GeneralizedConfig {
    fn from(cfg: &ApcaConfig) -> Self {
        let p = cfg.pair();
        GeneralizedConfig {
            subarrays: vec![
                SubarraySpec::new(p.n(), p.m(), 1, 1, 1, 0).unwrap(),
                SubarraySpec::new(p.m(), p.n(), 1, 1, 1, cfg.shift()).unwrap(),
            ],
        }
    }
}

impl From<&ExscaConfig> for GeneralizedConfig {
    fn from(cfg: &ExscaConfig) -> Self {
        let p = cfg.pair();
        let e = cfg.sparsity();
        GeneralizedConfig {
            subarrays: vec![
                SubarraySpec::new(p.n(), p.m(), 1, e, 1, 0).unwrap(),
                SubarraySpec::new(p.m(), p.n(), 1, e, 1, cfg.shift()).unwrap(),
            ],
        }
    }
}

/// A sorted set of element positions with per-subarray provenance.
///
/// The union view collapses duplicates; `provenance[i]` lists every subarray
/// index that contributes `positions[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementSet {
    positions: Vec<i64>,
    provenance: Vec<Vec<usize>>,
}

impl ElementSet {
    /// Build from one subarray's positions (provenance index 0).
    pub fn from_positions(mut positions: Vec<i64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::Empty { what: "element set" });
        }
        positions.sort_unstable();
        positions.dedup();
        let provenance = vec![vec![0]; positions.len()];
        Ok(Self {
            positions,
            provenance,
        })
    }

    /// Merge several subarrays into a provenance-carrying union.
    pub fn union_of(subarrays: &[Vec<i64>]) -> Result<Self> {
        let mut tagged: Vec<(i64, usize)> = Vec::new();
        for (idx, sub) in subarrays.iter().enumerate() {
            for &p in sub {
                tagged.push((p, idx));
            }
        }
        if tagged.is_empty() {
            return Err(Error::Empty { what: "element set" });
        }
        tagged.sort_unstable();
        let mut positions = Vec::new();
        let mut provenance: Vec<Vec<usize>> = Vec::new();
        for (p, idx) in tagged {
            if positions.last() == Some(&p) {
                let owners = provenance.last_mut().unwrap();
                if !owners.contains(&idx) {
                    owners.push(idx);
                }
            } else {
                positions.push(p);
                provenance.push(vec![idx]);
            }
        }
        Ok(Self {
            positions,
            provenance,
        })
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn provenance(&self) -> &[Vec<usize>] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, position: i64) -> bool {
        self.positions.binary_search(&position).is_ok()
    }
}

/// A position claimed by two or more subarrays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Overlap {
    pub position: i64,
    pub subarrays: Vec<usize>,
}

/// Positions appearing in at least two of the given sets. An empty result
/// means the closed-form weight and bias expressions apply as-is.
pub fn detect_overlap(sets: &[ElementSet]) -> Vec<Overlap> {
    let lists: Vec<Vec<i64>> = sets.iter().map(|s| s.positions().to_vec()).collect();
    let union = match ElementSet::union_of(&lists) {
        Ok(u) => u,
        Err(_) => return Vec::new(),
    };
    union
        .positions()
        .iter()
        .zip(union.provenance())
        .filter(|(_, owners)| owners.len() >= 2)
        .map(|(&position, owners)| Overlap {
            position,
            subarrays: owners.clone(),
        })
        .collect()
}

/// Subarray element sets plus their union.
#[derive(Debug, Clone)]
pub struct ArrayLayout {
    pub subarrays: Vec<ElementSet>,
    pub union: ElementSet,
}

impl ArrayLayout {
    fn from_position_lists(lists: Vec<Vec<i64>>) -> Result<Self> {
        let union = ElementSet::union_of(&lists)?;
        let subarrays = lists
            .into_iter()
            .map(ElementSet::from_positions)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { subarrays, union })
    }

    pub fn overlaps(&self) -> Vec<Overlap> {
        detect_overlap(&self.subarrays)
    }
}

/// APCA element positions: `{M*n : n < N}`, `{N*m + s : m < M}`, and their
/// union (`M + N - 1` distinct positions for canonical shifts).
pub fn positions_apca(cfg: &ApcaConfig) -> ArrayLayout {
    let m = cfg.pair().m() as i64;
    let n = cfg.pair().n() as i64;
    let s = cfg.shift();
    let sub1: Vec<i64> = (0..n).map(|k| m * k).collect();
    let sub2: Vec<i64> = (0..m).map(|k| n * k + s).collect();
    ArrayLayout::from_position_lists(vec![sub1, sub2]).expect("non-empty by construction")
}

/// ExSCA element positions: `{E*M*n : n < N}`, `{E*N*m + s : m < M}`, union.
pub fn positions_exsca(cfg: &ExscaConfig) -> ArrayLayout {
    let e = cfg.sparsity() as i64;
    let m = cfg.pair().m() as i64;
    let n = cfg.pair().n() as i64;
    let s = cfg.shift();
    let sub1: Vec<i64> = (0..n).map(|k| e * m * k).collect();
    let sub2: Vec<i64> = (0..m).map(|k| e * n * k + s).collect();
    ArrayLayout::from_position_lists(vec![sub1, sub2]).expect("non-empty by construction")
}

/// Generalized element positions, one list per subarray plus the union.
pub fn positions_generalized(cfg: &GeneralizedConfig) -> ArrayLayout {
    let lists: Vec<Vec<i64>> = cfg.subarrays().iter().map(|s| s.positions()).collect();
    ArrayLayout::from_position_lists(lists).expect("non-empty by construction")
}

/// Geometry export record (`design` command output).
#[derive(Debug, Clone, Serialize)]
pub struct GeometryReport {
    pub family: String,
    pub params: serde_json::Value,
    pub subarrays: Vec<Vec<i64>>,
    pub union: Vec<i64>,
    pub pivot: Option<(u32, u32)>,
    pub overlaps: Vec<Overlap>,
}

impl GeometryReport {
    pub fn new(
        family: &str,
        params: serde_json::Value,
        layout: &ArrayLayout,
        pivot: Option<(u32, u32)>,
    ) -> Self {
        Self {
            family: family.to_string(),
            params,
            subarrays: layout
                .subarrays
                .iter()
                .map(|s| s.positions().to_vec())
                .collect(),
            union: layout.union.positions().to_vec(),
            pivot,
            overlaps: layout.overlaps(),
        }
    }
}
