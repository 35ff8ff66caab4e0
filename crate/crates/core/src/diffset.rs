//! Brute-force difference-set analytics.
//!
//! Everything here enumerates element pairs directly; the closed-form
//! expressions in [`crate::closedform`] are validated against these
//! functions, never the other way around.
//!
//! The weight function `z(l)` counts ordered element pairs `(a, b)` of the
//! distinct-position union with `a - b = l`. Counting on the union (rather
//! than summing per-subarray tables) handles a shared pivot element without
//! double counting.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::ElementSet;

/// Number of autocorrelation contributors at each lag.
///
/// Symmetric (`z(l) = z(-l)`), finite support, `z(0)` equal to the number of
/// distinct elements, and total mass equal to that count squared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightFunction {
    /// Counts for lags `-lmax ..= lmax`, indexed by `l + lmax`.
    counts: Vec<u64>,
    lmax: i64,
}

impl WeightFunction {
    /// Assemble from `(lag, count)` contributions.
    pub fn from_counts(entries: impl IntoIterator<Item = (i64, u64)>) -> Result<Self> {
        let mut map = std::collections::BTreeMap::new();
        for (lag, count) in entries {
            *map.entry(lag).or_insert(0u64) += count;
        }
        let lmax = map
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(&l, _)| l.abs())
            .max()
            .ok_or(Error::Empty {
                what: "weight function",
            })?;
        let mut counts = vec![0u64; (2 * lmax + 1) as usize];
        for (l, c) in map {
            if c > 0 {
                counts[(l + lmax) as usize] = c;
            }
        }
        Ok(Self { counts, lmax })
    }

    /// Largest lag magnitude with a nonzero count.
    pub fn lmax(&self) -> i64 {
        self.lmax
    }

    /// Contributor count at lag `l` (0 outside the support).
    pub fn z(&self, l: i64) -> u64 {
        if l.abs() > self.lmax {
            0
        } else {
            self.counts[(l + self.lmax) as usize]
        }
    }

    /// Iterate `(lag, count)` over `-lmax ..= lmax`, including holes.
    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        let lmax = self.lmax;
        self.counts
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - lmax, c))
    }

    /// Sum of all counts; equals the squared element count for a weight
    /// derived from a union pattern.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// CSV export with header `lag,count`, one row per lag in the support
    /// extent (holes included with count 0).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lag,count\n");
        for (l, c) in self.iter() {
            let _ = writeln!(out, "{l},{c}");
        }
        out
    }
}

/// All ordered pairwise differences `a - b` within one subarray, as a sorted
/// multiset (zero appears once per element).
pub fn self_differences(sub: &ElementSet) -> Vec<i64> {
    let mut diffs = Vec::with_capacity(sub.len() * sub.len());
    for &a in sub.positions() {
        for &b in sub.positions() {
            diffs.push(a - b);
        }
    }
    diffs.sort_unstable();
    diffs
}

/// The cross-difference table `l_c(n, m) = sub1[n] - sub2[m]`.
///
/// For co-prime subarrays all `M*N` entries are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossDifferenceTable {
    /// `values[n][m] = sub1[n] - sub2[m]`.
    values: Vec<Vec<i64>>,
}

impl CrossDifferenceTable {
    pub fn rows(&self) -> usize {
        self.values.len()
    }

    pub fn cols(&self) -> usize {
        self.values.first().map_or(0, |r| r.len())
    }

    pub fn value(&self, n: usize, m: usize) -> i64 {
        self.values[n][m]
    }

    /// All entries in row-major order (the positive cross set).
    pub fn entries(&self) -> impl Iterator<Item = i64> + '_ {
        self.values.iter().flatten().copied()
    }

    /// `(min, max)` over the entries.
    pub fn range(&self) -> (i64, i64) {
        let min = self.entries().min().expect("table is non-empty");
        let max = self.entries().max().expect("table is non-empty");
        (min, max)
    }

    /// True if every entry is distinct.
    pub fn entries_distinct(&self) -> bool {
        let set: BTreeSet<i64> = self.entries().collect();
        set.len() == self.rows() * self.cols()
    }
}

/// Cross differences between two subarrays of one configuration.
pub fn cross_differences(sub1: &ElementSet, sub2: &ElementSet) -> CrossDifferenceTable {
    let values = sub1
        .positions()
        .iter()
        .map(|&a| sub2.positions().iter().map(|&b| a - b).collect())
        .collect();
    CrossDifferenceTable { values }
}

/// Weight function of a union pattern: `z(l)` = number of ordered pairs
/// `(a, b)` with `a - b = l`.
pub fn weight_function(union: &ElementSet) -> WeightFunction {
    let pairs = union
        .positions()
        .iter()
        .flat_map(|&a| union.positions().iter().map(move |&b| (a - b, 1)));
    WeightFunction::from_counts(pairs).expect("union is non-empty")
}

/// Lags of the positive cross set whose negation also lies in that set.
///
/// Every member has two `(n, m)` contributor pairs (one per sign), so the
/// set is closed under negation; it contains zero exactly when a pivot
/// element exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MirrorPairSet {
    lags: BTreeSet<i64>,
}

impl MirrorPairSet {
    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lags.is_empty()
    }

    pub fn contains(&self, l: i64) -> bool {
        self.lags.contains(&l)
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.lags.iter().copied()
    }
}

/// Mirror-pair set of a cross-difference table.
pub fn mirror_pair_set(table: &CrossDifferenceTable) -> MirrorPairSet {
    let all: BTreeSet<i64> = table.entries().collect();
    let lags = all.iter().copied().filter(|l| all.contains(&-l)).collect();
    MirrorPairSet { lags }
}

/// Largest `c` such that `z(l) > 0` for every `|l| <= c`.
pub fn continuous_range(z: &WeightFunction) -> i64 {
    debug_assert!(z.z(0) > 0);
    let mut c = 0;
    while c < z.lmax() && z.z(c + 1) > 0 {
        c += 1;
    }
    c
}

/// Summary of a weight function's support.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct LagStatistics {
    /// Number of lags with a nonzero count.
    pub unique_count: usize,
    /// Lags with `z = 0` inside `[-lmax, lmax]`.
    pub holes: Vec<i64>,
    /// `(-lmax, lmax)`.
    pub extremes: (i64, i64),
}

pub fn lag_statistics(z: &WeightFunction) -> LagStatistics {
    let unique_count = z.iter().filter(|&(_, c)| c > 0).count();
    let holes = z.iter().filter(|&(_, c)| c == 0).map(|(l, _)| l).collect();
    LagStatistics {
        unique_count,
        holes,
        extremes: (-z.lmax(), z.lmax()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{
        positions_apca, positions_exsca, validate_coprime, ApcaConfig, ExscaConfig,
    };

    fn exsca_layout(m: u32, n: u32, s: i64) -> crate::geometry::ArrayLayout {
        positions_exsca(&ExscaConfig::new(m, n, 2, s).unwrap())
    }

    #[test]
    fn exsca_self_difference_sets() {
        let layout = exsca_layout(4, 3, 1);
        // Positive values {0,8,16} with multiplicities {3,2,1}.
        let d1 = self_differences(&layout.subarrays[0]);
        let pos: Vec<i64> = d1.iter().copied().filter(|&l| l >= 0).collect();
        assert_eq!(pos, vec![0, 0, 0, 8, 8, 16]);
        // Positive values {0,6,12,18}.
        let d2 = self_differences(&layout.subarrays[1]);
        let pos2: BTreeSet<i64> = d2.iter().copied().filter(|&l| l >= 0).collect();
        assert_eq!(pos2.into_iter().collect::<Vec<_>>(), vec![0, 6, 12, 18]);
    }

    #[test]
    fn single_element_self_difference() {
        let set = ElementSet::from_positions(vec![5]).unwrap();
        assert_eq!(self_differences(&set), vec![0]);
    }

    #[test]
    fn combined_self_set_matches_quoted_values() {
        let layout = exsca_layout(4, 3, 0);
        let mut all: BTreeSet<i64> = self_differences(&layout.subarrays[0]).into_iter().collect();
        all.extend(self_differences(&layout.subarrays[1]));
        let expected: BTreeSet<i64> = [-18, -16, -12, -8, -6, 0, 6, 8, 12, 16, 18]
            .into_iter()
            .collect();
        assert_eq!(all, expected);
    }

    #[test]
    fn cross_table_mirror_pair_example() {
        // Value 2 from (n,m)=(1,1) and -2 from (2,3) at s=0.
        let layout = exsca_layout(4, 3, 0);
        let table = cross_differences(&layout.subarrays[0], &layout.subarrays[1]);
        assert_eq!(table.value(1, 1), 2);
        assert_eq!(table.value(2, 3), -2);
        assert!(table.entries_distinct());
    }

    #[test]
    fn cross_table_range_s1() {
        let layout = exsca_layout(4, 3, 1);
        let table = cross_differences(&layout.subarrays[0], &layout.subarrays[1]);
        assert_eq!(table.range(), (-19, 15));
    }

    #[test]
    fn apca_prototype_table_distinct() {
        let layout = positions_apca(&ApcaConfig::new(4, 3, 0).unwrap());
        let table = cross_differences(&layout.subarrays[0], &layout.subarrays[1]);
        assert_eq!(table.rows() * table.cols(), 12);
        assert!(table.entries_distinct());
    }

    #[test]
    fn cross_uniqueness_sweep() {
        for m in 2u32..=12 {
            for n in 2u32..=12 {
                if !validate_coprime(m as u64, n as u64) {
                    continue;
                }
                for s in 0..n as i64 {
                    let layout = positions_apca(&ApcaConfig::new(m, n, s).unwrap());
                    let table = cross_differences(&layout.subarrays[0], &layout.subarrays[1]);
                    assert!(table.entries_distinct(), "({m},{n}) s={s}");
                }
            }
        }
    }

    #[test]
    fn weight_at_zero_counts_elements() {
        assert_eq!(weight_function(&exsca_layout(4, 3, 1).union).z(0), 7);
        assert_eq!(weight_function(&exsca_layout(4, 3, 2).union).z(0), 6);
    }

    #[test]
    fn apca_unique_counts_and_ranges() {
        let fixtures = [
            (4u32, 3u32, vec![(0, 17, 6), (1, 19, 4), (2, 21, 9)]),
            (7, 3, vec![(0, 29, 9), (1, 33, 7), (2, 37, 15)]),
            (3, 4, vec![(3, 21, 9)]),
        ];
        for (m, n, rows) in fixtures {
            for (s, count, range) in rows {
                let layout = positions_apca(&ApcaConfig::new(m, n, s).unwrap());
                let z = weight_function(&layout.union);
                assert_eq!(lag_statistics(&z).unique_count, count, "({m},{n}) s={s}");
                assert_eq!(continuous_range(&z), range, "({m},{n}) s={s}");
            }
        }
    }

    #[test]
    fn mirror_pairs_s0() {
        let layout = exsca_layout(4, 3, 0);
        let table = cross_differences(&layout.subarrays[0], &layout.subarrays[1]);
        let lp = mirror_pair_set(&table);
        let expected: BTreeSet<i64> = [0, 2, -2, 4, -4, 10, -10].into_iter().collect();
        assert_eq!(lp.iter().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn non_mirror_values_s1() {
        let layout = exsca_layout(4, 3, 1);
        let table = cross_differences(&layout.subarrays[0], &layout.subarrays[1]);
        let lp = mirror_pair_set(&table);
        // L_np as the table entries (and their negations) minus mirror pairs.
        let mut lnp: BTreeSet<i64> = BTreeSet::new();
        for x in table.entries() {
            if !lp.contains(x) {
                lnp.insert(x);
                lnp.insert(-x);
            }
        }
        for v in [9, 15, -5, -11, -13, -19] {
            assert!(lnp.contains(&v), "missing {v}");
        }
        assert!(!lp.contains(0));
    }

    #[test]
    fn zero_in_mirror_set_iff_pivot() {
        for s in 0..6 {
            let layout = exsca_layout(4, 3, s);
            let table = cross_differences(&layout.subarrays[0], &layout.subarrays[1]);
            let has_zero_cross = table.entries().any(|x| x == 0);
            assert_eq!(mirror_pair_set(&table).contains(0), has_zero_cross);
            assert_eq!(has_zero_cross, s % 2 == 0);
        }
    }

    // Mirror-pair characterization: l is mirrored iff two table cells
    // (n1,m1), (n2,m2) satisfy M*(n1+n2) = N*(m1+m2) + s, with the origin
    // cell covering the s=0 zero. Checked against brute force on small
    // instances; brute force remains the production path.
    #[test]
    fn mirror_pair_characterization_small_instances() {
        for (m, n) in [(4u32, 3u32), (3, 4), (5, 4), (7, 3)] {
            for s in 0..(2 * n) as i64 {
                let layout = exsca_layout(m, n, s);
                let table = cross_differences(&layout.subarrays[0], &layout.subarrays[1]);
                let brute = mirror_pair_set(&table);

                let (mi, ni) = (m as i64, n as i64);
                let mut characterized: BTreeSet<i64> = BTreeSet::new();
                for n1 in 0..ni {
                    for m1 in 0..mi {
                        for n2 in 0..ni {
                            for m2 in 0..mi {
                                let sum_n = n1 + n2;
                                let holds = if sum_n == 0 {
                                    n1 == 0 && m1 == 0 && s == 0 && m2 == 0
                                } else {
                                    mi * sum_n == ni * (m1 + m2) + s
                                };
                                if holds {
                                    characterized.insert(2 * mi * n1 - (2 * ni * m1 + s));
                                }
                            }
                        }
                    }
                }
                assert_eq!(
                    brute.iter().collect::<BTreeSet<_>>(),
                    characterized,
                    "({m},{n}) s={s}"
                );
            }
        }
    }

    #[test]
    fn weight_symmetry_and_mass() {
        for s in 0..6 {
            let layout = exsca_layout(4, 3, s);
            let z = weight_function(&layout.union);
            let p = layout.union.len() as u64;
            assert_eq!(z.total(), p * p);
            for (l, c) in z.iter() {
                assert_eq!(c, z.z(-l));
            }
        }
    }

    #[test]
    fn table_one_continuous_ranges() {
        let rows: [(u32, u32, i64, i64, i64); 5] = [
            // (M, N, best shift, prototype range, shifted range)
            (5, 9, 8, 13, 27),
            (7, 10, 4, 16, 40),
            (9, 8, 6, 16, 41),
            (10, 9, 2, 18, 51),
            (29, 27, 13, 55, 418),
        ];
        for (m, n, s, proto, shifted) in rows {
            let z0 = weight_function(&positions_apca(&ApcaConfig::new(m, n, 0).unwrap()).union);
            assert_eq!(continuous_range(&z0), proto, "prototype ({m},{n})");
            let zs = weight_function(&positions_apca(&ApcaConfig::new(m, n, s).unwrap()).union);
            assert_eq!(continuous_range(&zs), shifted, "({m},{n}) s={s}");
        }
    }

    #[test]
    fn csv_export_shape() {
        let z = weight_function(&exsca_layout(4, 3, 1).union);
        let csv = z.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("lag,count"));
        assert_eq!(csv.lines().count(), (2 * z.lmax() + 2) as usize);
    }
}
