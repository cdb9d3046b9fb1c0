use std::cmp::Ordering;
use std::fmt;
use std::ops::Sub;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use super::params::{EptParameters, PartitionShape};
use crate::error::{Error, Result};

/// Largest number of pairs `verify_monotonicity` enumerates by default.
pub const DEFAULT_PAIR_BUDGET: u64 = 200_000_000;

/// Exact rational exponent of `log N`. Serialized as a reduced `num/den`.
#[derive(Debug, Clone, Copy)]
pub struct Exponent {
    num: i64,
    den: i64,
}

impl Exponent {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den > 0, "exponent denominator must be positive");
        Exponent { num, den }
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> i64 {
        self.den
    }

    pub fn ratio(&self) -> Ratio<i64> {
        Ratio::new(self.num, self.den)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Exponent {}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl Sub for Exponent {
    type Output = Exponent;

    fn sub(self, rhs: Exponent) -> Exponent {
        if self.den == rhs.den {
            Exponent::new(self.num - rhs.num, self.den)
        } else {
            let r = self.ratio() - rhs.ratio();
            Exponent::new(*r.numer(), *r.denom())
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.ratio();
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Coordinates of a tuple index: column `nu`, part `mu` within the
/// column, position `lambda` (1-based) within the part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IndexCoord {
    pub nu: u64,
    pub mu: u64,
    pub lambda: u64,
}

/// Exponent schedule over a partition shape.
///
/// With `C` columns, `J` parts per column, part size `K` and `k = 2CJK`,
/// index `i = (nu J + mu) K + lambda` gets
/// `c_i = ((C - 1 - nu) J + mu) / (2CJ) + lambda / k`, which over the
/// common denominator `k` has numerator `((C - 1 - nu) J + mu) K + lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExponentModel {
    shape: PartitionShape,
    k: u64,
}

impl ExponentModel {
    pub fn new(shape: PartitionShape) -> Result<Self> {
        let k = shape.k();
        if k > i64::MAX as u64 {
            return Err(Error::range(format!("k = {k} exceeds the exponent range")));
        }
        Ok(ExponentModel { shape, k })
    }

    pub fn from_params(params: &EptParameters) -> Result<Self> {
        Self::new(params.shape())
    }

    pub fn shape(&self) -> PartitionShape {
        self.shape
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Number of indices, `C * J * K`; valid indices are `1..=len`.
    pub fn len(&self) -> u64 {
        self.shape.indices()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check_index(&self, i: u64) -> Result<()> {
        if i == 0 || i > self.len() {
            return Err(Error::range(format!(
                "index {i} outside 1..={}",
                self.len()
            )));
        }
        Ok(())
    }

    pub fn decompose(&self, i: u64) -> Result<IndexCoord> {
        self.check_index(i)?;
        let part_size = self.shape.part_size;
        let part = (i - 1) / part_size;
        Ok(IndexCoord {
            nu: part / self.shape.parts_per_column,
            mu: part % self.shape.parts_per_column,
            lambda: (i - 1) % part_size + 1,
        })
    }

    pub fn compose(&self, c: IndexCoord) -> Result<u64> {
        let s = &self.shape;
        if c.nu >= s.columns
            || c.mu >= s.parts_per_column
            || c.lambda == 0
            || c.lambda > s.part_size
        {
            return Err(Error::range(format!(
                "coordinate ({}, {}, {}) outside the {}x{}x{} box",
                c.nu, c.mu, c.lambda, s.columns, s.parts_per_column, s.part_size
            )));
        }
        Ok((c.nu * s.parts_per_column + c.mu) * s.part_size + c.lambda)
    }

    fn numerator(&self, c: IndexCoord) -> i64 {
        let s = &self.shape;
        (((s.columns - 1 - c.nu) * s.parts_per_column + c.mu) * s.part_size + c.lambda) as i64
    }

    pub fn exponent(&self, i: u64) -> Result<Exponent> {
        let c = self.decompose(i)?;
        Ok(self.exponent_at(c))
    }

    /// Exponent at a coordinate already known to lie in the box.
    pub fn exponent_at(&self, c: IndexCoord) -> Exponent {
        Exponent::new(self.numerator(c), self.k as i64)
    }

    /// The same exponent evaluated term by term as a sum of two fractions.
    pub fn exponent_by_terms(&self, c: IndexCoord) -> Ratio<i128> {
        let s = &self.shape;
        let head = Ratio::new(
            ((s.columns - 1 - c.nu) * s.parts_per_column + c.mu) as i128,
            (2 * s.columns * s.parts_per_column) as i128,
        );
        head + Ratio::new(c.lambda as i128, self.k as i128)
    }

    /// First and last index of column `nu`.
    pub fn column_bounds(&self, nu: u64) -> (u64, u64) {
        let per = self.shape.parts_per_column * self.shape.part_size;
        (nu * per + 1, (nu + 1) * per)
    }

    pub fn column_of(&self, i: u64) -> Result<u64> {
        Ok(self.decompose(i)?.nu)
    }

    /// `1/k`.
    pub fn unit(&self) -> Exponent {
        Exponent::new(1, self.k as i64)
    }
}

/// Exponent of the gap spanning indices `(i, j]`: the largest `c_t` for
/// `i < t <= j`.
pub fn gap_exponent(model: &ExponentModel, i: u64, j: u64) -> Result<Exponent> {
    if i >= j {
        return Err(Error::contract(format!(
            "gap interval needs i < j, got ({i}, {j}]"
        )));
    }
    model.check_index(i)?;
    model.check_index(j)?;
    let first_col = model.column_of(i + 1)?;
    let last_col = model.column_of(j)?;
    // Within a column c_t grows with t, so each column contributes its
    // topmost index inside the interval.
    let best = (first_col..=last_col)
        .map(|nu| {
            let (_, last) = model.column_bounds(nu);
            model.exponent(last.min(j))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .expect("interval is non-empty");
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotonicityMode {
    /// Every index pair; fails if the enumerated pair count exceeds `budget`.
    Exhaustive { budget: u64 },
    /// `samples` uniformly random pairs.
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotonicityViolation {
    pub lower: IndexCoord,
    pub upper: IndexCoord,
    /// `f(upper) - f(lower)`.
    pub difference: Exponent,
    pub rule: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotonicityReport {
    pub mode: &'static str,
    pub indices: u64,
    pub k: u64,
    /// Pairs whose inequality is established, directly or through the
    /// column extremes.
    pub pairs_covered: u64,
    pub pairs_enumerated: u64,
    pub within_column_pairs: u64,
    pub cross_column_blocks: u64,
    pub cross_column_blocks_enumerated: u64,
    pub violation_count: u64,
    pub violations: Vec<MonotonicityViolation>,
    /// Indices where `compose(decompose(i)) != i`.
    pub decode_mismatches: u64,
    /// Indices where the single-fraction and two-term evaluations differ.
    pub formula_mismatches: u64,
    pub min_exponent: Exponent,
    pub max_exponent: Exponent,
    /// Minimum is exactly `1/k` at `(C-1, 0, 1)` and maximum exactly `1/2`
    /// at `(0, J-1, K)`.
    pub extremes_ok: bool,
    pub passed: bool,
}

const MAX_REPORTED_VIOLATIONS: usize = 64;

/// Checks that `c` rises by at least `1/k` for every lexicographically
/// later `(mu, lambda)` inside a column and falls by at least `1/k` for
/// every pair that crosses into a later column.
pub fn verify_monotonicity(
    model: &ExponentModel,
    mode: MonotonicityMode,
) -> Result<MonotonicityReport> {
    let n = model.len();
    let shape = model.shape();
    let per_col = shape.parts_per_column * shape.part_size;

    let mut coords = Vec::with_capacity(n as usize);
    let mut nums = Vec::with_capacity(n as usize);
    let mut decode_mismatches = 0;
    let mut formula_mismatches = 0;
    for i in 1..=n {
        let c = model.decompose(i)?;
        if model.compose(c)? != i {
            decode_mismatches += 1;
        }
        let e = model.exponent_at(c);
        if Ratio::new(e.numer() as i128, e.denom() as i128) != model.exponent_by_terms(c) {
            formula_mismatches += 1;
        }
        coords.push(c);
        nums.push(e.numer());
    }

    let k = model.k() as i64;
    let mut violations = Vec::new();
    let mut violation_count = 0u64;
    let mut record = |lo: usize, hi: usize, rule: &'static str| {
        violation_count += 1;
        if violations.len() < MAX_REPORTED_VIOLATIONS {
            violations.push(MonotonicityViolation {
                lower: coords[lo],
                upper: coords[hi],
                difference: Exponent::new(nums[hi] - nums[lo], k),
                rule,
            });
        }
    };
    // Indices are 1-based; position p in the vectors is index p + 1.
    let check_pair = |lo: usize, hi: usize| -> Option<&'static str> {
        if coords[lo].nu == coords[hi].nu {
            (nums[hi] - nums[lo] < 1).then_some("within-column increase")
        } else {
            (nums[hi] - nums[lo] > -1).then_some("cross-column decrease")
        }
    };

    let total_pairs = n * n.saturating_sub(1) / 2;
    let mut report = MonotonicityReport {
        mode: "exhaustive",
        indices: n,
        k: model.k(),
        pairs_covered: 0,
        pairs_enumerated: 0,
        within_column_pairs: 0,
        cross_column_blocks: 0,
        cross_column_blocks_enumerated: 0,
        violation_count: 0,
        violations: Vec::new(),
        decode_mismatches,
        formula_mismatches,
        min_exponent: Exponent::new(*nums.iter().min().expect("non-empty"), k),
        max_exponent: Exponent::new(*nums.iter().max().expect("non-empty"), k),
        extremes_ok: false,
        passed: false,
    };

    match mode {
        MonotonicityMode::Exhaustive { budget } => {
            let within = shape.columns * (per_col * (per_col - 1) / 2);
            if within > budget {
                return Err(Error::Budget(format!(
                    "{within} within-column pairs exceed the budget of {budget}; use sampled mode"
                )));
            }
            let mut enumerated = 0u64;
            for nu in 0..shape.columns {
                let base = (nu * per_col) as usize;
                for a in base..base + per_col as usize {
                    for b in a + 1..base + per_col as usize {
                        enumerated += 1;
                        if let Some(rule) = check_pair(a, b) {
                            record(a, b, rule);
                        }
                    }
                }
            }
            // Cross-column blocks: the extreme pair decides the whole block;
            // enumerate it only when the extremes fail.
            let col_range = |nu: u64| {
                let base = (nu * per_col) as usize;
                base..base + per_col as usize
            };
            let col_min: Vec<i64> = (0..shape.columns)
                .map(|nu| nums[col_range(nu)].iter().copied().min().unwrap())
                .collect();
            let col_max: Vec<i64> = (0..shape.columns)
                .map(|nu| nums[col_range(nu)].iter().copied().max().unwrap())
                .collect();
            let mut blocks = 0;
            let mut blocks_enumerated = 0;
            for lo in 0..shape.columns {
                for hi in lo + 1..shape.columns {
                    blocks += 1;
                    if col_max[hi as usize] - col_min[lo as usize] <= -1 {
                        continue;
                    }
                    blocks_enumerated += 1;
                    if blocks_enumerated * per_col * per_col + enumerated > budget {
                        return Err(Error::Budget(format!(
                            "cross-column enumeration exceeds the budget of {budget}; use sampled mode"
                        )));
                    }
                    for a in col_range(lo) {
                        for b in col_range(hi) {
                            enumerated += 1;
                            if let Some(rule) = check_pair(a, b) {
                                record(a, b, rule);
                            }
                        }
                    }
                }
            }
            report.pairs_covered = total_pairs;
            report.pairs_enumerated = enumerated;
            report.within_column_pairs = within;
            report.cross_column_blocks = blocks;
            report.cross_column_blocks_enumerated = blocks_enumerated;
        }
        MonotonicityMode::Sampled { samples, seed } => {
            report.mode = "sampled";
            if n >= 2 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..samples {
                    let a = rng.gen_range(0..n as usize);
                    let mut b = rng.gen_range(0..n as usize - 1);
                    if b >= a {
                        b += 1;
                    }
                    let (lo, hi) = (a.min(b), a.max(b));
                    if let Some(rule) = check_pair(lo, hi) {
                        record(lo, hi, rule);
                    }
                }
                report.pairs_covered = samples;
                report.pairs_enumerated = samples;
            }
        }
    }

    let min_at = model.exponent_at(IndexCoord {
        nu: shape.columns - 1,
        mu: 0,
        lambda: 1,
    });
    let max_at = model.exponent_at(IndexCoord {
        nu: 0,
        mu: shape.parts_per_column - 1,
        lambda: shape.part_size,
    });
    report.extremes_ok = report.min_exponent == Exponent::new(1, k)
        && min_at == report.min_exponent
        && report.max_exponent == Exponent::new(1, 2)
        && max_at == report.max_exponent;
    report.violation_count = violation_count;
    report.violations = violations;
    report.passed = violation_count == 0
        && decode_mismatches == 0
        && formula_mismatches == 0
        && report.extremes_ok;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ept::derive_params;

    fn model(ell: u64, mult: u64) -> ExponentModel {
        ExponentModel::from_params(&derive_params(ell, mult).unwrap()).unwrap()
    }

    #[test]
    fn first_and_extreme_exponents() {
        let m = model(1, 1);
        let k = m.k() as i64;
        assert_eq!(
            m.exponent(1).unwrap().ratio(),
            Ratio::new(15, 31) + Ratio::new(1, k)
        );
        let top = m
            .compose(IndexCoord {
                nu: 0,
                mu: 78,
                lambda: 1,
            })
            .unwrap();
        assert_eq!(m.exponent(top).unwrap(), Exponent::new(1, 2));
        let bottom = m
            .compose(IndexCoord {
                nu: 30,
                mu: 0,
                lambda: 1,
            })
            .unwrap();
        assert_eq!(m.exponent(bottom).unwrap(), Exponent::new(1, k));
    }

    #[test]
    fn decomposition_round_trip() {
        let m = model(1, 3);
        for i in 1..=m.len() {
            assert_eq!(m.compose(m.decompose(i).unwrap()).unwrap(), i);
        }
        assert!(m.decompose(0).is_err());
        assert!(m.decompose(m.len() + 1).is_err());
        assert!(m
            .compose(IndexCoord {
                nu: 31,
                mu: 0,
                lambda: 1
            })
            .is_err());
        assert!(m
            .compose(IndexCoord {
                nu: 0,
                mu: 0,
                lambda: 0
            })
            .is_err());
    }

    #[test]
    fn part_boundary_step_is_one_unit() {
        let m = model(1, 4);
        let lo = m.exponent_at(IndexCoord {
            nu: 5,
            mu: 0,
            lambda: 4,
        });
        let hi = m.exponent_at(IndexCoord {
            nu: 5,
            mu: 1,
            lambda: 1,
        });
        assert_eq!(hi - lo, m.unit());
        // 1/(62J) - (K-1)/k with K = k/(62J).
        let k = m.k() as i64;
        assert_eq!((hi - lo).ratio(), Ratio::new(1, 62 * 79) - Ratio::new(3, k));
    }

    fn gap_exponent_oracle(m: &ExponentModel, i: u64, j: u64) -> Exponent {
        (i + 1..=j).map(|t| m.exponent(t).unwrap()).max().unwrap()
    }

    #[test]
    fn gap_exponent_matches_brute_force() {
        let shape = PartitionShape::new(4, 3, 2).unwrap();
        let m = ExponentModel::new(shape).unwrap();
        for i in 1..m.len() {
            for j in i + 1..=m.len() {
                assert_eq!(
                    gap_exponent(&m, i, j).unwrap(),
                    gap_exponent_oracle(&m, i, j)
                );
            }
        }
        assert!(gap_exponent(&m, 3, 3).is_err());
        assert_eq!(gap_exponent(&m, 4, 5).unwrap(), m.exponent(5).unwrap());
    }

    #[test]
    fn exhaustive_monotonicity_small() {
        let shape = PartitionShape::new(3, 2, 2).unwrap();
        let m = ExponentModel::new(shape).unwrap();
        let r = verify_monotonicity(&m, MonotonicityMode::Exhaustive { budget: 1000 }).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.pairs_covered, 12 * 11 / 2);
    }

    #[test]
    fn budget_is_enforced() {
        let m = model(1, 1);
        let r = verify_monotonicity(&m, MonotonicityMode::Exhaustive { budget: 10 });
        assert!(matches!(r, Err(Error::Budget(_))));
        let r = verify_monotonicity(
            &m,
            MonotonicityMode::Sampled {
                samples: 10_000,
                seed: 7,
            },
        )
        .unwrap();
        assert!(r.passed);
        assert_eq!(r.mode, "sampled");
    }

    #[test]
    fn display_reduces() {
        assert_eq!(Exponent::new(2449, 4898).to_string(), "1/2");
        assert_eq!(Exponent::new(-3, 4898).to_string(), "-3/4898");
    }
}
