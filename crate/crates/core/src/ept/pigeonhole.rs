use serde::Serialize;

use super::params::{EptParameters, PartitionShape};
use crate::error::{Error, Result};

/// Both counting inequalities behind the selection rule, sides spelled out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PigeonholeReport {
    #[serde(rename = "L")]
    pub big_l: u64,
    pub m_plus_1: u64,
    /// `31L`: the stated cap on primes when no column reaches `L`.
    pub no_column_bound: u64,
    /// `31(L - 1)`: the sharper per-column cap.
    pub no_column_bound_sharp: u64,
    pub no_column_holds: bool,
    /// `30(L - 1) + J`: cap when later columns hold fewer than `L` primes.
    pub sparse_later_bound: u64,
    /// `62L - 47`, the closed form of the previous line.
    pub sparse_later_closed_form: u64,
    pub sparse_later_holds: bool,
    pub holds: bool,
}

/// Counting bounds for threshold `L` with `m = 62L - 33`, `J = 32L - 17`.
pub fn pigeonhole_bounds_for_l(big_l: u64) -> Result<PigeonholeReport> {
    if big_l < 1 {
        return Err(Error::contract("L must be at least 1"));
    }
    if big_l > u64::MAX / 1024 {
        return Err(Error::range(format!("L = {big_l} overflows the bounds")));
    }
    let m = 62 * big_l - 33;
    let j = 32 * big_l - 17;
    let m_plus_1 = m + 1;
    let no_column_bound = 31 * big_l;
    let sparse_later_bound = 30 * (big_l - 1) + j;
    // 62L - 47 underflows for L = 0 only, which is rejected above.
    let closed = 62 * big_l - 47;
    let no_column_holds = no_column_bound < m_plus_1 && m_plus_1 == 62 * big_l - 32;
    let sparse_later_holds = sparse_later_bound == closed && sparse_later_bound < m_plus_1;
    Ok(PigeonholeReport {
        big_l,
        m_plus_1,
        no_column_bound,
        no_column_bound_sharp: 31 * (big_l - 1),
        no_column_holds,
        sparse_later_bound,
        sparse_later_closed_form: closed,
        sparse_later_holds,
        holds: no_column_holds && sparse_later_holds,
    })
}

pub fn pigeonhole_bounds(params: &EptParameters) -> Result<PigeonholeReport> {
    pigeonhole_bounds_for_l(params.big_l)
}

/// Largest number of occupied parts for which the selection rule with
/// threshold `L` can still fail on `shape`.
///
/// A failing placement has no column with at least `L` primes followed by
/// at least `L` primes in later columns. If columns can hold `L` primes at
/// all (`J >= L`), the worst case fills every column but the last with
/// `L - 1` primes and the last one completely. Otherwise every placement
/// fails.
pub fn generalized_failure_max(shape: &PartitionShape, big_l: u64) -> u64 {
    let c = shape.columns;
    let j = shape.parts_per_column;
    if j < big_l {
        c * j
    } else {
        (c - 1) * big_l.saturating_sub(1) + j
    }
}

/// Occupancy that guarantees the selection rule succeeds, if any.
pub fn generalized_occupancy_bound(shape: &PartitionShape, big_l: u64) -> Option<u64> {
    let bound = generalized_failure_max(shape, big_l) + 1;
    (bound <= shape.parts()).then_some(bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluated_at_three() {
        let r = pigeonhole_bounds_for_l(3).unwrap();
        assert_eq!((r.no_column_bound, r.m_plus_1), (93, 154));
        assert_eq!(r.sparse_later_bound, 60 + 79);
        assert_eq!(r.sparse_later_bound, 139);
        assert!(r.holds);
    }

    #[test]
    fn evaluated_at_two() {
        let r = pigeonhole_bounds_for_l(2).unwrap();
        assert_eq!((r.no_column_bound, r.m_plus_1), (62, 92));
        assert_eq!(r.sparse_later_bound, 77);
        assert!(r.holds);
        assert!(pigeonhole_bounds_for_l(0).is_err());
    }

    #[test]
    fn full_scale_bound_is_below_m_plus_1() {
        for big_l in 3..=50 {
            let j = 32 * big_l - 17;
            let shape = PartitionShape::new(31, j, 1).unwrap();
            let b = generalized_occupancy_bound(&shape, big_l).unwrap();
            assert_eq!(b, 62 * big_l - 46);
            assert!(b <= 62 * big_l - 32);
        }
    }

    #[test]
    fn starved_columns() {
        let shape = PartitionShape::new(3, 1, 2).unwrap();
        assert_eq!(generalized_failure_max(&shape, 2), 3);
        assert_eq!(generalized_occupancy_bound(&shape, 2), None);
    }
}
