use serde::Serialize;

use crate::error::{Error, Result};

/// Number of columns in the full-scale partition.
pub const COLUMNS: u64 = 31;

/// Derived parameter schedule for a window size `ell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EptParameters {
    pub ell: u64,
    #[serde(rename = "L")]
    pub big_l: u64,
    pub m: u64,
    #[serde(rename = "J")]
    pub j: u64,
    pub k: u64,
    #[serde(rename = "K")]
    pub big_k: u64,
    pub columns: u64,
}

/// The shape of a column partition: `columns * parts_per_column` parts of
/// `part_size` indices each.
///
/// The full-scale construction is `31 x J x K`; smaller shapes exist so the
/// counting argument can be model-checked exhaustively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PartitionShape {
    pub columns: u64,
    pub parts_per_column: u64,
    pub part_size: u64,
}

impl PartitionShape {
    pub fn new(columns: u64, parts_per_column: u64, part_size: u64) -> Result<Self> {
        if columns == 0 || parts_per_column == 0 || part_size == 0 {
            return Err(Error::contract(format!(
                "partition dimensions must be positive, got {columns}x{parts_per_column}x{part_size}"
            )));
        }
        let shape = PartitionShape {
            columns,
            parts_per_column,
            part_size,
        };
        shape
            .checked_k()
            .ok_or_else(|| Error::range("partition shape overflows 64-bit index space"))?;
        Ok(shape)
    }

    fn checked_k(&self) -> Option<u64> {
        2u64.checked_mul(self.columns)?
            .checked_mul(self.parts_per_column)?
            .checked_mul(self.part_size)
    }

    pub fn parts(&self) -> u64 {
        self.columns * self.parts_per_column
    }

    /// Number of indexed tuple positions, `columns * J * K`.
    pub fn indices(&self) -> u64 {
        self.parts() * self.part_size
    }

    /// Exponent denominator `k = 2 * columns * J * K`.
    pub fn k(&self) -> u64 {
        2 * self.indices()
    }
}

/// Each identity of the schedule with both sides spelled out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub sixteen_m_plus_1: u64,
    pub thirty_one_j: u64,
    pub closed_form_992l_minus_527: u64,
    pub m_closed_form_62ell_plus_91: u64,
    pub sixty_two_j_times_big_k: u64,
    pub k: u64,
    pub k_divisible_by_twice_parts: bool,
    pub holds: bool,
}

impl EptParameters {
    /// `16m + 1`, the number of partition parts.
    pub fn parts(&self) -> u64 {
        16 * self.m + 1
    }

    pub fn shape(&self) -> PartitionShape {
        PartitionShape {
            columns: self.columns,
            parts_per_column: self.j,
            part_size: self.big_k,
        }
    }

    pub fn identities(&self) -> IdentityReport {
        let sixteen_m_plus_1 = self.parts();
        let thirty_one_j = 31 * self.j;
        let closed = 992 * self.big_l - 527;
        let m_closed = 62 * self.ell + 91;
        let product = 62 * self.j * self.big_k;
        let divisible = self.k.is_multiple_of(2 * sixteen_m_plus_1);
        IdentityReport {
            sixteen_m_plus_1,
            thirty_one_j,
            closed_form_992l_minus_527: closed,
            m_closed_form_62ell_plus_91: m_closed,
            sixty_two_j_times_big_k: product,
            k: self.k,
            k_divisible_by_twice_parts: divisible,
            holds: sixteen_m_plus_1 == thirty_one_j
                && thirty_one_j == closed
                && m_closed == self.m
                && product == self.k
                && divisible
                && self.big_k >= 1,
        }
    }
}

/// Schedule for window size `ell` with `k = k_multiplier * 2(16m + 1)`.
pub fn derive_params(ell: u64, k_multiplier: u64) -> Result<EptParameters> {
    if ell == 0 {
        return Err(Error::contract("ell must be at least 1"));
    }
    if k_multiplier == 0 {
        return Err(Error::contract("k multiplier must be at least 1"));
    }
    let overflow = || Error::range(format!("parameters for ell={ell} overflow 64 bits"));
    let big_l = ell.checked_add(2).ok_or_else(overflow)?;
    let m = big_l
        .checked_mul(62)
        .and_then(|x| x.checked_sub(33))
        .ok_or_else(overflow)?;
    let j = big_l
        .checked_mul(32)
        .and_then(|x| x.checked_sub(17))
        .ok_or_else(overflow)?;
    let parts = m
        .checked_mul(16)
        .and_then(|x| x.checked_add(1))
        .ok_or_else(overflow)?;
    let k = parts
        .checked_mul(2)
        .and_then(|x| x.checked_mul(k_multiplier))
        .ok_or_else(|| {
            Error::range(format!(
                "k = {k_multiplier} * 2 * {parts} overflows 64 bits"
            ))
        })?;
    let params = EptParameters {
        ell,
        big_l,
        m,
        j,
        k,
        big_k: k / (62 * j),
        columns: COLUMNS,
    };
    PartitionShape::new(params.columns, params.j, params.big_k)?;
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ell_one() {
        let p = derive_params(1, 1).unwrap();
        assert_eq!((p.big_l, p.m, p.j), (3, 153, 79));
        assert_eq!(p.parts(), 2449);
        assert_eq!(p.parts(), 31 * 79);
        assert_eq!((p.k, p.big_k), (4898, 1));
        assert!(p.identities().holds);
    }

    #[test]
    fn ell_two() {
        let p = derive_params(2, 3).unwrap();
        assert_eq!((p.big_l, p.m, p.j), (4, 215, 111));
        assert_eq!(p.parts(), 3441);
        assert_eq!(31 * 111, 3441);
        assert_eq!(p.big_k, 3);
        assert!(p.identities().holds);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(derive_params(0, 1), Err(Error::Contract(_))));
        assert!(matches!(derive_params(1, 0), Err(Error::Contract(_))));
        assert!(matches!(
            derive_params(1, u64::MAX / 100),
            Err(Error::Range(_))
        ));
        assert!(matches!(derive_params(u64::MAX, 1), Err(Error::Range(_))));
    }

    #[test]
    fn shape_sizes() {
        let s = derive_params(1, 2).unwrap().shape();
        assert_eq!(s.parts(), 2449);
        assert_eq!(s.indices(), 2449 * 2);
        assert_eq!(s.k(), 4898 * 2);
        assert!(PartitionShape::new(0, 1, 1).is_err());
    }
}
