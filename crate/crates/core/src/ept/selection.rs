use std::collections::BTreeMap;

use serde::Serialize;

use super::exponent::{ExponentModel, IndexCoord};
use crate::error::{Error, Result};

/// Identifies part `mu` of column `nu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PartId {
    pub nu: u64,
    pub mu: u64,
}

/// Prime-bearing parts, each with the single position `lambda` its prime
/// occupies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Placement {
    primes: BTreeMap<PartId, u64>,
}

impl Placement {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the prime of part `(nu, mu)` at position `lambda`.
    pub fn insert(&mut self, nu: u64, mu: u64, lambda: u64) -> Result<()> {
        let id = PartId { nu, mu };
        if self.primes.contains_key(&id) {
            return Err(Error::contract(format!(
                "part ({nu}, {mu}) already holds a prime"
            )));
        }
        self.primes.insert(id, lambda);
        Ok(())
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (u64, u64, u64)>) -> Result<Self> {
        let mut p = Placement::new();
        for (nu, mu, lambda) in entries {
            p.insert(nu, mu, lambda)?;
        }
        Ok(p)
    }

    pub fn occupied(&self) -> usize {
        self.primes.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (PartId, u64)> + '_ {
        self.primes.iter().map(|(&id, &l)| (id, l))
    }

    /// Sorted tuple indices of all primes; fails if any entry lies outside
    /// the model's box.
    pub fn prime_indices(&self, model: &ExponentModel) -> Result<Vec<u64>> {
        // BTreeMap order on (nu, mu) is index order.
        self.primes
            .iter()
            .map(|(id, &lambda)| {
                model.compose(IndexCoord {
                    nu: id.nu,
                    mu: id.mu,
                    lambda,
                })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::contract(format!("malformed placement: {e}")))
    }
}

/// Outcome of a successful selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Selection {
    pub column: u64,
    /// Largest prime-bearing index in the chosen column.
    pub chosen: u64,
    /// The `L - 1` prime indices directly below `chosen`, ascending.
    pub predecessors: Vec<u64>,
    /// Every prime index in later columns, ascending.
    pub successors: Vec<u64>,
    pub column_counts: Vec<u64>,
    pub threshold: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum SelectionFailure {
    /// No column holds `L` primes.
    NoColumn { max_column_count: u64 },
    /// Some column holds `L` primes, but none of them is followed by `L`
    /// primes in later columns.
    SparseLater {
        first_column: u64,
        later_primes: u64,
    },
}

impl SelectionFailure {
    pub fn as_str(&self) -> &'static str {
        match self {
            SelectionFailure::NoColumn { .. } => "no_column",
            SelectionFailure::SparseLater { .. } => "sparse_later",
        }
    }
}

/// Picks the first column (ascending `nu`) holding at least `threshold`
/// primes with at least `threshold` primes in later columns combined.
pub fn select_peak(
    placement: &Placement,
    model: &ExponentModel,
    threshold: u64,
) -> Result<std::result::Result<Selection, SelectionFailure>> {
    if threshold == 0 {
        return Err(Error::contract("selection threshold must be at least 1"));
    }
    let indices = placement.prime_indices(model)?;
    let columns = model.shape().columns;
    let mut counts = vec![0u64; columns as usize];
    for &i in &indices {
        counts[model.column_of(i)? as usize] += 1;
    }
    let mut later: u64 = counts.iter().sum();
    let mut first_full = None;
    for (nu, &count) in counts.iter().enumerate() {
        later -= count;
        if count < threshold {
            continue;
        }
        first_full.get_or_insert(nu as u64);
        if later < threshold {
            continue;
        }
        let nu = nu as u64;
        let (lo, hi) = model.column_bounds(nu);
        let in_column: Vec<u64> = indices
            .iter()
            .copied()
            .filter(|&i| (lo..=hi).contains(&i))
            .collect();
        let chosen = *in_column.last().expect("column has primes");
        let predecessors =
            in_column[in_column.len() - threshold as usize..in_column.len() - 1].to_vec();
        let successors = indices.iter().copied().filter(|&i| i > hi).collect();
        return Ok(Ok(Selection {
            column: nu,
            chosen,
            predecessors,
            successors,
            column_counts: counts,
            threshold,
        }));
    }
    Ok(Err(match first_full {
        None => SelectionFailure::NoColumn {
            max_column_count: counts.iter().copied().max().unwrap_or(0),
        },
        Some(first_column) => SelectionFailure::SparseLater {
            first_column,
            later_primes: counts[first_column as usize + 1..].iter().sum(),
        },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ept::PartitionShape;

    fn toy() -> ExponentModel {
        ExponentModel::new(PartitionShape::new(3, 2, 2).unwrap()).unwrap()
    }

    #[test]
    fn picks_middle_column() {
        let m = toy();
        let p = Placement::from_entries([(1, 0, 2), (1, 1, 1), (2, 0, 1), (2, 1, 2)]).unwrap();
        let s = select_peak(&p, &m, 2).unwrap().unwrap();
        assert_eq!(s.column, 1);
        // column 1 spans indices 5..=8; (1,1,1) is index 7.
        assert_eq!(s.chosen, 7);
        assert_eq!(s.predecessors, vec![6]);
        assert_eq!(s.successors, vec![9, 12]);
        assert_eq!(s.column_counts, vec![0, 2, 2]);
    }

    #[test]
    fn reports_failures() {
        let m = toy();
        let p = Placement::from_entries([(0, 0, 1), (1, 0, 1), (2, 0, 1)]).unwrap();
        assert_eq!(
            select_peak(&p, &m, 2).unwrap().unwrap_err(),
            SelectionFailure::NoColumn {
                max_column_count: 1
            }
        );
        let p = Placement::from_entries([(0, 0, 1), (0, 1, 1), (2, 0, 1)]).unwrap();
        assert_eq!(
            select_peak(&p, &m, 2).unwrap().unwrap_err(),
            SelectionFailure::SparseLater {
                first_column: 0,
                later_primes: 1
            }
        );
    }

    #[test]
    fn first_full_column_is_the_selected_one() {
        let shape = PartitionShape::new(4, 2, 1).unwrap();
        let m = ExponentModel::new(shape).unwrap();
        let p = Placement::from_entries([(0, 0, 1), (1, 0, 1), (1, 1, 1), (2, 0, 1), (3, 1, 1)])
            .unwrap();
        let s = select_peak(&p, &m, 2).unwrap().unwrap();
        assert_eq!(s.column, 1);
        assert_eq!(s.successors.len(), 2);
        // Later totals only shrink, so once the first full column fails
        // every later one fails too.
        let p = Placement::from_entries([(0, 0, 1), (0, 1, 1), (3, 0, 1), (3, 1, 1)]).unwrap();
        let s = select_peak(&p, &m, 2).unwrap().unwrap();
        assert_eq!(s.column, 0);
        let p = Placement::from_entries([(0, 0, 1), (2, 0, 1), (2, 1, 1), (3, 0, 1)]).unwrap();
        assert_eq!(
            select_peak(&p, &m, 2).unwrap().unwrap_err(),
            SelectionFailure::SparseLater {
                first_column: 2,
                later_primes: 1
            }
        );
    }

    #[test]
    fn malformed_placements() {
        let m = toy();
        let mut p = Placement::new();
        p.insert(0, 0, 1).unwrap();
        assert!(matches!(p.insert(0, 0, 2), Err(Error::Contract(_))));
        let p = Placement::from_entries([(0, 0, 3)]).unwrap();
        assert!(matches!(select_peak(&p, &m, 2), Err(Error::Contract(_))));
        let p = Placement::from_entries([(3, 0, 1)]).unwrap();
        assert!(matches!(select_peak(&p, &m, 2), Err(Error::Contract(_))));
    }
}
