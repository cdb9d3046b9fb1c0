use serde::Serialize;

use super::exponent::{gap_exponent, Exponent, ExponentModel};
use super::selection::Selection;
use crate::error::{Error, Result};

/// `E(d_{m-a}) - E(d_{m-b}) >= (b - a) / k` for `0 <= a < b <= ell`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeftInequality {
    pub a: u64,
    pub b: u64,
    pub exponent_a: Exponent,
    pub exponent_b: Exponent,
    pub difference: Exponent,
    pub required: Exponent,
    pub holds: bool,
}

/// `E(d_m) - E(d_{m+t}) >= 1/k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RightInequality {
    pub t: u64,
    /// `d_{m+t}` spans tuple indices `(interval.0, interval.1]`.
    pub interval: (u64, u64),
    pub exponent_peak: Exponent,
    pub exponent_successor: Exponent,
    pub difference: Exponent,
    pub required: Exponent,
    pub holds: bool,
    /// The successor gap's exponent comes from non-prime indices of the
    /// chosen column lying above the chosen index.
    pub column_tail: bool,
}

/// One gap below the peak: `d_{m-offset}` spans `(lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapTerm {
    pub offset: u64,
    pub lo: u64,
    pub hi: u64,
    pub exponent: Exponent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimReport {
    pub column: u64,
    pub chosen: u64,
    pub ell: u64,
    pub left_gaps: Vec<GapTerm>,
    pub left: Vec<LeftInequality>,
    pub right: Vec<RightInequality>,
    pub left_holds: bool,
    pub right_holds: bool,
}

/// Evaluates the peak-dominance inequalities of a selection at the
/// exponent level.
///
/// Left: the `ell + 1` gaps ending at the chosen prime strictly increase by
/// at least one unit `1/k` per step. Right: the peak gap beats each of the
/// next `ell` gaps by at least `1/k`, where a successor gap's exponent is
/// the maximum over every index it spans, prime-bearing or not. Each
/// inequality is reported on its own; nothing is folded away.
pub fn check_claims(selection: &Selection, model: &ExponentModel) -> Result<ClaimReport> {
    let threshold = selection.threshold;
    if selection.predecessors.len() as u64 != threshold.saturating_sub(1) {
        return Err(Error::contract(format!(
            "selection carries {} predecessors, expected {}",
            selection.predecessors.len(),
            threshold.saturating_sub(1)
        )));
    }
    let ell = threshold.saturating_sub(2);
    let unit = model.unit();
    let k = model.k() as i64;

    // q_0 = chosen, q_1, q_2, ... walking down the column.
    let chain: Vec<u64> = std::iter::once(selection.chosen)
        .chain(selection.predecessors.iter().rev().copied())
        .collect();
    let left_gaps = chain
        .windows(2)
        .enumerate()
        .map(|(a, w)| {
            Ok(GapTerm {
                offset: a as u64,
                lo: w[1],
                hi: w[0],
                exponent: gap_exponent(model, w[1], w[0])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut left = Vec::new();
    for (a, ga) in left_gaps.iter().enumerate() {
        for (b, gb) in left_gaps.iter().enumerate().skip(a + 1) {
            let difference = ga.exponent - gb.exponent;
            let required = Exponent::new((b - a) as i64, k);
            left.push(LeftInequality {
                a: a as u64,
                b: b as u64,
                exponent_a: ga.exponent,
                exponent_b: gb.exponent,
                difference,
                required,
                holds: difference >= required,
            });
        }
    }

    let mut right = Vec::new();
    if let Some(peak) = left_gaps.first() {
        let (_, column_top) = model.column_bounds(selection.column);
        let tail = (selection.chosen < column_top)
            .then(|| model.exponent(column_top))
            .transpose()?;
        let mut prev = selection.chosen;
        for (t, &next) in (1..=ell).zip(selection.successors.iter()) {
            let succ = gap_exponent(model, prev, next)?;
            let difference = peak.exponent - succ;
            right.push(RightInequality {
                t,
                interval: (prev, next),
                exponent_peak: peak.exponent,
                exponent_successor: succ,
                difference,
                required: unit,
                holds: difference >= unit,
                column_tail: t == 1 && tail == Some(succ),
            });
            prev = next;
        }
    }

    Ok(ClaimReport {
        column: selection.column,
        chosen: selection.chosen,
        ell,
        left_holds: left.iter().all(|x| x.holds),
        right_holds: right.iter().all(|x| x.holds),
        left_gaps,
        left,
        right,
    })
}
