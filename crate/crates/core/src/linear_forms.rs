//! Linear forms `T_n = sum_i a_i p_{n+i}` in consecutive primes.
//!
//! A form with zero coefficient sum can be rewritten through its prefix sums
//! `alpha_j = a_1 + ... + a_j` as a form in gaps:
//!
//! ```text
//! T_n = - sum_{j=2..k} alpha_{j-1} d_{n+j}
//! ```
//!
//! so the sign pattern of `alpha_1 .. alpha_{k-1}` decides whether `T_n` can
//! change sign at all. All arithmetic is exact (`i128`).

use std::cmp::Ordering;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sieve::{GapAccess, PrimeAccess};

/// Integer coefficients `a_1 .. a_k`, `k >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearForm {
    coeffs: Vec<i64>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::contract(format!(
                "a linear form needs at least 2 coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(LinearForm { coeffs })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero_sum(&self) -> bool {
        self.coeffs.iter().map(|&a| a as i128).sum::<i128>() == 0
    }

    pub fn alpha_profile(&self) -> AlphaProfile {
        alpha_profile(self)
    }
}

/// Prefix sums of a form's coefficients; `alpha_0 = 0` is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaProfile {
    alpha: Vec<i64>,
}

impl AlphaProfile {
    /// `alpha_1 .. alpha_k`.
    pub fn alpha(&self) -> &[i64] {
        &self.alpha
    }

    /// `alpha_j` for `0 <= j <= k`.
    pub fn get(&self, j: usize) -> i64 {
        if j == 0 {
            0
        } else {
            self.alpha[j - 1]
        }
    }

    /// Number of gaps the transformed form spans, `k - 1`.
    pub fn ell(&self) -> usize {
        self.alpha.len() - 1
    }

    /// `alpha_k`, the coefficient sum.
    pub fn total(&self) -> i64 {
        *self.alpha.last().expect("profile is never empty")
    }

    /// The inner coefficients `alpha_1 .. alpha_{k-1}` of the gap form.
    pub fn inner(&self) -> &[i64] {
        &self.alpha[..self.alpha.len() - 1]
    }

    /// Recovers the coefficients by first differencing.
    pub fn to_form(&self) -> LinearForm {
        let coeffs = std::iter::once(0)
            .chain(self.alpha.iter().copied())
            .collect::<Vec<_>>()
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect();
        LinearForm { coeffs }
    }
}

pub fn alpha_profile(form: &LinearForm) -> AlphaProfile {
    let alpha = form
        .coeffs
        .iter()
        .scan(0i64, |acc, &a| {
            *acc += a;
            Some(*acc)
        })
        .collect();
    AlphaProfile { alpha }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FormClass {
    /// Coefficients do not sum to zero; the form cannot change sign
    /// infinitely often.
    NotZeroSum,
    /// All nonzero inner alphas share one sign (or all vanish).
    OneSigned,
    /// Inner alphas take both signs.
    MixedSign,
}

impl FormClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            FormClass::NotZeroSum => "NOT_ZERO_SUM",
            FormClass::OneSigned => "ONE_SIGNED",
            FormClass::MixedSign => "MIXED_SIGN",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub class: FormClass,
    /// `alpha_1 + ... + alpha_{k-1} = 0` and `alpha_{k-1} != 0`.
    pub erdos_easy: bool,
    /// Every inner alpha is zero, so `T_n` vanishes identically.
    pub degenerate: bool,
    /// Sign forced on every nonzero `T_n` for one-signed zero-sum forms:
    /// `-1`, `1`, or `0` when degenerate. `None` otherwise.
    pub forced_sign: Option<i8>,
}

pub fn classify(form: &LinearForm) -> Classification {
    let profile = alpha_profile(form);
    let inner = profile.inner();
    let inner_sum: i128 = inner.iter().map(|&a| a as i128).sum();
    let erdos_easy = inner_sum == 0 && inner.last().is_some_and(|&a| a != 0);
    let has_pos = inner.iter().any(|&a| a > 0);
    let has_neg = inner.iter().any(|&a| a < 0);
    let degenerate = !has_pos && !has_neg;

    if !form.is_zero_sum() {
        return Classification {
            class: FormClass::NotZeroSum,
            erdos_easy,
            degenerate,
            forced_sign: None,
        };
    }
    let (class, forced_sign) = match (has_pos, has_neg) {
        (true, true) => (FormClass::MixedSign, None),
        // T_n = -sum alpha_{j-1} d_{n+j} with every d positive.
        (true, false) => (FormClass::OneSigned, Some(-1)),
        (false, true) => (FormClass::OneSigned, Some(1)),
        (false, false) => (FormClass::OneSigned, Some(0)),
    };
    Classification {
        class,
        erdos_easy,
        degenerate,
        forced_sign,
    }
}

/// `T_n = sum_{i=1..k} a_i p_{n+i}`.
pub fn evaluate_direct(form: &LinearForm, n: usize, primes: &impl PrimeAccess) -> Result<i128> {
    form.coeffs
        .iter()
        .enumerate()
        .try_fold(0i128, |acc, (i, &a)| {
            let idx = n + i + 1;
            let p = primes
                .prime(idx)
                .ok_or_else(|| Error::range(format!("prime index {idx} is not available")))?;
            Ok(acc + a as i128 * p as i128)
        })
}

/// `-sum_{j=2..k} alpha_{j-1} d_{n+j}`; equals [`evaluate_direct`] for
/// zero-sum forms.
pub fn evaluate_gap_form(profile: &AlphaProfile, n: usize, gaps: &impl GapAccess) -> Result<i128> {
    if profile.total() != 0 {
        return Err(Error::contract(format!(
            "gap form requires a zero-sum profile, alpha_k = {}",
            profile.total()
        )));
    }
    let k = profile.alpha.len();
    (2..=k).try_fold(0i128, |acc, j| {
        let idx = n + j;
        let d = gaps
            .gap(idx)
            .ok_or_else(|| Error::range(format!("gap index {idx} is not available")))?;
        Ok(acc - profile.get(j - 1) as i128 * d as i128)
    })
}

/// Streaming sign-change detector. Zero values are transparent: they
/// neither count as a change nor reset the last observed sign.
#[derive(Debug, Clone, Default)]
pub struct SignTracker {
    last: Option<Ordering>,
    changes: usize,
    positions: Vec<usize>,
}

impl SignTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feeds value at index `n`; returns true when it flips the sign.
    pub fn push(&mut self, n: usize, value: i128) -> bool {
        let sign = value.cmp(&0);
        if sign == Ordering::Equal {
            return false;
        }
        let flipped = self.last.is_some_and(|s| s != sign);
        if flipped {
            self.changes += 1;
            self.positions.push(n);
        }
        self.last = Some(sign);
        flipped
    }

    pub fn changes(&self) -> usize {
        self.changes
    }

    pub fn finish(self) -> SignChanges {
        SignChanges {
            count: self.changes,
            positions: self.positions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignChanges {
    pub count: usize,
    /// The later index of each change.
    pub positions: Vec<usize>,
}

/// Counts sign changes of `T_n` for `n` in `range`.
pub fn count_sign_changes(
    form: &LinearForm,
    range: RangeInclusive<usize>,
    gaps: &impl GapAccess,
) -> Result<SignChanges> {
    let mut tracker = SignTracker::new();
    for_each_value(form, range, gaps, |n, t| {
        tracker.push(n, t);
    })?;
    Ok(tracker.finish())
}

/// Calls `f(n, T_n)` over `range`, evaluating through the gap form.
pub fn for_each_value(
    form: &LinearForm,
    range: RangeInclusive<usize>,
    gaps: &impl GapAccess,
    mut f: impl FnMut(usize, i128),
) -> Result<()> {
    if !form.is_zero_sum() {
        return Err(Error::contract(
            "sign changes are only tracked for zero-sum forms",
        ));
    }
    let profile = alpha_profile(form);
    for n in range {
        f(n, evaluate_gap_form(&profile, n, gaps)?);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{GapSeries, PrimeTable};

    fn form(a: &[i64]) -> LinearForm {
        LinearForm::new(a.to_vec()).unwrap()
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(form(&[1, -1]).alpha_profile().alpha(), &[1, 0]);
        assert_eq!(form(&[-1, 2, -1]).alpha_profile().alpha(), &[-1, 1, 0]);
        assert_eq!(form(&[1, 0, -1]).alpha_profile().alpha(), &[1, 1, 0]);
        assert_eq!(
            form(&[3, 4, -2]).alpha_profile().to_form(),
            form(&[3, 4, -2])
        );
    }

    #[test]
    fn rejects_short_forms() {
        assert!(LinearForm::new(vec![1]).is_err());
        assert!(LinearForm::new(vec![]).is_err());
    }

    #[test]
    fn classification_examples() {
        let c = classify(&form(&[1, -1]));
        assert_eq!(c.class, FormClass::OneSigned);
        assert_eq!(c.forced_sign, Some(-1));

        let c = classify(&form(&[-1, 2, -1]));
        assert_eq!(c.class, FormClass::MixedSign);
        assert!(c.erdos_easy);

        let c = classify(&form(&[2, -1, -1]));
        assert_eq!(c.class, FormClass::OneSigned);
        assert!(!c.erdos_easy);

        assert_eq!(classify(&form(&[1, 1])).class, FormClass::NotZeroSum);

        let c = classify(&form(&[0, 0]));
        assert_eq!(c.class, FormClass::OneSigned);
        assert!(c.degenerate);
        assert_eq!(c.forced_sign, Some(0));
    }

    #[test]
    fn evaluation_examples() {
        let t = PrimeTable::first(20).unwrap();
        assert_eq!(evaluate_direct(&form(&[1, -1]), 1, &t).unwrap(), -2);
        assert_eq!(evaluate_direct(&form(&[1, -2, 1]), 1, &t).unwrap(), 0);
        assert_eq!(evaluate_direct(&form(&[0, 0]), 7, &t).unwrap(), 0);

        let p = form(&[1, -1]).alpha_profile();
        assert_eq!(evaluate_gap_form(&p, 1, &t).unwrap(), -2);
        let p = form(&[1, -2, 1]).alpha_profile();
        assert_eq!(evaluate_gap_form(&p, 1, &t).unwrap(), 0);

        assert!(matches!(
            evaluate_direct(&form(&[1, -1]), 19, &t),
            Err(Error::Range(_))
        ));
        assert!(matches!(
            evaluate_gap_form(&form(&[1, 1]).alpha_profile(), 1, &t),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn constant_gaps_cancel() {
        let g = GapSeries::new(2, vec![6; 50]);
        let p = form(&[1, -2, 1]).alpha_profile();
        for n in 0..40 {
            assert_eq!(evaluate_gap_form(&p, n, &g).unwrap(), 0);
        }
    }

    #[test]
    fn tracker_skips_zeros() {
        let mut t = SignTracker::new();
        for (n, v) in [(1, 3), (2, 0), (3, 5), (4, 0), (5, -1), (6, 0), (7, 2)] {
            t.push(n, v);
        }
        let s = t.finish();
        assert_eq!(s.count, 2);
        assert_eq!(s.positions, vec![5, 7]);
    }

    #[test]
    fn sign_change_examples() {
        let t = PrimeTable::first(12_000).unwrap();
        let s = count_sign_changes(&form(&[1, -1]), 2..=10_000, &t).unwrap();
        assert_eq!(s.count, 0);
        let s = count_sign_changes(&form(&[-1, 2, -1]), 2..=1_000, &t).unwrap();
        assert!(s.count > 0);
        let s = count_sign_changes(&form(&[-1, 2, -1]), 50..=50, &t).unwrap();
        assert_eq!(s.count, 0);
        #[allow(clippy::reversed_empty_ranges)]
        let s = count_sign_changes(&form(&[-1, 2, -1]), 50..=10, &t).unwrap();
        assert_eq!(s.count, 0);
    }
}
