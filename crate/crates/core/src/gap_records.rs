//! Peak-dominance records over the gap stream.
//!
//! For a window radius `ell`, the peak ratio at index `m` is
//! `d_m / max(d_{m-ell}, .., d_{m-1}, d_{m+1}, .., d_{m+ell})`, kept as an
//! exact fraction. Records are the running maxima of that ratio, optionally
//! damped by `(log m)^c` with `c = c1 * exp(-c2 * ell)`.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sieve::{GapAccess, GapEntry};

/// Unreduced fraction `num / den` of two gaps; compares by value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapRatio {
    pub num: u64,
    pub den: u64,
}

impl GapRatio {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "gap ratio with zero denominator");
        GapRatio { num, den }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialEq for GapRatio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for GapRatio {}

impl PartialOrd for GapRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GapRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for GapRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Damping exponent `c(ell) = c1 * exp(-c2 * ell)`.
///
/// The constants are heuristic; only their positivity is known. `c1 = 0`
/// gives the undamped ratio records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecordNormalizer {
    pub c1: f64,
    pub c2: f64,
}

impl Default for RecordNormalizer {
    fn default() -> Self {
        RecordNormalizer { c1: 1.0, c2: 1.0 }
    }
}

impl RecordNormalizer {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !(c1.is_finite() && c2.is_finite() && c1 >= 0.0 && c2 >= 0.0) {
            return Err(Error::contract(format!(
                "normalizer constants must be finite and non-negative, got c1={c1}, c2={c2}"
            )));
        }
        Ok(RecordNormalizer { c1, c2 })
    }

    /// Undamped records (`c = 0`).
    pub fn exact() -> Self {
        RecordNormalizer { c1: 0.0, c2: 0.0 }
    }

    pub fn c_of_ell(&self, ell: usize) -> f64 {
        self.c1 * (-self.c2 * ell as f64).exp()
    }

    pub fn normalize(&self, ratio: GapRatio, m: usize, ell: usize) -> f64 {
        let c = self.c_of_ell(ell);
        if c == 0.0 {
            ratio.to_f64()
        } else {
            ratio.to_f64() / (m as f64).ln().powf(c)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakRecord {
    pub m: usize,
    pub p: u64,
    pub d: u64,
    pub ratio: GapRatio,
    #[serde(serialize_with = "crate::fixed::round12")]
    pub normalized: f64,
    pub ell: usize,
}

/// Exact `d_m` over the largest of its `2 * ell` neighbours.
pub fn peak_ratio(m: usize, ell: usize, gaps: &impl GapAccess) -> Result<GapRatio> {
    if ell == 0 {
        return Err(Error::contract("window radius must be at least 1"));
    }
    if m < ell + 2 {
        return Err(Error::range(format!(
            "window around m={m} with radius {ell} reaches below d_2"
        )));
    }
    let fetch = |n: usize| {
        gaps.gap(n)
            .ok_or_else(|| Error::range(format!("gap d_{n} is not available")))
    };
    let d = fetch(m)?;
    let mut max = 0;
    for n in (m - ell..m).chain(m + 1..=m + ell) {
        max = max.max(fetch(n)?);
    }
    Ok(GapRatio::new(d, max))
}

/// Running maxima of the (normalized) peak ratio.
///
/// A record is emitted only when it strictly beats every earlier one, so
/// among equal values the smallest `m` wins.
pub fn scan_records(
    stream: impl IntoIterator<Item = GapEntry>,
    ell: usize,
    normalizer: &RecordNormalizer,
) -> Result<Vec<PeakRecord>> {
    if ell == 0 {
        return Err(Error::contract("window radius must be at least 1"));
    }
    let exact = normalizer.c_of_ell(ell) == 0.0;
    let width = 2 * ell + 1;
    let mut window: VecDeque<GapEntry> = VecDeque::with_capacity(width);
    let mut records: Vec<PeakRecord> = Vec::new();

    for entry in stream {
        if window.len() == width {
            window.pop_front();
        }
        window.push_back(entry);
        if window.len() < width {
            continue;
        }
        let center = window[ell];
        let neighbours = window
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != ell)
            .map(|(_, g)| g.d)
            .max()
            .expect("window has neighbours");
        let ratio = GapRatio::new(center.d, neighbours);
        let normalized = normalizer.normalize(ratio, center.n, ell);
        let beats = match records.last() {
            None => true,
            Some(best) if exact => ratio > best.ratio,
            Some(best) => normalized > best.normalized,
        };
        if beats {
            records.push(PeakRecord {
                m: center.n,
                p: center.p,
                d: center.d,
                ratio,
                normalized,
                ell,
            });
        }
    }
    Ok(records)
}

/// An index with `d_n > d_{n+1} + d_{n+2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Superdominant {
    pub n: usize,
    pub p: u64,
    pub d: u64,
    pub d_next: u64,
    pub d_next2: u64,
}

pub fn find_superdominant(stream: impl IntoIterator<Item = GapEntry>) -> Vec<Superdominant> {
    let mut window: VecDeque<GapEntry> = VecDeque::with_capacity(3);
    let mut hits = Vec::new();
    for entry in stream {
        if window.len() == 3 {
            window.pop_front();
        }
        window.push_back(entry);
        if window.len() == 3 && window[0].d > window[1].d + window[2].d {
            hits.push(Superdominant {
                n: window[0].n,
                p: window[0].p,
                d: window[0].d,
                d_next: window[1].d,
                d_next2: window[2].d,
            });
        }
    }
    hits
}
