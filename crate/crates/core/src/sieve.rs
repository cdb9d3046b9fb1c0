//! Segmented sieve of Eratosthenes and the consecutive-gap stream.
//!
//! Primes are produced segment by segment. Each segment stores one flag per
//! odd value, so a segment of `S` values costs `S / 2` bytes. Segments are
//! independent once the base primes up to `sqrt(limit)` are known, which lets
//! [`Sieve::primes_up_to`] sieve them on the rayon pool and concatenate the
//! results in segment order.
//!
//! Prime indices are 1-based throughout: `p_1 = 2`, and the gap
//! `d_n = p_n - p_{n-1}` exists for `n >= 2` only.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default number of integer values covered by one segment.
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 20;

/// Largest sieve limit accepted. Everything up to here fits comfortably in
/// `u64` arithmetic (including `p * p` for base primes).
pub const MAX_LIMIT: u64 = 1_000_000_000_000;

/// One record of the gap stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GapEntry {
    /// 1-based prime index, always `>= 2`.
    pub n: usize,
    /// The `n`-th prime.
    pub p: u64,
    /// `p_n - p_{n-1}`.
    pub d: u64,
}

/// Segmented sieve configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sieve {
    segment_size: u64,
    parallel: bool,
}

impl Default for Sieve {
    fn default() -> Self {
        Sieve {
            segment_size: DEFAULT_SEGMENT_SIZE,
            parallel: true,
        }
    }
}

impl Sieve {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_segment_size(mut self, segment_size: u64) -> Result<Self> {
        if segment_size < 2 {
            return Err(Error::contract(format!(
                "segment size must be at least 2, got {segment_size}"
            )));
        }
        self.segment_size = segment_size;
        Ok(self)
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn segment_size(&self) -> u64 {
        self.segment_size
    }

    /// All primes `<= limit`, ascending.
    pub fn primes_up_to(&self, limit: u64) -> Result<Vec<u64>> {
        check_limit(limit)?;
        if limit < 2 {
            return Ok(Vec::new());
        }
        let base = simple_sieve(limit.isqrt());
        let segments = limit / self.segment_size + 1;
        let sieve_one = |s: u64| {
            let lo = s * self.segment_size;
            let hi = (lo + self.segment_size - 1).min(limit);
            sieve_segment(&base, lo, hi)
        };
        let parts: Vec<Vec<u64>> = if self.parallel {
            (0..segments).into_par_iter().map(sieve_one).collect()
        } else {
            (0..segments).map(sieve_one).collect()
        };
        let total = parts.iter().map(Vec::len).sum();
        let mut out = Vec::with_capacity(total);
        for part in parts {
            out.extend_from_slice(&part);
        }
        Ok(out)
    }

    /// Lazy sequential prime iterator; holds one segment at a time.
    pub fn iter_primes(&self, limit: u64) -> Result<PrimeIter> {
        check_limit(limit)?;
        Ok(PrimeIter {
            base: simple_sieve(limit.isqrt()),
            limit,
            segment_size: self.segment_size,
            next_lo: 0,
            buf: Vec::new(),
            pos: 0,
            done: limit < 2,
        })
    }

    /// Streams `GapEntry` for every `n >= 2` with `p_n <= limit`.
    pub fn gap_stream(&self, limit: u64) -> Result<GapStream> {
        Ok(GapStream::new(self.iter_primes(limit)?))
    }
}

/// Primes `<= limit` with the default sieve configuration.
pub fn primes_up_to(limit: u64) -> Result<Vec<u64>> {
    Sieve::default().primes_up_to(limit)
}

/// Gap stream with the default sieve configuration.
pub fn gap_stream(limit: u64) -> Result<GapStream> {
    Sieve::default().gap_stream(limit)
}

fn check_limit(limit: u64) -> Result<()> {
    if limit > MAX_LIMIT {
        return Err(Error::range(format!(
            "sieve limit {limit} exceeds supported maximum {MAX_LIMIT}"
        )));
    }
    Ok(())
}

/// Plain unsegmented sieve over `0..=limit`, one byte per value.
///
/// Used for base primes and as an independent cross-check of the
/// segmented path.
pub fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut p = 2usize;
    while p * p <= n {
        if !composite[p] {
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
        p += 1;
    }
    (2..=n)
        .filter(|&i| !composite[i])
        .map(|i| i as u64)
        .collect()
}

/// Primes in `[lo, hi]`, given all primes up to `sqrt(hi)`.
fn sieve_segment(base: &[u64], lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if hi < 2 || lo > hi {
        return out;
    }
    if lo <= 2 {
        out.push(2);
    }
    let first = lo | 1;
    if first > hi {
        return out;
    }
    let len = ((hi - first) / 2 + 1) as usize;
    let mut composite = vec![false; len];
    if first == 1 {
        composite[0] = true;
    }
    for &p in base.iter().skip_while(|&&p| p == 2) {
        let sq = p * p;
        if sq > hi {
            break;
        }
        let mut start = sq.max(lo.div_ceil(p) * p);
        if start % 2 == 0 {
            start += p;
        }
        let mut idx = ((start - first) / 2) as usize;
        let step = p as usize;
        while idx < len {
            composite[idx] = true;
            idx += step;
        }
    }
    out.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| first + 2 * i as u64),
    );
    out
}

/// Sequential segment-at-a-time prime iterator.
#[derive(Debug)]
pub struct PrimeIter {
    base: Vec<u64>,
    limit: u64,
    segment_size: u64,
    next_lo: u64,
    buf: Vec<u64>,
    pos: usize,
    done: bool,
}

impl Iterator for PrimeIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if let Some(&p) = self.buf.get(self.pos) {
                self.pos += 1;
                return Some(p);
            }
            if self.done {
                return None;
            }
            let lo = self.next_lo;
            let hi = lo.saturating_add(self.segment_size - 1).min(self.limit);
            self.buf = sieve_segment(&self.base, lo, hi);
            self.pos = 0;
            if hi >= self.limit {
                self.done = true;
            } else {
                self.next_lo = hi + 1;
            }
        }
    }
}

/// Owning stream of [`GapEntry`] records, starting at `n = 2`.
#[derive(Debug)]
pub struct GapStream {
    primes: PrimeIter,
    prev: Option<u64>,
    n: usize,
}

impl GapStream {
    fn new(mut primes: PrimeIter) -> Self {
        let prev = primes.next();
        GapStream { primes, prev, n: 1 }
    }
}

impl Iterator for GapStream {
    type Item = GapEntry;

    fn next(&mut self) -> Option<GapEntry> {
        let prev = self.prev?;
        let p = self.primes.next()?;
        self.prev = Some(p);
        self.n += 1;
        Some(GapEntry {
            n: self.n,
            p,
            d: p - prev,
        })
    }
}

/// Random access to primes by 1-based index.
pub trait PrimeAccess {
    fn prime(&self, n: usize) -> Option<u64>;
}

/// Random access to gaps `d_n` by index.
pub trait GapAccess {
    fn gap(&self, n: usize) -> Option<u64>;
}

/// Read-only table of the first primes, addressable by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    primes: Vec<u64>,
}

impl PrimeTable {
    /// Wraps an ascending prime list starting at 2.
    pub fn from_primes(primes: Vec<u64>) -> Self {
        debug_assert!(primes.first().is_none_or(|&p| p == 2));
        debug_assert!(primes.windows(2).all(|w| w[0] < w[1]));
        PrimeTable { primes }
    }

    pub fn up_to(limit: u64) -> Result<Self> {
        Ok(Self::from_primes(primes_up_to(limit)?))
    }

    /// Table holding at least the first `count` primes.
    pub fn first(count: usize) -> Result<Self> {
        let mut primes = primes_up_to(nth_prime_upper_bound(count))?;
        primes.truncate(count);
        Ok(Self::from_primes(primes))
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Largest index `n` for which `d_n` is defined.
    pub fn last_gap_index(&self) -> Option<usize> {
        (self.primes.len() >= 2).then_some(self.primes.len())
    }

    pub fn gaps(&self) -> impl Iterator<Item = GapEntry> + '_ {
        self.primes.windows(2).enumerate().map(|(i, w)| GapEntry {
            n: i + 2,
            p: w[1],
            d: w[1] - w[0],
        })
    }
}

impl PrimeAccess for PrimeTable {
    fn prime(&self, n: usize) -> Option<u64> {
        n.checked_sub(1).and_then(|i| self.primes.get(i)).copied()
    }
}

impl GapAccess for PrimeTable {
    fn gap(&self, n: usize) -> Option<u64> {
        if n < 2 {
            return None;
        }
        Some(self.prime(n)? - self.prime(n - 1)?)
    }
}

/// A gap sequence not backed by primes, indexed from `first_index`.
///
/// Lets the analyzers run on hand-built gap patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapSeries {
    first_index: usize,
    gaps: Vec<u64>,
}

impl GapSeries {
    pub fn new(first_index: usize, gaps: Vec<u64>) -> Self {
        GapSeries { first_index, gaps }
    }

    /// Entries with `p` reconstructed as a running sum from `start`.
    pub fn entries(&self, start: u64) -> Vec<GapEntry> {
        let mut p = start;
        self.gaps
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                p += d;
                GapEntry {
                    n: self.first_index + i,
                    p,
                    d,
                }
            })
            .collect()
    }
}

impl GapAccess for GapSeries {
    fn gap(&self, n: usize) -> Option<u64> {
        n.checked_sub(self.first_index)
            .and_then(|i| self.gaps.get(i))
            .copied()
    }
}

/// Upper bound for `p_n` (Rosser–Schoenfeld for `n >= 6`).
fn nth_prime_upper_bound(n: usize) -> u64 {
    if n < 6 {
        return 13;
    }
    let x = n as f64;
    (x * (x.ln() + x.ln().ln())).ceil() as u64 + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(limit: u64) -> Vec<u64> {
        (2..=limit)
            .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect()
    }

    #[test]
    fn small_limits() {
        assert_eq!(primes_up_to(10).unwrap(), vec![2, 3, 5, 7]);
        assert!(primes_up_to(1).unwrap().is_empty());
        assert!(primes_up_to(0).unwrap().is_empty());
        assert_eq!(primes_up_to(2).unwrap(), vec![2]);
        assert_eq!(primes_up_to(3).unwrap(), vec![2, 3]);
    }

    #[test]
    fn matches_trial_division() {
        let oracle = trial_division(20_000);
        for seg in [2, 3, 7, 64, 1000, DEFAULT_SEGMENT_SIZE] {
            let s = Sieve::new().with_segment_size(seg).unwrap();
            assert_eq!(s.primes_up_to(20_000).unwrap(), oracle, "segment {seg}");
        }
    }

    #[test]
    fn lazy_iter_matches_batch() {
        let s = Sieve::new().with_segment_size(97).unwrap();
        let lazy: Vec<u64> = s.iter_primes(50_000).unwrap().collect();
        assert_eq!(lazy, s.primes_up_to(50_000).unwrap());
    }

    #[test]
    fn rejects_tiny_segments_and_huge_limits() {
        assert!(matches!(
            Sieve::new().with_segment_size(1),
            Err(Error::Contract(_))
        ));
        assert!(matches!(primes_up_to(MAX_LIMIT + 1), Err(Error::Range(_))));
    }

    #[test]
    fn gap_stream_head() {
        let gaps: Vec<GapEntry> = gap_stream(30).unwrap().collect();
        assert_eq!(gaps[0], GapEntry { n: 2, p: 3, d: 1 });
        assert_eq!(gaps[3], GapEntry { n: 5, p: 11, d: 4 });
        assert!(gaps.iter().filter(|g| g.n >= 3).all(|g| g.d % 2 == 0));
        assert!(gap_stream(2).unwrap().next().is_none());
    }

    #[test]
    fn table_access() {
        let t = PrimeTable::first(10).unwrap();
        assert_eq!(t.len(), 10);
        assert_eq!(t.prime(1), Some(2));
        assert_eq!(t.prime(10), Some(29));
        assert_eq!(t.prime(0), None);
        assert_eq!(t.gap(1), None);
        assert_eq!(t.gap(3), Some(2));
        assert_eq!(t.gap(11), None);
        let streamed: Vec<GapEntry> = gap_stream(29).unwrap().collect();
        assert_eq!(t.gaps().collect::<Vec<_>>(), streamed);
    }

    #[test]
    fn synthetic_series() {
        let g = GapSeries::new(5, vec![4, 14, 4]);
        assert_eq!(g.gap(4), None);
        assert_eq!(g.gap(6), Some(14));
        assert_eq!(g.entries(100)[2], GapEntry { n: 7, p: 122, d: 4 });
    }
}
