//! Admissible tuples, the smooth-differences condition, and numeric
//! realizations of the exponent schedule.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::ept::{ExponentModel, IndexCoord};
use crate::error::{Error, Result};
use crate::sieve::simple_sieve;

/// Strictly increasing non-negative offsets `h_1 < ... < h_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdmissibleTuple {
    h: Vec<u64>,
}

impl AdmissibleTuple {
    pub fn new(h: Vec<u64>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::contract("a tuple needs at least one element"));
        }
        if let Some(w) = h.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::contract(format!(
                "tuple must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        Ok(AdmissibleTuple { h })
    }

    pub fn elements(&self) -> &[u64] {
        &self.h
    }

    pub fn k(&self) -> usize {
        self.h.len()
    }

    pub fn diameter(&self) -> u64 {
        self.h[self.h.len() - 1] - self.h[0]
    }

    /// Translates every element by `t`; the result must stay non-negative.
    pub fn shifted(&self, t: i64) -> Result<Self> {
        let h = self
            .h
            .iter()
            .map(|&x| {
                x.checked_add_signed(t)
                    .ok_or_else(|| Error::range(format!("shift {t} moves {x} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AdmissibleTuple { h })
    }

    pub fn is_admissible(&self) -> Admissibility {
        is_admissible(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    /// Smallest prime whose residue classes are all hit.
    pub witness: Option<u64>,
}

/// Checks every prime `p <= k`; larger primes always have a free class.
pub fn is_admissible(tuple: &AdmissibleTuple) -> Admissibility {
    let k = tuple.k() as u64;
    let mut seen = Vec::new();
    for p in simple_sieve(k) {
        seen.clear();
        seen.resize(p as usize, false);
        let mut hit = 0;
        for &x in &tuple.h {
            let r = (x % p) as usize;
            if !seen[r] {
                seen[r] = true;
                hit += 1;
            }
        }
        if hit == p {
            return Admissibility {
                admissible: false,
                witness: Some(p),
            };
        }
    }
    Admissibility {
        admissible: true,
        witness: None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Smoothness {
    pub ok: bool,
    pub w: u64,
    /// First offending pair `(h_i, h_j)` in index order and the smallest
    /// prime above `w` dividing `h_j - h_i`.
    pub offending: Option<SmoothnessViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmoothnessViolation {
    pub prime: u64,
    pub pair: (u64, u64),
}

/// Every prime factor of every pairwise difference is at most `w`.
pub fn smooth_differences_ok(tuple: &AdmissibleTuple, w: u64) -> Result<Smoothness> {
    if w < 2 {
        return Err(Error::contract(format!(
            "smoothness bound must be at least 2, got {w}"
        )));
    }
    let small = simple_sieve(w.min(1 << 24));
    let h = &tuple.h;
    let offending = (0..h.len()).into_par_iter().find_map_first(|i| {
        h[i + 1..].iter().find_map(|&hj| {
            let rough = strip_smooth(hj - h[i], &small);
            (rough > 1).then(|| SmoothnessViolation {
                prime: smallest_prime_factor(rough),
                pair: (h[i], hj),
            })
        })
    });
    Ok(Smoothness {
        ok: offending.is_none(),
        w,
        offending,
    })
}

/// Divides out every prime in `primes`.
fn strip_smooth(mut n: u64, primes: &[u64]) -> u64 {
    for &p in primes {
        if n == 1 {
            break;
        }
        while n.is_multiple_of(p) {
            n /= p;
        }
    }
    n
}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 1;
    }
    n
}

/// Product of all primes `<= w`.
pub fn primorial(w: u64) -> Result<u64> {
    simple_sieve(w).into_iter().try_fold(1u64, |acc, p| {
        acc.checked_mul(p)
            .ok_or_else(|| Error::range(format!("primorial of {w} overflows 64 bits")))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum RealizationMode {
    /// `b_i = max(1, round(beta_i * (log N)^{c_i}))`.
    ReportOnly,
    /// As above, then each `b_i` is rounded up to a multiple of `w#`.
    PrimorialRepair,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationConfig {
    pub log_n: f64,
    /// Smoothness bound used for diagnostics and for the repair step.
    pub w: u64,
    pub mode: RealizationMode,
    /// Per-index multipliers; `None` means all 1.
    pub beta: Option<Vec<Ratio<u64>>>,
}

/// Increments `b`, offsets `h` and the exponents they were built from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EptTupleRealization {
    pub b: Vec<u64>,
    pub h: Vec<u64>,
    #[serde(skip)]
    pub c: Vec<Ratio<i64>>,
    #[serde(serialize_with = "crate::fixed::round12")]
    pub log_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizationDiagnostics {
    pub mode: RealizationMode,
    pub len: usize,
    pub diameter: u64,
    pub admissibility: Admissibility,
    pub smoothness: Smoothness,
    pub primorial: Option<u64>,
    /// Extremes of `b_i / (beta_i (log N)^{c_i})` in report-only rounding.
    #[serde(serialize_with = "crate::fixed::round12")]
    pub min_fidelity: f64,
    #[serde(serialize_with = "crate::fixed::round12")]
    pub max_fidelity: f64,
    /// Adjacent within-column pairs whose `b` drops although `c` rises.
    pub column_order_violations: u64,
    /// Adjacent within-column pairs with equal `b` (rounding collapsed
    /// the exponent step).
    pub column_ties: u64,
    /// `(log N)^{1/k}`, the separation factor between columns.
    #[serde(serialize_with = "crate::fixed::round12")]
    pub separation_factor: f64,
    /// `column_ratio[a][b]` for `a < b`: the smallest `b_i / b_j` with `i`
    /// in column `a` and `j` in column `b`. Zero on and below the diagonal.
    #[serde(serialize_with = "crate::fixed::round12_vec2")]
    pub column_ratio: Vec<Vec<f64>>,
    /// Column pairs whose smallest ratio reaches the separation factor.
    pub separated_column_pairs: u64,
    pub column_pairs: u64,
}

/// Numeric realization of the exponent schedule over the model's indices.
pub fn build_ept_tuple(
    model: &ExponentModel,
    cfg: &RealizationConfig,
) -> Result<(EptTupleRealization, RealizationDiagnostics)> {
    if !(cfg.log_n.is_finite() && cfg.log_n > 1.0) {
        return Err(Error::contract(format!(
            "log N must be finite and greater than 1, got {}",
            cfg.log_n
        )));
    }
    let n = model.len() as usize;
    if let Some(beta) = &cfg.beta {
        if beta.len() != n {
            return Err(Error::contract(format!(
                "beta has {} entries, the schedule has {n}",
                beta.len()
            )));
        }
        if beta.iter().any(|b| *b.numer() == 0) {
            return Err(Error::contract("beta entries must be positive"));
        }
    }
    let primorial = match cfg.mode {
        RealizationMode::PrimorialRepair => {
            if cfg.w < 2 {
                return Err(Error::contract("repair needs w >= 2"));
            }
            Some(primorial(cfg.w)?)
        }
        RealizationMode::ReportOnly => None,
    };

    let mut c = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut min_fid = f64::INFINITY;
    let mut max_fid: f64 = 0.0;
    for i in 1..=n as u64 {
        let e = model.exponent(i)?;
        let beta = cfg.beta.as_ref().map_or(1.0, |v| {
            let r = v[i as usize - 1];
            *r.numer() as f64 / *r.denom() as f64
        });
        let target = beta * cfg.log_n.powf(e.to_f64());
        let rounded = (target.round() as u64).max(1);
        let fid = rounded as f64 / target;
        min_fid = min_fid.min(fid);
        max_fid = max_fid.max(fid);
        let value = match primorial {
            Some(p) => rounded
                .div_ceil(p)
                .checked_mul(p)
                .ok_or_else(|| Error::range("repaired increment overflows 64 bits"))?,
            None => rounded,
        };
        c.push(e.ratio());
        b.push(value);
    }
    let h = b
        .iter()
        .scan(0u64, |acc, &x| {
            *acc = acc.checked_add(x)?;
            Some(*acc)
        })
        .collect::<Vec<_>>();
    if h.len() != n {
        return Err(Error::range("tuple offsets overflow 64 bits"));
    }

    let shape = model.shape();
    let per_col = (shape.parts_per_column * shape.part_size) as usize;
    let mut order_violations = 0;
    let mut ties = 0;
    for col in b.chunks(per_col) {
        for w in col.windows(2) {
            match w[1].cmp(&w[0]) {
                std::cmp::Ordering::Less => order_violations += 1,
                std::cmp::Ordering::Equal => ties += 1,
                std::cmp::Ordering::Greater => {}
            }
        }
    }
    let col_min: Vec<u64> = b
        .chunks(per_col)
        .map(|c| *c.iter().min().unwrap())
        .collect();
    let col_max: Vec<u64> = b
        .chunks(per_col)
        .map(|c| *c.iter().max().unwrap())
        .collect();
    let separation = cfg.log_n.powf(1.0 / model.k() as f64);
    let cols = col_min.len();
    let mut column_ratio = vec![vec![0.0; cols]; cols];
    let mut separated = 0;
    let mut pairs = 0;
    for a in 0..cols {
        for z in a + 1..cols {
            let r = col_min[a] as f64 / col_max[z] as f64;
            column_ratio[a][z] = r;
            pairs += 1;
            if r >= separation {
                separated += 1;
            }
        }
    }

    let tuple = AdmissibleTuple::new(h.clone())?;
    let smoothness = smooth_differences_ok(&tuple, cfg.w.max(2))?;
    let diagnostics = RealizationDiagnostics {
        mode: cfg.mode,
        len: n,
        diameter: tuple.diameter(),
        admissibility: is_admissible(&tuple),
        smoothness,
        primorial,
        min_fidelity: min_fid,
        max_fidelity: max_fid,
        column_order_violations: order_violations,
        column_ties: ties,
        separation_factor: separation,
        column_ratio,
        separated_column_pairs: separated,
        column_pairs: pairs,
    };
    Ok((
        EptTupleRealization {
            b,
            h,
            c,
            log_n: cfg.log_n,
        },
        diagnostics,
    ))
}

/// Coordinates of each realized index, for reporting.
pub fn realization_coords(model: &ExponentModel) -> Result<Vec<IndexCoord>> {
    (1..=model.len()).map(|i| model.decompose(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ept::{derive_params, PartitionShape};

    fn t(h: &[u64]) -> AdmissibleTuple {
        AdmissibleTuple::new(h.to_vec()).unwrap()
    }

    #[test]
    fn admissibility_examples() {
        assert_eq!(
            is_admissible(&t(&[0, 2, 4])),
            Admissibility {
                admissible: false,
                witness: Some(3)
            }
        );
        assert!(is_admissible(&t(&[0, 2, 6])).admissible);
        assert!(is_admissible(&t(&[0])).admissible);
        assert_eq!(is_admissible(&t(&[0, 1])).witness, Some(2));
    }

    #[test]
    fn construction_rules() {
        assert!(AdmissibleTuple::new(vec![]).is_err());
        assert!(AdmissibleTuple::new(vec![3, 3]).is_err());
        assert!(AdmissibleTuple::new(vec![4, 1]).is_err());
        assert_eq!(t(&[5, 9, 20]).diameter(), 15);
        assert_eq!(t(&[5, 9]).shifted(-5).unwrap(), t(&[0, 4]));
        assert!(t(&[5, 9]).shifted(-6).is_err());
    }

    #[test]
    fn smoothness_examples() {
        assert!(smooth_differences_ok(&t(&[0, 2, 6]), 3).unwrap().ok);
        let s = smooth_differences_ok(&t(&[0, 10]), 3).unwrap();
        assert_eq!(
            s.offending,
            Some(SmoothnessViolation {
                prime: 5,
                pair: (0, 10)
            })
        );
        assert!(smooth_differences_ok(&t(&[0, 30, 60]), 5).unwrap().ok);
        assert!(smooth_differences_ok(&t(&[0, 30]), 1).is_err());
    }

    #[test]
    fn primorials() {
        assert_eq!(primorial(1).unwrap(), 1);
        assert_eq!(primorial(6).unwrap(), 30);
        assert_eq!(primorial(47).unwrap(), 614_889_782_588_491_410);
        assert!(primorial(53).is_err());
    }

    fn cfg(log_n: f64, mode: RealizationMode) -> RealizationConfig {
        RealizationConfig {
            log_n,
            w: 3,
            mode,
            beta: None,
        }
    }

    #[test]
    fn log_e_gives_ones_and_twos() {
        let m = ExponentModel::new(PartitionShape::new(31, 3, 2).unwrap()).unwrap();
        let (r, d) =
            build_ept_tuple(&m, &cfg(std::f64::consts::E, RealizationMode::ReportOnly)).unwrap();
        assert!(r.b.iter().all(|&b| b == 1 || b == 2));
        assert!(r.h.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(d.column_order_violations, 0);
    }

    #[test]
    fn b_follows_exponent_order_within_columns() {
        let p = derive_params(1, 1).unwrap();
        let m = ExponentModel::from_params(&p).unwrap();
        let (r, d) = build_ept_tuple(&m, &cfg(100.0, RealizationMode::ReportOnly)).unwrap();
        assert_eq!(r.b.len(), m.len() as usize);
        for nu in 0..31 {
            let (lo, hi) = m.column_bounds(nu);
            for i in lo..hi {
                assert!(r.c[i as usize - 1] < r.c[i as usize]);
                assert!(r.b[i as usize - 1] <= r.b[i as usize]);
            }
        }
        assert_eq!(d.column_order_violations, 0);
        assert!(d.min_fidelity >= 0.5 && d.max_fidelity <= 2.0);
    }

    #[test]
    fn repair_makes_increments_multiples_of_the_primorial() {
        let m = ExponentModel::new(PartitionShape::new(3, 2, 1).unwrap()).unwrap();
        let (r, d) = build_ept_tuple(&m, &cfg(10.0, RealizationMode::PrimorialRepair)).unwrap();
        assert_eq!(d.primorial, Some(6));
        assert_eq!(r.b, vec![6; 6]);
        // Multiples of 3# are not 3-smooth in general: h_6 - h_1 = 5 * 6.
        assert!(!d.smoothness.ok);
        assert_eq!(
            d.smoothness.offending,
            Some(SmoothnessViolation {
                prime: 5,
                pair: (6, 36)
            })
        );
    }

    #[test]
    fn bad_inputs() {
        let m = ExponentModel::new(PartitionShape::new(2, 1, 1).unwrap()).unwrap();
        assert!(build_ept_tuple(&m, &cfg(1.0, RealizationMode::ReportOnly)).is_err());
        let mut c = cfg(10.0, RealizationMode::ReportOnly);
        c.beta = Some(vec![Ratio::new(1, 1)]);
        assert!(build_ept_tuple(&m, &c).is_err());
    }
}
