//! Placement simulator.
//!
//! A placement is the combinatorial shadow of the prime-producing step: a
//! set of occupied parts, each with one prime position. The simulator
//! feeds placements that meet an occupancy bound into [`select_peak`] and
//! [`check_claims`] and tallies the outcomes. Primes outside the tuple are
//! assumed absent; nothing here looks at actual integers.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::claims::check_claims;
use super::exponent::ExponentModel;
use super::params::{EptParameters, PartitionShape};
use super::pigeonhole::generalized_occupancy_bound;
use super::selection::{select_peak, Placement, SelectionFailure};
use crate::error::{Error, Result};

/// Exhaustive mode enumerates every occupancy subset, so the part count is
/// capped.
pub const MAX_EXHAUSTIVE_PARTS: u64 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimulationMode {
    /// Every placement with at least `min_occupied` parts.
    Exhaustive,
    /// `trials` random placements; trial `t` draws from stream `t` of a
    /// ChaCha8 generator seeded with `seed`.
    Random { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationConfig {
    pub model: ExponentModel,
    pub threshold: u64,
    pub min_occupied: u64,
    /// Largest number of placements evaluated; the report is flagged
    /// incomplete when the run is cut short. Exhaustive runs are cut at
    /// whole occupancy masks.
    pub budget: u64,
    pub mode: SimulationMode,
    pub trace: bool,
}

impl SimulationConfig {
    /// Full-scale shape with threshold `L` and occupancy `m + 1`.
    pub fn full_scale(params: &EptParameters, mode: SimulationMode) -> Result<Self> {
        Ok(SimulationConfig {
            model: ExponentModel::from_params(params)?,
            threshold: params.big_l,
            min_occupied: params.m + 1,
            budget: u64::MAX,
            mode,
            trace: false,
        })
    }

    /// Generalized shape with the smallest occupancy that forces success.
    pub fn toy(
        columns: u64,
        parts_per_column: u64,
        part_size: u64,
        threshold: u64,
        mode: SimulationMode,
    ) -> Result<Self> {
        let shape = PartitionShape::new(columns, parts_per_column, part_size)?;
        let min_occupied = generalized_occupancy_bound(&shape, threshold).ok_or_else(|| {
            Error::contract(format!(
                "no occupancy forces a selection on {columns}x{parts_per_column} parts with threshold {threshold}"
            ))
        })?;
        Ok(SimulationConfig {
            model: ExponentModel::new(shape)?,
            threshold,
            min_occupied,
            budget: u64::MAX,
            mode,
            trace: false,
        })
    }

    pub fn with_min_occupied(mut self, min_occupied: u64) -> Self {
        self.min_occupied = min_occupied;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }
}

/// Per-placement outcome, emitted line by line when tracing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialTrace {
    pub trial: u64,
    pub occupied: u64,
    pub column: Option<u64>,
    pub chosen: Option<u64>,
    pub failure: Option<&'static str>,
    pub left_holds: Option<bool>,
    pub right_holds: Option<bool>,
    pub left_failed: u64,
    pub right_failed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub mode: &'static str,
    pub columns: u64,
    pub parts_per_column: u64,
    pub part_size: u64,
    pub k: u64,
    pub threshold: u64,
    pub min_occupied: u64,
    pub seed: Option<u64>,
    /// Placements the run set out to evaluate.
    pub planned: u64,
    pub evaluated: u64,
    pub complete: bool,
    pub selection_successes: u64,
    pub failures_no_column: u64,
    pub failures_sparse_later: u64,
    #[serde(serialize_with = "crate::fixed::round12")]
    pub selection_success_rate: f64,
    pub left_claim_passes: u64,
    pub right_claim_passes: u64,
    #[serde(serialize_with = "crate::fixed::round12")]
    pub left_pass_rate: f64,
    #[serde(serialize_with = "crate::fixed::round12")]
    pub right_pass_rate: f64,
    pub left_inequalities: u64,
    pub left_inequalities_failed: u64,
    pub right_inequalities: u64,
    pub right_inequalities_failed: u64,
    pub right_failures_from_column_tail: u64,
    #[serde(skip)]
    pub traces: Vec<TrialTrace>,
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    evaluated: u64,
    successes: u64,
    no_column: u64,
    sparse_later: u64,
    left_pass: u64,
    right_pass: u64,
    left_ineq: u64,
    left_failed: u64,
    right_ineq: u64,
    right_failed: u64,
    right_tail_failed: u64,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.evaluated += o.evaluated;
        self.successes += o.successes;
        self.no_column += o.no_column;
        self.sparse_later += o.sparse_later;
        self.left_pass += o.left_pass;
        self.right_pass += o.right_pass;
        self.left_ineq += o.left_ineq;
        self.left_failed += o.left_failed;
        self.right_ineq += o.right_ineq;
        self.right_failed += o.right_failed;
        self.right_tail_failed += o.right_tail_failed;
        self
    }
}

fn evaluate(
    trial: u64,
    placement: &Placement,
    cfg: &SimulationConfig,
) -> Result<(Tally, TrialTrace)> {
    let mut tally = Tally {
        evaluated: 1,
        ..Tally::default()
    };
    let mut trace = TrialTrace {
        trial,
        occupied: placement.occupied() as u64,
        column: None,
        chosen: None,
        failure: None,
        left_holds: None,
        right_holds: None,
        left_failed: 0,
        right_failed: 0,
    };
    match select_peak(placement, &cfg.model, cfg.threshold)? {
        Ok(sel) => {
            tally.successes = 1;
            let claims = check_claims(&sel, &cfg.model)?;
            trace.column = Some(sel.column);
            trace.chosen = Some(sel.chosen);
            trace.left_holds = Some(claims.left_holds);
            trace.right_holds = Some(claims.right_holds);
            tally.left_pass = claims.left_holds as u64;
            tally.right_pass = claims.right_holds as u64;
            tally.left_ineq = claims.left.len() as u64;
            tally.right_ineq = claims.right.len() as u64;
            tally.left_failed = claims.left.iter().filter(|x| !x.holds).count() as u64;
            tally.right_failed = claims.right.iter().filter(|x| !x.holds).count() as u64;
            tally.right_tail_failed = claims
                .right
                .iter()
                .filter(|x| !x.holds && x.column_tail)
                .count() as u64;
            trace.left_failed = tally.left_failed;
            trace.right_failed = tally.right_failed;
        }
        Err(f) => {
            trace.failure = Some(f.as_str());
            match f {
                SelectionFailure::NoColumn { .. } => tally.no_column = 1,
                SelectionFailure::SparseLater { .. } => tally.sparse_later = 1,
            }
        }
    }
    Ok((tally, trace))
}

/// Random placement with a skewed column profile.
///
/// The occupied count leans towards `min_occupied` and the column weights
/// are random powers, so some trials pile primes into few columns. Those
/// are the placements that come close to defeating the selection rule.
fn random_placement(cfg: &SimulationConfig, rng: &mut ChaCha8Rng) -> Placement {
    let shape = cfg.model.shape();
    let total = shape.parts();
    let slack = total - cfg.min_occupied.min(total);
    let u: f64 = rng.gen();
    let occupied = cfg.min_occupied.min(total) + (u.powi(4) * slack as f64).floor() as u64;

    let skew: f64 = rng.gen_range(0.0..6.0);
    let mut weights: Vec<f64> = (0..shape.columns)
        .map(|_| rng.gen::<f64>().powf(skew).max(1e-9))
        .collect();
    let mut free: Vec<Vec<u64>> = (0..shape.columns)
        .map(|_| {
            let mut mus: Vec<u64> = (0..shape.parts_per_column).collect();
            mus.shuffle(rng);
            mus
        })
        .collect();

    let mut placement = Placement::new();
    for _ in 0..occupied {
        let sum: f64 = weights.iter().sum();
        let mut pick = rng.gen::<f64>() * sum;
        let mut nu = weights.len() - 1;
        for (c, &w) in weights.iter().enumerate() {
            if pick < w {
                nu = c;
                break;
            }
            pick -= w;
        }
        // Rounding can land on an exhausted column; fall back to any
        // column with room.
        if free[nu].is_empty() {
            nu = free.iter().position(|f| !f.is_empty()).expect("room left");
        }
        let mu = free[nu].pop().expect("column has room");
        if free[nu].is_empty() {
            weights[nu] = 0.0;
        }
        let lambda = rng.gen_range(1..=shape.part_size);
        placement
            .insert(nu as u64, mu, lambda)
            .expect("parts are drawn without replacement");
    }
    placement
}

fn binomial(n: u64, r: u64) -> u128 {
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Runs the configured simulation.
pub fn simulate(cfg: &SimulationConfig) -> Result<SimulationReport> {
    let shape = cfg.model.shape();
    let (tally, traces, planned, seed) = match cfg.mode {
        SimulationMode::Random { trials, seed } => {
            if cfg.min_occupied > shape.parts() {
                return Err(Error::contract(format!(
                    "minimum occupancy {} exceeds the {} available parts",
                    cfg.min_occupied,
                    shape.parts()
                )));
            }
            let run = trials.min(cfg.budget);
            let results = (0..run)
                .into_par_iter()
                .map(|t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(t);
                    let placement = random_placement(cfg, &mut rng);
                    evaluate(t, &placement, cfg)
                })
                .collect::<Result<Vec<_>>>()?;
            let tally = results
                .iter()
                .fold(Tally::default(), |a, (t, _)| a.merge(*t));
            let traces = if cfg.trace {
                results.into_iter().map(|(_, tr)| tr).collect()
            } else {
                Vec::new()
            };
            (tally, traces, trials, Some(seed))
        }
        SimulationMode::Exhaustive => {
            let parts = shape.parts();
            if parts > MAX_EXHAUSTIVE_PARTS {
                return Err(Error::contract(format!(
                    "exhaustive mode supports at most {MAX_EXHAUSTIVE_PARTS} parts, shape has {parts}"
                )));
            }
            let per_mask = |occ: u64| (shape.part_size as u128).pow(occ as u32);
            let planned: u128 = (cfg.min_occupied..=parts)
                .map(|o| binomial(parts, o) * per_mask(o))
                .sum();
            // Masks in increasing order, cut deterministically at the budget.
            let mut masks = Vec::new();
            let mut offsets = Vec::new();
            let mut taken: u128 = 0;
            for mask in 0u32..(1u32 << parts) {
                let occ = mask.count_ones() as u64;
                if occ < cfg.min_occupied {
                    continue;
                }
                let n = per_mask(occ);
                if taken + n > cfg.budget as u128 {
                    break;
                }
                masks.push(mask);
                offsets.push(taken as u64);
                taken += n;
            }
            let results = masks
                .par_iter()
                .zip(offsets.par_iter())
                .map(|(&mask, &offset)| exhaust_mask(mask, offset, cfg))
                .collect::<Result<Vec<_>>>()?;
            let tally = results
                .iter()
                .fold(Tally::default(), |a, (t, _)| a.merge(*t));
            let traces = results.into_iter().flat_map(|(_, tr)| tr).collect();
            (tally, traces, planned.min(u64::MAX as u128) as u64, None)
        }
    };

    let rate = |num: u64, den: u64| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    Ok(SimulationReport {
        mode: match cfg.mode {
            SimulationMode::Exhaustive => "exhaustive",
            SimulationMode::Random { .. } => "random",
        },
        columns: shape.columns,
        parts_per_column: shape.parts_per_column,
        part_size: shape.part_size,
        k: cfg.model.k(),
        threshold: cfg.threshold,
        min_occupied: cfg.min_occupied,
        seed,
        planned,
        evaluated: tally.evaluated,
        complete: tally.evaluated == planned,
        selection_successes: tally.successes,
        failures_no_column: tally.no_column,
        failures_sparse_later: tally.sparse_later,
        selection_success_rate: rate(tally.successes, tally.evaluated),
        left_claim_passes: tally.left_pass,
        right_claim_passes: tally.right_pass,
        left_pass_rate: rate(tally.left_pass, tally.successes),
        right_pass_rate: rate(tally.right_pass, tally.successes),
        left_inequalities: tally.left_ineq,
        left_inequalities_failed: tally.left_failed,
        right_inequalities: tally.right_ineq,
        right_inequalities_failed: tally.right_failed,
        right_failures_from_column_tail: tally.right_tail_failed,
        traces,
    })
}

/// All position assignments for one occupancy mask.
fn exhaust_mask(
    mask: u32,
    offset: u64,
    cfg: &SimulationConfig,
) -> Result<(Tally, Vec<TrialTrace>)> {
    let shape = cfg.model.shape();
    let parts: Vec<(u64, u64)> = (0..shape.parts())
        .filter(|b| mask & (1 << b) != 0)
        .map(|b| (b / shape.parts_per_column, b % shape.parts_per_column))
        .collect();
    let mut lambdas = vec![1u64; parts.len()];
    let mut tally = Tally::default();
    let mut traces = Vec::new();
    let mut trial = offset;
    loop {
        let placement = Placement::from_entries(
            parts
                .iter()
                .zip(&lambdas)
                .map(|(&(nu, mu), &lambda)| (nu, mu, lambda)),
        )?;
        let (t, tr) = evaluate(trial, &placement, cfg)?;
        tally = tally.merge(t);
        if cfg.trace {
            traces.push(tr);
        }
        trial += 1;
        // Odometer over lambda in 1..=K.
        let mut pos = 0;
        loop {
            if pos == lambdas.len() {
                return Ok((tally, traces));
            }
            if lambdas[pos] < shape.part_size {
                lambdas[pos] += 1;
                break;
            }
            lambdas[pos] = 1;
            pos += 1;
        }
    }
}
