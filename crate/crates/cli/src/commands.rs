use std::io;

use epgaps::ept::{
    derive_params, pigeonhole_bounds, simulate, verify_monotonicity, EptParameters, ExponentModel,
    IdentityReport, MonotonicityMode, MonotonicityReport, PigeonholeReport, SimulationConfig,
    SimulationMode, SimulationReport, DEFAULT_PAIR_BUDGET,
};
use epgaps::linear_forms::{evaluate_direct, evaluate_gap_form, SignTracker};
use epgaps::tuples::{
    build_ept_tuple, realization_coords, EptTupleRealization, RealizationConfig,
    RealizationDiagnostics, RealizationMode,
};
use epgaps::{
    classify, find_superdominant, round_report_float, scan_records, smooth_differences_ok,
    AdmissibleTuple, GapEntry, LinearForm, PeakRecord, PrimeTable, RecordNormalizer, Sieve,
};
use serde::Serialize;

use crate::output::Sink;
use crate::{
    Cli, Command, EptCommand, FormArgs, Format, LimitArgs, ParamsArgs, RecordsArgs, SieveArgs,
    SimulateArgs, TupleArgs, VerifyArgs,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] epgaps::Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "io",
            CliError::Input(_) => "contract",
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub enum Outcome {
    Pass,
    CheckFailed,
}

impl Outcome {
    fn gate(passed: bool) -> Self {
        if passed {
            Outcome::Pass
        } else {
            Outcome::CheckFailed
        }
    }
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut sink = Sink::open(cli.out.as_deref())?;
    let f = cli.format;
    let outcome = match &cli.command {
        Command::Sieve(a) => sieve(a, f, &mut sink)?,
        Command::Gaps(a) => gaps(a, f, &mut sink)?,
        Command::Form(a) => form(a, f, &mut sink)?,
        Command::Records(a) => records(a, f, &mut sink)?,
        Command::Superdominant(a) => superdominant(a, f, &mut sink)?,
        Command::Tuple(a) => tuple(a, f, &mut sink)?,
        Command::Ept(EptCommand::Params(a)) | Command::EptParams(a) => ept_params(a, f, &mut sink)?,
        Command::Ept(EptCommand::Verify(a)) | Command::EptVerify(a) => ept_verify(a, f, &mut sink)?,
        Command::Ept(EptCommand::Simulate(a)) | Command::EptSimulate(a) => {
            ept_simulate(a, f, &mut sink)?
        }
    };
    sink.finish()?;
    Ok(outcome)
}

#[derive(Serialize)]
struct SieveSummary {
    limit: u64,
    segment_size: u64,
    count: u64,
    last_prime: Option<u64>,
}

fn sieve(a: &SieveArgs, f: Format, sink: &mut Sink) -> Result<Outcome> {
    let s = match a.segment_size {
        Some(size) => Sieve::new().with_segment_size(size)?,
        None => Sieve::new(),
    };
    let primes = s.iter_primes(a.limit)?;
    match f {
        Format::Csv => {
            sink.row(["n", "p"])?;
            for (i, p) in primes.enumerate() {
                sink.row([i as u64 + 1, p])?;
            }
        }
        Format::Json => {
            let (count, last_prime) = primes.fold((0, None), |(c, _), p| (c + 1, Some(p)));
            sink.json(&SieveSummary {
                limit: a.limit,
                segment_size: s.segment_size(),
                count,
                last_prime,
            })?;
        }
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct GapsReport {
    limit: u64,
    count: usize,
    max_gap: Option<GapEntry>,
    gaps: Vec<GapEntry>,
}

fn gaps(a: &LimitArgs, f: Format, sink: &mut Sink) -> Result<Outcome> {
    let stream = Sieve::new().gap_stream(a.limit)?;
    match f {
        Format::Csv => {
            sink.row(["n", "p", "d"])?;
            for g in stream {
                sink.row([g.n as u64, g.p, g.d])?;
            }
        }
        Format::Json => {
            let gaps: Vec<GapEntry> = stream.collect();
            // First occurrence of the largest gap.
            let max_gap = gaps
                .iter()
                .copied()
                .reduce(|best, g| if g.d > best.d { g } else { best });
            sink.json(&GapsReport {
                limit: a.limit,
                count: gaps.len(),
                max_gap,
                gaps,
            })?;
        }
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct FormReport {
    coeffs: Vec<i64>,
    classification: &'static str,
    alpha: Vec<i64>,
    erdos_easy: bool,
    degenerate: bool,
    forced_sign: Option<i8>,
    range: [usize; 2],
    evaluated: usize,
    sign_changes: usize,
    positions: Vec<usize>,
    positions_truncated: bool,
}

fn form(a: &FormArgs, f: Format, sink: &mut Sink) -> Result<Outcome> {
    let form = LinearForm::new(a.coeffs.0.clone())?;
    if a.from > a.limit {
        return Err(input(format!(
            "empty range: --from {} exceeds --limit {}",
            a.from, a.limit
        )));
    }
    let cls = classify(&form);
    let profile = form.alpha_profile();
    let table = PrimeTable::first(a.limit + form.k())?;
    let value = |n: usize| -> Result<i128> {
        Ok(if form.is_zero_sum() {
            evaluate_gap_form(&profile, n, &table)?
        } else {
            evaluate_direct(&form, n, &table)?
        })
    };

    let mut tracker = SignTracker::new();
    if f == Format::Csv {
        sink.row(["n", "T_n"])?;
    }
    for n in a.from..=a.limit {
        let t = value(n)?;
        tracker.push(n, t);
        if f == Format::Csv {
            sink.row([n as i128, t])?;
        }
    }
    if f == Format::Json {
        let changes = tracker.finish();
        let truncated = changes.positions.len() > a.positions;
        sink.json(&FormReport {
            coeffs: form.coeffs().to_vec(),
            classification: cls.class.as_str(),
            alpha: profile.alpha().to_vec(),
            erdos_easy: cls.erdos_easy,
            degenerate: cls.degenerate,
            forced_sign: cls.forced_sign,
            range: [a.from, a.limit],
            evaluated: a.limit - a.from + 1,
            sign_changes: changes.count,
            positions: changes.positions.into_iter().take(a.positions).collect(),
            positions_truncated: truncated,
        })?;
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct RecordsReport {
    limit: u64,
    ell: usize,
    c1: f64,
    c2: f64,
    c: f64,
    count: usize,
    records: Vec<PeakRecord>,
}

fn records(a: &RecordsArgs, f: Format, sink: &mut Sink) -> Result<Outcome> {
    let normalizer = RecordNormalizer::new(a.c1, a.c2)?;
    let records = scan_records(Sieve::new().gap_stream(a.limit)?, a.ell, &normalizer)?;
    match f {
        Format::Csv => {
            sink.row(["m", "p", "d", "ratio_num", "ratio_den", "normalized"])?;
            for r in &records {
                sink.row([
                    r.m.to_string(),
                    r.p.to_string(),
                    r.d.to_string(),
                    r.ratio.num.to_string(),
                    r.ratio.den.to_string(),
                    format!("{:.12}", r.normalized),
                ])?;
            }
        }
        Format::Json => sink.json(&RecordsReport {
            limit: a.limit,
            ell: a.ell,
            c1: a.c1,
            c2: a.c2,
            c: round_report_float(normalizer.c_of_ell(a.ell)),
            count: records.len(),
            records,
        })?,
    }
    Ok(Outcome::Pass)
}

fn superdominant(a: &LimitArgs, f: Format, sink: &mut Sink) -> Result<Outcome> {
    let hits = find_superdominant(Sieve::new().gap_stream(a.limit)?);
    match f {
        Format::Csv => {
            sink.row(["n", "p", "d", "d_next", "d_next2"])?;
            for h in &hits {
                sink.row([h.n as u64, h.p, h.d, h.d_next, h.d_next2])?;
            }
        }
        Format::Json => sink.json(&serde_json::json!({
            "limit": a.limit,
            "count": hits.len(),
            "hits": hits,
        }))?,
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct TupleReport {
    k: usize,
    diameter: u64,
    admissible: bool,
    witness: Option<u64>,
    w: Option<u64>,
    smooth: Option<bool>,
    offending_prime: Option<u64>,
    offending_pair: Option<(u64, u64)>,
    h: Vec<u64>,
}

#[derive(Serialize)]
struct RealizationReport {
    params: EptParameters,
    w: u64,
    realization: EptTupleRealization,
    diagnostics: RealizationDiagnostics,
}

fn tuple(a: &TupleArgs, f: Format, sink: &mut Sink) -> Result<Outcome> {
    if let Some(ell) = a.ell {
        return realization(a, ell, f, sink);
    }
    let h = match (&a.h, &a.h_file) {
        (Some(list), _) => list.0.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)?
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| input(format!("`{s}` in {} is not an offset", path.display())))
            })
            .collect::<Result<Vec<u64>>>()?,
        (None, None) => return Err(input("tuple needs --h, --h-file or --ell")),
    };
    let t = AdmissibleTuple::new(h)?;
    let adm = t.is_admissible();
    let smooth = a.w.map(|w| smooth_differences_ok(&t, w)).transpose()?;
    let violation = smooth.as_ref().and_then(|s| s.offending.clone());
    let report = TupleReport {
        k: t.k(),
        diameter: t.diameter(),
        admissible: adm.admissible,
        witness: adm.witness,
        w: a.w,
        smooth: smooth.as_ref().map(|s| s.ok),
        offending_prime: violation.as_ref().map(|v| v.prime),
        offending_pair: violation.map(|v| v.pair),
        h: t.elements().to_vec(),
    };
    match f {
        Format::Json => sink.json(&report)?,
        Format::Csv => {
            sink.row([
                "k",
                "diameter",
                "admissible",
                "witness",
                "w",
                "smooth",
                "offending_prime",
                "offending_lo",
                "offending_hi",
            ])?;
            let opt = |x: Option<u64>| x.map_or(String::new(), |v| v.to_string());
            sink.row([
                report.k.to_string(),
                report.diameter.to_string(),
                report.admissible.to_string(),
                opt(report.witness),
                opt(report.w),
                report.smooth.map_or(String::new(), |s| s.to_string()),
                opt(report.offending_prime),
                opt(report.offending_pair.map(|p| p.0)),
                opt(report.offending_pair.map(|p| p.1)),
            ])?;
        }
    }
    Ok(Outcome::Pass)
}

fn realization(a: &TupleArgs, ell: u64, f: Format, sink: &mut Sink) -> Result<Outcome> {
    let log_n = a
        .log_n
        .ok_or_else(|| input("realizing the schedule needs --log-n"))?;
    let w =
        a.w.ok_or_else(|| input("realizing the schedule needs --w"))?;
    let params = derive_params(ell, a.k_mult)?;
    let model = ExponentModel::from_params(&params)?;
    let cfg = RealizationConfig {
        log_n,
        w,
        mode: if a.repair {
            RealizationMode::PrimorialRepair
        } else {
            RealizationMode::ReportOnly
        },
        beta: None,
    };
    let (realization, diagnostics) = build_ept_tuple(&model, &cfg)?;
    match f {
        Format::Json => sink.json(&RealizationReport {
            params,
            w,
            realization,
            diagnostics,
        })?,
        Format::Csv => {
            sink.row(["i", "nu", "mu", "lambda", "c", "b", "h"])?;
            let coords = realization_coords(&model)?;
            for (i, coord) in coords.iter().enumerate() {
                sink.row([
                    (i + 1).to_string(),
                    coord.nu.to_string(),
                    coord.mu.to_string(),
                    coord.lambda.to_string(),
                    realization.c[i].to_string(),
                    realization.b[i].to_string(),
                    realization.h[i].to_string(),
                ])?;
            }
        }
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct ParamsReport {
    #[serde(flatten)]
    params: EptParameters,
    parts: u64,
    indices: u64,
    identities: IdentityReport,
}

fn ept_params(a: &ParamsArgs, f: Format, sink: &mut Sink) -> Result<Outcome> {
    let params = derive_params(a.ell, a.k_mult)?;
    let identities = params.identities();
    let holds = identities.holds;
    sink.emit(
        f,
        &ParamsReport {
            params,
            parts: params.parts(),
            indices: params.shape().indices(),
            identities,
        },
    )?;
    Ok(Outcome::gate(holds))
}

#[derive(Serialize)]
struct VerifyReport {
    params: EptParameters,
    identities: IdentityReport,
    pigeonhole: PigeonholeReport,
    monotonicity: MonotonicityReport,
    decomposition_ok: bool,
    formula_ok: bool,
    passed: bool,
}

fn ept_verify(a: &VerifyArgs, f: Format, sink: &mut Sink) -> Result<Outcome> {
    let params = derive_params(a.ell, a.k_mult)?;
    let model = ExponentModel::from_params(&params)?;
    let mode = match a.samples {
        Some(samples) => MonotonicityMode::Sampled {
            samples,
            seed: a.seed,
        },
        None => MonotonicityMode::Exhaustive {
            budget: a.budget.unwrap_or(DEFAULT_PAIR_BUDGET),
        },
    };
    let monotonicity = verify_monotonicity(&model, mode)?;
    let identities = params.identities();
    let pigeonhole = pigeonhole_bounds(&params)?;
    let decomposition_ok = monotonicity.decode_mismatches == 0;
    let formula_ok = monotonicity.formula_mismatches == 0;
    let passed = identities.holds
        && pigeonhole.holds
        && monotonicity.passed
        && decomposition_ok
        && formula_ok;
    let report = VerifyReport {
        params,
        identities,
        pigeonhole,
        monotonicity,
        decomposition_ok,
        formula_ok,
        passed,
    };
    match f {
        Format::Json => sink.json(&report)?,
        Format::Csv => {
            sink.row(["check", "passed"])?;
            sink.row(["identities", &report.identities.holds.to_string()])?;
            sink.row(["pigeonhole", &report.pigeonhole.holds.to_string()])?;
            sink.row(["monotonicity", &report.monotonicity.passed.to_string()])?;
            sink.row(["decomposition", &decomposition_ok.to_string()])?;
            sink.row(["formula", &formula_ok.to_string()])?;
            sink.row(["all", &passed.to_string()])?;
        }
    }
    Ok(Outcome::gate(passed))
}

#[derive(Serialize)]
struct SimulateSummary {
    #[serde(flatten)]
    report: SimulationReport,
    /// Occupancy at and above which every placement must select a peak.
    guaranteed_occupancy: u64,
    passed: bool,
}

fn ept_simulate(a: &SimulateArgs, f: Format, sink: &mut Sink) -> Result<Outcome> {
    let mode = if a.exhaustive {
        SimulationMode::Exhaustive
    } else {
        SimulationMode::Random {
            trials: a.trials,
            seed: a.seed,
        }
    };
    let mut cfg = match (&a.toy, a.ell) {
        (Some(toy), _) => {
            let [c, j, k, l] = toy.0[..] else {
                return Err(input(format!(
                    "--toy takes four values C,J,K,L, got {}",
                    toy.0.len()
                )));
            };
            SimulationConfig::toy(c, j, k, l, mode)?
        }
        (None, Some(ell)) => SimulationConfig::full_scale(&derive_params(ell, a.k_mult)?, mode)?,
        (None, None) => return Err(input("simulate needs --ell or --toy")),
    };
    let guaranteed = cfg.min_occupied;
    if let Some(min) = a.min_occupied {
        cfg = cfg.with_min_occupied(min);
    }
    if let Some(budget) = a.budget {
        cfg = cfg.with_budget(budget);
    }
    cfg = cfg.with_trace(a.trace);
    let report = simulate(&cfg)?;
    let selection_failures = report.failures_no_column + report.failures_sparse_later;
    let passed = report.left_inequalities_failed == 0
        && (cfg.min_occupied < guaranteed || selection_failures == 0);

    if a.trace {
        match f {
            Format::Json => {
                for t in &report.traces {
                    sink.json_line(t)?;
                }
            }
            Format::Csv => {
                sink.row([
                    "trial",
                    "occupied",
                    "column",
                    "chosen",
                    "failure",
                    "left_holds",
                    "right_holds",
                    "left_failed",
                    "right_failed",
                ])?;
                let opt = |x: Option<String>| x.unwrap_or_default();
                for t in &report.traces {
                    sink.row([
                        t.trial.to_string(),
                        t.occupied.to_string(),
                        opt(t.column.map(|v| v.to_string())),
                        opt(t.chosen.map(|v| v.to_string())),
                        t.failure.unwrap_or_default().to_string(),
                        opt(t.left_holds.map(|v| v.to_string())),
                        opt(t.right_holds.map(|v| v.to_string())),
                        t.left_failed.to_string(),
                        t.right_failed.to_string(),
                    ])?;
                }
            }
        }
    }
    let summary = SimulateSummary {
        report,
        guaranteed_occupancy: guaranteed,
        passed,
    };
    match (f, a.trace) {
        (Format::Json, true) => sink.json_line(&summary)?,
        (Format::Json, false) | (Format::Csv, false) => sink.emit(f, &summary)?,
        // The trace table already owns the CSV stream.
        (Format::Csv, true) => {}
    }
    Ok(Outcome::gate(passed))
}
