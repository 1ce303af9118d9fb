use std::io::Write;
use std::path::Path;

use num_bigint::BigUint;
use partavoid::formulas::{self, ln_big, LOG_SLACK};
use partavoid::{
    contains, f_ratio, find_occurrence, from_dacp, to_dacp, uniform_avoids, uniform_partitions,
    CountRecord, Dacp, LayeredShape, SetPartition,
};
use serde::Serialize;

use crate::counter::{Counter, Source};
use crate::report::{emit, open_sink, Cell, Table};
use crate::{CliError, Outcome, OutputFormat, PatternSet, ScanConfig};

pub const SCAN_COLUMNS: [&str; 8] =
    ["tau", "n", "count", "f_ratio", "pm", "pm_target", "gap", "gap_times_log_n"];

/// Derived quantities for one `(tau, n)` count.
#[derive(Debug, Clone)]
struct ScanPoint {
    n: usize,
    f: Option<f64>,
    gap: Option<f64>,
}

fn scan_row(rec: &CountRecord, pm: usize) -> (Vec<Cell>, ScanPoint) {
    let f = f_ratio(rec).ok();
    let pm_target = (pm > 0).then(|| 1.0 - 1.0 / pm as f64);
    // pm = 0 patterns are avoided by only exponentially many partitions
    let gap = f.map(|f| pm_target.unwrap_or(0.0) - f);
    let scaled = gap.map(|g| g.abs() * (rec.n as f64).ln());
    let row = vec![
        Cell::text(&rec.tau),
        Cell::Int(rec.n),
        Cell::text(&rec.count),
        Cell::float(f),
        Cell::Int(pm),
        Cell::float(pm_target),
        Cell::float(gap),
        Cell::float(scaled),
    ];
    (row, ScanPoint { n: rec.n, f, gap })
}

fn out_path(config: &ScanConfig) -> Option<&Path> {
    config.out.as_deref()
}

/// Counts `A_n(tau)` over the configured range and emits the growth table.
pub fn cmd_count(config: &ScanConfig) -> Result<Outcome, CliError> {
    let patterns = config.patterns.resolve(config.max_all_k)?;
    let mut counter = Counter::from_config(config)?;
    let mut table = Table::new(&SCAN_COLUMNS);
    let mut cached = 0;
    for tau in &patterns {
        let pm = tau.permeability().value;
        for n in config.n_range() {
            let (rec, source) = counter.count_with_source(tau, n)?;
            cached += usize::from(source == Source::Cache);
            table.push(scan_row(&rec, pm).0);
        }
    }
    emit::<()>(&table, None, config.format, out_path(config))?;
    let mut outcome = Outcome::default();
    outcome.notes.push(format!("{} computed, {cached} from cache", counter.computed()));
    Ok(outcome)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub host: SetPartition,
    pub pattern: SetPartition,
    pub contains: bool,
    pub witness: Option<Vec<usize>>,
}

/// Containment query with the lexicographically smallest witness.
pub fn check(host: &str, pattern: &str) -> Result<CheckResult, CliError> {
    let host: SetPartition = host.parse()?;
    let pattern: SetPartition = pattern.parse()?;
    let witness = find_occurrence(&host, &pattern).map(|o| o.map().to_vec());
    Ok(CheckResult { contains: witness.is_some(), host, pattern, witness })
}

pub fn cmd_check(
    host: &str,
    pattern: &str,
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let res = check(host, pattern)?;
    let mut sink = open_sink(out)?;
    match format {
        OutputFormat::Json => {
            serde_json::to_writer(&mut sink, &res).map_err(std::io::Error::other)?;
            writeln!(sink)?;
        }
        OutputFormat::Csv => {
            let mut t = Table::new(&["host", "pattern", "verdict", "witness"]);
            let verdict = if res.contains { "contains" } else { "avoids" };
            let witness = res
                .witness
                .as_ref()
                .map_or(Cell::Empty, |w| Cell::text(serde_json::to_string(w).expect("ints")));
            t.push(vec![
                Cell::text(&res.host),
                Cell::text(&res.pattern),
                Cell::text(verdict),
                witness,
            ]);
            t.write_csv(&mut sink)?;
        }
    }
    sink.flush()?;
    Ok(Outcome::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Consistent,
    Inconsistent,
    Inconclusive,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct Observation {
    pub tau: String,
    pub n: Option<usize>,
    pub note: String,
    pub margin: Option<f64>,
}

/// Finite-n evidence about one conjecture. Only `Fail` carries a verdict;
/// the limit statements themselves are never confirmed.
#[derive(Debug, Clone, Serialize)]
pub struct ConjectureVerdict {
    pub id: &'static str,
    pub status: Status,
    pub counterexample: Option<(String, usize)>,
    pub observations: Vec<Observation>,
}

impl ConjectureVerdict {
    fn new(id: &'static str, status: Status, observations: Vec<Observation>) -> Self {
        debug_assert!(status != Status::Fail);
        ConjectureVerdict { id, status, counterexample: None, observations }
    }

    fn fail(
        id: &'static str,
        tau: &SetPartition,
        n: usize,
        observations: Vec<Observation>,
    ) -> Self {
        ConjectureVerdict {
            id,
            status: Status::Fail,
            counterexample: Some((tau.to_string(), n)),
            observations,
        }
    }
}

fn obs(tau: &SetPartition, n: Option<usize>, note: String, margin: Option<f64>) -> Observation {
    Observation { tau: tau.to_string(), n, note, margin }
}

// No blow-up: the largest value over the second half of the sequence does
// not exceed the largest over the first half.
fn trend(values: &[f64]) -> Status {
    if values.len() < 4 {
        return Status::Inconclusive;
    }
    let (head, tail) = values.split_at(values.len() / 2);
    let max = |s: &[f64]| s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max(tail) <= max(head) + 1e-12 {
        Status::Consistent
    } else {
        Status::Inconsistent
    }
}

/// Unit constant for the `O(1/ln n)` margin: `|gap| ln n` may drift but
/// must stay below this over the second half of the range.
pub const C6_SCALE: f64 = 1.0;

fn bounded_tail(values: &[f64], scale: f64) -> Status {
    if values.len() < 4 {
        return Status::Inconclusive;
    }
    if values[values.len() / 2..].iter().all(|&v| v < scale) {
        Status::Consistent
    } else {
        Status::Inconsistent
    }
}

fn combine(statuses: impl IntoIterator<Item = Status>) -> Status {
    let mut any_consistent = false;
    for s in statuses {
        match s {
            Status::Inconsistent => return Status::Inconsistent,
            Status::Consistent => any_consistent = true,
            _ => {}
        }
    }
    if any_consistent {
        Status::Consistent
    } else {
        Status::Inconclusive
    }
}

#[derive(Debug, Serialize)]
pub struct ConjectureReport {
    pub verdicts: Vec<ConjectureVerdict>,
}

/// Desk-scale probes of the growth-rate conjectures.
///
/// * `C1`: `A_n(12...k) >= A_n(tau)` for every scanned `tau` of `[k]`, with
///   the first `n` from which the inequality stays strict.
/// * `C2-4`: the proxy `1/(1 - F_n)` and its distance to the nearest integer.
/// * `C5`: `F_n` against `1 - 1/pm(tau)`, requiring the gap not to grow.
/// * `C6`: `|F_n - (1 - 1/pm)| ln n` for `pm >= 2`, flagging values above
///   [`C6_SCALE`] in the second half of the range.
pub fn cmd_conjectures(config: &ScanConfig) -> Result<(Outcome, ConjectureReport), CliError> {
    let patterns = config.patterns.resolve(config.max_all_k)?;
    let mut counter = Counter::from_config(config)?;
    let mut table = Table::new(&SCAN_COLUMNS);
    let mut series: Vec<(SetPartition, usize, Vec<ScanPoint>, Vec<BigUint>)> = Vec::new();
    for tau in &patterns {
        let pm = tau.permeability().value;
        let mut points = Vec::new();
        let mut counts = Vec::new();
        for n in config.n_range() {
            let rec = counter.count(tau, n)?;
            let (row, point) = scan_row(&rec, pm);
            table.push(row);
            points.push(point);
            counts.push(rec.count);
        }
        series.push((tau.clone(), pm, points, counts));
    }

    let mut verdicts = Vec::new();

    // C1
    let mut observations = Vec::new();
    let mut failure = None;
    let mut all_strict = true;
    let mut compared = false;
    for (tau, _, _, counts) in &series {
        let k = tau.n();
        let block = SetPartition::single_block(k);
        if k < 2 || *tau == block {
            continue;
        }
        compared = true;
        let mut n0 = None;
        for (i, n) in config.n_range().enumerate() {
            let base = counter.count(&block, n)?.count;
            if base < counts[i] {
                failure.get_or_insert((tau.clone(), n));
                observations.push(obs(
                    tau,
                    Some(n),
                    format!("A_n(block)={base} < A_n={}", counts[i]),
                    None,
                ));
                n0 = None;
                break;
            }
            if base > counts[i] {
                n0.get_or_insert(n);
            } else {
                n0 = None;
            }
        }
        match n0 {
            Some(n0) => observations.push(obs(tau, Some(n0), "strict from n0".into(), None)),
            None => {
                all_strict = false;
                observations.push(obs(tau, None, "no strict tail within range".into(), None));
            }
        }
    }
    verdicts.push(match failure {
        Some((tau, n)) => ConjectureVerdict::fail("C1", &tau, n, observations),
        None if compared && all_strict => {
            ConjectureVerdict::new("C1", Status::Consistent, observations)
        }
        None => ConjectureVerdict::new("C1", Status::Inconclusive, observations),
    });

    // C2-4 trend diagnostic
    let mut observations = Vec::new();
    for (tau, _, points, _) in &series {
        if let Some(last) = points.iter().rev().find(|p| p.f.is_some()) {
            let f = last.f.expect("filtered");
            if f < 1.0 {
                let c = 1.0 / (1.0 - f);
                let dist = (c - c.round()).abs();
                observations.push(obs(
                    tau,
                    Some(last.n),
                    format!(
                        "1/(1-F_n) = {} (k-1 = {}); trend diagnostic only",
                        crate::report::fmt_float(c),
                        tau.n().saturating_sub(1)
                    ),
                    Some(dist),
                ));
            }
        }
    }
    verdicts.push(ConjectureVerdict::new("C2-4", Status::Inconclusive, observations));

    // C5
    let mut observations = Vec::new();
    let mut statuses = Vec::new();
    for (tau, pm, points, _) in &series {
        let gaps: Vec<f64> = points.iter().filter_map(|p| p.gap.map(f64::abs)).collect();
        let status = trend(&gaps);
        statuses.push(status);
        let last = points.iter().rev().find(|p| p.gap.is_some());
        let note = if *pm == 0 {
            format!(
                "pm=0, F must remain 0; observed F_n = {}",
                last.and_then(|p| p.f).map(crate::report::fmt_float).unwrap_or_default()
            )
        } else {
            format!("target 1-1/{pm}; |gap| trend {status:?}")
        };
        observations.push(obs(tau, last.map(|p| p.n), note, last.and_then(|p| p.gap)));
    }
    verdicts.push(ConjectureVerdict::new("C5", combine(statuses), observations));

    // C6
    let mut observations = Vec::new();
    let mut statuses = Vec::new();
    for (tau, pm, points, _) in &series {
        if *pm < 2 {
            continue;
        }
        let scaled: Vec<f64> =
            points.iter().filter_map(|p| p.gap.map(|g| g.abs() * (p.n as f64).ln())).collect();
        let status = bounded_tail(&scaled, C6_SCALE);
        statuses.push(status);
        let Some(last) = points.iter().rev().find(|p| p.f.is_some()) else { continue };
        let f = last.f.expect("filtered");
        let mut note = format!(
            "|gap| ln n = {}",
            scaled.last().map_or(String::new(), |v| crate::report::fmt_float(*v))
        );
        if f < 1.0 {
            let observed = (1.0 / (1.0 - f)).round() as usize;
            if observed != *pm {
                note.push_str(&format!(
                    "; candidate targets 1-1/{pm} (permeability) and 1-1/{observed} (nearest to observed)"
                ));
            }
        }
        observations.push(obs(tau, Some(last.n), note, scaled.last().copied()));
    }
    verdicts.push(ConjectureVerdict::new("C6", combine(statuses), observations));

    let report = ConjectureReport { verdicts };
    emit(&table, Some(("verdicts", &report.verdicts)), config.format, out_path(config))?;
    let mut outcome = Outcome::default();
    for v in &report.verdicts {
        outcome.notes.push(format!("{}: {:?}", v.id, v.status));
    }
    Ok((outcome, report))
}

pub const BOUND_COLUMNS: [&str; 11] = [
    "tau",
    "k",
    "r",
    "n",
    "count",
    "ln_count",
    "f_ratio",
    "lower",
    "upper",
    "block_upper",
    "holds",
];

/// Audits exact counts of layered patterns against the closed-form bounds.
///
/// `PatternSet::AllOfSize(k)` means every layered pattern of size at most `k`.
pub fn cmd_bounds(config: &ScanConfig) -> Result<Outcome, CliError> {
    let shapes: Vec<LayeredShape> = match &config.patterns {
        PatternSet::Explicit(v) => v
            .iter()
            .map(|t| {
                t.layered_shape().ok_or_else(|| CliError::Invalid(format!("{t} is not layered")))
            })
            .collect::<Result<_, _>>()?,
        PatternSet::AllOfSize(k) if *k > config.max_all_k + 3 => {
            return Err(CliError::Resource(format!("layered shapes up to k={k}")))
        }
        PatternSet::AllOfSize(k) => (1..=*k).flat_map(LayeredShape::all_of_size).collect(),
    };
    let mut counter = Counter::from_config(config)?;
    let mut table = Table::new(&BOUND_COLUMNS);
    let mut outcome = Outcome::default();
    for shape in &shapes {
        let tau = shape.to_partition();
        let (k, r) = (shape.size(), shape.num_blocks());
        for n in config.n_range().filter(|&n| n >= 1) {
            let rec = counter.count(&tau, n)?;
            let ln_a = ln_big(&rec.count);
            let mut lower = None;
            let mut upper = None;
            let mut block_upper = None;
            let mut holds = true;
            if r < k {
                let t = k - r;
                let u = formulas::log_upper_bound_layered(k, r, n).expect("k > r, n >= 1").value();
                holds &= ln_a <= u + LOG_SLACK;
                upper = Some(u);
                if n % t == 0 {
                    let l = formulas::log_lower_bound_uniform(t, n).expect("divisible").value();
                    holds &= l <= ln_a + LOG_SLACK;
                    lower = Some(l);
                }
                if r == 1 {
                    let b = formulas::log_upper_bound_block(k, n).expect("k >= 2").value();
                    holds &= ln_a <= b + LOG_SLACK;
                    block_upper = Some(b);
                }
            } else if k >= 2 {
                // all singletons: at most k - 1 blocks
                holds &= rec.count <= BigUint::from(k - 1).pow(n as u32);
                upper = Some(n as f64 * ((k - 1) as f64).ln());
            }
            if !holds {
                outcome.findings.push(format!(
                    "{tau} n={n}: ln A_n = {ln_a} outside [{lower:?}, {upper:?}] (block bound {block_upper:?})"
                ));
            }
            table.push(vec![
                Cell::text(&tau),
                Cell::Int(k),
                Cell::Int(r),
                Cell::Int(n),
                Cell::text(&rec.count),
                Cell::float(ln_a.is_finite().then_some(ln_a)),
                Cell::float(f_ratio(&rec).ok()),
                Cell::float(lower),
                Cell::float(upper),
                Cell::float(block_upper),
                Cell::Bool(holds),
            ]);
        }
    }
    emit::<()>(&table, None, config.format, out_path(config))?;
    Ok(outcome)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DacpDirection {
    /// Slash-notation partition to graph JSON.
    ToGraph(String),
    /// Graph JSON to slash-notation partition.
    FromGraph(String),
}

/// Converts between partitions and graphs; with `roundtrip`, converts back
/// and checks that the original is recovered.
pub fn dacp_convert(direction: &DacpDirection, roundtrip: bool) -> Result<String, CliError> {
    match direction {
        DacpDirection::ToGraph(text) => {
            let p: SetPartition = text.parse()?;
            let g = to_dacp(&p);
            if roundtrip {
                let back = from_dacp(&g).map_err(|e| CliError::Assertion(e.to_string()))?;
                if back != p {
                    return Err(CliError::Assertion(format!("{p} came back as {back}")));
                }
            }
            Ok(serde_json::to_string(&g).expect("graph serializes"))
        }
        DacpDirection::FromGraph(json) => {
            let g: Dacp = serde_json::from_str(json)
                .map_err(|e| CliError::Invalid(format!("graph JSON: {e}")))?;
            let p = from_dacp(&g).map_err(|e| CliError::Invalid(e.to_string()))?;
            if roundtrip {
                let h = to_dacp(&p);
                let same = h.edges().len() == g.edges().len()
                    && partavoid::dacp_contains(&h, &g)
                    && partavoid::dacp_contains(&g, &h);
                if !same {
                    return Err(CliError::Assertion(format!(
                        "graph of {p} is not isomorphic to the input"
                    )));
                }
            }
            Ok(p.to_string())
        }
    }
}

pub fn cmd_dacp(
    direction: &DacpDirection,
    roundtrip: bool,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let text = dacp_convert(direction, roundtrip)?;
    let mut sink = open_sink(out)?;
    writeln!(sink, "{text}")?;
    sink.flush()?;
    Ok(Outcome::default())
}

/// Largest pattern for which the exhaustive cross-check runs.
pub const EXHAUSTIVE_PM_LIMIT: usize = 18;

pub fn cmd_permeability(
    patterns: &[SetPartition],
    exhaustive: bool,
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let mut table =
        Table::new(&["tau", "n", "pm", "cuts", "intervals", "sba", "pm_target", "exhaustive"]);
    let mut outcome = Outcome::default();
    for tau in patterns {
        let pm = tau.permeability();
        let check = if exhaustive {
            if tau.n() > EXHAUSTIVE_PM_LIMIT {
                return Err(CliError::Resource(format!(
                    "exhaustive permeability for n={} exceeds {EXHAUSTIVE_PM_LIMIT}",
                    tau.n()
                )));
            }
            let e = tau.permeability_exhaustive().value;
            if e != pm.value {
                outcome.findings.push(format!("{tau}: greedy {} vs exhaustive {e}", pm.value));
            }
            Cell::Int(e)
        } else {
            Cell::Empty
        };
        let intervals: Vec<String> =
            pm.witness.intervals().iter().map(|(a, b)| format!("{a}-{b}")).collect();
        let cuts: Vec<String> = pm.witness.cuts().iter().map(ToString::to_string).collect();
        table.push(vec![
            Cell::text(tau),
            Cell::Int(tau.n()),
            Cell::Int(pm.value),
            Cell::text(cuts.join(" ")),
            Cell::text(intervals.join(" ")),
            Cell::Int(tau.sba()),
            Cell::float((pm.value > 0).then(|| 1.0 - 1.0 / pm.value as f64)),
            check,
        ]);
    }
    emit::<()>(&table, None, format, out)?;
    Ok(outcome)
}

/// Most uniform partitions a single run will stream.
pub const UNIFORM_STREAM_LIMIT: u64 = 10_000_000;

pub fn cmd_uniform(
    n: usize,
    t: usize,
    list: bool,
    patterns: &[SetPartition],
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let stream = uniform_partitions(n, t).map_err(|e| CliError::Invalid(e.to_string()))?;
    let expected = stream.expected_count().clone();
    if expected > BigUint::from(UNIFORM_STREAM_LIMIT) {
        return Err(CliError::Resource(format!(
            "{expected} uniform partitions exceed {UNIFORM_STREAM_LIMIT}"
        )));
    }
    let members: Vec<SetPartition> = stream.collect();
    let mut outcome = Outcome::default();
    if BigUint::from(members.len()) != expected {
        outcome.findings.push(format!("streamed {} but formula gives {expected}", members.len()));
    }
    if list {
        let mut table = Table::new(&["index", "partition"]);
        for (i, u) in members.iter().enumerate() {
            table.push(vec![Cell::Int(i + 1), Cell::text(u)]);
        }
        emit::<()>(&table, None, format, out)?;
        return Ok(outcome);
    }
    let mut table = Table::new(&[
        "n",
        "t",
        "expected_count",
        "streamed",
        "tau",
        "sba",
        "sufficient",
        "observed_avoids",
    ]);
    let summary = |tau: Cell, sba: Cell, suff: Cell, obs: Cell| {
        vec![
            Cell::Int(n),
            Cell::Int(t),
            Cell::text(&expected),
            Cell::Int(members.len()),
            tau,
            sba,
            suff,
            obs,
        ]
    };
    if patterns.is_empty() {
        table.push(summary(Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty));
    }
    for tau in patterns {
        let sufficient = uniform_avoids(tau, t);
        let observed = members.iter().all(|u| !contains(u, tau));
        if sufficient && !observed {
            outcome.findings.push(format!("a uniform partition with {t} sections contains {tau}"));
        }
        table.push(summary(
            Cell::text(tau),
            Cell::Int(tau.sba()),
            Cell::Bool(sufficient),
            Cell::Bool(observed),
        ));
    }
    emit::<()>(&table, None, format, out)?;
    Ok(outcome)
}
