//! Command implementations behind the `aqt` binary. Kept in the library so
//! they can be driven from tests without spawning processes.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::analysis::{self, BoundParams, DomainError, Growth, Limit, LogBase};
use crate::engine::{self, Trace};
use crate::export;
use crate::interval::{self, IntervalRun, Lemma1Violation, PhaseRecord};
use crate::scenario::{Scenario, ScenarioErrors, StrategySpec};
use crate::static_routing::sweep::{run_sweep, SweepConfig, SweepReport};
use crate::strategies::Discipline;

/// Exit code for validation and domain errors.
pub const EXIT_INVALID: i32 = 2;
/// Output directory when neither the scenario nor `--out` names one.
pub const DEFAULT_OUT_DIR: &str = "out";
/// Exit code for a runtime assertion failure.
pub const EXIT_ASSERTION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid scenario:\n{0}")]
    Scenario(#[from] ScenarioErrors),
    #[error("{0}")]
    Domain(#[from] DomainError),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("runtime assertion failed: {0}")]
    Assertion(#[from] Lemma1Violation),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => EXIT_ASSERTION,
            _ => EXIT_INVALID,
        }
    }
}

// --- run ----------------------------------------------------------------------

#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub max_steps: Option<u64>,
    pub discipline: Option<Discipline>,
    pub improvement: Option<bool>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub strategy: StrategySpec,
    pub steps: u64,
    pub truncated: bool,
    pub packets: usize,
    pub delivered: usize,
    pub max_queue_len: usize,
    pub max_system_time: Option<u64>,
    /// Completed phases, phase 0 included (interval-strategy only).
    pub phases: Option<usize>,
    pub phase_growth: Option<Growth>,
    pub files: Vec<PathBuf>,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "strategy:        {}", self.strategy)?;
        writeln!(
            f,
            "steps:           {}{}",
            self.steps,
            if self.truncated { " (truncated at max_steps)" } else { "" }
        )?;
        writeln!(f, "packets:         {} injected, {} delivered", self.packets, self.delivered)?;
        writeln!(f, "max queue len:   {}", self.max_queue_len)?;
        match self.max_system_time {
            Some(t) => writeln!(f, "max system time: {t}")?,
            None => writeln!(f, "max system time: n/a")?,
        }
        if let Some(p) = self.phases {
            writeln!(f, "phases:          {} completed after phase 0", p.saturating_sub(1))?;
            match self.phase_growth {
                Some(g) => writeln!(
                    f,
                    "phase durations: {} (heuristic, mean ratio {:.4})",
                    g.label, g.ratio
                )?,
                None => writeln!(f, "phase durations: too few phases to classify")?,
            }
        }
        for file in &self.files {
            writeln!(f, "wrote {}", file.display())?;
        }
        Ok(())
    }
}

/// Window used to label a series of the given length, if it is long enough.
fn growth_window(len: usize) -> Option<usize> {
    let w = (len / 2).min(10);
    (w >= 3).then_some(w)
}

fn growth_of(series: &[f64]) -> Option<Growth> {
    growth_window(series.len()).and_then(|w| analysis::classify_growth(series, w).ok())
}

/// Result of running a scenario, before anything is written.
#[derive(Debug, Clone)]
pub enum Outcome {
    Plain(Trace),
    Interval(IntervalRun),
}

impl Outcome {
    pub fn trace(&self) -> &Trace {
        match self {
            Outcome::Plain(t) => t,
            Outcome::Interval(r) => &r.trace,
        }
    }

    pub fn phases(&self) -> Option<&[PhaseRecord]> {
        match self {
            Outcome::Plain(_) => None,
            Outcome::Interval(r) => Some(&r.phases),
        }
    }
}

pub fn apply_overrides(scenario: &mut Scenario, overrides: &RunOverrides) -> Result<(), CliError> {
    if let Some(n) = overrides.max_steps {
        if n == 0 {
            return Err(CliError::Argument("--max-steps must be at least 1".into()));
        }
        scenario.max_steps = n;
    }
    if let Some(d) = overrides.discipline {
        scenario.strategy = scenario.strategy.with_discipline(d);
    }
    if let Some(on) = overrides.improvement {
        match &mut scenario.strategy {
            StrategySpec::Interval { improvement, .. } => *improvement = on,
            StrategySpec::Plain(_) if on => {
                return Err(CliError::Argument(
                    "--improvement on requires an interval strategy".into(),
                ))
            }
            StrategySpec::Plain(_) => {}
        }
    }
    if let Some(dir) = &overrides.out_dir {
        scenario.out_dir = Some(dir.clone());
    }
    Ok(())
}

pub fn simulate(scenario: &Scenario) -> Result<Outcome, Lemma1Violation> {
    let adversary = scenario.adversary.build();
    Ok(match scenario.strategy {
        StrategySpec::Plain(d) => {
            Outcome::Plain(engine::run(&scenario.network, d, adversary, scenario.max_steps))
        }
        StrategySpec::Interval { inner, improvement } => Outcome::Interval(interval::run_interval(
            &scenario.network,
            inner,
            adversary,
            scenario.max_steps,
            improvement,
        )?),
    })
}

/// Metadata line written at the top of every CSV.
fn run_comment(source: &str, scenario: &Scenario) -> String {
    let budget = scenario
        .adversary
        .budget()
        .map(|b| format!(" r={} b={}", b.rate, b.burst))
        .unwrap_or_default();
    format!(
        "scenario={source} strategy={} adversary={}{budget} max_steps={}",
        scenario.strategy,
        scenario.adversary.kind(),
        scenario.max_steps
    )
}

pub fn summarize(scenario: &Scenario, outcome: &Outcome, files: Vec<PathBuf>) -> RunSummary {
    let trace = outcome.trace();
    let phase_growth = outcome.phases().and_then(|p| {
        let durations: Vec<f64> = p.iter().skip(1).map(|r| r.duration as f64).collect();
        growth_of(&durations)
    });
    RunSummary {
        strategy: scenario.strategy,
        steps: trace.last_step(),
        truncated: trace.truncated,
        packets: trace.packets.len(),
        delivered: trace.packets.iter().filter(|p| p.delivered_at.is_some()).count(),
        max_queue_len: trace.max_queue_len(),
        max_system_time: trace.max_system_time(),
        phases: outcome.phases().map(<[PhaseRecord]>::len),
        phase_growth,
        files,
    }
}

/// Writes `trace.csv`, `packets.csv` and, for the interval-strategy,
/// `phases.csv` into `dir`.
pub fn write_outputs(
    dir: &Path,
    comment: &str,
    outcome: &Outcome,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let trace_path = dir.join("trace.csv");
    export::write_trace(io::BufWriter::new(fs::File::create(&trace_path)?), comment, outcome.trace())?;
    files.push(trace_path);
    let packets_path = dir.join("packets.csv");
    export::write_packets(
        io::BufWriter::new(fs::File::create(&packets_path)?),
        comment,
        outcome.trace(),
    )?;
    files.push(packets_path);
    if let Some(phases) = outcome.phases() {
        let phases_path = dir.join("phases.csv");
        export::write_phases(io::BufWriter::new(fs::File::create(&phases_path)?), comment, phases)?;
        files.push(phases_path);
    }
    Ok(files)
}

/// `run <file>`: load, validate, simulate, write CSVs.
pub fn cmd_run(file: &Path, overrides: &RunOverrides) -> Result<RunSummary, CliError> {
    let mut scenario = Scenario::load(file)?;
    apply_overrides(&mut scenario, overrides)?;
    let outcome = simulate(&scenario)?;
    let source = file
        .file_name()
        .map_or_else(|| file.display().to_string(), |n| n.to_string_lossy().into_owned());
    let comment = run_comment(&source, &scenario);
    let dir = scenario.out_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let files = write_outputs(&dir, &comment, &outcome)?;
    Ok(summarize(&scenario, &outcome, files))
}

// --- bounds -------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    Line,
    Tree,
    NonForward,
    TheoremTime,
    TheoremPackets,
}

impl FromStr for Formula {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "line" => Formula::Line,
            "tree" => Formula::Tree,
            "nonforward" => Formula::NonForward,
            "theorem-time" => Formula::TheoremTime,
            "theorem-packets" => Formula::TheoremPackets,
            other => {
                return Err(CliError::Argument(format!(
                    "unknown formula `{other}` (expected line, tree, nonforward, theorem-time, theorem-packets)"
                )))
            }
        })
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formula::Line => "line",
            Formula::Tree => "tree",
            Formula::NonForward => "nonforward",
            Formula::TheoremTime => "theorem-time",
            Formula::TheoremPackets => "theorem-packets",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsArgs {
    pub r: f64,
    pub b: f64,
    pub d: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub i_max: u32,
    pub log_base: f64,
}

impl Default for BoundsArgs {
    fn default() -> Self {
        BoundsArgs {
            r: 0.5,
            b: 4.0,
            d: 4.0,
            c1: 1.0,
            c2: 1.0,
            c3: 0.0,
            i_max: 20,
            log_base: 2.0,
        }
    }
}

impl BoundsArgs {
    /// Applies one `key=value` assignment (`r=0.5`, `i_max=10`, ...).
    pub fn assign(&mut self, kv: &str) -> Result<(), CliError> {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Argument(format!("expected key=value, got `{kv}`")))?;
        let num = || {
            value
                .parse::<f64>()
                .map_err(|_| CliError::Argument(format!("`{key}` needs a number, got `{value}`")))
        };
        match key.trim_start_matches('-').replace('-', "_").as_str() {
            "r" => self.r = num()?,
            "b" => self.b = num()?,
            "d" => self.d = num()?,
            "c1" => self.c1 = num()?,
            "c2" => self.c2 = num()?,
            "c3" => self.c3 = num()?,
            "log_base" => self.log_base = num()?,
            "i_max" => {
                self.i_max = value
                    .parse()
                    .map_err(|_| CliError::Argument(format!("i_max needs a positive integer, got `{value}`")))?
            }
            other => return Err(CliError::Argument(format!("unknown parameter `{other}`"))),
        }
        Ok(())
    }

    fn params(&self) -> BoundParams {
        BoundParams {
            r: self.r,
            b: self.b,
            d: self.d,
            c1: self.c1,
            c2: self.c2,
            c3: self.c3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsTable {
    pub formula: Formula,
    pub values: Vec<f64>,
    pub limit: Option<Limit>,
    pub growth: Option<Growth>,
}

pub fn compute_bounds(formula: Formula, args: &BoundsArgs) -> Result<BoundsTable, CliError> {
    if args.i_max == 0 {
        return Err(CliError::Argument("i_max must be at least 1".into()));
    }
    let (r, b, d) = (args.r, args.b, args.d);
    let indices = 1..=args.i_max;
    let (values, limit) = match formula {
        Formula::Line => (
            indices
                .map(|i| analysis::line_phase_time_bound(i, r, b, d))
                .collect::<Result<Vec<_>, _>>()?,
            Some(Limit::Finite(analysis::line_phase_time_limit(r, d)?)),
        ),
        Formula::Tree => (
            indices
                .map(|i| analysis::tree_phase_time_bound(i, r, b, d))
                .collect::<Result<Vec<_>, _>>()?,
            Some(analysis::tree_limit(r, b, d)?),
        ),
        Formula::NonForward => {
            let base = LogBase::new(args.log_base)?;
            (
                analysis::nonforward_series(r, b, d, base, args.i_max)?,
                Some(Limit::Finite(analysis::nonforward_fixed_point(r, d, base)?)),
            )
        }
        Formula::TheoremTime => {
            let p = args.params();
            (
                indices
                    .map(|i| analysis::theorem_phase_time_bound(i, &p))
                    .collect::<Result<Vec<_>, _>>()?,
                Some(Limit::Finite(analysis::theorem_time_limit(&p)?)),
            )
        }
        Formula::TheoremPackets => {
            let p = args.params();
            (
                indices
                    .map(|i| analysis::theorem_phase_packet_bound(i, &p))
                    .collect::<Result<Vec<_>, _>>()?,
                Some(Limit::Finite(analysis::theorem_packet_limit(&p)?)),
            )
        }
    };
    let growth = growth_of(&values);
    Ok(BoundsTable {
        formula,
        values,
        limit,
        growth,
    })
}

/// `i,value` rows, a `limit,<value>` row when defined, then a `#` line with
/// the growth label.
pub fn write_bounds_table<W: Write>(mut out: W, table: &BoundsTable, args: &BoundsArgs) -> io::Result<()> {
    let comment = format!(
        "bounds formula={} r={} b={} d={} c1={} c2={} c3={} log_base={} i_max={}",
        table.formula, args.r, args.b, args.d, args.c1, args.c2, args.c3, args.log_base, args.i_max
    );
    export::write_bounds(&mut out, &comment, &table.values)?;
    if let Some(limit) = table.limit {
        writeln!(out, "limit,{limit}")?;
    }
    match table.growth {
        Some(g) => writeln!(out, "# growth={} ratio={:.6} (heuristic)", g.label, g.ratio),
        None => writeln!(out, "# growth=n/a (series too short to classify)"),
    }
}

pub fn cmd_bounds<W: Write>(formula: Formula, args: &BoundsArgs, out: W) -> Result<BoundsTable, CliError> {
    let table = compute_bounds(formula, args)?;
    write_bounds_table(out, &table, args)?;
    Ok(table)
}

// --- sweep --------------------------------------------------------------------

pub fn cmd_sweep<W: Write>(config: &SweepConfig, mut out: W) -> Result<SweepReport, CliError> {
    let report = run_sweep(config);
    let shapes: Vec<String> = config.shapes.iter().map(ToString::to_string).collect();
    let comment = format!(
        "sweep max_packets={} max_edges={} shapes={}",
        config.max_packets,
        config.max_edges,
        shapes.join(",")
    );
    export::write_sweep(&mut out, &comment, &report.rows)?;
    writeln!(out, "# summary: {}", report.summary())?;
    Ok(report)
}
