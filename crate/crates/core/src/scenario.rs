//! Scenario files: TOML with four tables.
//!
//! ```toml
//! [network]
//! nodes = ["v0", "v1", "v2"]
//! edges = [ { id = "e1", from = "v0", to = "v1" },
//!           { id = "e2", from = "v1", to = "v2" } ]
//!
//! [adversary]
//! kind = "saturating"          # scripted | burst | saturating
//! r = 0.5                      # scripted, saturating
//! b = 4
//! path = ["e1", "e2"]          # saturating
//! # paths = [["e1"], ["e1", "e2"]]                # burst
//! # events = [ { step = 1, path = ["e1"] } ]      # scripted
//!
//! [strategy]
//! kind = "interval"            # plain | interval
//! discipline = "FIFO"          # plain discipline or inner scheduler
//! improvement = false          # pass-through, interval only
//!
//! [run]
//! max_steps = 200
//! out_dir = "out"              # optional
//! ```
//!
//! Validation reports every field error at once, each with its path.

use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;

use crate::adversary::{
    Adversary, AdversaryError, Budget, BurstAdversary, InjectionEvent, Rate, SaturatingAdversary,
    ScriptedAdversary,
};
use crate::network::{Network, PacketPath};
use crate::strategies::Discipline;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    network: RawNetwork,
    adversary: RawAdversary,
    strategy: RawStrategy,
    #[serde(default)]
    run: RawRun,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    nodes: Vec<String>,
    #[serde(default)]
    edges: Vec<RawEdge>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    id: String,
    from: String,
    to: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAdversary {
    kind: String,
    r: Option<f64>,
    b: Option<i64>,
    path: Option<Vec<String>>,
    paths: Option<Vec<Vec<String>>>,
    events: Option<Vec<RawEvent>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvent {
    step: i64,
    path: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStrategy {
    #[serde(default = "default_kind")]
    kind: String,
    discipline: String,
    #[serde(default)]
    improvement: bool,
}

fn default_kind() -> String {
    "plain".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    #[serde(default = "default_max_steps")]
    max_steps: i64,
    out_dir: Option<String>,
}

fn default_max_steps() -> i64 {
    1000
}

impl Default for RawRun {
    fn default() -> Self {
        RawRun {
            max_steps: default_max_steps(),
            out_dir: None,
        }
    }
}

/// A problem with one field of a scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioErrors(pub Vec<FieldError>);

impl fmt::Display for ScenarioErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ScenarioErrors {}

#[derive(Debug, Clone)]
pub enum AdversarySpec {
    Scripted {
        events: Vec<InjectionEvent>,
        budget: Budget,
    },
    Burst {
        paths: Vec<PacketPath>,
        burst: u64,
    },
    Saturating {
        path: PacketPath,
        budget: Budget,
    },
}

impl AdversarySpec {
    /// A fresh adversary; scenarios can be run any number of times.
    pub fn build(&self) -> Box<dyn Adversary> {
        match self {
            AdversarySpec::Scripted { events, budget } => Box::new(
                ScriptedAdversary::new(events.clone(), budget).expect("validated at load"),
            ),
            AdversarySpec::Burst { paths, burst } => {
                Box::new(BurstAdversary::new(paths.clone(), *burst).expect("validated at load"))
            }
            AdversarySpec::Saturating { path, budget } => Box::new(
                SaturatingAdversary::new(path.clone(), budget.rate, budget.burst)
                    .expect("validated at load"),
            ),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AdversarySpec::Scripted { .. } => "scripted",
            AdversarySpec::Burst { .. } => "burst",
            AdversarySpec::Saturating { .. } => "saturating",
        }
    }

    pub fn budget(&self) -> Option<Budget> {
        match self {
            AdversarySpec::Scripted { budget, .. } | AdversarySpec::Saturating { budget, .. } => {
                Some(*budget)
            }
            AdversarySpec::Burst { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategySpec {
    Plain(Discipline),
    Interval { inner: Discipline, improvement: bool },
}

impl StrategySpec {
    pub fn discipline(&self) -> Discipline {
        match *self {
            StrategySpec::Plain(d) => d,
            StrategySpec::Interval { inner, .. } => inner,
        }
    }

    pub fn with_discipline(self, d: Discipline) -> Self {
        match self {
            StrategySpec::Plain(_) => StrategySpec::Plain(d),
            StrategySpec::Interval { improvement, .. } => StrategySpec::Interval {
                inner: d,
                improvement,
            },
        }
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::Plain(d) => write!(f, "{d}"),
            StrategySpec::Interval { inner, improvement } => write!(
                f,
                "interval({inner}{})",
                if *improvement { ", pass-through" } else { "" }
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub network: Network,
    pub adversary: AdversarySpec,
    pub strategy: StrategySpec,
    pub max_steps: u64,
    pub out_dir: Option<PathBuf>,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioErrors> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| {
            ScenarioErrors(vec![FieldError {
                path: "<document>".into(),
                message: e.to_string().trim().to_string(),
            }])
        })?;
        validate(raw)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ScenarioErrors> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ScenarioErrors(vec![FieldError {
                path: path.display().to_string(),
                message: format!("cannot read scenario: {e}"),
            }])
        })?;
        Scenario::from_toml(&text)
    }
}

struct Collector(Vec<FieldError>);

impl Collector {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(FieldError {
            path: path.into(),
            message: message.into(),
        });
    }
}

fn validate(raw: RawScenario) -> Result<Scenario, ScenarioErrors> {
    let mut errs = Collector(Vec::new());

    let network = Network::new(
        raw.network.nodes.clone(),
        raw.network
            .edges
            .iter()
            .map(|e| (e.from.clone(), e.to.clone(), e.id.clone())),
    )
    .map_err(|e| errs.push("network", e.to_string()))
    .ok();

    let strategy = validate_strategy(&raw.strategy, &mut errs);

    let max_steps = if raw.run.max_steps >= 1 {
        raw.run.max_steps as u64
    } else {
        errs.push(
            "run.max_steps",
            format!("must be at least 1 (got {})", raw.run.max_steps),
        );
        1
    };

    let adversary = network
        .as_ref()
        .and_then(|net| validate_adversary(&raw.adversary, net, &mut errs));

    match (network, adversary, strategy) {
        (Some(network), Some(adversary), Some(strategy)) if errs.0.is_empty() => Ok(Scenario {
            network,
            adversary,
            strategy,
            max_steps,
            out_dir: raw.run.out_dir.map(PathBuf::from),
        }),
        _ => Err(ScenarioErrors(errs.0)),
    }
}

fn validate_strategy(raw: &RawStrategy, errs: &mut Collector) -> Option<StrategySpec> {
    let discipline = raw
        .discipline
        .parse::<Discipline>()
        .map_err(|e| errs.push("strategy.discipline", e.to_string()))
        .ok();
    let kind = raw.kind.to_ascii_lowercase();
    match kind.as_str() {
        "plain" => {
            if raw.improvement {
                errs.push(
                    "strategy.improvement",
                    "pass-through only applies to kind = \"interval\"",
                );
            }
            discipline.map(StrategySpec::Plain)
        }
        "interval" => discipline.map(|inner| StrategySpec::Interval {
            inner,
            improvement: raw.improvement,
        }),
        other => {
            errs.push(
                "strategy.kind",
                format!("unknown kind `{other}` (expected plain or interval)"),
            );
            None
        }
    }
}

fn resolve_path(
    net: &Network,
    names: &[String],
    at: &str,
    errs: &mut Collector,
) -> Option<PacketPath> {
    net.path(names).map_err(|e| errs.push(at, e.to_string())).ok()
}

fn validate_adversary(
    raw: &RawAdversary,
    net: &Network,
    errs: &mut Collector,
) -> Option<AdversarySpec> {
    let rate = raw.r.and_then(|r| {
        Rate::from_f64(r)
            .map_err(|_| errs.push("adversary.r", format!("must satisfy 0 < r < 1 (got {r})")))
            .ok()
    });
    let burst = raw.b.and_then(|b| {
        if b >= 1 {
            Some(b as u64)
        } else {
            errs.push("adversary.b", format!("must be at least 1 (got {b})"));
            None
        }
    });
    let mut require = |field: &str, present: bool| {
        if !present {
            errs.push(
                format!("adversary.{field}"),
                format!("required for kind = \"{}\"", raw.kind),
            );
        }
    };

    match raw.kind.to_ascii_lowercase().as_str() {
        "scripted" => {
            require("r", raw.r.is_some());
            require("b", raw.b.is_some());
            require("events", raw.events.is_some());
            let mut events = Vec::new();
            for (i, ev) in raw.events.iter().flatten().enumerate() {
                if ev.step < 1 {
                    errs.push(
                        format!("adversary.events[{i}].step"),
                        format!("must be at least 1 (got {})", ev.step),
                    );
                    continue;
                }
                if let Some(path) =
                    resolve_path(net, &ev.path, &format!("adversary.events[{i}].path"), errs)
                {
                    events.push(InjectionEvent {
                        time: ev.step as u64,
                        path,
                    });
                }
            }
            let budget = Budget::new(rate?, burst?).ok()?;
            if !errs.0.is_empty() {
                return None;
            }
            match ScriptedAdversary::new(events.clone(), &budget) {
                Ok(_) => Some(AdversarySpec::Scripted { events, budget }),
                Err(AdversaryError::Inadmissible(v)) => {
                    errs.push(
                        "adversary.events",
                        format!(
                            "violates the (r, b) window constraint: edge `{}` receives {} packets in steps [{}, {}], bound {}",
                            net.edge(v.edge).name, v.count, v.start, v.end, v.bound
                        ),
                    );
                    None
                }
                Err(e) => {
                    errs.push("adversary.events", e.to_string());
                    None
                }
            }
        }
        "burst" => {
            require("b", raw.b.is_some());
            require("paths", raw.paths.is_some());
            let paths: Vec<PacketPath> = raw
                .paths
                .iter()
                .flatten()
                .enumerate()
                .filter_map(|(i, p)| resolve_path(net, p, &format!("adversary.paths[{i}]"), errs))
                .collect();
            let burst = burst?;
            if !errs.0.is_empty() {
                return None;
            }
            match BurstAdversary::new(paths.clone(), burst) {
                Ok(_) => Some(AdversarySpec::Burst { paths, burst }),
                Err(AdversaryError::BurstExceeded { edge, count, burst }) => {
                    errs.push(
                        "adversary.paths",
                        format!(
                            "{count} paths use edge `{}` but b = {burst}",
                            net.edge(edge).name
                        ),
                    );
                    None
                }
                Err(e) => {
                    errs.push("adversary", e.to_string());
                    None
                }
            }
        }
        "saturating" => {
            require("r", raw.r.is_some());
            require("b", raw.b.is_some());
            require("path", raw.path.is_some());
            let path = raw
                .path
                .as_ref()
                .and_then(|p| resolve_path(net, p, "adversary.path", errs));
            let budget = Budget::new(rate?, burst?).ok()?;
            Some(AdversarySpec::Saturating {
                path: path?,
                budget,
            })
        }
        other => {
            errs.push(
                "adversary.kind",
                format!("unknown kind `{other}` (expected scripted, burst or saturating)"),
            );
            None
        }
    }
}
