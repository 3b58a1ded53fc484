//! Browser front end for `aqt-core`. The exported functions take plain
//! numbers and strings and return JSON; the `*_json` Rust functions behind
//! them are ordinary code and are tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use aqt_core::adversary::{Rate, SaturatingAdversary};
use aqt_core::analysis::Limit;
use aqt_core::cli::{compute_bounds, BoundsArgs, Formula};
use aqt_core::engine;
use aqt_core::interval::run_interval;
use aqt_core::network::{Network, PacketPath};
use aqt_core::static_routing::{bruteforce_optimal_makespan, greedy_schedule, StaticInstance};
use aqt_core::strategies::Discipline;

/// Largest static instance the oracle is asked to solve in the browser.
const MAX_ORACLE_PACKETS: usize = 8;
const MAX_LINE: usize = 12;
const MAX_STEPS: u64 = 2_000;

#[derive(Serialize)]
struct BoundsOut {
    values: Vec<f64>,
    limit: Option<String>,
    growth: Option<GrowthOut>,
}

#[derive(Serialize)]
struct GrowthOut {
    label: String,
    ratio: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn bounds_json(
    formula: &str,
    r: f64,
    b: f64,
    d: f64,
    c1: f64,
    c2: f64,
    c3: f64,
    i_max: u32,
    log_base: f64,
) -> Result<String, String> {
    let formula: Formula = formula.parse().map_err(|e: aqt_core::cli::CliError| e.to_string())?;
    let args = BoundsArgs {
        r,
        b,
        d,
        c1,
        c2,
        c3,
        i_max: i_max.min(500),
        log_base,
    };
    let t = compute_bounds(formula, &args).map_err(|e| e.to_string())?;
    let out = BoundsOut {
        values: t.values,
        limit: t.limit.map(|l| match l {
            Limit::Finite(v) => format!("{v}"),
            Limit::Infinite => "inf".into(),
        }),
        growth: t.growth.map(|g| GrowthOut {
            label: g.label.to_string(),
            ratio: g.ratio,
        }),
    };
    Ok(serde_json::to_string(&out).unwrap())
}

#[derive(Serialize)]
struct RunOut {
    in_system: Vec<usize>,
    max_queue_len: usize,
    max_system_time: Option<u64>,
}

#[derive(Serialize)]
struct LineOut {
    interval: RunOut,
    plain: RunOut,
    phase_durations: Vec<u64>,
    phase_bounds: Vec<f64>,
    delivery_bound: f64,
}

/// Saturated line of `d` edges: the interval-strategy against the plain
/// discipline, same adversary, same number of steps.
pub fn line_json(d: usize, r: &str, b: u64, discipline: &str, steps: u64) -> Result<String, String> {
    if !(1..=MAX_LINE).contains(&d) {
        return Err(format!("line length must be 1..={MAX_LINE}"));
    }
    let steps = steps.clamp(1, MAX_STEPS);
    let rate = Rate::parse_decimal(r).map_err(|e| e.to_string())?;
    let disc: Discipline = discipline.parse().map_err(|e: aqt_core::strategies::UnknownDiscipline| e.to_string())?;
    let net = Network::line(d);
    let names: Vec<String> = (1..=d).map(|i| format!("e{i}")).collect();
    let path = net.path(&names).map_err(|e| e.to_string())?;
    let adversary = || SaturatingAdversary::new(path.clone(), rate, b).map_err(|e| e.to_string());

    let interval = run_interval(&net, disc, adversary()?, steps, false).map_err(|e| e.to_string())?;
    let plain = engine::run(&net, disc, adversary()?, steps);
    let summary = |t: &engine::Trace| RunOut {
        in_system: t.steps.iter().map(|s| s.total_in_system).collect(),
        max_queue_len: t.max_queue_len(),
        max_system_time: t.max_system_time(),
    };
    let phase_durations = interval.durations();
    let rf = rate.as_f64();
    let phase_bounds = (1..=phase_durations.len() as u32)
        .map(|i| aqt_core::analysis::line_phase_time_bound(i, rf, b as f64, d as f64).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let out = LineOut {
        interval: summary(&interval.trace),
        plain: summary(&plain),
        phase_durations,
        phase_bounds,
        delivery_bound: aqt_core::analysis::line_delivery_bound(rf, d as f64).map_err(|e| e.to_string())?,
    };
    Ok(serde_json::to_string(&out).unwrap())
}

#[derive(Serialize)]
struct GreedyOut {
    discipline: &'static str,
    makespan: u64,
}

#[derive(Serialize)]
struct StaticOut {
    n: usize,
    d: usize,
    optimal: u64,
    greedy: Vec<GreedyOut>,
}

/// Parses packet paths on a line, one per comma-separated item: `2-4`
/// crosses e2, e3, e4 and `3` crosses e3 alone.
fn parse_line_paths(net: &Network, spec: &str) -> Result<Vec<PacketPath>, String> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (a, b) = item.split_once('-').unwrap_or((item, item));
            let a: usize = a.trim().parse().map_err(|_| format!("bad path `{item}`"))?;
            let b: usize = b.trim().parse().map_err(|_| format!("bad path `{item}`"))?;
            if a == 0 || a > b || b > net.edge_count() {
                return Err(format!("path `{item}` is not a run of edges in 1..={}", net.edge_count()));
            }
            let names: Vec<String> = (a..=b).map(|i| format!("e{i}")).collect();
            net.path(&names).map_err(|e| e.to_string())
        })
        .collect()
}

/// Exact optimal makespan of a static instance on a line next to every
/// greedy discipline.
pub fn static_json(edges: usize, paths: &str) -> Result<String, String> {
    if !(1..=MAX_LINE).contains(&edges) {
        return Err(format!("line length must be 1..={MAX_LINE}"));
    }
    let net = Network::line(edges);
    let paths = parse_line_paths(&net, paths)?;
    if paths.is_empty() {
        return Err("give at least one path".into());
    }
    if paths.len() > MAX_ORACLE_PACKETS {
        return Err(format!("at most {MAX_ORACLE_PACKETS} packets"));
    }
    let inst = StaticInstance::new(&net, paths);
    let cd = inst.congestion_dilation().expect("non-empty");
    let greedy: Vec<GreedyOut> = Discipline::ALL
        .iter()
        .map(|&d| GreedyOut {
            discipline: d.name(),
            makespan: greedy_schedule(&inst, d).makespan,
        })
        .collect();
    let cap = greedy.iter().map(|g| g.makespan).min().unwrap();
    let optimal = bruteforce_optimal_makespan(&inst, cap)
        .optimal()
        .expect("a greedy schedule bounds the optimum");
    Ok(serde_json::to_string(&StaticOut {
        n: cd.n,
        d: cd.d,
        optimal,
        greedy,
    })
    .unwrap())
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn bounds(
    formula: &str,
    r: f64,
    b: f64,
    d: f64,
    c1: f64,
    c2: f64,
    c3: f64,
    i_max: u32,
    log_base: f64,
) -> Result<String, JsError> {
    bounds_json(formula, r, b, d, c1, c2, c3, i_max, log_base).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn line_run(d: usize, r: &str, b: u32, discipline: &str, steps: u32) -> Result<String, JsError> {
    line_json(d, r, b as u64, discipline, steps as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn static_compare(edges: usize, paths: &str) -> Result<String, JsError> {
    static_json(edges, paths).map_err(|e| JsError::new(&e))
}
