//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use aqt_core::adversary::{
    collect_events, verify_admissible, Adversary, AdversaryError, Budget, BurstAdversary,
    InjectionEvent, Rate, SaturatingAdversary, ScriptedAdversary, Violation,
};
use aqt_core::analysis::{
    classify_growth, line_delivery_bound, line_phase_time_bound, line_phase_time_series,
    theorem_phase_packet_bound, theorem_phase_time_bound, theorem_series, tree_phase_time_bound,
    BoundParams, GrowthLabel,
};
use aqt_core::cli;
use aqt_core::engine;
use aqt_core::export;
use aqt_core::interval::{IntervalRun, IntervalStrategy};
use aqt_core::network::{congestion_dilation, Network, PacketPath};
use aqt_core::scenario::Scenario;
use aqt_core::static_routing::sweep::SweepConfig;
use aqt_core::static_routing::{greedy_schedule, StaticInstance};
use aqt_core::strategies::{Discipline, PacketId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = fn() -> Check;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, took: Duration) -> Result<(), String> {
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn scenario_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios"))
}

fn line_path(net: &Network, d: usize) -> PacketPath {
    let names: Vec<String> = (1..=d).map(|i| format!("e{i}")).collect();
    net.path(&names).unwrap()
}

/// Phase 0 is empty and over at step 0; phase 1 is exactly the packets
/// injected at step 1 and starts at step 2. When step 1 injects nothing
/// the first batch, at step t, forms phase 1 starting at t + 1.
fn startup_rule(run: &IntervalRun) -> Result<(), String> {
    let p0 = run.phases[0];
    ensure(
        (p0.phase_index, p0.packet_count, p0.started_at, p0.ended_at, p0.duration) == (0, 0, 0, 0, 0),
        || format!("phase 0 record {p0:?}"),
    )?;
    let Some(first) = run.trace.packets.iter().map(|p| p.injected_at).min() else {
        return ensure(run.phases.len() == 1, || "phases without packets".into());
    };
    let batch: BTreeSet<PacketId> = run
        .trace
        .packets
        .iter()
        .filter(|p| p.injected_at == first)
        .map(|p| p.id)
        .collect();
    let phase_one: BTreeSet<PacketId> = run
        .phase_of
        .iter()
        .filter(|(_, &ph)| ph == 1)
        .map(|(&id, _)| id)
        .collect();
    ensure(batch == phase_one, || {
        format!("phase 1 holds {phase_one:?}, step {first} injected {batch:?}")
    })?;
    let p1 = run.phases.get(1).ok_or("phase 1 never completed")?;
    ensure(p1.started_at == first + 1 && p1.packet_count == batch.len(), || {
        format!("phase 1 record {p1:?}, first injections at step {first}")
    })
}

// 1 ---------------------------------------------------------------------------

fn line_containment() -> Check {
    let start = Instant::now();
    let (r, b, d) = (0.5, 4u64, 4usize);
    let net = Network::line(d);
    let adv = SaturatingAdversary::new(line_path(&net, d), Rate::new(1, 2).unwrap(), b).unwrap();
    let mut s = IntervalStrategy::new(&net, Discipline::Fifo, adv, false);
    while s.completed_phases().len() < 21 {
        s.step().map_err(|e| e.to_string())?;
    }
    let run = s.finish();
    let took = start.elapsed();
    startup_rule(&run)?;

    let delivery_bound = line_delivery_bound(r, d as f64).map_err(|e| e.to_string())?;
    ensure(delivery_bound == 16.0, || format!("2d/(1-r) = {delivery_bound}"))?;
    for (i, p) in run.phases.iter().enumerate().skip(1) {
        let bound = line_phase_time_bound(i as u32, r, b as f64, d as f64).unwrap();
        ensure(p.duration as f64 <= bound, || {
            format!("phase {i} took {} > {bound}", p.duration)
        })?;
    }
    let max_sys = run.trace.max_system_time().ok_or("nothing delivered")?;
    ensure(max_sys <= 16, || format!("max system time {max_sys} > 16"))?;
    within(Duration::from_secs(1), took)?;
    Ok(format!(
        "20 phases, durations {:?}, max system time {max_sys} <= 16, {took:.2?}",
        &run.durations()[..20]
    ))
}

// 2 ---------------------------------------------------------------------------

fn lemma1_random() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e44a1);
    let mut violations = Vec::new();
    let mut runs = 0;
    for _ in 0..10_000 {
        let net = common::random_network(&mut rng, 6);
        let count = rng.gen_range(1..=8);
        let paths = common::random_paths(&mut rng, &net, count);
        let cd = congestion_dilation(&paths).unwrap();
        for disc in Discipline::ALL {
            let adv = BurstAdversary::new(paths.clone(), cd.n as u64).unwrap();
            let trace = engine::run(&net, disc, adv, 10_000);
            runs += 1;
            let makespan = trace.last_step();
            if trace.truncated || makespan > cd.lemma1_bound() as u64 {
                violations.push((disc, cd, makespan));
            }
        }
    }
    let took = start.elapsed();
    ensure(violations.is_empty(), || format!("{} violations, first {:?}", violations.len(), violations[0]))?;
    within(Duration::from_secs(30), took)?;
    Ok(format!("{runs} greedy runs, 0 exceed n*d, {took:.2?}"))
}

// 3 ---------------------------------------------------------------------------

fn oracle_sweep() -> Check {
    let start = Instant::now();
    let mut csv = Vec::new();
    let report = cli::cmd_sweep(&SweepConfig::default(), &mut csv).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let text = String::from_utf8(csv).unwrap();
    let data_rows = text.lines().filter(|l| !l.starts_with('#')).count() - 1;
    ensure(data_rows == report.rows.len() && !report.rows.is_empty(), || {
        format!("{data_rows} csv rows for {} instances", report.rows.len())
    })?;
    ensure(text.trim_end().lines().last().unwrap().starts_with("# summary:"), || {
        "summary line missing".into()
    })?;
    ensure(report.rows.iter().all(|r| r.optimal <= r.greedy_fifo && r.greedy_fifo <= r.lemma1_bound), || {
        "optimal <= greedy <= n*d broken".into()
    })?;
    within(Duration::from_secs(300), took)?;
    Ok(format!("{}, {took:.2?}", report.summary()))
}

// 4 ---------------------------------------------------------------------------

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

fn closed_forms() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    for _ in 0..1000 {
        let p = BoundParams {
            r: rng.gen_range(0.01..0.99),
            b: rng.gen_range(1.0..100.0),
            d: rng.gen_range(1.0..50.0),
            c1: rng.gen_range(0.0..=1.0),
            c2: rng.gen_range(0.0..5.0),
            c3: rng.gen_range(0.0..5.0),
        };
        let line = line_phase_time_series(p.r, p.b, p.d, 100).unwrap();
        let theorem = theorem_series(&p, 100).unwrap();
        for i in 1..=100u32 {
            let k = i as usize - 1;
            let lc = line_phase_time_bound(i, p.r, p.b, p.d).unwrap();
            let tc = theorem_phase_time_bound(i, &p).unwrap();
            let pc = theorem_phase_packet_bound(i, &p).unwrap();
            ensure(rel_close(lc, line[k]), || format!("line {p:?} i={i}: {lc} vs {}", line[k]))?;
            ensure(rel_close(tc, theorem[k].1), || format!("theorem {p:?} i={i}: {tc} vs {}", theorem[k].1))?;
            let identity = p.c1 * pc + p.c2 * p.d + p.c3;
            ensure(rel_close(tc, identity), || format!("identity {p:?} i={i}: {tc} vs {identity}"))?;
            checked += 3;
        }
    }
    Ok(format!("{checked} comparisons within relative 1e-9"))
}

// 5 ---------------------------------------------------------------------------

fn trichotomy() -> Check {
    let mut agree = 0;
    let mut total = 0;
    let mut mismatches = Vec::new();
    for tenths in 1..=9u32 {
        for d in 2..=10u32 {
            for b in [1.0, 4.0, 16.0] {
                let r = tenths as f64 / 10.0;
                let series: Vec<f64> = (1..=20)
                    .map(|i| tree_phase_time_bound(i, r, b, d as f64).unwrap())
                    .collect();
                let label = classify_growth(&series, 10).unwrap().label;
                let expected = match (tenths * d).cmp(&10) {
                    std::cmp::Ordering::Less => GrowthLabel::Convergent,
                    std::cmp::Ordering::Equal => GrowthLabel::Bounded,
                    std::cmp::Ordering::Greater => GrowthLabel::Divergent,
                };
                total += 1;
                if label == expected {
                    agree += 1;
                } else {
                    mismatches.push((r, d, b, label, expected));
                }
            }
        }
    }
    ensure(mismatches.is_empty(), || format!("{}/{total} agree; {:?}", agree, mismatches))?;
    Ok(format!("{agree}/{total} labels match the sign of r*d - 1"))
}

// 6 ---------------------------------------------------------------------------

fn expect_witness(events: Vec<InjectionEvent>, budget: Budget, want: (usize, u64, u64, u64, u64)) -> Result<(), String> {
    match ScriptedAdversary::new(events, &budget) {
        Err(AdversaryError::Inadmissible(Violation { edge, start, end, count, bound })) => {
            let got = (edge.0, start, end, count, bound);
            ensure(got == want, || format!("witness {got:?}, expected {want:?}"))
        }
        other => Err(format!("expected rejection, got {other:?}")),
    }
}

fn admissibility() -> Check {
    let start = Instant::now();
    let horizon = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut bursts, mut saturating) = (0, 0);
    for draw in 0..200 {
        let net = common::random_network(&mut rng, 5);
        let rate = common::random_rate(&mut rng);
        let (events, budget) = if draw % 2 == 0 {
            let count = rng.gen_range(1..=8);
            let paths = common::random_paths(&mut rng, &net, count);
            let b = congestion_dilation(&paths).unwrap().n as u64 + rng.gen_range(0..3);
            let mut adv = BurstAdversary::new(paths, b).unwrap();
            bursts += 1;
            (collect_events(&mut adv, horizon), Budget::new(rate, b).unwrap())
        } else {
            let path = common::random_paths(&mut rng, &net, 1).pop().unwrap();
            let b = rng.gen_range(1..=8);
            let mut adv = SaturatingAdversary::new(path, rate, b).unwrap();
            saturating += 1;
            let events = collect_events(&mut adv, horizon);
            ensure(!adv.is_exhausted_after(horizon), || "saturating stopped".into())?;
            (events, Budget::new(rate, b).unwrap())
        };
        verify_admissible(&events, &budget, horizon)
            .map_err(|v| format!("draw {draw} (r={}, b={}): {v}", budget.rate, budget.burst))?;
        ensure(common::verify_reversed(&events, &budget, horizon), || {
            format!("draw {draw}: second verifier disagrees")
        })?;
    }

    let line2 = Network::line(2);
    let e1 = line2.path(&["e1"]).unwrap();
    let e12 = line2.path(&["e1", "e2"]).unwrap();
    let ev = |time, path: &PacketPath| InjectionEvent { time, path: path.clone() };
    let half = |b| Budget::new(Rate::new(1, 2).unwrap(), b).unwrap();
    expect_witness(vec![ev(1, &e1), ev(2, &e1), ev(3, &e1)], half(1), (0, 1, 3, 3, 2))?;
    expect_witness(vec![ev(1, &e1), ev(2, &e12), ev(2, &e12)], half(1), (0, 1, 2, 3, 2))?;
    expect_witness(vec![ev(5, &e12), ev(5, &e12), ev(5, &e12)], half(2), (0, 5, 5, 3, 2))?;
    // 0.29 * 100 must floor to 29, not 28: 30 + 29 packets fit into
    // [1, 100] with b = 30, 30 + 30 do not
    let r029 = Rate::parse_decimal("0.29").unwrap();
    let ends = |late: usize| {
        let mut v = vec![ev(1, &e1); 30];
        v.extend(vec![ev(100, &e1); late]);
        v
    };
    let b30 = Budget::new(r029, 30).unwrap();
    ScriptedAdversary::new(ends(29), &b30).map_err(|e| format!("59 packets rejected: {e}"))?;
    expect_witness(ends(30), b30, (0, 1, 100, 60, 59))?;
    let took = start.elapsed();
    Ok(format!(
        "{bursts} burst + {saturating} saturating draws over {horizon} steps admissible; 4 inadmissible fixtures rejected with the right witness, {took:.2?}"
    ))
}

// 7 ---------------------------------------------------------------------------

fn render(scenario: &Scenario) -> Result<Vec<Vec<u8>>, String> {
    let outcome = cli::simulate(scenario).map_err(|e| e.to_string())?;
    let mut files = vec![Vec::new(), Vec::new()];
    export::write_trace(&mut files[0], "x", outcome.trace()).unwrap();
    export::write_packets(&mut files[1], "x", outcome.trace()).unwrap();
    if let Some(phases) = outcome.phases() {
        let mut buf = Vec::new();
        export::write_phases(&mut buf, "x", phases).unwrap();
        files.push(buf);
    }
    Ok(files)
}

fn determinism() -> Check {
    let mut names: Vec<_> = std::fs::read_dir(scenario_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    names.sort();
    let mut files = 0;
    for path in &names {
        let scenario = Scenario::load(path).map_err(|e| e.to_string())?;
        for disc in Discipline::ALL {
            let mut s = scenario.clone();
            s.strategy = s.strategy.with_discipline(disc);
            let a = render(&s)?;
            let b = render(&s)?;
            ensure(a == b, || format!("{} with {disc} differs between runs", path.display()))?;
            files += a.len();
        }
    }
    let config = SweepConfig { max_packets: 3, ..Default::default() };
    let mut a = Vec::new();
    let mut b = Vec::new();
    cli::cmd_sweep(&config, &mut a).unwrap();
    cli::cmd_sweep(&config, &mut b).unwrap();
    ensure(a == b, || "sweep output differs between runs".into())?;
    Ok(format!(
        "{} scenarios x {} disciplines: {files} CSV files byte-identical on rerun; sweep CSV identical",
        names.len(),
        Discipline::ALL.len()
    ))
}

// 8 ---------------------------------------------------------------------------

fn passes_through(run: &IntervalRun) -> bool {
    run.trace.moves.iter().any(|m| {
        run.phase_of
            .get(&m.packet)
            .is_none_or(|&p| run.phases[p as usize].started_at > m.step)
    })
}

fn improvement_safety() -> Check {
    let scenario = Scenario::load(&scenario_dir().join("improvement.toml")).map_err(|e| e.to_string())?;
    let run_fixture = |on: bool| {
        let adv = scenario.adversary.build();
        IntervalStrategy::new(&scenario.network, scenario.strategy.discipline(), adv, on)
            .record_moves(true)
            .run(scenario.max_steps)
            .map_err(|e| e.to_string())
    };
    let on = run_fixture(true)?;
    let off = run_fixture(false)?;
    startup_rule(&on)?;
    startup_rule(&off)?;
    ensure(passes_through(&on), || "improvement never triggered on the fixture".into())?;
    ensure(on.durations() == off.durations(), || {
        format!("phase durations on {:?} vs off {:?}", on.durations(), off.durations())
    })?;
    let improved: Vec<(PacketId, u64, u64)> = on
        .trace
        .packets
        .iter()
        .zip(&off.trace.packets)
        .filter_map(|(a, b)| {
            let (x, y) = (a.system_time()?, b.system_time()?);
            (x < y).then_some((a.id, y, x))
        })
        .collect();
    ensure(!improved.is_empty(), || "no packet got faster".into())?;

    // non-interference on random scripts where pass-through happens: every
    // phase takes exactly as long as its packets' remaining paths alone
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut triggered = 0;
    let mut phases_checked = 0;
    for _ in 0..300 {
        let net = common::random_network(&mut rng, 5);
        let events = common::random_script(&mut rng, &net, 30, 3);
        let rate = Rate::new(1, 2).unwrap();
        let budget = Budget::new(rate, common::min_burst(&events, rate, 30)).unwrap();
        let disc = [Discipline::Fifo, Discipline::Ntg, Discipline::Ftg][rng.gen_range(0..3)];
        let run = IntervalStrategy::new(&net, disc, ScriptedAdversary::new(events.clone(), &budget).unwrap(), true)
            .record_moves(true)
            .run(10_000)
            .map_err(|e| e.to_string())?;
        startup_rule(&run)?;
        if !passes_through(&run) {
            continue;
        }
        triggered += 1;
        for (k, rec) in run.phases.iter().enumerate().skip(1) {
            let remaining: Vec<PacketPath> = run
                .phase_of
                .iter()
                .filter(|(_, &p)| p as usize == k)
                .map(|(id, _)| {
                    let done = run.trace.moves.iter().filter(|m| m.packet == *id && m.step < rec.started_at).count();
                    events[id.0 as usize].path.suffix(done)
                })
                .collect();
            let alone = greedy_schedule(&StaticInstance::new(&net, remaining), disc).makespan;
            ensure(alone == rec.duration, || format!("phase {k}: {} with pass-through, {alone} alone", rec.duration))?;
            phases_checked += 1;
        }
    }
    ensure(triggered > 0, || "no random scenario triggered the improvement".into())?;
    let (id, before, after) = improved[0];
    Ok(format!(
        "fixture durations {:?} on and off; packet {id} system time {before} -> {after}; {phases_checked} phases in {triggered} triggering random runs unaffected",
        on.durations()
    ))
}

// 9 ---------------------------------------------------------------------------

fn startup() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut runs = 0;
    for k in 0..400 {
        let net = common::random_network(&mut rng, 5);
        let mut events = common::random_script(&mut rng, &net, 20, 3);
        if k % 4 == 0 {
            events.retain(|e| e.time != 1);
        }
        let rate = Rate::new(1, 3).unwrap();
        let budget = Budget::new(rate, common::min_burst(&events, rate, 20)).unwrap();
        let disc = Discipline::ALL[k % Discipline::ALL.len()];
        let run = IntervalStrategy::new(&net, disc, ScriptedAdversary::new(events, &budget).unwrap(), k % 2 == 0)
            .run(10_000)
            .map_err(|e| e.to_string())?;
        startup_rule(&run)?;
        runs += 1;
    }
    // the saturated line and every bundled interval scenario
    for path in std::fs::read_dir(scenario_dir()).unwrap() {
        let scenario = Scenario::load(&path.unwrap().path()).map_err(|e| e.to_string())?;
        if let cli::Outcome::Interval(run) = cli::simulate(&scenario).map_err(|e| e.to_string())? {
            startup_rule(&run)?;
            runs += 1;
        }
    }
    let net = Network::line(1);
    let idle = IntervalStrategy::new(&net, Discipline::Fifo, ScriptedAdversary::new(vec![], &Budget::new(Rate::new(1, 2).unwrap(), 1).unwrap()).unwrap(), false)
        .run(5)
        .map_err(|e| e.to_string())?;
    ensure(idle.phases.len() == 1 && idle.phase_of.is_empty(), || "empty run grew phases".into())?;
    Ok(format!(
        "{} interval runs: phase 0 empty, phase 1 = first batch (step 1 when present) starting one step later",
        runs + 1
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 9] = [
        ("line-network containment", line_containment),
        ("Lemma 1 on random static instances", lemma1_random),
        ("oracle sweep", oracle_sweep),
        ("closed form vs recurrence", closed_forms),
        ("tree threshold trichotomy", trichotomy),
        ("adversary admissibility", admissibility),
        ("determinism", determinism),
        ("improvement safety", improvement_safety),
        ("startup rule", startup),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
