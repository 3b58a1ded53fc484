//! CSV writers. Every file starts with one `#` comment line carrying run
//! metadata; data rows are fully determined by the inputs.

use std::io::{self, Write};

use serde::Serialize;

use crate::engine::Trace;
use crate::interval::PhaseRecord;
use crate::static_routing::sweep::SweepRow;

#[derive(Serialize)]
struct TraceRow {
    step: u64,
    total_in_system: usize,
    injections: usize,
    deliveries: usize,
    max_queue_len: usize,
}

#[derive(Serialize)]
struct PacketRow {
    packet_id: u64,
    injected_at: u64,
    delivered_at: Option<u64>,
    system_time: Option<u64>,
    path_len: usize,
}

#[derive(Serialize)]
struct PhaseRow {
    phase_index: u64,
    packet_count: usize,
    n_i: usize,
    d_i: usize,
    duration: u64,
    lemma1_bound: u64,
}

#[derive(Serialize)]
struct SweepCsvRow {
    instance_id: usize,
    packets: usize,
    edges: usize,
    n: usize,
    d: usize,
    optimal: u64,
    greedy_fifo: u64,
    lemma1_bound: u64,
}

fn write_rows<W: Write, R: Serialize>(
    mut out: W,
    comment: &str,
    rows: impl IntoIterator<Item = R>,
) -> io::Result<()> {
    writeln!(out, "# {comment}")?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

/// `step,total_in_system,injections,deliveries,max_queue_len`
pub fn write_trace<W: Write>(out: W, comment: &str, trace: &Trace) -> io::Result<()> {
    write_rows(
        out,
        comment,
        trace.steps.iter().map(|s| TraceRow {
            step: s.step,
            total_in_system: s.total_in_system,
            injections: s.injections,
            deliveries: s.deliveries,
            max_queue_len: s.max_queue_len,
        }),
    )
}

/// `packet_id,injected_at,delivered_at,system_time,path_len`; the delivery
/// columns are empty for packets still in flight.
pub fn write_packets<W: Write>(out: W, comment: &str, trace: &Trace) -> io::Result<()> {
    write_rows(
        out,
        comment,
        trace.packets.iter().map(|p| PacketRow {
            packet_id: p.id.0,
            injected_at: p.injected_at,
            delivered_at: p.delivered_at,
            system_time: p.system_time(),
            path_len: p.path_len,
        }),
    )
}

/// `phase_index,packet_count,n_i,d_i,duration,lemma1_bound`
pub fn write_phases<W: Write>(out: W, comment: &str, phases: &[PhaseRecord]) -> io::Result<()> {
    write_rows(
        out,
        comment,
        phases.iter().map(|p| PhaseRow {
            phase_index: p.phase_index,
            packet_count: p.packet_count,
            n_i: p.n,
            d_i: p.d,
            duration: p.duration,
            lemma1_bound: p.lemma1_bound(),
        }),
    )
}

/// `instance_id,packets,edges,n,d,optimal,greedy_fifo,lemma1_bound`
pub fn write_sweep<W: Write>(out: W, comment: &str, rows: &[SweepRow]) -> io::Result<()> {
    write_rows(
        out,
        comment,
        rows.iter().map(|r| SweepCsvRow {
            instance_id: r.instance_id,
            packets: r.packets,
            edges: r.edges,
            n: r.n,
            d: r.d,
            optimal: r.optimal,
            greedy_fifo: r.greedy_fifo,
            lemma1_bound: r.lemma1_bound,
        }),
    )
}

/// `i,value` rows; values are written with Rust's shortest round-trip
/// formatting.
pub fn write_bounds<W: Write>(out: W, comment: &str, values: &[f64]) -> io::Result<()> {
    #[derive(Serialize)]
    struct Row {
        i: usize,
        value: f64,
    }
    write_rows(
        out,
        comment,
        values
            .iter()
            .enumerate()
            .map(|(k, &value)| Row { i: k + 1, value }),
    )
}
