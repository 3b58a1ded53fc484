//! Synchronous discrete-time executor.
//!
//! Every step runs the same fixed sub-order: inject, select one packet per
//! non-empty edge queue, move all selected packets at once, advance the
//! clock. A packet injected at step `t` may cross its first edge at step `t`;
//! a packet that crosses an edge at step `t` can cross the next one at
//! `t + 1` at the earliest.

use crate::adversary::Adversary;
use crate::network::{EdgeId, Network};
use crate::strategies::{Discipline, Packet, PacketId};

/// One edge traversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub step: u64,
    pub packet: PacketId,
    pub edge: EdgeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub step: u64,
    pub total_in_system: usize,
    pub injections: usize,
    pub deliveries: usize,
    pub max_queue_len: usize,
    /// Queue length per edge at the end of the step.
    pub queue_lens: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PacketRecord {
    pub id: PacketId,
    pub injected_at: u64,
    pub delivered_at: Option<u64>,
    pub path_len: usize,
}

impl PacketRecord {
    /// `delivered_at - injected_at + 1`: a packet delivered in the step it
    /// was injected spent one step in the system.
    pub fn system_time(&self) -> Option<u64> {
        self.delivered_at.map(|t| t - self.injected_at + 1)
    }

    pub(crate) fn of(p: &Packet) -> Self {
        PacketRecord {
            id: p.id,
            injected_at: p.injected_at,
            delivered_at: p.delivered_at,
            path_len: p.path.len(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<StepRecord>,
    /// Sorted by packet id; undelivered packets have no delivery step.
    pub packets: Vec<PacketRecord>,
    /// Only filled when move recording is enabled.
    pub moves: Vec<Move>,
    /// The run hit `max_steps` before the system drained.
    pub truncated: bool,
}

impl Trace {
    pub fn max_queue_len(&self) -> usize {
        self.steps.iter().map(|s| s.max_queue_len).max().unwrap_or(0)
    }

    pub fn max_system_time(&self) -> Option<u64> {
        self.packets.iter().filter_map(PacketRecord::system_time).max()
    }

    pub fn last_step(&self) -> u64 {
        self.steps.last().map_or(0, |s| s.step)
    }
}

/// Moves one packet per non-empty queue. Returns the moves performed and the
/// packets that finished their path.
pub(crate) fn transmit(
    queues: &mut [Vec<Packet>],
    discipline: Discipline,
    now: u64,
) -> (Vec<Move>, Vec<Packet>) {
    transmit_where(queues, discipline, now, |_| true)
}

/// Like [`transmit`], restricted to edges accepted by `usable`.
pub(crate) fn transmit_where<F: Fn(EdgeId) -> bool>(
    queues: &mut [Vec<Packet>],
    discipline: Discipline,
    now: u64,
    usable: F,
) -> (Vec<Move>, Vec<Packet>) {
    let mut selected = Vec::new();
    for (edge, queue) in queues.iter_mut().enumerate() {
        if !usable(EdgeId(edge)) {
            continue;
        }
        if let Some(i) = discipline.select_index(queue) {
            selected.push((EdgeId(edge), queue.remove(i)));
        }
    }
    let mut moves = Vec::with_capacity(selected.len());
    let mut delivered = Vec::new();
    for (edge, mut p) in selected {
        debug_assert_eq!(p.current_edge(), Some(edge));
        moves.push(Move {
            step: now,
            packet: p.id,
            edge,
        });
        p.hops_done += 1;
        match p.current_edge() {
            Some(next) => {
                p.arrived_in_queue_at = now + 1;
                queues[next.0].push(p);
            }
            None => {
                p.delivered_at = Some(now);
                delivered.push(p);
            }
        }
    }
    (moves, delivered)
}

/// A single run of a plain greedy discipline against an adversary.
pub struct Simulation<'n, A> {
    network: &'n Network,
    discipline: Discipline,
    adversary: A,
    queues: Vec<Vec<Packet>>,
    now: u64,
    next_id: u64,
    delivered: Vec<Packet>,
    trace: Trace,
    record_moves: bool,
}

impl<'n, A: Adversary> Simulation<'n, A> {
    pub fn new(network: &'n Network, discipline: Discipline, adversary: A) -> Self {
        Simulation {
            network,
            discipline,
            adversary,
            queues: vec![Vec::new(); network.edge_count()],
            now: 1,
            next_id: 0,
            delivered: Vec::new(),
            trace: Trace::default(),
            record_moves: false,
        }
    }

    pub fn record_moves(mut self, on: bool) -> Self {
        self.record_moves = on;
        self
    }

    /// The step that will execute next.
    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn queues(&self) -> &[Vec<Packet>] {
        &self.queues
    }

    pub fn queued(&self) -> usize {
        self.queues.iter().map(Vec::len).sum()
    }

    pub fn is_drained(&self) -> bool {
        self.queued() == 0 && self.adversary.is_exhausted_after(self.now - 1)
    }

    pub fn step(&mut self) -> &StepRecord {
        let now = self.now;
        let injected = self.adversary.inject(now);
        let injections = injected.len();
        for path in injected {
            let p = Packet::new(PacketId(self.next_id), now, path);
            self.next_id += 1;
            let first = p.current_edge().expect("paths are non-empty");
            self.queues[first.0].push(p);
        }

        let (moves, delivered) = transmit(&mut self.queues, self.discipline, now);
        debug_assert!(moves.len() <= self.network.edge_count());
        if self.record_moves {
            self.trace.moves.extend(moves);
        }
        let deliveries = delivered.len();
        self.delivered.extend(delivered);

        let queue_lens: Vec<usize> = self.queues.iter().map(Vec::len).collect();
        let queued: usize = queue_lens.iter().sum();
        assert_eq!(
            self.next_id as usize,
            queued + self.delivered.len(),
            "packet conservation violated at step {now}"
        );
        self.trace.steps.push(StepRecord {
            step: now,
            total_in_system: queued,
            injections,
            deliveries,
            max_queue_len: queue_lens.iter().copied().max().unwrap_or(0),
            queue_lens,
        });
        self.now += 1;
        self.trace.steps.last().unwrap()
    }

    /// Steps until `max_steps` or until the system is empty and the
    /// adversary has nothing left.
    pub fn run(mut self, max_steps: u64) -> Trace {
        assert!(max_steps >= 1, "max_steps must be at least 1");
        while self.now <= max_steps {
            self.step();
            if self.is_drained() {
                break;
            }
        }
        self.trace.truncated = !self.is_drained();
        self.finish()
    }

    fn finish(mut self) -> Trace {
        let mut packets: Vec<PacketRecord> = self
            .delivered
            .iter()
            .chain(self.queues.iter().flatten())
            .map(PacketRecord::of)
            .collect();
        packets.sort_by_key(|p| p.id);
        self.trace.packets = packets;
        self.trace
    }
}

/// Convenience wrapper around [`Simulation::run`].
pub fn run<A: Adversary>(
    network: &Network,
    discipline: Discipline,
    adversary: A,
    max_steps: u64,
) -> Trace {
    Simulation::new(network, discipline, adversary).run(max_steps)
}
