//! Greedy per-queue disciplines. Each one is a total order over the packets
//! waiting at an edge; ties always go to the smallest packet id.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::network::{EdgeId, PacketPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PacketId(pub u64);

impl fmt::Display for PacketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A packet in flight. Ids are assigned in injection order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub id: PacketId,
    pub injected_at: u64,
    pub path: PacketPath,
    pub hops_done: usize,
    /// Step at which the packet became eligible in its current queue.
    pub arrived_in_queue_at: u64,
    pub delivered_at: Option<u64>,
}

impl Packet {
    pub fn new(id: PacketId, injected_at: u64, path: PacketPath) -> Self {
        Packet {
            id,
            injected_at,
            path,
            hops_done: 0,
            arrived_in_queue_at: injected_at,
            delivered_at: None,
        }
    }

    pub fn hops_remaining(&self) -> usize {
        self.path.len() - self.hops_done
    }

    /// Edge the packet is queued at, `None` once delivered.
    pub fn current_edge(&self) -> Option<EdgeId> {
        self.path.edges().get(self.hops_done).copied()
    }

    pub fn remaining_edges(&self) -> &[EdgeId] {
        &self.path.edges()[self.hops_done..]
    }

    pub fn is_delivered(&self) -> bool {
        self.delivered_at.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Discipline {
    /// First in first out (arrival at the current queue).
    Fifo,
    /// Last in first out.
    Lifo,
    /// Longest in system.
    Lis,
    /// Shortest in system.
    Sis,
    /// Nearest to source.
    Nts,
    /// Farthest from source.
    Ffs,
    /// Nearest to go.
    Ntg,
    /// Farthest to go.
    Ftg,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown discipline `{0}` (expected one of FIFO, LIFO, LIS, SIS, NTS, FFS, NTG, FTG)")]
pub struct UnknownDiscipline(pub String);

impl Discipline {
    pub const ALL: [Discipline; 8] = [
        Discipline::Fifo,
        Discipline::Lifo,
        Discipline::Lis,
        Discipline::Sis,
        Discipline::Nts,
        Discipline::Ffs,
        Discipline::Ntg,
        Discipline::Ftg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Discipline::Fifo => "FIFO",
            Discipline::Lifo => "LIFO",
            Discipline::Lis => "LIS",
            Discipline::Sis => "SIS",
            Discipline::Nts => "NTS",
            Discipline::Ffs => "FFS",
            Discipline::Ntg => "NTG",
            Discipline::Ftg => "FTG",
        }
    }

    /// Smaller key wins.
    fn key(self, p: &Packet) -> i128 {
        match self {
            Discipline::Fifo => p.arrived_in_queue_at as i128,
            Discipline::Lifo => -(p.arrived_in_queue_at as i128),
            Discipline::Lis => p.injected_at as i128,
            Discipline::Sis => -(p.injected_at as i128),
            Discipline::Nts => p.hops_done as i128,
            Discipline::Ffs => -(p.hops_done as i128),
            Discipline::Ntg => p.hops_remaining() as i128,
            Discipline::Ftg => -(p.hops_remaining() as i128),
        }
    }

    /// Picks the packet allowed to cross the edge; `None` for an empty queue.
    /// The result does not depend on the storage order of `queue`.
    pub fn select<'a, I>(self, queue: I) -> Option<&'a Packet>
    where
        I: IntoIterator<Item = &'a Packet>,
    {
        queue.into_iter().min_by_key(|p| (self.key(p), p.id))
    }

    /// Position of the selected packet within `queue`.
    pub fn select_index(self, queue: &[Packet]) -> Option<usize> {
        queue
            .iter()
            .enumerate()
            .min_by_key(|(_, p)| (self.key(p), p.id))
            .map(|(i, _)| i)
    }

    /// Whether the priority key depends only on the packet's past.
    pub fn is_non_forward_looking(self) -> bool {
        !matches!(self, Discipline::Ntg | Discipline::Ftg)
    }
}

impl fmt::Display for Discipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Discipline {
    type Err = UnknownDiscipline;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Discipline::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownDiscipline(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Network;
    use proptest::prelude::*;

    fn packet(net: &Network, id: u64, injected: u64, path: &[&str], hops: usize) -> Packet {
        let mut p = Packet::new(PacketId(id), injected, net.path(path).unwrap());
        p.hops_done = hops;
        p
    }

    #[test]
    fn lis_picks_oldest() {
        let net = Network::line(1);
        let q = [
            packet(&net, 0, 3, &["e1"], 0),
            packet(&net, 1, 1, &["e1"], 0),
            packet(&net, 2, 5, &["e1"], 0),
        ];
        assert_eq!(Discipline::Lis.select(&q).unwrap().injected_at, 1);
        assert_eq!(Discipline::Sis.select(&q).unwrap().injected_at, 5);
    }

    #[test]
    fn ntg_breaks_ties_by_id() {
        let net = Network::line(6);
        // queued at e3; remaining 4, 2, 2
        let q = [
            packet(&net, 7, 1, &["e3", "e4", "e5", "e6"], 0),
            packet(&net, 9, 1, &["e1", "e2", "e3", "e4"], 2),
            packet(&net, 8, 1, &["e2", "e3", "e4"], 1),
        ];
        assert_eq!(Discipline::Ntg.select(&q).unwrap().id, PacketId(8));
        assert_eq!(Discipline::Ftg.select(&q).unwrap().id, PacketId(7));
        assert_eq!(Discipline::Nts.select(&q).unwrap().id, PacketId(7));
        assert_eq!(Discipline::Ffs.select(&q).unwrap().id, PacketId(9));
    }

    #[test]
    fn singleton_and_empty() {
        let net = Network::line(1);
        let q = [packet(&net, 4, 2, &["e1"], 0)];
        assert_eq!(Discipline::Fifo.select(&q).unwrap().id, PacketId(4));
        assert!(Discipline::Fifo.select(&[]).is_none());
        assert_eq!(Discipline::Fifo.select_index(&[]), None);
    }

    #[test]
    fn forward_looking_classification() {
        assert!(Discipline::Nts.is_non_forward_looking());
        assert!(Discipline::Lis.is_non_forward_looking());
        assert!(!Discipline::Ftg.is_non_forward_looking());
        assert!(!Discipline::Ntg.is_non_forward_looking());
    }

    #[test]
    fn names_round_trip() {
        for d in Discipline::ALL {
            assert_eq!(d.name().parse::<Discipline>().unwrap(), d);
        }
        assert_eq!("lis".parse::<Discipline>().unwrap(), Discipline::Lis);
        assert!("RANDOM".parse::<Discipline>().is_err());
    }

    fn arb_queue() -> impl Strategy<Value = Vec<Packet>> {
        let net = Network::line(6);
        prop::collection::vec((0u64..20, 1u64..10, 1usize..=6, 0usize..6), 1..12).prop_map(
            move |rows| {
                rows.into_iter()
                    .enumerate()
                    .map(|(i, (arrived, injected, len, hops))| {
                        let names: Vec<String> = (1..=len).map(|k| format!("e{k}")).collect();
                        let mut p = packet(
                            &net,
                            i as u64,
                            injected,
                            &names.iter().map(String::as_str).collect::<Vec<_>>(),
                            hops.min(len - 1),
                        );
                        p.arrived_in_queue_at = arrived;
                        p
                    })
                    .collect()
            },
        )
    }

    proptest! {
        #[test]
        fn selection_is_storage_order_invariant(q in arb_queue(), seed in any::<u64>()) {
            let mut shuffled = q.clone();
            // deterministic rotation + reversal stands in for a permutation
            let k = (seed as usize) % shuffled.len();
            shuffled.rotate_left(k);
            if seed % 2 == 0 { shuffled.reverse(); }
            for d in Discipline::ALL {
                let a = d.select(&q).unwrap();
                let b = d.select(&shuffled).unwrap();
                prop_assert_eq!(a.id, b.id);
                prop_assert!(q.iter().any(|p| p.id == a.id));
            }
        }

        #[test]
        fn lifo_is_fifo_on_reversed_time(q in arb_queue()) {
            let horizon = q.iter().map(|p| p.arrived_in_queue_at).max().unwrap();
            let reversed: Vec<Packet> = q
                .iter()
                .cloned()
                .map(|mut p| { p.arrived_in_queue_at = horizon - p.arrived_in_queue_at; p })
                .collect();
            prop_assert_eq!(
                Discipline::Lifo.select(&q).unwrap().id,
                Discipline::Fifo.select(&reversed).unwrap().id
            );
        }
    }
}
