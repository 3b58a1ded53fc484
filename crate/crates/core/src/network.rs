//! Directed network model, fixed packet paths, and the congestion/dilation
//! pair `(n, d)` that every static-routing bound is expressed in.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Index of a node in [`Network::nodes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

/// Index of an edge in [`Network::edges`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub source: NodeId,
    pub target: NodeId,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("network must declare at least one node")]
    NoNodes,
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` references undeclared node `{node}`")]
    UnknownNode { edge: String, node: String },
    #[error("edge `{edge}` duplicates the node pair of edge `{existing}`")]
    ParallelEdge { edge: String, existing: String },
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("path is empty, not contiguous, or repeats an edge: [{0}]")]
    InvalidPath(String),
    #[error("congestion/dilation of an empty packet set is undefined")]
    EmptyPacketSet,
}

/// Directed graph with unit-capacity edges. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    edge_by_name: HashMap<String, EdgeId>,
}

impl Network {
    /// Builds and validates a network. Edges keep their declaration order.
    pub fn new<N, E>(nodes: N, edges: E) -> Result<Self, NetworkError>
    where
        N: IntoIterator,
        N::Item: Into<String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        if nodes.is_empty() {
            return Err(NetworkError::NoNodes);
        }
        let mut node_by_name = HashMap::with_capacity(nodes.len());
        for (i, name) in nodes.iter().enumerate() {
            if node_by_name.insert(name.clone(), NodeId(i)).is_some() {
                return Err(NetworkError::DuplicateNode(name.clone()));
            }
        }

        let mut out = Vec::new();
        let mut edge_by_name = HashMap::new();
        let mut pairs: HashMap<(NodeId, NodeId), String> = HashMap::new();
        for (source, target, name) in edges {
            let lookup = |node: &str| {
                node_by_name
                    .get(node)
                    .copied()
                    .ok_or_else(|| NetworkError::UnknownNode {
                        edge: name.clone(),
                        node: node.to_string(),
                    })
            };
            let (s, t) = (lookup(&source)?, lookup(&target)?);
            if edge_by_name.contains_key(&name) {
                return Err(NetworkError::DuplicateEdge(name));
            }
            if let Some(existing) = pairs.get(&(s, t)) {
                return Err(NetworkError::ParallelEdge {
                    edge: name,
                    existing: existing.clone(),
                });
            }
            pairs.insert((s, t), name.clone());
            edge_by_name.insert(name.clone(), EdgeId(out.len()));
            out.push(Edge {
                name,
                source: s,
                target: t,
            });
        }
        Ok(Network {
            nodes,
            edges: out,
            edge_by_name,
        })
    }

    /// One-way connection line with `len` edges: nodes `v0..=v{len}`,
    /// edges `e1..=e{len}` with `e{k}: v{k-1} -> v{k}`.
    pub fn line(len: usize) -> Self {
        let nodes = (0..=len).map(|i| format!("v{i}"));
        let edges = (1..=len).map(|k| (format!("v{}", k - 1), format!("v{k}"), format!("e{k}")));
        Network::new(nodes, edges).expect("line construction is always valid")
    }

    /// Rooted tree given by a parent array: node `i > 0` has parent
    /// `parents[i - 1] < i`. With `toward_root` edges point child -> parent
    /// (in-tree), otherwise parent -> child (out-tree). Edge `e{i}` belongs to
    /// node `i`.
    pub fn tree(parents: &[usize], toward_root: bool) -> Self {
        let count = parents.len() + 1;
        let nodes = (0..count).map(|i| format!("v{i}"));
        let edges = parents.iter().enumerate().map(|(k, &p)| {
            let child = k + 1;
            assert!(p < child, "parent must precede child");
            let (s, t) = if toward_root { (child, p) } else { (p, child) };
            (format!("v{s}"), format!("v{t}"), format!("e{child}"))
        });
        Network::new(nodes, edges).expect("parent array yields a valid tree")
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.edge_by_name.get(name).copied()
    }

    /// True iff every edge exists, consecutive edges are contiguous, no edge
    /// repeats and the path is non-empty.
    pub fn validate_path(&self, path: &[EdgeId]) -> bool {
        if path.is_empty() || path.iter().any(|e| e.0 >= self.edges.len()) {
            return false;
        }
        let contiguous = path
            .windows(2)
            .all(|w| self.edges[w[0].0].target == self.edges[w[1].0].source);
        let mut seen = HashSet::with_capacity(path.len());
        contiguous && path.iter().all(|e| seen.insert(*e))
    }

    /// Resolves edge names into a validated [`PacketPath`].
    pub fn path<S: AsRef<str>>(&self, names: &[S]) -> Result<PacketPath, NetworkError> {
        let ids = names
            .iter()
            .map(|n| {
                self.edge_id(n.as_ref())
                    .ok_or_else(|| NetworkError::UnknownEdge(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        PacketPath::new(self, ids)
    }

    /// Every simple directed path of the graph, in deterministic order
    /// (by starting edge, then by length).
    pub fn all_simple_paths(&self) -> Vec<PacketPath> {
        let mut out = Vec::new();
        for start in 0..self.edges.len() {
            let mut stack = vec![vec![EdgeId(start)]];
            while let Some(path) = stack.pop() {
                let last = self.edges[path.last().unwrap().0].target;
                out.push(PacketPath(path.clone()));
                // push in reverse so shorter-first order is kept per branch
                for (i, e) in self.edges.iter().enumerate().rev() {
                    if e.source == last && !path.contains(&EdgeId(i)) {
                        let mut next = path.clone();
                        next.push(EdgeId(i));
                        if self.validate_path(&next) {
                            stack.push(next);
                        }
                    }
                }
            }
        }
        out
    }
}

/// A validated, non-empty, contiguous edge sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PacketPath(Vec<EdgeId>);

impl PacketPath {
    pub fn new(network: &Network, edges: Vec<EdgeId>) -> Result<Self, NetworkError> {
        if network.validate_path(&edges) {
            Ok(PacketPath(edges))
        } else {
            let names: Vec<String> = edges
                .iter()
                .map(|e| {
                    network
                        .edges
                        .get(e.0)
                        .map_or_else(|| e.to_string(), |edge| edge.name.clone())
                })
                .collect();
            Err(NetworkError::InvalidPath(names.join(",")))
        }
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.0
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The edges left after `hops_done` traversals.
    pub fn suffix(&self, hops_done: usize) -> PacketPath {
        PacketPath(self.0[hops_done..].to_vec())
    }

    pub fn contains(&self, edge: EdgeId) -> bool {
        self.0.contains(&edge)
    }
}

/// Congestion `n` (most paths through one edge) and dilation `d` (longest
/// path, in edges) of a packet set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CongestionDilation {
    pub n: usize,
    pub d: usize,
}

impl CongestionDilation {
    pub fn lemma1_bound(&self) -> usize {
        self.n * self.d
    }
}

/// Computes `(n, d)` over the given paths. `d` is taken over the packet set,
/// not the graph, so it stays finite on cyclic networks.
pub fn congestion_dilation<'a, I>(paths: I) -> Result<CongestionDilation, NetworkError>
where
    I: IntoIterator<Item = &'a PacketPath>,
{
    let mut load: HashMap<EdgeId, usize> = HashMap::new();
    let mut d = 0;
    let mut any = false;
    for path in paths {
        any = true;
        d = d.max(path.len());
        for &e in path.edges() {
            *load.entry(e).or_default() += 1;
        }
    }
    if !any {
        return Err(NetworkError::EmptyPacketSet);
    }
    let n = load.values().copied().max().unwrap_or(0);
    Ok(CongestionDilation { n, d })
}
