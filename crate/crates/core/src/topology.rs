//! Static network graph, reachability and initiator ordering.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::net::Ipv4Addr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopologyError {
    #[error("topology has no nodes")]
    Empty,
    #[error("duplicate node index {0}")]
    DuplicateIndex(u32),
    #[error("duplicate node address {0}")]
    DuplicateAddress(Ipv4Addr),
    #[error("self-loop on node {0}")]
    SelfLoop(u32),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(u32, u32),
    #[error("edge {0}-{1} references an undeclared node")]
    UnknownEndpoint(u32, u32),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("topology is disconnected: node {0} is unreachable from node {1}")]
    Disconnected(u32, u32),
    #[error("priority override lists node {0} more than once")]
    DuplicatePriority(u32),
}

/// Stable identity of a node: declaration index plus network address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId {
    pub index: u32,
    pub address: Ipv4Addr,
}

impl NodeId {
    pub fn new(index: u32, address: Ipv4Addr) -> Self {
        Self { index, address }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{}({})", self.index, self.address)
    }
}

/// Undirected graph over a fixed set of nodes. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    nodes: Vec<NodeId>,
    edges: BTreeSet<(u32, u32)>,
    adjacency: BTreeMap<u32, BTreeSet<u32>>,
}

impl Topology {
    /// Validates node identities and edges. Connectivity is checked by
    /// [`compute_reachability`], which every diagnosis run goes through.
    pub fn new(
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, TopologyError> {
        let mut list = Vec::new();
        let mut indices = BTreeSet::new();
        let mut addresses = BTreeSet::new();
        for node in nodes {
            if !indices.insert(node.index) {
                return Err(TopologyError::DuplicateIndex(node.index));
            }
            if !addresses.insert(node.address) {
                return Err(TopologyError::DuplicateAddress(node.address));
            }
            list.push(node);
        }
        if list.is_empty() {
            return Err(TopologyError::Empty);
        }

        let mut edge_set = BTreeSet::new();
        let mut adjacency: BTreeMap<u32, BTreeSet<u32>> =
            indices.iter().map(|&i| (i, BTreeSet::new())).collect();
        for (a, b) in edges {
            if a == b {
                return Err(TopologyError::SelfLoop(a));
            }
            if !indices.contains(&a) || !indices.contains(&b) {
                return Err(TopologyError::UnknownEndpoint(a, b));
            }
            let key = (a.min(b), a.max(b));
            if !edge_set.insert(key) {
                return Err(TopologyError::DuplicateEdge(key.0, key.1));
            }
            adjacency.entry(a).or_default().insert(b);
            adjacency.entry(b).or_default().insert(a);
        }

        Ok(Self {
            nodes: list,
            edges: edge_set,
            adjacency,
        })
    }

    /// Nodes in declaration order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Edges as `(low, high)` index pairs.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, index: u32) -> Option<NodeId> {
        self.nodes.iter().copied().find(|n| n.index == index)
    }

    pub fn node_by_address(&self, address: Ipv4Addr) -> Option<NodeId> {
        self.nodes.iter().copied().find(|n| n.address == address)
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.node(node.index) == Some(*node)
    }

    pub fn are_adjacent(&self, a: u32, b: u32) -> bool {
        self.adjacency.get(&a).is_some_and(|s| s.contains(&b))
    }

    /// Nodes sharing an edge with `node`, ascending by index.
    pub fn neighbors(&self, node: &NodeId) -> Result<Vec<NodeId>, TopologyError> {
        if !self.contains(node) {
            return Err(TopologyError::UnknownNode(node.to_string()));
        }
        Ok(self.adjacency[&node.index]
            .iter()
            .map(|&i| self.node(i).expect("adjacency only holds declared nodes"))
            .collect())
    }

    pub fn degree(&self, index: u32) -> Option<u32> {
        self.adjacency.get(&index).map(|s| s.len() as u32)
    }

    fn check_connected(&self) -> Result<(), TopologyError> {
        let start = self.nodes[0].index;
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            for &m in &self.adjacency[&n] {
                if seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        match self.nodes.iter().find(|n| !seen.contains(&n.index)) {
            Some(missing) => Err(TopologyError::Disconnected(missing.index, start)),
            None => Ok(()),
        }
    }
}

/// Per-node reachability (degree), kept in initiator priority order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilityTable {
    entries: Vec<(NodeId, u32)>,
}

/// Counts the direct connections of every node and orders the result by
/// descending reachability, ties by ascending index.
pub fn compute_reachability(topology: &Topology) -> Result<ReachabilityTable, TopologyError> {
    topology.check_connected()?;
    let mut entries: Vec<(NodeId, u32)> = topology
        .nodes()
        .iter()
        .map(|n| (*n, topology.degree(n.index).unwrap_or(0)))
        .collect();
    entries.sort_by_key(|(n, r)| (std::cmp::Reverse(*r), n.index));
    Ok(ReachabilityTable { entries })
}

impl ReachabilityTable {
    pub fn entries(&self) -> &[(NodeId, u32)] {
        &self.entries
    }

    pub fn reachability(&self, index: u32) -> Option<u32> {
        self.entries
            .iter()
            .find(|(n, _)| n.index == index)
            .map(|(_, r)| *r)
    }

    pub fn reachability_of_address(&self, address: Ipv4Addr) -> Option<u32> {
        self.entries
            .iter()
            .find(|(n, _)| n.address == address)
            .map(|(_, r)| *r)
    }

    /// Re-ranks ties: nodes named in `priority` come first among equals, in
    /// the listed order; unlisted nodes follow by ascending index.
    /// Reachability still dominates the ordering.
    pub fn with_priority(&self, priority: &[u32]) -> Result<Self, TopologyError> {
        let mut rank = BTreeMap::new();
        for (pos, &index) in priority.iter().enumerate() {
            if !self.entries.iter().any(|(n, _)| n.index == index) {
                return Err(TopologyError::UnknownNode(format!("index {index}")));
            }
            if rank.insert(index, pos).is_some() {
                return Err(TopologyError::DuplicatePriority(index));
            }
        }
        let mut entries = self.entries.clone();
        entries.sort_by_key(|(n, r)| {
            let listed = rank.get(&n.index).copied();
            (
                std::cmp::Reverse(*r),
                listed.is_none(),
                listed.unwrap_or(0),
                n.index,
            )
        });
        Ok(Self { entries })
    }
}

/// The sequence in which nodes take the initiator role.
pub fn initiator_order(table: &ReachabilityTable) -> Vec<NodeId> {
    table.entries.iter().map(|(n, _)| *n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(i: u32) -> NodeId {
        NodeId::new(i, Ipv4Addr::new(10, 0, 0, i as u8))
    }

    fn graph(n: u32, edges: &[(u32, u32)]) -> Topology {
        Topology::new((0..n).map(node), edges.iter().copied()).unwrap()
    }

    #[test]
    fn singleton_has_zero_reachability() {
        let t = graph(1, &[]);
        let table = compute_reachability(&t).unwrap();
        assert_eq!(table.entries(), &[(node(0), 0)]);
        assert!(t.neighbors(&node(0)).unwrap().is_empty());
    }

    #[test]
    fn complete_graph_is_uniform() {
        let t = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let table = compute_reachability(&t).unwrap();
        assert!(table.entries().iter().all(|(_, r)| *r == 3));
        for n in t.nodes() {
            let nb = t.neighbors(n).unwrap();
            assert_eq!(nb.len(), 3);
            assert!(!nb.contains(n));
        }
    }

    #[test]
    fn ring_and_pair_order_by_index() {
        let ring = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let order = initiator_order(&compute_reachability(&ring).unwrap());
        assert_eq!(order, (0..4).map(node).collect::<Vec<_>>());

        let pair = graph(2, &[(1, 0)]);
        let table = compute_reachability(&pair).unwrap();
        assert_eq!(table.entries(), &[(node(0), 1), (node(1), 1)]);
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert_eq!(Topology::new([], []), Err(TopologyError::Empty));
        assert_eq!(
            Topology::new([node(0), node(0)], []),
            Err(TopologyError::DuplicateIndex(0))
        );
        assert_eq!(
            Topology::new([node(0), NodeId::new(1, node(0).address)], []),
            Err(TopologyError::DuplicateAddress(node(0).address))
        );
        assert_eq!(
            Topology::new([node(0)], [(0, 0)]),
            Err(TopologyError::SelfLoop(0))
        );
        assert_eq!(
            Topology::new([node(0), node(1)], [(0, 1), (1, 0)]),
            Err(TopologyError::DuplicateEdge(0, 1))
        );
        assert_eq!(
            Topology::new([node(0)], [(0, 5)]),
            Err(TopologyError::UnknownEndpoint(0, 5))
        );
    }

    #[test]
    fn disconnected_graph_is_a_configuration_error() {
        let t = graph(4, &[(0, 1), (2, 3)]);
        assert!(matches!(
            compute_reachability(&t),
            Err(TopologyError::Disconnected(2, 0))
        ));
    }

    #[test]
    fn unknown_node_lookup_fails() {
        let t = graph(2, &[(0, 1)]);
        assert!(t.neighbors(&node(7)).is_err());
        // same index, different address
        assert!(t
            .neighbors(&NodeId::new(0, Ipv4Addr::new(1, 1, 1, 1)))
            .is_err());
    }

    #[test]
    fn priority_only_reorders_ties() {
        // path 0-1-2-3: inner nodes have reachability 2
        let t = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let table = compute_reachability(&t).unwrap();
        let order = initiator_order(&table.with_priority(&[3, 2]).unwrap());
        assert_eq!(order, vec![node(2), node(1), node(3), node(0)]);
        assert!(table.with_priority(&[9]).is_err());
        assert_eq!(
            table.with_priority(&[1, 1]),
            Err(TopologyError::DuplicatePriority(1))
        );
    }
}
