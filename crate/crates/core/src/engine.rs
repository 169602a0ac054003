//! Per-node diagnosis state machine.
//!
//! A cycle runs in three stages: every fault-free node collects its
//! neighbours' status frames, the fault count frame then visits each
//! fault-free node once in initiator order, and the last holder computes
//! percent accuracies and broadcasts the certified set.

use std::collections::{BTreeMap, BTreeSet};
use std::net::Ipv4Addr;

use crate::frames::{FaultCountFrame, FrameError, LocalStatusTable, StatusBit, StatusFrame};
use crate::scalar::Scalar;
use crate::topology::{NodeId, ReachabilityTable, Topology, TopologyError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("{0} has not run its self-test")]
    SelfTestPending(NodeId),
    #[error("{0} failed its self-test and cannot take part in diagnosis")]
    NotFaultFree(NodeId),
    #[error("{node} received a status response from non-neighbour {from}")]
    ResponseFromNonNeighbor { node: NodeId, from: u32 },
    #[error("status frame from neighbour {from} carries address {address}")]
    ResponseAddressMismatch { from: NodeId, address: Ipv4Addr },
    #[error("{0} already acted as initiator in this cycle")]
    AlreadyActed(NodeId),
    #[error("{0} has no local status table")]
    NoLocalStatus(NodeId),
    #[error("no reachability known for {0}")]
    UnknownReachability(Ipv4Addr),
    #[error("FCF entry for {0} has zero reachability")]
    ZeroReachability(Ipv4Addr),
    #[error("threshold {0} is outside [0, 100]")]
    InvalidThreshold(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// Injected self-test result; stands in for the hardware test sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelfTestOutcome {
    pub passed: bool,
}

impl SelfTestOutcome {
    pub const PASS: Self = Self { passed: true };
    pub const FAIL: Self = Self { passed: false };
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeState {
    id: NodeId,
    self_status: Option<StatusBit>,
    local_status: Option<LocalStatusTable>,
    has_acted_as_initiator: bool,
    certified_faulty: Option<Vec<Ipv4Addr>>,
    barred: bool,
}

impl NodeState {
    pub fn new(id: NodeId) -> Self {
        Self {
            id,
            self_status: None,
            local_status: None,
            has_acted_as_initiator: false,
            certified_faulty: None,
            barred: false,
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn self_status(&self) -> Option<StatusBit> {
        self.self_status
    }

    pub fn is_fault_free(&self) -> bool {
        self.self_status == Some(StatusBit::FaultFree)
    }

    pub fn local_status(&self) -> Option<&LocalStatusTable> {
        self.local_status.as_ref()
    }

    pub fn has_acted_as_initiator(&self) -> bool {
        self.has_acted_as_initiator
    }

    /// Certified faulty addresses received in the final broadcast.
    pub fn certified_faulty(&self) -> Option<&[Ipv4Addr]> {
        self.certified_faulty.as_deref()
    }

    pub fn is_barred(&self) -> bool {
        self.barred
    }

    pub fn run_self_test(&mut self, outcome: SelfTestOutcome) -> StatusBit {
        let bit = if outcome.passed {
            StatusBit::FaultFree
        } else {
            StatusBit::Faulty
        };
        self.self_status = Some(bit);
        bit
    }

    /// Reply to a hello: this node's own status frame.
    pub fn status_frame(&self) -> Result<StatusFrame, EngineError> {
        let status = self
            .self_status
            .ok_or(EngineError::SelfTestPending(self.id))?;
        Ok(StatusFrame::new(self.id.address, status))
    }

    /// Builds the local status table from hello responses. A neighbour with
    /// no entry, or an empty one, timed out and is recorded as faulty.
    pub fn acquire_neighbor_status(
        &mut self,
        topology: &Topology,
        responses: &BTreeMap<u32, Option<StatusFrame>>,
    ) -> Result<&LocalStatusTable, EngineError> {
        self.require_fault_free()?;
        let neighbors = topology.neighbors(&self.id)?;
        if let Some(&stray) = responses
            .keys()
            .find(|i| !neighbors.iter().any(|n| n.index == **i))
        {
            return Err(EngineError::ResponseFromNonNeighbor {
                node: self.id,
                from: stray,
            });
        }
        let mut rows = Vec::with_capacity(neighbors.len());
        for neighbor in neighbors {
            let row = match responses.get(&neighbor.index).copied().flatten() {
                Some(frame) if frame.address != neighbor.address => {
                    return Err(EngineError::ResponseAddressMismatch {
                        from: neighbor,
                        address: frame.address,
                    });
                }
                Some(frame) => frame,
                None => StatusFrame::new(neighbor.address, StatusBit::Faulty),
            };
            rows.push(row);
        }
        Ok(self.local_status.insert(LocalStatusTable {
            owner: self.id,
            rows,
        }))
    }

    /// Votes against every neighbour the local table marks faulty, then
    /// returns the frame for hand-off.
    pub fn act_as_initiator(
        &mut self,
        mut fcf: FaultCountFrame,
        table: &ReachabilityTable,
    ) -> Result<FaultCountFrame, EngineError> {
        self.require_fault_free()?;
        if self.has_acted_as_initiator {
            return Err(EngineError::AlreadyActed(self.id));
        }
        let local = self
            .local_status
            .as_ref()
            .ok_or(EngineError::NoLocalStatus(self.id))?;
        for suspect in local.faulty_neighbors() {
            let reach = table
                .reachability_of_address(suspect)
                .ok_or(EngineError::UnknownReachability(suspect))?;
            fcf.record_vote(suspect, self.id.address, reach)?;
        }
        self.has_acted_as_initiator = true;
        Ok(fcf)
    }

    pub fn receive_broadcast(&mut self, certified: &[Ipv4Addr]) {
        self.barred = certified.contains(&self.id.address);
        self.certified_faulty = Some(certified.to_vec());
    }

    fn require_fault_free(&self) -> Result<(), EngineError> {
        match self.self_status {
            None => Err(EngineError::SelfTestPending(self.id)),
            Some(StatusBit::Faulty) => Err(EngineError::NotFaultFree(self.id)),
            Some(StatusBit::FaultFree) => Ok(()),
        }
    }
}

/// The node after `current` in `order` that is not in `skip`.
pub fn next_initiator(order: &[NodeId], current: &NodeId, skip: &BTreeSet<u32>) -> Option<NodeId> {
    let pos = order.iter().position(|n| n == current)?;
    order[pos + 1..]
        .iter()
        .copied()
        .find(|n| !skip.contains(&n.index))
}

/// Delivers the certified list to every node, faulty or not.
pub fn broadcast_certified(certified: &[Ipv4Addr], nodes: &mut [NodeState]) {
    for node in nodes {
        node.receive_broadcast(certified);
    }
}

/// `100 · votes / reachability` for one suspect.
#[derive(Debug, Clone, PartialEq)]
pub struct PercentAccuracy<T> {
    pub votes: u32,
    pub reachability: u32,
    pub value: T,
}

impl<T: Scalar> PercentAccuracy<T> {
    pub fn from_counts(votes: u32, reachability: u32) -> Option<Self> {
        if reachability == 0 {
            return None;
        }
        let value = T::from_count(100 * u64::from(votes)) / T::from_count(u64::from(reachability));
        Some(Self {
            votes,
            reachability,
            value,
        })
    }

    /// `accuracy ≥ threshold`, evaluated as `100·votes ≥ threshold·reachability`.
    pub fn meets(&self, threshold: &ThresholdPercent<T>) -> bool {
        T::from_count(100 * u64::from(self.votes))
            >= threshold.value().clone() * T::from_count(u64::from(self.reachability))
    }
}

/// Certification cutoff in percent, within `[0, 100]`.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub struct ThresholdPercent<T>(T);

impl<T: Scalar> ThresholdPercent<T> {
    pub const DEFAULT_PERCENT: u64 = 75;

    pub fn new(value: T) -> Result<Self, EngineError> {
        if value < T::zero() || value > T::from_count(100) {
            return Err(EngineError::InvalidThreshold(format!("{value:?}")));
        }
        Ok(Self(value))
    }

    pub fn value(&self) -> &T {
        &self.0
    }
}

impl<T: Scalar> Default for ThresholdPercent<T> {
    fn default() -> Self {
        Self(T::from_count(Self::DEFAULT_PERCENT))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Qualification<T> {
    /// One row per FCF entry, in FCF order.
    pub accuracies: Vec<(Ipv4Addr, PercentAccuracy<T>)>,
    /// Suspects whose accuracy meets the threshold, in FCF order.
    pub certified: Vec<Ipv4Addr>,
}

pub fn qualify_faults<T: Scalar>(
    fcf: &FaultCountFrame,
    threshold: &ThresholdPercent<T>,
) -> Result<Qualification<T>, EngineError> {
    let mut accuracies = Vec::with_capacity(fcf.len());
    let mut certified = Vec::new();
    for entry in fcf.entries() {
        let acc = PercentAccuracy::from_counts(entry.vote, entry.reachability)
            .ok_or(EngineError::ZeroReachability(entry.faulty_address))?;
        if acc.meets(threshold) {
            certified.push(entry.faulty_address);
        }
        accuracies.push((entry.faulty_address, acc));
    }
    Ok(Qualification {
        accuracies,
        certified,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint<T> {
    pub threshold: ThresholdPercent<T>,
    pub certified: Vec<Ipv4Addr>,
}

impl<T> SweepPoint<T> {
    pub fn count(&self) -> usize {
        self.certified.len()
    }
}

/// Qualifies one fixed FCF at each threshold, in the given order.
pub fn threshold_sweep<T: Scalar>(
    fcf: &FaultCountFrame,
    thresholds: &[ThresholdPercent<T>],
) -> Result<Vec<SweepPoint<T>>, EngineError> {
    thresholds
        .iter()
        .map(|t| {
            Ok(SweepPoint {
                threshold: t.clone(),
                certified: qualify_faults(fcf, t)?.certified,
            })
        })
        .collect()
}
