//! Deterministic single-cycle simulation with fault and drop injection.
//!
//! The timeout is logical: a status frame is either delivered in the
//! acquisition round or it is not. Stage 1 is one synchronous round (all
//! hellos, then all responses); the fault count frame then moves strictly
//! sequentially along the initiator order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{
    broadcast_certified, next_initiator, qualify_faults, threshold_sweep, EngineError, NodeState,
    SelfTestOutcome,
};
use crate::frames::{
    encode_fcf, encode_status_frame, FaultCountFrame, FrameError, StatusBit, StatusFrame,
};
use crate::scalar::Rational;
use crate::topology::{
    compute_reachability, initiator_order, NodeId, ReachabilityTable, Topology, TopologyError,
};
use crate::{Accuracy, Threshold};

/// Largest topology [`enumerate_fault_subsets`] accepts.
pub const MAX_ENUMERATION_NODES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("no fault-free node exists; the cycle cannot be diagnosed")]
    Undiagnosable,
    #[error("{voter} voted for {suspect} twice in one cycle")]
    DuplicateBallot { suspect: NodeId, voter: NodeId },
    #[error("enumeration is limited to {MAX_ENUMERATION_NODES} nodes, topology has {0}")]
    TooManyNodes(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaultMode {
    /// Emits nothing; neighbours detect it by timeout.
    FailSilent,
    /// Fails self-test but still answers hellos with status 1.
    FailReporting,
}

impl FaultMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FaultMode::FailSilent => "fail_silent",
            FaultMode::FailReporting => "fail_reporting",
        }
    }
}

impl fmt::Display for FaultMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FaultMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fail_silent" => Ok(FaultMode::FailSilent),
            "fail_reporting" => Ok(FaultMode::FailReporting),
            other => Err(format!("unknown fault mode {other:?}")),
        }
    }
}

/// Loses the single status frame `from → to` during acquisition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DropRule {
    pub from: u32,
    pub to: u32,
}

/// Complete, reproducible input to one diagnosis cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    topology: Topology,
    reachability: ReachabilityTable,
    faults: BTreeMap<u32, FaultMode>,
    drops: Vec<DropRule>,
    threshold: Threshold,
    priority_override: Option<Vec<u32>>,
    synthetic_votes: Option<BTreeMap<u32, u32>>,
}

impl Scenario {
    /// Fault-free scenario at the default 75% threshold. Fails on a
    /// disconnected topology.
    pub fn new(topology: Topology) -> Result<Self, SimError> {
        let reachability = compute_reachability(&topology)?;
        Ok(Self {
            topology,
            reachability,
            faults: BTreeMap::new(),
            drops: Vec::new(),
            threshold: Threshold::default(),
            priority_override: None,
            synthetic_votes: None,
        })
    }

    pub fn with_fault(mut self, index: u32, mode: FaultMode) -> Result<Self, SimError> {
        self.require_node(index)?;
        self.faults.insert(index, mode);
        Ok(self)
    }

    pub fn with_faults(
        self,
        faults: impl IntoIterator<Item = (u32, FaultMode)>,
    ) -> Result<Self, SimError> {
        faults
            .into_iter()
            .try_fold(self, |s, (i, m)| s.with_fault(i, m))
    }

    pub fn with_drop(mut self, from: u32, to: u32) -> Result<Self, SimError> {
        self.require_node(from)?;
        self.require_node(to)?;
        if !self.topology.are_adjacent(from, to) {
            return Err(SimError::InvalidScenario(format!(
                "drop {from}->{to} is not between neighbours"
            )));
        }
        self.drops.push(DropRule { from, to });
        Ok(self)
    }

    pub fn with_threshold(mut self, threshold: Threshold) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_priority_override(mut self, priority: Vec<u32>) -> Result<Self, SimError> {
        self.reachability.with_priority(&priority)?;
        self.priority_override = Some(priority);
        Ok(self)
    }

    /// Switches to synthetic mode: the final FCF is built directly from
    /// per-suspect vote counts instead of running the protocol. Suspects
    /// with zero votes get no entry.
    pub fn with_synthetic_votes(mut self, votes: BTreeMap<u32, u32>) -> Result<Self, SimError> {
        for (&index, &count) in &votes {
            self.require_node(index)?;
            let reach = self.reachability.reachability(index).unwrap_or(0);
            if count > reach {
                return Err(SimError::InvalidScenario(format!(
                    "synthetic votes {count} for node {index} exceed its reachability {reach}"
                )));
            }
        }
        self.synthetic_votes = Some(votes);
        Ok(self)
    }

    fn require_node(&self, index: u32) -> Result<NodeId, SimError> {
        self.topology
            .node(index)
            .ok_or_else(|| SimError::InvalidScenario(format!("unknown node index {index}")))
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn reachability(&self) -> &ReachabilityTable {
        &self.reachability
    }

    pub fn faults(&self) -> &BTreeMap<u32, FaultMode> {
        &self.faults
    }

    pub fn drops(&self) -> &[DropRule] {
        &self.drops
    }

    pub fn threshold(&self) -> &Threshold {
        &self.threshold
    }

    pub fn priority_override(&self) -> Option<&[u32]> {
        self.priority_override.as_deref()
    }

    pub fn synthetic_votes(&self) -> Option<&BTreeMap<u32, u32>> {
        self.synthetic_votes.as_ref()
    }

    pub fn is_faulty(&self, index: u32) -> bool {
        self.faults.contains_key(&index)
    }

    fn drops_frame(&self, from: u32, to: u32) -> bool {
        self.drops.iter().any(|d| d.from == from && d.to == to)
    }

    /// Initiator order after applying any priority override.
    pub fn initiator_order(&self) -> Vec<NodeId> {
        match &self.priority_override {
            Some(p) => initiator_order(
                &self
                    .reachability
                    .with_priority(p)
                    .expect("override validated on insert"),
            ),
            None => initiator_order(&self.reachability),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MessageKind {
    Hello,
    StatusFrame,
    FcfHandoff,
    Broadcast,
}

impl MessageKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MessageKind::Hello => "hello",
            MessageKind::StatusFrame => "status",
            MessageKind::FcfHandoff => "fcf",
            MessageKind::Broadcast => "broadcast",
        }
    }
}

impl FromStr for MessageKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hello" => Ok(MessageKind::Hello),
            "status" => Ok(MessageKind::StatusFrame),
            "fcf" => Ok(MessageKind::FcfHandoff),
            "broadcast" => Ok(MessageKind::Broadcast),
            other => Err(format!("unknown message kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageEvent {
    pub sender: NodeId,
    pub receiver: NodeId,
    pub kind: MessageKind,
    pub payload: String,
    pub delivered: bool,
}

/// One neighbour's vote against a suspect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ballot {
    pub suspect: NodeId,
    pub voter: NodeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleMode {
    Protocol,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosisReport {
    pub mode: CycleMode,
    pub nodes: Vec<NodeId>,
    pub threshold: Threshold,
    pub initiator_sequence: Vec<NodeId>,
    /// FCF after each acting initiator, aligned with `initiator_sequence`.
    pub fcf_snapshots: Vec<FaultCountFrame>,
    pub final_fcf: FaultCountFrame,
    pub qualifier: Option<NodeId>,
    pub ballots: Vec<Ballot>,
    pub accuracies: Vec<(NodeId, Accuracy)>,
    pub certified: Vec<NodeId>,
    pub barred: Vec<NodeId>,
    pub trace: Vec<MessageEvent>,
}

impl DiagnosisReport {
    pub fn certified_indices(&self) -> BTreeSet<u32> {
        self.certified.iter().map(|n| n.index).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum CycleOutcome {
    Diagnosed(DiagnosisReport),
    /// Every node failed its self-test; nobody can initiate.
    Undiagnosable {
        faulty: Vec<NodeId>,
    },
}

impl CycleOutcome {
    pub fn report(&self) -> Option<&DiagnosisReport> {
        match self {
            CycleOutcome::Diagnosed(r) => Some(r),
            CycleOutcome::Undiagnosable { .. } => None,
        }
    }

    pub fn into_report(self) -> Result<DiagnosisReport, SimError> {
        match self {
            CycleOutcome::Diagnosed(r) => Ok(r),
            CycleOutcome::Undiagnosable { .. } => Err(SimError::Undiagnosable),
        }
    }
}

/// Deliberate engine corruptions used as negative controls.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Treats a missing status frame as a fault-free report.
    IgnoreTimeouts,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CycleOptions {
    #[doc(hidden)]
    pub mutation: Option<Mutation>,
}

pub fn run_cycle(scenario: &Scenario) -> Result<CycleOutcome, SimError> {
    run_cycle_with(scenario, CycleOptions::default())
}

pub fn run_cycle_with(
    scenario: &Scenario,
    options: CycleOptions,
) -> Result<CycleOutcome, SimError> {
    if scenario.synthetic_votes.is_some() {
        return synthetic_cycle(scenario).map(CycleOutcome::Diagnosed);
    }
    let topology = &scenario.topology;
    let mut states: BTreeMap<u32, NodeState> = BTreeMap::new();
    for node in topology.nodes() {
        let mut state = NodeState::new(*node);
        let outcome = if scenario.is_faulty(node.index) {
            SelfTestOutcome::FAIL
        } else {
            SelfTestOutcome::PASS
        };
        state.run_self_test(outcome);
        states.insert(node.index, state);
    }
    let healthy: Vec<NodeId> = topology
        .nodes()
        .iter()
        .copied()
        .filter(|n| !scenario.is_faulty(n.index))
        .collect();
    if healthy.is_empty() {
        return Ok(CycleOutcome::Undiagnosable {
            faulty: topology.nodes().to_vec(),
        });
    }

    let mut trace = Vec::new();

    // Stage 1: hellos, then responses.
    let mut hellos = Vec::new();
    for requester in &healthy {
        for neighbor in topology.neighbors(requester)? {
            trace.push(MessageEvent {
                sender: *requester,
                receiver: neighbor,
                kind: MessageKind::Hello,
                payload: String::new(),
                delivered: true,
            });
            hellos.push((*requester, neighbor));
        }
    }
    let mut responses: BTreeMap<u32, BTreeMap<u32, Option<StatusFrame>>> = BTreeMap::new();
    for (requester, responder) in hellos {
        let inbox = responses.entry(requester.index).or_default();
        if scenario.faults.get(&responder.index) == Some(&FaultMode::FailSilent) {
            inbox.insert(responder.index, None);
            continue;
        }
        let frame = states[&responder.index].status_frame()?;
        let delivered = !scenario.drops_frame(responder.index, requester.index);
        trace.push(MessageEvent {
            sender: responder,
            receiver: requester,
            kind: MessageKind::StatusFrame,
            payload: encode_status_frame(&frame),
            delivered,
        });
        inbox.insert(responder.index, delivered.then_some(frame));
    }
    for node in &healthy {
        let mut inbox = responses.remove(&node.index).unwrap_or_default();
        if options.mutation == Some(Mutation::IgnoreTimeouts) {
            for neighbor in topology.neighbors(node)? {
                let slot = inbox.entry(neighbor.index).or_insert(None);
                if slot.is_none() {
                    *slot = Some(StatusFrame::new(neighbor.address, StatusBit::FaultFree));
                }
            }
        }
        states
            .get_mut(&node.index)
            .expect("state exists")
            .acquire_neighbor_status(topology, &inbox)?;
    }

    // Stage 2: sequential FCF circulation.
    let order = scenario.initiator_order();
    let skip: BTreeSet<u32> = scenario.faults.keys().copied().collect();
    let mut current = order.iter().copied().find(|n| !skip.contains(&n.index));
    let mut fcf = FaultCountFrame::new();
    let mut initiator_sequence = Vec::new();
    let mut fcf_snapshots = Vec::new();
    let mut ballots = Vec::new();
    let mut cast = BTreeSet::new();
    while let Some(initiator) = current {
        let state = states.get_mut(&initiator.index).expect("state exists");
        let suspects: Vec<_> = state
            .local_status()
            .map(|t| t.faulty_neighbors().collect())
            .unwrap_or_default();
        fcf = state.act_as_initiator(fcf, &scenario.reachability)?;
        for address in suspects {
            let suspect = topology
                .node_by_address(address)
                .expect("neighbour address");
            if !cast.insert((suspect.index, initiator.index)) {
                return Err(SimError::DuplicateBallot {
                    suspect,
                    voter: initiator,
                });
            }
            ballots.push(Ballot {
                suspect,
                voter: initiator,
            });
        }
        initiator_sequence.push(initiator);
        fcf_snapshots.push(fcf.clone());
        current = next_initiator(&order, &initiator, &skip);
        if let Some(next) = current {
            trace.push(MessageEvent {
                sender: initiator,
                receiver: next,
                kind: MessageKind::FcfHandoff,
                payload: encode_fcf(&fcf),
                delivered: true,
            });
        }
    }

    // Stage 3: qualification at the most recent initiator, then broadcast.
    let qualifier = *initiator_sequence
        .last()
        .expect("at least one fault-free node");
    let (accuracies, certified) = qualify_report(topology, &fcf, &scenario.threshold)?;
    let certified_addresses: Vec<_> = certified.iter().map(|n| n.address).collect();
    let payload = format_address_list(&certified_addresses);
    for node in topology.nodes() {
        if *node != qualifier {
            trace.push(MessageEvent {
                sender: qualifier,
                receiver: *node,
                kind: MessageKind::Broadcast,
                payload: payload.clone(),
                delivered: true,
            });
        }
    }
    let mut all: Vec<NodeState> = states.into_values().collect();
    broadcast_certified(&certified_addresses, &mut all);
    let barred = all
        .iter()
        .filter(|s| s.is_barred())
        .map(|s| s.id())
        .collect();

    Ok(CycleOutcome::Diagnosed(DiagnosisReport {
        mode: CycleMode::Protocol,
        nodes: topology.nodes().to_vec(),
        threshold: scenario.threshold.clone(),
        initiator_sequence,
        fcf_snapshots,
        final_fcf: fcf,
        qualifier: Some(qualifier),
        ballots,
        accuracies,
        certified,
        barred,
        trace,
    }))
}

fn synthetic_cycle(scenario: &Scenario) -> Result<DiagnosisReport, SimError> {
    let topology = &scenario.topology;
    let votes = scenario.synthetic_votes.as_ref().expect("synthetic mode");
    let mut fcf = FaultCountFrame::new();
    let mut ballots = Vec::new();
    for (&index, &count) in votes {
        let suspect = topology.node(index).expect("validated");
        let reach = scenario
            .reachability
            .reachability(index)
            .expect("validated");
        for voter in topology
            .neighbors(&suspect)?
            .into_iter()
            .take(count as usize)
        {
            fcf.record_vote(suspect.address, voter.address, reach)?;
            ballots.push(Ballot { suspect, voter });
        }
    }
    let (accuracies, certified) = qualify_report(topology, &fcf, &scenario.threshold)?;
    Ok(DiagnosisReport {
        mode: CycleMode::Synthetic,
        nodes: topology.nodes().to_vec(),
        threshold: scenario.threshold.clone(),
        initiator_sequence: Vec::new(),
        fcf_snapshots: Vec::new(),
        final_fcf: fcf,
        qualifier: None,
        ballots,
        accuracies,
        barred: certified.clone(),
        certified,
        trace: Vec::new(),
    })
}

type Qualified = (Vec<(NodeId, Accuracy)>, Vec<NodeId>);

fn qualify_report(
    topology: &Topology,
    fcf: &FaultCountFrame,
    threshold: &Threshold,
) -> Result<Qualified, SimError> {
    let q = qualify_faults(fcf, threshold)?;
    let resolve = |address| {
        topology.node_by_address(address).ok_or_else(|| {
            SimError::InvalidScenario(format!("FCF names unknown address {address}"))
        })
    };
    let accuracies = q
        .accuracies
        .into_iter()
        .map(|(a, acc)| Ok((resolve(a)?, acc)))
        .collect::<Result<Vec<_>, SimError>>()?;
    let certified = q
        .certified
        .into_iter()
        .map(resolve)
        .collect::<Result<Vec<_>, _>>()?;
    Ok((accuracies, certified))
}

/// `['a', 'b']`, the list form printed by the reference run.
pub fn format_address_list(addresses: &[std::net::Ipv4Addr]) -> String {
    let quoted: Vec<String> = addresses.iter().map(|a| format!("'{a}'")).collect();
    format!("[{}]", quoted.join(", "))
}

/// Closed-form expectation for a scenario, computed without running the
/// protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OraclePrediction {
    /// Votes per suspect index; suspects with zero votes are absent.
    pub votes: BTreeMap<u32, u32>,
    pub certified: BTreeSet<u32>,
}

/// A suspect `s` receives one vote from each fault-free neighbour `n` for
/// which `s` is faulty or the `s → n` status frame is dropped. It is
/// certified iff `100 · votes ≥ threshold · degree(s)`.
pub fn oracle_predict(scenario: &Scenario) -> OraclePrediction {
    let mut degree: BTreeMap<u32, u32> = BTreeMap::new();
    let mut votes: BTreeMap<u32, u32> = BTreeMap::new();
    let mut arcs = Vec::new();
    for (a, b) in scenario.topology.edges() {
        *degree.entry(a).or_default() += 1;
        *degree.entry(b).or_default() += 1;
        arcs.push((a, b));
        arcs.push((b, a));
    }
    if let Some(synthetic) = &scenario.synthetic_votes {
        votes.extend(
            synthetic
                .iter()
                .filter(|(_, v)| **v > 0)
                .map(|(k, v)| (*k, *v)),
        );
    } else if scenario
        .topology
        .nodes()
        .iter()
        .any(|n| !scenario.faults.contains_key(&n.index))
    {
        for (voter, suspect) in arcs {
            if scenario.faults.contains_key(&voter) {
                continue;
            }
            let dropped = scenario
                .drops
                .iter()
                .any(|d| d.from == suspect && d.to == voter);
            if scenario.faults.contains_key(&suspect) || dropped {
                *votes.entry(suspect).or_default() += 1;
            }
        }
    }
    let threshold: Rational = *scenario.threshold.value();
    let certified = votes
        .iter()
        .filter(|(s, v)| {
            Rational::from_integer(100 * i64::from(**v))
                >= threshold * Rational::from_integer(i64::from(degree[s]))
        })
        .map(|(s, _)| *s)
        .collect();
    OraclePrediction { votes, certified }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub final_fcf: FaultCountFrame,
    pub accuracies: Vec<(NodeId, Accuracy)>,
    pub points: Vec<(Threshold, Vec<NodeId>)>,
}

/// Runs one cycle and re-qualifies its final FCF at each threshold.
pub fn sweep_scenario(
    scenario: &Scenario,
    thresholds: &[Threshold],
) -> Result<SweepReport, SimError> {
    let report = run_cycle(scenario)?.into_report()?;
    let topology = &scenario.topology;
    let points = threshold_sweep(&report.final_fcf, thresholds)?
        .into_iter()
        .map(|p| {
            let nodes = p
                .certified
                .iter()
                .map(|a| {
                    topology
                        .node_by_address(*a)
                        .expect("FCF addresses resolved in run")
                })
                .collect();
            (p.threshold, nodes)
        })
        .collect();
    Ok(SweepReport {
        final_fcf: report.final_fcf,
        accuracies: report.accuracies,
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetResult {
    pub faults: BTreeSet<u32>,
    pub run_certified: BTreeSet<u32>,
    pub oracle_certified: BTreeSet<u32>,
    /// Every snapshot entry of the run satisfied `1 ≤ vote ≤ reachability`.
    pub votes_bounded: bool,
}

impl SubsetResult {
    pub fn matches(&self) -> bool {
        self.run_certified == self.oracle_certified
    }
}

/// Runs every diagnosable fault subset (all but the all-faulty one)
/// through both [`run_cycle`] and [`oracle_predict`].
pub fn enumerate_fault_subsets(
    topology: &Topology,
    threshold: &Threshold,
    mode: FaultMode,
) -> Result<Vec<SubsetResult>, SimError> {
    enumerate_fault_subsets_with(topology, threshold, mode, CycleOptions::default())
}

pub fn enumerate_fault_subsets_with(
    topology: &Topology,
    threshold: &Threshold,
    mode: FaultMode,
    options: CycleOptions,
) -> Result<Vec<SubsetResult>, SimError> {
    let nodes = topology.nodes();
    if nodes.len() > MAX_ENUMERATION_NODES {
        return Err(SimError::TooManyNodes(nodes.len()));
    }
    let base = Scenario::new(topology.clone())?.with_threshold(threshold.clone());
    let all = (1u32 << nodes.len()) - 1;
    (0..all)
        .map(|mask| {
            let faults: BTreeSet<u32> = nodes
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask & (1 << bit) != 0)
                .map(|(_, n)| n.index)
                .collect();
            let scenario = base
                .clone()
                .with_faults(faults.iter().map(|&i| (i, mode)))?;
            check_against_oracle(&scenario, options).map(|(run, oracle, bounded)| SubsetResult {
                faults,
                run_certified: run,
                oracle_certified: oracle,
                votes_bounded: bounded,
            })
        })
        .collect()
}

/// Certified sets from the protocol run and from the oracle, plus whether
/// every FCF snapshot respected the vote bound.
pub fn check_against_oracle(
    scenario: &Scenario,
    options: CycleOptions,
) -> Result<(BTreeSet<u32>, BTreeSet<u32>, bool), SimError> {
    let report = run_cycle_with(scenario, options)?.into_report()?;
    let bounded = votes_within_bounds(scenario, &report);
    Ok((
        report.certified_indices(),
        oracle_predict(scenario).certified,
        bounded,
    ))
}

/// `1 ≤ vote ≤ reachability` and reachability equal to the suspect's
/// degree, for every entry of every snapshot.
pub fn votes_within_bounds(scenario: &Scenario, report: &DiagnosisReport) -> bool {
    report
        .fcf_snapshots
        .iter()
        .chain([&report.final_fcf])
        .all(|fcf| {
            fcf.entries().iter().all(|e| {
                let degree = scenario
                    .topology
                    .node_by_address(e.faulty_address)
                    .and_then(|n| scenario.topology.degree(n.index));
                e.vote >= 1 && e.vote <= e.reachability && degree == Some(e.reachability)
            })
        })
}

/// Connected graph on `n` nodes: a random spanning tree plus each remaining
/// pair with probability `extra_edge_probability`. Addresses are `10.0.0.i`.
pub fn random_connected_topology(
    rng: &mut impl Rng,
    n: u32,
    extra_edge_probability: f64,
) -> Topology {
    assert!((1..=250).contains(&n), "node count out of range");
    let nodes = (0..n).map(|i| NodeId::new(i, std::net::Ipv4Addr::new(10, 0, 0, i as u8 + 1)));
    let mut edges = BTreeSet::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        edges.insert((j, i));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !edges.contains(&(a, b)) && rng.gen_bool(extra_edge_probability) {
                edges.insert((a, b));
            }
        }
    }
    Topology::new(nodes, edges).expect("generated graph is well formed")
}

/// Seeded random scenario over a connected graph of `min_nodes..=max_nodes`
/// nodes with a random (diagnosable) fault subset and no drops.
pub fn random_scenario(seed: u64, min_nodes: u32, max_nodes: u32, mode: FaultMode) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(min_nodes..=max_nodes);
    let topology = random_connected_topology(&mut rng, n, 0.3);
    let mut faults: Vec<u32> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
    if faults.len() == n as usize {
        faults.pop();
    }
    Scenario::new(topology)
        .and_then(|s| s.with_faults(faults.into_iter().map(|i| (i, mode))))
        .expect("generated scenario is valid")
}
