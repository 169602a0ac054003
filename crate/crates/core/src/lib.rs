//! Accuracy-based distributed fault diagnosis.
//!
//! Every fault-free node tests its neighbours, a fault count frame (FCF)
//! collects the resulting votes as it visits each node in descending
//! reachability order, and the last holder certifies a suspect as faulty
//! when `100 · votes / reachability` reaches a percent threshold.
//!
//! Accuracy arithmetic is generic over [`Scalar`]; reports use the exact
//! [`Rational`] aliases below.

pub mod engine;
pub mod frames;
pub mod scalar;
pub mod sim;
pub mod topology;

pub use engine::{
    broadcast_certified, next_initiator, qualify_faults, threshold_sweep, EngineError, NodeState,
    PercentAccuracy, Qualification, SelfTestOutcome, SweepPoint, ThresholdPercent,
};
pub use frames::{
    decode_fcf, decode_status_frame, decode_status_frames, encode_fcf, encode_status_frame,
    encode_status_frames, record_vote, FaultCountFrame, FcfEntry, FrameError, LocalStatusTable,
    StatusBit, StatusFrame,
};
pub use scalar::{Rational, Scalar};
pub use sim::{
    enumerate_fault_subsets, oracle_predict, run_cycle, sweep_scenario, CycleOutcome,
    DiagnosisReport, FaultMode, Scenario, SimError,
};
pub use topology::{
    compute_reachability, initiator_order, NodeId, ReachabilityTable, Topology, TopologyError,
};

/// Exact percent accuracy.
pub type Accuracy = PercentAccuracy<Rational>;
/// Exact percent threshold.
pub type Threshold = ThresholdPercent<Rational>;
/// Floating-point percent accuracy, for display and plotting.
pub type AccuracyF64 = PercentAccuracy<f64>;
/// Floating-point percent threshold.
pub type ThresholdF64 = ThresholdPercent<f64>;
