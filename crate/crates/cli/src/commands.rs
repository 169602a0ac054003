use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::net::Ipv4Addr;
use std::path::{Path, PathBuf};

use fdda_core::sim::{
    check_against_oracle, enumerate_fault_subsets_with, random_scenario, CycleOptions, Mutation,
    MAX_ENUMERATION_NODES,
};
use fdda_core::{
    run_cycle, sweep_scenario, CycleOutcome, FaultMode, NodeId, Rational, Scenario, SimError,
    Threshold, ThresholdPercent, Topology,
};

use crate::render::{render_report, render_sweep, Format};
use crate::scenario_file::{load_scenario, parse_rational, render_scenario, ScenarioFileError};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Usage = 2,
    ScenarioError = 3,
    Undiagnosable = 4,
    InvariantViolation = 5,
    Mismatch = 6,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("scenario error: {0}")]
    Scenario(#[from] ScenarioFileError),
    #[error("undiagnosable: every node failed its self-test, no initiator can be chosen")]
    Undiagnosable,
    #[error("internal invariant violation: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            CliError::Usage(_) => ExitStatus::Usage,
            CliError::Scenario(_) => ExitStatus::ScenarioError,
            CliError::Undiagnosable => ExitStatus::Undiagnosable,
            CliError::Internal(_) => ExitStatus::InvariantViolation,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Undiagnosable => CliError::Undiagnosable,
            SimError::TooManyNodes(_) => CliError::Usage(e.to_string()),
            SimError::InvalidScenario(_) | SimError::Topology(_) => {
                CliError::Scenario(ScenarioFileError::Invalid(e.to_string()))
            }
            other => CliError::Internal(other.to_string()),
        }
    }
}

/// Text for stdout plus the exit status to report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub text: String,
    pub status: ExitStatus,
}

impl Rendered {
    fn ok(text: String) -> Self {
        Self {
            text,
            status: ExitStatus::Success,
        }
    }
}

pub fn cmd_run(path: &Path, format: Format, threshold: Option<&str>) -> Result<Rendered, CliError> {
    let mut scenario = load_scenario(path)?;
    if let Some(t) = threshold {
        scenario = scenario.with_threshold(parse_threshold(t)?);
    }
    match run_cycle(&scenario)? {
        CycleOutcome::Diagnosed(report) => Ok(Rendered::ok(render_report(&report, format))),
        CycleOutcome::Undiagnosable { .. } => Err(CliError::Undiagnosable),
    }
}

pub fn cmd_sweep(path: &Path, thresholds: &str, format: Format) -> Result<Rendered, CliError> {
    let scenario = load_scenario(path)?;
    let thresholds = parse_threshold_spec(thresholds)?;
    let sweep = sweep_scenario(&scenario, &thresholds)?;
    Ok(Rendered::ok(render_sweep(&sweep, format)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MutantKind {
    IgnoreTimeouts,
}

#[derive(Debug, Clone)]
pub enum EnumerateTarget {
    Scenario(PathBuf),
    Topology(String),
    Random { count: usize, seed: u64 },
}

pub fn cmd_enumerate(
    target: &EnumerateTarget,
    mode: FaultMode,
    threshold: Option<&str>,
    mutant: Option<MutantKind>,
) -> Result<Rendered, CliError> {
    let options = CycleOptions {
        mutation: mutant.map(|m| match m {
            MutantKind::IgnoreTimeouts => Mutation::IgnoreTimeouts,
        }),
    };
    let threshold_override = threshold.map(parse_threshold).transpose()?;

    if let EnumerateTarget::Random { count, seed } = target {
        let mut mismatches = Vec::new();
        for i in 0..*count as u64 {
            let mut scenario = random_scenario(seed.wrapping_add(i), 4, 10, mode);
            if let Some(t) = &threshold_override {
                scenario = scenario.with_threshold(t.clone());
            }
            let (run, oracle, bounded) = check_against_oracle(&scenario, options)?;
            if run != oracle || !bounded {
                mismatches.push((scenario, run, oracle));
            }
        }
        let mut text = format!(
            "{count} random scenarios (seed {seed}, 4-10 nodes), {} mismatches\n",
            mismatches.len()
        );
        return Ok(finish_enumeration(&mut text, mismatches));
    }

    let base = match target {
        EnumerateTarget::Scenario(path) => load_scenario(path)?,
        EnumerateTarget::Topology(spec) => Scenario::new(parse_topology_spec(spec)?)?,
        EnumerateTarget::Random { .. } => unreachable!(),
    };
    let threshold = threshold_override.unwrap_or_else(|| base.threshold().clone());
    let n = base.topology().nodes().len();
    if n > MAX_ENUMERATION_NODES {
        return Err(CliError::Usage(format!(
            "enumeration supports at most {MAX_ENUMERATION_NODES} nodes, topology has {n}"
        )));
    }
    let results = enumerate_fault_subsets_with(base.topology(), &threshold, mode, options)?;
    let mut mismatches = Vec::new();
    for r in &results {
        if !r.matches() || !r.votes_bounded {
            let scenario = Scenario::new(base.topology().clone())?
                .with_threshold(threshold.clone())
                .with_faults(r.faults.iter().map(|&i| (i, mode)))?;
            mismatches.push((
                scenario,
                r.run_certified.clone(),
                r.oracle_certified.clone(),
            ));
        }
    }
    let mut text = format!(
        "{} subsets, {} mismatches\n",
        results.len(),
        mismatches.len()
    );
    Ok(finish_enumeration(&mut text, mismatches))
}

fn finish_enumeration(
    text: &mut String,
    mismatches: Vec<(Scenario, BTreeSet<u32>, BTreeSet<u32>)>,
) -> Rendered {
    match mismatches.first() {
        None => Rendered::ok(std::mem::take(text)),
        Some((scenario, run, oracle)) => {
            writeln!(
                text,
                "counterexample: run certified {run:?}, oracle certified {oracle:?}"
            )
            .unwrap();
            text.push_str(&render_scenario(scenario));
            Rendered {
                text: std::mem::take(text),
                status: ExitStatus::Mismatch,
            }
        }
    }
}

fn parse_threshold(text: &str) -> Result<Threshold, CliError> {
    let value = parse_rational(text)
        .ok_or_else(|| CliError::Usage(format!("invalid threshold {text:?}")))?;
    ThresholdPercent::new(value).map_err(|e| CliError::Usage(e.to_string()))
}

/// `75`, `0,33.33,50` or an inclusive range `0..100:25` (step defaults to
/// 10). Results are sorted ascending without duplicates.
pub fn parse_threshold_spec(spec: &str) -> Result<Vec<Threshold>, CliError> {
    let usage = |m: String| CliError::Usage(m);
    let mut values: Vec<Rational> = if let Some((start, rest)) = spec.split_once("..") {
        let (end, step) = rest.split_once(':').unwrap_or((rest, "10"));
        let [start, end, step] = [start, end, step].map(|t| {
            parse_rational(t.trim()).ok_or_else(|| usage(format!("invalid range bound {t:?}")))
        });
        let (start, end, step) = (start?, end?, step?);
        if step <= Rational::from_integer(0) || start > end {
            return Err(usage(format!("invalid range {spec:?}")));
        }
        let mut v = Vec::new();
        let mut t = start;
        while t <= end {
            v.push(t);
            t += step;
        }
        v
    } else {
        spec.split(',')
            .map(|t| {
                parse_rational(t.trim()).ok_or_else(|| usage(format!("invalid threshold {t:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    values.sort();
    values.dedup();
    values
        .into_iter()
        .map(|v| ThresholdPercent::new(v).map_err(|e| usage(e.to_string())))
        .collect()
}

/// `path:N`, `ring:N`, `star:N` (node 0 is the hub) or `complete:N`.
pub fn parse_topology_spec(spec: &str) -> Result<Topology, CliError> {
    let usage = || CliError::Usage(format!("invalid topology {spec:?}, expected kind:N"));
    let (kind, n) = spec.split_once(':').ok_or_else(usage)?;
    let n: u32 = n.parse().map_err(|_| usage())?;
    if n == 0 || n > 250 {
        return Err(usage());
    }
    let edges: Vec<(u32, u32)> = match kind {
        "path" => (1..n).map(|i| (i - 1, i)).collect(),
        "ring" if n >= 3 => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        "star" => (1..n).map(|i| (0, i)).collect(),
        "complete" => (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect(),
        _ => return Err(usage()),
    };
    let nodes = (0..n).map(|i| NodeId::new(i, Ipv4Addr::new(10, 0, 0, i as u8 + 1)));
    Topology::new(nodes, edges).map_err(|e| CliError::Usage(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(spec: &str) -> Vec<Rational> {
        parse_threshold_spec(spec)
            .unwrap()
            .into_iter()
            .map(|t| *t.value())
            .collect()
    }

    #[test]
    fn threshold_specs() {
        let r = |n| Rational::from_integer(n);
        assert_eq!(values("75"), vec![r(75)]);
        assert_eq!(values("0..100:25"), vec![r(0), r(25), r(50), r(75), r(100)]);
        assert_eq!(values("50,0,50"), vec![r(0), r(50)]);
        assert_eq!(values("90..100").len(), 2);
        assert_eq!(values("0..10:3").last(), Some(&r(9)));
        for bad in [
            "",
            "abc",
            "0..100:0",
            "50..10:5",
            "0..200:50",
            "-5",
            "x..10",
        ] {
            assert!(
                matches!(parse_threshold_spec(bad), Err(CliError::Usage(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn topology_specs() {
        assert_eq!(parse_topology_spec("path:2").unwrap().edge_count(), 1);
        assert_eq!(parse_topology_spec("ring:5").unwrap().edge_count(), 5);
        assert_eq!(parse_topology_spec("star:5").unwrap().edge_count(), 4);
        assert_eq!(parse_topology_spec("complete:4").unwrap().edge_count(), 6);
        for bad in ["ring:2", "blob:3", "path", "path:0", "path:x"] {
            assert!(parse_topology_spec(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            ExitStatus::Success,
            ExitStatus::Usage,
            ExitStatus::ScenarioError,
            ExitStatus::Undiagnosable,
            ExitStatus::InvariantViolation,
            ExitStatus::Mismatch,
        ]
        .map(ExitStatus::code);
        let unique: BTreeSet<i32> = codes.iter().copied().collect();
        assert_eq!(unique.len(), codes.len());
        assert_eq!(
            CliError::Undiagnosable.exit_status(),
            ExitStatus::Undiagnosable
        );
    }
}
