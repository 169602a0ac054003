//! TOML scenario files.
//!
//! ```toml
//! threshold = 75
//! priority_override = [6]
//! nodes = [{ index = 1, address = "172.16.30.103" }, ...]
//! edges = [[1, 2], [1, 3], ...]
//! faults = [{ node = 2, mode = "fail_reporting" }]
//! drops = [{ from = 6, to = 5 }]
//! # synthetic mode: votes injected directly instead of running the protocol
//! synthetic = [{ node = 7, votes = 2 }]
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use fdda_core::scalar::{exact_decimal, parse_decimal};
use fdda_core::{
    FaultMode, NodeId, Rational, Scenario, Threshold, ThresholdPercent, Topology, TopologyError,
};
use serde::Deserialize;
use toml::Spanned;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioFileError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    At { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    threshold: Option<Spanned<Number>>,
    priority_override: Option<Spanned<Vec<u32>>>,
    nodes: Vec<Spanned<NodeEntry>>,
    #[serde(default)]
    edges: Vec<Spanned<[u32; 2]>>,
    #[serde(default)]
    faults: Vec<Spanned<FaultEntry>>,
    #[serde(default)]
    drops: Vec<Spanned<DropEntry>>,
    synthetic: Option<Vec<Spanned<SyntheticEntry>>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeEntry {
    index: u32,
    address: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FaultEntry {
    node: u32,
    mode: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DropEntry {
    from: u32,
    to: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SyntheticEntry {
    node: u32,
    votes: u32,
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioFileError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioFileError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioFileError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(1);
        ScenarioFileError::At {
            line,
            message: e.message().to_string(),
        }
    })?;
    let at = |start: usize, message: String| ScenarioFileError::At {
        line: line_of(text, start),
        message,
    };

    let mut nodes = Vec::with_capacity(file.nodes.len());
    for entry in &file.nodes {
        let address = entry.get_ref().address.parse().map_err(|_| {
            at(
                entry.span().start,
                format!("invalid address {:?}", entry.get_ref().address),
            )
        })?;
        nodes.push(NodeId::new(entry.get_ref().index, address));
    }
    let topology = Topology::new(
        nodes,
        file.edges.iter().map(|e| (e.get_ref()[0], e.get_ref()[1])),
    )
    .map_err(|e| at(topology_error_offset(&file, &e), e.to_string()))?;
    let mut scenario =
        Scenario::new(topology).map_err(|e| ScenarioFileError::Invalid(e.to_string()))?;

    if let Some(t) = &file.threshold {
        let value = match t.get_ref() {
            Number::Int(i) => Ok(Rational::from_integer(*i)),
            Number::Float(f) => parse_decimal(&f.to_string()),
            Number::Text(s) => parse_decimal(s),
        }
        .map_err(|e| at(t.span().start, e.to_string()))?;
        let threshold =
            ThresholdPercent::new(value).map_err(|e| at(t.span().start, e.to_string()))?;
        scenario = scenario.with_threshold(threshold);
    }
    for f in &file.faults {
        let entry = f.get_ref();
        let mode: FaultMode = entry
            .mode
            .parse()
            .map_err(|e: String| at(f.span().start, e))?;
        scenario = scenario
            .with_fault(entry.node, mode)
            .map_err(|e| at(f.span().start, e.to_string()))?;
    }
    for d in &file.drops {
        let entry = d.get_ref();
        scenario = scenario
            .with_drop(entry.from, entry.to)
            .map_err(|e| at(d.span().start, e.to_string()))?;
    }
    if let Some(p) = &file.priority_override {
        scenario = scenario
            .with_priority_override(p.get_ref().clone())
            .map_err(|e| at(p.span().start, e.to_string()))?;
    }
    if let Some(entries) = &file.synthetic {
        let mut votes = BTreeMap::new();
        for s in entries {
            let entry = s.get_ref();
            if votes.insert(entry.node, entry.votes).is_some() {
                return Err(at(
                    s.span().start,
                    format!("node {} listed twice", entry.node),
                ));
            }
        }
        let start = entries.first().map(|s| s.span().start).unwrap_or(0);
        scenario = scenario
            .with_synthetic_votes(votes)
            .map_err(|e| at(start, e.to_string()))?;
    }
    Ok(scenario)
}

fn topology_error_offset(file: &ScenarioFile, err: &TopologyError) -> usize {
    let node = |pred: &dyn Fn(&NodeEntry) -> bool| {
        file.nodes
            .iter()
            .rev()
            .find(|n| pred(n.get_ref()))
            .map(|n| n.span().start)
    };
    let edge = |a: u32, b: u32| {
        file.edges
            .iter()
            .rev()
            .find(|e| {
                let [x, y] = *e.get_ref();
                (x, y) == (a, b) || (y, x) == (a, b) || (x == a && a == b)
            })
            .map(|e| e.span().start)
    };
    match err {
        TopologyError::DuplicateIndex(i) => node(&|n| n.index == *i),
        TopologyError::DuplicateAddress(a) => node(&|n| n.address == a.to_string()),
        TopologyError::SelfLoop(i) => edge(*i, *i),
        TopologyError::DuplicateEdge(a, b) | TopologyError::UnknownEndpoint(a, b) => edge(*a, *b),
        _ => None,
    }
    .unwrap_or(0)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())]
        .bytes()
        .filter(|&b| b == b'\n')
        .count()
        + 1
}

pub fn format_threshold(threshold: &Threshold) -> String {
    format_rational(threshold.value())
}

/// Exact decimal when the value terminates, `n/d` otherwise.
pub fn format_rational(value: &Rational) -> String {
    exact_decimal(value).unwrap_or_else(|| format!("{}/{}", value.numer(), value.denom()))
}

pub fn parse_rational(text: &str) -> Option<Rational> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            (d != 0).then(|| Rational::new(n, d))
        }
        None => parse_decimal(text).ok(),
    }
}

/// Serialises a scenario back to file form, e.g. to replay a counterexample.
pub fn render_scenario(scenario: &Scenario) -> String {
    let mut out = String::new();
    let t = scenario.threshold().value();
    match exact_decimal(t) {
        Some(d) => writeln!(out, "threshold = {d}"),
        None => writeln!(out, "threshold = \"{}\"", format_rational(t)),
    }
    .unwrap();
    if let Some(p) = scenario.priority_override() {
        writeln!(out, "priority_override = {p:?}").unwrap();
    }
    out.push_str("nodes = [\n");
    for n in scenario.topology().nodes() {
        writeln!(
            out,
            "  {{ index = {}, address = \"{}\" }},",
            n.index, n.address
        )
        .unwrap();
    }
    out.push_str("]\nedges = [");
    let edges: Vec<String> = scenario
        .topology()
        .edges()
        .map(|(a, b)| format!("[{a}, {b}]"))
        .collect();
    out.push_str(&edges.join(", "));
    out.push_str("]\n");
    if !scenario.faults().is_empty() {
        out.push_str("faults = [\n");
        for (node, mode) in scenario.faults() {
            writeln!(out, "  {{ node = {node}, mode = \"{mode}\" }},").unwrap();
        }
        out.push_str("]\n");
    }
    if !scenario.drops().is_empty() {
        out.push_str("drops = [\n");
        for d in scenario.drops() {
            writeln!(out, "  {{ from = {}, to = {} }},", d.from, d.to).unwrap();
        }
        out.push_str("]\n");
    }
    if let Some(votes) = scenario.synthetic_votes() {
        out.push_str("synthetic = [\n");
        for (node, v) in votes {
            writeln!(out, "  {{ node = {node}, votes = {v} }},").unwrap();
        }
        out.push_str("]\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAIR: &str = r#"
threshold = 50.5
nodes = [{ index = 0, address = "10.0.0.1" }, { index = 1, address = "10.0.0.2" }]
edges = [[0, 1]]
faults = [{ node = 1, mode = "fail_silent" }]
drops = [{ from = 0, to = 1 }]
"#;

    #[test]
    fn parses_minimal_file() {
        let s = parse_scenario(PAIR).unwrap();
        assert_eq!(*s.threshold().value(), Rational::new(101, 2));
        assert_eq!(s.faults().get(&1), Some(&FaultMode::FailSilent));
        assert_eq!(s.drops().len(), 1);
        assert!(s.synthetic_votes().is_none());
    }

    #[test]
    fn render_round_trips() {
        let s = parse_scenario(PAIR).unwrap();
        assert_eq!(parse_scenario(&render_scenario(&s)).unwrap(), s);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let unknown_key = "nodes = [{ index = 0, address = \"10.0.0.1\" }]\ncolour = 3\n";
        assert!(matches!(
            parse_scenario(unknown_key),
            Err(ScenarioFileError::At { line: 2, .. })
        ));

        let bad_mode = PAIR.replace("fail_silent", "on_fire");
        let err = parse_scenario(&bad_mode).unwrap_err();
        assert!(
            matches!(err, ScenarioFileError::At { line: 5, .. }),
            "{err}"
        );

        let bad_addr = PAIR.replace("10.0.0.2", "10.0.0");
        assert!(matches!(
            parse_scenario(&bad_addr),
            Err(ScenarioFileError::At { line: 3, .. })
        ));

        let bad_threshold = PAIR.replace("50.5", "101");
        assert!(matches!(
            parse_scenario(&bad_threshold),
            Err(ScenarioFileError::At { line: 2, .. })
        ));

        assert!(matches!(
            parse_scenario("nodes = [\n"),
            Err(ScenarioFileError::At { .. })
        ));

        let dup_edge = PAIR.replace("edges = [[0, 1]]", "edges = [\n[0, 1],\n[1, 0]]");
        assert!(matches!(
            parse_scenario(&dup_edge),
            Err(ScenarioFileError::At { line: 6, .. })
        ));
    }

    #[test]
    fn rejects_disconnected_topology() {
        let text =
            r#"nodes = [{ index = 0, address = "10.0.0.1" }, { index = 1, address = "10.0.0.2" }]"#;
        assert!(matches!(
            parse_scenario(text),
            Err(ScenarioFileError::Invalid(_))
        ));
    }

    #[test]
    fn rational_text() {
        assert_eq!(parse_rational("1/3"), Some(Rational::new(1, 3)));
        assert_eq!(parse_rational("66.67"), Some(Rational::new(6667, 100)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(format_rational(&Rational::new(1, 3)), "1/3");
        assert_eq!(format_rational(&Rational::from_integer(75)), "75");
    }
}
