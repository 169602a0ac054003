//! Report rendering: a human table and a versioned, line-oriented machine
//! format that can be parsed back into a [`DiagnosisReport`].
//!
//! Machine records are tab separated, one per line. FCF payloads are
//! embedded verbatim in their JSON wire encoding.

use std::fmt::Write as _;
use std::net::Ipv4Addr;

use fdda_core::scalar::{format_fixed, format_significant};
use fdda_core::sim::{
    format_address_list, Ballot, CycleMode, MessageEvent, MessageKind, SweepReport,
};
use fdda_core::{decode_fcf, encode_fcf, Accuracy, DiagnosisReport, NodeId, ThresholdPercent};

use crate::scenario_file::{format_threshold, parse_rational};

pub const REPORT_HEADER: &str = "#fdda-report\tv1";
pub const SWEEP_HEADER: &str = "#fdda-sweep\tv1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Machine,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("machine report line {line}: {message}")]
pub struct ReportParseError {
    pub line: usize,
    pub message: String,
}

pub fn render_report(report: &DiagnosisReport, format: Format) -> String {
    match format {
        Format::Table => render_report_table(report),
        Format::Machine => render_report_machine(report),
    }
}

fn certified_list(report: &DiagnosisReport) -> String {
    let addrs: Vec<Ipv4Addr> = report.certified.iter().map(|n| n.address).collect();
    format_address_list(&addrs)
}

fn render_report_table(report: &DiagnosisReport) -> String {
    let mut out = String::new();
    let mode = match report.mode {
        CycleMode::Protocol => "protocol",
        CycleMode::Synthetic => "synthetic votes",
    };
    writeln!(out, "mode: {mode}").unwrap();
    writeln!(out, "threshold: {}%", format_threshold(&report.threshold)).unwrap();
    if !report.initiator_sequence.is_empty() {
        let seq: Vec<String> = report
            .initiator_sequence
            .iter()
            .map(|n| n.address.to_string())
            .collect();
        writeln!(out, "initiator sequence: {}", seq.join(" -> ")).unwrap();
        out.push('\n');
        for (node, fcf) in report.initiator_sequence.iter().zip(&report.fcf_snapshots) {
            writeln!(out, "FCF after {}: {}", node.address, encode_fcf(fcf)).unwrap();
        }
    }
    writeln!(out, "final FCF: {}", encode_fcf(&report.final_fcf)).unwrap();
    if let Some(q) = report.qualifier {
        writeln!(out, "qualified by: {}", q.address).unwrap();
    }
    out.push('\n');
    writeln!(
        out,
        "{:<16} {:>5} {:>5} {:>9}",
        "address", "votes", "reach", "accuracy"
    )
    .unwrap();
    for (node, acc) in &report.accuracies {
        writeln!(
            out,
            "{:<16} {:>5} {:>5} {:>9}",
            node.address.to_string(),
            acc.votes,
            acc.reachability,
            format_fixed(&acc.value, 2)
        )
        .unwrap();
    }
    out.push('\n');
    if report.certified.is_empty() {
        out.push_str("certified: (none)\n");
    } else {
        writeln!(out, "certified: {}", certified_list(report)).unwrap();
    }
    out
}

fn render_report_machine(report: &DiagnosisReport) -> String {
    let mut out = String::new();
    let mut line = |fields: &[&str]| {
        out.push_str(&fields.join("\t"));
        out.push('\n');
    };
    line(&[REPORT_HEADER]);
    line(&[
        "mode",
        match report.mode {
            CycleMode::Protocol => "protocol",
            CycleMode::Synthetic => "synthetic",
        },
    ]);
    line(&["threshold", &format_threshold(&report.threshold)]);
    for n in &report.nodes {
        line(&["node", &n.index.to_string(), &n.address.to_string()]);
    }
    for (n, fcf) in report.initiator_sequence.iter().zip(&report.fcf_snapshots) {
        line(&["snapshot", &n.address.to_string(), &encode_fcf(fcf)]);
    }
    line(&["final", &encode_fcf(&report.final_fcf)]);
    let qualifier = report
        .qualifier
        .map(|q| q.address.to_string())
        .unwrap_or_else(|| "-".into());
    line(&["qualifier", &qualifier]);
    for b in &report.ballots {
        line(&[
            "ballot",
            &b.suspect.address.to_string(),
            &b.voter.address.to_string(),
        ]);
    }
    for (n, acc) in &report.accuracies {
        line(&[
            "accuracy",
            &n.address.to_string(),
            &acc.votes.to_string(),
            &acc.reachability.to_string(),
            &format_significant(&acc.value),
        ]);
    }
    line(&["certified", &certified_list(report)]);
    for n in &report.barred {
        line(&["barred", &n.address.to_string()]);
    }
    for e in &report.trace {
        line(&[
            "event",
            e.kind.as_str(),
            &e.sender.address.to_string(),
            &e.receiver.address.to_string(),
            if e.delivered { "delivered" } else { "dropped" },
            &e.payload,
        ]);
    }
    out
}

/// Parses [`Format::Machine`] output back into the report it came from.
pub fn parse_machine_report(text: &str) -> Result<DiagnosisReport, ReportParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let fail = |line: usize, message: String| ReportParseError { line, message };
    match lines.next() {
        Some((_, REPORT_HEADER)) => {}
        _ => return Err(fail(1, "missing report header".into())),
    }

    let mut mode = None;
    let mut threshold = None;
    let mut nodes: Vec<NodeId> = Vec::new();
    let mut initiator_sequence = Vec::new();
    let mut fcf_snapshots = Vec::new();
    let mut final_fcf = None;
    let mut qualifier = None;
    let mut ballots = Vec::new();
    let mut accuracies = Vec::new();
    let mut certified = None;
    let mut barred = Vec::new();
    let mut trace = Vec::new();

    for (no, raw) in lines {
        let (tag, rest) = raw.split_once('\t').unwrap_or((raw, ""));
        let lookup = |text: &str| -> Result<NodeId, ReportParseError> {
            let addr: Ipv4Addr = text
                .parse()
                .map_err(|_| fail(no, format!("bad address {text:?}")))?;
            nodes
                .iter()
                .copied()
                .find(|n| n.address == addr)
                .ok_or_else(|| fail(no, format!("undeclared node {addr}")))
        };
        let fields = |n: usize| -> Result<Vec<&str>, ReportParseError> {
            let f: Vec<&str> = rest.splitn(n, '\t').collect();
            if f.len() == n {
                Ok(f)
            } else {
                Err(fail(no, format!("{tag} record needs {n} fields")))
            }
        };
        match tag {
            "mode" => {
                mode = Some(match rest {
                    "protocol" => CycleMode::Protocol,
                    "synthetic" => CycleMode::Synthetic,
                    other => return Err(fail(no, format!("unknown mode {other:?}"))),
                })
            }
            "threshold" => {
                let value = parse_rational(rest).ok_or_else(|| fail(no, "bad threshold".into()))?;
                threshold =
                    Some(ThresholdPercent::new(value).map_err(|e| fail(no, e.to_string()))?);
            }
            "node" => {
                let f = fields(2)?;
                let index = f[0]
                    .parse()
                    .map_err(|_| fail(no, "bad node index".into()))?;
                let address = f[1]
                    .parse()
                    .map_err(|_| fail(no, "bad node address".into()))?;
                nodes.push(NodeId::new(index, address));
            }
            "snapshot" => {
                let f = fields(2)?;
                initiator_sequence.push(lookup(f[0])?);
                fcf_snapshots.push(decode_fcf(f[1]).map_err(|e| fail(no, e.to_string()))?);
            }
            "final" => final_fcf = Some(decode_fcf(rest).map_err(|e| fail(no, e.to_string()))?),
            "qualifier" => {
                qualifier = Some(if rest == "-" {
                    None
                } else {
                    Some(lookup(rest)?)
                });
            }
            "ballot" => {
                let f = fields(2)?;
                ballots.push(Ballot {
                    suspect: lookup(f[0])?,
                    voter: lookup(f[1])?,
                });
            }
            "accuracy" => {
                let f = fields(4)?;
                let node = lookup(f[0])?;
                let votes = f[1]
                    .parse()
                    .map_err(|_| fail(no, "bad vote count".into()))?;
                let reach = f[2]
                    .parse()
                    .map_err(|_| fail(no, "bad reachability".into()))?;
                let acc = Accuracy::from_counts(votes, reach)
                    .ok_or_else(|| fail(no, "zero reachability".into()))?;
                if format_significant(&acc.value) != f[3] {
                    return Err(fail(
                        no,
                        format!("percent {} disagrees with {votes}/{reach}", f[3]),
                    ));
                }
                accuracies.push((node, acc));
            }
            "certified" => {
                let inner = rest
                    .strip_prefix('[')
                    .and_then(|r| r.strip_suffix(']'))
                    .ok_or_else(|| fail(no, "certified list must be bracketed".into()))?;
                let mut list = Vec::new();
                for item in inner.split(", ").filter(|s| !s.is_empty()) {
                    let addr = item
                        .strip_prefix('\'')
                        .and_then(|s| s.strip_suffix('\''))
                        .ok_or_else(|| fail(no, format!("unquoted entry {item:?}")))?;
                    list.push(lookup(addr)?);
                }
                certified = Some(list);
            }
            "barred" => barred.push(lookup(rest)?),
            "event" => {
                let f = fields(5)?;
                let kind: MessageKind = f[0].parse().map_err(|e: String| fail(no, e))?;
                let delivered = match f[3] {
                    "delivered" => true,
                    "dropped" => false,
                    other => return Err(fail(no, format!("bad delivery flag {other:?}"))),
                };
                trace.push(MessageEvent {
                    sender: lookup(f[1])?,
                    receiver: lookup(f[2])?,
                    kind,
                    payload: f[4].to_string(),
                    delivered,
                });
            }
            "" => {}
            other => return Err(fail(no, format!("unknown record {other:?}"))),
        }
    }

    let missing = |what: &str| fail(0, format!("missing {what} record"));
    Ok(DiagnosisReport {
        mode: mode.ok_or_else(|| missing("mode"))?,
        nodes,
        threshold: threshold.ok_or_else(|| missing("threshold"))?,
        initiator_sequence,
        fcf_snapshots,
        final_fcf: final_fcf.ok_or_else(|| missing("final"))?,
        qualifier: qualifier.ok_or_else(|| missing("qualifier"))?,
        ballots,
        accuracies,
        certified: certified.ok_or_else(|| missing("certified"))?,
        barred,
        trace,
    })
}

pub fn render_sweep(sweep: &SweepReport, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Table => {
            writeln!(out, "final FCF: {}", encode_fcf(&sweep.final_fcf)).unwrap();
            out.push('\n');
            writeln!(out, "{:>10} {:>9}", "threshold", "certified").unwrap();
            for (t, nodes) in &sweep.points {
                writeln!(out, "{:>10} {:>9}", format_threshold(t), nodes.len()).unwrap();
            }
        }
        Format::Machine => {
            writeln!(out, "{SWEEP_HEADER}").unwrap();
            writeln!(out, "final\t{}", encode_fcf(&sweep.final_fcf)).unwrap();
            for (n, acc) in &sweep.accuracies {
                writeln!(
                    out,
                    "suspect\t{}\t{}\t{}\t{}",
                    n.address,
                    acc.votes,
                    acc.reachability,
                    format_significant(&acc.value)
                )
                .unwrap();
            }
            for (t, nodes) in &sweep.points {
                let addrs: Vec<Ipv4Addr> = nodes.iter().map(|n| n.address).collect();
                writeln!(
                    out,
                    "point\t{}\t{}\t{}",
                    format_threshold(t),
                    nodes.len(),
                    format_address_list(&addrs)
                )
                .unwrap();
            }
        }
    }
    out
}
