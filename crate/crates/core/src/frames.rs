//! Protocol messages: status frames and the fault count frame (FCF).
//!
//! Wire formats:
//! - status frame: one ASCII line `<dotted-quad>,<0|1>`, batched frames are
//!   newline separated;
//! - FCF: a JSON array of `{"vote": n, "ip": "..", "from_ip": "..", "rch": ".."}`
//!   objects printed with `", "` / `": "` separators and `rch` quoted.

use std::fmt::{self, Write as _};
use std::net::Ipv4Addr;

use serde::Deserialize;

use crate::topology::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("malformed status frame on line {line}: {text:?}")]
    MalformedStatus { line: usize, text: String },
    #[error("malformed fault count frame: {0}")]
    MalformedFcf(String),
    #[error("duplicate FCF entry for {0}")]
    DuplicateEntry(Ipv4Addr),
    #[error("vote count {vote} for {address} exceeds its reachability {reachability}")]
    VoteExceedsReachability {
        address: Ipv4Addr,
        vote: u32,
        reachability: u32,
    },
    #[error("FCF entry for {0} has zero votes")]
    ZeroVote(Ipv4Addr),
    #[error("FCF entry for {0} has zero reachability")]
    ZeroReachability(Ipv4Addr),
    #[error("node {0} cannot vote for itself")]
    SelfVote(Ipv4Addr),
    #[error("reachability mismatch for {address}: entry has {recorded}, vote claims {claimed}")]
    ReachabilityMismatch {
        address: Ipv4Addr,
        recorded: u32,
        claimed: u32,
    },
}

/// Self-reported fault status: `0` fault-free, `1` faulty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StatusBit {
    FaultFree,
    Faulty,
}

impl StatusBit {
    pub fn as_u8(self) -> u8 {
        match self {
            StatusBit::FaultFree => 0,
            StatusBit::Faulty => 1,
        }
    }

    pub fn from_u8(value: u8) -> Option<Self> {
        match value {
            0 => Some(StatusBit::FaultFree),
            1 => Some(StatusBit::Faulty),
            _ => None,
        }
    }

    pub fn is_faulty(self) -> bool {
        self == StatusBit::Faulty
    }
}

impl fmt::Display for StatusBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StatusFrame {
    pub address: Ipv4Addr,
    pub status: StatusBit,
}

impl StatusFrame {
    pub fn new(address: Ipv4Addr, status: StatusBit) -> Self {
        Self { address, status }
    }
}

pub fn encode_status_frame(frame: &StatusFrame) -> String {
    format!("{},{}", frame.address, frame.status)
}

pub fn decode_status_frame(line: &str) -> Result<StatusFrame, FrameError> {
    decode_status_line(line, 1)
}

fn decode_status_line(line: &str, line_no: usize) -> Result<StatusFrame, FrameError> {
    let malformed = || FrameError::MalformedStatus {
        line: line_no,
        text: line.to_string(),
    };
    let (addr, bit) = line.trim().split_once(',').ok_or_else(malformed)?;
    let address: Ipv4Addr = addr.parse().map_err(|_| malformed())?;
    let status = match bit {
        "0" => StatusBit::FaultFree,
        "1" => StatusBit::Faulty,
        _ => return Err(malformed()),
    };
    Ok(StatusFrame { address, status })
}

/// One frame per line, newline separated, no trailing newline.
pub fn encode_status_frames(frames: &[StatusFrame]) -> String {
    frames
        .iter()
        .map(encode_status_frame)
        .collect::<Vec<_>>()
        .join("\n")
}

/// Inverse of [`encode_status_frames`]; blank lines are skipped.
pub fn decode_status_frames(text: &str) -> Result<Vec<StatusFrame>, FrameError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| decode_status_line(l, i + 1))
        .collect()
}

/// A node's view of its neighbours after status acquisition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalStatusTable {
    pub owner: NodeId,
    pub rows: Vec<StatusFrame>,
}

impl LocalStatusTable {
    pub fn faulty_neighbors(&self) -> impl Iterator<Item = Ipv4Addr> + '_ {
        self.rows
            .iter()
            .filter(|r| r.status.is_faulty())
            .map(|r| r.address)
    }

    pub fn encode(&self) -> String {
        encode_status_frames(&self.rows)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FcfEntry {
    pub vote: u32,
    pub faulty_address: Ipv4Addr,
    pub first_voter_address: Ipv4Addr,
    pub reachability: u32,
}

impl FcfEntry {
    fn validate(&self) -> Result<(), FrameError> {
        if self.reachability == 0 {
            return Err(FrameError::ZeroReachability(self.faulty_address));
        }
        if self.vote == 0 {
            return Err(FrameError::ZeroVote(self.faulty_address));
        }
        if self.vote > self.reachability {
            return Err(FrameError::VoteExceedsReachability {
                address: self.faulty_address,
                vote: self.vote,
                reachability: self.reachability,
            });
        }
        Ok(())
    }
}

/// Suspects in the order they were first reported.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaultCountFrame {
    entries: Vec<FcfEntry>,
}

impl FaultCountFrame {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a frame from entries, re-checking every invariant.
    pub fn from_entries(entries: Vec<FcfEntry>) -> Result<Self, FrameError> {
        for (i, entry) in entries.iter().enumerate() {
            entry.validate()?;
            if entries[..i]
                .iter()
                .any(|e| e.faulty_address == entry.faulty_address)
            {
                return Err(FrameError::DuplicateEntry(entry.faulty_address));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[FcfEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, faulty: Ipv4Addr) -> Option<&FcfEntry> {
        self.entries.iter().find(|e| e.faulty_address == faulty)
    }

    pub fn total_votes(&self) -> u64 {
        self.entries.iter().map(|e| u64::from(e.vote)).sum()
    }

    /// Adds one vote against `faulty`. A first vote appends a new entry with
    /// `voter` as the recorded voter; later votes only bump the count.
    pub fn record_vote(
        &mut self,
        faulty: Ipv4Addr,
        voter: Ipv4Addr,
        reachability_of_faulty: u32,
    ) -> Result<(), FrameError> {
        if voter == faulty {
            return Err(FrameError::SelfVote(voter));
        }
        if reachability_of_faulty == 0 {
            return Err(FrameError::ZeroReachability(faulty));
        }
        match self.entries.iter_mut().find(|e| e.faulty_address == faulty) {
            Some(entry) => {
                if entry.reachability != reachability_of_faulty {
                    return Err(FrameError::ReachabilityMismatch {
                        address: faulty,
                        recorded: entry.reachability,
                        claimed: reachability_of_faulty,
                    });
                }
                if entry.vote >= entry.reachability {
                    return Err(FrameError::VoteExceedsReachability {
                        address: faulty,
                        vote: entry.vote + 1,
                        reachability: entry.reachability,
                    });
                }
                entry.vote += 1;
            }
            None => self.entries.push(FcfEntry {
                vote: 1,
                faulty_address: faulty,
                first_voter_address: voter,
                reachability: reachability_of_faulty,
            }),
        }
        Ok(())
    }
}

/// Functional form of [`FaultCountFrame::record_vote`].
pub fn record_vote(
    fcf: &FaultCountFrame,
    faulty: Ipv4Addr,
    voter: Ipv4Addr,
    reachability_of_faulty: u32,
) -> Result<FaultCountFrame, FrameError> {
    let mut next = fcf.clone();
    next.record_vote(faulty, voter, reachability_of_faulty)?;
    Ok(next)
}

pub fn encode_fcf(fcf: &FaultCountFrame) -> String {
    let mut out = String::from("[");
    for (i, e) in fcf.entries.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write!(
            out,
            r#"{{"vote": {}, "ip": "{}", "from_ip": "{}", "rch": "{}"}}"#,
            e.vote, e.faulty_address, e.first_voter_address, e.reachability
        )
        .expect("writing to a String");
    }
    out.push(']');
    out
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Reach {
    Text(String),
    Number(u32),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireEntry {
    vote: u32,
    ip: String,
    from_ip: String,
    rch: Reach,
}

pub fn decode_fcf(text: &str) -> Result<FaultCountFrame, FrameError> {
    let malformed = |msg: String| FrameError::MalformedFcf(msg);
    let wire: Vec<WireEntry> =
        serde_json::from_str(text.trim()).map_err(|e| malformed(e.to_string()))?;
    let entries = wire
        .into_iter()
        .map(|w| {
            let reachability = match w.rch {
                Reach::Number(n) => n,
                Reach::Text(s) => s
                    .trim()
                    .parse()
                    .map_err(|_| malformed(format!("bad rch value {s:?}")))?,
            };
            Ok(FcfEntry {
                vote: w.vote,
                faulty_address: w
                    .ip
                    .parse()
                    .map_err(|_| malformed(format!("bad ip {:?}", w.ip)))?,
                first_voter_address: w
                    .from_ip
                    .parse()
                    .map_err(|_| malformed(format!("bad from_ip {:?}", w.from_ip)))?,
                reachability,
            })
        })
        .collect::<Result<Vec<_>, FrameError>>()?;
    FaultCountFrame::from_entries(entries)
}
