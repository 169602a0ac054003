#![allow(dead_code)]

use std::net::Ipv4Addr;

use fdda_core::sim::FaultMode;
use fdda_core::{NodeId, Scenario, Topology};

pub const ADDRESSES: [u8; 7] = [103, 104, 105, 106, 107, 108, 110];

pub fn ip(last: u8) -> Ipv4Addr {
    Ipv4Addr::new(172, 16, 30, last)
}

/// N1..N7 of the reference network, indices 1..=7.
pub fn fig1() -> Topology {
    Topology::new(
        ADDRESSES
            .iter()
            .enumerate()
            .map(|(i, a)| NodeId::new(i as u32 + 1, ip(*a))),
        [
            (1, 2),
            (1, 3),
            (1, 4),
            (2, 3),
            (4, 6),
            (5, 6),
            (5, 7),
            (6, 7),
        ],
    )
    .unwrap()
}

pub fn golden() -> Scenario {
    Scenario::new(fig1())
        .unwrap()
        .with_faults([(2, FaultMode::FailReporting), (7, FaultMode::FailReporting)])
        .unwrap()
        .with_drop(6, 5)
        .unwrap()
        .with_priority_override(vec![6])
        .unwrap()
}

pub const FIG5: &str =
    r#"[{"vote": 1, "ip": "172.16.30.110", "from_ip": "172.16.30.108", "rch": "2"}]"#;
pub const FIG7: &str = r#"[{"vote": 2, "ip": "172.16.30.110", "from_ip": "172.16.30.108", "rch": "2"}, {"vote": 2, "ip": "172.16.30.104", "from_ip": "172.16.30.103", "rch": "2"}, {"vote": 1, "ip": "172.16.30.108", "from_ip": "172.16.30.107", "rch": "3"}]"#;
