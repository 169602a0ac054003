mod common;

use std::collections::BTreeMap;

use common::fig1;
use fdda_core::scalar::{format_fixed, parse_decimal};
use fdda_core::sim::{
    check_against_oracle, enumerate_fault_subsets, random_scenario, CycleOptions, FaultMode,
};
use fdda_core::{
    compute_reachability, decode_fcf, encode_fcf, initiator_order, run_cycle, sweep_scenario,
    threshold_sweep, FaultCountFrame, NodeId, Rational, Scenario, Threshold, ThresholdPercent,
    Topology,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn exhaustive_equivalence_on_reference_network() {
    for mode in [FaultMode::FailSilent, FaultMode::FailReporting] {
        let results = enumerate_fault_subsets(&fig1(), &Threshold::default(), mode).unwrap();
        assert_eq!(results.len(), 127);
        assert!(results[0].faults.is_empty() && results[0].run_certified.is_empty());
        for r in &results {
            assert!(r.matches(), "{mode}: {r:?}");
            assert!(r.votes_bounded);
            if r.faults.len() == 1 {
                assert_eq!(r.run_certified, r.faults);
            }
        }
    }
}

#[test]
fn random_graph_equivalence_with_drops() {
    for seed in 0..200u64 {
        let mode = if seed % 2 == 0 {
            FaultMode::FailSilent
        } else {
            FaultMode::FailReporting
        };
        let mut scenario = random_scenario(seed, 4, 10, mode);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfdda);
        let arcs: Vec<(u32, u32)> = scenario.topology().edges().collect();
        for (a, b) in arcs {
            if rng.gen_bool(0.15) {
                let (from, to) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
                scenario = scenario.with_drop(from, to).unwrap();
            }
        }
        let pct: u32 = rng.gen_range(0..=100);
        let scenario = scenario
            .with_threshold(ThresholdPercent::new(Rational::from_integer(pct.into())).unwrap());
        let (run, oracle, bounded) =
            check_against_oracle(&scenario, CycleOptions::default()).unwrap();
        assert_eq!(run, oracle, "seed {seed}");
        assert!(bounded, "seed {seed}");
    }
}

/// Vote/reachability pairs of the reference accuracy table, N1..N7.
const TABLE3: [(u32, u32, u32); 7] = [
    (1, 1, 3),
    (2, 1, 2),
    (3, 1, 2),
    (4, 1, 2),
    (5, 0, 2),
    (6, 2, 3),
    (7, 2, 2),
];

fn table3_scenario() -> Scenario {
    let votes: BTreeMap<u32, u32> = TABLE3.iter().map(|(n, v, _)| (*n, *v)).collect();
    Scenario::new(fig1())
        .unwrap()
        .with_synthetic_votes(votes)
        .unwrap()
}

#[test]
fn table3_accuracies() {
    let r = run_cycle(&table3_scenario())
        .unwrap()
        .into_report()
        .unwrap();
    let expected = [
        (1, "33.33"),
        (2, "50.00"),
        (3, "50.00"),
        (4, "50.00"),
        (6, "66.67"),
        (7, "100.00"),
    ];
    assert_eq!(r.accuracies.len(), expected.len());
    for ((node, acc), (index, shown)) in r.accuracies.iter().zip(expected) {
        assert_eq!(node.index, index);
        let (_, v, reach) = TABLE3[index as usize - 1];
        assert_eq!(reach, acc.reachability);
        assert_eq!(
            acc.value,
            Rational::new(100 * i64::from(v), i64::from(reach))
        );
        assert_eq!(format_fixed(&acc.value, 2), shown);
    }
    assert_eq!(
        r.certified_indices().into_iter().collect::<Vec<_>>(),
        vec![7]
    );
}

#[test]
fn table3_sweep_counts() {
    let thresholds = ["0", "33.33", "50", "66.67", "75", "100"];
    // integer cross-multiplication on hundredths of a percent
    let oracle: Vec<usize> = thresholds
        .iter()
        .map(|t| {
            let hundredths = (parse_decimal(t).unwrap() * Rational::from_integer(100)).to_integer();
            TABLE3
                .iter()
                .filter(|(_, v, r)| {
                    *v > 0 && i64::from(v * 100 * 100) >= hundredths * i64::from(*r)
                })
                .count()
        })
        .collect();
    assert_eq!(oracle, vec![6, 6, 5, 1, 1, 1]);

    let parsed: Vec<Threshold> = thresholds
        .iter()
        .map(|t| ThresholdPercent::new(parse_decimal(t).unwrap()).unwrap())
        .collect();
    let sweep = sweep_scenario(&table3_scenario(), &parsed).unwrap();
    let counts: Vec<usize> = sweep.points.iter().map(|(_, c)| c.len()).collect();
    assert_eq!(counts, oracle);
}

#[test]
fn golden_sweep_at_full_threshold() {
    let t100 = ThresholdPercent::new(Rational::from_integer(100)).unwrap();
    let sweep = sweep_scenario(&common::golden(), &[Threshold::default(), t100]).unwrap();
    assert_eq!(sweep.points[0].1.len(), 2);
    assert_eq!(sweep.points[1].1.len(), 2);
}

fn arb_fcf() -> impl Strategy<Value = FaultCountFrame> {
    prop::collection::vec((1u32..=12, 0u32..=12), 0..10).prop_map(|pairs| {
        let mut fcf = FaultCountFrame::new();
        for (i, (reach, votes)) in pairs.into_iter().enumerate() {
            let suspect = std::net::Ipv4Addr::new(10, 9, 0, i as u8 + 1);
            for v in 0..votes.min(reach) {
                let voter = std::net::Ipv4Addr::new(10, 8, i as u8, v as u8 + 1);
                fcf.record_vote(suspect, voter, reach).unwrap();
            }
        }
        fcf
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sweep_is_monotone(fcf in arb_fcf(), mut ts in prop::collection::vec(0u32..=10_000, 1..12)) {
        ts.sort_unstable();
        let thresholds: Vec<Threshold> = ts
            .iter()
            .map(|t| ThresholdPercent::new(Rational::new(i64::from(*t), 100)).unwrap())
            .collect();
        let points = threshold_sweep(&fcf, &thresholds).unwrap();
        for w in points.windows(2) {
            prop_assert!(w[1].count() <= w[0].count());
            prop_assert!(w[1].certified.iter().all(|a| w[0].certified.contains(a)));
        }
    }
}

proptest! {
    #[test]
    fn fcf_text_round_trip(fcf in arb_fcf()) {
        prop_assert_eq!(decode_fcf(&encode_fcf(&fcf)).unwrap(), fcf);
    }

    #[test]
    fn record_vote_adds_exactly_one(fcf in arb_fcf(), pick in 0usize..10) {
        let before = fcf.clone();
        let mut after = fcf.clone();
        let target = before.entries().get(pick % before.len().max(1)).cloned();
        let (suspect, reach) = match &target {
            Some(e) => (e.faulty_address, e.reachability),
            None => (std::net::Ipv4Addr::new(10, 7, 0, 1), 3),
        };
        let voter = std::net::Ipv4Addr::new(10, 6, 0, 1);
        match after.record_vote(suspect, voter, reach) {
            Ok(()) => {
                prop_assert_eq!(after.total_votes(), before.total_votes() + 1);
                for e in before.entries() {
                    if e.faulty_address != suspect {
                        prop_assert_eq!(after.entry(e.faulty_address), Some(e));
                    }
                }
                let n = before.len();
                prop_assert_eq!(&after.entries()[..n].iter().map(|e| e.faulty_address).collect::<Vec<_>>(),
                    &before.entries().iter().map(|e| e.faulty_address).collect::<Vec<_>>());
            }
            Err(_) => {
                prop_assert_eq!(target.map(|e| e.vote), Some(reach));
                prop_assert_eq!(after, before);
            }
        }
    }

    #[test]
    fn reachability_ignores_edge_order(seed in any::<u64>(), n in 1u32..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = fdda_core::sim::random_connected_topology(&mut rng, n, 0.3);
        let mut edges: Vec<(u32, u32)> = t.edges().map(|(a, b)| if rng.gen_bool(0.5) { (b, a) } else { (a, b) }).collect();
        edges.reverse();
        let shuffled = Topology::new(t.nodes().to_vec(), edges).unwrap();
        let table = compute_reachability(&t).unwrap();
        prop_assert_eq!(&compute_reachability(&shuffled).unwrap(), &table);

        let sum: u32 = table.entries().iter().map(|(_, r)| r).sum();
        prop_assert_eq!(sum as usize, 2 * t.edge_count());
        let order: Vec<NodeId> = initiator_order(&table);
        let mut sorted = order.clone();
        sorted.sort();
        let mut nodes = t.nodes().to_vec();
        nodes.sort();
        prop_assert_eq!(sorted, nodes);
        let reach: Vec<u32> = order.iter().map(|n| table.reachability(n.index).unwrap()).collect();
        prop_assert!(reach.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn status_frame_round_trip(last in any::<u8>(), faulty in any::<bool>()) {
        use fdda_core::{decode_status_frame, encode_status_frame, StatusBit, StatusFrame};
        let f = StatusFrame::new(std::net::Ipv4Addr::new(172, 16, 30, last),
            if faulty { StatusBit::Faulty } else { StatusBit::FaultFree });
        prop_assert_eq!(decode_status_frame(&encode_status_frame(&f)).unwrap(), f);
    }

    #[test]
    fn neighbor_votes_stay_bounded(seed in any::<u64>()) {
        let s = random_scenario(seed, 2, 9, FaultMode::FailSilent);
        let r = run_cycle(&s).unwrap().into_report().unwrap();
        prop_assert!(fdda_core::sim::votes_within_bounds(&s, &r));
        for b in &r.ballots {
            prop_assert!(s.topology().are_adjacent(b.suspect.index, b.voter.index));
        }
    }
}
