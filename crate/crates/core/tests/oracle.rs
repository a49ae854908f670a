mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use sweeper_core::board::{parse_instance, Site};
use sweeper_core::kset::build_constraints;
use sweeper_core::player::{consistency_check, infer_step, kset_step, PlayConfig, Verdict};

fn quick() -> PlayConfig {
    PlayConfig { extract_cores: false, ..PlayConfig::default() }
}

fn as_set(v: Vec<sweeper_core::player::Inference>) -> BTreeSet<(Site, Verdict)> {
    v.into_iter().map(|i| (i.site, i.verdict)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sat_verdicts_match_enumeration(seed in any::<u64>()) {
        let Some((_, inst)) = common::random_state(seed) else { return Ok(()) };
        prop_assume!(common::constraints(&inst).outer.len() <= 18);
        let expected = common::brute_force_verdicts(&inst).expect("reachable states are consistent");
        prop_assert!(consistency_check(&inst));
        let got = as_set(infer_step(&inst, &quick()).unwrap());
        prop_assert_eq!(&got, &expected);
        let mut previous = BTreeSet::new();
        for k in 1..=3 {
            let ks = as_set(kset_step(&inst, k));
            prop_assert!(ks.is_subset(&expected), "k={} found {:?} outside {:?}", k, ks, expected);
            prop_assert!(previous.is_subset(&ks), "k-set search lost inferences going to k={}", k);
            previous = ks;
        }
    }

    #[test]
    fn constraint_rows_match_independent_frontier(seed in any::<u64>()) {
        let Some((_, inst)) = common::random_state(seed) else { return Ok(()) };
        let ours = common::constraints(&inst);
        let cs = build_constraints(&inst);
        prop_assert_eq!(cs.outer(), &ours.outer[..]);
        let mut rows: Vec<(u64, i64)> = (0..cs.num_rows())
            .map(|i| (cs.row(i).iter().fold(0u64, |m, &j| m | 1 << j), cs.label(i) as i64))
            .collect();
        let mut expected = ours.rows.clone();
        rows.sort_unstable();
        expected.sort_unstable();
        prop_assert_eq!(rows, expected);
    }
}

#[test]
fn forced_mine_fixture() {
    let inst = parse_instance(include_str!("../fixtures/forced_mine.txt")).unwrap();
    assert!(consistency_check(&inst));
    let want: BTreeSet<_> = [(Site::new(2, 2), Verdict::Mine)].into();
    assert_eq!(common::brute_force_verdicts(&inst), Some(want.clone()));
    assert_eq!(as_set(infer_step(&inst, &PlayConfig::default()).unwrap()), want);
    for k in 1..=3 {
        assert_eq!(as_set(kset_step(&inst, k)), want);
    }
}

#[test]
fn inconsistent_fixture() {
    let inst = parse_instance(include_str!("../fixtures/inconsistent.txt")).unwrap();
    assert!(!consistency_check(&inst));
    assert_eq!(common::brute_force_verdicts(&inst), None);
}

#[test]
fn ring_fixture_admits_no_inference() {
    let inst = parse_instance(include_str!("../fixtures/ring_no_inference.txt")).unwrap();
    assert!(consistency_check(&inst));
    assert_eq!(common::constraints(&inst).outer.len(), 12);
    assert_eq!(common::brute_force_verdicts(&inst), Some(BTreeSet::new()));
    assert!(infer_step(&inst, &PlayConfig::default()).unwrap().is_empty());
    for k in 1..=4 {
        assert!(kset_step(&inst, k).is_empty());
    }
}
