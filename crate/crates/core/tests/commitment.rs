mod common;

use std::collections::HashMap;

use spinrank::commitment::{redistribute_inactive_with, CommitmentError, IsolatedPolicy};
use spinrank::{
    commitment_network, redistribute_inactive, relationship_commitment, time_decayed_commitment, validate_commitment,
    ActivityMatrix, Direction, TimeDecayConfig, ROW_SUM_TOLERANCE,
};

#[test]
fn inactive_member_answers_each_acquaintance_evenly() {
    for k in 1..=50usize {
        let rows: Vec<(String, String, f64)> = (0..k).map(|i| (format!("s{i}"), "hub".to_owned(), 1.0 + i as f64)).collect();
        let net = commitment_network(&ActivityMatrix::from_labelled(rows).unwrap()).unwrap();
        let hub = net.id_of("hub").unwrap();
        let out = net.neighbors(hub, Direction::Out).unwrap();
        assert_eq!(out.len(), k);
        assert!(out.iter().all(|&(_, w)| w == 1.0 / k as f64));
        assert!(validate_commitment(&net, ROW_SUM_TOLERANCE).is_clean());
    }
}

#[test]
fn four_acquaintances_get_a_quarter() {
    let acts = ActivityMatrix::from_labelled([("a", "x", 3.0), ("b", "x", 1.0), ("c", "x", 7.0), ("d", "x", 2.0)]).unwrap();
    let net = commitment_network(&acts).unwrap();
    let x = net.id_of("x").unwrap();
    for l in ["a", "b", "c", "d"] {
        assert_eq!(net.weight(x, net.id_of(l).unwrap()), 0.25);
        assert_eq!(net.weight(net.id_of(l).unwrap(), x), 1.0);
    }
}

#[test]
fn relationship_commitment_is_share_of_activity() {
    let acts = ActivityMatrix::from_labelled([("a", "b", 3.0), ("a", "c", 1.0), ("b", "a", 5.0), ("c", "b", 0.0)]).unwrap();
    let rel = relationship_commitment(&acts);
    assert_eq!(rel.get(0, 1), 0.75);
    assert_eq!(rel.get(0, 2), 0.25);
    assert_eq!(rel.get(1, 0), 1.0);
    // Zero activity is no relation: c is inactive and answers a.
    assert!(rel.row(2).is_empty());
    let net = redistribute_inactive(&rel).unwrap();
    assert_eq!(net.weight(net.id_of("c").unwrap(), net.id_of("a").unwrap()), 1.0);
}

#[test]
fn decay_hand_example() {
    // Two periods, most recent first. a talks to b now and to c long ago.
    let acts = ActivityMatrix::from_labelled_periods([("a", "b", 0, 1.0), ("a", "c", 1, 2.0), ("b", "a", 0, 1.0), ("c", "a", 1, 1.0)], 2).unwrap();
    let rel = time_decayed_commitment(&acts, &TimeDecayConfig::new(0.25, 2).unwrap()).unwrap();
    assert!((rel.get(0, 1) - 2.0 / 3.0).abs() < 1e-15);
    assert!((rel.get(0, 2) - 1.0 / 3.0).abs() < 1e-15);

    let undecayed = time_decayed_commitment(&acts, &TimeDecayConfig::new(1.0, 2).unwrap()).unwrap();
    assert_eq!(undecayed, relationship_commitment(&acts));
}

#[test]
fn decay_weights() {
    let cfg = TimeDecayConfig::new(0.9, 12).unwrap();
    assert_eq!(cfg.period_weight(0), 1.0);
    assert!((cfg.period_weight(11) - 0.313_810_596_09).abs() < 1e-11);
    assert!(TimeDecayConfig::new(0.0, 3).is_err());
    assert!(TimeDecayConfig::new(1.5, 3).is_err());
    assert!(TimeDecayConfig::new(0.5, 0).is_err());

    let flat = ActivityMatrix::from_labelled([("a", "b", 1.0), ("b", "a", 1.0)]).unwrap();
    assert_eq!(time_decayed_commitment(&flat, &cfg).unwrap_err(), CommitmentError::MissingPeriods);
    let two = ActivityMatrix::from_labelled_periods([("a", "b", 0, 1.0)], 2).unwrap();
    assert!(matches!(
        time_decayed_commitment(&two, &cfg),
        Err(CommitmentError::PeriodMismatch { expected: 12, found: 2 })
    ));
}

#[test]
fn rejects_bad_activity() {
    assert!(matches!(ActivityMatrix::from_labelled([("a", "a", 1.0)]), Err(CommitmentError::SelfActivity(_))));
    assert!(matches!(
        ActivityMatrix::from_labelled([("a", "b", -1.0)]),
        Err(CommitmentError::InvalidActivity { .. })
    ));
    assert!(matches!(
        ActivityMatrix::from_labelled_periods([("a", "b", 3, 1.0)], 2),
        Err(CommitmentError::PeriodOutOfRange { period: 3, periods: 2 })
    ));
}

#[test]
fn isolated_members() {
    let mut acts = ActivityMatrix::new(vec!["a".into(), "b".into(), "lonely".into()]);
    acts.add(0, 1, 1.0).unwrap();
    acts.add(1, 0, 1.0).unwrap();
    let rel = relationship_commitment(&acts);
    assert_eq!(redistribute_inactive(&rel).unwrap_err(), CommitmentError::IsolatedMember("lonely".into()));
    let net = redistribute_inactive_with(&rel, IsolatedPolicy::Keep).unwrap();
    assert_eq!(net.member_count(), 3);
    assert_eq!(validate_commitment(&net, ROW_SUM_TOLERANCE).isolated.len(), 1);
}

#[test]
fn repeated_pairs_accumulate() {
    let acts = ActivityMatrix::from_labelled([("a", "b", 1.0), ("a", "b", 2.0), ("a", "c", 1.0), ("b", "a", 1.0), ("c", "a", 1.0)]).unwrap();
    assert_eq!(acts.activity(0, 1), 3.0);
    let net = commitment_network(&acts).unwrap();
    let w: HashMap<_, _> = net.edges().map(|e| ((e.from.0, e.to.0), e.weight)).collect();
    assert_eq!(w[&(0, 1)], 0.75);
}
