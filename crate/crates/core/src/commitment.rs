//! Commitment function construction.
//!
//! Raw activity `A(y -> x)` is normalised per source into the relationship
//! commitment `C_rel`, then members with no outgoing activity spread a total
//! commitment of 1 evenly over the members that are active towards them. The
//! time-decayed variant weights period `i` (0 = most recent) by `lambda^i`
//! before normalising.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{sort_labels, GraphError, SocialNetwork};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CommitmentError {
    #[error("member `{0}` has no relations in either direction")]
    IsolatedMember(String),
    #[error("activity of `{0}` towards itself")]
    SelfActivity(String),
    #[error("activity {value} from `{from}` to `{to}` is negative or not finite")]
    InvalidActivity { from: String, to: String, value: f64 },
    #[error("member id {0} out of range")]
    OutOfRange(usize),
    #[error("period {period} out of range for {periods} periods")]
    PeriodOutOfRange { period: usize, periods: usize },
    #[error("activity matrix carries no per-period entries")]
    MissingPeriods,
    #[error("decay config expects {expected} periods, matrix has {found}")]
    PeriodMismatch { expected: usize, found: usize },
    #[error("invalid decay config: {0}")]
    InvalidDecay(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Sparse raw activity totals between ordered member pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityMatrix {
    labels: Vec<String>,
    entries: BTreeMap<(u32, u32), f64>,
    periods: Option<Vec<BTreeMap<(u32, u32), f64>>>,
}

impl ActivityMatrix {
    pub fn new(labels: Vec<String>) -> Self {
        ActivityMatrix { labels, entries: BTreeMap::new(), periods: None }
    }

    /// Matrix split into `k` periods, index 0 being the most recent.
    pub fn with_periods(labels: Vec<String>, k: usize) -> Self {
        ActivityMatrix {
            labels,
            entries: BTreeMap::new(),
            periods: Some(vec![BTreeMap::new(); k]),
        }
    }

    /// Members are the labels occurring in `rows`, in canonical order.
    pub fn from_labelled<I, S>(rows: I) -> Result<Self, CommitmentError>
    where
        I: IntoIterator<Item = (S, S, f64)>,
        S: AsRef<str>,
    {
        let rows: Vec<(S, S, f64)> = rows.into_iter().collect();
        let mut labels: Vec<String> = rows
            .iter()
            .flat_map(|(a, b, _)| [a.as_ref().to_owned(), b.as_ref().to_owned()])
            .collect();
        sort_labels(&mut labels);
        labels.dedup();
        let index = label_index(&labels);
        let mut m = ActivityMatrix::new(labels);
        for (a, b, v) in rows {
            m.add(index[a.as_ref()], index[b.as_ref()], v)?;
        }
        Ok(m)
    }

    /// Like [`from_labelled`](Self::from_labelled) with rows `(from, to, period, activity)`.
    pub fn from_labelled_periods<I, S>(rows: I, k: usize) -> Result<Self, CommitmentError>
    where
        I: IntoIterator<Item = (S, S, usize, f64)>,
        S: AsRef<str>,
    {
        let rows: Vec<(S, S, usize, f64)> = rows.into_iter().collect();
        let mut labels: Vec<String> = rows
            .iter()
            .flat_map(|(a, b, _, _)| [a.as_ref().to_owned(), b.as_ref().to_owned()])
            .collect();
        sort_labels(&mut labels);
        labels.dedup();
        let index = label_index(&labels);
        let mut m = ActivityMatrix::with_periods(labels, k);
        for (a, b, p, v) in rows {
            m.add_in_period(p, index[a.as_ref()], index[b.as_ref()], v)?;
        }
        Ok(m)
    }

    pub fn member_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn period_count(&self) -> Option<usize> {
        self.periods.as_ref().map(Vec::len)
    }

    pub fn activity(&self, from: u32, to: u32) -> f64 {
        self.entries.get(&(from, to)).copied().unwrap_or(0.0)
    }

    fn check(&self, from: u32, to: u32, value: f64) -> Result<(), CommitmentError> {
        let n = self.labels.len();
        for id in [from, to] {
            if id as usize >= n {
                return Err(CommitmentError::OutOfRange(id as usize));
            }
        }
        if from == to {
            return Err(CommitmentError::SelfActivity(self.labels[from as usize].clone()));
        }
        if !value.is_finite() || value < 0.0 {
            return Err(CommitmentError::InvalidActivity {
                from: self.labels[from as usize].clone(),
                to: self.labels[to as usize].clone(),
                value,
            });
        }
        Ok(())
    }

    /// Accumulate activity from `from` to `to`.
    pub fn add(&mut self, from: u32, to: u32, value: f64) -> Result<(), CommitmentError> {
        self.check(from, to, value)?;
        *self.entries.entry((from, to)).or_insert(0.0) += value;
        Ok(())
    }

    pub fn add_in_period(&mut self, period: usize, from: u32, to: u32, value: f64) -> Result<(), CommitmentError> {
        self.check(from, to, value)?;
        let periods = self.periods.as_mut().ok_or(CommitmentError::MissingPeriods)?;
        let k = periods.len();
        let slot = periods
            .get_mut(period)
            .ok_or(CommitmentError::PeriodOutOfRange { period, periods: k })?;
        *slot.entry((from, to)).or_insert(0.0) += value;
        *self.entries.entry((from, to)).or_insert(0.0) += value;
        Ok(())
    }
}

fn label_index(labels: &[String]) -> std::collections::HashMap<String, u32> {
    labels.iter().enumerate().map(|(i, l)| (l.clone(), i as u32)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDecayConfig {
    pub lambda: f64,
    pub periods: usize,
}

impl TimeDecayConfig {
    pub fn new(lambda: f64, periods: usize) -> Result<Self, CommitmentError> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(CommitmentError::InvalidDecay(format!("lambda {lambda} not in (0, 1]")));
        }
        if periods == 0 {
            return Err(CommitmentError::InvalidDecay("period count must be at least 1".into()));
        }
        Ok(TimeDecayConfig { lambda, periods })
    }

    /// Weight of period `i` (0 = most recent).
    pub fn period_weight(&self, i: usize) -> f64 {
        self.lambda.powi(i as i32)
    }
}

/// Per-source normalised commitment rows, strictly positive entries only.
#[derive(Debug, Clone, PartialEq)]
pub struct RelCommitment {
    labels: Vec<String>,
    rows: Vec<Vec<(u32, f64)>>,
}

impl RelCommitment {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn member_count(&self) -> usize {
        self.labels.len()
    }

    /// Outgoing `(target, C_rel)` entries of `from`, ascending by target.
    pub fn row(&self, from: u32) -> &[(u32, f64)] {
        &self.rows[from as usize]
    }

    pub fn get(&self, from: u32, to: u32) -> f64 {
        let row = self.row(from);
        row.binary_search_by_key(&to, |&(t, _)| t)
            .map(|k| row[k].1)
            .unwrap_or(0.0)
    }
}

/// `raw` must be sorted by `(from, to)` with no repeated pairs.
pub(crate) fn normalise_rows(labels: Vec<String>, raw: impl Iterator<Item = ((u32, u32), f64)>) -> RelCommitment {
    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); labels.len()];
    for ((y, x), a) in raw {
        if a > 0.0 {
            rows[y as usize].push((x, a));
        }
    }
    for row in &mut rows {
        let total: f64 = row.iter().map(|&(_, a)| a).sum();
        for entry in row.iter_mut() {
            entry.1 /= total;
        }
        row.retain(|&(_, c)| c > 0.0);
    }
    RelCommitment { labels, rows }
}

/// Normalise each member's activity by its total activity.
pub fn relationship_commitment(acts: &ActivityMatrix) -> RelCommitment {
    normalise_rows(acts.labels.clone(), acts.entries.iter().map(|(&k, &v)| (k, v)))
}

/// Normalise `sum_i lambda^i * A_i` per source.
pub fn time_decayed_commitment(acts: &ActivityMatrix, cfg: &TimeDecayConfig) -> Result<RelCommitment, CommitmentError> {
    let periods = acts.periods.as_ref().ok_or(CommitmentError::MissingPeriods)?;
    if periods.len() != cfg.periods {
        return Err(CommitmentError::PeriodMismatch { expected: cfg.periods, found: periods.len() });
    }
    let mut weighted: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for (i, period) in periods.iter().enumerate() {
        let f = cfg.period_weight(i);
        for (&k, &a) in period {
            *weighted.entry(k).or_insert(0.0) += f * a;
        }
    }
    Ok(normalise_rows(acts.labels.clone(), weighted.into_iter()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IsolatedPolicy {
    #[default]
    Reject,
    /// Leave isolated members edgeless (raw timing runs only).
    Keep,
}

/// Turn `C_rel` into the final commitment network, rejecting isolated members.
pub fn redistribute_inactive(rel: &RelCommitment) -> Result<SocialNetwork, CommitmentError> {
    redistribute_inactive_with(rel, IsolatedPolicy::Reject)
}

/// Single pass: every member with an empty row gets `1/k` towards each of the
/// `k` members whose `C_rel` row points at it. Active rows are copied as is.
pub fn redistribute_inactive_with(rel: &RelCommitment, policy: IsolatedPolicy) -> Result<SocialNetwork, CommitmentError> {
    let n = rel.member_count();
    let mut acquaintances: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (y, row) in rel.rows.iter().enumerate() {
        for &(x, _) in row {
            acquaintances[x as usize].push(y as u32);
        }
    }
    let mut edges = Vec::with_capacity(rel.rows.iter().map(Vec::len).sum::<usize>());
    for (y, row) in rel.rows.iter().enumerate() {
        if !row.is_empty() {
            edges.extend(row.iter().map(|&(x, c)| (y as u32, x, c)));
            continue;
        }
        let acq = &acquaintances[y];
        if acq.is_empty() {
            match policy {
                IsolatedPolicy::Reject => return Err(CommitmentError::IsolatedMember(rel.labels[y].clone())),
                IsolatedPolicy::Keep => continue,
            }
        }
        let share = 1.0 / acq.len() as f64;
        edges.extend(acq.iter().map(|&x| (y as u32, x, share)));
    }
    Ok(SocialNetwork::from_id_edges(rel.labels.clone(), edges)?)
}

/// Per-source normalisation followed by redistribution.
pub fn commitment_network(acts: &ActivityMatrix) -> Result<SocialNetwork, CommitmentError> {
    redistribute_inactive(&relationship_commitment(acts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{validate_commitment, Direction, MemberId, ROW_SUM_TOLERANCE};

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    #[test]
    fn normalises_rows() {
        let mut m = ActivityMatrix::new(labels(3));
        m.add(0, 1, 3.0).unwrap();
        m.add(0, 2, 1.0).unwrap();
        let rel = relationship_commitment(&m);
        assert_eq!(rel.row(0), &[(1, 0.75), (2, 0.25)]);
    }

    #[test]
    fn sole_interlocutor_gets_one() {
        let mut m = ActivityMatrix::new(labels(2));
        m.add(0, 1, 17.0).unwrap();
        assert_eq!(relationship_commitment(&m).get(0, 1), 1.0);
    }

    #[test]
    fn inactive_row_empty() {
        let mut m = ActivityMatrix::new(labels(2));
        m.add(0, 1, 2.0).unwrap();
        m.add(1, 0, 0.0).unwrap();
        assert!(relationship_commitment(&m).row(1).is_empty());
    }

    #[test]
    fn rejects_bad_activity() {
        let mut m = ActivityMatrix::new(labels(2));
        assert_eq!(m.add(1, 1, 1.0), Err(CommitmentError::SelfActivity("1".into())));
        assert!(matches!(m.add(0, 1, -1.0), Err(CommitmentError::InvalidActivity { .. })));
        assert_eq!(m.add(0, 5, 1.0), Err(CommitmentError::OutOfRange(5)));
    }

    #[test]
    fn four_acquaintances_share_quarter() {
        // Member 0 is inactive; members 1..=4 each talk only to 0.
        let mut m = ActivityMatrix::new(labels(5));
        for x in 1..=4 {
            m.add(x, 0, x as f64).unwrap();
        }
        let net = commitment_network(&m).unwrap();
        let out = net.neighbors(MemberId(0), Direction::Out).unwrap();
        assert_eq!(out.len(), 4);
        assert!(out.iter().all(|&(_, w)| w == 0.25));
        assert!(validate_commitment(&net, ROW_SUM_TOLERANCE).is_clean());
    }

    #[test]
    fn one_acquaintance_gets_one() {
        let mut m = ActivityMatrix::new(labels(2));
        m.add(1, 0, 4.0).unwrap();
        let net = commitment_network(&m).unwrap();
        assert_eq!(net.neighbors(MemberId(0), Direction::Out).unwrap(), vec![(MemberId(1), 1.0)]);
    }

    #[test]
    fn isolated_rejected_or_kept() {
        let mut m = ActivityMatrix::new(labels(3));
        m.add(0, 1, 1.0).unwrap();
        let rel = relationship_commitment(&m);
        assert_eq!(redistribute_inactive(&rel).unwrap_err(), CommitmentError::IsolatedMember("2".into()));
        let net = redistribute_inactive_with(&rel, IsolatedPolicy::Keep).unwrap();
        assert_eq!(net.member_count(), 3);
        assert_eq!(net.edge_count(), 2);
    }

    #[test]
    fn oldest_period_weight() {
        let cfg = TimeDecayConfig::new(0.9, 12).unwrap();
        assert!((cfg.period_weight(11) - 0.31381059609).abs() < 1e-10);
        assert_eq!(cfg.period_weight(0), 1.0);
        assert!(TimeDecayConfig::new(0.0, 3).is_err());
        assert!(TimeDecayConfig::new(1.1, 3).is_err());
        assert!(TimeDecayConfig::new(0.5, 0).is_err());
    }

    #[test]
    fn decay_hand_example() {
        // Recent: 0->1 one unit. Old: 0->2 one unit. lambda 0.5, two periods.
        let m = ActivityMatrix::from_labelled_periods([("0", "1", 0, 1.0), ("0", "2", 1, 1.0)], 2).unwrap();
        let rel = time_decayed_commitment(&m, &TimeDecayConfig::new(0.5, 2).unwrap()).unwrap();
        assert!((rel.get(0, 1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((rel.get(0, 2) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn decay_requires_matching_periods() {
        let m = ActivityMatrix::from_labelled([("a", "b", 1.0)]).unwrap();
        let cfg = TimeDecayConfig::new(0.5, 2).unwrap();
        assert_eq!(time_decayed_commitment(&m, &cfg).unwrap_err(), CommitmentError::MissingPeriods);
        let m = ActivityMatrix::from_labelled_periods([("a", "b", 0, 1.0)], 3).unwrap();
        assert_eq!(
            time_decayed_commitment(&m, &cfg).unwrap_err(),
            CommitmentError::PeriodMismatch { expected: 2, found: 3 }
        );
    }

    #[test]
    fn unit_lambda_matches_plain() {
        let rows = [("a", "b", 0, 2.0), ("a", "c", 1, 1.0), ("a", "b", 2, 3.0), ("b", "a", 1, 5.0)];
        let m = ActivityMatrix::from_labelled_periods(rows, 3).unwrap();
        let plain = relationship_commitment(&m);
        let decayed = time_decayed_commitment(&m, &TimeDecayConfig::new(1.0, 3).unwrap()).unwrap();
        for y in 0..3 {
            for x in 0..3 {
                assert!((plain.get(y, x) - decayed.get(y, x)).abs() < 1e-15);
            }
        }
    }
}
