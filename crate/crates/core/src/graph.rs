//! Immutable sparse directed weighted graph.
//!
//! Edges are stored once, sorted by `(from, to)`, as parallel arrays. The
//! outgoing slice of member `y` is the contiguous range
//! `out_offsets[y]..out_offsets[y + 1]` of that array. The incoming index holds
//! edge ids grouped by target, ascending within each target, so walking the
//! in-slice of `x` visits sources in ascending id order.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Absolute tolerance used for "outgoing commitments sum to one".
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop on member `{0}`")]
    SelfLoop(String),
    #[error("no edges supplied")]
    EmptyInput,
    #[error("member id {id} out of range (member count {count})")]
    OutOfRange { id: usize, count: usize },
    #[error("edge {from} -> {to} has invalid weight {weight}")]
    InvalidWeight { from: String, to: String, weight: f64 },
    #[error("edge references unknown member `{0}`")]
    UnknownLabel(String),
    #[error("member `{0}` listed twice")]
    DuplicateLabel(String),
}

/// Dense member index, `0..member_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MemberId(pub u32);

impl MemberId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for MemberId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge {
    pub from: MemberId,
    pub to: MemberId,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SocialNetwork {
    labels: Vec<String>,
    index: HashMap<String, u32>,
    edge_from: Vec<u32>,
    edge_to: Vec<u32>,
    edge_weight: Vec<f64>,
    out_offsets: Vec<usize>,
    in_offsets: Vec<usize>,
    in_edge_ids: Vec<u32>,
}

/// Build a network from labelled edges. Members are exactly the labels that
/// occur in the edge list.
///
/// Identical `(from, to)` pairs are merged by summing their weights.
pub fn build_network<I, S>(edges: I) -> Result<SocialNetwork, GraphError>
where
    I: IntoIterator<Item = (S, S, f64)>,
    S: AsRef<str>,
{
    let edges: Vec<(S, S, f64)> = edges.into_iter().collect();
    if edges.is_empty() {
        return Err(GraphError::EmptyInput);
    }
    let mut labels: Vec<String> = edges
        .iter()
        .flat_map(|(a, b, _)| [a.as_ref().to_owned(), b.as_ref().to_owned()])
        .collect();
    sort_labels(&mut labels);
    labels.dedup();
    build_with_sorted_labels(labels, &edges)
}

/// Like [`build_network`] but with an explicit member list, which may contain
/// members without any incident edge (reported by [`validate_commitment`]).
pub fn build_network_with_members<M, I, S>(members: M, edges: I) -> Result<SocialNetwork, GraphError>
where
    M: IntoIterator,
    M::Item: Into<String>,
    I: IntoIterator<Item = (S, S, f64)>,
    S: AsRef<str>,
{
    let mut labels: Vec<String> = members.into_iter().map(Into::into).collect();
    sort_labels(&mut labels);
    if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
        return Err(GraphError::DuplicateLabel(w[0].clone()));
    }
    let edges: Vec<(S, S, f64)> = edges.into_iter().collect();
    if edges.is_empty() {
        return Err(GraphError::EmptyInput);
    }
    build_with_sorted_labels(labels, &edges)
}

fn build_with_sorted_labels<S: AsRef<str>>(
    labels: Vec<String>,
    edges: &[(S, S, f64)],
) -> Result<SocialNetwork, GraphError> {
    let index: HashMap<String, u32> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i as u32))
        .collect();
    let lookup = |l: &str| {
        index
            .get(l)
            .copied()
            .ok_or_else(|| GraphError::UnknownLabel(l.to_owned()))
    };
    let mut id_edges = Vec::with_capacity(edges.len());
    for (a, b, w) in edges {
        let (a, b) = (a.as_ref(), b.as_ref());
        if a == b {
            return Err(GraphError::SelfLoop(a.to_owned()));
        }
        if !w.is_finite() || *w < 0.0 {
            return Err(GraphError::InvalidWeight {
                from: a.to_owned(),
                to: b.to_owned(),
                weight: *w,
            });
        }
        id_edges.push((lookup(a)?, lookup(b)?, *w));
    }
    SocialNetwork::assemble(labels, index, id_edges)
}

/// Canonical label order: numeric when every label is an unsigned integer,
/// lexicographic otherwise.
pub fn sort_labels(labels: &mut [String]) {
    if labels.iter().all(|l| l.parse::<u64>().is_ok()) {
        // "01" and "1" parse equal; fall back to the text for a total order.
        labels.sort_by(|a, b| {
            let (x, y) = (a.parse::<u64>().unwrap(), b.parse::<u64>().unwrap());
            x.cmp(&y).then_with(|| a.cmp(b))
        });
    } else {
        labels.sort();
    }
}

impl SocialNetwork {
    /// Build from dense-id edges. `labels[i]` becomes the label of member `i`.
    pub fn from_id_edges(labels: Vec<String>, edges: Vec<(u32, u32, f64)>) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i as u32).is_some() {
                return Err(GraphError::DuplicateLabel(l.clone()));
            }
        }
        let n = labels.len();
        for &(a, b, w) in &edges {
            for id in [a, b] {
                if id as usize >= n {
                    return Err(GraphError::OutOfRange { id: id as usize, count: n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(labels[a as usize].clone()));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(GraphError::InvalidWeight {
                    from: labels[a as usize].clone(),
                    to: labels[b as usize].clone(),
                    weight: w,
                });
            }
        }
        if edges.is_empty() {
            return Err(GraphError::EmptyInput);
        }
        Self::assemble(labels, index, edges)
    }

    fn assemble(
        labels: Vec<String>,
        index: HashMap<String, u32>,
        mut edges: Vec<(u32, u32, f64)>,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        // Stable sort, so merged weights are summed in input order.
        edges.sort_by_key(|&(a, b, _)| (a, b));
        let mut merged: Vec<(u32, u32, f64)> = Vec::with_capacity(edges.len());
        for (a, b, w) in edges {
            match merged.last_mut() {
                Some(last) if last.0 == a && last.1 == b => last.2 += w,
                _ => merged.push((a, b, w)),
            }
        }

        let m = merged.len();
        let mut edge_from = Vec::with_capacity(m);
        let mut edge_to = Vec::with_capacity(m);
        let mut edge_weight = Vec::with_capacity(m);
        let mut out_offsets = vec![0usize; n + 1];
        let mut in_counts = vec![0usize; n + 1];
        for &(a, b, w) in &merged {
            edge_from.push(a);
            edge_to.push(b);
            edge_weight.push(w);
            out_offsets[a as usize + 1] += 1;
            in_counts[b as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_counts[i + 1] += in_counts[i];
        }
        let in_offsets = in_counts.clone();
        let mut cursor = in_counts;
        let mut in_edge_ids = vec![0u32; m];
        // Edge ids are visited in ascending order, so each target's slice is
        // ascending by source.
        for (id, &b) in edge_to.iter().enumerate() {
            let slot = &mut cursor[b as usize];
            in_edge_ids[*slot] = id as u32;
            *slot += 1;
        }

        Ok(SocialNetwork {
            labels,
            index,
            edge_from,
            edge_to,
            edge_weight,
            out_offsets,
            in_offsets,
            in_edge_ids,
        })
    }

    pub fn member_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_from.len()
    }

    pub fn label(&self, id: MemberId) -> &str {
        &self.labels[id.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn id_of(&self, label: &str) -> Option<MemberId> {
        self.index.get(label).map(|&i| MemberId(i))
    }

    /// All edges in `(from, to)` order.
    pub fn edges(&self) -> impl Iterator<Item = WeightedEdge> + '_ {
        (0..self.edge_count()).map(move |i| self.edge(i))
    }

    #[inline]
    fn edge(&self, i: usize) -> WeightedEdge {
        WeightedEdge {
            from: MemberId(self.edge_from[i]),
            to: MemberId(self.edge_to[i]),
            weight: self.edge_weight[i],
        }
    }

    fn check(&self, x: MemberId) -> Result<(), GraphError> {
        if x.index() >= self.member_count() {
            Err(GraphError::OutOfRange { id: x.index(), count: self.member_count() })
        } else {
            Ok(())
        }
    }

    /// Edges incident to `x` in the requested direction, ascending by neighbour id.
    pub fn neighbors(&self, x: MemberId, direction: Direction) -> Result<Vec<(MemberId, f64)>, GraphError> {
        self.check(x)?;
        let i = x.index();
        Ok(match direction {
            Direction::Out => (self.out_offsets[i]..self.out_offsets[i + 1])
                .map(|e| (MemberId(self.edge_to[e]), self.edge_weight[e]))
                .collect(),
            Direction::In => self.in_edge_ids[self.in_offsets[i]..self.in_offsets[i + 1]]
                .iter()
                .map(|&e| (MemberId(self.edge_from[e as usize]), self.edge_weight[e as usize]))
                .collect(),
        })
    }

    #[inline]
    pub fn out_degree(&self, x: MemberId) -> usize {
        self.out_offsets[x.index() + 1] - self.out_offsets[x.index()]
    }

    #[inline]
    pub fn in_degree(&self, x: MemberId) -> usize {
        self.in_offsets[x.index() + 1] - self.in_offsets[x.index()]
    }

    /// Commitment `C(from -> to)`, or 0 when there is no such edge.
    pub fn weight(&self, from: MemberId, to: MemberId) -> f64 {
        let row = self.out_offsets[from.index()]..self.out_offsets[from.index() + 1];
        match self.edge_to[row.clone()].binary_search(&to.0) {
            Ok(k) => self.edge_weight[row.start + k],
            Err(_) => 0.0,
        }
    }

    /// Every edge has its reverse.
    pub fn is_symmetric(&self) -> bool {
        self.edges().all(|e| {
            let row = self.out_offsets[e.to.index()]..self.out_offsets[e.to.index() + 1];
            self.edge_to[row].binary_search(&e.from.0).is_ok()
        })
    }

    /// Out-neighbour ids of `x` (ascending).
    #[inline]
    pub(crate) fn out_targets(&self, x: usize) -> &[u32] {
        &self.edge_to[self.out_offsets[x]..self.out_offsets[x + 1]]
    }

    /// In-edge ids of `x`, ascending by source.
    #[inline]
    pub(crate) fn in_edges(&self, x: usize) -> &[u32] {
        &self.in_edge_ids[self.in_offsets[x]..self.in_offsets[x + 1]]
    }

    /// Contiguous in-edge id block covering targets `start..end`.
    #[inline]
    pub(crate) fn in_edges_block(&self, start: usize, end: usize) -> &[u32] {
        &self.in_edge_ids[self.in_offsets[start]..self.in_offsets[end]]
    }

    #[inline]
    pub(crate) fn out_offset(&self, x: usize) -> usize {
        self.out_offsets[x]
    }

    #[inline]
    pub(crate) fn edge_arrays(&self) -> (&[u32], &[u32], &[f64]) {
        (&self.edge_from, &self.edge_to, &self.edge_weight)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    /// Members with outgoing edges whose weights do not sum to 1.
    pub row_sum_violations: Vec<(MemberId, f64)>,
    /// Members with incoming but no outgoing edges.
    pub inactive: Vec<MemberId>,
    pub isolated: Vec<MemberId>,
    pub weight_range_violations: Vec<WeightedEdge>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.inactive.is_empty() && self.is_clean_exempting_inactive()
    }

    pub fn is_clean_exempting_inactive(&self) -> bool {
        self.row_sum_violations.is_empty()
            && self.isolated.is_empty()
            && self.weight_range_violations.is_empty()
    }
}

/// Check the commitment conditions: weights in `[0, 1]`, each active row
/// summing to 1 within `tol`, no isolated members.
pub fn validate_commitment(net: &SocialNetwork, tol: f64) -> ValidationReport {
    let mut report = ValidationReport::default();
    for x in 0..net.member_count() {
        let id = MemberId(x as u32);
        let (out, inn) = (net.out_degree(id), net.in_degree(id));
        if out == 0 {
            if inn == 0 {
                report.isolated.push(id);
            } else {
                report.inactive.push(id);
            }
            continue;
        }
        let range = net.out_offsets[x]..net.out_offsets[x + 1];
        let sum: f64 = net.edge_weight[range].iter().sum();
        if (sum - 1.0).abs() > tol {
            report.row_sum_violations.push((id, sum));
        }
    }
    report.weight_range_violations = net
        .edges()
        .filter(|e| !(0.0..=1.0).contains(&e.weight))
        .collect();
    report
}
