//! Seeded random directed networks.
//!
//! The RNG is ChaCha8 seeded with `seed_from_u64(seed)`; independent streams
//! are used for edge sampling (0), raw weights (1) and isolate rewiring (2), so
//! changing one phase never shifts the others.

use std::collections::HashSet;
use std::io::BufRead;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::commitment::{normalise_rows, redistribute_inactive_with, CommitmentError, IsolatedPolicy};
use crate::graph::SocialNetwork;

const STREAM_EDGES: u64 = 0;
const STREAM_WEIGHTS: u64 = 1;
const STREAM_REWIRE: u64 = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetgenError {
    #[error("{requested} edges requested but only {capacity} ordered pairs exist")]
    TooManyEdges { requested: u64, capacity: u64 },
    #[error("need at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("{edges} edges cannot cover {nodes} nodes without isolated members (use allow_isolated)")]
    CannotEliminateIsolates { nodes: usize, edges: usize },
    #[error("grid line {line}: {reason}")]
    Grid { line: usize, reason: String },
    #[error(transparent)]
    Commitment(#[from] CommitmentError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    /// Raw activities uniform on (0, 1], normalised per source.
    #[default]
    UniformNormalized,
    /// Every raw activity is 1.
    Unit,
}

impl FromStr for WeightMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform" | "uniform_normalized" | "uniform-normalized" => Ok(WeightMode::UniformNormalized),
            "unit" => Ok(WeightMode::Unit),
            _ => Err(format!("unknown weight mode `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub node_count: usize,
    pub edge_count: usize,
    pub seed: u64,
    pub weight_mode: WeightMode,
    /// Skip isolate rewiring; isolated members stay edgeless.
    pub allow_isolated: bool,
}

impl GenSpec {
    pub fn new(node_count: usize, edge_count: usize, seed: u64) -> Self {
        GenSpec {
            node_count,
            edge_count,
            seed,
            weight_mode: WeightMode::default(),
            allow_isolated: false,
        }
    }

    pub fn capacity(&self) -> u64 {
        let n = self.node_count as u64;
        n * n.saturating_sub(1)
    }

    /// Whether every node can be covered by `edge_count` edges.
    pub fn can_avoid_isolates(&self) -> bool {
        2 * self.edge_count >= self.node_count
    }
}

/// The 5 x 5 grid of node and edge counts (1k to 100k each). Rows that cannot
/// avoid isolated members are flagged `allow_isolated`.
pub fn standard_grid(seed: u64) -> Vec<GenSpec> {
    const SIZES: [usize; 5] = [1_000, 5_000, 10_000, 50_000, 100_000];
    let mut grid = Vec::with_capacity(25);
    for (i, &n) in SIZES.iter().enumerate() {
        for (j, &e) in SIZES.iter().enumerate() {
            let mut spec = GenSpec::new(n, e, seed.wrapping_add((i * 5 + j) as u64));
            spec.allow_isolated = !spec.can_avoid_isolates();
            grid.push(spec);
        }
    }
    grid
}

/// Grid file rows `nodes,edges,seed`; an optional header line is skipped.
pub fn read_grid<R: BufRead>(reader: R) -> Result<Vec<GenSpec>, NetgenError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let err = |reason: String| NetgenError::Grid { line: i + 1, reason };
        let line = line.map_err(|e| err(e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split(',').map(str::trim).collect();
        if out.is_empty() && fields.first().is_some_and(|f| f.parse::<u64>().is_err()) {
            continue;
        }
        if fields.len() != 3 {
            return Err(err(format!("expected `nodes,edges,seed`, got `{t}`")));
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| err(format!("`{s}` is not an integer")));
        let mut spec = GenSpec::new(num(fields[0])? as usize, num(fields[1])? as usize, num(fields[2])?);
        spec.allow_isolated = !spec.can_avoid_isolates();
        out.push(spec);
    }
    Ok(out)
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Ordered pair with index `k` in `0..n(n-1)`; self-pairs are skipped.
fn decode_pair(k: u64, n: u64) -> (u32, u32) {
    let from = k / (n - 1);
    let r = k % (n - 1);
    let to = if r < from { r } else { r + 1 };
    (from as u32, to as u32)
}

/// Uniform sample of distinct ordered pairs, returned sorted.
fn sample_pairs(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<(u32, u32)> {
    let cap = (n as u64) * (n as u64 - 1);
    let draw = |count: usize, rng: &mut ChaCha8Rng| {
        let mut picked: HashSet<u64> = HashSet::with_capacity(count);
        let mut order = Vec::with_capacity(count);
        while order.len() < count {
            let k = rng.gen_range(0..cap);
            if picked.insert(k) {
                order.push(k);
            }
        }
        (picked, order)
    };
    let mut keys: Vec<u64> = if (m as u64) * 2 < cap {
        draw(m, rng).1
    } else {
        let (excluded, _) = draw((cap - m as u64) as usize, rng);
        (0..cap).filter(|k| !excluded.contains(k)).collect()
    };
    keys.sort_unstable();
    keys.into_iter().map(|k| decode_pair(k, n as u64)).collect()
}

/// Move edge endpoints onto isolated nodes until none remain. Each swap takes
/// an endpoint away from a node of degree >= 2, so the edge count and the
/// coverage of other nodes are preserved.
fn rewire_isolates(n: usize, edges: &mut [(u32, u32)], rng: &mut ChaCha8Rng) -> Result<(), NetgenError> {
    let mut degree = vec![0u32; n];
    for &(a, b) in edges.iter() {
        degree[a as usize] += 1;
        degree[b as usize] += 1;
    }
    let isolated: Vec<u32> = (0..n as u32).filter(|&v| degree[v as usize] == 0).collect();
    if isolated.is_empty() {
        return Ok(());
    }
    if 2 * edges.len() < n {
        return Err(NetgenError::CannotEliminateIsolates { nodes: n, edges: edges.len() });
    }
    let mut present: HashSet<(u32, u32)> = edges.iter().copied().collect();
    let m = edges.len();

    let try_swap = |i: usize, v: u32, edges: &mut [(u32, u32)], degree: &mut [u32], present: &mut HashSet<(u32, u32)>| {
        let (u, w) = edges[i];
        let candidates = [(degree[w as usize] >= 2, (u, v), w), (degree[u as usize] >= 2, (v, w), u)];
        for (ok, replacement, loser) in candidates {
            if ok && !present.contains(&replacement) {
                present.remove(&(u, w));
                present.insert(replacement);
                edges[i] = replacement;
                degree[loser as usize] -= 1;
                degree[v as usize] += 1;
                return true;
            }
        }
        false
    };

    for v in isolated {
        let placed = (0..64).any(|_| try_swap(rng.gen_range(0..m), v, edges, &mut degree, &mut present))
            || (0..m).any(|i| try_swap(i, v, edges, &mut degree, &mut present));
        if !placed {
            return Err(NetgenError::CannotEliminateIsolates { nodes: n, edges: m });
        }
    }
    edges.sort_unstable();
    Ok(())
}

/// Give every node an outgoing edge by moving sources away from nodes with
/// out-degree >= 2. Needs at least `n` edges; in-degrees are untouched.
fn rewire_sources(n: usize, edges: &mut [(u32, u32)], rng: &mut ChaCha8Rng) {
    let mut out = vec![0u32; n];
    for &(a, _) in edges.iter() {
        out[a as usize] += 1;
    }
    let silent: Vec<u32> = (0..n as u32).filter(|&v| out[v as usize] == 0).collect();
    if silent.is_empty() {
        return;
    }
    let mut present: HashSet<(u32, u32)> = edges.iter().copied().collect();
    let m = edges.len();
    let try_move = |i: usize, v: u32, edges: &mut [(u32, u32)], out: &mut [u32], present: &mut HashSet<(u32, u32)>| {
        let (u, w) = edges[i];
        if out[u as usize] < 2 || w == v || present.contains(&(v, w)) {
            return false;
        }
        present.remove(&(u, w));
        present.insert((v, w));
        edges[i] = (v, w);
        out[u as usize] -= 1;
        out[v as usize] += 1;
        true
    };
    for v in silent {
        // A donor always exists: fewer than n sources share at least n edges.
        let moved = (0..64).any(|_| try_move(rng.gen_range(0..m), v, edges, &mut out, &mut present))
            || (0..m).any(|i| try_move(i, v, edges, &mut out, &mut present));
        debug_assert!(moved);
    }
    edges.sort_unstable();
}

/// Generate a commitment network: `edge_count` distinct directed edges drawn
/// uniformly without replacement, weights per [`WeightMode`], then
/// redistribution for members without outgoing edges.
///
/// With at least as many edges as nodes every node is rewired to have an
/// outgoing edge, so the result has exactly `edge_count` edges. Sparser specs
/// only remove isolates and redistribution adds the answering edges.
pub fn generate(spec: &GenSpec) -> Result<SocialNetwork, NetgenError> {
    let n = spec.node_count;
    if n < 2 {
        return Err(NetgenError::TooFewNodes(n));
    }
    if spec.edge_count as u64 > spec.capacity() {
        return Err(NetgenError::TooManyEdges { requested: spec.edge_count as u64, capacity: spec.capacity() });
    }
    if spec.edge_count == 0 {
        return Err(NetgenError::CannotEliminateIsolates { nodes: n, edges: 0 });
    }

    let mut edges = sample_pairs(n, spec.edge_count, &mut rng(spec.seed, STREAM_EDGES));
    if !spec.allow_isolated {
        let mut r = rng(spec.seed, STREAM_REWIRE);
        if edges.len() >= n {
            rewire_sources(n, &mut edges, &mut r);
        } else {
            rewire_isolates(n, &mut edges, &mut r)?;
        }
    }

    let mut weights = rng(spec.seed, STREAM_WEIGHTS);
    let raw = edges.iter().map(|&(a, b)| {
        let w = match spec.weight_mode {
            // gen() is in [0, 1); flip to (0, 1].
            WeightMode::UniformNormalized => 1.0 - weights.gen::<f64>(),
            WeightMode::Unit => 1.0,
        };
        ((a, b), w)
    });
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let rel = normalise_rows(labels, raw);
    let policy = if spec.allow_isolated { IsolatedPolicy::Keep } else { IsolatedPolicy::Reject };
    Ok(redistribute_inactive_with(&rel, policy)?)
}
