//! Iterative Social Position computation.
//!
//! Every variant is a Jacobi step
//!
//! ```text
//! SP_{n+1}(x) = (1 - eps) + eps * sum_{y -> x} SP_n(y) * C(y -> x)
//! ```
//!
//! and differs only in how the incoming contributions are gathered:
//!
//! * [`Variant::Nodes`] walks members one by one and, for each contact `y` of
//!   `x`, reads `C(y -> x)` by key from `y`'s commitment row.
//! * [`Variant::Edges`] makes a single pass over the global edge list,
//!   scattering into a fresh accumulator, then scales every member.
//! * [`Variant::Hybrid`] splits members into contiguous blocks of
//!   `chunk_size` and accumulates each block's incoming edges together.
//!
//! Contributions to a member are always summed in ascending source order
//! starting from zero, so the three variants agree bit for bit.

use std::io::{self, Write};
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::exec::{fill_indexed, for_each_chunk, Execution};
use crate::graph::{MemberId, SocialNetwork};
use crate::ranking::{make_ranking, Ranking};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinError {
    #[error("invalid spin configuration: {0}")]
    InvalidConfig(String),
    #[error("vector length {found} does not match {expected}")]
    LengthMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Nodes,
    Edges,
    Hybrid,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Nodes, Variant::Edges, Variant::Hybrid];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Nodes => "nodes",
            Variant::Edges => "edges",
            Variant::Hybrid => "hybrid",
        }
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "nodes" | "node" => Ok(Variant::Nodes),
            "edges" | "edge" => Ok(Variant::Edges),
            "hybrid" => Ok(Variant::Hybrid),
            _ => Err(format!("unknown variant `{s}` (expected nodes, edges or hybrid)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopMode {
    /// Every member moved by at most tau.
    #[default]
    PerMember,
    /// The total of all positions moved by at most tau.
    Sum,
}

impl FromStr for StopMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "per-member" | "per_member" => Ok(StopMode::PerMember),
            "sum" => Ok(StopMode::Sum),
            _ => Err(format!("unknown stop mode `{s}` (expected per-member or sum)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinConfig {
    pub epsilon: f64,
    pub tau: f64,
    pub stop_mode: StopMode,
    pub max_iterations: usize,
    pub initial_sp: f64,
    /// Block size for [`Variant::Hybrid`].
    pub chunk_size: usize,
    pub execution: Execution,
    /// Keep a copy of the vector after every iteration.
    pub record_snapshots: bool,
}

impl Default for SpinConfig {
    fn default() -> Self {
        SpinConfig {
            epsilon: 0.5,
            tau: 1e-5,
            stop_mode: StopMode::PerMember,
            max_iterations: 100,
            initial_sp: 1.0,
            chunk_size: 8192,
            execution: Execution::Sequential,
            record_snapshots: false,
        }
    }
}

impl SpinConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        SpinConfig { epsilon, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), SpinError> {
        let bad = |m: String| Err(SpinError::InvalidConfig(m));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon {} not in (0, 1)", self.epsilon));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return bad(format!("tau {} must be a positive number", self.tau));
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1".into());
        }
        if self.chunk_size == 0 {
            return bad("chunk_size must be at least 1".into());
        }
        if !self.initial_sp.is_finite() {
            return bad("initial_sp must be finite".into());
        }
        Ok(())
    }
}

/// Social Position values after `iteration` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct SpVector {
    pub values: Vec<f64>,
    pub iteration: usize,
}

impl SpVector {
    pub fn uniform(n: usize, value: f64) -> Self {
        SpVector { values: vec![value; n], iteration: 0 }
    }

    pub fn get(&self, x: MemberId) -> f64 {
        self.values[x.index()]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationLog {
    pub iteration: usize,
    pub duration: Duration,
    pub snapshot: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinResult {
    pub variant: Variant,
    pub sp: SpVector,
    pub iterations: usize,
    pub converged: bool,
    pub log: Vec<IterationLog>,
}

impl SpinResult {
    pub fn ranking(&self) -> Ranking {
        make_ranking(&self.sp.values).expect("social positions are finite")
    }

    pub fn total_duration(&self) -> Duration {
        self.log.iter().map(|l| l.duration).sum()
    }
}

/// One Jacobi step. `prev` is left untouched.
pub fn iterate_once(net: &SocialNetwork, prev: &SpVector, epsilon: f64) -> Result<SpVector, SpinError> {
    let n = net.member_count();
    if prev.values.len() != n {
        return Err(SpinError::LengthMismatch { expected: n, found: prev.values.len() });
    }
    let mut next = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    step_edges(net, &prev.values, &mut next, &mut scratch, epsilon, Execution::Sequential);
    Ok(SpVector { values: next, iteration: prev.iteration + 1 })
}

/// Stop condition between consecutive iterates.
pub fn check_stop(prev: &[f64], next: &[f64], tau: f64, mode: StopMode) -> Result<bool, SpinError> {
    if prev.len() != next.len() {
        return Err(SpinError::LengthMismatch { expected: prev.len(), found: next.len() });
    }
    Ok(match mode {
        StopMode::PerMember => prev.iter().zip(next).all(|(a, b)| (b - a).abs() <= tau),
        StopMode::Sum => {
            let (sa, sb): (f64, f64) = (prev.iter().sum(), next.iter().sum());
            (sb - sa).abs() <= tau
        }
    })
}

pub fn spin_nodes(net: &SocialNetwork, cfg: &SpinConfig) -> Result<SpinResult, SpinError> {
    spin(net, cfg, Variant::Nodes)
}

pub fn spin_edges(net: &SocialNetwork, cfg: &SpinConfig) -> Result<SpinResult, SpinError> {
    spin(net, cfg, Variant::Edges)
}

pub fn spin_hybrid(net: &SocialNetwork, cfg: &SpinConfig) -> Result<SpinResult, SpinError> {
    spin(net, cfg, Variant::Hybrid)
}

/// Iterate until the stop condition holds or `max_iterations` is reached.
/// Non-convergence is reported through `converged`, not as an error.
pub fn spin(net: &SocialNetwork, cfg: &SpinConfig, variant: Variant) -> Result<SpinResult, SpinError> {
    cfg.validate()?;
    let n = net.member_count();
    let mut prev = vec![cfg.initial_sp; n];
    let mut next = vec![0.0; n];
    let mut scratch = match variant {
        Variant::Edges => vec![0.0; n],
        _ => Vec::new(),
    };
    let mut log = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        let start = Instant::now();
        match variant {
            Variant::Nodes => step_nodes(net, &prev, &mut next, cfg.epsilon, cfg.execution),
            Variant::Edges => step_edges(net, &prev, &mut next, &mut scratch, cfg.epsilon, cfg.execution),
            Variant::Hybrid => step_hybrid(net, &prev, &mut next, cfg.epsilon, cfg.chunk_size, cfg.execution),
        }
        let duration = start.elapsed();
        iterations += 1;
        converged = check_stop(&prev, &next, cfg.tau, cfg.stop_mode)?;
        log.push(IterationLog {
            iteration: iterations,
            duration,
            snapshot: cfg.record_snapshots.then(|| next.clone()),
        });
        std::mem::swap(&mut prev, &mut next);
        if converged {
            break;
        }
    }

    Ok(SpinResult {
        variant,
        sp: SpVector { values: prev, iteration: iterations },
        iterations,
        converged,
        log,
    })
}

fn step_nodes(net: &SocialNetwork, prev: &[f64], next: &mut [f64], eps: f64, exec: Execution) {
    let (from, _, weight) = net.edge_arrays();
    fill_indexed(exec, next, |x| {
        let mut acc = 0.0;
        for &e in net.in_edges(x) {
            let y = from[e as usize] as usize;
            // C[y, x] by key from y's row.
            let row = net.out_targets(y);
            let k = row.partition_point(|&t| (t as usize) < x);
            acc += prev[y] * weight[net.out_offset(y) + k];
        }
        (1.0 - eps) + eps * acc
    });
}

fn step_edges(net: &SocialNetwork, prev: &[f64], next: &mut [f64], acc: &mut [f64], eps: f64, exec: Execution) {
    let (from, to, weight) = net.edge_arrays();
    acc.fill(0.0);
    for ((&y, &x), &w) in from.iter().zip(to).zip(weight) {
        acc[x as usize] += prev[y as usize] * w;
    }
    let acc = &*acc;
    fill_indexed(exec, next, |x| (1.0 - eps) + eps * acc[x]);
}

fn step_hybrid(net: &SocialNetwork, prev: &[f64], next: &mut [f64], eps: f64, chunk: usize, exec: Execution) {
    let (from, to, weight) = net.edge_arrays();
    for_each_chunk(exec, next, chunk, |k, block| {
        let start = k * chunk;
        block.fill(0.0);
        for &e in net.in_edges_block(start, start + block.len()) {
            let e = e as usize;
            block[to[e] as usize - start] += prev[from[e] as usize] * weight[e];
        }
        for v in block.iter_mut() {
            *v = (1.0 - eps) + eps * *v;
        }
    });
}

/// `iteration,duration_ms` per iteration.
pub fn write_iteration_log<W: Write>(result: &SpinResult, mut w: W) -> io::Result<()> {
    writeln!(w, "iteration,duration_ms")?;
    for entry in &result.log {
        writeln!(w, "{},{}", entry.iteration, entry.duration.as_secs_f64() * 1e3)?;
    }
    Ok(())
}

/// `member;sp` rows for one vector.
pub fn write_snapshot<W: Write>(net: &SocialNetwork, values: &[f64], mut w: W) -> io::Result<()> {
    for (label, v) in net.labels().iter().zip(values) {
        writeln!(w, "{label};{v}")?;
    }
    Ok(())
}

/// Final `member;sp;rank` table, in member id order.
pub fn write_sp_table<W: Write>(net: &SocialNetwork, result: &SpinResult, mut w: W) -> io::Result<()> {
    let ranking = result.ranking();
    writeln!(w, "member;sp;rank")?;
    for (i, label) in net.labels().iter().enumerate() {
        writeln!(w, "{label};{};{}", result.sp.values[i], ranking.positions[i])?;
    }
    Ok(())
}
