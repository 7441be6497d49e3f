//! Per-iteration timing of the SPIN variants and of degree centrality.

use std::io::{self, Write};
use std::time::Instant;

use thiserror::Error;

use crate::centrality::{degree, DegreeMode};
use crate::netgen::{generate, GenSpec, NetgenError};
use crate::spin::{spin, SpinConfig, SpinError, Variant};
use crate::graph::SocialNetwork;

/// Variants must agree to this absolute tolerance before timings are reported.
pub const VARIANT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("variants {a} and {b} disagree at member {member} by {diff:e}")]
    VariantMismatch { a: &'static str, b: &'static str, member: usize, diff: f64 },
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Netgen(#[from] NetgenError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    /// Variant name, suffixed with `/parallel` for parallel runs.
    pub variant: String,
    pub node_count: usize,
    pub edge_count: usize,
    pub epsilon: f64,
    pub iteration_durations_ms: Vec<f64>,
    /// Iterations per run.
    pub iterations: usize,
}

impl BenchRecord {
    pub fn mean_ms(&self) -> f64 {
        let d = &self.iteration_durations_ms;
        d.iter().sum::<f64>() / d.len() as f64
    }

    /// Population standard deviation of the iteration times.
    pub fn std_ms(&self) -> f64 {
        let d = &self.iteration_durations_ms;
        let mean = self.mean_ms();
        (d.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d.len() as f64).sqrt()
    }

    pub fn median_ms(&self) -> f64 {
        median(&self.iteration_durations_ms)
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn millis(d: std::time::Duration) -> f64 {
    // Keep every recorded duration strictly positive.
    (d.as_secs_f64() * 1e3).max(1e-6)
}

fn variant_label(v: Variant, cfg: &SpinConfig) -> String {
    if cfg.execution.is_parallel() {
        format!("{}/parallel", v.name())
    } else {
        v.name().to_owned()
    }
}

/// Time each variant `repetitions` times with the same configuration, after
/// one untimed warm-up iteration. The final vectors of all variants must agree
/// within [`VARIANT_TOLERANCE`].
pub fn bench_spin(
    net: &SocialNetwork,
    cfg: &SpinConfig,
    variants: &[Variant],
    repetitions: usize,
) -> Result<Vec<BenchRecord>, BenchError> {
    let repetitions = repetitions.max(1);
    let mut records = Vec::with_capacity(variants.len());
    let mut reference: Option<(Variant, Vec<f64>)> = None;
    for &v in variants {
        let warm = SpinConfig { max_iterations: 1, ..cfg.clone() };
        spin(net, &warm, v)?;

        let mut durations = Vec::new();
        let mut iterations = 0;
        let mut last = Vec::new();
        for _ in 0..repetitions {
            let r = spin(net, cfg, v)?;
            durations.extend(r.log.iter().map(|l| millis(l.duration)));
            iterations = r.iterations;
            last = r.sp.values;
        }
        match &reference {
            None => reference = Some((v, last)),
            Some((rv, rsp)) => {
                if let Some((member, diff)) = rsp
                    .iter()
                    .zip(&last)
                    .map(|(a, b)| (a - b).abs())
                    .enumerate()
                    .find(|&(_, d)| !(d <= VARIANT_TOLERANCE))
                {
                    return Err(BenchError::VariantMismatch { a: rv.name(), b: v.name(), member, diff });
                }
            }
        }
        records.push(BenchRecord {
            variant: variant_label(v, cfg),
            node_count: net.member_count(),
            edge_count: net.edge_count(),
            epsilon: cfg.epsilon,
            iteration_durations_ms: durations,
            iterations,
        });
    }
    Ok(records)
}

/// Time in-degree and out-degree computation `repetitions` times.
pub fn bench_degree(net: &SocialNetwork, repetitions: usize) -> Vec<BenchRecord> {
    [(DegreeMode::In, "indegree"), (DegreeMode::Out, "outdegree")]
        .into_iter()
        .map(|(mode, name)| {
            let durations = (0..repetitions.max(1))
                .map(|_| {
                    let t = Instant::now();
                    std::hint::black_box(degree(net, mode, false));
                    millis(t.elapsed())
                })
                .collect();
            BenchRecord {
                variant: name.to_owned(),
                node_count: net.member_count(),
                edge_count: net.edge_count(),
                epsilon: f64::NAN,
                iteration_durations_ms: durations,
                iterations: 1,
            }
        })
        .collect()
}

/// Generate every network of `grid` and benchmark `variants` on it.
pub fn bench_grid(
    grid: &[GenSpec],
    cfg: &SpinConfig,
    variants: &[Variant],
    repetitions: usize,
) -> Result<Vec<BenchRecord>, BenchError> {
    let mut out = Vec::with_capacity(grid.len() * variants.len());
    for spec in grid {
        let net = generate(spec)?;
        out.extend(bench_spin(&net, cfg, variants, repetitions)?);
    }
    Ok(out)
}

/// `variant,nodes,edges,epsilon,mean_iter_ms,std_iter_ms,iterations`
pub fn write_bench_csv<W: Write>(records: &[BenchRecord], mut w: W) -> io::Result<()> {
    writeln!(w, "variant,nodes,edges,epsilon,mean_iter_ms,std_iter_ms,iterations")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{:.6},{:.6},{}",
            r.variant,
            r.node_count,
            r.edge_count,
            r.epsilon,
            r.mean_ms(),
            r.std_ms(),
            r.iterations
        )?;
    }
    Ok(())
}

/// Processing-time ratios against the edges variant for one network size.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub node_count: usize,
    pub edge_count: usize,
    pub nodes_over_edges: f64,
    pub hybrid_over_edges: f64,
}

/// One row per network that has all three variants, in first-seen order.
pub fn ratio_rows(records: &[BenchRecord]) -> Vec<RatioRow> {
    let mut sizes: Vec<(usize, usize)> = Vec::new();
    for r in records {
        if !sizes.contains(&(r.node_count, r.edge_count)) {
            sizes.push((r.node_count, r.edge_count));
        }
    }
    sizes
        .into_iter()
        .filter_map(|(n, e)| {
            let mean = |name: &str| {
                records
                    .iter()
                    .find(|r| r.node_count == n && r.edge_count == e && r.variant.split('/').next() == Some(name))
                    .map(BenchRecord::mean_ms)
            };
            let edges = mean("edges")?;
            Some(RatioRow {
                node_count: n,
                edge_count: e,
                nodes_over_edges: mean("nodes")? / edges,
                hybrid_over_edges: mean("hybrid")? / edges,
            })
        })
        .collect()
}

pub fn write_ratio_csv<W: Write>(rows: &[RatioRow], mut w: W) -> io::Result<()> {
    writeln!(w, "nodes,edges,nodes_over_edges,hybrid_over_edges")?;
    for r in rows {
        writeln!(w, "{},{},{:.4},{:.4}", r.node_count, r.edge_count, r.nodes_over_edges, r.hybrid_over_edges)?;
    }
    Ok(())
}
