//! `spinrank` command-line front end.
//!
//! Data files use `;` separators; timing and summary tables use `,`. Results
//! go to stdout unless `--out` is given, progress goes to stderr.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spinrank::bench::{bench_degree, bench_spin, ratio_rows, write_bench_csv, write_ratio_csv, BenchError};
use spinrank::cdr::{ingest_file, write_outputs, IngestOptions};
use spinrank::centrality::{compute, write_scores, Measure};
use spinrank::commitment::TimeDecayConfig;
use spinrank::graph::sort_labels;
use spinrank::io::{create, load_network, open, read_edge_list, read_node_list, read_scores, save_network, write_edge_list};
use spinrank::netgen::{generate, read_grid, standard_grid, GenSpec, WeightMode};
use spinrank::ranking::write_ranking;
use spinrank::spin::{write_iteration_log, write_snapshot, write_sp_table};
use spinrank::{
    commitment_network, duplicate_stats, kendall, make_ranking, redistribute_inactive, sp_distribution, spin,
    time_decayed_commitment, ActivityMatrix, Execution, SocialNetwork, SpinConfig, StopMode, Variant,
};

const LOG_DIR_ENV: &str = "SPINRANK_LOG_DIR";

#[derive(Parser, Debug)]
#[command(name = "spinrank", version, about = "Social Position ranking for directed interaction networks")]
struct Cli {
    /// Worker threads for data-parallel loops; sequential when omitted.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// Seed for generated networks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress progress messages.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Clean call-detail records and emit commitment edge files.
    Ingest {
        cdr: PathBuf,
        #[arg(long, default_value_t = 3)]
        min_duration: u64,
        #[arg(long)]
        out_dir: PathBuf,
        /// Skip malformed lines instead of failing.
        #[arg(long)]
        lenient: bool,
    },
    /// Turn raw activity rows into a commitment edge list.
    Commit {
        edges: PathBuf,
        #[arg(long, value_enum, default_value_t = CommitMode::Count)]
        mode: CommitMode,
        #[arg(long, default_value_t = 0.9)]
        lambda: f64,
        #[arg(long, default_value_t = 12)]
        periods: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Iterate Social Position to convergence.
    Spin {
        nodes: PathBuf,
        edges: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Edges)]
        variant: VariantArg,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 1e-5)]
        tau: f64,
        #[arg(long, value_enum, default_value_t = StopArg::PerMember)]
        stop: StopArg,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        #[arg(long, default_value_t = 8192)]
        chunk_size: usize,
        /// Directory for the iteration log and per-iteration snapshots.
        #[arg(long)]
        log_dir: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Classical centrality and prestige measures.
    Centrality {
        nodes: PathBuf,
        edges: PathBuf,
        #[arg(long, value_parser = parse_measure)]
        measure: Measure,
        #[arg(long)]
        normalized: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Competition ranking of a `member;score` table.
    Rank {
        scores: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Kendall's coefficient between two score tables over the same members.
    Compare { a: PathBuf, b: PathBuf },
    /// Class distribution and duplicate report of a score table.
    Stats { scores: PathBuf },
    /// Generate a random commitment network.
    Gen {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long, value_enum, default_value_t = WeightArg::Uniform)]
        weights: WeightArg,
        #[arg(long)]
        allow_isolated: bool,
        /// Write `nodes.txt` and `edges.txt` here instead of the edge list to stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Time the variants over a grid of generated networks.
    Bench {
        /// Grid file of `nodes,edges,seed` rows, or `standard` for the 5 x 5 grid.
        #[arg(long, default_value = "standard")]
        grid: String,
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        epsilon: Vec<f64>,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "nodes,edges,hybrid")]
        variants: Vec<VariantArg>,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        /// Fixed iteration count per run.
        #[arg(long, default_value_t = 10)]
        iterations: usize,
        /// Also time in- and out-degree.
        #[arg(long)]
        degree: bool,
        /// Write the ratio table against the edges variant here.
        #[arg(long)]
        ratios: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug)]
struct OutArg {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum CommitMode {
    Count,
    Duration,
    Decay,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VariantArg {
    Nodes,
    Edges,
    Hybrid,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Nodes => Variant::Nodes,
            VariantArg::Edges => Variant::Edges,
            VariantArg::Hybrid => Variant::Hybrid,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum StopArg {
    PerMember,
    Sum,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum WeightArg {
    Uniform,
    Unit,
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse()
}

/// Exit 1 for bad input, 2 for a broken internal invariant.
enum Failure {
    Input(String),
    Invariant(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type Res<T = ()> = Result<T, Failure>;

struct Ctx {
    exec: Execution,
    seed: u64,
    quiet: bool,
}

impl Ctx {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn output(out: &OutArg) -> io::Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Res {
    let exec = match cli.threads {
        Some(n) if n > 1 => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global()?;
            Execution::Parallel
        }
        _ => Execution::Sequential,
    };
    let ctx = Ctx { exec, seed: cli.seed, quiet: cli.quiet };
    match cli.command {
        Command::Ingest { cdr, min_duration, out_dir, lenient } => ingest(&ctx, &cdr, min_duration, &out_dir, lenient),
        Command::Commit { edges, mode, lambda, periods, out } => commit(&ctx, &edges, mode, lambda, periods, &out),
        Command::Spin { nodes, edges, variant, epsilon, tau, stop, max_iter, chunk_size, log_dir, out } => {
            let cfg = SpinConfig {
                epsilon,
                tau,
                stop_mode: match stop {
                    StopArg::PerMember => StopMode::PerMember,
                    StopArg::Sum => StopMode::Sum,
                },
                max_iterations: max_iter,
                chunk_size,
                execution: ctx.exec,
                ..SpinConfig::default()
            };
            let log_dir = std::env::var_os(LOG_DIR_ENV).map(PathBuf::from).or(log_dir);
            run_spin(&ctx, &nodes, &edges, variant.into(), cfg, log_dir.as_deref(), &out)
        }
        Command::Centrality { nodes, edges, measure, normalized, out } => {
            let net = load_network(&nodes, &edges)?;
            ctx.note(format!("{} members, {} edges", net.member_count(), net.edge_count()));
            let scores = compute(&net, measure, normalized, ctx.exec);
            let mut w = output(&out)?;
            write_scores(&net, &scores, &edges.display().to_string(), &mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::Rank { scores, out } => {
            let rows = read_scores(open(&scores)?)?;
            let values: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let ranking = make_ranking(&values)?;
            let mut w = output(&out)?;
            write_ranking(&rows, &ranking, &mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::Compare { a, b } => compare(&a, &b),
        Command::Stats { scores } => {
            let values: Vec<f64> = read_scores(open(&scores)?)?.into_iter().map(|r| r.1).collect();
            print!("{}", sp_distribution(&values));
            println!();
            print!("{}", duplicate_stats(&values));
            Ok(())
        }
        Command::Gen { nodes, edges, weights, allow_isolated, out_dir } => {
            let spec = GenSpec {
                weight_mode: match weights {
                    WeightArg::Uniform => WeightMode::UniformNormalized,
                    WeightArg::Unit => WeightMode::Unit,
                },
                allow_isolated,
                ..GenSpec::new(nodes, edges, ctx.seed)
            };
            let net = generate(&spec)?;
            ctx.note(format!("generated {} members, {} edges", net.member_count(), net.edge_count()));
            match out_dir {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    save_network(&net, &dir.join("nodes.txt"), &dir.join("edges.txt"))?;
                }
                None => {
                    let mut w = BufWriter::new(io::stdout().lock());
                    write_edge_list(&net, &mut w)?;
                    w.flush()?;
                }
            }
            Ok(())
        }
        Command::Bench { grid, epsilon, variants, repetitions, iterations, degree, ratios, out } => {
            bench(&ctx, &grid, &epsilon, &variants, repetitions, iterations, degree, ratios.as_deref(), &out)
        }
    }
}

fn ingest(ctx: &Ctx, cdr: &Path, min_duration: u64, out_dir: &Path, lenient: bool) -> Res {
    let outcome = ingest_file(cdr, IngestOptions { min_duration_s: min_duration, lenient })?;
    write_outputs(&outcome, out_dir)?;
    if !ctx.quiet {
        outcome.summary.write_to(io::stderr().lock())?;
    }
    Ok(())
}

fn commit(ctx: &Ctx, path: &Path, mode: CommitMode, lambda: f64, periods: usize, out: &OutArg) -> Res {
    let decay = (mode == CommitMode::Decay).then(|| TimeDecayConfig::new(lambda, periods)).transpose()?;
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut flat = Vec::new();
    let mut periodic = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split(';').map(str::trim).collect();
        let bad = |what: &str| format!("{}:{}: {what}", path.display(), i + 1);
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("`{s}` is not a number")));
        match (mode, f.len()) {
            (CommitMode::Decay, 4) => {
                let p = f[2].parse::<usize>().map_err(|_| bad("period must be a non-negative integer"))?;
                periodic.push((f[0].to_owned(), f[1].to_owned(), p, num(f[3])?));
            }
            (CommitMode::Decay, _) => return Err(bad("expected `A;B;PERIOD;ACTIVITY`").into()),
            (_, 3) => flat.push((f[0].to_owned(), f[1].to_owned(), num(f[2])?)),
            (CommitMode::Count, 4) => flat.push((f[0].to_owned(), f[1].to_owned(), num(f[2])?)),
            (CommitMode::Duration, 4) => flat.push((f[0].to_owned(), f[1].to_owned(), num(f[3])?)),
            _ => return Err(bad("expected `A;B;ACTIVITY` or `A;B;CALLS;DURATION_S`").into()),
        }
    }
    let net = match decay {
        Some(cfg) => redistribute_inactive(&time_decayed_commitment(
            &ActivityMatrix::from_labelled_periods(periodic, cfg.periods)?,
            &cfg,
        )?)?,
        None => commitment_network(&ActivityMatrix::from_labelled(flat)?)?,
    };
    ctx.note(format!("{} members, {} commitment edges", net.member_count(), net.edge_count()));
    let mut w = output(out)?;
    write_edge_list(&net, &mut w)?;
    w.flush()?;
    Ok(())
}

/// The edge file is read as raw commitment and normalised, so inactive
/// members get their answering edges.
fn load_commitment(nodes: &Path, edges: &Path) -> Res<SocialNetwork> {
    let mut labels = read_node_list(open(nodes)?)?;
    sort_labels(&mut labels);
    let rows = read_edge_list(open(edges)?)?;
    let index: std::collections::HashMap<&str, u32> =
        labels.iter().enumerate().map(|(i, l)| (l.as_str(), i as u32)).collect();
    let mut acts = ActivityMatrix::new(labels.clone());
    for (a, b, w) in &rows {
        let id = |l: &str| index.get(l).copied().ok_or_else(|| format!("edge references unlisted member `{l}`"));
        acts.add(id(a)?, id(b)?, *w)?;
    }
    Ok(commitment_network(&acts)?)
}

fn run_spin(
    ctx: &Ctx,
    nodes: &Path,
    edges: &Path,
    variant: Variant,
    mut cfg: SpinConfig,
    log_dir: Option<&Path>,
    out: &OutArg,
) -> Res {
    cfg.validate()?;
    cfg.record_snapshots = log_dir.is_some();
    let net = load_commitment(nodes, edges)?;
    ctx.note(format!("{} members, {} edges, variant {}", net.member_count(), net.edge_count(), variant.name()));
    let result = spin(&net, &cfg, variant)?;
    ctx.note(format!(
        "{} after {} iterations ({:.3} ms)",
        if result.converged { "converged" } else { "stopped" },
        result.iterations,
        result.total_duration().as_secs_f64() * 1e3
    ));
    if let Some(dir) = log_dir {
        fs::create_dir_all(dir)?;
        let mut w = create(&dir.join("iterations.csv"))?;
        write_iteration_log(&result, &mut w)?;
        w.flush()?;
        for entry in &result.log {
            if let Some(values) = &entry.snapshot {
                let mut w = create(&dir.join(format!("sp_iter_{}.txt", entry.iteration)))?;
                write_snapshot(&net, values, &mut w)?;
                w.flush()?;
            }
        }
    }
    let mut w = output(out)?;
    write_sp_table(&net, &result, &mut w)?;
    w.flush()?;
    Ok(())
}

fn compare(a: &Path, b: &Path) -> Res {
    let xs = read_scores(open(a)?)?;
    let mut ys: std::collections::HashMap<String, f64> = read_scores(open(b)?)?.into_iter().collect();
    if xs.len() != ys.len() {
        return Err(format!("{} has {} members, {} has {}", a.display(), xs.len(), b.display(), ys.len()).into());
    }
    let mut left = Vec::with_capacity(xs.len());
    let mut right = Vec::with_capacity(xs.len());
    for (member, v) in xs {
        let w = ys.remove(&member).ok_or_else(|| format!("member `{member}` missing from {}", b.display()))?;
        left.push(v);
        right.push(w);
    }
    let k = kendall(&make_ranking(&left)?, &make_ranking(&right)?)?;
    println!("{k:?}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn bench(
    ctx: &Ctx,
    grid: &str,
    epsilons: &[f64],
    variants: &[VariantArg],
    repetitions: usize,
    iterations: usize,
    degree: bool,
    ratios: Option<&Path>,
    out: &OutArg,
) -> Res {
    let base = SpinConfig { tau: f64::MIN_POSITIVE, max_iterations: iterations, execution: ctx.exec, ..SpinConfig::default() };
    for &e in epsilons {
        SpinConfig { epsilon: e, ..base.clone() }.validate()?;
    }
    let specs = if grid == "standard" { standard_grid(ctx.seed) } else { read_grid(open(Path::new(grid))?)? };
    let variants: Vec<Variant> = variants.iter().map(|&v| v.into()).collect();
    let mut records = Vec::new();
    for spec in &specs {
        ctx.note(format!("{} nodes, {} edges", spec.node_count, spec.edge_count));
        let net = generate(spec)?;
        for &e in epsilons {
            let cfg = SpinConfig { epsilon: e, ..base.clone() };
            match bench_spin(&net, &cfg, &variants, repetitions) {
                Ok(r) => records.extend(r),
                Err(e @ BenchError::VariantMismatch { .. }) => return Err(Failure::Invariant(e.to_string())),
                Err(e) => return Err(e.into()),
            }
        }
        if degree {
            records.extend(bench_degree(&net, repetitions));
        }
    }
    let mut w = output(out)?;
    write_bench_csv(&records, &mut w)?;
    w.flush()?;
    if let Some(path) = ratios {
        let mut w = create(path)?;
        write_ratio_csv(&ratio_rows(&records), &mut w)?;
        w.flush()?;
    }
    Ok(())
}
