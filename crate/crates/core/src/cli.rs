//! Command-line surface.
//!
//! Primary output goes to `out` and is byte-identical for identical inputs,
//! flags and seed. Wall-clock timings and diagnostics go to `err`.
//!
//! Settings resolve as: command-line flag, then the TOML file named by
//! `DOMSET_CONFIG`, then built-in defaults.
//!
//! Exit codes: 0 success, 2 input error, 3 internal invariant violation,
//! 4 constraint unsatisfied.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::affinity::{coassociation, consensus};
use crate::bench::{self, GenParams};
use crate::cdsc::{self, AlphaMode, CdscConfig, ConstrainedProgram};
use crate::dsets::{peel_off_enumerate, ExtractConfig, PeelStop};
use crate::dynamics::{Solver, SolverConfig};
use crate::error::{Error, Result};
use crate::io::{self, GraphInput};
use crate::scod::{scod, ScodConfig, DEFAULT_NEIGHBOR_FRACTION};
use crate::types::{AffinityMatrix, BuildMode, IndexSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const EXIT_CONSTRAINT: i32 = 4;

/// Environment variable naming the TOML config file.
pub const CONFIG_ENV: &str = "DOMSET_CONFIG";

#[derive(Debug, Parser)]
#[command(name = "domset", version, about = "Dominant-set clustering toolkit")]
pub struct Cli {
    /// Worker threads for parallel sections [default: 1].
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Config file; overrides the DOMSET_CONFIG variable.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract dominant-set clusters from an affinity matrix.
    Cluster(ClusterArgs),
    /// Find the constrained dominant set containing given vertices.
    Cdsc(CdscArgs),
    /// Cluster with outlier detection.
    Scod(ScodArgs),
    /// Run a benchmark suite.
    Bench(BenchArgs),
    /// Consensus partition of several labelings.
    Consensus(ConsensusArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverArg {
    Replicator,
    Inimdyn,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Replicator => Solver::Replicator,
            SolverArg::Inimdyn => Solver::InImDyn,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaModeArg {
    Eigen,
    MaxDegree,
}

impl From<AlphaModeArg> for AlphaMode {
    fn from(m: AlphaModeArg) -> Self {
        match m {
            AlphaModeArg::Eigen => AlphaMode::Eigen,
            AlphaModeArg::MaxDegree => AlphaMode::MaxDegree,
        }
    }
}

/// Solver flags shared by the clustering commands.
#[derive(Debug, Clone, Args)]
pub struct SolverFlags {
    #[arg(long, value_enum)]
    pub solver: Option<SolverArg>,
    /// Stopping tolerance of the dynamics.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Repair asymmetric or negative input instead of rejecting it.
    #[arg(long)]
    pub symmetrize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClusterMode {
    Peel,
    Constrained,
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    /// Dense matrix or edge-list file.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "peel")]
    pub mode: ClusterMode,
    /// Stop peeling when fewer vertices remain.
    #[arg(long)]
    pub min_size: Option<usize>,
    #[arg(long)]
    pub max_clusters: Option<usize>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Clone, Args)]
pub struct CdscArgs {
    /// Dense matrix or edge-list file.
    pub input: PathBuf,
    /// Comma-separated constraint vertex ids.
    #[arg(long, value_delimiter = ',', required = true)]
    pub constraints: Vec<usize>,
    /// `auto` or a positive value.
    #[arg(long, default_value = "auto")]
    pub alpha: String,
    #[arg(long, value_enum)]
    pub alpha_mode: Option<AlphaModeArg>,
    /// Use the localized solver and report working-subgraph sizes.
    #[arg(long)]
    pub fast: bool,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Clone, Args)]
pub struct ScodArgs {
    /// Dense matrix, edge-list or labeled point file.
    pub input: PathBuf,
    #[arg(long)]
    pub neighbor_fraction: Option<f64>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    ScodSynthetic,
    FastcdscSpeed,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Seeds per configuration (scod-synthetic) or queries (fastcdsc-speed).
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Clusters (scod-synthetic).
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Points per cluster (scod-synthetic).
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    /// Dimensions to sweep (scod-synthetic).
    #[arg(long, value_delimiter = ',', default_value = "32")]
    pub d: Vec<usize>,
    /// Noise levels to sweep (scod-synthetic).
    #[arg(long, value_delimiter = ',', default_value = "0.2")]
    pub sigma: Vec<f64>,
    /// Outlier counts to sweep (scod-synthetic).
    #[arg(long, value_delimiter = ',', default_value = "100")]
    pub l: Vec<usize>,
    #[arg(long)]
    pub neighbor_fraction: Option<f64>,
    /// Clique count (fastcdsc-speed).
    #[arg(long, default_value_t = 20)]
    pub cliques: usize,
    /// Clique size (fastcdsc-speed).
    #[arg(long, default_value_t = 100)]
    pub clique_size: usize,
    /// Weight of random cross-clique edges (fastcdsc-speed).
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Probability of a cross-clique edge (fastcdsc-speed).
    #[arg(long, default_value_t = 0.0)]
    pub noise_prob: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ConsensusArgs {
    /// One label vector per line.
    pub input: PathBuf,
    #[arg(long)]
    pub min_size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Contents of the `DOMSET_CONFIG` file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub solver: Option<SolverArg>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub seed: Option<u64>,
    pub min_size: Option<usize>,
    pub neighbor_fraction: Option<f64>,
    pub alpha_mode: Option<AlphaModeArg>,
    pub jobs: Option<usize>,
    pub runs: Option<usize>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&io::read_text(path)?)
    }
}

/// Settings after applying precedence.
#[derive(Debug, Clone, PartialEq)]
struct Resolved {
    solver: Solver,
    solver_config: SolverConfig,
    seed: u64,
}

impl Resolved {
    fn new(flags: &SolverFlags, file: &FileConfig) -> Result<Self> {
        let defaults = SolverConfig::default();
        let solver_config = SolverConfig {
            tolerance: flags.tolerance.or(file.tolerance).unwrap_or(defaults.tolerance),
            max_iterations: flags.max_iterations.or(file.max_iterations).unwrap_or(defaults.max_iterations),
            ..defaults
        };
        solver_config.validate()?;
        Ok(Resolved {
            solver: flags.solver.or(file.solver).map(Solver::from).unwrap_or_default(),
            solver_config,
            seed: flags.seed.or(file.seed).unwrap_or(0),
        })
    }

    fn echo(&self) -> String {
        let solver = match self.solver {
            Solver::Replicator => "replicator",
            Solver::InImDyn => "inimdyn",
        };
        format!(
            "# config solver={solver} tolerance={:e} max_iterations={} seed={}",
            self.solver_config.tolerance, self.solver_config.max_iterations, self.seed
        )
    }
}

/// Maps a library error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ConstraintUnsatisfied { .. } => EXIT_CONSTRAINT,
        Error::ZeroDenominator
        | Error::NotOnSimplex(_)
        | Error::UnassignedVertex { .. }
        | Error::SingularAfterRegularization
        | Error::NotDominant => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the exit code. `env_config` is the value of `DOMSET_CONFIG`.
pub fn run<I, T>(argv: I, env_config: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli, env_config, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, env_config: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let file = match cli.config.as_deref().or(env_config) {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let jobs = cli.jobs.or(file.jobs).unwrap_or(1);
    if jobs == 0 {
        return Err(Error::invalid("jobs", "must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Error::invalid("jobs", e.to_string()))?;
    let (mut buf, mut diag) = (Vec::new(), Vec::new());
    let status = pool.install(|| match &cli.command {
        Command::Cluster(a) => cmd_cluster(a, &file, &mut buf, &mut diag),
        Command::Cdsc(a) => cmd_cdsc(a, &file, &mut buf, &mut diag),
        Command::Scod(a) => cmd_scod(a, &file, &mut buf, &mut diag),
        Command::Bench(a) => cmd_bench(a, &file, &mut buf, &mut diag),
        Command::Consensus(a) => cmd_consensus(a, &file, &mut buf, &mut diag),
    });
    let _ = err.write_all(&diag);
    status?;
    out.write_all(&buf).map_err(|e| Error::Io(e.to_string()))
}

fn w(out: &mut Vec<u8>, line: impl AsRef<str>) {
    out.extend_from_slice(line.as_ref().as_bytes());
    out.push(b'\n');
}

fn time(err: &mut dyn Write, phase: &str, start: Instant) {
    let _ = writeln!(err, "# time {phase} {:.6}", start.elapsed().as_secs_f64());
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read_input(path: &Path, out: &mut Vec<u8>) -> Result<String> {
    let text = io::read_text(path)?;
    w(out, format!("# input_sha256 {}", digest(text.as_bytes())));
    Ok(text)
}

fn build_mode(flags: &SolverFlags) -> BuildMode {
    if flags.symmetrize {
        BuildMode::Symmetrize
    } else {
        BuildMode::Strict
    }
}

fn read_matrix(path: &Path, mode: BuildMode, out: &mut Vec<u8>) -> Result<AffinityMatrix> {
    match io::parse_graph_input(&read_input(path, out)?, mode)? {
        GraphInput::Matrix(a) => Ok(a),
        GraphInput::Points(_) => Err(Error::invalid("input", "expected a matrix or edge list, found labeled points")),
    }
}

fn cmd_cluster(args: &ClusterArgs, file: &FileConfig, out: &mut Vec<u8>, err: &mut Vec<u8>) -> Result<()> {
    let r = Resolved::new(&args.solver, file)?;
    let start = Instant::now();
    let a = read_matrix(&args.input, build_mode(&args.solver), out)?;
    time(err, "read", start);
    let min_size = args.min_size.or(file.min_size).unwrap_or(PeelStop::default().min_cluster_size);
    w(out, format!("{} mode={:?} min_size={min_size}", r.echo(), args.mode).to_lowercase());
    let n = a.n();
    let start = Instant::now();
    let clusters: Vec<(IndexSet, f64)> = if a.is_all_zero() {
        Vec::new()
    } else {
        match args.mode {
            ClusterMode::Peel => {
                let cfg = ExtractConfig { solver: r.solver, solver_config: r.solver_config, seed: r.seed };
                let stop = PeelStop { min_cluster_size: min_size, max_clusters: args.max_clusters };
                peel_off_enumerate(&a, stop, &cfg)?.clusters.into_iter().map(|c| (c.support, c.cohesiveness)).collect()
            }
            ClusterMode::Constrained => {
                let cfg = CdscConfig { solver: r.solver, solver_config: r.solver_config, ..CdscConfig::default() };
                let found = cdsc::enumerate_all_constrained(&a, &cfg)?;
                let labels = cdsc::resolve_overlaps(&found, n)?;
                let mut out = Vec::new();
                for (c, cluster) in found.iter().enumerate() {
                    let members = IndexSet::new((0..n).filter(|&i| labels[i] == c));
                    if !members.is_empty() {
                        out.push((members, cluster.objective));
                    }
                }
                out.truncate(args.max_clusters.unwrap_or(usize::MAX));
                out
            }
        }
    };
    time(err, "solve", start);
    let mut labels = vec![None; n];
    for (c, (support, _)) in clusters.iter().enumerate() {
        for &i in support.iter() {
            labels[i] = Some(c);
        }
    }
    out.extend_from_slice(io::format_assignment(&labels).as_bytes());
    w(out, format!("# clusters {}", clusters.len()));
    w(out, format!("# unassigned {}", labels.iter().filter(|l| l.is_none()).count()));
    for (c, (support, coh)) in clusters.iter().enumerate() {
        w(out, format!("# cluster {c} size {} cohesiveness {coh:.9}", support.len()));
    }
    Ok(())
}

fn cmd_cdsc(args: &CdscArgs, file: &FileConfig, out: &mut Vec<u8>, err: &mut Vec<u8>) -> Result<()> {
    let r = Resolved::new(&args.solver, file)?;
    let a = read_matrix(&args.input, build_mode(&args.solver), out)?;
    let q = IndexSet::new(args.constraints.iter().copied());
    q.check_bound(a.n())?;
    let mode: AlphaMode = args.alpha_mode.or(file.alpha_mode).map(AlphaMode::from).unwrap_or_default();
    let fixed_alpha = match args.alpha.as_str() {
        "auto" => None,
        v => {
            let alpha: f64 = v.parse().map_err(|_| Error::invalid("alpha", format!("expected `auto` or a number, found `{v}`")))?;
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::invalid("alpha", "must be positive"));
            }
            Some(alpha)
        }
    };
    let cfg = CdscConfig { solver: r.solver, solver_config: r.solver_config, alpha_mode: mode, fixed_alpha, ..CdscConfig::default() };
    w(out, format!("{} alpha={} alpha_mode={mode:?} fast={}", r.echo(), args.alpha, args.fast).to_lowercase());
    let start = Instant::now();
    let (cluster, sizes) = if args.fast {
        let t = cdsc::fast_cdsc_traced(&a, &q, &cfg)?;
        (t.cluster, Some(t.subgraph_sizes))
    } else {
        let alpha = fixed_alpha.unwrap_or_else(|| cdsc::default_alpha(&a, &q, mode, cfg.alpha_margin));
        let prog = ConstrainedProgram::new(&a, q.clone(), alpha)?;
        (cdsc::solve_cdsc(&prog, cfg.solver, &cfg.solver_config)?, None)
    };
    time(err, "solve", start);
    let labels: Vec<Option<usize>> = (0..a.n()).map(|i| cluster.support.contains(i).then_some(0)).collect();
    out.extend_from_slice(io::format_assignment(&labels).as_bytes());
    w(out, format!("# alpha {:.9}", cluster.alpha));
    w(out, format!("# size {}", cluster.support.len()));
    w(out, format!("# objective {:.9}", cluster.objective));
    w(out, format!("# satisfied_constraints {}", join(cluster.satisfied_constraints.iter())));
    for &i in cluster.support.iter() {
        w(out, format!("# membership {i} {:.9}", cluster.memberships.get(i)));
    }
    if let Some(sizes) = sizes {
        w(out, format!("# subgraph_sizes {}", join(sizes.iter())));
    }
    Ok(())
}

fn join<T: std::fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_scod(args: &ScodArgs, file: &FileConfig, out: &mut Vec<u8>, err: &mut Vec<u8>) -> Result<()> {
    let r = Resolved::new(&args.solver, file)?;
    let fraction = args.neighbor_fraction.or(file.neighbor_fraction).unwrap_or(DEFAULT_NEIGHBOR_FRACTION);
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid("neighbor_fraction", "must lie in (0, 1]"));
    }
    let start = Instant::now();
    let text = read_input(&args.input, out)?;
    let (a, truth) = match io::parse_graph_input(&text, build_mode(&args.solver))? {
        GraphInput::Matrix(a) => (a, None),
        GraphInput::Points(p) => (bench::point_affinity(&p.points)?, Some(p.labels)),
    };
    time(err, "read", start);
    w(out, format!("{} neighbor_fraction={fraction}", r.echo()));
    let cfg = ScodConfig { neighbor_fraction: fraction, solver: r.solver, solver_config: r.solver_config, seed: r.seed };
    let start = Instant::now();
    let result = scod(&a, &cfg)?;
    time(err, "solve", start);
    let labels = result.labels(a.n());
    out.extend_from_slice(io::format_assignment(&labels).as_bytes());
    w(out, format!("# global_cohesiveness {:.9}", result.global_cohesiveness));
    w(out, format!("# clusters {}", result.clusters.len()));
    w(out, format!("# outliers {}", result.outliers().len()));
    for (c, cl) in result.clusters.iter().enumerate() {
        w(out, format!("# cluster {c} size {} cohesiveness {:.9} learned_cohesiveness {:.9}", cl.support.len(), cl.cohesiveness, result.learned_cohesiveness[c]));
    }
    if let Some(truth) = truth {
        let s = bench::score_labels(&labels, &truth)?;
        w(out, format!("# jaccard {:.6}", s.jaccard));
        w(out, format!("# v_measure {:.6}", s.v_measure));
        w(out, format!("# purity {:.6}", s.purity));
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs, file: &FileConfig, out: &mut Vec<u8>, err: &mut Vec<u8>) -> Result<()> {
    let seed = args.seed.or(file.seed).unwrap_or(0);
    match args.suite {
        Suite::ScodSynthetic => {
            let runs = args.runs.or(file.runs).unwrap_or(30);
            let fraction = args.neighbor_fraction.or(file.neighbor_fraction).unwrap_or(DEFAULT_NEIGHBOR_FRACTION);
            let cfg = ScodConfig { neighbor_fraction: fraction, ..ScodConfig::default() };
            w(out, format!("# suite scod-synthetic runs={runs} seed={seed} k={} m={} neighbor_fraction={fraction}", args.k, args.m));
            w(out, "l d sigma seed jaccard v_measure purity clusters outliers");
            let mut medians = Vec::new();
            for &l in &args.l {
                for &d in &args.d {
                    for &sigma in &args.sigma {
                        let params = GenParams { k: args.k, m: args.m, d, sigma, l, seed };
                        let start = Instant::now();
                        let rows = bench::scod_sweep(params, runs, seed, &cfg)?;
                        time(err, &format!("l={l} d={d} sigma={sigma}"), start);
                        for row in &rows {
                            let s = row.scores;
                            w(out, format!("{l} {d} {sigma} {} {:.6} {:.6} {:.6} {} {}", row.params.seed, s.jaccard, s.v_measure, s.purity, s.clusters, s.outliers));
                        }
                        if let Some(m) = bench::sweep_medians(&rows) {
                            medians.push((l, d, sigma, m));
                        }
                    }
                }
            }
            for (l, d, sigma, (j, v, p)) in medians {
                w(out, format!("# median l={l} d={d} sigma={sigma} jaccard {j:.6} v_measure {v:.6} purity {p:.6}"));
            }
        }
        Suite::FastcdscSpeed => {
            let runs = args.runs.or(file.runs).unwrap_or(100);
            let a = bench::clique_grid(args.cliques, args.clique_size, args.noise, args.noise_prob, seed)?;
            let queries = bench::sample_queries(a.n(), runs, seed);
            w(out, format!("# suite fastcdsc-speed cliques={} clique_size={} noise={} noise_prob={} queries={} seed={seed}", args.cliques, args.clique_size, args.noise, args.noise_prob, queries.len()));
            w(out, "query max_subgraph same_support");
            let rows = bench::fastcdsc_speed(&a, &queries, &CdscConfig::default())?;
            let _ = writeln!(err, "query full_seconds fast_seconds ratio");
            for row in &rows {
                w(out, format!("{} {} {}", row.query, row.max_subgraph, row.same_support));
                let _ = writeln!(err, "{} {:.6} {:.6} {:.1}", row.query, row.full_seconds, row.fast_seconds, row.ratio);
            }
            if !rows.is_empty() {
                let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
                let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
                let _ = writeln!(err, "# ratio min {min:.1} median {:.1}", bench::median(&ratios).unwrap_or(0.0));
            }
            w(out, format!("# all_same_support {}", rows.iter().all(|r| r.same_support)));
            w(out, format!("# max_subgraph {}", rows.iter().map(|r| r.max_subgraph).max().unwrap_or(0)));
        }
    }
    Ok(())
}

fn cmd_consensus(args: &ConsensusArgs, file: &FileConfig, out: &mut Vec<u8>, err: &mut Vec<u8>) -> Result<()> {
    let text = read_input(&args.input, out)?;
    let clusterings = io::parse_clusterings(&text)?;
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let min_size = args.min_size.or(file.min_size).unwrap_or(1);
    w(out, format!("# config labelings={} min_size={min_size} seed={seed}", clusterings.len()));
    let start = Instant::now();
    let co = coassociation(&clusterings)?;
    let n = co.as_affinity().n();
    let labels = if co.as_affinity().is_all_zero() {
        vec![None; n]
    } else {
        let cfg = ExtractConfig { seed, ..ExtractConfig::default() };
        consensus(&co, PeelStop { min_cluster_size: min_size, max_clusters: None }, &cfg)?.labels(n)
    };
    time(err, "solve", start);
    // Leftover items were never grouped with anything; each labeled one is
    // its own cluster.
    let mut labels = labels;
    let mut next = labels.iter().flatten().max().map_or(0, |m| m + 1);
    for (i, l) in labels.iter_mut().enumerate() {
        if l.is_none() && clusterings.iter().any(|c| c[i] >= 0) {
            *l = Some(next);
            next += 1;
        }
    }
    out.extend_from_slice(io::format_assignment(&labels).as_bytes());
    w(out, format!("# clusters {next}"));
    Ok(())
}
