//! `lsk` command line: sketch application, sketched regression,
//! Monte-Carlo verification, and transform benchmarks.
//!
//! Exit codes: 0 success, 2 usage/config error, 3 numeric failure,
//! 4 failed verification check.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lsk::error::Error;
use lsk::io;
use lsk::regress::{solve_plain_exact, solve_plain_sketched, RegressionProblem};
use lsk::verify::{run_check, ExperimentSpec, VerificationReport};
use lsk::{build_sketch, recommend_m, DenseVector, SeedSpec, SketchConfig, SketchKind};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_CHECK_FAILED: u8 = 4;

#[derive(Parser)]
#[command(name = "lsk", version, about = "randomized sketching toolkit")]
struct Cli {
    /// Cap the worker-thread count for parallel trials (results are
    /// identical for any value).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SeedArg {
    /// Master seed; falls back to the LSK_SEED environment variable.
    #[arg(long, env = "LSK_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a sketch to a matrix: writes S*A.
    SketchApply {
        #[arg(long)]
        kind: SketchKind,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Least-squares solve, exact or sketched.
    Regress {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Sketch kind; omitted means an exact solve.
        #[arg(long)]
        sketch: Option<SketchKind>,
        /// Sketch rows; defaults to the recommended count for --eps/--delta.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        /// Constant multiplier on the recommended row count.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[command(flatten)]
        seed: SeedArg,
        /// Solution vector output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one Monte-Carlo check from a JSON config.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time sketch application across input sizes.
    Bench {
        #[arg(long)]
        kind: SketchKind,
        /// Comma-separated input sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 64)]
        m: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
}

/// Verify config: the experiment itself plus optional io/output sections.
#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    experiment: ExperimentSpec,
    #[serde(default)]
    io: IoSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(serde::Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct IoSection {
    /// Report path; the --out flag wins if both are given.
    #[serde(default)]
    report: Option<PathBuf>,
}

#[derive(serde::Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    #[serde(default)]
    pretty: bool,
}

#[derive(serde::Serialize)]
struct RegressSummary {
    m_used: usize,
    clamped: bool,
    residual_norm: f64,
    wall_time: f64,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::RankDeficient(_)
        | Error::NoConvergence(_)
        | Error::NonFinite(_)
        | Error::ZeroColumn(_)
        | Error::ZeroVector => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code_for(err))
}

fn write_matrix_by_ext(path: &Path, m: &lsk::DenseMatrix) -> lsk::Result<()> {
    if path.extension().is_some_and(|e| e == "csv") {
        io::write_matrix_csv(path, m)
    } else {
        io::write_matrix_binary(path, m)
    }
}

fn write_vector_by_ext(path: &Path, v: &DenseVector) -> lsk::Result<()> {
    if path.extension().is_some_and(|e| e == "csv") {
        io::write_vector_csv(path, v)
    } else {
        io::write_vector_binary(path, v)
    }
}

fn cmd_sketch_apply(kind: SketchKind, m: usize, seed: u64, input: &Path, out: &Path) -> ExitCode {
    if kind.is_tensor() {
        eprintln!("error: {kind} applies to tensor inputs; use a plain kind here");
        return ExitCode::from(EXIT_USAGE);
    }
    let start = Instant::now();
    let a = match io::read_matrix(input) {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    let orig_rows = a.rows();
    let n = if kind.needs_pow2() { orig_rows.next_power_of_two() } else { orig_rows };
    let cfg = SketchConfig::new(kind, m, n, SeedSpec::new(seed, 0));
    let result = build_sketch(&cfg).and_then(|s| {
        let padded = if n != a.rows() { a.pad_rows(n)? } else { a };
        s.apply_mat(&padded)
    });
    let sa = match result {
        Ok(sa) => sa,
        Err(e) => return fail(&e),
    };
    if let Err(e) = write_matrix_by_ext(out, &sa) {
        return fail(&e);
    }
    eprintln!("effective n = {n} (input rows = {orig_rows})");
    eprintln!("wall time = {:.6}s", start.elapsed().as_secs_f64());
    ExitCode::SUCCESS
}

#[allow(clippy::too_many_arguments)]
fn cmd_regress(
    a_path: &Path,
    b_path: &Path,
    sketch: Option<SketchKind>,
    m: Option<usize>,
    eps: f64,
    delta: f64,
    c: f64,
    seed: u64,
    out: &Path,
) -> ExitCode {
    let start = Instant::now();
    let loaded = io::read_matrix(a_path).and_then(|a| Ok((a, io::read_vector(b_path)?)));
    let (a, b) = match loaded {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    let d = a.cols();
    let problem = match RegressionProblem::plain(a, b) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let solved = match sketch {
        None => solve_plain_exact(&problem).map(|s| (s, false)),
        Some(kind) => {
            if kind.is_tensor() {
                eprintln!("error: {kind} applies to tensor inputs; use a plain kind here");
                return ExitCode::from(EXIT_USAGE);
            }
            let RegressionProblem::Plain { a, .. } = &problem else { unreachable!() };
            let n = if kind.needs_pow2() { a.rows().next_power_of_two() } else { a.rows() };
            let (m_used, clamped) = match m {
                Some(m) => (m, false),
                None => match recommend_m(kind, eps, delta, n, d, c) {
                    Ok(rec) => (rec.m, rec.clamped),
                    Err(e) => return fail(&e),
                },
            };
            if n != a.rows() {
                eprintln!("padding rows {} -> {n}", a.rows());
            }
            let cfg = SketchConfig::new(kind, m_used, n, SeedSpec::new(seed, 0));
            solve_plain_sketched(&problem, &cfg).map(|s| (s, clamped))
        }
    };
    let (solution, clamped) = match solved {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    if let Err(e) = write_vector_by_ext(out, &solution.x) {
        return fail(&e);
    }
    let summary = RegressSummary {
        m_used: solution.stats.m,
        clamped,
        residual_norm: solution.residual_norm,
        wall_time: start.elapsed().as_secs_f64(),
    };
    println!("{}", serde_json::to_string(&summary).expect("summary serializes"));
    ExitCode::SUCCESS
}

fn cmd_verify(config_path: &Path, out: &Path) -> ExitCode {
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => return fail(&Error::Io(e)),
    };
    let config: ConfigFile = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: bad config {}: {e}", config_path.display());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Err(e) = config.experiment.validate() {
        eprintln!("error: bad config {}: {e}", config_path.display());
        return ExitCode::from(EXIT_USAGE);
    }
    let report: VerificationReport = match run_check(&config.experiment) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let json = if config.output.pretty {
        serde_json::to_string_pretty(&report)
    } else {
        serde_json::to_string(&report)
    }
    .expect("report serializes");
    let report_path = config.io.report.as_deref().unwrap_or(out);
    if let Err(e) = std::fs::write(report_path, json + "\n") {
        return fail(&Error::Io(e));
    }
    if report.overall_pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("check {} failed; report at {}", report.check, report_path.display());
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn cmd_bench(kind: SketchKind, sizes: &[usize], reps: usize, m: usize, seed: u64) -> ExitCode {
    if sizes.is_empty() {
        eprintln!("error: --sizes is empty");
        return ExitCode::from(EXIT_USAGE);
    }
    if kind.is_tensor() {
        eprintln!("error: bench applies plain vectors; use a plain kind");
        return ExitCode::from(EXIT_USAGE);
    }
    if reps == 1 {
        eprintln!("warning: reps = 1 gives a noisy median");
    }
    let mut medians = Vec::new();
    println!("n,median_seconds");
    for &n in sizes {
        let n_eff = if kind.needs_pow2() { n.next_power_of_two() } else { n };
        if n_eff != n {
            eprintln!("padding n = {n} -> {n_eff}");
        }
        let cfg = SketchConfig::new(kind, m, n_eff, SeedSpec::new(seed, 0));
        let sketch = match build_sketch(&cfg) {
            Ok(s) => s,
            Err(e) => return fail(&e),
        };
        let rng = lsk::rng::CounterRng::new(&SeedSpec::new(seed, 1));
        let v = DenseVector::new((0..n_eff).map(|i| rng.gaussian_at(i as u64)).collect());
        let mut times = Vec::with_capacity(reps.max(1));
        for _ in 0..reps.max(1) {
            let t = Instant::now();
            let out = sketch.apply_vec(&v);
            let dt = t.elapsed().as_secs_f64();
            if let Err(e) = out {
                return fail(&e);
            }
            times.push(dt);
        }
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = times[times.len() / 2];
        println!("{n_eff},{median:.9}");
        medians.push((n_eff, median));
    }
    for pair in medians.windows(2) {
        let (n0, t0) = pair[0];
        let (n1, t1) = pair[1];
        let measured = t1 / t0;
        let predicted =
            (n1 as f64 * (n1 as f64).ln()) / (n0 as f64 * (n0 as f64).ln());
        eprintln!("ratio {n0} -> {n1}: measured {measured:.3}, n log n predicts {predicted:.3}");
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match cli.command {
        Command::SketchApply { kind, m, seed, input, out } => {
            cmd_sketch_apply(kind, m, seed.seed, &input, &out)
        }
        Command::Regress { a, b, sketch, m, eps, delta, c, seed, out } => {
            cmd_regress(&a, &b, sketch, m, eps, delta, c, seed.seed, &out)
        }
        Command::Verify { config, out } => cmd_verify(&config, &out),
        Command::Bench { kind, sizes, reps, m, seed } => {
            cmd_bench(kind, &sizes, reps, m, seed.seed)
        }
    }
}
