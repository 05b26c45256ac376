//! The `kmf` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::bipoint::bipoint_solve;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::oracle::brute_force;
use crate::rounding::{pseudo_approx, DEFAULT_TRIALS};
use crate::sparsify::{solve_with, SolveOptions};

use super::format::{format_matrix, read_instance, Format};
use super::generate::{gen_euclidean, gen_gap, gen_stars};
use super::report::{ratio, write_csv, write_json, Audit, ExperimentRecord, Method, Row};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "KMF_THREADS";

#[derive(Debug, Parser)]
#[command(name = "kmf", version, about = "Metric k-median: exact, bi-point, pseudo-approximate and pipeline solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one or more instances and report a row per instance.
    Solve(SolveArgs),
    /// Write a generated instance in matrix format.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
        /// Output file (standard output if absent).
        #[arg(long, short, global = true)]
        output: Option<PathBuf>,
    },
    /// Check the metric properties of an instance.
    Validate {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "matrix")]
        format: Format,
    },
}

#[derive(Debug, Subcommand)]
enum GenFamily {
    /// The star instance with integrality gap close to 2.
    Gap {
        #[arg(long)]
        k: usize,
    },
    /// Uniform random points in the unit cube.
    Euclidean {
        #[arg(long)]
        nf: usize,
        #[arg(long)]
        nc: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Well-separated planar stars with random radii and leaf counts.
    Stars {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 6)]
        max_leaves: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, short, required = true)]
    input: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "matrix")]
    format: Format,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    /// Cap on the number of guessed pairs in pipeline mode.
    #[arg(long, default_value_t = 1, conflicts_with = "full_t")]
    t_cap: usize,
    /// Enumerate the full number of guessed pairs (usually hits the guard).
    #[arg(long)]
    full_t: bool,
    #[arg(long, value_enum, default_value = "pipeline")]
    mode: Method,
    /// Also compute the exact optimum and report the ratio.
    #[arg(long)]
    oracle: bool,
    #[arg(long, value_enum, default_value = "csv")]
    out: OutFormat,
    /// Reject asymmetric distance matrices.
    #[arg(long)]
    strict: bool,
    /// Fill in `timeMs`; output is then no longer reproducible.
    #[arg(long)]
    timing: bool,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::GuardExceeded { .. } => EXIT_GUARD,
        Error::InvalidInstance(_)
        | Error::InvalidParameter(_)
        | Error::Parse { .. }
        | Error::Disconnected { .. }
        | Error::UnknownPoint { .. }
        | Error::Io(_) => EXIT_INVALID,
        _ => EXIT_FAILURE,
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidParameter(format!("{THREADS_VAR} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::InvalidParameter(e.to_string()))
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(args) => thread_pool()
            .and_then(|pool| pool.install(|| solve_rows(&args)))
            .and_then(|rows| write_rows(&rows, args.out, out)),
        Command::Gen { family, output } => generate(&family, output, out),
        Command::Validate { input, format } => return validate(&input, format, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn generate(family: &GenFamily, output: Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    let inst = match *family {
        GenFamily::Gap { k } => gen_gap(k)?,
        GenFamily::Euclidean { nf, nc, k, dim, seed } => gen_euclidean(nf, nc, k, dim, seed)?,
        GenFamily::Stars { m, max_leaves, seed } => gen_stars(m, max_leaves, seed)?,
    };
    match output {
        Some(path) => std::fs::write(path, format_matrix(&inst))?,
        None => out.write_all(format_matrix(&inst).as_bytes())?,
    }
    Ok(())
}

fn validate(input: &PathBuf, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let inst = match read_instance(input, format, false) {
        Ok(inst) => inst,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let report = inst.validate();
    if report.is_valid() {
        let _ = writeln!(out, "{}: ok", inst.name());
        EXIT_OK
    } else {
        let _ = writeln!(out, "{}: {} violation(s)", inst.name(), report.violations.len());
        let _ = writeln!(out, "{report}");
        EXIT_INVALID
    }
}

fn solve_rows(args: &SolveArgs) -> Result<Vec<Row>> {
    let instances = args
        .input
        .iter()
        .map(|p| read_instance(p, args.format, args.strict))
        .collect::<Result<Vec<_>>>()?;
    instances
        .par_iter()
        .map(|inst| solve_one(inst, args))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

fn write_rows(rows: &[Row], format: OutFormat, out: &mut dyn Write) -> Result<()> {
    match format {
        OutFormat::Csv => write_csv(rows, out),
        OutFormat::Json => write_json(rows, out),
    }
}

fn solve_one(inst: &Instance, args: &SolveArgs) -> Result<Row> {
    let start = Instant::now();
    let (cost, opened, audit) = match args.mode {
        Method::Exact => {
            let r = brute_force(inst, inst.k())?;
            (r.cost, r.best.len(), None)
        }
        Method::Bipoint => {
            let bp = bipoint_solve(inst)?;
            let mut support: Vec<usize> = bp.s1.ids().iter().chain(bp.s2.ids()).copied().collect();
            support.sort_unstable();
            support.dedup();
            (bp.fractional_cost(), support.len(), Some(Audit::from_bipoint(&bp, support)))
        }
        Method::Pseudo => {
            let p = pseudo_approx(inst, args.eps, args.seed, args.trials)?;
            let open = p.outcome.open.ids().to_vec();
            (p.cost, open.len(), Some(Audit::from_pseudo(&p, open)))
        }
        Method::Pipeline => {
            let opts = SolveOptions {
                eps: args.eps,
                seed: args.seed,
                trials: args.trials,
                t_cap: (!args.full_t).then_some(args.t_cap),
            };
            let rep = solve_with(inst, &opts)?;
            let open = rep.solution.ids().to_vec();
            let mut audit = match &rep.base {
                Some(base) => Audit::from_pseudo(base, open.clone()),
                None => Audit {
                    regime: None,
                    a: 1.0,
                    b: 0.0,
                    d1: rep.cost,
                    d2: rep.cost,
                    lambda1: 0.0,
                    lambda2: 0.0,
                    additive_budget: None,
                    t_full: None,
                    t_enum: None,
                    heuristic_t: None,
                    open: open.clone(),
                },
            };
            audit.t_full = Some(rep.t_full);
            audit.t_enum = Some(rep.t_enum);
            audit.heuristic_t = Some(rep.heuristic_t);
            (rep.cost, open.len(), Some(audit))
        }
    };
    let elapsed = start.elapsed().as_millis() as u64;
    let ratio_vs_opt = if args.oracle {
        Some(ratio(cost, brute_force(inst, inst.k())?.cost))
    } else {
        None
    };
    Ok(Row {
        record: ExperimentRecord {
            instance_name: inst.name().to_string(),
            n_f: inst.n_facilities(),
            n_c: inst.n_clients(),
            k: inst.k(),
            method: args.mode,
            cost,
            opened,
            ratio_vs_opt,
            seed: args.seed,
            time_ms: args.timing.then_some(elapsed),
        },
        audit,
    })
}
