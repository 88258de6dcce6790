//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for invalid input (bad flags, malformed or
//! infeasible files, oversized oracle requests), 3 for environment failures
//! (file system, missing solver).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::bench::{default_time_limit, generate, run_experiment, to_csv, AlphaClass, ExperimentConfig, GeneratorSpec};
use crate::bounds::{recognize_polynomial_case, BoundReport};
use crate::error::{Error, Result};
use crate::exact::{brute_force, DEFAULT_LIMIT_N};
use crate::instance::{Instance, Time};
use crate::metaheuristics::{ClockMode, Method, SearchConfig, DEFAULT_K_MAX};
use crate::milp::{export_lp, solve_external, Formulation};
use crate::schedule::{decode, validate, Schedule};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ENVIRONMENT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "p2s1", version, about = "Two-machine single-server scheduling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write seeded random instances to a directory.
    Generate(GenerateArgs),
    /// Run one metaheuristic on one instance.
    Solve(SolveArgs),
    /// Print lower bounds and the polynomial-case verdict.
    Bound(BoundArgs),
    /// Find the best permutation by exhaustive search (small instances only).
    Oracle(OracleArgs),
    /// Write a MILP model in LP format, optionally solving it externally.
    ExportMilp(ExportArgs),
    /// Run a full experiment and write the CSV report.
    Bench(BenchArgs),
    /// Check a schedule file against an instance.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Time budget per run in seconds (default depends on n).
    #[arg(long)]
    tmax: Option<f64>,
    /// Deepest shake.
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    kmax: usize,
    /// Measure time as decodes divided by this rate instead of wall time,
    /// making runs reproducible.
    #[arg(long, value_name = "DECODES_PER_SECOND")]
    virtual_clock: Option<u64>,
    /// Keep searching after reaching the lower bound.
    #[arg(long)]
    no_lb_stop: bool,
}

impl SearchArgs {
    fn time_limit(&self) -> Result<Option<Duration>> {
        self.tmax
            .map(|s| {
                Duration::try_from_secs_f64(s)
                    .ok()
                    .filter(|d| !d.is_zero())
                    .ok_or_else(|| Error::invalid(format!("--tmax must be a positive number of seconds, got {s}")))
            })
            .transpose()
    }

    fn clock(&self) -> ClockMode {
        match self.virtual_clock {
            Some(rate) => ClockMode::Virtual {
                evaluations_per_second: rate,
            },
            None => ClockMode::Wall,
        }
    }

    fn config(&self, n: usize) -> Result<SearchConfig> {
        Ok(SearchConfig {
            time_limit: self.time_limit()?.unwrap_or_else(|| default_time_limit(n)),
            k_max: self.kmax,
            seed: self.seed,
            clock: self.clock(),
            stop_at_lower_bound: !self.no_lb_stop,
            ..SearchConfig::default()
        })
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "a1")]
    alpha: AlphaClass,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instances to generate.
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Draw one ratio per job for loading and unloading.
    #[arg(long)]
    shared_alpha: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value = "gvns1")]
    method: Method,
    #[command(flatten)]
    search: SearchArgs,
    /// Write the improvement trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the schedule to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundArgs {
    instance: PathBuf,
    /// Also report the idle times of this schedule.
    #[arg(long)]
    schedule: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = DEFAULT_LIMIT_N)]
    limit: usize,
}

#[derive(Debug, Args)]
struct ExportArgs {
    instance: PathBuf,
    /// cf, cf+, tif or tif+.
    #[arg(long, default_value = "cf")]
    form: Formulation,
    /// Time horizon for tif+ (default: the GVNS-I makespan).
    #[arg(long)]
    horizon: Option<Time>,
    #[command(flatten)]
    search: SearchArgs,
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solve the model with this external solver executable.
    #[arg(long)]
    solver: Option<String>,
    /// Solver time limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    solver_tmax: f64,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Job counts, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Ratio classes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "a1,a2,a3")]
    alpha: Vec<AlphaClass>,
    /// Methods, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "gvns1,gvns2,grasp")]
    method: Vec<Method>,
    /// Runs per instance and method.
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Instances per (n, alpha) cell.
    #[arg(long, default_value_t = 10)]
    instances: usize,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Use the exhaustive optimum as stopping target for n <= 10.
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    search: SearchArgs,
    /// CSV output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    instance: PathBuf,
    schedule: PathBuf,
}

/// Maps an error to its exit code.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::InvalidInput(_) | Error::Parse { .. } | Error::TooLarge { .. } => EXIT_INVALID,
        Error::Environment(_) | Error::Protocol { .. } | Error::Io { .. } => EXIT_ENVIRONMENT,
    }
}

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors go to stderr; help and version output is a result.
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_INVALID;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(cli.command) {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write output: {e}");
                EXIT_ENVIRONMENT
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn execute(command: Command) -> Result<String> {
    match command {
        Command::Generate(a) => cmd_generate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::ExportMilp(a) => cmd_export(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<String> {
    let spec = GeneratorSpec {
        shared_alpha: a.shared_alpha,
        ..GeneratorSpec::new(a.n, a.alpha, a.seed).with_replications(a.reps)
    };
    let instances = generate(&spec)?;
    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    let mut report = String::new();
    for inst in instances {
        let label = inst.meta().expect("generated instances carry metadata").label();
        let path = a.out.join(format!("{label}.txt"));
        inst.write(&path)?;
        let _ = writeln!(report, "{}", path.display());
    }
    Ok(report)
}

fn cmd_solve(a: SolveArgs) -> Result<String> {
    let instance = Instance::read(&a.instance)?;
    let config = SearchConfig {
        record_trace: a.trace.is_some(),
        ..a.search.config(instance.n())?
    };
    let result = a.method.run(&instance, &config)?;
    let schedule = decode(&instance, &result.best)?;
    if let Some(path) = &a.trace {
        write_file(path, &result.trace_csv())?;
    }
    let mut text = format!(
        "method {}\nmakespan {}\npermutation {}\n",
        a.method, result.makespan, result.best
    );
    match &a.out {
        Some(path) => write_file(path, &schedule.to_text())?,
        None => text.push_str(&schedule.to_text()),
    }
    Ok(text)
}

fn cmd_bound(a: BoundArgs) -> Result<String> {
    let instance = Instance::read(&a.instance)?;
    let report = match &a.schedule {
        Some(path) => BoundReport::with_schedule(&instance, &Schedule::read(&instance, path)?)?,
        None => BoundReport::new(&instance),
    };
    let mut text = format!("LB1={}\nLB2={}\nLBT={}\n", report.lb1, report.lb2, report.lb_t);
    match recognize_polynomial_case(&instance) {
        Some(r) => {
            let _ = writeln!(
                text,
                "polynomial case: {} (optimal makespan {})",
                r.case, r.optimal_makespan
            );
        }
        None => text.push_str("polynomial case: none\n"),
    }
    if let Some(idle) = report.idle {
        let _ = writeln!(
            text,
            "idle M1={} M2={} total={}",
            idle.per_machine[0], idle.per_machine[1], idle.total
        );
    }
    Ok(text)
}

fn cmd_oracle(a: OracleArgs) -> Result<String> {
    let instance = Instance::read(&a.instance)?;
    let r = brute_force(&instance, a.limit)?;
    Ok(format!(
        "makespan {}\npermutation {}\noptimal_permutations {}\nexamined {}\n",
        r.makespan, r.permutation, r.optimal_count, r.examined
    ))
}

fn cmd_export(a: ExportArgs) -> Result<String> {
    let instance = Instance::read(&a.instance)?;
    let horizon = match (a.form, a.horizon) {
        (Formulation::TifPlus, None) => {
            let config = a.search.config(instance.n())?;
            Some(Method::GvnsI.run(&instance, &config)?.makespan)
        }
        (_, h) => h,
    };
    let model = a.form.build(&instance, horizon)?;
    let lp = export_lp(&model);
    let mut text = String::new();
    match &a.out {
        Some(path) => write_file(path, &lp)?,
        None => text.push_str(&lp),
    }
    if let Some(solver) = &a.solver {
        let limit = Duration::try_from_secs_f64(a.solver_tmax)
            .map_err(|_| Error::invalid(format!("--solver-tmax must be non-negative, got {}", a.solver_tmax)))?;
        match solve_external(&model, solver, limit)? {
            Some(s) => {
                let _ = writeln!(text, "objective {}", s.objective);
                if let Some(b) = s.bound {
                    let _ = writeln!(text, "bound {b}");
                }
            }
            None => text.push_str("objective none (time limit)\n"),
        }
    }
    Ok(text)
}

fn cmd_bench(a: BenchArgs) -> Result<String> {
    if a.instances == 0 {
        return Err(Error::invalid("--instances must be at least 1"));
    }
    let mut cells = Vec::new();
    for &n in &a.n {
        for &alpha in &a.alpha {
            cells.push(GeneratorSpec::new(n, alpha, a.search.seed).with_replications(a.instances));
        }
    }
    let config = ExperimentConfig {
        replications: a.reps,
        time_limit: a.search.time_limit()?,
        k_max: a.search.kmax,
        master_seed: a.search.seed,
        clock: a.search.clock(),
        threads: a.threads,
        stop_at_lower_bound: !a.search.no_lb_stop,
        oracle_limit: a.oracle.then_some(DEFAULT_LIMIT_N),
        ..ExperimentConfig::default()
    };
    let csv = to_csv(&run_experiment(&cells, &a.method, &config)?)?;
    match &a.out {
        Some(path) => {
            write_file(path, &csv)?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}

fn cmd_validate(a: ValidateArgs) -> Result<String> {
    let instance = Instance::read(&a.instance)?;
    let schedule = Schedule::read(&instance, &a.schedule)?;
    let violations = validate(&instance, &schedule);
    if violations.is_empty() {
        return Ok(format!("valid makespan {}\n", schedule.makespan));
    }
    let list: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
    Err(Error::invalid(format!(
        "schedule has {} violation(s):\n{}",
        violations.len(),
        list.join("\n")
    )))
}
