//! `posflow`: solve, inspect and export linear-cost control problems for
//! positive systems from the command line.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use posflow::bellman::{self, SolveOptions, Status};
use posflow::distsim::{self, DistOptions, DistRun, ScheduleKind, ScheduleSpec};
use posflow::lp::{self, LpForm};
use posflow::network::{self, CoolingConfig, FlowOptions, GraphSpec};
use posflow::policy;
use posflow::{io as pio, Error, ProblemData};

const EXIT_VALIDATION: u8 = 2;
const EXIT_DIVERGED: u8 = 3;
const EXIT_MAX_ITER: u8 = 4;
const EXIT_STEP_LIMIT: u8 = 5;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_NO_INPUT: u8 = 66;
const EXIT_IO: u8 = 74;

#[derive(Debug, Parser)]
#[command(
    name = "posflow",
    version,
    about = "Optimal control of positive linear systems with coupled input constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check dimensions, signs and both structural assumptions.
    Validate { problem: PathBuf },
    /// Value iteration for the linear cost vector.
    Solve(SolveArgs),
    /// Solve, then print the optimal feedback and optionally simulate it.
    Policy(PolicyArgs),
    /// Write the equivalent linear program.
    LpExport(LpArgs),
    /// Turn a graph description into a problem file.
    Build(BuildArgs),
    /// Write a random cooling network as a graph description.
    Generate(GenerateArgs),
    /// Simulate asynchronous distributed value iteration.
    Distsim(DistArgs),
}

#[derive(Debug, Args)]
struct SolveFlags {
    #[arg(long, default_value_t = bellman::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = bellman::DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long, default_value_t = bellman::DEFAULT_DIVERGENCE_CAP)]
    divergence_cap: f64,
    /// Run on instances that fail validation.
    #[arg(long)]
    allow_invalid: bool,
}

impl SolveFlags {
    fn options(&self) -> Result<SolveOptions, Failure> {
        if !(self.tol > 0.0) {
            return Err(Failure::usage(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Failure::usage("--max-iter must be at least 1"));
        }
        if !(self.divergence_cap > 0.0) {
            return Err(Failure::usage("--divergence-cap must be positive"));
        }
        let mut opts = SolveOptions::default()
            .with_tol(self.tol)
            .with_max_iter(self.max_iter)
            .with_divergence_cap(self.divergence_cap);
        opts.allow_invalid = self.allow_invalid;
        Ok(opts)
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    problem: PathBuf,
    #[command(flatten)]
    flags: SolveFlags,
    /// Per-coordinate iterate CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PolicyArgs {
    problem: PathBuf,
    #[command(flatten)]
    flags: SolveFlags,
    /// Initial state for a closed-loop simulation, comma separated.
    #[arg(long, value_delimiter = ',')]
    x0: Option<Vec<f64>>,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Trajectory CSV, needs --x0.
    #[arg(long, requires = "x0")]
    trajectory: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LpFormat {
    Lp,
    Mps,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LpFormArg {
    Corrected,
    Printed,
}

#[derive(Debug, Args)]
struct LpArgs {
    problem: PathBuf,
    #[arg(long, value_enum, default_value_t = LpFormat::Lp)]
    format: LpFormat,
    /// Sign convention of the reduced-cost rows.
    #[arg(long, value_enum, default_value_t = LpFormArg::Corrected)]
    form: LpFormArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BuildMode {
    /// Shortest path: identity dynamics, incidence-matrix inputs.
    Sp,
    /// Heat flow with retention, diffusion and lossy pipes.
    Flow,
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[arg(value_enum)]
    mode: BuildMode,
    graph: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Accept one-way pipes in flow mode.
    #[arg(long)]
    allow_one_way: bool,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 26)]
    nodes: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Uniform,
    RoundRobin,
    Fair,
}

#[derive(Debug, Args)]
struct DistArgs {
    problem: PathBuf,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Uniform)]
    schedule: ScheduleArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Window length for the fair schedule, default 2n.
    #[arg(long)]
    window: Option<usize>,
    /// Delay bound on neighbor reads.
    #[arg(long, default_value_t = 0)]
    delay: usize,
    /// Step limit.
    #[arg(long, default_value_t = distsim::DEFAULT_STEP_LIMIT)]
    steps: usize,
    #[arg(long, default_value_t = distsim::DEFAULT_OBSERVER_TOL)]
    observer_tol: f64,
    /// `step,agent,p_hat` CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// `step,p_1,...,p_n` CSV.
    #[arg(long)]
    wide: Option<PathBuf>,
    /// Keep each agent's minimizing input.
    #[arg(long)]
    record_argmin: bool,
    #[arg(long)]
    allow_invalid: bool,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
    /// Printed to stdout before exiting.
    payload: Option<Value>,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into(), payload: None }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }

    fn with_payload(mut self, payload: Value) -> Self {
        self.payload = Some(payload);
        self
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidInstance(_) => EXIT_VALIDATION,
            Error::InvalidParameter(_) => EXIT_USAGE,
            Error::Dimension(_)
            | Error::IndexOutOfRange { .. }
            | Error::Format(_)
            | Error::Json(_)
            | Error::Graph(_) => EXIT_DATA,
            _ => 1,
        };
        let payload = match &e {
            Error::InvalidInstance(report) => serde_json::to_value(report).ok(),
            _ => None,
        };
        Failure { code, message: e.to_string(), payload }
    }
}

/// A successful run: stdout payload and exit code.
struct Outcome {
    payload: Value,
    code: u8,
}

impl Outcome {
    fn ok(payload: Value) -> Self {
        Self { payload, code: 0 }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| {
        let code = if e.kind() == io::ErrorKind::NotFound { EXIT_NO_INPUT } else { EXIT_IO };
        Failure::new(code, format!("{}: {e}", path.display()))
    })
}

fn write_output(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<ProblemData, Failure> {
    let text = read_input(path)?;
    let prob = pio::problem_from_json(&text)?;
    prob.check_dimensions()?;
    Ok(prob)
}

fn status_code(status: Status) -> u8 {
    match status {
        Status::FixedPoint => 0,
        Status::Diverged => EXIT_DIVERGED,
        Status::MaxIterations => EXIT_MAX_ITER,
    }
}

fn cmd_validate(problem: &Path) -> Result<Outcome, Failure> {
    let prob = pio::problem_from_json(&read_input(problem)?)?;
    let report = posflow::validate(&prob);
    let code = if report.is_clean() { 0 } else { EXIT_VALIDATION };
    Ok(Outcome { payload: serde_json::to_value(&report).expect("report serializes"), code })
}

fn cmd_solve(args: &SolveArgs) -> Result<Outcome, Failure> {
    let mut opts = args.flags.options()?;
    let prob = load_problem(&args.problem)?;
    opts.record_trace = args.trace.is_some();
    let report = bellman::value_iterate(&prob, &opts)?;
    if let (Some(path), Some(csv)) = (&args.trace, report.trace_csv()) {
        write_output(path, &csv)?;
    }
    Ok(Outcome { payload: serde_json::to_value(&report).expect("report serializes"), code: status_code(report.status) })
}

fn cmd_policy(args: &PolicyArgs) -> Result<Outcome, Failure> {
    let opts = args.flags.options()?;
    let prob = load_problem(&args.problem)?;
    let report = bellman::value_iterate(&prob, &opts)?;
    if report.status != Status::FixedPoint {
        let payload = json!({"status": report.status, "iterations": report.iterations});
        return Err(Failure::new(status_code(report.status), "value iteration did not converge; no policy")
            .with_payload(payload));
    }
    let pol_opts = policy::PolicyOptions { allow_invalid: args.flags.allow_invalid, ..Default::default() };
    let pol = policy::extract_policy_with(&prob, &report.p, &pol_opts)?;
    let mut payload = json!({
        "p": report.p,
        "iterations": report.iterations,
        "policy": policy::policy_json(&prob, &pol)?,
    });
    if let Some(x0) = &args.x0 {
        if x0.len() != prob.n() {
            return Err(Failure::usage(format!("--x0 has {} entries, the problem has {} states", x0.len(), prob.n())));
        }
        if x0.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Failure::usage("--x0 must be nonnegative"));
        }
        let traj = policy::simulate_closed_loop(&prob, &pol, x0, args.steps)?;
        if let Some(path) = &args.trajectory {
            write_output(path, &traj.to_csv())?;
        }
        let predicted = posflow::linalg::dot(&report.p, x0);
        let tail = posflow::linalg::dot(&report.p, traj.states.last().expect("trajectory has a start"));
        payload["simulation"] = json!({
            "steps": args.steps,
            "total_cost": traj.total_cost,
            "predicted": predicted,
            "tail": tail,
        });
    }
    Ok(Outcome::ok(payload))
}

fn cmd_lp_export(args: &LpArgs) -> Result<Outcome, Failure> {
    let prob = load_problem(&args.problem)?;
    let form = match args.form {
        LpFormArg::Corrected => LpForm::Corrected,
        LpFormArg::Printed => LpForm::AsPrinted,
    };
    let model = lp::build_lp_with(&prob, form)?;
    let text = match args.format {
        LpFormat::Lp => lp::export_lp_text(&model),
        LpFormat::Mps => lp::export_mps_text(&model),
    };
    match &args.output {
        Some(path) => {
            write_output(path, &text)?;
            Ok(Outcome::ok(json!({"written": path, "rows": model.rows.len(), "variables": model.num_vars()})))
        }
        None => {
            print!("{text}");
            Ok(Outcome { payload: Value::Null, code: 0 })
        }
    }
}

fn cmd_build(args: &BuildArgs) -> Result<Outcome, Failure> {
    let graph = GraphSpec::from_json(&read_input(&args.graph)?)?;
    let prob = match args.mode {
        BuildMode::Sp => network::build_shortest_path(&graph)?,
        BuildMode::Flow => {
            network::build_flow_network_with(&graph, &FlowOptions { require_pipe_pairs: !args.allow_one_way })?
        }
    };
    emit_text(args.output.as_deref(), &pio::problem_to_json(&prob))
}

fn cmd_generate(args: &GenerateArgs) -> Result<Outcome, Failure> {
    let graph =
        network::generate_cooling_instance(&CoolingConfig::new(args.nodes, args.seed)).map_err(|e| match e {
            Error::InvalidParameter(m) => Failure::usage(m),
            other => Failure::from(other),
        })?;
    emit_text(args.output.as_deref(), &graph.to_json())
}

/// Writes a JSON document to `output`, or to stdout.
fn emit_text(output: Option<&Path>, text: &str) -> Result<Outcome, Failure> {
    match output {
        Some(path) => {
            write_output(path, text)?;
            Ok(Outcome::ok(json!({"written": path})))
        }
        None => Ok(Outcome::ok(serde_json::from_str(text).expect("valid json"))),
    }
}

fn cmd_distsim(args: &DistArgs) -> Result<Outcome, Failure> {
    if !(args.observer_tol > 0.0) {
        return Err(Failure::usage("--observer-tol must be positive"));
    }
    let prob = load_problem(&args.problem)?;
    let kind = match args.schedule {
        ScheduleArg::Uniform => ScheduleKind::UniformRandom { seed: args.seed },
        ScheduleArg::RoundRobin => ScheduleKind::RoundRobin,
        ScheduleArg::Fair => ScheduleKind::FairWindow { seed: args.seed, window: args.window.unwrap_or(2 * prob.n()) },
    };
    let opts = DistOptions {
        delay: args.delay,
        delay_seed: args.seed,
        record_argmin: args.record_argmin,
        allow_invalid: args.allow_invalid,
    };
    let mut run = DistRun::new(&prob, ScheduleSpec::new(kind).with_step_limit(args.steps), opts)?;
    let result = run.run(args.observer_tol)?;
    if let Some(path) = &args.trace {
        write_output(path, &run.trace_csv())?;
    }
    if let Some(path) = &args.wide {
        write_output(path, &run.wide_csv())?;
    }
    let mut payload = serde_json::to_value(&result).expect("result serializes");
    if args.record_argmin {
        payload["argmin"] = run.agents.iter().map(|a| a.argmin.and_then(|c| c.index())).collect::<Vec<_>>().into();
    }
    Ok(Outcome { payload, code: if result.converged { 0 } else { EXIT_STEP_LIMIT } })
}

fn dispatch(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Validate { problem } => cmd_validate(problem),
        Command::Solve(a) => cmd_solve(a),
        Command::Policy(a) => cmd_policy(a),
        Command::LpExport(a) => cmd_lp_export(a),
        Command::Build(a) => cmd_build(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Distsim(a) => cmd_distsim(a),
    }
}

fn print_payload(payload: &Value) {
    if payload.is_null() {
        return;
    }
    let mut out = io::stdout().lock();
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(payload).expect("payload serializes"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match dispatch(&cli.command) {
        Ok(outcome) => {
            print_payload(&outcome.payload);
            ExitCode::from(outcome.code)
        }
        Err(failure) => {
            if let Some(p) = &failure.payload {
                print_payload(p);
            }
            eprintln!("posflow: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
