use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsteer::format::{GraphFile, PolicyFile};
use qsteer::report::{render_records, OutputFormat, ResultRow};
use qsteer::sweep;
use qsteer::{parse_state, policy_table, read_measurement_set, read_policy, sig6, simulate_parallel, state_labels};
use qsteer::{worker_pool, Error, Result};
use qsteer_core::graph::DEFAULT_MAX_STATES;
use qsteer_core::{
    build_standard_set, enumerate_reachable, evaluate_policy_exact, make_naive_policy, make_s1_policy,
    solve_max_fidelity, solve_max_success, solve_min_arrival, ArrivalOptions, DensityMatrix, MeasurementSet, Policy,
    PolicyKind, SimulationSummary, StateGraph, Target,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "qsteer",
    version,
    about = "Optimal measurement-selection policies for steering a quantum state"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the optimal policy and print its value.
    Solve(RunArgs),
    /// Exact value of a policy.
    Evaluate(RunArgs),
    /// Monte Carlo estimate of a policy's value, alongside the exact value.
    Simulate(RunArgs),
    /// Sweep horizon or set size.
    Sweep {
        #[arg(value_enum)]
        figure: Figure,
        #[command(flatten)]
        range: SweepArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Enumerate and export the reachable-state graph.
    Graph(RunArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, value_enum, default_value_t = Objective::Success)]
    objective: Objective,
    /// Size of the standard measurement set.
    #[arg(short = 'T')]
    t: Option<usize>,
    /// Number of measurements (finite-horizon objectives).
    #[arg(short = 'N')]
    n: Option<usize>,
    /// Measurement set in JSON instead of the standard set.
    #[arg(long)]
    set_file: Option<PathBuf>,
    /// Basis index, `+`, `-`, `mixed`, or amplitudes `a,b` / `re:im,...`.
    #[arg(long, default_value = "0")]
    initial: String,
    #[arg(long, default_value = "1")]
    target: String,
    /// Fidelity-squared slack when deciding that a state is the target.
    #[arg(long, default_value_t = qsteer_core::state::DEFAULT_TARGET_EPS)]
    eps: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Policy for `evaluate` and `simulate`.
    #[arg(long, value_enum, default_value_t = PolicyChoice::Optimal)]
    policy: PolicyChoice,
    /// Policy JSON (as written by `solve --output`) for `evaluate` and `simulate`.
    #[arg(long)]
    policy_file: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
    max_states: usize,
    /// Step cap for stationary-policy trajectories.
    #[arg(long, default_value_t = 10_000)]
    max_steps: usize,
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[arg(long, default_value_t = 3)]
    n_min: usize,
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    /// Set sizes for fig2.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    t_values: Vec<usize>,
    /// Set-size range for fig3.
    #[arg(long, default_value_t = 2)]
    t_min: usize,
    #[arg(long, default_value_t = 30)]
    t_max: usize,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Objective {
    Success,
    Fidelity,
    Arrival,
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum PolicyChoice {
    Optimal,
    Naive,
    S1,
}

#[derive(ValueEnum, Clone, Copy)]
enum Figure {
    /// Naive vs optimal success, T = N = n_min..=n_max.
    Fig1,
    /// Optimal success for each T in t_values, N = n_min..=n_max.
    Fig2,
    /// Minimal expected arrival time, T = t_min..=t_max.
    Fig3,
}

impl Objective {
    fn name(self) -> &'static str {
        match self {
            Objective::Success => "success",
            Objective::Fidelity => "fidelity",
            Objective::Arrival => "arrival",
        }
    }
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Table => OutputFormat::Table,
        }
    }
}

/// Validated inputs shared by every subcommand.
struct Setup {
    set: MeasurementSet,
    t: usize,
    n: Option<usize>,
    initial: DensityMatrix,
    target: Target,
}

fn setup(args: &RunArgs, needs_horizon: bool) -> Result<Setup> {
    let finite = args.objective != Objective::Arrival;
    if !finite && args.n.is_some() {
        return Err(Error::Config("-N is not used with --objective arrival".into()));
    }
    if !(0.0..1.0).contains(&args.eps) {
        return Err(Error::Config(format!("--eps must lie in [0, 1), got {}", args.eps)));
    }
    let (set, t) = match &args.set_file {
        Some(path) => {
            let set = read_measurement_set(path)?;
            if let Some(t) = args.t.filter(|&t| t != set.len()) {
                return Err(Error::Config(format!(
                    "-T {t} disagrees with the {} actions in the set file",
                    set.len()
                )));
            }
            let t = set.len();
            (set, t)
        }
        None => {
            let t = args
                .t
                .or(if finite { args.n } else { None })
                .ok_or_else(|| Error::Config("-T is required without --set-file".into()))?;
            (build_standard_set(t)?, t)
        }
    };
    let n = if finite { args.n.or(args.t) } else { None };
    if finite && needs_horizon && n.is_none() {
        return Err(Error::Config("-N is required for finite-horizon objectives".into()));
    }
    let initial = parse_state(&args.initial, set.dim())?;
    let target = Target::with_eps(parse_state(&args.target, set.dim())?, args.eps)?;
    Ok(Setup {
        set,
        t,
        n,
        initial,
        target,
    })
}

fn build_graph(s: &Setup, max_states: usize) -> Result<StateGraph> {
    Ok(enumerate_reachable(&s.initial, &s.set, max_states, s.n)?)
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                Err(e) if e.kind() != ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn solve_optimal(args: &RunArgs, s: &Setup, graph: &StateGraph) -> Result<(Policy, f64)> {
    let init = graph.initial_id();
    let policy = match (args.objective, s.n) {
        (Objective::Success, Some(n)) => solve_max_success(graph, &s.set, n, &s.target)?,
        (Objective::Fidelity, Some(n)) => solve_max_fidelity(graph, &s.set, n, &s.target)?,
        (Objective::Arrival, _) => solve_min_arrival(graph, &s.set, &s.target, ArrivalOptions::default())?,
        _ => return Err(Error::Config("-N is required for finite-horizon objectives".into())),
    };
    let values = policy.values().expect("solvers attach value tables");
    let value = match s.n {
        Some(n) => values.value(n, init),
        None => values.value(0, init),
    };
    Ok((policy, value))
}

#[derive(Serialize)]
struct SolveReport<'a> {
    objective: &'static str,
    #[serde(rename = "T")]
    t: usize,
    #[serde(rename = "N")]
    n: Option<usize>,
    value: f64,
    policy: &'a PolicyFile,
}

fn cmd_solve(args: &RunArgs) -> Result<()> {
    let s = setup(args, true)?;
    let graph = build_graph(&s, args.max_states)?;
    let (policy, value) = solve_optimal(args, &s, &graph)?;
    let labels = state_labels(&graph, &s.set);
    let file = PolicyFile::from_policy(&policy, &s.set, &labels);
    if let Some(path) = &args.output {
        fs::write(path, serde_json::to_string_pretty(&file)? + "\n")?;
    }
    let report = SolveReport {
        objective: args.objective.name(),
        t: s.t,
        n: s.n,
        value,
        policy: &file,
    };
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Csv => format!(
            "objective,T,N,value\n{},{},{},{}\n",
            report.objective,
            s.t,
            s.n.map(|n| n.to_string()).unwrap_or_default(),
            value
        ),
        Format::Table => {
            let title = if args.objective == Objective::Arrival {
                "pi(x)"
            } else {
                "pi*"
            };
            format!("{}\n\n{}", sig6(value), policy_table(&policy, &graph, &s.set, title)?)
        }
    };
    emit(&text, None)
}

/// The policy to evaluate or simulate, its row name and its exact value.
fn chosen_policy(args: &RunArgs, s: &Setup, graph: &StateGraph) -> Result<(Policy, String, f64)> {
    let init = graph.initial_id();
    let (policy, name) = if let Some(path) = &args.policy_file {
        let p = read_policy(path, graph.len())?;
        p.validate(s.set.len())?;
        (p, "file".to_string())
    } else {
        match args.policy {
            PolicyChoice::Optimal => {
                let (p, value) = solve_optimal(args, s, graph)?;
                if args.objective == Objective::Arrival {
                    return Ok((p, "optimal".into(), value));
                }
                (p, "optimal".into())
            }
            PolicyChoice::Naive => (make_naive_policy(&s.set, s.n.unwrap_or(0))?, "naive".into()),
            PolicyChoice::S1 => {
                if s.n != Some(3) {
                    return Err(Error::Config("the s1 policy is defined for N = 3".into()));
                }
                (make_s1_policy(&s.set, graph)?, "s1".into())
            }
        }
    };
    if args.objective == Objective::Arrival {
        return Err(Error::Config(
            "--objective arrival evaluates the optimal stationary policy only".into(),
        ));
    }
    if let Some(n) = s.n {
        if policy.horizon() != Some(n) {
            return Err(Error::Config(format!(
                "policy horizon {:?} differs from -N {n}",
                policy.horizon()
            )));
        }
    }
    let eval = evaluate_policy_exact(&policy, graph, init, &s.target)?;
    let value = match args.objective {
        Objective::Fidelity => eval.fidelity_expectation,
        _ => eval.success_probability,
    };
    Ok((policy, name, value))
}

fn cmd_evaluate(args: &RunArgs) -> Result<()> {
    let s = setup(args, true)?;
    let graph = build_graph(&s, args.max_states)?;
    let (_, name, value) = chosen_policy(args, &s, &graph)?;
    let row = ResultRow {
        policy: name,
        t: s.t,
        n: s.n,
        exact_value: Some(value),
        mc_estimate: None,
        mc_stderr: None,
        trials: None,
        seed: None,
    };
    emit(&render_records(&[row], args.format.into())?, args.output.as_deref())
}

/// Mean and standard error of `<t|rho_N|t>` over the simulated trajectories.
fn fidelity_estimate(summary: &SimulationSummary, graph: &StateGraph, target: &Target) -> Result<(f64, f64)> {
    let overlaps = summary
        .records
        .iter()
        .map(|r| {
            let id = match r.steps.last() {
                Some(step) => step.state.ok_or(qsteer_core::Error::StateNotInGraph)?,
                None => graph.initial_id(),
            };
            Ok(target.overlap(&graph.states()[id]))
        })
        .collect::<Result<Vec<f64>>>()?;
    let m = overlaps.len() as f64;
    if overlaps.is_empty() {
        return Ok((0.0, 0.0));
    }
    let mean = overlaps.iter().sum::<f64>() / m;
    let var = if overlaps.len() > 1 {
        overlaps.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    Ok((mean, (var / m).sqrt()))
}

fn cmd_simulate(args: &RunArgs) -> Result<()> {
    let s = setup(args, true)?;
    let graph = build_graph(&s, args.max_states)?;
    let (policy, name, exact) = chosen_policy(args, &s, &graph)?;
    let pool = worker_pool()?;
    let summary = simulate_parallel(
        &pool,
        &policy,
        &graph,
        &s.set,
        &s.initial,
        &s.target,
        args.trials,
        args.seed,
        args.max_steps,
    )?;
    let (estimate, stderr) = match args.objective {
        Objective::Success => (Some(summary.success_rate), Some(summary.success_stderr)),
        Objective::Fidelity => {
            let (m, e) = fidelity_estimate(&summary, &graph, &s.target)?;
            (Some(m), Some(e))
        }
        Objective::Arrival => {
            debug_assert_eq!(policy.kind(), PolicyKind::Stationary);
            if summary.non_arrivals() > 0 {
                eprintln!(
                    "{} of {} trials did not arrive within {} steps",
                    summary.non_arrivals(),
                    summary.trials,
                    args.max_steps
                );
            }
            (summary.mean_arrival, summary.arrival_stderr)
        }
    };
    let row = ResultRow {
        policy: name,
        t: s.t,
        n: s.n,
        exact_value: Some(exact),
        mc_estimate: estimate,
        mc_stderr: stderr,
        trials: Some(summary.trials),
        seed: Some(args.seed),
    };
    emit(&render_records(&[row], args.format.into())?, args.output.as_deref())
}

fn range(lo: usize, hi: usize, what: &str) -> Result<Vec<usize>> {
    if lo > hi {
        return Err(Error::Config(format!("empty {what} range {lo}..={hi}")));
    }
    Ok((lo..=hi).collect())
}

fn cmd_sweep(figure: Figure, r: &SweepArgs, args: &RunArgs) -> Result<()> {
    let initial = parse_state(&args.initial, 2)?;
    let target = Target::with_eps(parse_state(&args.target, 2)?, args.eps)?;
    let pool = worker_pool()?;
    let format = args.format.into();
    let text = match figure {
        Figure::Fig1 => {
            let horizons = range(r.n_min, r.n_max, "N")?;
            render_records(&sweep::feedback_gain(&pool, &horizons, &initial, &target)?, format)?
        }
        Figure::Fig2 => {
            let horizons = range(r.n_min, r.n_max, "N")?;
            if r.t_values.is_empty() {
                return Err(Error::Config("--t-values is empty".into()));
            }
            render_records(
                &sweep::set_size(&pool, &r.t_values, &horizons, &initial, &target)?,
                format,
            )?
        }
        Figure::Fig3 => {
            let sizes = range(r.t_min, r.t_max, "T")?;
            render_records(&sweep::arrival(&pool, &sizes, &initial, &target)?, format)?
        }
    };
    emit(&text, args.output.as_deref())
}

#[derive(Serialize)]
struct GraphStateRow<'a> {
    id: usize,
    label: &'a str,
    depth: usize,
    expanded: bool,
    target: bool,
}

fn cmd_graph(args: &RunArgs) -> Result<()> {
    let s = setup(args, false)?;
    let graph = enumerate_reachable(&s.initial, &s.set, args.max_states, args.n)?;
    let labels = state_labels(&graph, &s.set);
    let hits = graph.target_mask(&s.target);
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&GraphFile::from_graph(&graph, &s.set, &labels))? + "\n",
        format => {
            let rows: Vec<GraphStateRow> = (0..graph.len())
                .map(|id| GraphStateRow {
                    id,
                    label: &labels[id],
                    depth: graph.depth(id),
                    expanded: graph.is_expanded(id),
                    target: hits[id],
                })
                .collect();
            render_records(&rows, format.into())?
        }
    };
    emit(&text, args.output.as_deref())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep { figure, range, run } => cmd_sweep(*figure, range, run),
        Command::Graph(args) => cmd_graph(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qsteer: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
