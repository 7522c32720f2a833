//! Command-line front end for the scpr solvers.
//!
//! Subcommands: `solve` (value iteration + policies), `oblivious` (capture
//! times and race values for oblivious deterministic robbers), `simulate`
//! (Monte Carlo under solved policies), `check` (input validation), `repro`
//! (replay the bundled counterexample).
//!
//! Exit codes: 0 success, 1 input or validation error, 2 non-convergence.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use scpr_core::engine::{ConcSpace, SeqSpace, Variant};
use scpr_core::fixture;
use scpr_core::matrix_game::MatrixGame;
use scpr_core::simulate::{
    default_horizon, estimate_concurrent_value, estimate_sequential_value,
    play_concurrent_episode, play_sequential_episode, write_concurrent_trace,
    write_sequential_trace,
};
use scpr_core::solver::{
    certify_epsilon, oblivious_capture_times, solve_concurrent, solve_oblivious_concurrent,
    solve_sequential, verify_pure_minimax, SolveParams, SolveReport,
};
use scpr_core::{ConcState, Graph, RobberStrategy, SeqState, Vertex};

#[derive(Parser)]
#[command(name = "scpr", about = "Selfish-cops-and-passive-robber game solver", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game by value iteration; write values and policies.
    Solve(SolveArgs),
    /// Capture-time table and race values for an oblivious deterministic robber.
    Oblivious(ObliviousArgs),
    /// Monte Carlo estimate of the win probability under solved policies.
    Simulate(SimulateArgs),
    /// Validate input files and report whether the graph is cop-win.
    Check(CheckArgs),
    /// Reproduce the bundled counterexample instance.
    Repro,
}

#[derive(Args)]
struct SolveArgs {
    /// Game variant: sequential or concurrent.
    #[arg(long)]
    variant: String,
    /// Edge-list file.
    #[arg(long)]
    graph: PathBuf,
    /// Robber strategy file.
    #[arg(long)]
    robber: PathBuf,
    /// Convergence tolerance (sup-norm change per sweep).
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Sweep budget; defaults to ten times the state-space size.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Output prefix for the values CSV and policy file.
    #[arg(long, default_value = "scpr_out")]
    out: String,
    /// Also certify the returned policies by best response.
    #[arg(long)]
    certify: bool,
    /// Start state `x1,x2,x3[,u]` whose value is echoed in the summary.
    #[arg(long)]
    start: Option<String>,
}

#[derive(Args)]
struct ObliviousArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    robber: PathBuf,
    /// Output prefix for the capture-time and value CSV files.
    #[arg(long, default_value = "scpr_out")]
    out: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    variant: String,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    robber: PathBuf,
    /// Start state `x1,x2,x3[,u]`.
    #[arg(long)]
    start: String,
    #[arg(long)]
    episodes: usize,
    /// Episode cutoff in turns; defaults to 4n².
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solver tolerance used to produce the policies.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Simulate under this saved policy file (both cop blocks) instead of
    /// solving first.
    #[arg(long)]
    policy: Option<PathBuf>,
    /// Dump the first episode's trace to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    robber: Option<PathBuf>,
}

enum CliError {
    Input(String),
    NonConvergence(String),
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    // Usage errors are input errors (exit 1); help and version keep clap's
    // zero exit. Exit 2 is reserved for non-convergence.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            e.exit()
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Oblivious(args) => cmd_oblivious(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Check(args) => cmd_check(args),
        Command::Repro => cmd_repro(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::NonConvergence(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_variant(s: &str) -> Result<Variant, CliError> {
    match s {
        "sequential" => Ok(Variant::Sequential),
        "concurrent" => Ok(Variant::Concurrent),
        other => Err(CliError::Input(format!(
            "unknown variant `{other}` (expected sequential or concurrent)"
        ))),
    }
}

fn load_inputs(graph: &Path, robber: &Path) -> Result<(Graph, RobberStrategy), CliError> {
    let graph_text = std::fs::read_to_string(graph)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", graph.display())))?;
    let g = Graph::load(&graph_text)
        .map_err(|e| CliError::Input(format!("{}: {e}", graph.display())))?;
    let robber_text = std::fs::read_to_string(robber)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", robber.display())))?;
    let r = RobberStrategy::load(&robber_text, &g)
        .map_err(|e| CliError::Input(format!("{}: {e}", robber.display())))?;
    Ok((g, r))
}

fn warn_if_not_cop_win(g: &Graph) {
    if !g.is_cop_win() {
        eprintln!("warning: graph is not cop-win (one cop cannot force capture of an adversarial robber); values are still well-defined");
    }
}

/// Start-state parser: `x1,x2,x3` or `x1,x2,x3,u`, commas or spaces.
fn parse_start(s: &str, g: &Graph, variant: Variant) -> Result<(Vertex, Vertex, Vertex, u8), CliError> {
    let fields: Vec<&str> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|f| !f.is_empty())
        .collect();
    if fields.len() < 3 || fields.len() > 4 {
        return Err(CliError::Input(format!(
            "start state `{s}` must be x1,x2,x3 or x1,x2,x3,u"
        )));
    }
    let mut nums = [0u32; 4];
    for (slot, f) in nums.iter_mut().zip(&fields) {
        *slot = f
            .parse()
            .map_err(|_| CliError::Input(format!("start field `{f}` is not an integer")))?;
    }
    let (x1, x2, x3) = (nums[0], nums[1], nums[2]);
    for v in [x1, x2, x3] {
        if v == 0 || v > g.vertex_count() {
            return Err(CliError::Input(format!(
                "start vertex {v} out of range 1..={}",
                g.vertex_count()
            )));
        }
    }
    let turn = if fields.len() == 4 {
        let u = nums[3] as u8;
        if u != 1 && u != 2 {
            return Err(CliError::Input("start turn must be 1 or 2".into()));
        }
        if variant == Variant::Concurrent {
            return Err(CliError::Input(
                "concurrent start states have no turn component".into(),
            ));
        }
        u
    } else {
        1
    };
    Ok((x1, x2, x3, turn))
}

/// 17-significant-digit decimal form; round-trips f64 exactly.
fn fmt_sig17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Human-readable decimal: 12 places, trailing zeros trimmed.
fn fmt_trim(v: f64) -> String {
    let mut s = format!("{v:.12}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

fn write_file(path: &str, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Input(format!("cannot write {path}: {e}")))?;
    println!("wrote {path}");
    Ok(())
}

fn sequential_values_csv(g: &Graph, report: &SolveReport) -> String {
    let space = SeqSpace::new(g);
    let mut out = String::from("x1,x2,x3,u,value\n");
    for (idx, state) in space.states().enumerate() {
        match state {
            SeqState::Position { x1, x2, x3, turn } => {
                let _ = writeln!(
                    out,
                    "{x1},{x2},{x3},{turn},{}",
                    fmt_sig17(report.values.value(idx))
                );
            }
            SeqState::Terminal => out.push_str("TAU,,,,0\n"),
        }
    }
    out
}

fn concurrent_values_csv(g: &Graph, values: &scpr_core::ValueVector) -> String {
    let space = ConcSpace::new(g);
    let mut out = String::from("x1,x2,x3,value\n");
    for (idx, state) in space.states().enumerate() {
        match state {
            ConcState::Position { x1, x2, x3 } => {
                let _ = writeln!(out, "{x1},{x2},{x3},{}", fmt_sig17(values.value(idx)));
            }
            ConcState::Terminal => out.push_str("TAU,,,0\n"),
        }
    }
    out
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let variant = parse_variant(&args.variant)?;
    let (g, robber) = load_inputs(&args.graph, &args.robber)?;
    if args.tol <= 0.0 {
        return Err(CliError::Input("tol must be positive".into()));
    }
    warn_if_not_cop_win(&g);
    let params = SolveParams {
        tol: args.tol,
        max_iter: args.max_iter,
    };

    let report = match variant {
        Variant::Sequential => solve_sequential(&g, &robber, &params),
        Variant::Concurrent => solve_concurrent(&g, &robber, &params),
    };

    println!("variant: {variant}");
    let states = match variant {
        Variant::Sequential => SeqSpace::new(&g).len(),
        Variant::Concurrent => ConcSpace::new(&g).len(),
    };
    println!("states: {states}");
    println!("iterations: {}", report.values.iterations);
    println!(
        "residual: {} ({})",
        fmt_sig17(report.values.residual),
        if report.values.converged {
            "converged"
        } else {
            "NOT converged"
        }
    );
    println!(
        "optimality residual: {}",
        fmt_sig17(report.optimality_residual)
    );

    if let Some(start) = &args.start {
        let (x1, x2, x3, turn) = parse_start(start, &g, variant)?;
        let (label, value) = match variant {
            Variant::Sequential => {
                let space = SeqSpace::new(&g);
                let s = SeqState::position(x1, x2, x3, turn);
                (s.to_string(), report.values.value(space.index(&s)))
            }
            Variant::Concurrent => {
                let space = ConcSpace::new(&g);
                let s = ConcState::position(x1, x2, x3);
                (s.to_string(), report.values.value(space.index(&s)))
            }
        };
        println!("value at {label}: {}", fmt_trim(value));
    }

    let values_csv = match variant {
        Variant::Sequential => sequential_values_csv(&g, &report),
        Variant::Concurrent => concurrent_values_csv(&g, &report.values),
    };
    write_file(&format!("{}.values.csv", args.out), &values_csv)?;
    let policy_text = format!("{}{}", report.policy1.to_text(), report.policy2.to_text());
    write_file(&format!("{}.policy.txt", args.out), &policy_text)?;

    if args.certify {
        let cert = certify_epsilon(&g, &robber, variant, &report, &params)
            .map_err(CliError::input)?;
        println!(
            "certificate: c1 exploitability {}, c2 exploitability {}, epsilon {}",
            fmt_sig17(cert.c1_exploitability),
            fmt_sig17(cert.c2_exploitability),
            fmt_sig17(cert.epsilon)
        );
    } else {
        println!("epsilon (nominal): {}", fmt_sig17(report.epsilon));
    }

    if !report.values.converged {
        return Err(CliError::NonConvergence(format!(
            "value iteration stopped after {} sweeps with residual {} >= tol {}",
            report.values.iterations,
            fmt_sig17(report.values.residual),
            fmt_sig17(args.tol)
        )));
    }
    Ok(())
}

fn cmd_oblivious(args: ObliviousArgs) -> Result<(), CliError> {
    let (g, robber) = load_inputs(&args.graph, &args.robber)?;
    warn_if_not_cop_win(&g);
    let table = oblivious_capture_times(&g, &robber).map_err(CliError::input)?;
    let report = solve_oblivious_concurrent(&g, &robber).map_err(CliError::input)?;

    let mut times_csv = String::from("cop,robber,time,move\n");
    for c in g.vertices() {
        for r in g.vertices() {
            let time = match table.time(c, r) {
                Some(t) => t.to_string(),
                None => "inf".into(),
            };
            let _ = writeln!(times_csv, "{c},{r},{time},{}", table.cop_move(c, r));
        }
    }
    write_file(&format!("{}.capture_times.csv", args.out), &times_csv)?;
    write_file(
        &format!("{}.values.csv", args.out),
        &concurrent_values_csv(&g, &report.values),
    )?;

    println!("capture-time sweeps: {}", table.iterations);
    let residual = verify_pure_minimax(&g, &robber, &report.values).map_err(CliError::input)?;
    println!("pure minimax residual: {}", fmt_trim(residual));
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let variant = parse_variant(&args.variant)?;
    let (g, robber) = load_inputs(&args.graph, &args.robber)?;
    if args.episodes == 0 {
        return Err(CliError::Input("episodes must be at least 1".into()));
    }
    warn_if_not_cop_win(&g);
    let params = SolveParams {
        tol: args.tol,
        max_iter: args.max_iter,
    };
    let horizon = args.horizon.unwrap_or_else(|| default_horizon(&g));
    let (x1, x2, x3, turn) = parse_start(&args.start, &g, variant)?;

    let (policy1, policy2) = match &args.policy {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            let policies = scpr_core::strategy::parse_policy_file(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let take = |player: scpr_core::Player| {
                policies
                    .iter()
                    .find(|p| p.player == player)
                    .cloned()
                    .ok_or_else(|| {
                        CliError::Input(format!(
                            "{}: no `cop {}` block",
                            path.display(),
                            player.number()
                        ))
                    })
            };
            let (p1, p2) = (take(scpr_core::Player::One)?, take(scpr_core::Player::Two)?);
            for p in [&p1, &p2] {
                let violations = p.validate(&g);
                if let Some(first) = violations.first() {
                    return Err(CliError::Input(format!(
                        "{}: invalid policy for {}: {first}",
                        path.display(),
                        p.player
                    )));
                }
            }
            (p1, p2)
        }
        None => {
            let report = match variant {
                Variant::Sequential => solve_sequential(&g, &robber, &params),
                Variant::Concurrent => solve_concurrent(&g, &robber, &params),
            };
            if !report.values.converged {
                return Err(CliError::NonConvergence(
                    "solver did not converge; refusing to simulate under unconverged policies"
                        .into(),
                ));
            }
            (report.policy1, report.policy2)
        }
    };

    let estimate = match variant {
        Variant::Sequential => {
            let start = SeqState::position(x1, x2, x3, turn);
            if let Some(path) = &args.trace {
                let trace = play_sequential_episode(
                    &g,
                    &robber,
                    &policy1,
                    &policy2,
                    start,
                    horizon,
                    scpr_core::rng::episode_seed(args.seed, 0),
                );
                std::fs::write(path, write_sequential_trace(&trace))
                    .map_err(|e| CliError::Input(format!("cannot write trace: {e}")))?;
            }
            estimate_sequential_value(
                &g,
                &robber,
                &policy1,
                &policy2,
                start,
                args.episodes,
                horizon,
                args.seed,
            )
        }
        Variant::Concurrent => {
            let start = ConcState::position(x1, x2, x3);
            if let Some(path) = &args.trace {
                let trace = play_concurrent_episode(
                    &g,
                    &robber,
                    &policy1,
                    &policy2,
                    start,
                    horizon,
                    scpr_core::rng::episode_seed(args.seed, 0),
                );
                std::fs::write(path, write_concurrent_trace(&trace))
                    .map_err(|e| CliError::Input(format!("cannot write trace: {e}")))?;
            }
            estimate_concurrent_value(
                &g,
                &robber,
                &policy1,
                &policy2,
                start,
                args.episodes,
                horizon,
                args.seed,
            )
        }
    };

    println!("variant: {variant}");
    println!("start: ({x1}, {x2}, {x3}{})", if variant == Variant::Sequential {
        format!(", {turn}")
    } else {
        String::new()
    });
    println!("episodes: {}", estimate.episodes);
    println!("horizon: {horizon}");
    println!("mean: {}", fmt_trim(estimate.mean));
    println!("standard error: {}", fmt_trim(estimate.standard_error));
    println!("truncated fraction: {}", fmt_trim(estimate.truncated_fraction));
    Ok(())
}

fn cmd_check(args: CheckArgs) -> Result<(), CliError> {
    let graph_text = std::fs::read_to_string(&args.graph)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", args.graph.display())))?;
    let g = Graph::load(&graph_text)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.graph.display())))?;
    println!(
        "graph: {} vertices, {} edges, valid",
        g.vertex_count(),
        g.edges().len()
    );
    println!("cop-win: {}", g.is_cop_win());
    if let Some(robber_path) = &args.robber {
        let robber_text = std::fs::read_to_string(robber_path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", robber_path.display())))?;
        let r = RobberStrategy::load(&robber_text, &g)
            .map_err(|e| CliError::Input(format!("{}: {e}", robber_path.display())))?;
        println!("robber strategy: kind {}, valid", r.kind_name());
    }
    Ok(())
}

fn cmd_repro() -> Result<(), CliError> {
    let fx = fixture::counterexample();
    let params = SolveParams::default();
    let report = solve_concurrent(&fx.graph, &fx.robber, &params);
    let space = ConcSpace::new(&fx.graph);
    let (x1, x2, x3) = fx.start;
    let start = ConcState::position(x1, x2, x3);

    let state_game = scpr_core::solver::state_matrix_game(
        &fx.graph,
        &fx.robber,
        report.values.as_slice(),
        start,
    )
    .expect("start state is ordinary");

    // Present the one-turn game in the fixture's label order.
    let rows = fx.row_moves;
    let cols = fx.col_moves;
    let ordered: Vec<Vec<f64>> = rows
        .iter()
        .map(|&a1| {
            cols.iter()
                .map(|&a2| state_game.entry(a1, a2).expect("labels are legal moves"))
                .collect()
        })
        .collect();
    let game = MatrixGame::new(ordered.clone()).expect("finite entries");
    let solution = game.solve();

    println!("bundled counterexample: 6-vertex graph, state-dependent deterministic robber");
    println!("start state: ({x1}, {x2}, {x3})");
    println!(
        "one-turn matrix game (rows: c1 -> {{{}, {}}}; cols: c2 -> {{{}, {}}}):",
        rows[0], rows[1], cols[0], cols[1]
    );
    let matrix_text = ordered
        .iter()
        .map(|row| {
            format!(
                "[{}]",
                row.iter().map(|&e| fmt_trim(e)).collect::<Vec<_>>().join(", ")
            )
        })
        .collect::<Vec<_>>()
        .join(", ");
    println!("[{matrix_text}]");
    println!("value: {}", fmt_trim(solution.value));
    println!(
        "c1 optimal strategy: ({}, {})",
        fmt_trim(solution.row_strategy[0]),
        fmt_trim(solution.row_strategy[1])
    );
    println!(
        "c2 optimal strategy: ({}, {})",
        fmt_trim(solution.col_strategy[0]),
        fmt_trim(solution.col_strategy[1])
    );
    println!(
        "concurrent value at ({x1}, {x2}, {x3}): {}",
        fmt_trim(report.values.value(space.index(&start)))
    );
    Ok(())
}
