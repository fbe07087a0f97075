//! The `coalitional` command-line tool.
//!
//! Exit status: 0 on success, 1 when the oracle disagrees with the solver,
//! 2 on unreadable or invalid input, 3 when a solver cannot finish.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use coalitional::io::dot::export_solution_dot;
use coalitional::io::json::{solution_json, to_pretty};
use coalitional::io::trace::baseline;
use coalitional::io::{
    export_dot, parse_game, profile_json, render_solution, render_trace, summary_bracket, validate_game, Verbosity,
};
use coalitional::model::{format_payoffs, Game, GameTree};
use coalitional::noncoop::LocalSolution;
use coalitional::oracle::{equivalence_check, OracleError, OracleLimits};
use coalitional::random::{random_game, RandomGameConfig};
use coalitional::ri::solve;

pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "coalitional", version, about = "Solve coalitional extensive-form games by recursive induction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// How much of the solve to print with `solve` and `trace`.
    #[arg(long, value_enum, default_value_t = TraceVerbosity::Summary, global = true)]
    pub trace_verbosity: TraceVerbosity,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Treat every coalition as infeasible, reducing the solve to
    /// backward induction.
    #[arg(long, global = true)]
    pub singletons_only: bool,
    /// Seed of the first random game for `oracle-check --random`.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Largest tree the oracle accepts; also bounds random games.
    #[arg(long, global = true)]
    pub max_nodes: Option<usize>,
    /// Write to this file instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Adopted outcome, partition, bracket summary and trace.
    Solve { input: PathBuf },
    /// The noncooperative backward-induction baseline.
    Bi { input: PathBuf },
    /// Compare the solver with the brute-force oracle.
    OracleCheck {
        /// Game to check; omit when using `--random`.
        input: Option<PathBuf>,
        /// Check this many random games instead of a file.
        #[arg(long)]
        random: Option<u64>,
    },
    /// The solved tree as Graphviz DOT.
    Export {
        input: PathBuf,
        /// Draw the tree without solving it.
        #[arg(long)]
        plain: bool,
    },
    /// The complete solution, one section per subgame.
    Trace { input: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TraceVerbosity {
    Summary,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Dot,
    Json,
}

/// A failed command: message for standard error and exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure { code: EXIT_INPUT, message: message.to_string() }
    }

    fn solver(message: impl ToString) -> Self {
        Failure { code: EXIT_SOLVER, message: message.to_string() }
    }
}

/// Reads, parses and validates a game file.
pub fn load_game(path: &Path) -> Result<Game, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let spec = parse_game(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    validate_game(&spec).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn on_path(tree: &GameTree, sol: &LocalSolution) -> String {
    let mut labels = Vec::new();
    let mut x = sol.root;
    while let Some(a) = sol.profile.action_at(tree, x) {
        let action = &tree.node(x).actions()[a];
        labels.push(action.label.clone());
        x = action.child;
    }
    labels.join(", ")
}

fn header(out: &mut String, tree: &GameTree, sol: &LocalSolution) {
    let _ = writeln!(out, "outcome: {}", format_payoffs(&sol.payoffs(tree)));
    match sol.root_partition() {
        Some(p) => {
            let _ = writeln!(out, "partition: {p}");
        }
        None => out.push_str("partition: (chance root)\n"),
    }
    let _ = writeln!(out, "summary: {}", summary_bracket(tree, sol));
    if tree.node(sol.root).player().is_some() {
        let _ = writeln!(out, "path: {}", on_path(tree, sol));
    }
}

fn prepare(cli: &Cli, path: &Path) -> Result<Game, Failure> {
    let game = load_game(path)?;
    Ok(if cli.singletons_only { game.noncooperative() } else { game })
}

fn verbosity(cli: &Cli) -> Verbosity {
    match cli.trace_verbosity {
        TraceVerbosity::Summary => Verbosity::Summary,
        TraceVerbosity::Full => Verbosity::Full,
    }
}

fn limits(cli: &Cli) -> OracleLimits {
    let mut limits = OracleLimits::default();
    if let Some(n) = cli.max_nodes {
        limits.max_nodes = n;
    }
    limits
}

fn oracle_failure(e: OracleError) -> Failure {
    Failure::solver(e)
}

/// Runs one parsed command, returning the text for the output and the exit
/// status.
pub fn execute(cli: &Cli) -> Result<(String, i32), Failure> {
    let mut out = String::new();
    let mut code = 0;
    match &cli.command {
        Command::Solve { input } => {
            let game = prepare(cli, input)?;
            let profile = solve(&game).map_err(Failure::solver)?;
            match cli.format {
                Format::Json => out = profile_json(&game, &profile) + "\n",
                Format::Dot => out = export_dot(&game.tree, Some(&profile)),
                Format::Text => {
                    header(&mut out, &game.tree, &profile.root_entry);
                    out.push_str("trace:\n");
                    out.push_str(&render_trace(&game, &profile, verbosity(cli)));
                }
            }
        }
        Command::Bi { input } => {
            let game = prepare(cli, input)?;
            let sol = baseline(&game).map_err(Failure::solver)?;
            match cli.format {
                Format::Json => out = solution_json(&game, &sol) + "\n",
                Format::Dot => out = export_solution_dot(&game.tree, Some(&sol)),
                Format::Text => header(&mut out, &game.tree, &sol),
            }
        }
        Command::Trace { input } => {
            let game = prepare(cli, input)?;
            let profile = solve(&game).map_err(Failure::solver)?;
            match cli.format {
                Format::Json => out = profile_json(&game, &profile) + "\n",
                Format::Dot => out = export_dot(&game.tree, Some(&profile)),
                Format::Text => {
                    out.push_str(&render_solution(&game, &profile));
                    if cli.trace_verbosity == TraceVerbosity::Full {
                        out.push_str("\nsteps:\n");
                        out.push_str(&render_trace(&game, &profile, Verbosity::Full));
                    }
                }
            }
        }
        Command::Export { input, plain } => {
            let game = prepare(cli, input)?;
            if *plain {
                out = export_dot(&game.tree, None);
            } else {
                let profile = solve(&game).map_err(Failure::solver)?;
                out = export_dot(&game.tree, Some(&profile));
            }
        }
        Command::OracleCheck { input, random } => {
            let limits = limits(cli);
            match (input, random) {
                (Some(_), Some(_)) => return Err(Failure::input("give either a game file or --random, not both")),
                (None, None) => return Err(Failure::input("give a game file or --random N")),
                (Some(path), None) => {
                    let game = prepare(cli, path)?;
                    let report = equivalence_check(&game, &limits).map_err(oracle_failure)?;
                    if cli.format == Format::Json {
                        out = serde_json_report(&report);
                    } else {
                        let _ = writeln!(out, "{report}");
                    }
                    if !report.matched {
                        code = EXIT_MISMATCH;
                    }
                }
                (None, Some(n)) => {
                    let config = RandomGameConfig {
                        max_nodes: limits.max_nodes,
                        coalitions: !cli.singletons_only,
                        ..RandomGameConfig::default()
                    };
                    let mut mismatches = 0;
                    for k in 0..*n {
                        let seed = cli.seed.wrapping_add(k);
                        let game = random_game(seed, &config);
                        let report = equivalence_check(&game, &limits).map_err(oracle_failure)?;
                        if !report.matched {
                            mismatches += 1;
                            let _ = writeln!(out, "seed {seed}: mismatch\n{report}");
                        }
                    }
                    let _ = writeln!(
                        out,
                        "checked {n} random games from seed {}: {} matched, {mismatches} mismatched",
                        cli.seed,
                        n - mismatches
                    );
                    if mismatches > 0 {
                        code = EXIT_MISMATCH;
                    }
                }
            }
        }
    }
    Ok((out, code))
}

fn serde_json_report(report: &coalitional::oracle::OracleReport) -> String {
    to_pretty(report) + "\n"
}

/// Parses `args`, runs the command, writes its output, and returns the
/// exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, text.as_bytes()),
                None => stdout.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_INPUT;
            }
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
