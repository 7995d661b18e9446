mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vxcheck::valg::{Axiom, CheckParams};

use commands::CliError;
use report::{Format, Report};

/// Exact checks of formal delta identities and vertex algebra axioms.
#[derive(Parser, Debug)]
#[command(name = "vxcheck", version)]
struct Cli {
    /// Window half-width; defaults to the completeness bound of each structure.
    #[arg(long, global = true)]
    window: Option<i64>,
    /// Largest pole-clearing exponent; defaults to the largest pole of each table.
    #[arg(long = "m-max", global = true)]
    m_max: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Report file, or the output directory for `examples emit`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall-clock durations (reports are then no longer byte-stable).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Symbolic cancellation proofs of the two- and three-term delta identities.
    ProveDeltas,
    /// Seeded replays of the rational-form chain on random instances.
    ReplayElem {
        #[arg(long, default_value_t = 100)]
        n: u64,
    },
    /// Check a structure config against the axioms.
    Check {
        file: PathBuf,
        /// Restrict to these axioms; repeatable.
        #[arg(long)]
        axiom: Vec<Axiom>,
    },
    /// Check a module config against the module axioms.
    CheckModule { file: PathBuf },
    /// Implication rows over every structure config in a directory.
    ImplicationMatrix { dir: PathBuf },
    /// Module equivalence and implication rows over every module config in a directory.
    MainTheorem { dir: PathBuf },
    /// Write the built-in configs to disk.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand, Debug)]
enum ExamplesAction {
    Emit,
}

fn run(cli: &Cli, rep: &mut Report) -> Result<(), CliError> {
    let params = CheckParams { window: cli.window, m_max: cli.m_max };
    match &cli.command {
        Command::ProveDeltas => commands::prove_deltas(rep),
        Command::ReplayElem { n } => commands::replay_elem(rep, *n, &params),
        Command::Check { file, axiom } => commands::check(rep, file, axiom, &params),
        Command::CheckModule { file } => commands::check_module(rep, file, &params),
        Command::ImplicationMatrix { dir } => commands::implication_matrix(rep, dir, &params),
        Command::MainTheorem { dir } => commands::main_theorem(rep, dir, &params),
        Command::Examples { action: ExamplesAction::Emit } => {
            commands::emit_examples(rep, cli.out.as_deref().unwrap_or("corpus".as_ref()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    let mut rep = Report::new(cli.seed, cli.timings);
    if let Err(e) = run(&cli, &mut rep) {
        let (msg, code) = match e {
            CliError::Config(m) => (m, 3),
            CliError::Inconsistent(m) => (m, 2),
        };
        eprintln!("vxcheck: {msg}");
        return ExitCode::from(code);
    }
    let text = rep.render(cli.format);
    let to_file = !matches!(cli.command, Command::Examples { .. });
    match (&cli.out, to_file) {
        (Some(path), true) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("vxcheck: {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        _ => print!("{text}"),
    }
    ExitCode::from(rep.status as u8)
}
