use clap::{Args, Parser, Subcommand};
use hitchin_kit::corpus::run_corpus;
use hitchin_kit::report::to_report_bytes;
use hitchin_kit::task::{resolve_settings, Command, TaskFile, SCHEMA_VERSION};
use hitchin_kit::run_task;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Desk-scale Higgs bundle computations driven by JSON task files.
#[derive(Parser)]
#[command(name = "hitchin-kit", version)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Args)]
struct RunArgs {
    /// Task file to execute.
    #[arg(long)]
    input: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Random seed for the numeric solver tasks.
    #[arg(long)]
    seed: Option<u64>,
    /// Numeric tolerance override.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Dimension, genus and counting formulas.
    Formulas(RunArgs),
    /// Structure checks, Hitchin map and section, stability evidence.
    Higgs(RunArgs),
    /// Spectral curve extraction, classification and monodromy.
    Spectral(RunArgs),
    /// Parabolic slopes, subbundles, stability and residue checks.
    Parabolic(RunArgs),
    /// Anti-Stokes directions, factor shapes and formal monodromy.
    Wild(RunArgs),
    /// Star-quiver stability, moment maps, solver and Higgs transfer.
    Quiver(RunArgs),
    /// Real-form involutions, fixed points and component counts.
    Branes(RunArgs),
    /// Low-rank isogeny maps with eigenvalue correspondences.
    Isogeny(RunArgs),
    /// Run a directory of tasks against recorded expectations.
    Corpus {
        dir: PathBuf,
        /// Float comparison tolerance for the diff.
        #[arg(long)]
        tol: Option<f64>,
    },
}

impl CliCommand {
    fn expected_task_command(&self) -> Option<Command> {
        match self {
            CliCommand::Formulas(_) => Some(Command::Formulas),
            CliCommand::Higgs(_) => Some(Command::Higgs),
            CliCommand::Spectral(_) => Some(Command::Spectral),
            CliCommand::Parabolic(_) => Some(Command::Parabolic),
            CliCommand::Wild(_) => Some(Command::Wild),
            CliCommand::Quiver(_) => Some(Command::Quiver),
            CliCommand::Branes(_) => Some(Command::Branes),
            CliCommand::Isogeny(_) => Some(Command::Isogeny),
            CliCommand::Corpus { .. } => None,
        }
    }
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn run_single(args: &RunArgs, expected: Command) -> ExitCode {
    let raw = match fs::read_to_string(&args.input) {
        Ok(r) => r,
        Err(e) => return fail(2, &format!("cannot read {}: {e}", args.input.display())),
    };
    let mut de = serde_json::Deserializer::from_str(&raw);
    let task: TaskFile = match serde_path_to_error::deserialize(&mut de) {
        Ok(t) => t,
        Err(e) => {
            return fail(2, &format!("{}: {} (at {})", args.input.display(), e.inner(), e.path()))
        }
    };
    if task.version != SCHEMA_VERSION {
        return fail(
            2,
            &format!("unsupported schema version {:?}, this build reads {SCHEMA_VERSION:?}", task.version),
        );
    }
    if task.command != expected {
        return fail(
            2,
            &format!("task file is a {:?} task, invoked as {expected}", task.command),
        );
    }
    let settings = resolve_settings(args.tol, args.seed, &task.options);
    let report = match run_task(&task, &settings) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let bytes = to_report_bytes(&report);
    let destination = args.output.clone().or_else(|| task.options.output.clone());
    match destination {
        Some(path) => {
            if let Err(e) = fs::write(&path, &bytes) {
                return fail(2, &format!("cannot write {}: {e}", path.display()));
            }
            eprintln!("{expected}: ok, report in {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(&bytes).is_err() {
                return ExitCode::from(4);
            }
            eprintln!("{expected}: ok");
        }
    }
    ExitCode::SUCCESS
}

fn run_corpus_command(dir: &PathBuf, tol: Option<f64>) -> ExitCode {
    let empty = hitchin_kit::TaskOptions::default();
    let settings = resolve_settings(tol, None, &empty);
    match run_corpus(dir, settings.tolerance) {
        Ok(summary) => {
            print!("{}", summary.table());
            if summary.all_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(2, &format!("cannot scan {}: {e}", dir.display())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        CliCommand::Corpus { dir, tol } => run_corpus_command(dir, *tol),
        other => {
            let expected = other.expected_task_command().expect("run commands carry a task");
            let args = match other {
                CliCommand::Formulas(a)
                | CliCommand::Higgs(a)
                | CliCommand::Spectral(a)
                | CliCommand::Parabolic(a)
                | CliCommand::Wild(a)
                | CliCommand::Quiver(a)
                | CliCommand::Branes(a)
                | CliCommand::Isogeny(a) => a,
                CliCommand::Corpus { .. } => unreachable!(),
            };
            run_single(args, expected)
        }
    }
}
