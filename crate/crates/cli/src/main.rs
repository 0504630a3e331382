use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod adele;
mod places;
mod transition;
mod verify;

/// Finite-depth adele rings of cyclotomic towers.
#[derive(Parser)]
#[command(name = "adelion", version, about)]
struct Cli {
    /// Emit JSON reports instead of tables.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export or validate a Galois tower table ("gtower/1").
    Tower(places::TowerArgs),
    /// Places above a prime or the archimedean place, level by level.
    Places(places::PlacesArgs),
    /// Build or verify a transition diagram ("td/1").
    Transition {
        #[command(subcommand)]
        op: transition::TransitionOp,
    },
    /// Adele arithmetic, conorms, open sets and limits.
    Adele {
        #[command(subcommand)]
        op: adele::AdeleOp,
    },
    /// Run the property suites.
    Verify(verify::VerifyArgs),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] adelion::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    /// The command ran and the thing it checked does not hold.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Output destination shared by commands that produce a document.
#[derive(Args, Clone, Debug, Default)]
pub struct OutArg {
    /// Write the document here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn write(path: &Path, contents: &str) -> CliResult<()> {
    let mut s = contents.to_string();
    if !s.ends_with('\n') {
        s.push('\n');
    }
    std::fs::write(path, s).map_err(|source| CliError::Io { path: path.into(), source })
}

/// Writes to `out` when given, otherwise prints.
pub fn emit(out: &OutArg, contents: &str) -> CliResult<()> {
    match &out.out {
        Some(p) => write(p, contents),
        None => {
            println!("{contents}");
            Ok(())
        }
    }
}

pub fn parse_tower(spec: &str) -> CliResult<adelion::Tower> {
    Ok(adelion::Tower::parse(spec)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let result = match cli.command {
        Command::Tower(args) => places::tower(args),
        Command::Places(args) => places::places(args, json),
        Command::Transition { op } => transition::run(op, json),
        Command::Adele { op } => adele::run(op, json),
        Command::Verify(args) => verify::run(args, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
