use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rookpoly::cli::{self, CliError};
use rookpoly::{Options, Strategy, StrategyKind};

#[derive(Parser)]
#[command(name = "rookpoly", version, about = "Rook polynomials by block decomposition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Shortcuts {
    /// Disable the closed form for full rectangles
    #[arg(long)]
    no_rect: bool,
    /// Disable splitting into disjoint pieces
    #[arg(long)]
    no_split: bool,
    /// Disable memoization
    #[arg(long)]
    no_cache: bool,
}

impl Shortcuts {
    fn options(&self) -> Options {
        Options {
            use_rectangle_closed_form: !self.no_rect,
            use_disjoint_split: !self.no_split,
            use_cache: !self.no_cache,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the rook polynomial of a board file
    Compute {
        file: PathBuf,
        #[arg(long, default_value = "greedy-block")]
        strategy: StrategyKind,
        /// Print decomposition counters after the polynomial
        #[arg(long)]
        stats: bool,
        /// Verify against brute-force enumeration
        #[arg(long)]
        oracle_check: bool,
        #[command(flatten)]
        shortcuts: Shortcuts,
    },
    /// Print a generated board: rectangle m n | staircase n |
    /// random m n density [seed] | bridged m1 n1 m2 n2 bs bt
    Generate {
        kind: String,
        params: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run strategies over every board file in a directory and print TSV
    Bench {
        dir: PathBuf,
        #[arg(long, default_value = "cell-first,cell-last,largest-block,greedy-block,exhaustive-best")]
        strategies: String,
        #[command(flatten)]
        shortcuts: Shortcuts,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compute { file, strategy, stats, oracle_check, shortcuts } => {
            let board = cli::read_board(&file)?;
            let strategy = Strategy::with_options(strategy, shortcuts.options());
            let out = cli::compute(&board, &strategy, stats, oracle_check)?;
            if out.oracle_skipped {
                eprintln!("oracle check skipped: board exceeds the oracle size guard");
            }
            emit(&out.stdout);
        }
        Command::Generate { kind, params, seed } => {
            let board = cli::generate_board(&kind, &params, seed)?;
            emit(&cli::render_board(&board));
        }
        Command::Bench { dir, strategies, shortcuts } => {
            let strategies = cli::parse_strategies(&strategies)?;
            let corpus = cli::load_corpus(&dir)?;
            let report = cli::bench(&corpus, &strategies, shortcuts.options());
            emit(&report.to_tsv());
            if !report.disagreements.is_empty() {
                for d in &report.disagreements {
                    eprintln!("disagreement: {d}");
                }
                return Err(CliError::Integrity(format!(
                    "{} board(s) with disagreeing strategies",
                    report.disagreements.len()
                )));
            }
        }
    }
    Ok(())
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
