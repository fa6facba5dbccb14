//! Command implementations behind the `rookpoly` binary. Each returns the
//! text to print so the commands can be exercised without a process.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::blocks::{Options, Strategy, StrategyKind};
use crate::board::Board;
use crate::decomposition::{rook_polynomial, DecompositionStats};
use crate::generate::{self, Bridged};
use crate::oracle::{oracle_counts, within_guard};
use crate::polynomial::RookPolynomial;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Integrity(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Integrity(_) => 3,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub fn read_board(path: &Path) -> Result<Board, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Board::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, Default)]
pub struct ComputeOutput {
    pub stdout: String,
    /// Set when the oracle check was requested but the board is over the
    /// oracle's size guard.
    pub oracle_skipped: bool,
}

pub fn compute(board: &Board, strategy: &Strategy, show_stats: bool, oracle_check: bool) -> Result<ComputeOutput, CliError> {
    let (poly, stats) = rook_polynomial(board, strategy);
    let mut out = ComputeOutput::default();
    if oracle_check {
        if within_guard(board) {
            let expected = RookPolynomial::from_coeffs(oracle_counts(board)?.per_k);
            if expected != poly {
                return Err(CliError::Integrity(format!(
                    "oracle mismatch: engine {poly}, oracle {expected}"
                )));
            }
        } else {
            out.oracle_skipped = true;
        }
    }
    writeln!(out.stdout, "{poly}").unwrap();
    if show_stats {
        writeln!(out.stdout, "{stats}").unwrap();
    }
    Ok(out)
}

fn param<T: std::str::FromStr>(params: &[String], i: usize, name: &str) -> Result<T, CliError> {
    let raw = params.get(i).ok_or_else(|| CliError::Usage(format!("missing parameter {name}")))?;
    raw.parse().map_err(|_| CliError::Usage(format!("invalid {name}: {raw:?}")))
}

fn expect_count(kind: &str, params: &[String], allowed: &[usize]) -> Result<(), CliError> {
    if allowed.contains(&params.len()) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{kind} takes {allowed:?} parameters, got {}", params.len())))
    }
}

/// Builds a board of the named family.
///
/// * `rectangle m n`
/// * `staircase n`
/// * `random m n density [seed]` (seed also from `--seed`, default 0)
/// * `bridged m1 n1 m2 n2 bs bt`
pub fn generate_board(kind: &str, params: &[String], seed: Option<u64>) -> Result<Board, CliError> {
    match kind {
        "rectangle" => {
            expect_count(kind, params, &[2])?;
            Ok(generate::rectangle(param(params, 0, "m")?, param(params, 1, "n")?))
        }
        "staircase" => {
            expect_count(kind, params, &[1])?;
            Ok(generate::staircase(param(params, 0, "n")?))
        }
        "random" => {
            expect_count(kind, params, &[3, 4])?;
            let density: f64 = param(params, 2, "density")?;
            if !(0.0..=1.0).contains(&density) {
                return Err(CliError::Usage(format!("density {density} outside [0, 1]")));
            }
            let seed = match (params.get(3), seed) {
                (Some(_), Some(_)) => return Err(CliError::Usage("seed given twice".into())),
                (Some(_), None) => param(params, 3, "seed")?,
                (None, s) => s.unwrap_or(0),
            };
            Ok(generate::random(param(params, 0, "m")?, param(params, 1, "n")?, density, seed))
        }
        "bridged" => {
            expect_count(kind, params, &[6])?;
            let shape = Bridged {
                m1: param(params, 0, "m1")?,
                n1: param(params, 1, "n1")?,
                m2: param(params, 2, "m2")?,
                n2: param(params, 3, "n2")?,
                bridge_rows: param(params, 4, "bs")?,
                bridge_cols: param(params, 5, "bt")?,
            };
            shape.board().ok_or_else(|| CliError::Usage("bridge must satisfy bs <= m1 and bt <= n2".into()))
        }
        other => Err(CliError::Usage(format!("unknown board kind {other:?}"))),
    }
}

/// Board text as printed by `generate`: the grid with a trailing newline,
/// or the header form when the grid alone cannot carry the dimensions.
pub fn render_board(board: &Board) -> String {
    if board.num_cols() == 0 && board.num_rows() > 0 {
        return board.to_text_with_header();
    }
    let mut text = board.to_grid_string();
    if board.num_rows() > 0 {
        text.push('\n');
    }
    text
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub board_id: String,
    pub strategy: StrategyKind,
    pub poly: String,
    pub stats: DecompositionStats,
    pub micros: u128,
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// One message per board whose strategies disagreed.
    pub disagreements: Vec<String>,
}

pub const BENCH_COLUMNS: [&str; 8] =
    ["board_id", "strategy", "poly", "nodes", "base_hits", "cache_hits", "depth", "micros"];

impl BenchReport {
    pub fn to_tsv(&self) -> String {
        let mut out = BENCH_COLUMNS.join("\t");
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.board_id,
                r.strategy,
                r.poly,
                r.stats.nodes_expanded,
                r.stats.base_case_hits(),
                r.stats.cache_hits,
                r.stats.max_depth,
                r.micros
            )
            .unwrap();
        }
        out
    }
}

/// Regular files of `dir`, sorted by name; each must parse as a board.
pub fn load_corpus(dir: &Path) -> Result<Vec<(String, Board)>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let id = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            read_board(&p).map(|b| (id, b))
        })
        .collect()
}

/// Runs every strategy on every board. Pairs run in parallel, each with its
/// own cache and counters; rows come back sorted by board id, then strategy.
pub fn bench(corpus: &[(String, Board)], strategies: &[StrategyKind], options: Options) -> BenchReport {
    let jobs: Vec<(usize, StrategyKind)> =
        (0..corpus.len()).flat_map(|b| strategies.iter().map(move |&s| (b, s))).collect();
    let mut rows: Vec<BenchRow> = jobs
        .par_iter()
        .map(|&(b, kind)| {
            let (id, board) = &corpus[b];
            let start = Instant::now();
            let (poly, stats) = rook_polynomial(board, &Strategy::with_options(kind, options));
            BenchRow {
                board_id: id.clone(),
                strategy: kind,
                poly: poly.to_machine_string(),
                stats,
                micros: start.elapsed().as_micros(),
            }
        })
        .collect();
    rows.sort_by(|a, b| a.board_id.cmp(&b.board_id).then(a.strategy.name().cmp(b.strategy.name())));

    let mut disagreements = Vec::new();
    for group in rows.chunk_by(|a, b| a.board_id == b.board_id) {
        if group.iter().any(|r| r.poly != group[0].poly) {
            let detail: Vec<String> = group.iter().map(|r| format!("{}={}", r.strategy, r.poly)).collect();
            disagreements.push(format!("{}: {}", group[0].board_id, detail.join(" ")));
        }
    }
    BenchReport { rows, disagreements }
}

pub fn parse_strategies(list: &str) -> Result<Vec<StrategyKind>, CliError> {
    let kinds = list
        .split(',')
        .map(|s| s.trim().parse::<StrategyKind>())
        .collect::<Result<Vec<_>, _>>()?;
    if kinds.is_empty() {
        return Err(CliError::Usage("no strategies given".into()));
    }
    Ok(kinds)
}
