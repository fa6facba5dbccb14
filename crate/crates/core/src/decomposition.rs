//! The recursive engine.
//!
//! Each call on a board first drops empty rows and columns, then tries the
//! base cases in order: no cells, a split into disjoint pieces (product of
//! their polynomials), a full rectangle (closed form), a cache hit. Anything
//! else is an expanded node: a pivot block `S` is chosen and
//!
//! ```text
//! R(B) = sum_{j=0}^{min(s,t)} r_j(S) x^j R(B_{S,j})
//! ```
//!
//! where `B_{S,j}` clears the cells of `S` and deletes `j` of its rows and
//! `j` of its columns. A 1x1 pivot is the cell rule
//! `R(B) = R(B_e) + x R(B_i)`.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::blocks::{
    block_conditions_hold, cell_pivot, greedy_pivot, largest_pivot, productive_blocks, BlockRef, Options,
    Strategy, StrategyKind, EXHAUSTIVE_CELL_LIMIT,
};
use crate::board::{Board, CellRef, SubboardRef};
use crate::cache::{CacheKey, PolyCache, PolyStore};
use crate::error::{Error, Result};
use crate::polynomial::RookPolynomial;

const STACK_RED_ZONE: usize = 128 * 1024;
const STACK_SEGMENT: usize = 8 * 1024 * 1024;

/// Counters for one engine run.
///
/// A node is a call that does not end in a base case or cache hit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecompositionStats {
    pub nodes_expanded: u64,
    pub base_empty: u64,
    pub base_single_cell: u64,
    pub base_rectangle: u64,
    pub base_disjoint_split: u64,
    pub cache_hits: u64,
    pub max_depth: u64,
}

impl DecompositionStats {
    pub fn base_case_hits(&self) -> u64 {
        self.base_empty + self.base_single_cell + self.base_rectangle + self.base_disjoint_split
    }
}

/// Flat `key=value` lines.
impl fmt::Display for DecompositionStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes_expanded={}", self.nodes_expanded)?;
        writeln!(f, "base_case_hits={}", self.base_case_hits())?;
        writeln!(f, "base_case_hits.empty={}", self.base_empty)?;
        writeln!(f, "base_case_hits.single_cell={}", self.base_single_cell)?;
        writeln!(f, "base_case_hits.rectangle={}", self.base_rectangle)?;
        writeln!(f, "base_case_hits.disjoint_split={}", self.base_disjoint_split)?;
        writeln!(f, "cache_hits={}", self.cache_hits)?;
        write!(f, "max_depth={}", self.max_depth)
    }
}

/// `B_{S,j}`: clears the cells of `block`, then deletes its first `j` rows
/// and first `j` columns.
pub fn inclusion_board(board: &Board, block: &BlockRef, j: usize) -> Result<Board> {
    block.sub().check_in(board)?;
    if !block_conditions_hold(board, block.sub()) {
        return Err(Error::NotABlock);
    }
    let (s, t) = block.shape();
    if j > s.min(t) {
        return Err(Error::InclusionIndex { j, max: s.min(t) });
    }
    Ok(inclusion_unchecked(board, block, j))
}

pub(crate) fn inclusion_unchecked(board: &Board, block: &BlockRef, j: usize) -> Board {
    board.clear_unchecked(block.sub()).delete_unchecked(&block.rows()[..j], &block.cols()[..j])
}

/// `(B_e, B_i)`: the board without cell `c`, and the board without its row
/// and column.
pub fn decompose_cell(board: &Board, cell: CellRef) -> Result<(Board, Board)> {
    SubboardRef::cell(cell).check_in(board)?;
    if !board.contains(cell.row, cell.col) {
        return Err(Error::CellNotSet { row: cell.row, col: cell.col });
    }
    Ok(decompose_cell_unchecked(board, cell))
}

fn decompose_cell_unchecked(board: &Board, cell: CellRef) -> (Board, Board) {
    let excluded = board.clear_unchecked(&SubboardRef::cell(cell));
    let included = board.delete_unchecked(&[cell.row], &[cell.col]);
    (excluded, included)
}

/// What the engine does with a board before choosing any pivot.
pub(crate) enum NodeKind {
    Empty,
    Split(Vec<Board>),
    Rectangle(usize, usize),
    Expand(Board),
}

pub(crate) fn classify(board: &Board, options: &Options) -> NodeKind {
    let board = board.compact();
    if board.is_empty() {
        return NodeKind::Empty;
    }
    if options.use_disjoint_split {
        let parts = board.split_disjoint();
        if parts.len() >= 2 {
            return NodeKind::Split(parts);
        }
    }
    if options.use_rectangle_closed_form && board.is_full() {
        return NodeKind::Rectangle(board.num_rows(), board.num_cols());
    }
    NodeKind::Expand(board)
}

/// Cells of `board` left over once the enabled base cases have settled
/// what they can.
pub(crate) fn remaining_cells(board: &Board, options: &Options) -> usize {
    match classify(board, options) {
        NodeKind::Empty | NodeKind::Rectangle(..) => 0,
        NodeKind::Split(parts) => parts.iter().map(|p| remaining_cells(p, options)).sum(),
        NodeKind::Expand(board) => board.cell_count(),
    }
}

/// Exact node counts under optimal pivot choice, with the cache off.
///
/// Mirrors the engine: the cost of a board is zero at a base case, the sum
/// over pieces at a split, and otherwise one plus the cheapest pivot's cost
/// (its own polynomial when not full, plus every inclusion board with a
/// nonzero coefficient).
///
/// The search is branch and bound. Every piece a pivot leaves that is not a
/// base case costs at least one node, which orders the candidates and cuts
/// the search off; each query carries a budget, and the memo keeps either
/// the exact cost or a lower bound learned from an exhausted budget.
pub(crate) struct CostModel {
    options: Options,
    memo: HashMap<Board, Known>,
    /// Open pieces of each candidate pivot, in search order, for boards
    /// searched before under a smaller budget.
    pieces: HashMap<Board, Rc<[Vec<Board>]>>,
}

#[derive(Clone, Copy)]
enum Known {
    Exact(u64),
    AtLeast(u64),
}

impl CostModel {
    pub(crate) fn new(options: Options) -> Self {
        CostModel { options: Options { use_cache: false, ..options }, memo: HashMap::new(), pieces: HashMap::new() }
    }

    pub(crate) fn cost(&mut self, board: &Board) -> u64 {
        let mut pieces = Vec::new();
        self.open_pieces(board, &mut pieces);
        pieces.iter().map(|p| self.expand_cost_below(p, u64::MAX).expect("costs are finite")).sum()
    }

    /// Cheapest pivot of a board with at least one cell, and its total cost;
    /// ties go to the candidate with fewer open pieces, then fewer open
    /// cells, then the smaller block.
    pub(crate) fn best_pivot(&mut self, board: &Board) -> (BlockRef, u64) {
        let limit = match self.memo.get(&board.compact().normalize()) {
            Some(&Known::Exact(c)) => c + 1,
            _ => u64::MAX,
        };
        let (blocks, pieces): (Vec<BlockRef>, Vec<Vec<Board>>) = self.candidates(board).into_iter().unzip();
        let (i, c) = self.cheapest_below(&pieces, limit).expect("a board with cells has a 1x1 block");
        (blocks[i].clone(), c)
    }

    /// Pieces of `board` that are not settled by a base case.
    fn open_pieces(&self, board: &Board, out: &mut Vec<Board>) {
        match classify(board, &self.options) {
            NodeKind::Empty | NodeKind::Rectangle(..) => {}
            NodeKind::Split(parts) => parts.iter().for_each(|p| self.open_pieces(p, out)),
            NodeKind::Expand(board) => out.push(board),
        }
    }

    /// Productive blocks with the open pieces each leaves behind, in search
    /// order.
    fn candidates(&self, board: &Board) -> Vec<(BlockRef, Vec<Board>)> {
        let mut candidates: Vec<(usize, BlockRef, Vec<Board>)> = productive_blocks(board)
            .into_iter()
            .map(|block| {
                let mut pieces = Vec::new();
                let inner = board.extract_unchecked(block.sub());
                if !inner.is_full() {
                    self.open_pieces(&inner, &mut pieces);
                }
                for j in 0..=inner.matching_number() {
                    self.open_pieces(&inclusion_unchecked(board, &block, j), &mut pieces);
                }
                let cells = pieces.iter().map(Board::cell_count).sum();
                (cells, block, pieces)
            })
            .collect();
        candidates.sort_by(|a, b| (a.2.len(), a.0, a.1.sub()).cmp(&(b.2.len(), b.0, b.1.sub())));
        candidates.into_iter().map(|(_, block, pieces)| (block, pieces)).collect()
    }

    /// Cost of a compact board that is not a base case, if below `limit`.
    fn expand_cost_below(&mut self, board: &Board, limit: u64) -> Option<u64> {
        let key = board.normalize();
        match self.memo.get(&key) {
            Some(&Known::Exact(c)) => return (c < limit).then_some(c),
            Some(&Known::AtLeast(c)) if c >= limit => return None,
            _ => {}
        }
        let pieces = match self.pieces.get(&key) {
            Some(p) => Rc::clone(p),
            None => self.candidates(board).into_iter().map(|(_, p)| p).collect(),
        };
        match self.cheapest_below(&pieces, limit) {
            Some((_, c)) => {
                self.pieces.remove(&key);
                self.memo.insert(key, Known::Exact(c));
                Some(c)
            }
            None => {
                self.pieces.insert(key.clone(), pieces);
                self.memo.insert(key, Known::AtLeast(limit));
                None
            }
        }
    }

    /// Index and cost of the first cheapest candidate costing less than
    /// `limit`. Every open piece costs at least one node, which bounds each
    /// candidate before its pieces are searched.
    fn cheapest_below(&mut self, candidates: &[Vec<Board>], limit: u64) -> Option<(usize, u64)> {
        let mut best = None;
        let mut bound = limit;
        for (i, pieces) in candidates.iter().enumerate() {
            // Candidates are ordered by piece count, so none later can do better.
            if 1 + pieces.len() as u64 >= bound {
                break;
            }
            let mut total = 1u64;
            let mut within = true;
            for (k, piece) in pieces.iter().enumerate() {
                let rest = (pieces.len() - k - 1) as u64;
                match self.expand_cost_below(piece, bound - total - rest) {
                    Some(c) => total += c,
                    None => {
                        within = false;
                        break;
                    }
                }
            }
            if within {
                bound = total;
                best = Some((i, total));
            }
        }
        best
    }
}

struct Engine<'a> {
    strategy: Strategy,
    stats: DecompositionStats,
    store: Option<&'a mut dyn PolyStore>,
    costs: Option<CostModel>,
}

impl<'a> Engine<'a> {
    fn new(strategy: Strategy, store: Option<&'a mut dyn PolyStore>) -> Self {
        Engine { strategy, stats: DecompositionStats::default(), store, costs: None }
    }

    fn solve(&mut self, board: &Board, depth: u64) -> RookPolynomial {
        stacker::maybe_grow(STACK_RED_ZONE, STACK_SEGMENT, || self.solve_node(board, depth))
    }

    fn solve_node(&mut self, board: &Board, depth: u64) -> RookPolynomial {
        self.stats.max_depth = self.stats.max_depth.max(depth);
        match classify(board, &self.strategy.options) {
            NodeKind::Empty => {
                self.stats.base_empty += 1;
                RookPolynomial::one()
            }
            NodeKind::Split(parts) => {
                self.stats.base_disjoint_split += 1;
                let mut product = RookPolynomial::one();
                for part in &parts {
                    product = &product * &self.solve(part, depth + 1);
                }
                product
            }
            NodeKind::Rectangle(m, n) => {
                if m * n == 1 {
                    self.stats.base_single_cell += 1;
                } else {
                    self.stats.base_rectangle += 1;
                }
                RookPolynomial::rectangular(m, n)
            }
            NodeKind::Expand(board) => {
                let key = self.store.is_some().then(|| CacheKey::of(&board));
                if let (Some(store), Some(key)) = (self.store.as_deref_mut(), &key) {
                    if let Some(p) = store.lookup(key) {
                        self.stats.cache_hits += 1;
                        return p;
                    }
                }
                self.stats.nodes_expanded += 1;
                let pivot = self.pivot(&board);
                let poly = self.expand(&board, &pivot, depth);
                if let (Some(store), Some(key)) = (self.store.as_deref_mut(), key) {
                    store.store(key, poly.clone()).expect("cache integrity violated");
                }
                poly
            }
        }
    }

    fn pivot(&mut self, board: &Board) -> BlockRef {
        let pivot = match self.strategy.kind {
            StrategyKind::CellFirst => cell_pivot(board, false),
            StrategyKind::CellLast => cell_pivot(board, true),
            StrategyKind::LargestBlock => largest_pivot(board),
            StrategyKind::GreedyBlock => greedy_pivot(board, &self.strategy.options),
            StrategyKind::ExhaustiveBest if board.cell_count() <= EXHAUSTIVE_CELL_LIMIT => {
                let options = self.strategy.options;
                let model = self.costs.get_or_insert_with(|| CostModel::new(options));
                Ok(model.best_pivot(board).0)
            }
            StrategyKind::ExhaustiveBest => greedy_pivot(board, &self.strategy.options),
        };
        pivot.expect("expanded boards have cells")
    }

    fn expand(&mut self, board: &Board, pivot: &BlockRef, depth: u64) -> RookPolynomial {
        if let Some(cell) = pivot.as_cell() {
            let (excluded, included) = decompose_cell_unchecked(board, cell);
            let mut acc = self.solve(&excluded, depth + 1);
            acc.add_scaled_shifted(&self.solve(&included, depth + 1), &BigUint::one(), 1);
            return acc;
        }
        let block_poly = self.block_polynomial(board, pivot, depth);
        let mut acc = RookPolynomial::zero();
        for (j, r_j) in block_poly.coeffs().iter().enumerate() {
            if r_j.is_zero() {
                continue;
            }
            let child = inclusion_unchecked(board, pivot, j);
            acc.add_scaled_shifted(&self.solve(&child, depth + 1), r_j, j);
        }
        acc
    }

    /// `R(S)` for the block viewed as a standalone board.
    fn block_polynomial(&mut self, board: &Board, pivot: &BlockRef, depth: u64) -> RookPolynomial {
        let inner = board.extract_unchecked(pivot.sub());
        if inner.is_full() {
            RookPolynomial::rectangular(inner.num_rows(), inner.num_cols())
        } else {
            self.solve(&inner, depth + 1)
        }
    }
}

/// Exact rook polynomial of `board`, with counters for the run. When the
/// strategy enables the cache, a fresh cache is used for this call only.
pub fn rook_polynomial(board: &Board, strategy: &Strategy) -> (RookPolynomial, DecompositionStats) {
    if strategy.options.use_cache {
        let mut cache = PolyCache::new();
        rook_polynomial_with_store(board, strategy, &mut cache)
    } else {
        let mut engine = Engine::new(*strategy, None);
        let poly = engine.solve(board, 0);
        (poly, engine.stats)
    }
}

/// Like [`rook_polynomial`] but memoizes into `store`, regardless of the
/// strategy's cache flag.
pub fn rook_polynomial_with_store(
    board: &Board,
    strategy: &Strategy,
    store: &mut dyn PolyStore,
) -> (RookPolynomial, DecompositionStats) {
    let mut engine = Engine::new(*strategy, Some(store));
    let poly = engine.solve(board, 0);
    (poly, engine.stats)
}

/// One block step by a caller-chosen block; every board it produces is
/// handed to the engine under `strategy`.
pub fn decompose_by_block(
    board: &Board,
    block: &BlockRef,
    strategy: &Strategy,
) -> Result<(RookPolynomial, DecompositionStats)> {
    block.sub().check_in(board)?;
    if !block_conditions_hold(board, block.sub()) {
        return Err(Error::NotABlock);
    }
    let mut engine = Engine::new(Strategy { options: Options { use_cache: false, ..strategy.options }, ..*strategy }, None);
    engine.stats.nodes_expanded = 1;
    let block_poly = engine.block_polynomial(board, block, 0);
    let mut acc = RookPolynomial::zero();
    for (j, r_j) in block_poly.coeffs().iter().enumerate() {
        if !r_j.is_zero() {
            let child = inclusion_unchecked(board, block, j);
            acc.add_scaled_shifted(&engine.solve(&child, 1), r_j, j);
        }
    }
    Ok((acc, engine.stats))
}

/// `R(B_e) + x R(B_i)` for a set cell, each term computed by the engine.
pub fn decompose_by_cell(board: &Board, cell: CellRef, strategy: &Strategy) -> Result<RookPolynomial> {
    let (excluded, included) = decompose_cell(board, cell)?;
    let mut acc = rook_polynomial(&excluded, strategy).0;
    acc.add_scaled_shifted(&rook_polynomial(&included, strategy).0, &BigUint::one(), 1);
    Ok(acc)
}

/// Total nodes the exhaustive strategy expands on `board` with the cache
/// off, i.e. the minimum over all pivot sequences drawn from discovered
/// blocks.
pub fn optimal_node_count(board: &Board, options: Options) -> Result<u64> {
    let cells = board.cell_count();
    if cells > EXHAUSTIVE_CELL_LIMIT {
        return Err(Error::TooLargeForExhaustive { cells, limit: EXHAUSTIVE_CELL_LIMIT });
    }
    Ok(CostModel::new(options).cost(board))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_counts;

    fn board(text: &str) -> Board {
        Board::parse(text).unwrap()
    }

    fn poly(c: &[u64]) -> RookPolynomial {
        RookPolynomial::from_u64s(c)
    }

    fn oracle_poly(b: &Board) -> RookPolynomial {
        RookPolynomial::from_coeffs(oracle_counts(b).unwrap().per_k)
    }

    fn block(b: &Board, rows: &[usize], cols: &[usize]) -> BlockRef {
        BlockRef::new(b, SubboardRef::new(rows.iter().copied(), cols.iter().copied())).unwrap()
    }

    #[test]
    fn inclusion_board_examples() {
        let full = Board::full(2, 2);
        let whole = block(&full, &[0, 1], &[0, 1]);
        assert_eq!(inclusion_board(&full, &whole, 0).unwrap(), Board::empty(2, 2));
        let corner = block(&full, &[0], &[0]);
        assert_eq!(inclusion_board(&full, &corner, 1).unwrap(), Board::full(1, 1));
        assert_eq!(inclusion_board(&full, &corner, 2), Err(Error::InclusionIndex { j: 2, max: 1 }));
        let other = board("##.\n###");
        assert_eq!(inclusion_board(&other, &whole, 0), Err(Error::NotABlock));
    }

    #[test]
    fn decompose_cell_examples() {
        let (e, i) = decompose_cell(&Board::full(1, 1), CellRef::new(0, 0)).unwrap();
        assert_eq!((e, i), (Board::empty(1, 1), Board::empty(0, 0)));
        let (e, i) = decompose_cell(&Board::full(2, 2), CellRef::new(0, 0)).unwrap();
        assert_eq!(e, board(".#\n##"));
        assert_eq!(i, Board::full(1, 1));
        assert_eq!(oracle_poly(&e), poly(&[1, 3, 1]));
        assert_eq!(decompose_by_cell(&Board::full(2, 2), CellRef::new(0, 0), &Strategy::default()).unwrap(), poly(&[1, 4, 2]));
        assert_eq!(
            decompose_cell(&board("#.\n.#"), CellRef::new(0, 1)),
            Err(Error::CellNotSet { row: 0, col: 1 })
        );
        assert!(decompose_cell(&Board::full(1, 1), CellRef::new(1, 0)).is_err());
    }

    #[test]
    fn three_by_four_by_whole_block() {
        let s = Strategy::with_options(StrategyKind::LargestBlock, Options::NONE);
        let (p, stats) = rook_polynomial(&Board::full(3, 4), &s);
        assert_eq!(p, poly(&[1, 12, 36, 24]));
        assert_eq!(stats.nodes_expanded, 1);
        assert_eq!(stats.base_empty, 4);
    }

    #[test]
    fn staircase() {
        let b = board("#..\n##.\n###");
        for kind in StrategyKind::ALL {
            for options in [Options::ALL, Options::NONE] {
                assert_eq!(rook_polynomial(&b, &Strategy::with_options(kind, options)).0, poly(&[1, 6, 7, 1]));
            }
        }
    }

    #[test]
    fn empty_and_zero_dimension_boards() {
        for b in [Board::empty(0, 0), Board::empty(0, 5), Board::empty(3, 0), Board::empty(4, 4)] {
            let (p, stats) = rook_polynomial(&b, &Strategy::default());
            assert_eq!(p, RookPolynomial::one());
            assert_eq!(stats.nodes_expanded, 0);
            assert_eq!(stats.base_empty, 1);
        }
    }

    #[test]
    fn single_cell_counts_as_node_without_closed_form() {
        let s = Strategy::with_options(StrategyKind::CellFirst, Options::NONE);
        let (p, stats) = rook_polynomial(&Board::full(1, 1), &s);
        assert_eq!(p, poly(&[1, 1]));
        assert_eq!(stats.nodes_expanded, 1);
        let (_, stats) = rook_polynomial(&Board::full(1, 1), &Strategy::default());
        assert_eq!((stats.nodes_expanded, stats.base_single_cell), (0, 1));
    }

    #[test]
    fn every_block_gives_same_polynomial() {
        let b = board("##.#\n##.#\n.###\n#..#");
        let expected = oracle_poly(&b);
        for blk in crate::blocks::find_blocks(&b, usize::MAX).unwrap() {
            for kind in [StrategyKind::CellFirst, StrategyKind::GreedyBlock] {
                let (p, _) = decompose_by_block(&b, &blk, &Strategy::with_options(kind, Options::NONE)).unwrap();
                assert_eq!(p, expected, "{blk}");
            }
        }
    }

    #[test]
    fn deep_recursion() {
        let n = 12_000;
        let row = Board::full(1, n);
        let s = Strategy::with_options(StrategyKind::CellFirst, Options::NONE);
        let (p, stats) = rook_polynomial(&row, &s);
        assert_eq!(p, poly(&[1, n as u64]));
        assert!(stats.max_depth >= 10_000);
    }

    #[test]
    fn exhaustive_matches_cost_model() {
        for text in ["##.#\n##.#\n.###\n#..#", "#..\n##.\n###", "###.\n#.##\n.#.#"] {
            let b = board(text);
            for options in [Options::NONE, Options { use_cache: false, ..Options::ALL }] {
                let s = Strategy::with_options(StrategyKind::ExhaustiveBest, options);
                let (_, stats) = rook_polynomial(&b, &s);
                assert_eq!(stats.nodes_expanded, optimal_node_count(&b, options).unwrap(), "{text}");
            }
        }
    }

    #[test]
    fn stats_block_format() {
        let (_, stats) = rook_polynomial(&Board::full(2, 2), &Strategy::default());
        let text = stats.to_string();
        assert!(text.starts_with("nodes_expanded=0\n"));
        assert!(text.contains("base_case_hits.rectangle=1\n"));
        assert!(text.ends_with("max_depth=0"));
    }
}
