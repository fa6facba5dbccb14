//! Blocks and pivot selection.
//!
//! A block is a subboard `S` (rows `R`, columns `C`) such that every row of
//! `R` looks the same outside `C`, and every column of `C` looks the same
//! outside `R`. Any single cell is a block.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::board::{BitRow, Board, CellRef, SubboardRef};
use crate::decomposition::{inclusion_unchecked, remaining_cells, CostModel};
use crate::error::{Error, Result};

/// Boards above this many cells are rejected by [`StrategyKind::ExhaustiveBest`].
pub const EXHAUSTIVE_CELL_LIMIT: usize = 16;

/// A subboard known to satisfy both block conditions on its host board.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockRef {
    sub: SubboardRef,
}

impl BlockRef {
    /// Validates `sub` against `board`.
    pub fn new(board: &Board, sub: SubboardRef) -> Result<Self> {
        let (s, t) = sub.shape();
        if s == 0 || t == 0 || !is_block(board, &sub)? {
            return Err(Error::NotABlock);
        }
        Ok(BlockRef { sub })
    }

    /// The 1x1 block at a position of `board`.
    pub fn cell(board: &Board, cell: CellRef) -> Result<Self> {
        Self::new(board, SubboardRef::cell(cell))
    }

    pub(crate) fn new_unchecked(sub: SubboardRef) -> Self {
        BlockRef { sub }
    }

    pub fn sub(&self) -> &SubboardRef {
        &self.sub
    }

    pub fn rows(&self) -> &[usize] {
        self.sub.rows()
    }

    pub fn cols(&self) -> &[usize] {
        self.sub.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.sub.shape()
    }

    pub fn size(&self) -> usize {
        let (s, t) = self.shape();
        s * t
    }

    pub fn as_cell(&self) -> Option<CellRef> {
        match (self.rows(), self.cols()) {
            ([r], [c]) => Some(CellRef::new(*r, *c)),
            _ => None,
        }
    }
}

impl fmt::Display for BlockRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (s, t) = self.shape();
        write!(f, "{s}x{t} rows {:?} cols {:?}", self.rows(), self.cols())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    CellFirst,
    CellLast,
    LargestBlock,
    GreedyBlock,
    ExhaustiveBest,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::CellFirst,
        StrategyKind::CellLast,
        StrategyKind::LargestBlock,
        StrategyKind::GreedyBlock,
        StrategyKind::ExhaustiveBest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::CellFirst => "cell-first",
            StrategyKind::CellLast => "cell-last",
            StrategyKind::LargestBlock => "largest-block",
            StrategyKind::GreedyBlock => "greedy-block",
            StrategyKind::ExhaustiveBest => "exhaustive-best",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownStrategy(s.to_string()))
    }
}

/// Shortcuts the engine may take before picking a pivot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Options {
    pub use_rectangle_closed_form: bool,
    pub use_disjoint_split: bool,
    pub use_cache: bool,
}

impl Options {
    pub const ALL: Options =
        Options { use_rectangle_closed_form: true, use_disjoint_split: true, use_cache: true };
    pub const NONE: Options =
        Options { use_rectangle_closed_form: false, use_disjoint_split: false, use_cache: false };
}

impl Default for Options {
    fn default() -> Self {
        Options::ALL
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub options: Options,
}

impl Strategy {
    pub fn new(kind: StrategyKind) -> Self {
        Strategy { kind, options: Options::default() }
    }

    pub fn with_options(kind: StrategyKind, options: Options) -> Self {
        Strategy { kind, options }
    }
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::new(StrategyKind::GreedyBlock)
    }
}

/// Checks both block conditions for `sub` on `board`. Empty row or column
/// sets satisfy the conditions vacuously.
pub fn is_block(board: &Board, sub: &SubboardRef) -> Result<bool> {
    sub.check_in(board)?;
    Ok(block_conditions_hold(board, sub))
}

pub(crate) fn block_conditions_hold(board: &Board, sub: &SubboardRef) -> bool {
    let cols = BitRow::from_indices(board.num_cols(), sub.cols());
    let outside_cols = cols.complement(board.num_cols());
    if let Some((&first, rest)) = sub.rows().split_first() {
        let reference = board.row(first);
        if !rest.iter().all(|&r| board.row(r).agrees_on(reference, &outside_cols)) {
            return false;
        }
    }
    let t = sub.cols().len();
    let mut in_rows = vec![false; board.num_rows()];
    for &r in sub.rows() {
        in_rows[r] = true;
    }
    (0..board.num_rows()).filter(|&r| !in_rows[r]).all(|r| {
        let hit = board.row(r).and(&cols).count();
        hit == 0 || hit == t
    })
}

/// Grows `(rows, cols)` until it satisfies both block conditions: columns on
/// which the rows disagree join `cols`, rows that are non-constant on `cols`
/// join `rows`.
fn close(board: &Board, mut rows: BitRow, mut cols: BitRow) -> (BitRow, BitRow) {
    let (m, n) = (board.num_rows(), board.num_cols());
    loop {
        let mut any = BitRow::new(n);
        let mut all = BitRow::full(n);
        for r in rows.ones() {
            any.or_assign(board.row(r));
            all.and_assign(board.row(r));
        }
        let disagree = any.minus(&all).minus(&cols);
        let mut grown = !disagree.is_empty();
        cols.or_assign(&disagree);

        let t = cols.count();
        let mut new_rows = BitRow::new(m);
        for r in rows.complement(m).ones() {
            let hit = board.row(r).and(&cols).count();
            if hit != 0 && hit != t {
                new_rows.set(r);
            }
        }
        grown |= !new_rows.is_empty();
        rows.or_assign(&new_rows);
        if !grown {
            break;
        }
    }
    (rows, cols)
}

/// Seed-and-closure block discovery.
///
/// Seeds are every cell, every pair of rows, every pair of columns, every
/// class of identical rows (columns) together with its support, and every
/// row (column) paired with a class of columns (rows) identical off it. Each
/// closure that ends up with rows and columns is a block; duplicates are
/// dropped. Sorted by descending `s * t`, then ascending `(rows, cols)`,
/// and truncated to `max_candidates`.
pub fn find_blocks(board: &Board, max_candidates: usize) -> Result<Vec<BlockRef>> {
    if board.is_empty() {
        return Err(Error::NoCells);
    }
    let (m, n) = (board.num_rows(), board.num_cols());
    let columns = board.columns();
    let mut closed: HashSet<(BitRow, BitRow)> = HashSet::new();
    let mut emit = |rows: BitRow, cols: BitRow| {
        let (rows, cols) = close(board, rows, cols);
        if !rows.is_empty() && !cols.is_empty() {
            closed.insert((rows, cols));
        }
    };

    for cell in board.cells() {
        emit(BitRow::from_indices(m, &[cell.row]), BitRow::from_indices(n, &[cell.col]));
    }
    let live_rows: Vec<usize> = (0..m).filter(|&r| !board.row(r).is_empty()).collect();
    for (a, &r1) in live_rows.iter().enumerate() {
        for &r2 in &live_rows[a + 1..] {
            emit(BitRow::from_indices(m, &[r1, r2]), BitRow::new(n));
        }
    }
    let live_cols: Vec<usize> = (0..n).filter(|&c| !columns[c].is_empty()).collect();
    for (a, &c1) in live_cols.iter().enumerate() {
        for &c2 in &live_cols[a + 1..] {
            emit(BitRow::new(m), BitRow::from_indices(n, &[c1, c2]));
        }
    }
    // Identical rows never disagree, so pair seeds cannot grow them; seed
    // each class of identical rows with its cells' columns (and likewise for
    // columns). On a full rectangle this yields the whole board.
    let row_twins = twin_classes(&live_rows, |r| board.row(r));
    let col_twins = twin_classes(&live_cols, |c| &columns[c]);
    for (class, support) in &row_twins {
        emit(BitRow::from_indices(m, class), support.clone());
    }
    for (class, support) in &col_twins {
        emit(support.clone(), BitRow::from_indices(n, class));
    }
    // A class of identical rows against a class of identical columns is
    // closed; seed those that hold cells (e.g. a bridge between two pieces).
    for (rows, row_support) in &row_twins {
        for (cols, _) in &col_twins {
            if row_support.get(cols[0]) {
                emit(BitRow::from_indices(m, rows), BitRow::from_indices(n, cols));
            }
        }
    }
    // A single row with any set of columns that agree off that row is a
    // block; seed each row with each such column class (and transposed).
    for &r in &live_rows {
        let off_row: Vec<BitRow> = columns.iter().map(|col| col.minus(&BitRow::from_indices(m, &[r]))).collect();
        for (class, _) in twin_classes(&live_cols, |c| &off_row[c]) {
            emit(BitRow::from_indices(m, &[r]), BitRow::from_indices(n, &class));
        }
    }
    for &c in &live_cols {
        let off_col: Vec<BitRow> =
            (0..m).map(|r| board.row(r).minus(&BitRow::from_indices(n, &[c]))).collect();
        for (class, _) in twin_classes(&live_rows, |r| &off_col[r]) {
            emit(BitRow::from_indices(m, &class), BitRow::from_indices(n, &[c]));
        }
    }

    let found: BTreeSet<SubboardRef> =
        closed.into_iter().map(|(rows, cols)| SubboardRef::new(rows.ones(), cols.ones())).collect();
    let mut blocks: Vec<BlockRef> = found
        .into_iter()
        .filter(|sub| block_conditions_hold(board, sub))
        .map(BlockRef::new_unchecked)
        .filter(|b| cells_in(board, b) > 0)
        .collect();
    // BTreeSet order is already ascending (rows, cols); the sort is stable.
    blocks.sort_by_key(|b| std::cmp::Reverse(b.size()));
    blocks.truncate(max_candidates);
    Ok(blocks)
}

/// Groups `indices` by identical bitsets; returns each group with the shared
/// bitset.
fn twin_classes<'b>(indices: &[usize], line: impl Fn(usize) -> &'b BitRow) -> Vec<(Vec<usize>, BitRow)> {
    let mut classes: Vec<(Vec<usize>, BitRow)> = Vec::new();
    for &i in indices {
        match classes.iter_mut().find(|(_, bits)| bits == line(i)) {
            Some((members, _)) => members.push(i),
            None => classes.push((vec![i], line(i).clone())),
        }
    }
    classes
}

fn cells_in(board: &Board, block: &BlockRef) -> usize {
    let cols = BitRow::from_indices(board.num_cols(), block.cols());
    block.rows().iter().map(|&r| board.row(r).and(&cols).count()).sum()
}

/// Blocks the engine can decompose by without coming back to the same
/// board: at least one cell, and either full (closed form for its own
/// polynomial) or missing some cell of the board.
pub(crate) fn productive_blocks(board: &Board) -> Vec<BlockRef> {
    let total = board.cell_count();
    find_blocks(board, usize::MAX)
        .unwrap_or_default()
        .into_iter()
        .filter(|b| {
            let inside = cells_in(board, b);
            inside > 0 && (inside == b.size() || inside < total)
        })
        .collect()
}

/// Lookahead score for greedy selection: the cells still needing work
/// after one step by `block`, summed over the inclusion boards `B_{S,j}`
/// with `r_j(S) > 0`, plus the block's own cells when it is not full.
///
/// A board's remaining cells are those not settled by a base case the
/// options enable (empty, full rectangle, disjoint pieces that are). With
/// every shortcut off this is the plain cell count of each inclusion board.
pub fn lookahead_score(board: &Board, block: &BlockRef, options: &Options) -> usize {
    let inner = board.extract_unchecked(block.sub());
    let own = if inner.is_full() { 0 } else { remaining_cells(&inner, options) };
    own + (0..=inner.matching_number())
        .map(|j| remaining_cells(&inclusion_unchecked(board, block, j), options))
        .sum::<usize>()
}

fn first_cell(board: &Board) -> Result<CellRef> {
    board.cells().next().ok_or(Error::NoCells)
}

fn last_cell(board: &Board) -> Result<CellRef> {
    board.cells().last().ok_or(Error::NoCells)
}

pub(crate) fn greedy_pivot(board: &Board, options: &Options) -> Result<BlockRef> {
    productive_blocks(board)
        .into_iter()
        .map(|b| (lookahead_score(board, &b, options), b))
        .min_by(|(sa, a), (sb, b)| sa.cmp(sb).then_with(|| a.sub().cmp(b.sub())))
        .map(|(_, b)| b)
        .ok_or(Error::NoCells)
}

pub(crate) fn largest_pivot(board: &Board) -> Result<BlockRef> {
    productive_blocks(board).into_iter().next().ok_or(Error::NoCells)
}

pub(crate) fn cell_pivot(board: &Board, last: bool) -> Result<BlockRef> {
    let cell = if last { last_cell(board)? } else { first_cell(board)? };
    Ok(BlockRef::new_unchecked(SubboardRef::cell(cell)))
}

/// Picks the next decomposition pivot for `board` under `strategy`.
///
/// Block strategies choose among discovered blocks that hold at least one
/// cell and do not reproduce the board itself (a non-full block holding
/// every cell would recurse into an identical problem).
pub fn choose_pivot(board: &Board, strategy: &Strategy) -> Result<BlockRef> {
    if board.is_empty() {
        return Err(Error::NoCells);
    }
    match strategy.kind {
        StrategyKind::CellFirst => cell_pivot(board, false),
        StrategyKind::CellLast => cell_pivot(board, true),
        StrategyKind::LargestBlock => largest_pivot(board),
        StrategyKind::GreedyBlock => greedy_pivot(board, &strategy.options),
        StrategyKind::ExhaustiveBest => {
            let cells = board.cell_count();
            if cells > EXHAUSTIVE_CELL_LIMIT {
                return Err(Error::TooLargeForExhaustive { cells, limit: EXHAUSTIVE_CELL_LIMIT });
            }
            Ok(CostModel::new(strategy.options).best_pivot(board).0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::inclusion_board;

    fn board(text: &str) -> Board {
        Board::parse(text).unwrap()
    }

    fn sub(rows: &[usize], cols: &[usize]) -> SubboardRef {
        SubboardRef::new(rows.iter().copied(), cols.iter().copied())
    }

    #[test]
    fn strategy_names_round_trip() {
        for kind in StrategyKind::ALL {
            assert_eq!(kind.name().parse::<StrategyKind>(), Ok(kind));
        }
        assert!(matches!("biggest".parse::<StrategyKind>(), Err(Error::UnknownStrategy(_))));
    }

    #[test]
    fn is_block_examples() {
        let b = board("#.#\n.##\n#..");
        for r in 0..3 {
            for c in 0..3 {
                assert!(is_block(&b, &sub(&[r], &[c])).unwrap());
            }
        }
        assert!(is_block(&Board::full(2, 2), &sub(&[0, 1], &[0, 1])).unwrap());
        assert!(!is_block(&board("##.\n###"), &sub(&[0, 1], &[0, 1])).unwrap());
        assert!(is_block(&board("##.\n###"), &sub(&[0, 1], &[0, 1, 2])).unwrap());
        assert!(is_block(&b, &sub(&[5], &[0])).is_err());
    }

    #[test]
    fn block_ref_rejects_invalid() {
        let b = board("##.\n###");
        assert_eq!(BlockRef::new(&b, sub(&[0, 1], &[0, 1])), Err(Error::NotABlock));
        assert_eq!(BlockRef::new(&b, sub(&[], &[0])), Err(Error::NotABlock));
        assert!(BlockRef::new(&b, sub(&[0, 1], &[2])).is_ok());
    }

    #[test]
    fn find_blocks_full_square() {
        let blocks = find_blocks(&Board::full(2, 2), usize::MAX).unwrap();
        assert_eq!(blocks[0].sub(), &sub(&[0, 1], &[0, 1]));
        let singles = blocks.iter().filter(|b| b.size() == 1).count();
        assert_eq!(singles, 4);
    }

    #[test]
    fn find_blocks_diagonal() {
        let blocks = find_blocks(&board("#.\n.#"), usize::MAX).unwrap();
        let subs: Vec<_> = blocks.iter().map(|b| b.sub().clone()).collect();
        assert_eq!(subs, vec![sub(&[0, 1], &[0, 1]), sub(&[0], &[0]), sub(&[1], &[1])]);
    }

    #[test]
    fn find_blocks_sorted_valid_and_truncated() {
        let b = board("##..#\n##..#\n..###\n#.#.#");
        let blocks = find_blocks(&b, usize::MAX).unwrap();
        for w in blocks.windows(2) {
            assert!(w[0].size() > w[1].size() || (w[0].size() == w[1].size() && w[0].sub() < w[1].sub()));
        }
        for block in &blocks {
            assert!(is_block(&b, block.sub()).unwrap());
        }
        assert_eq!(find_blocks(&b, 2).unwrap(), blocks[..2].to_vec());
        assert_eq!(find_blocks(&Board::empty(2, 2), 5), Err(Error::NoCells));
    }

    #[test]
    fn choose_pivot_examples() {
        let cf = Strategy::new(StrategyKind::CellFirst);
        assert_eq!(choose_pivot(&Board::full(2, 2), &cf).unwrap().sub(), &sub(&[0], &[0]));
        let cl = Strategy::new(StrategyKind::CellLast);
        assert_eq!(choose_pivot(&board("#.\n#."), &cl).unwrap().sub(), &sub(&[1], &[0]));
        let lb = Strategy::new(StrategyKind::LargestBlock);
        assert_eq!(choose_pivot(&Board::full(3, 4), &lb).unwrap().sub(), &sub(&[0, 1, 2], &[0, 1, 2, 3]));
        assert_eq!(choose_pivot(&Board::empty(1, 1), &lb), Err(Error::NoCells));
    }

    #[test]
    fn pivots_skip_self_reproducing_blocks() {
        // The 2x2 block spans both cells of the diagonal but is not full.
        let lb = Strategy::new(StrategyKind::LargestBlock);
        assert_eq!(choose_pivot(&board("#.\n.#"), &lb).unwrap().sub(), &sub(&[0], &[0]));
    }

    #[test]
    fn exhaustive_limit() {
        let ex = Strategy::new(StrategyKind::ExhaustiveBest);
        assert!(matches!(
            choose_pivot(&Board::full(4, 5), &ex),
            Err(Error::TooLargeForExhaustive { cells: 20, limit: 16 })
        ));
        // Any full block of a full board finishes in one node.
        let b = Board::full(4, 4);
        let pivot = choose_pivot(&b, &ex).unwrap();
        assert_eq!(cells_in(&b, &pivot), pivot.size());
        let (_, stats) = crate::decomposition::decompose_by_block(&b, &pivot, &ex).unwrap();
        assert_eq!(stats.nodes_expanded, 1);
    }

    #[test]
    fn lookahead_score_without_shortcuts_counts_cells() {
        // Block rows share `row_out` cells off the block and block columns
        // share `col_out`, so B_{S,j} has |B| - |S| - j (row_out + col_out) cells.
        fn closed_form(b: &Board, block: &BlockRef) -> usize {
            let inside: usize = block.rows().iter().map(|&r| block.cols().iter().filter(|&&c| b.contains(r, c)).count()).sum();
            let r0 = block.rows()[0];
            let row_out = (0..b.num_cols()).filter(|c| b.contains(r0, *c) && !block.cols().contains(c)).count();
            let c0 = block.cols()[0];
            let col_out = (0..b.num_rows()).filter(|r| b.contains(*r, c0) && !block.rows().contains(r)).count();
            let top = b.extract(block.sub()).unwrap().matching_number();
            let own = if inside == block.size() { 0 } else { inside };
            own + (0..=top).map(|j| b.cell_count() - inside - j * (row_out + col_out)).sum::<usize>()
        }
        let boards = ["##..#\n##..#\n..###\n#.#.#", "###\n##.\n#..", "#.##\n####\n.#.#", "#.\n.#"];
        for text in boards {
            let b = board(text);
            for block in find_blocks(&b, usize::MAX).unwrap() {
                let top = b.extract(block.sub()).unwrap().matching_number();
                let direct: usize =
                    (0..=top).map(|j| inclusion_board(&b, &block, j).unwrap().cell_count()).sum();
                let full = b.extract(block.sub()).unwrap().is_full();
                let own = if full { 0 } else { b.extract(block.sub()).unwrap().cell_count() };
                assert_eq!(lookahead_score(&b, &block, &Options::NONE), direct + own, "{text} {block}");
                assert_eq!(lookahead_score(&b, &block, &Options::NONE), closed_form(&b, &block), "{text} {block}");
            }
        }
    }

    #[test]
    fn lookahead_score_ignores_settled_pieces() {
        let b = crate::generate::Bridged { m1: 3, n1: 5, m2: 4, n2: 4, bridge_rows: 2, bridge_cols: 2 }
            .board()
            .unwrap();
        let bridge = BlockRef::new(&b, SubboardRef::new([0, 1], [5, 6])).unwrap();
        assert_eq!(lookahead_score(&b, &bridge, &Options::ALL), 0);
        assert!(lookahead_score(&b, &bridge, &Options::NONE) > 0);
        let greedy = choose_pivot(&b, &Strategy::new(StrategyKind::GreedyBlock)).unwrap();
        assert_eq!(lookahead_score(&b, &greedy, &Options::ALL), 0);
        let largest = choose_pivot(&b, &Strategy::new(StrategyKind::LargestBlock)).unwrap();
        assert_ne!(greedy, largest);
    }
}
