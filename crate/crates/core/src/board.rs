//! Boards: finite sets of cells in an `m x n` grid, stored as one column
//! bitset per row.
//!
//! A board is a 0/1 matrix. Rows and columns may be empty, and either
//! dimension may be zero. All operations return new boards; a `Board` is
//! never mutated once it has been handed out.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

fn words_for(width: usize) -> usize {
    width.div_ceil(WORD_BITS)
}

/// Rows up to this many columns are stored inline, without allocating.
const INLINE_WORDS: usize = 2;

type Words = SmallVec<[u64; INLINE_WORDS]>;

/// A fixed-width bitset holding the cells of one row (or one column).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitRow {
    words: Words,
}

impl BitRow {
    pub fn new(width: usize) -> Self {
        BitRow { words: SmallVec::from_elem(0, words_for(width)) }
    }

    pub fn full(width: usize) -> Self {
        let mut row = BitRow::new(width);
        for (w, word) in row.words.iter_mut().enumerate() {
            let lo = w * WORD_BITS;
            let bits = (width - lo).min(WORD_BITS);
            *word = if bits == WORD_BITS { u64::MAX } else { (1u64 << bits) - 1 };
        }
        row
    }

    #[inline]
    pub fn get(&self, bit: usize) -> bool {
        self.words
            .get(bit / WORD_BITS)
            .is_some_and(|w| (w >> (bit % WORD_BITS)) & 1 == 1)
    }

    #[inline]
    pub fn set(&mut self, bit: usize) {
        self.words[bit / WORD_BITS] |= 1 << (bit % WORD_BITS);
    }

    #[inline]
    pub fn clear(&mut self, bit: usize) {
        self.words[bit / WORD_BITS] &= !(1 << (bit % WORD_BITS));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * WORD_BITS + bit)
            })
        })
    }

    /// Keeps only the bits at `keep` (ascending), packed into positions
    /// `0..keep.len()`.
    fn select(&self, keep: &[usize]) -> BitRow {
        let mut out = BitRow::new(keep.len());
        for (new, &old) in keep.iter().enumerate() {
            if self.get(old) {
                out.set(new);
            }
        }
        out
    }

    pub(crate) fn from_indices(width: usize, indices: &[usize]) -> BitRow {
        let mut out = BitRow::new(width);
        for &i in indices {
            out.set(i);
        }
        out
    }

    pub(crate) fn and(&self, other: &BitRow) -> BitRow {
        BitRow { words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect() }
    }

    pub(crate) fn or_assign(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub(crate) fn and_assign(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Bits of `self` that are not in `other`.
    pub(crate) fn minus(&self, other: &BitRow) -> BitRow {
        BitRow { words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect() }
    }

    /// Complement within `width` bits.
    pub(crate) fn complement(&self, width: usize) -> BitRow {
        BitRow::full(width).minus(self)
    }

    /// True when `self` and `other` agree on every bit of `mask`.
    pub(crate) fn agrees_on(&self, other: &BitRow, mask: &BitRow) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .zip(&mask.words)
            .all(|((a, b), m)| (a ^ b) & m == 0)
    }

    fn and_not(&mut self, mask: &BitRow) {
        for (w, m) in self.words.iter_mut().zip(&mask.words) {
            *w &= !m;
        }
    }

    /// Ordering that reads the bitset as a string starting at bit 0.
    fn string_cmp(&self, other: &BitRow) -> Ordering {
        self.words
            .iter()
            .map(|w| w.reverse_bits())
            .cmp(other.words.iter().map(|w| w.reverse_bits()))
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ones()).finish()
    }
}

/// A cell `(row, col)` of a board.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellRef {
    pub row: usize,
    pub col: usize,
}

impl CellRef {
    pub fn new(row: usize, col: usize) -> Self {
        CellRef { row, col }
    }
}

/// A subboard given by the rows and columns of the host board it covers.
///
/// The index sets are kept sorted and free of duplicates; the position of an
/// index within its set is the subboard's own row (column) index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubboardRef {
    row_set: Vec<usize>,
    col_set: Vec<usize>,
}

impl SubboardRef {
    pub fn new(rows: impl IntoIterator<Item = usize>, cols: impl IntoIterator<Item = usize>) -> Self {
        let mut row_set: Vec<usize> = rows.into_iter().collect();
        let mut col_set: Vec<usize> = cols.into_iter().collect();
        row_set.sort_unstable();
        row_set.dedup();
        col_set.sort_unstable();
        col_set.dedup();
        SubboardRef { row_set, col_set }
    }

    pub fn cell(cell: CellRef) -> Self {
        SubboardRef { row_set: vec![cell.row], col_set: vec![cell.col] }
    }

    pub fn rows(&self) -> &[usize] {
        &self.row_set
    }

    pub fn cols(&self) -> &[usize] {
        &self.col_set
    }

    /// Shape `(s, t)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.row_set.len(), self.col_set.len())
    }

    pub fn check_in(&self, board: &Board) -> Result<()> {
        check_indices(&self.row_set, board.num_rows, "row")?;
        check_indices(&self.col_set, board.num_cols, "column")
    }
}

fn check_indices(indices: &[usize], limit: usize, axis: &'static str) -> Result<()> {
    match indices.iter().find(|&&i| i >= limit) {
        Some(&index) => Err(Error::OutOfRange { axis, index, limit }),
        None => Ok(()),
    }
}

/// An `m x n` board.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Board {
    num_rows: usize,
    num_cols: usize,
    rows: Vec<BitRow>,
}

impl Board {
    /// The `m x n` board with no cells.
    pub fn empty(num_rows: usize, num_cols: usize) -> Self {
        Board { num_rows, num_cols, rows: vec![BitRow::new(num_cols); num_rows] }
    }

    /// The full `m x n` rectangle.
    pub fn full(num_rows: usize, num_cols: usize) -> Self {
        Board { num_rows, num_cols, rows: vec![BitRow::full(num_cols); num_rows] }
    }

    pub fn from_cells(
        num_rows: usize,
        num_cols: usize,
        cells: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut board = Board::empty(num_rows, num_cols);
        for (r, c) in cells {
            check_indices(&[r], num_rows, "row")?;
            check_indices(&[c], num_cols, "column")?;
            board.rows[r].set(c);
        }
        Ok(board)
    }

    pub(crate) fn from_rows(num_cols: usize, rows: Vec<BitRow>) -> Self {
        Board { num_rows: rows.len(), num_cols, rows }
    }

    /// Parses the text board format: an optional `"m n"` header line, then
    /// one line per row made of `.` and `#`.
    pub fn parse(text: &str) -> Result<Self> {
        parse_board(text)
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn num_cols(&self) -> usize {
        self.num_cols
    }

    pub fn row(&self, i: usize) -> &BitRow {
        &self.rows[i]
    }

    #[inline]
    pub fn contains(&self, row: usize, col: usize) -> bool {
        row < self.num_rows && col < self.num_cols && self.rows[row].get(col)
    }

    pub fn cell_count(&self) -> usize {
        self.rows.iter().map(BitRow::count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(BitRow::is_empty)
    }

    /// Row-major iterator over set cells.
    pub fn cells(&self) -> impl Iterator<Item = CellRef> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.ones().map(move |c| CellRef::new(r, c)))
    }

    /// True when every position of a nonempty grid holds a cell.
    pub fn is_full(&self) -> bool {
        self.num_rows > 0 && self.num_cols > 0 && self.cell_count() == self.num_rows * self.num_cols
    }

    /// The column bitsets, one per column, each of width `m`.
    pub fn columns(&self) -> Vec<BitRow> {
        let mut cols = vec![BitRow::new(self.num_rows); self.num_cols];
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                cols[c].set(r);
            }
        }
        cols
    }

    /// Size of a maximum set of non-attacking cells (maximum bipartite
    /// matching, augmenting paths).
    pub fn matching_number(&self) -> usize {
        fn augment(board: &Board, r: usize, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
            for c in board.rows[r].ones() {
                if !std::mem::replace(&mut seen[c], true)
                    && owner[c].is_none_or(|other| augment(board, other, seen, owner))
                {
                    owner[c] = Some(r);
                    return true;
                }
            }
            false
        }
        let mut owner = vec![None; self.num_cols];
        let mut size = 0;
        for r in 0..self.num_rows {
            let mut seen = vec![false; self.num_cols];
            if augment(self, r, &mut seen, &mut owner) {
                size += 1;
            }
        }
        size
    }

    pub fn transpose(&self) -> Board {
        Board::from_rows(self.num_rows, self.columns())
    }

    /// Deletes the given rows and columns, keeping the remaining ones in
    /// their original relative order.
    pub fn delete_rows_cols(&self, rows: &[usize], cols: &[usize]) -> Result<Board> {
        check_indices(rows, self.num_rows, "row")?;
        check_indices(cols, self.num_cols, "column")?;
        Ok(self.delete_unchecked(rows, cols))
    }

    pub(crate) fn delete_unchecked(&self, rows: &[usize], cols: &[usize]) -> Board {
        if rows.is_empty() && cols.is_empty() {
            return self.clone();
        }
        let keep_rows = complement(rows, self.num_rows);
        let keep_cols = complement(cols, self.num_cols);
        self.select(&keep_rows, &keep_cols)
    }

    fn select(&self, keep_rows: &[usize], keep_cols: &[usize]) -> Board {
        let rows = if keep_cols.len() == self.num_cols {
            keep_rows.iter().map(|&r| self.rows[r].clone()).collect()
        } else {
            keep_rows.iter().map(|&r| self.rows[r].select(keep_cols)).collect()
        };
        Board::from_rows(keep_cols.len(), rows)
    }

    /// Clears every cell in `sub.rows() x sub.cols()`; dimensions unchanged.
    pub fn clear_cells(&self, sub: &SubboardRef) -> Result<Board> {
        sub.check_in(self)?;
        Ok(self.clear_unchecked(sub))
    }

    pub(crate) fn clear_unchecked(&self, sub: &SubboardRef) -> Board {
        let mut mask = BitRow::new(self.num_cols);
        for &c in sub.cols() {
            mask.set(c);
        }
        let mut out = self.clone();
        for &r in sub.rows() {
            out.rows[r].and_not(&mask);
        }
        out
    }

    /// The cells of `sub` as a standalone `s x t` board.
    pub fn extract(&self, sub: &SubboardRef) -> Result<Board> {
        sub.check_in(self)?;
        Ok(self.select(sub.rows(), sub.cols()))
    }

    pub(crate) fn extract_unchecked(&self, sub: &SubboardRef) -> Board {
        self.select(sub.rows(), sub.cols())
    }

    /// Drops every row and column that holds no cell.
    pub fn compact(&self) -> Board {
        let keep_rows: Vec<usize> = (0..self.num_rows).filter(|&r| !self.rows[r].is_empty()).collect();
        let mut used = BitRow::new(self.num_cols);
        for row in &self.rows {
            for (u, w) in used.words.iter_mut().zip(&row.words) {
                *u |= w;
            }
        }
        if keep_rows.len() == self.num_rows && used.count() == self.num_cols {
            return self.clone();
        }
        let keep_cols: Vec<usize> = used.ones().collect();
        self.select(&keep_rows, &keep_cols)
    }

    /// Splits the board into pairwise disjoint pieces: connected components
    /// of the row/column incidence graph. Empty rows and columns are dropped.
    /// Components are ordered by smallest original row, then smallest
    /// original column.
    pub fn split_disjoint(&self) -> Vec<Board> {
        let cols = self.columns();
        let mut unseen = BitRow::new(self.num_rows);
        for (r, row) in self.rows.iter().enumerate() {
            if !row.is_empty() {
                unseen.set(r);
            }
        }
        let mut comps = Vec::new();
        loop {
            let Some(start) = unseen.ones().next() else { break };
            // Alternate row -> column -> row expansion until nothing is added.
            let mut rows = BitRow::from_indices(self.num_rows, &[start]);
            let mut row_cols = BitRow::new(self.num_cols);
            let mut frontier = rows.clone();
            while !frontier.is_empty() {
                let mut new_cols = BitRow::new(self.num_cols);
                for r in frontier.ones() {
                    new_cols.or_assign(&self.rows[r]);
                }
                let new_cols = new_cols.minus(&row_cols);
                row_cols.or_assign(&new_cols);
                let mut reached = BitRow::new(self.num_rows);
                for c in new_cols.ones() {
                    reached.or_assign(&cols[c]);
                }
                frontier = reached.minus(&rows);
                rows.or_assign(&frontier);
            }
            unseen.and_not(&rows);
            let (rs, cs): (Vec<usize>, Vec<usize>) = (rows.ones().collect(), row_cols.ones().collect());
            comps.push(self.select(&rs, &cs));
        }
        // Scanning rows in order already yields ascending smallest rows.
        comps
    }

    /// Permutation normal form: rows sorted, then columns sorted, repeated
    /// until nothing moves. Equal normal forms imply the boards differ only
    /// by a row and column permutation; the converse does not hold.
    pub fn normalize(&self) -> Board {
        let max_passes = self.num_rows * self.num_cols + 2;
        let mut current = self.clone();
        for _ in 0..max_passes {
            let mut next = current.sorted_rows();
            next = next.transpose().sorted_rows().transpose();
            if next == current {
                break;
            }
            current = next;
        }
        current
    }

    /// Rows in descending string order (bit 0 most significant).
    fn sorted_rows(&self) -> Board {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| b.string_cmp(a));
        Board::from_rows(self.num_cols, rows)
    }

    /// Applies permutations: new row `i` is old row `row_perm[i]`, new
    /// column `j` is old column `col_perm[j]`.
    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Board> {
        check_permutation(row_perm, self.num_rows, "row")?;
        check_permutation(col_perm, self.num_cols, "column")?;
        Ok(self.select(row_perm, col_perm))
    }

    /// Places `other` below and to the right of `self`, sharing no row or column.
    pub fn disjoint_union(&self, other: &Board) -> Board {
        let mut out = Board::empty(self.num_rows + other.num_rows, self.num_cols + other.num_cols);
        for cell in self.cells() {
            out.rows[cell.row].set(cell.col);
        }
        for cell in other.cells() {
            out.rows[self.num_rows + cell.row].set(self.num_cols + cell.col);
        }
        out
    }

    /// Key for hashing the board: dimensions and row words, byte-serialized.
    pub fn key_bytes(&self) -> Vec<u8> {
        let per_row = words_for(self.num_cols);
        let mut out = Vec::with_capacity(16 + self.num_rows * per_row * 8);
        out.extend_from_slice(&(self.num_rows as u64).to_le_bytes());
        out.extend_from_slice(&(self.num_cols as u64).to_le_bytes());
        for row in &self.rows {
            for w in &row.words {
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
        out
    }

    /// Grid text without header, rows separated by `\n`, no trailing newline.
    pub fn to_grid_string(&self) -> String {
        let mut out = String::with_capacity(self.num_rows * (self.num_cols + 1));
        for (r, row) in self.rows.iter().enumerate() {
            if r > 0 {
                out.push('\n');
            }
            out.extend((0..self.num_cols).map(|c| if row.get(c) { '#' } else { '.' }));
        }
        out
    }

    /// Text with the `"m n"` header line.
    pub fn to_text_with_header(&self) -> String {
        let mut out = format!("{} {}\n", self.num_rows, self.num_cols);
        out.push_str(&self.to_grid_string());
        if self.num_rows > 0 {
            out.push('\n');
        }
        out
    }
}

fn complement(indices: &[usize], len: usize) -> Vec<usize> {
    let mut drop = vec![false; len];
    for &i in indices {
        drop[i] = true;
    }
    (0..len).filter(|&i| !drop[i]).collect()
}

fn check_permutation(perm: &[usize], len: usize, axis: &'static str) -> Result<()> {
    check_indices(perm, len, axis)?;
    let mut seen = vec![false; len];
    for &p in perm {
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::NotAPermutation { axis });
        }
    }
    if perm.len() != len {
        return Err(Error::NotAPermutation { axis });
    }
    Ok(())
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_grid_string())
    }
}

impl fmt::Debug for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Board {}x{}", self.num_rows, self.num_cols)?;
        f.write_str(&self.to_grid_string())
    }
}

impl std::str::FromStr for Board {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_board(s)
    }
}

fn parse_error(line: usize, column: usize, reason: impl Into<String>) -> Error {
    Error::Parse { line, column, reason: reason.into() }
}

fn parse_header(line: &str) -> Result<Option<(usize, usize)>> {
    if !line.bytes().any(|b| b.is_ascii_digit()) {
        return Ok(None);
    }
    let mut parts = line.split(' ');
    let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(parse_error(1, 1, "header must be two integers separated by one space"));
    };
    let dim = |s: &str, column: usize| -> Result<usize> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(parse_error(1, column, format!("invalid dimension {s:?}")));
        }
        s.parse().map_err(|_| parse_error(1, column, format!("invalid dimension {s:?}")))
    };
    Ok(Some((dim(a, 1)?, dim(b, a.len() + 2)?)))
}

/// Parses the board file format. Line and column numbers in errors are
/// 1-based and refer to the input text.
pub fn parse_board(text: &str) -> Result<Board> {
    if let Some(pos) = text.find('\r') {
        let line = text[..pos].matches('\n').count() + 1;
        let column = pos - text[..pos].rfind('\n').map_or(0, |p| p + 1) + 1;
        return Err(parse_error(line, column, "carriage return is not allowed"));
    }
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut lines: Vec<&str> = if body.is_empty() { Vec::new() } else { body.split('\n').collect() };

    let mut line_offset = 0;
    let header = match lines.first() {
        Some(first) => parse_header(first)?,
        None => None,
    };
    if header.is_some() {
        lines.remove(0);
        line_offset = 1;
    }

    let (num_rows, num_cols) = match header {
        Some(dims) => dims,
        None => (lines.len(), lines.first().map_or(0, |l| l.chars().count())),
    };
    if lines.len() != num_rows {
        return Err(parse_error(
            line_offset + lines.len().min(num_rows) + 1,
            1,
            format!("expected {num_rows} grid lines, found {}", lines.len()),
        ));
    }

    let mut board = Board::empty(num_rows, num_cols);
    for (r, line) in lines.iter().enumerate() {
        let line_no = line_offset + r + 1;
        let mut width = 0;
        for (c, ch) in line.chars().enumerate() {
            match ch {
                '#' if c < num_cols => board.rows[r].set(c),
                '.' if c < num_cols => {}
                '#' | '.' => {
                    return Err(parse_error(line_no, c + 1, format!("line longer than {num_cols} columns")))
                }
                other => return Err(parse_error(line_no, c + 1, format!("unexpected character {other:?}"))),
            }
            width += 1;
        }
        if width != num_cols {
            return Err(parse_error(
                line_no,
                width + 1,
                format!("line has {width} columns, expected {num_cols}"),
            ));
        }
    }
    Ok(board)
}
