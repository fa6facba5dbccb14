//! Brute-force placement counting.
//!
//! Enumerates every non-attacking placement row by row: each row is either
//! left empty or given one unused column holding a cell of that row. This is
//! the injective-function view of a placement (occupied rows mapped to
//! distinct columns). Nothing here touches the decomposition code; it only
//! reads cells through [`Board::contains`].

use num_bigint::BigUint;

use crate::board::Board;
use crate::error::{Error, Result};

pub const MAX_ORACLE_CELLS: usize = 40;
pub const MAX_ORACLE_MIN_DIM: usize = 12;
/// Bound on `prod_r (1 + cells in row r)`, which bounds the number of leaves
/// the backtracking visits.
pub const MAX_ORACLE_LEAVES: u64 = 1 << 24;

/// `per_k[k]` is the number of placements of `k` rooks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlacementCount {
    pub per_k: Vec<BigUint>,
}

impl PlacementCount {
    pub fn get(&self, k: usize) -> BigUint {
        self.per_k.get(k).cloned().unwrap_or_default()
    }

    pub fn as_u64s(&self) -> Vec<u64> {
        self.per_k.iter().map(|c| u64::try_from(c).expect("count fits in u64")).collect()
    }
}

/// A board is accepted when it is small (at most 40 cells, smaller side at
/// most 12) or when its backtracking tree is bounded by [`MAX_ORACLE_LEAVES`].
pub fn within_guard(board: &Board) -> bool {
    let per_row: Vec<u64> = (0..board.num_rows())
        .map(|r| (0..board.num_cols()).filter(|&c| board.contains(r, c)).count() as u64)
        .collect();
    let cells: u64 = per_row.iter().sum();
    let small = cells <= MAX_ORACLE_CELLS as u64
        && board.num_rows().min(board.num_cols()) <= MAX_ORACLE_MIN_DIM;
    let leaves = per_row
        .iter()
        .try_fold(1u64, |acc, &c| acc.checked_mul(c + 1).filter(|&v| v <= MAX_ORACLE_LEAVES));
    small || leaves.is_some()
}

pub fn oracle_counts(board: &Board) -> Result<PlacementCount> {
    if !within_guard(board) {
        return Err(Error::OracleGuard);
    }
    let row_cells: Vec<Vec<usize>> = (0..board.num_rows())
        .map(|r| (0..board.num_cols()).filter(|&c| board.contains(r, c)).collect())
        .collect();
    let mut counts = vec![0u64; board.num_rows().min(board.num_cols()) + 1];
    let mut used = vec![false; board.num_cols()];
    place(&row_cells, 0, 0, &mut used, &mut counts);

    let mut per_k: Vec<BigUint> = counts.into_iter().map(BigUint::from).collect();
    while per_k.len() > 1 && per_k.last().is_some_and(|c| *c == BigUint::ZERO) {
        per_k.pop();
    }
    Ok(PlacementCount { per_k })
}

fn place(rows: &[Vec<usize>], row: usize, placed: usize, used: &mut [bool], counts: &mut [u64]) {
    if row == rows.len() {
        counts[placed] += 1;
        return;
    }
    place(rows, row + 1, placed, used, counts);
    for &c in &rows[row] {
        if !used[c] {
            used[c] = true;
            place(rows, row + 1, placed + 1, used, counts);
            used[c] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(text: &str) -> Vec<u64> {
        oracle_counts(&Board::parse(text).unwrap()).unwrap().as_u64s()
    }

    #[test]
    fn small_boards() {
        assert_eq!(counts("#"), vec![1, 1]);
        assert_eq!(counts("##\n##"), vec![1, 4, 2]);
        assert_eq!(counts(""), vec![1]);
        assert_eq!(counts("...\n..."), vec![1]);
        assert_eq!(counts("#..\n##.\n###"), vec![1, 6, 7, 1]);
    }

    #[test]
    fn full_three_by_four() {
        assert_eq!(counts("####\n####\n####"), vec![1, 12, 36, 24]);
    }

    #[test]
    fn guard() {
        assert_eq!(oracle_counts(&Board::full(7, 7)).map(|c| c.per_k.len()), Ok(8));
        assert_eq!(oracle_counts(&Board::full(7, 6)).unwrap().as_u64s()[6], 5040);
        assert_eq!(oracle_counts(&Board::full(13, 13)), Err(Error::OracleGuard));
        assert_eq!(oracle_counts(&Board::full(9, 12)), Err(Error::OracleGuard));
        let diag = Board::from_cells(20, 20, (0..20).map(|i| (i, i))).unwrap();
        assert_eq!(oracle_counts(&diag).unwrap().get(20), BigUint::from(1u32));
    }
}
