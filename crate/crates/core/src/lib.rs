//! Rook polynomials of generalized chessboards.
//!
//! The engine computes `R(B; x) = sum_k r_k(B) x^k`, where `r_k` counts
//! placements of `k` non-attacking rooks on the cells of `B`, by recursive
//! block decomposition. Cell decomposition is the 1x1 special case. A
//! brute-force [`oracle`] counts placements directly for cross-checking.
//!
//! ```
//! use rookpoly::{rook_polynomial, Board, Strategy};
//!
//! let board: Board = "#..\n##.\n###".parse().unwrap();
//! let (poly, _stats) = rook_polynomial(&board, &Strategy::default());
//! assert_eq!(poly.to_string(), "1 + 6x + 7x^2 + x^3");
//! ```

pub mod blocks;
pub mod board;
pub mod cache;
pub mod cli;
pub mod decomposition;
pub mod error;
pub mod generate;
pub mod oracle;
pub mod polynomial;

pub use blocks::{choose_pivot, find_blocks, is_block, BlockRef, Options, Strategy, StrategyKind};
pub use board::{Board, CellRef, SubboardRef};
pub use cache::{PolyCache, SharedPolyCache};
pub use decomposition::{
    decompose_by_block, decompose_by_cell, decompose_cell, inclusion_board, rook_polynomial,
    rook_polynomial_with_store, DecompositionStats,
};
pub use error::{Error, Result};
pub use oracle::{oracle_counts, PlacementCount};
pub use polynomial::RookPolynomial;
