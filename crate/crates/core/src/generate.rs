//! Deterministic board families for tests and benchmarks.

use crate::board::Board;

/// 64-bit linear congruential generator,
/// `x' = 6364136223846793005 x + 1442695040888963407 (mod 2^64)`.
#[derive(Clone, Debug)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    const MUL: u64 = 6_364_136_223_846_793_005;
    const INC: u64 = 1_442_695_040_888_963_407;

    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(Self::MUL).wrapping_add(Self::INC);
        self.state
    }

    /// Top 53 bits of the next state, scaled into `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform-ish value in `0..bound` (top bits, modulo reduction).
    pub fn below(&mut self, bound: usize) -> usize {
        ((self.next_u64() >> 32) % bound as u64) as usize
    }

    /// Fisher-Yates shuffle of `0..len`.
    pub fn permutation(&mut self, len: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..len).collect();
        for i in (1..len).rev() {
            perm.swap(i, self.below(i + 1));
        }
        perm
    }
}

pub fn rectangle(m: usize, n: usize) -> Board {
    Board::full(m, n)
}

/// Row `i` holds columns `0..=i`.
pub fn staircase(n: usize) -> Board {
    Board::from_cells(n, n, (0..n).flat_map(|i| (0..=i).map(move |j| (i, j)))).expect("in range")
}

/// Each cell, in row-major order, is set when the next draw is below
/// `density`.
pub fn random(m: usize, n: usize, density: f64, seed: u64) -> Board {
    let mut rng = Lcg::new(seed);
    let mut cells = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if rng.next_f64() < density {
                cells.push((i, j));
            }
        }
    }
    Board::from_cells(m, n, cells).expect("in range")
}

/// Shape of a bridged board: two full rectangles on disjoint rows and
/// columns, plus a full `bridge_rows x bridge_cols` block on the first
/// rectangle's top rows and the second rectangle's leftmost columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bridged {
    pub m1: usize,
    pub n1: usize,
    pub m2: usize,
    pub n2: usize,
    pub bridge_rows: usize,
    pub bridge_cols: usize,
}

impl Bridged {
    pub fn is_valid(&self) -> bool {
        self.bridge_rows <= self.m1 && self.bridge_cols <= self.n2
    }

    /// The board is `(m1 + m2) x (n1 + n2)`.
    pub fn board(&self) -> Option<Board> {
        if !self.is_valid() {
            return None;
        }
        let Bridged { m1, n1, m2, n2, bridge_rows, bridge_cols } = *self;
        let first = (0..m1).flat_map(|i| (0..n1).map(move |j| (i, j)));
        let second = (m1..m1 + m2).flat_map(|i| (n1..n1 + n2).map(move |j| (i, j)));
        let bridge = (0..bridge_rows).flat_map(|i| (n1..n1 + bridge_cols).map(move |j| (i, j)));
        Some(Board::from_cells(m1 + m2, n1 + n2, first.chain(second).chain(bridge)).expect("in range"))
    }
}
