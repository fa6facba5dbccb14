use proptest::prelude::*;
use proptest::strategy::Strategy as Gen;
use rookpoly::decomposition::optimal_node_count;
use rookpoly::{
    decompose_by_block, find_blocks, oracle_counts, rook_polynomial, Board, Options, PolyCache, RookPolynomial,
    Strategy, StrategyKind,
};

fn board(max_rows: usize, max_cols: usize) -> impl Gen<Value = Board> {
    (0..=max_rows, 0..=max_cols).prop_flat_map(|(m, n)| {
        proptest::collection::vec(any::<bool>(), m * n).prop_map(move |bits| {
            let cells = bits.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| (k / n.max(1), k % n.max(1)));
            Board::from_cells(m, n, cells).unwrap()
        })
    })
}

fn permutation(len: usize) -> impl Gen<Value = Vec<usize>> {
    Just((0..len).collect::<Vec<_>>()).prop_shuffle()
}

fn board_and_perms(max: usize) -> impl Gen<Value = (Board, Vec<usize>, Vec<usize>)> {
    board(max, max).prop_flat_map(|b| {
        let (m, n) = (b.num_rows(), b.num_cols());
        (Just(b), permutation(m), permutation(n))
    })
}

fn oracle(b: &Board) -> RookPolynomial {
    RookPolynomial::from_coeffs(oracle_counts(b).unwrap().per_k)
}

fn options() -> impl Gen<Value = Options> {
    (any::<bool>(), any::<bool>(), any::<bool>()).prop_map(|(r, s, c)| Options {
        use_rectangle_closed_form: r,
        use_disjoint_split: s,
        use_cache: c,
    })
}

fn kind() -> impl Gen<Value = StrategyKind> {
    proptest::sample::select(StrategyKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn engine_matches_oracle(b in board(5, 5), kind in kind(), options in options()) {
        let (p, _) = rook_polynomial(&b, &Strategy::with_options(kind, options));
        prop_assert_eq!(p, oracle(&b));
    }

    #[test]
    fn polynomial_invariants(b in board(6, 6)) {
        let (p, _) = rook_polynomial(&b, &Strategy::default());
        prop_assert_eq!(p.coeff(0), 1u32.into());
        prop_assert_eq!(p.coeff(1), b.cell_count().into());
        prop_assert_eq!(p.degree().unwrap(), b.matching_number());
        prop_assert_eq!(rook_polynomial(&b.transpose(), &Strategy::default()).0, p);
    }

    #[test]
    fn permutation_invariance((b, rows, cols) in board_and_perms(6)) {
        let permuted = b.permute(&rows, &cols).unwrap();
        prop_assert_eq!(
            rook_polynomial(&permuted, &Strategy::default()).0,
            rook_polynomial(&b, &Strategy::default()).0
        );
    }

    #[test]
    fn normal_form_is_idempotent_and_equivalent((b, rows, cols) in board_and_perms(6)) {
        let once = b.normalize();
        prop_assert_eq!(once.normalize(), once.clone());
        prop_assert_eq!(once.cell_count(), b.cell_count());
        prop_assert_eq!(oracle(&once), oracle(&b));
        let permuted = b.permute(&rows, &cols).unwrap();
        prop_assert_eq!(oracle(&permuted.normalize()), oracle(&b));
    }

    #[test]
    fn product_law(a in board(4, 4), b in board(4, 4)) {
        let union = a.disjoint_union(&b);
        let s = Strategy::default();
        let product = &rook_polynomial(&a, &s).0 * &rook_polynomial(&b, &s).0;
        prop_assert_eq!(rook_polynomial(&union, &s).0, product.clone());
        prop_assert_eq!(oracle(&union), product);
    }

    #[test]
    fn multiplication_is_commutative_and_associative(a in board(3, 3), b in board(3, 3), c in board(3, 3)) {
        let (pa, pb, pc) = (oracle(&a), oracle(&b), oracle(&c));
        prop_assert_eq!(&pa * &pb, &pb * &pa);
        prop_assert_eq!(&(&pa * &pb) * &pc, &pa * &(&pb * &pc));
    }

    #[test]
    fn shared_cache_stays_sound(boards in proptest::collection::vec(board(4, 4), 1..12)) {
        let mut cache = PolyCache::new();
        let s = Strategy::default();
        for b in &boards {
            let (p, _) = rookpoly::rook_polynomial_with_store(b, &s, &mut cache);
            prop_assert_eq!(p, oracle(b));
        }
        for b in &boards {
            if let Some(p) = cache.get(b) {
                prop_assert_eq!(p, oracle(b));
            }
        }
    }

    #[test]
    fn every_block_gives_the_same_polynomial(b in board(4, 4)) {
        prop_assume!(!b.is_empty());
        let expected = oracle(&b);
        for block in find_blocks(&b, usize::MAX).unwrap() {
            let (p, stats) = decompose_by_block(&b, &block, &Strategy::default()).unwrap();
            prop_assert_eq!(&p, &expected, "block {}", block);
            prop_assert!(stats.nodes_expanded >= 1);
        }
    }

    #[test]
    fn exhaustive_is_optimal(b in board(4, 4), options in options()) {
        prop_assume!(!b.is_empty());
        let options = Options { use_cache: false, ..options };
        let best = optimal_node_count(&b, options).unwrap();
        let (_, stats) = rook_polynomial(&b, &Strategy::with_options(StrategyKind::ExhaustiveBest, options));
        prop_assert_eq!(stats.nodes_expanded, best);
        for kind in StrategyKind::ALL {
            let (_, other) = rook_polynomial(&b, &Strategy::with_options(kind, options));
            prop_assert!(other.nodes_expanded >= best, "{} beat exhaustive", kind);
        }
    }
}

#[test]
fn full_rectangles_favour_large_blocks() {
    for m in 1..=5 {
        for n in 1..=5 {
            let b = Board::full(m, n);
            let (_, large) = rook_polynomial(&b, &Strategy::with_options(StrategyKind::LargestBlock, Options::NONE));
            let (_, cell) = rook_polynomial(&b, &Strategy::with_options(StrategyKind::CellFirst, Options::NONE));
            assert_eq!(large.nodes_expanded, 1, "{m}x{n}");
            assert!(cell.nodes_expanded >= large.nodes_expanded, "{m}x{n}");
        }
    }
}
