//! Cross-module properties: the two engines, the axiom verifier and the
//! refinement primitives checked against each other.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wl_closure::axioms::{make_fixture, verify_coherent, Fixture};
use wl_closure::classical::{classical_closure, classical_step, noncommutative_product};
use wl_closure::coloring::{is_refinement, is_same_partition, rainbow_refine, validate, ColorMatrix};
use wl_closure::probabilistic::{
    check_coherent, draw_substitution, numeric_product, probabilistic_closure, seeded_rng,
    substitution_step, RunParams,
};
use wl_closure::Backend;

fn random_matrix(rng: &mut impl Rng, n: usize, r: i64) -> ColorMatrix {
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.random_range(1..=r)).collect())
        .collect();
    validate(&rows).unwrap()
}

/// Graph with edge probability 1/2, colored loop / edge / non-edge.
fn random_undirected(rng: &mut impl Rng, n: usize) -> ColorMatrix {
    let mut rows = vec![vec![3i64; n]; n];
    for u in 0..n {
        rows[u][u] = 1;
        for v in u + 1..n {
            if rng.random_bool(0.5) {
                rows[u][v] = 2;
                rows[v][u] = 2;
            }
        }
    }
    validate(&rows).unwrap()
}

fn arb_matrix(max_n: usize, max_r: i64) -> impl Strategy<Value = ColorMatrix> {
    (1..=max_n, 1..=max_r, any::<u64>()).prop_map(|(n, r, seed)| {
        random_matrix(&mut ChaCha8Rng::seed_from_u64(seed), n, r)
    })
}

/// One exact step on the path 0-1-2, enumerated by hand: the loop at the
/// middle vertex sees two edges, the end loops see one edge and one non-edge.
#[test]
fn exact_step_on_path_matches_hand_count() {
    let x = make_fixture(&Fixture::Path(3)).unwrap();
    // loop 1, edge 2, non-edge 3 in first-occurrence order
    assert_eq!(x.to_rows(), vec![vec![1, 2, 3], vec![2, 1, 2], vec![3, 2, 1]]);
    let a = noncommutative_product(&x);
    assert_eq!(a.get(0, 0).0, vec![((1, 1), 1), ((2, 2), 1), ((3, 3), 1)]);
    assert_eq!(a.get(1, 1).0, vec![((1, 1), 1), ((2, 2), 2)]);
    assert_eq!(a.get(0, 2).0, vec![((1, 3), 1), ((2, 2), 1), ((3, 1), 1)]);
    let out = classical_step(&x);
    assert!(out.refined);
    // end->middle arcs see (1,2),(2,1),(3,2); middle->end arcs see (1,2),(2,1),(2,3)
    assert_eq!(a.get(0, 1).0, vec![((1, 2), 1), ((2, 1), 1), ((3, 2), 1)]);
    assert_eq!(a.get(1, 0).0, vec![((1, 2), 1), ((2, 1), 1), ((2, 3), 1)]);
    // loops and edges each split in two, non-edges stay together
    assert_eq!(out.result.r(), 5);
}

#[test]
fn closures_are_coherent_up_to_64_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    for n in [1, 2, 3, 5, 8, 13, 21, 34, 64] {
        for _ in 0..2 {
            let r = rng.random_range(1..=4);
            let x = random_matrix(&mut rng, n, r);
            let res = classical_closure(&x).unwrap();
            assert!(verify_coherent(&res.closure).coherent, "n = {n}");
            assert!(!classical_step(&res.closure).refined);
            assert!(is_refinement(&res.closure, &x).unwrap());
            assert!(res.iterations <= n * n + 1);
            assert!(res.trace.windows(2).all(|w| w[0] <= w[1]));
        }
        let g = random_undirected(&mut rng, n);
        assert!(verify_coherent(&classical_closure(&g).unwrap().closure).coherent);
    }
}

#[test]
fn coherent_fixtures_are_fixed_points() {
    let mut fixtures = vec![Fixture::Cycle5, Fixture::Petersen];
    fixtures.extend((1..8).map(Fixture::Trivial));
    fixtures.extend((1..9).map(Fixture::Cyclic));
    for f in fixtures {
        let x = make_fixture(&f).unwrap();
        let res = classical_closure(&x).unwrap();
        assert!(is_same_partition(&res.closure, &x).unwrap(), "{f}");
        assert_eq!(res.refining_iterations(), 0, "{f}");
        let mc = probabilistic_closure(&x, &RunParams::new(7)).unwrap();
        assert!(is_same_partition(&mc.closure, &x).unwrap(), "{f}");
    }
}

#[test]
fn single_vertex_closure_is_the_input() {
    let x = validate(&[vec![9]]).unwrap();
    assert_eq!(classical_closure(&x).unwrap().closure, x);
    assert_eq!(probabilistic_closure(&x, &RunParams::new(1)).unwrap().closure, x);
}

#[test]
fn uniform_k5_matches_exact() {
    let x = validate(&vec![vec![1; 5]; 5]).unwrap();
    let mc = probabilistic_closure(&x, &RunParams::new(2)).unwrap();
    let exact = classical_closure(&x).unwrap();
    assert_eq!(mc.closure.r(), 2);
    assert!(is_same_partition(&mc.closure, &exact.closure).unwrap());
}

#[test]
fn random_32_matches_exact() {
    let x = make_fixture(&Fixture::Random { n: 32, r: 3, seed: 32 }).unwrap();
    let mc = probabilistic_closure(&x, &RunParams::new(32)).unwrap();
    let exact = classical_closure(&x).unwrap();
    assert!(is_same_partition(&mc.closure, &exact.closure).unwrap());
}

#[test]
fn check_is_one_sided_on_verified_coherent_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..40 {
        let x = random_matrix(&mut rng, 2 + i % 12, 3);
        let closure = classical_closure(&x).unwrap().closure;
        assert!(verify_coherent(&closure).coherent);
        for seed in 0..5 {
            assert!(check_coherent(&closure, 8, 1, &mut seeded_rng(seed)).unwrap());
        }
    }
}

#[test]
fn value_entries_stay_within_n_m_squared() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for m in [2u64, 3, 10, 1_000_000, 1_000_000_000] {
        let x = rainbow_refine(&random_matrix(&mut rng, 7, 4));
        let sub = draw_substitution(x.r() as usize, m, &mut rng).unwrap();
        let a = numeric_product(&x, &sub, Backend::Blocked).unwrap();
        let bound = 7i128 * (m as i128) * (m as i128);
        assert!(a.cells().iter().all(|&v| v >= 7 && (v as i128) <= bound));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn axioms_agree_with_exact_step(x in arb_matrix(12, 4), pick in 0usize..3) {
        let candidate = match pick {
            0 => x.clone(),
            1 => rainbow_refine(&x),
            _ => classical_closure(&x).unwrap().closure,
        };
        let exact = candidate.is_rainbow() && !classical_step(&candidate).refined;
        prop_assert_eq!(verify_coherent(&candidate).coherent, exact);
    }

    #[test]
    fn exact_closure_is_canonical(x in arb_matrix(10, 4), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..x.n()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let direct = classical_closure(&x).unwrap().closure;
        let permuted = classical_closure(&x.permute(&perm)).unwrap().closure;
        prop_assert_eq!(permuted, direct.permute(&perm));
    }

    #[test]
    fn color_names_do_not_matter(x in arb_matrix(9, 5), offset in 1u32..50) {
        let renamed: Vec<u32> = x.cells().iter().map(|&c| 1000 - c * offset).collect();
        let y = ColorMatrix::from_ranked(x.n(), renamed).unwrap();
        let a = classical_closure(&x).unwrap().closure;
        let b = classical_closure(&y).unwrap().closure;
        prop_assert!(is_same_partition(&a, &b).unwrap());
    }

    #[test]
    fn exact_partition_refines_monte_carlo_at_every_step(x in arb_matrix(10, 3), seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let mut exact = rainbow_refine(&x);
        let mut mc = exact.clone();
        for _ in 0..6 {
            exact = classical_step(&exact).result;
            // tiny m makes collisions likely; the inclusion must still hold
            let sub = draw_substitution(mc.r() as usize, 3, &mut rng).unwrap();
            mc = substitution_step(&mc, &sub, Backend::Naive).unwrap().0.result;
            prop_assert!(is_refinement(&exact, &mc).unwrap());
        }
    }

    #[test]
    fn monte_carlo_runs_are_deterministic(x in arb_matrix(10, 3), seed in any::<u64>()) {
        let p = RunParams::new(seed);
        let a = probabilistic_closure(&x, &p).unwrap();
        let b = probabilistic_closure(&x, &p).unwrap();
        prop_assert!(a.trace.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(is_refinement(&a.closure, &x).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn backends_give_identical_runs(x in arb_matrix(12, 3), seed in any::<u64>()) {
        let blocked = RunParams::new(seed);
        let naive = RunParams { backend: Backend::Naive, ..blocked };
        prop_assert_eq!(
            probabilistic_closure(&x, &blocked).unwrap(),
            probabilistic_closure(&x, &naive).unwrap()
        );
    }
}
