//! Property tests for structural invariants.

mod common;

use hx_core::combinatorics::{binom, lovasz_shadow_lower_bound};
use hx_core::{delta, embed, hypertree, oracle, textio, Hypergraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_family, random_tree, shared_pair};

/// Random k-graph described by `(n, k, p, seed)`.
fn family() -> impl Strategy<Value = Hypergraph> {
    (2usize..=4, 0usize..=5, 0.05f64..0.9, any::<u64>()).prop_map(|(k, extra, p, seed)| {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        random_family(k + 1 + extra, k, p, &mut r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shadow_respects_lovasz(f in family(), i in 1usize..4) {
        prop_assume!(!f.is_empty() && i < f.k());
        let sh = f.shadow(i).unwrap().len() as f64;
        let lb = lovasz_shadow_lower_bound(f.len() as u64, f.k() as u32, i as u32).unwrap();
        prop_assert!(sh + 1e-6 >= lb);
    }

    #[test]
    fn degree_sum_counts_incidences(f in family(), i in 0usize..4) {
        prop_assume!(i < f.k());
        let total: usize = f.degree_map(i).values().sum();
        prop_assert_eq!(total as u128, f.len() as u128 * binom(f.k() as u64, i as u64));
    }

    #[test]
    fn tree_and_generic_counts_agree(seed in any::<u64>(), p in 0.1f64..0.7) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let h = random_tree(3, 6, &mut r);
        let f = random_family(8, 3, p, &mut r);
        let cert = hypertree::tree_cert(&h).unwrap();
        prop_assert_eq!(
            embed::count_embeddings_tree(&f, &cert, u64::MAX).unwrap(),
            embed::count_embeddings_generic(&f, &h, u64::MAX).unwrap()
        );
    }

    #[test]
    fn copy_count_is_monotone(f in family(), drop in any::<prop::sample::Index>()) {
        prop_assume!(f.k() == 3 && !f.is_empty());
        let h = shared_pair(3);
        let i = drop.index(f.len());
        let g = f.subfamily((0..f.len()).filter(|&j| j != i));
        let a = embed::count_copies_exact(&f, &h).unwrap().copies;
        let b = embed::count_copies_exact(&g, &h).unwrap().copies;
        prop_assert!(b <= a);
    }

    #[test]
    fn text_round_trip(f in family()) {
        let g = textio::parse(&textio::write(&f), false).unwrap();
        prop_assert_eq!(g.edges(), f.edges());
        prop_assert_eq!(g.k(), f.k());
    }

    #[test]
    fn filter_output_verifies(seed in any::<u64>(), extra in 0usize..6, p in 0.1f64..0.8) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let f = random_family(8 + extra, 4, p, &mut r);
        prop_assume!(!f.is_empty());
        let out = delta::filter_super_homogeneous(&f, 8).unwrap();
        prop_assert!(out.family.family.minus(&f).is_empty());
        let mi = delta::verify_super_homogeneous(&out.family, 8).unwrap();
        prop_assert!(delta::closed_under_intersection(&mi));
        prop_assert_eq!(delta::rank(&mi, 4), out.rank);
        prop_assert!(out.family.len() as u128 <= binom(f.n() as u64, out.rank as u64));
    }

    #[test]
    fn filter_is_deterministic(f in family()) {
        prop_assume!(f.k() >= 2 && !f.is_empty());
        let a = delta::filter_super_homogeneous(&f, 2 * f.k()).unwrap();
        let b = delta::filter_super_homogeneous(&f, 2 * f.k()).unwrap();
        prop_assert_eq!(a.family.family.edges(), b.family.family.edges());
        prop_assert_eq!(a.rank, b.rank);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn forb_dominates_ex(n in 4usize..=6) {
        let h = shared_pair(3);
        let (ex, _, optimal) = oracle::ex_exact(n, 3, &h, 1 << 30).unwrap();
        prop_assert!(optimal);
        let forb = oracle::forb_exact(n, 3, &h).unwrap();
        prop_assert!(oracle::log2_big(&forb) + 1e-9 >= ex as f64);
    }
}
