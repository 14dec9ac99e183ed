use proptest::prelude::*;

use sepsys::orient::{consistent_orientations, sigma_minus, splits_at, splitting_subsets};
use sepsys::testkit::{oracle, random_contraction_chain, random_system, random_tree_set, Planting};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn involution_reverses_order(seed in any::<u64>(), n in 1usize..6, p in 0.0f64..0.6) {
        let s = random_system(seed, n, p, 0.15);
        for a in s.elements() {
            prop_assert_eq!(s.inv(s.inv(a)), a);
            for b in s.elements() {
                prop_assert_eq!(s.leq(a, b), s.leq(s.inv(b), s.inv(a)));
            }
        }
    }

    #[test]
    fn orientations_and_splitting_match_oracle(seed in any::<u64>(), n in 1usize..5, p in 0.0f64..0.6) {
        let s = random_system(seed, n, p, 0.15);
        let mut fast = consistent_orientations(&s);
        let mut slow = oracle::consistent_orientations(&s);
        fast.sort();
        slow.sort();
        prop_assert_eq!(fast, slow);
        let stars: std::collections::BTreeSet<_> = splitting_subsets(&s).into_iter().collect();
        prop_assert_eq!(stars, oracle::splitting_subsets(&s));
    }

    #[test]
    fn tree_sets_have_one_orientation_per_node(seed in any::<u64>(), edges in 0usize..7) {
        let t = random_tree_set(seed, edges, Planting::default());
        prop_assert_eq!(consistent_orientations(&t.system).len(), edges + 1);
        for o in consistent_orientations(&t.system) {
            prop_assert!(splits_at(&t.system, &o).is_some());
        }
    }

    #[test]
    fn pruning_is_idempotent(seed in any::<u64>(), n in 1usize..6) {
        let s = random_system(seed, n, 0.4, 0.1);
        for sigma in splitting_subsets(&s) {
            let once = sigma_minus(&s, &sigma);
            prop_assert_eq!(sigma_minus(&s, &once), once);
        }
    }

    #[test]
    fn contraction_chain_limit_is_top(seed in any::<u64>(), levels in 1usize..5, edges in 1usize..8) {
        let c = random_contraction_chain(seed, levels, edges);
        let is = &c.system;
        let top = *is.poset().points().iter().max_by_key(|&&p| is.level(p).len()).unwrap();
        prop_assert_eq!(is.limit().system().len(), is.level(top).len());
    }
}
