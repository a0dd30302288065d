use proptest::prelude::*;
use sperner_core::antichain::{is_antichain, max_antichain_bruteforce, max_antichain_exact};
use sperner_core::container::{build_containers, rebuild_matches, ContainerParams};
use sperner_core::enumeration::census;
use sperner_core::lattice::{induced_edges_naive, induced_edges_sos, initial_segment};
use sperner_core::VertexSet;

fn subset_of(n: u32) -> impl Strategy<Value = VertexSet> {
    prop::collection::btree_set(0u32..1 << n, 0..=(1usize << n))
        .prop_map(move |ids| VertexSet::from_ids(n, ids).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_counters_agree(s in subset_of(7)) {
        prop_assert_eq!(induced_edges_naive(&s), induced_edges_sos(&s));
    }

    #[test]
    fn alpha_is_monotone(s in subset_of(8), extra in subset_of(8)) {
        let bigger = s.union(&extra);
        let a = max_antichain_exact(&s).unwrap();
        let b = max_antichain_exact(&bigger).unwrap();
        prop_assert!(a.alpha <= b.alpha);
        prop_assert!(a.verify(&s));
        prop_assert!(b.verify(&bigger));
    }

    #[test]
    fn exact_matches_bruteforce(ids in prop::collection::btree_set(0u32..64, 0..=18)) {
        let s = VertexSet::from_ids(6, ids).unwrap();
        prop_assert_eq!(max_antichain_exact(&s).unwrap().alpha, max_antichain_bruteforce(&s).unwrap());
    }

    #[test]
    fn containers_are_reproducible(seed in any::<u64>()) {
        let i = sperner_core::antichain::random_maximal_antichain(8, seed).unwrap();
        prop_assert!(is_antichain(&i));
        let params = ContainerParams::new(8, 1, 0.2).unwrap();
        let r = build_containers(&i, &params, false).unwrap();
        prop_assert!(r.s1.is_subset(&i) && r.s2.is_subset(&i));
        prop_assert!(i.is_subset(&r.f_s1.union(&r.s1)));
        prop_assert!(rebuild_matches(&r, &params).unwrap());
    }
}

#[test]
fn initial_segments_are_nested() {
    for r in 0..256 {
        assert!(initial_segment(8, r).unwrap().is_subset(&initial_segment(8, r + 1).unwrap()));
    }
}

#[test]
fn census_n6() {
    let c = census(6).unwrap();
    assert_eq!(c.total(), 7_828_354);
    assert_eq!(c.counts.len(), 21);
    assert_eq!(c.counts[20], 1);
}
