use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nofmux::combinatorics::{
    build_matrix_a, filtering_to_multiplexing, is_filtering_set, is_good_triplet, is_multiplexing_set,
    is_repetitive_set, BindingTriplet, Condition, FilteringTriplet, MultiplexTriplet, Permutation,
};
use nofmux::demo::random_filtering_instance;
use nofmux::model::RestrictionGraph;

fn permutation(k: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=k).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

proptest! {
    #[test]
    fn inverse_composes_to_identity(p in (2usize..10).prop_flat_map(permutation)) {
        prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        prop_assert!(p.inverse().compose(&p).unwrap().is_identity());
    }

    #[test]
    fn permuted_graph_relabels_edges(
        (p, edges) in (3usize..8).prop_flat_map(|k| (permutation(k), proptest::collection::vec((1..=k, 1..=k), 0..12)))
    ) {
        let k = p.k();
        let edges: Vec<_> = edges.into_iter().filter(|(i, j)| i != j).collect();
        let g = RestrictionGraph::new(k, edges.clone()).unwrap();
        let h = g.permuted(&p).unwrap();
        for (i, j) in edges {
            prop_assert!(h.has_edge(p.apply(i), p.apply(j)));
        }
        prop_assert_eq!(g.edges().len(), h.edges().len());
    }

    #[test]
    fn random_filtering_sets_convert(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, ell, s) = random_filtering_instance(&mut rng).unwrap();
        let a = build_matrix_a(&g, ell, &s).unwrap();
        let m = filtering_to_multiplexing(&s, &a).unwrap();
        prop_assert_eq!(is_multiplexing_set(&m, a.rows(), &g).unwrap(), Ok(()));
        for (t, mt) in s.iter().filter(|t| !t.set.is_empty()).zip(&m) {
            let images: BTreeSet<usize> = mt.images(a.rows()).into_iter().collect();
            prop_assert_eq!(images, t.set.iter().copied().collect::<BTreeSet<_>>());
        }
    }

    #[test]
    fn overloaded_sender_is_not_ell_filtering(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, _, s) = random_filtering_instance(&mut rng).unwrap();
        let r = is_filtering_set(&s, &g, 1).unwrap();
        prop_assert!(r.verdict.is_ok());
        prop_assert_eq!(r.ell_filtering, r.r_max == 0);
    }
}

#[test]
fn triplet_conditions_are_named() {
    let g = RestrictionGraph::new(4, [(1, 3)]).unwrap();
    let id = Permutation::identity(4);
    let swap23 = Permutation::transposition(4, 2, 3).unwrap();
    let swap12 = Permutation::transposition(4, 1, 2).unwrap();
    let perms = [id.clone(), swap23.clone(), swap12];

    let good = MultiplexTriplet::new(1, 2, [2]).unwrap();
    // π_2 maps 2 to 3, which sender 1 sees
    assert_eq!(is_good_triplet(&good, &perms, &g).unwrap().unwrap_err().condition, Condition::AlternativesUnseen);
    let moved = MultiplexTriplet::new(1, 4, [3]).unwrap();
    assert_eq!(is_good_triplet(&moved, &perms, &g).unwrap().unwrap_err().condition, Condition::SenderFixed);

    let open = RestrictionGraph::empty(4).unwrap();
    assert_eq!(is_good_triplet(&good, &perms, &open).unwrap(), Ok(()));
}

#[test]
fn pairwise_conditions() {
    let g = RestrictionGraph::empty(5).unwrap();
    let perms = [Permutation::identity(5), Permutation::transposition(5, 2, 3).unwrap()];
    let overlapping = [MultiplexTriplet::new(1, 2, [2]).unwrap(), MultiplexTriplet::new(4, 3, [2]).unwrap()];
    let v = is_multiplexing_set(&overlapping, &perms, &g).unwrap().unwrap_err();
    assert_eq!(v.condition, Condition::DisjointRecipients);

    let perms = [perms[0].clone(), perms[1].clone(), Permutation::transposition(5, 1, 5).unwrap()];
    let chained = [MultiplexTriplet::new(1, 2, [2]).unwrap(), MultiplexTriplet::new(4, 1, [3]).unwrap()];
    let v = is_multiplexing_set(&chained, &perms, &g).unwrap().unwrap_err();
    assert_eq!(v.condition, Condition::SenderNotRecipient);
}

#[test]
fn filtering_violations() {
    let g = RestrictionGraph::new(6, [(1, 3)]).unwrap();
    let seen = [FilteringTriplet::new(1, 2, vec![3]).unwrap()];
    assert_eq!(is_filtering_set(&seen, &g, 3).unwrap().verdict.unwrap_err().condition, Condition::FilterUnseen);
    let overlap = [
        FilteringTriplet::new(1, 2, vec![4]).unwrap(),
        FilteringTriplet::new(5, 6, vec![4]).unwrap(),
    ];
    assert_eq!(
        is_filtering_set(&overlap, &g, 3).unwrap().verdict.unwrap_err().condition,
        Condition::DisjointRecipients
    );
    assert!(is_filtering_set(&[], &g, 1).unwrap().ell_filtering);
}

#[test]
fn binding_sets() {
    let perms = [Permutation::identity(5), Permutation::new(vec![4, 2, 5, 1, 3]).unwrap()];
    assert_eq!(is_repetitive_set(&[BindingTriplet::new(2, 2, [1, 2])], &perms).unwrap(), Ok(()));
    // party 3 sits at position 3 in one chain and position 5 in the other
    assert!(is_repetitive_set(&[BindingTriplet::new(3, 3, [1, 2])], &perms).unwrap().is_err());
}

#[test]
fn out_of_range_is_a_domain_error() {
    let g = RestrictionGraph::empty(3).unwrap();
    let t = MultiplexTriplet::new(1, 7, [1]).unwrap();
    assert!(is_good_triplet(&t, &[Permutation::identity(3)], &g).is_err());
    assert!(Permutation::new(vec![1, 1, 2]).is_err());
    assert!(FilteringTriplet::new(1, 2, vec![3, 3]).is_err());
}
