mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::Naive;
use isocode::graph::Graph;
use isocode::group::{automorphism_group, canonical_coset_rep, find_isomorphism, StabilizerChain};
use isocode::perm::{all_permutations, Permutation};
use isocode::reduction::random_permutation;

fn graphs(seed: u64, count: usize, max_n: usize) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_n);
            Graph::random(n, rng.gen_range(0.2..0.8), &mut rng).unwrap()
        })
        .collect()
}

#[test]
fn automorphisms_match_brute_force_and_form_a_group() {
    let mut corpus = graphs(1, 60, 7);
    corpus.extend(common::FIXTURES.map(common::fixture));
    for g in corpus {
        let group = automorphism_group(&g).unwrap();
        let mut lib: Vec<Vec<usize>> = group.elements().iter().map(|p| p.images().to_vec()).collect();
        let mut brute = common::automorphisms(&Naive::from(&g));
        lib.sort();
        brute.sort();
        assert_eq!(lib, brute);
        assert_eq!(group.order(), common::aut_count_backtrack(&Naive::from(&g)));
        for a in group.elements() {
            assert_eq!(a.apply_to_graph(&g).unwrap(), g);
            assert!(group.contains(&a.inverse()));
            for b in group.elements().iter().take(12) {
                assert!(group.contains(&a.compose(b).unwrap()));
            }
        }
    }
}

#[test]
fn non_members_move_the_graph() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for g in graphs(2, 30, 6) {
        let group = automorphism_group(&g).unwrap();
        let mut tried = 0;
        while tried < 100 && group.order() < common::factorial(g.n()) as usize {
            let p = random_permutation(g.n(), &mut rng);
            if !group.contains(&p) {
                assert_ne!(p.apply_to_graph(&g).unwrap(), g);
                tried += 1;
            }
        }
    }
}

#[test]
fn coset_representatives_split_s_n() {
    for g in graphs(3, 30, 5) {
        let group = automorphism_group(&g).unwrap();
        let reps: HashSet<Permutation> =
            all_permutations(g.n()).map(|p| canonical_coset_rep(&group, &p).unwrap()).collect();
        assert_eq!(reps.len() as u128, common::factorial(g.n()) / group.order() as u128);
        for r in &reps {
            assert_eq!(&canonical_coset_rep(&group, r).unwrap(), r);
        }
    }
}

#[test]
fn chain_levels_match_pointwise_stabilizers() {
    for g in graphs(4, 30, 7) {
        let auts = common::automorphisms(&Naive::from(&g));
        let chain = StabilizerChain::new(automorphism_group(&g).unwrap());
        for i in 0..=g.n() {
            let count = auts.iter().filter(|p| (0..i).all(|v| p[v] == v)).count();
            assert_eq!(chain.level(i).order, count);
            assert!(chain.members(i).iter().all(|p| (0..i).all(|v| p.apply(v) == v)));
        }
    }
}

#[test]
fn isomorphism_search_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for g in graphs(5, 40, 6) {
        let h = if rng.gen() { random_permutation(g.n(), &mut rng).apply_to_graph(&g).unwrap() } else { Graph::random(g.n(), 0.5, &mut rng).unwrap() };
        let found = find_isomorphism(&g, &h).unwrap();
        assert_eq!(found.is_some(), common::isomorphic(&Naive::from(&g), &Naive::from(&h)));
        if let Some(p) = found {
            assert_eq!(p.apply_to_graph(&g).unwrap(), h);
        }
    }
}

#[test]
fn heap_enumeration_covers_s_n() {
    for n in 0..=6 {
        let perms: HashSet<Vec<usize>> = common::heap_permutations(n).into_iter().collect();
        assert_eq!(perms.len() as u128, common::factorial(n));
        let lib: HashSet<Vec<usize>> = all_permutations(n).map(|p| p.images().to_vec()).collect();
        assert_eq!(lib, perms);
    }
}

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Permutation::from_images(v).unwrap())
}

proptest! {
    #[test]
    fn action_respects_composition(p in perm(7), q in perm(7), seed in any::<u64>()) {
        let g = Graph::random(7, 0.5, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let lhs = p.compose(&q).unwrap().apply_to_graph(&g).unwrap();
        let rhs = p.apply_to_graph(&q.apply_to_graph(&g).unwrap()).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        let naive = Naive::from(&g).permuted(p.compose(&q).unwrap().images());
        prop_assert_eq!(Naive::from(&lhs), naive);
    }

    #[test]
    fn adjacency_bits_follow_the_index_permutation(p in perm(6), seed in any::<u64>()) {
        let g = Graph::random(6, 0.5, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let bits = g.adjacency_bits();
        let moved = p.apply_to_graph(&g).unwrap().adjacency_bits();
        for u in 0..6 {
            for v in 0..6 {
                prop_assert_eq!(moved[p.apply(u) * 6 + p.apply(v)], bits[u * 6 + v]);
            }
        }
    }
}
