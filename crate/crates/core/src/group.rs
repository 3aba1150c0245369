//! Automorphism groups by pruned exhaustive search, pointwise stabilizer
//! chains, orbits and coset representatives.
//!
//! Groups are stored as explicit element lists, which is only sensible for
//! small `n`. The limit defaults to 10 and can be raised through the
//! `ISOCODE_MAX_N` environment variable.

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Structure;
use crate::num::{factorial, Natural};
use crate::perm::Permutation;

pub const DEFAULT_MAX_N: usize = 10;
pub const MAX_N_ENV: &str = "ISOCODE_MAX_N";

/// The brute-force vertex limit, read once from `ISOCODE_MAX_N`.
pub fn brute_force_limit() -> usize {
    static LIMIT: OnceLock<usize> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var(MAX_N_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_N)
    })
}

fn check_limit(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::Capability { what, n, limit })
    } else {
        Ok(())
    }
}

/// A permutation group given by all of its elements, sorted lexicographically
/// by image list (so the identity comes first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElements {
    n: usize,
    elements: Vec<Permutation>,
}

impl GroupElements {
    pub fn trivial(n: usize) -> Self {
        GroupElements { n, elements: vec![Permutation::identity(n)] }
    }

    /// Wraps an element list after checking it is a group on `0..n`.
    pub fn from_elements(n: usize, mut elements: Vec<Permutation>) -> Result<Self> {
        if elements.iter().any(|p| p.len() != n) {
            return Err(Error::range("group elements of mixed degree"));
        }
        elements.sort();
        elements.dedup();
        let set: HashSet<&Permutation> = elements.iter().collect();
        if !set.contains(&Permutation::identity(n)) {
            return Err(Error::range("element list lacks the identity"));
        }
        for a in &elements {
            if !set.contains(&a.inverse()) {
                return Err(Error::range("element list not closed under inverse"));
            }
            for b in &elements {
                if !set.contains(&a.compose(b)?) {
                    return Err(Error::range("element list not closed under composition"));
                }
            }
        }
        Ok(GroupElements { n, elements })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    /// Orbits of this group on `domain`.
    pub fn orbits(&self, domain: &[usize]) -> OrbitPartition {
        orbits(&self.elements, domain)
    }

    /// An irredundant generating set: no member lies in the group generated by the others
    /// that were kept before it.
    pub fn generators(&self) -> Vec<Permutation> {
        let mut gens: Vec<Permutation> = Vec::new();
        let mut closure: HashSet<Permutation> = HashSet::from([Permutation::identity(self.n)]);
        // walk from the deepest stabilizer level upward so generators come out short
        let chain = StabilizerChain::new(self.clone());
        for level in (0..self.n).rev() {
            if closure.len() == self.order() {
                break;
            }
            for candidate in chain.transversal(level).iter().flatten() {
                let g = &self.elements[*candidate];
                if !closure.contains(g) {
                    gens.push(g.clone());
                    closure = generate(self.n, &gens);
                }
            }
        }
        gens
    }
}

fn generate(n: usize, gens: &[Permutation]) -> HashSet<Permutation> {
    let mut seen = HashSet::from([Permutation::identity(n)]);
    let mut frontier = vec![Permutation::identity(n)];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = g.compose(&x).expect("same degree");
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    seen
}

/// Disjoint vertex sets, each sorted, ordered by their minimum element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitPartition {
    blocks: Vec<Vec<usize>>,
}

impl OrbitPartition {
    /// Normalizes the block order; panics on overlapping blocks.
    pub fn from_blocks(mut blocks: Vec<Vec<usize>>) -> Self {
        blocks.retain(|b| !b.is_empty());
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        let mut seen = HashSet::new();
        assert!(blocks.iter().flatten().all(|v| seen.insert(*v)), "blocks overlap");
        OrbitPartition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, v: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(&v).is_ok())
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn one_based(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.iter().map(|v| v + 1).collect()).collect()
    }
}

/// Orbits of the group formed by `elements` on `domain` (which must be a union of orbits).
pub fn orbits(elements: &[Permutation], domain: &[usize]) -> OrbitPartition {
    let mut assigned = HashSet::new();
    let mut blocks = Vec::new();
    let mut sorted = domain.to_vec();
    sorted.sort_unstable();
    for &v in &sorted {
        if assigned.contains(&v) {
            continue;
        }
        let mut orbit: Vec<usize> = elements.iter().map(|g| g.apply(v)).collect();
        orbit.sort_unstable();
        orbit.dedup();
        assigned.extend(orbit.iter().copied());
        blocks.push(orbit);
    }
    OrbitPartition::from_blocks(blocks)
}

/// Backtracking search for structure-preserving bijections `from -> to`.
///
/// Vertices of `from` are assigned in increasing order and candidate images
/// are tried in increasing order, so solutions come out in lexicographic order.
struct MappingSearch<'a, S: Structure, T: Structure> {
    from: &'a S,
    to: &'a T,
    image: Vec<usize>,
    used: Vec<bool>,
    from_deg: Vec<usize>,
    to_deg: Vec<usize>,
}

impl<'a, S: Structure, T: Structure> MappingSearch<'a, S, T> {
    fn new(from: &'a S, to: &'a T) -> Self {
        let n = from.n();
        MappingSearch {
            from,
            to,
            image: vec![usize::MAX; n],
            used: vec![false; n],
            from_deg: (0..n).map(|v| from.graph().degree(v)).collect(),
            to_deg: (0..to.n()).map(|v| to.graph().degree(v)).collect(),
        }
    }

    fn invariants_match(&self) -> bool {
        let key = |s: &dyn Fn(usize) -> (u32, usize), n: usize| {
            let mut k: Vec<_> = (0..n).map(s).collect();
            k.sort_unstable();
            k
        };
        self.from.n() == self.to.n()
            && self.from.graph().edge_count() == self.to.graph().edge_count()
            && key(&|v| (self.from.color(v), self.from_deg[v]), self.from.n())
                == key(&|v| (self.to.color(v), self.to_deg[v]), self.to.n())
    }

    fn consistent(&self, v: usize, w: usize) -> bool {
        if self.used[w] || self.from.color(v) != self.to.color(w) || self.from_deg[v] != self.to_deg[w] {
            return false;
        }
        let (gf, gt) = (self.from.graph(), self.to.graph());
        (0..v).all(|u| gf.has_edge(u, v) == gt.has_edge(self.image[u], w))
    }

    /// Calls `visit` on every solution until it returns `false`.
    fn run(&mut self, visit: &mut dyn FnMut(&[usize]) -> bool) {
        if self.invariants_match() {
            self.extend(0, visit);
        }
    }

    fn extend(&mut self, v: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let n = self.from.n();
        if v == n {
            return visit(&self.image);
        }
        for w in 0..n {
            if self.consistent(v, w) {
                self.image[v] = w;
                self.used[w] = true;
                let go_on = self.extend(v + 1, visit);
                self.used[w] = false;
                self.image[v] = usize::MAX;
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
}

/// All color-preserving automorphisms of `g`.
pub fn automorphism_group<S: Structure>(g: &S) -> Result<GroupElements> {
    automorphism_group_with_limit(g, brute_force_limit())
}

pub fn automorphism_group_with_limit<S: Structure>(g: &S, limit: usize) -> Result<GroupElements> {
    check_limit("automorphism search", g.n(), limit)?;
    let mut elements = Vec::new();
    MappingSearch::new(g, g).run(&mut |img| {
        elements.push(Permutation::from_images_unchecked(img.to_vec()));
        true
    });
    Ok(GroupElements { n: g.n(), elements })
}

/// `true` iff the identity is the only automorphism.
pub fn is_rigid<S: Structure>(g: &S) -> Result<bool> {
    check_limit("rigidity test", g.n(), brute_force_limit())?;
    let mut found_nontrivial = false;
    MappingSearch::new(g, g).run(&mut |img| {
        found_nontrivial = img.iter().enumerate().any(|(i, &v)| i != v);
        !found_nontrivial
    });
    Ok(!found_nontrivial)
}

/// Some `π` with `π(g) = h` (colors included), if one exists.
pub fn find_isomorphism<S: Structure, T: Structure>(g: &S, h: &T) -> Result<Option<Permutation>> {
    check_limit("isomorphism search", g.n(), brute_force_limit())?;
    let mut found = None;
    MappingSearch::new(g, h).run(&mut |img| {
        found = Some(Permutation::from_images_unchecked(img.to_vec()));
        false
    });
    Ok(found)
}

pub fn are_isomorphic<S: Structure, T: Structure>(g: &S, h: &T) -> Result<bool> {
    Ok(g.n() == h.n() && find_isomorphism(g, h)?.is_some())
}

/// One level of a pointwise stabilizer chain: `A_i` fixes vertices `0..i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLevel {
    /// `A_i` is the first `order` elements of the sorted group.
    pub order: usize,
    /// Orbits of `A_i` on all of `0..n`.
    pub orbits: OrbitPartition,
}

/// `Aut = A_0 ≥ A_1 ≥ .. ≥ A_n = 1`.
#[derive(Clone, Debug)]
pub struct StabilizerChain {
    group: GroupElements,
    levels: Vec<ChainLevel>,
    transversals: Vec<Vec<Option<usize>>>,
}

impl StabilizerChain {
    pub fn new(group: GroupElements) -> Self {
        let n = group.n;
        let all: Vec<usize> = (0..n).collect();
        let mut levels = Vec::with_capacity(n + 1);
        let mut transversals = Vec::with_capacity(n);
        for i in 0..=n {
            // lexicographic sorting puts the elements fixing 0..i at the front
            let order = group
                .elements
                .iter()
                .take_while(|g| (0..i).all(|v| g.apply(v) == v))
                .count();
            let members = &group.elements[..order];
            levels.push(ChainLevel { order, orbits: orbits(members, &all) });
            if i < n {
                let mut reps = vec![None; n];
                for (idx, g) in members.iter().enumerate() {
                    reps[g.apply(i)].get_or_insert(idx);
                }
                transversals.push(reps);
            }
        }
        StabilizerChain { group, levels, transversals }
    }

    pub fn degree(&self) -> usize {
        self.group.n
    }

    pub fn group(&self) -> &GroupElements {
        &self.group
    }

    pub fn levels(&self) -> &[ChainLevel] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &ChainLevel {
        &self.levels[i]
    }

    /// Elements of `A_i`.
    pub fn members(&self, i: usize) -> &[Permutation] {
        &self.group.elements[..self.levels[i].order]
    }

    /// For level `i < n`: index of some element of `A_i` sending `i` to `u`, for each `u`.
    pub fn transversal(&self, i: usize) -> &[Option<usize>] {
        &self.transversals[i]
    }

    /// An element of `A_i` mapping vertex `i` to `u`.
    pub fn transversal_element(&self, i: usize, u: usize) -> Option<&Permutation> {
        self.transversals[i][u].map(|idx| &self.group.elements[idx])
    }

    /// Orbits of `A_i` on `i..n` (the vertices it does not fix by definition).
    pub fn tail_orbits(&self, i: usize) -> OrbitPartition {
        let tail: Vec<usize> = (i..self.degree()).collect();
        orbits(self.members(i), &tail)
    }
}

/// The lexicographically least element of the left coset `p ∘ aut`.
pub fn canonical_coset_rep(aut: &GroupElements, p: &Permutation) -> Result<Permutation> {
    aut.elements
        .iter()
        .map(|a| p.compose(a))
        .try_fold(None::<Permutation>, |best, c| {
            let c = c?;
            Ok(Some(match best {
                Some(b) if b <= c => b,
                _ => c,
            }))
        })
        .map(|best| best.expect("groups are non-empty"))
}

/// `n! / |aut|`, the number of distinct copies of a graph with automorphism group `aut`.
pub fn index_in_symmetric<N: Natural>(aut: &GroupElements) -> Result<N> {
    let total: N = factorial(aut.n)?;
    Ok(total / N::from_count(aut.order()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{individualize, Graph};
    use crate::perm::all_permutations;

    fn brute_force_order(g: &Graph) -> usize {
        all_permutations(g.n())
            .filter(|p| &p.apply_to_graph(g).unwrap() == g)
            .count()
    }

    fn asym6() -> Graph {
        Graph::from_edges_one_based(6, &[(1, 2), (2, 3), (3, 4), (4, 5), (3, 6), (4, 6)]).unwrap()
    }

    #[test]
    fn named_group_orders() {
        assert_eq!(automorphism_group(&asym6()).unwrap().order(), 1);
        for n in 3..=9 {
            assert_eq!(automorphism_group(&Graph::cycle(n)).unwrap().order(), 2 * n);
        }
        assert_eq!(automorphism_group(&Graph::petersen()).unwrap().order(), 120);
        assert_eq!(automorphism_group(&Graph::dumbbell(6).unwrap()).unwrap().order(), 8);
        assert_eq!(automorphism_group(&Graph::dumbbell(10).unwrap()).unwrap().order(), 8);
        assert_eq!(automorphism_group(&Graph::complete(5)).unwrap().order(), 120);
    }

    #[test]
    fn capability_limit() {
        let err = automorphism_group_with_limit(&Graph::empty(5), 4).unwrap_err();
        assert!(matches!(err, Error::Capability { n: 5, limit: 4, .. }));
        assert!(err.to_string().contains("lower n"));
    }

    #[test]
    fn group_is_closed_and_exact() {
        let g = Graph::dumbbell(6).unwrap();
        let aut = automorphism_group(&g).unwrap();
        assert!(GroupElements::from_elements(6, aut.elements().to_vec()).is_ok());
        for p in all_permutations(6) {
            let fixes = p.apply_to_graph(&g).unwrap() == g;
            assert_eq!(fixes, aut.contains(&p));
        }
    }

    #[test]
    fn from_elements_rejects_non_groups() {
        let swap = Permutation::from_one_based(&[2, 1, 3]).unwrap();
        let cyc = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        assert!(GroupElements::from_elements(3, vec![swap.clone()]).is_err());
        assert!(GroupElements::from_elements(3, vec![Permutation::identity(3), swap, cyc]).is_err());
    }

    #[test]
    fn petersen_chain() {
        let aut = automorphism_group(&Graph::petersen()).unwrap();
        let chain = StabilizerChain::new(aut);
        assert_eq!(chain.level(1).order, 12);
        // {13,14,15,23,24,25} and {34,35,45}
        let tail = chain.tail_orbits(1);
        assert_eq!(tail.blocks(), &[vec![1, 2, 3, 4, 5, 6], vec![7, 8, 9]]);
        assert_eq!(chain.level(10).order, 1);
    }

    #[test]
    fn orbit_stabilizer_on_small_graphs() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let g = Graph::random(6, 0.4, &mut rng).unwrap();
            let aut = automorphism_group(&g).unwrap();
            assert_eq!(aut.order(), brute_force_order(&g));
            let chain = StabilizerChain::new(aut);
            for i in 1..=6 {
                let prev = chain.level(i - 1);
                let orbit_of_i = prev.orbits.blocks()[prev.orbits.block_of(i - 1).unwrap()].len();
                assert_eq!(prev.order / chain.level(i).order, orbit_of_i);
                assert_eq!(prev.order % chain.level(i).order, 0);
            }
        }
    }

    #[test]
    fn orbits_examples() {
        let trivial = GroupElements::trivial(4);
        assert_eq!(trivial.orbits(&[0, 1, 2, 3]).blocks(), &[vec![0], vec![1], vec![2], vec![3]]);
        let aut = automorphism_group(&Graph::cycle(7)).unwrap();
        assert_eq!(aut.orbits(&(0..7).collect::<Vec<_>>()).blocks(), &[(0..7).collect::<Vec<_>>()]);
    }

    #[test]
    fn rigidity() {
        assert!(is_rigid(&asym6()).unwrap());
        assert!(!is_rigid(&Graph::complete(4)).unwrap());
        assert!(!is_rigid(&Graph::petersen()).unwrap());
        let c4 = individualize(&Graph::cycle(4), 1, 1).unwrap();
        assert_eq!(automorphism_group(&c4).unwrap().order(), 1);
    }

    #[test]
    fn isomorphism_search() {
        let g = Graph::petersen();
        let p = Permutation::from_one_based(&[3, 5, 1, 2, 10, 9, 4, 6, 8, 7]).unwrap();
        let h = p.apply_to_graph(&g).unwrap();
        let found = find_isomorphism(&g, &h).unwrap().unwrap();
        assert_eq!(found.apply_to_graph(&g).unwrap(), h);
        let c6 = Graph::cycle(6);
        let two_triangles = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(!are_isomorphic(&c6, &two_triangles).unwrap());
    }

    #[test]
    fn coset_representatives() {
        let c4 = Graph::cycle(4);
        let aut = automorphism_group(&c4).unwrap();
        let rot = Permutation::from_one_based(&[2, 3, 4, 1]).unwrap();
        assert!(canonical_coset_rep(&aut, &rot).unwrap().is_identity());
        let trivial = GroupElements::trivial(4);
        assert_eq!(canonical_coset_rep(&trivial, &rot).unwrap(), rot);
        // the representatives split S_n into n!/|aut| classes
        for g in [Graph::cycle(5), Graph::path(5), Graph::complete(4), Graph::empty(3)] {
            let aut = automorphism_group(&g).unwrap();
            let reps: HashSet<_> = all_permutations(g.n())
                .map(|p| canonical_coset_rep(&aut, &p).unwrap())
                .collect();
            assert_eq!(reps.len(), index_in_symmetric::<usize>(&aut).unwrap());
            for r in &reps {
                assert_eq!(&canonical_coset_rep(&aut, r).unwrap(), r);
            }
        }
    }

    #[test]
    fn generators_generate() {
        for g in [Graph::petersen(), Graph::cycle(6), Graph::dumbbell(6).unwrap(), asym6()] {
            let aut = automorphism_group(&g).unwrap();
            let gens = aut.generators();
            assert_eq!(generate(g.n(), &gens).len(), aut.order());
            assert!(gens.len() <= g.n());
        }
    }
}
