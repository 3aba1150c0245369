//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here calls into the library's group, ranking or codec code, so the
//! tests compare two independent computations.

#![allow(dead_code)]

use std::collections::HashSet;

use isocode::graph::{ColoredGraph, Graph};

/// Plain adjacency matrix plus vertex colors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Naive {
    pub adj: Vec<Vec<bool>>,
    pub colors: Vec<u32>,
}

impl Naive {
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Copy with `p(u) ~ p(v)` whenever `u ~ v`, and color of `p(v)` that of `v`.
    pub fn permuted(&self, p: &[usize]) -> Naive {
        let n = self.n();
        let mut adj = vec![vec![false; n]; n];
        let mut colors = vec![0; n];
        for u in 0..n {
            colors[p[u]] = self.colors[u];
            for v in 0..n {
                adj[p[u]][p[v]] = self.adj[u][v];
            }
        }
        Naive { adj, colors }
    }

    pub fn is_automorphism(&self, p: &[usize]) -> bool {
        let n = self.n();
        (0..n).all(|u| self.colors[p[u]] == self.colors[u] && (0..n).all(|v| self.adj[p[u]][p[v]] == self.adj[u][v]))
    }

    /// Colors vertex `v` with `k + 1` for `v < prefix`, leaving the rest 0.
    pub fn individualized(&self, prefix: usize) -> Naive {
        let mut out = self.clone();
        for v in 0..prefix {
            out.colors[v] = v as u32 + 1;
        }
        out
    }
}

impl From<&Graph> for Naive {
    fn from(g: &Graph) -> Self {
        let n = g.n();
        Naive { adj: (0..n).map(|u| (0..n).map(|v| g.has_edge(u, v)).collect()).collect(), colors: vec![0; n] }
    }
}

impl From<&ColoredGraph> for Naive {
    fn from(g: &ColoredGraph) -> Self {
        let mut out = Naive::from(g.graph());
        out.colors = g.colors().to_vec();
        out
    }
}

/// Every permutation of `0..n`, by Heap's algorithm.
pub fn heap_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = vec![a.clone()];
    let mut c = vec![0; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Calls `f` on every permutation of `0..n` without storing them.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    f(&a);
    let mut c = vec![0; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Permutations of `0..n` in lexicographic order.
pub fn lex_permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// All automorphisms, by trying every permutation.
pub fn automorphisms(g: &Naive) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_permutation(g.n(), |p| {
        if g.is_automorphism(p) {
            out.push(p.to_vec());
        }
    });
    out
}

pub fn aut_count(g: &Naive) -> usize {
    let mut count = 0;
    for_each_permutation(g.n(), |p| count += usize::from(g.is_automorphism(p)));
    count
}

pub fn is_rigid(g: &Naive) -> bool {
    aut_count(g) == 1
}

/// Isomorphism by comparing against every copy of `h`.
pub fn isomorphic(g: &Naive, h: &Naive) -> bool {
    if g.n() != h.n() {
        return false;
    }
    let mut found = false;
    for_each_permutation(h.n(), |p| {
        if !found && &h.permuted(p) == g {
            found = true;
        }
    });
    found
}

/// Counts automorphisms by extending partial maps vertex by vertex and
/// pruning on adjacency to the vertices already mapped.
pub fn aut_count_backtrack(g: &Naive) -> usize {
    fn extend(g: &Naive, map: &mut Vec<usize>, used: &mut [bool]) -> usize {
        let u = map.len();
        if u == g.n() {
            return 1;
        }
        let mut total = 0;
        for v in 0..g.n() {
            if used[v] || g.colors[v] != g.colors[u] {
                continue;
            }
            if (0..u).all(|w| g.adj[u][w] == g.adj[v][map[w]]) {
                used[v] = true;
                map.push(v);
                total += extend(g, map, used);
                map.pop();
                used[v] = false;
            }
        }
        total
    }
    extend(g, &mut Vec::new(), &mut vec![false; g.n()])
}

/// Number of distinct copies of `g`.
pub fn distinct_copies(g: &Naive) -> usize {
    let mut seen = HashSet::new();
    for_each_permutation(g.n(), |p| {
        seen.insert(g.permuted(p));
    });
    seen.len()
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k as u128).fold(1, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// All `k`-subsets of `0..n` in colexicographic order.
pub fn colex_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect();
    all.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    all
}

/// Row-major adjacency bits followed by `cw`-bit colors, most significant first.
pub fn segment(g: &Naive, cw: u32) -> Vec<bool> {
    let mut out: Vec<bool> = g.adj.iter().flatten().copied().collect();
    for &c in &g.colors {
        out.extend((0..cw).rev().map(|k| c >> k & 1 == 1));
    }
    out
}

/// `x` padded to the next power of two with the complement of its last bit.
pub fn pad(x: &[bool]) -> Vec<bool> {
    let target = x.len().next_power_of_two();
    let fill = !x.last().copied().unwrap_or(true);
    let mut out = x.to_vec();
    out.resize(target, fill);
    out
}

pub fn fixture(name: &str) -> Graph {
    let path = format!("{}/fixtures/{name}.txt", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).expect("fixture exists").parse().expect("fixture parses")
}

pub fn fixture_path(name: &str) -> String {
    format!("{}/fixtures/{name}.txt", env!("CARGO_MANIFEST_DIR"))
}

pub const FIXTURES: [&str; 9] = ["petersen", "c8", "dumbbell10", "k4", "asym6", "rigid7a", "rigid7b", "rigid8a", "rigid8b"];
