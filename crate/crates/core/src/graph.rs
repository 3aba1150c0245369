//! Simple undirected graphs, optionally vertex-colored.
//!
//! Text format (1-based vertices are implicit in row order):
//!
//! ```text
//! 3
//! 011
//! 101
//! 110
//! colors: 1 0 0
//! ```
//!
//! The `colors:` line is optional and only accepted for [`ColoredGraph`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<bool>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph { n, adj: vec![false; n * n] }
    }

    /// Builds a graph from 0-based edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Builds a graph from 1-based edges.
    pub fn from_edges_one_based(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let zero: Vec<_> = edges
            .iter()
            .map(|&(u, v)| match (u.checked_sub(1), v.checked_sub(1)) {
                (Some(a), Some(b)) => Ok((a, b)),
                _ => Err(Error::range("vertex 0 in 1-based edge list")),
            })
            .collect::<Result<_>>()?;
        Self::from_edges(n, &zero)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::range(format!("edge ({u}, {v}) outside 0..{}", self.n)));
        }
        if u == v {
            return Err(Error::range(format!("self-loop at vertex {u}")));
        }
        self.adj[u * self.n + v] = true;
        self.adj[v * self.n + u] = true;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().filter(|&&b| b).count()
    }

    pub fn row(&self, v: usize) -> &[bool] {
        &self.adj[v * self.n..(v + 1) * self.n]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&b| b).count() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| ((u + 1)..self.n).filter(move |&v| self.has_edge(u, v)).map(move |v| (u, v)))
    }

    /// Row-major `n × n` adjacency matrix bits.
    pub fn adjacency_bits(&self) -> Vec<bool> {
        self.adj.clone()
    }

    pub(crate) fn permuted(&self, p: &Permutation) -> Result<Graph> {
        if p.len() != self.n {
            return Err(Error::Dimension { expected: self.n, found: p.len() });
        }
        let n = self.n;
        let mut adj = vec![false; n * n];
        for u in 0..n {
            for v in 0..n {
                if self.has_edge(u, v) {
                    adj[p.apply(u) * n + p.apply(v)] = true;
                }
            }
        }
        Ok(Graph { n, adj })
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in 0..n {
                g.adj[u * n + v] = u != v;
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &edges).expect("path edges are in range")
    }

    /// The cycle `1 - 2 - .. - n - 1`.
    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.add_edge(n - 1, 0).expect("cycle closing edge");
        }
        g
    }

    /// Two `n/2`-cycles joined by the edge between their first vertices.
    pub fn dumbbell(n: usize) -> Result<Self> {
        if n < 6 || !n.is_multiple_of(2) {
            return Err(Error::range(format!("dumbbell needs even n >= 6, got {n}")));
        }
        let h = n / 2;
        let mut g = Graph::empty(n);
        for base in [0, h] {
            for i in 0..h {
                g.add_edge(base + i, base + (i + 1) % h)?;
            }
        }
        g.add_edge(0, h)?;
        Ok(g)
    }

    /// Vertices are the 2-subsets of `{1..5}` in lexicographic order
    /// (`12, 13, 14, 15, 23, 24, 25, 34, 35, 45`); disjoint pairs are adjacent.
    pub fn petersen() -> Self {
        let pairs = petersen_labels();
        let mut g = Graph::empty(10);
        for (u, a) in pairs.iter().enumerate() {
            for (v, b) in pairs.iter().enumerate() {
                if u != v && a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1 {
                    g.adj[u * 10 + v] = true;
                }
            }
        }
        g
    }

    /// Each unordered pair becomes an edge independently with probability `edge_prob`.
    pub fn random<R: Rng + ?Sized>(n: usize, edge_prob: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&edge_prob) {
            return Err(Error::range(format!("edge probability {edge_prob} outside [0, 1]")));
        }
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(edge_prob) {
                    g.add_edge(u, v)?;
                }
            }
        }
        Ok(g)
    }

    fn parse_rows(lines: &[(usize, &str)]) -> Result<(Graph, usize)> {
        let (first_line, header) = *lines.first().ok_or_else(|| Error::parse(1, "missing vertex count"))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::parse(first_line, format!("bad vertex count {header:?}")))?;
        if lines.len() < n + 1 {
            return Err(Error::parse(first_line, format!("expected {n} matrix rows, found {}", lines.len() - 1)));
        }
        let mut adj = vec![false; n * n];
        for (u, &(lineno, row)) in lines[1..=n].iter().enumerate() {
            if row.len() != n {
                return Err(Error::parse(lineno, format!("row has {} entries, expected {n}", row.len())));
            }
            for (v, ch) in row.chars().enumerate() {
                adj[u * n + v] = match ch {
                    '0' => false,
                    '1' => true,
                    other => return Err(Error::parse(lineno, format!("unexpected character {other:?}"))),
                };
            }
        }
        for u in 0..n {
            let lineno = lines[u + 1].0;
            if adj[u * n + u] {
                return Err(Error::parse(lineno, format!("self-loop at vertex {}", u + 1)));
            }
            for v in (u + 1)..n {
                if adj[u * n + v] != adj[v * n + u] {
                    return Err(Error::parse(lineno, format!("matrix not symmetric at ({}, {})", u + 1, v + 1)));
                }
            }
        }
        Ok((Graph { n, adj }, n + 1))
    }
}

/// Labels of the Petersen vertices as pairs from `{1..5}`.
pub fn petersen_labels() -> Vec<(u8, u8)> {
    let mut out = Vec::new();
    for a in 1..=5u8 {
        for b in (a + 1)..=5 {
            out.push((a, b));
        }
    }
    out
}

fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lines = content_lines(s);
        let (g, used) = Graph::parse_rows(&lines)?;
        if let Some(&(lineno, extra)) = lines.get(used) {
            return Err(Error::parse(lineno, format!("unexpected trailing line {extra:?}")));
        }
        Ok(g)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for u in 0..self.n {
            let row: String = self.row(u).iter().map(|&b| if b { '1' } else { '0' }).collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<_> = self.edges().map(|(u, v)| (u + 1, v + 1)).collect();
        write!(f, "Graph(n={}, edges={edges:?})", self.n)
    }
}

/// A graph with a color on every vertex; color 0 means uncolored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ColoredGraph {
    graph: Graph,
    colors: Vec<u32>,
}

impl ColoredGraph {
    pub fn new(graph: Graph, colors: Vec<u32>) -> Result<Self> {
        if colors.len() != graph.n() {
            return Err(Error::Dimension { expected: graph.n(), found: colors.len() });
        }
        Ok(ColoredGraph { graph, colors })
    }

    pub fn uncolored(graph: Graph) -> Self {
        let n = graph.n();
        ColoredGraph { graph, colors: vec![0; n] }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    #[inline]
    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn is_colored(&self) -> bool {
        self.colors.iter().any(|&c| c != 0)
    }

    /// Bits needed to write the largest color (0 when uncolored).
    pub fn color_width(&self) -> u32 {
        let max = self.colors.iter().copied().max().unwrap_or(0);
        u32::BITS - max.leading_zeros()
    }

    pub(crate) fn permuted(&self, p: &Permutation) -> Result<ColoredGraph> {
        let graph = self.graph.permuted(p)?;
        let mut colors = vec![0; self.n()];
        for (v, &c) in self.colors.iter().enumerate() {
            colors[p.apply(v)] = c;
        }
        Ok(ColoredGraph { graph, colors })
    }
}

impl From<Graph> for ColoredGraph {
    fn from(g: Graph) -> Self {
        ColoredGraph::uncolored(g)
    }
}

impl FromStr for ColoredGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lines = content_lines(s);
        let (graph, used) = Graph::parse_rows(&lines)?;
        let n = graph.n();
        let colors = match lines.get(used) {
            None => vec![0; n],
            Some(&(lineno, line)) => {
                let rest = line
                    .strip_prefix("colors:")
                    .ok_or_else(|| Error::parse(lineno, format!("unexpected trailing line {line:?}")))?;
                let colors = rest
                    .split_whitespace()
                    .map(|tok| tok.parse::<u32>().map_err(|_| Error::parse(lineno, format!("bad color {tok:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                if colors.len() != n {
                    return Err(Error::parse(lineno, format!("{} colors for {n} vertices", colors.len())));
                }
                if let Some(&(extra, _)) = lines.get(used + 1) {
                    return Err(Error::parse(extra, "unexpected line after colors"));
                }
                colors
            }
        };
        Ok(ColoredGraph { graph, colors })
    }
}

impl fmt::Display for ColoredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.graph)?;
        if self.is_colored() {
            let cs: Vec<String> = self.colors.iter().map(u32::to_string).collect();
            writeln!(f, "colors: {}", cs.join(" "))?;
        }
        Ok(())
    }
}

/// Read access shared by [`Graph`] and [`ColoredGraph`]; plain graphs have
/// every vertex colored 0.
pub trait Structure {
    fn graph(&self) -> &Graph;
    fn color(&self, v: usize) -> u32;

    fn n(&self) -> usize {
        self.graph().n()
    }

    fn to_colored(&self) -> ColoredGraph {
        let colors = (0..self.n()).map(|v| self.color(v)).collect();
        ColoredGraph { graph: self.graph().clone(), colors }
    }
}

impl Structure for Graph {
    fn graph(&self) -> &Graph {
        self
    }
    fn color(&self, _v: usize) -> u32 {
        0
    }
}

impl Structure for ColoredGraph {
    fn graph(&self) -> &Graph {
        &self.graph
    }
    fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }
}

/// Colors vertices `0..prefix` with `1..=prefix` and `distinguished` with
/// `prefix + 1`; every other vertex is uncolored.
pub fn individualize(g: &Graph, prefix: usize, distinguished: usize) -> Result<ColoredGraph> {
    let n = g.n();
    if distinguished >= n || distinguished < prefix {
        return Err(Error::range(format!(
            "distinguished vertex {} must lie in {}..={n}",
            distinguished + 1,
            prefix + 1
        )));
    }
    let mut colors = vec![0u32; n];
    for (v, c) in colors.iter_mut().enumerate().take(prefix) {
        *c = v as u32 + 1;
    }
    colors[distinguished] = prefix as u32 + 1;
    ColoredGraph::new(g.clone(), colors)
}
