//! The decoder. It only unranks subsets and reads stored partitions; no
//! group computation or isomorphism search happens here.

use crate::codec::aux::AuxData;
use crate::codec::CosetCode;
use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Graph};
use crate::num::Natural;
use crate::ranks::{radix_unpack, subset_unrank};

/// Rebuilds the copy `π(G)` named by `code`.
pub fn decode<N: Natural>(aux: &AuxData, code: &CosetCode<N>) -> Result<ColoredGraph> {
    let range: N = aux.code_range()?;
    if code.range != range {
        return Err(Error::range(format!("code range {} does not match this graph ({range})", code.range)));
    }
    decode_value(aux, &code.value)
}

/// As [`decode`], taking the bare 0-based value.
pub fn decode_value<N: Natural>(aux: &AuxData, value: &N) -> Result<ColoredGraph> {
    let n = aux.n();
    let steps = aux.steps();
    let radices: Vec<N> = aux.radices()?;
    let digits = radix_unpack(value, &radices)?;
    let mut digits = digits.iter();
    let mut graph = Graph::empty(n);
    let mut colors = vec![0u32; n];
    if n == 0 {
        return ColoredGraph::new(graph, colors);
    }

    let mut steps = steps.iter().peekable();
    // images of the current level's blocks
    let mut images: Vec<Vec<usize>> = Vec::new();
    let mut remaining: Vec<usize> = (0..n).collect();
    while let Some(step) = steps.next_if(|s| s.stage == 0) {
        let chosen = pick(&mut remaining, step.take, digits.next().expect("one digit per step"))?;
        for &u in &chosen {
            colors[u] = aux.orbit_colors()[step.block];
        }
        images.push(chosen);
    }

    for stage in 1..=n {
        let fixed = stage - 1;
        let prev = &aux.levels()[stage - 1].partition;
        let home = prev.block_of(fixed).expect("fixed vertex lies in its level");
        // the fixed vertex goes to the smallest vertex of its orbit's image
        let target = images[home][0];
        let mut available = images;
        available[home].remove(0);

        let mut next_images = Vec::new();
        while let Some(step) = steps.next_if(|s| s.stage == stage) {
            let chosen = pick(&mut available[step.parent], step.take, digits.next().expect("one digit per step"))?;
            if aux.levels()[stage].neighbor_flags[step.block] {
                for &u in &chosen {
                    graph.add_edge(target, u)?;
                }
            }
            next_images.push(chosen);
        }
        images = next_images;
    }
    ColoredGraph::new(graph, colors)
}

/// Removes and returns the subset of `pool` with the given colex rank.
fn pick<N: Natural>(pool: &mut Vec<usize>, take: usize, rank: &N) -> Result<Vec<usize>> {
    let positions = subset_unrank(pool.len(), take, rank)?;
    let chosen: Vec<usize> = positions.iter().map(|&k| pool[k]).collect();
    for &k in positions.iter().rev() {
        pool.remove(k);
    }
    Ok(chosen)
}
