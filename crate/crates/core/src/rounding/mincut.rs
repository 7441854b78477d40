//! Global minimum cuts, connectivity decomposition and small-cut enumeration.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::graph::BipartiteMultigraph;
use crate::error::{PmlError, Result};

/// One side of a cut and the number of edges crossing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutSet {
    pub side: Vec<usize>,
    pub crossing_edges: u64,
}

/// Stoer-Wagner on the subgraph induced by `vertices` (at least two).
/// Returns the cut weight and one side, in original vertex ids.
pub fn stoer_wagner(g: &BipartiteMultigraph, vertices: &[usize]) -> (u64, Vec<usize>) {
    let n = vertices.len();
    assert!(n >= 2, "min cut needs two vertices");
    let mut w = vec![0u64; n * n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                w[a * n + b] = g.between(vertices[a], vertices[b]);
            }
        }
    }
    // groups[a]: original vertices merged into super-vertex a.
    let mut groups: Vec<Vec<usize>> = vertices.iter().map(|&v| vec![v]).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best = (u64::MAX, Vec::new());
    while alive.len() > 1 {
        let m = alive.len();
        let mut added = vec![false; m];
        let mut key = vec![0u64; m];
        let mut prev = usize::MAX;
        let mut last = usize::MAX;
        for _ in 0..m {
            let mut pick = usize::MAX;
            for p in 0..m {
                if !added[p] && (pick == usize::MAX || key[p] > key[pick]) {
                    pick = p;
                }
            }
            added[pick] = true;
            prev = last;
            last = pick;
            for p in 0..m {
                if !added[p] {
                    key[p] += w[alive[pick] * n + alive[p]];
                }
            }
        }
        let cut = key[last];
        if cut < best.0 {
            best = (cut, groups[alive[last]].clone());
        }
        let (s, t) = (alive[prev], alive[last]);
        for &x in &alive {
            if x != s && x != t {
                w[s * n + x] += w[t * n + x];
                w[x * n + s] = w[s * n + x];
            }
        }
        let moved = core::mem::take(&mut groups[t]);
        groups[s].extend(moved);
        alive.retain(|&x| x != t);
    }
    let mut side = best.1;
    side.sort_unstable();
    (best.0, side)
}

/// Result of repeatedly deleting cuts lighter than the threshold.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Vertex sets; each non-singleton one induces a subgraph whose minimum
    /// cut is at least the threshold.
    pub components: Vec<Vec<usize>>,
    pub removed_edges: u64,
    /// The input graph with every deleted cut removed.
    pub graph: BipartiteMultigraph,
}

pub fn decompose_highly_connected(g: &BipartiteMultigraph, threshold: u64) -> Decomposition {
    let mut graph = g.clone();
    let mut removed = 0;
    let mut done = Vec::new();
    let mut stack: Vec<Vec<usize>> = g.components();
    while let Some(set) = stack.pop() {
        if set.len() < 2 {
            done.push(set);
            continue;
        }
        let mut keep = vec![false; graph.vertex_count()];
        for &v in &set {
            keep[v] = true;
        }
        let sub = graph.induced(&keep);
        let parts: Vec<Vec<usize>> =
            sub.components().into_iter().filter(|c| keep[c[0]]).collect();
        if parts.len() > 1 {
            stack.extend(parts);
            continue;
        }
        let (weight, side) = stoer_wagner(&sub, &set);
        if weight >= threshold {
            done.push(set);
            continue;
        }
        let mut in_side = vec![false; graph.vertex_count()];
        for &v in &side {
            in_side[v] = true;
        }
        for &u in &side {
            for &w in &set {
                if !in_side[w] {
                    let m = graph.between(u, w);
                    if m > 0 {
                        removed += m;
                        graph.set_between(u, w, 0);
                    }
                }
            }
        }
        let rest: Vec<usize> = set.iter().copied().filter(|&v| !in_side[v]).collect();
        stack.push(side);
        stack.push(rest);
    }
    done.sort();
    Decomposition { components: done, removed_edges: removed, graph }
}

pub const ENUMERATION_MAX_VERTICES: usize = 20;

/// Every cut (listed once, by the side not containing vertex 0) crossed by
/// at most `bound` edges. Exhaustive over vertex subsets.
pub fn enumerate_small_cuts(g: &BipartiteMultigraph, bound: u64) -> Result<Vec<CutSet>> {
    let n = g.vertex_count();
    if n > ENUMERATION_MAX_VERTICES {
        return Err(PmlError::TooLarge(format!("enumeration scale exceeded ({n} vertices)")));
    }
    if n < 2 {
        return Ok(Vec::new());
    }
    let pairs = g.pairs();
    let mut out = Vec::new();
    // Fix vertex 0 outside the side so each cut is listed once.
    for mask in 1u32..(1u32 << (n - 1)) {
        let in_side = |v: usize| v > 0 && (mask >> (v - 1)) & 1 == 1;
        let crossing: u64 = pairs.iter().filter(|(u, w, _)| in_side(*u) != in_side(*w)).map(|p| p.2).sum();
        if crossing <= bound {
            let side = (1..n).filter(|&v| in_side(v)).collect();
            out.push(CutSet { side, crossing_edges: crossing });
        }
    }
    Ok(out)
}
