//! Large subgraphs with every degree divisible by k.

use alloc::vec;
use alloc::vec::Vec;

use super::graph::BipartiteMultigraph;
use super::mincut::decompose_highly_connected;
use super::orientation::{exhaustive, subgraph_with_residues, TargetPolicy};
use super::trees::pack_spanning_trees;
use crate::error::{invalid, PmlError, Result};

/// Components with at most this many candidate subgraphs are solved exactly.
pub const EXACT_SEARCH_LIMIT: u64 = 1 << 16;

/// How each component was handled, plus what was dropped along the way.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModKStats {
    pub already_divisible: usize,
    pub exact: usize,
    pub pipeline: usize,
    /// Components where the tree step failed and a direct search was used.
    pub fallback: usize,
    /// Components where a direct search over the whole component kept more
    /// edges than the decomposition route.
    pub direct: usize,
    pub cut_edges: u64,
}

#[derive(Debug, Clone)]
pub struct ModKSubgraph {
    pub subgraph: BipartiteMultigraph,
    pub stats: ModKStats,
}

impl ModKStats {
    fn merge(&mut self, other: &ModKStats) {
        self.already_divisible += other.already_divisible;
        self.exact += other.exact;
        self.pipeline += other.pipeline;
        self.fallback += other.fallback;
        self.direct += other.direct;
        self.cut_edges += other.cut_edges;
    }
}

impl ModKSubgraph {
    pub fn dropped_edges(&self, g: &BipartiteMultigraph) -> u64 {
        g.edge_count() - self.subgraph.edge_count()
    }
}

pub fn all_degrees_divisible(g: &BipartiteMultigraph, k: u64) -> bool {
    g.degrees().iter().all(|d| d % k == 0)
}

/// `F` inside `g` with `deg_F(v) = 0 (mod k)` everywhere.
///
/// Small components are maximized exactly. The rest are split at cuts
/// lighter than `6k`; on each highly connected piece, `3k` edge-disjoint
/// spanning trees `H` are set aside, the remainder is kept whole, and a
/// subgraph of `H` repairs the residues the remainder leaves behind. A flow
/// search on the whole component is also tried; the larger answer wins.
pub fn mod_k_zero_subgraph(g: &BipartiteMultigraph, k: u64, seed: u64) -> Result<ModKSubgraph> {
    solve(g, k, seed, true)
}

/// Same as [`mod_k_zero_subgraph`] without the whole-component flow search.
pub fn mod_k_zero_subgraph_decomposed(g: &BipartiteMultigraph, k: u64, seed: u64) -> Result<ModKSubgraph> {
    solve(g, k, seed, false)
}

fn solve(g: &BipartiteMultigraph, k: u64, seed: u64, try_direct: bool) -> Result<ModKSubgraph> {
    if k == 0 {
        return invalid("k must be positive");
    }
    let mut stats = ModKStats::default();
    let mut out = BipartiteMultigraph::new(g.left(), g.right());
    if k == 1 {
        stats.already_divisible = 1;
        return Ok(ModKSubgraph { subgraph: g.clone(), stats });
    }
    for (c, comp) in g.components().into_iter().enumerate() {
        if comp.len() < 2 {
            continue;
        }
        let sub = restrict(g, &comp);
        if let Some(f) = easy(&sub, k, &mut stats) {
            out = out.plus(&f);
            continue;
        }
        let comp_seed = seed ^ ((c as u64) << 32);
        let mut route_stats = ModKStats::default();
        let routed = decomposition_route(&sub, k, comp_seed, &mut route_stats)?;
        let direct = if try_direct {
            let zero = vec![0; g.vertex_count()];
            match subgraph_with_residues(&sub, &zero, k, TargetPolicy::Max, comp_seed) {
                Ok(f) => Some(f),
                Err(PmlError::OrientationExhausted) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        match direct {
            Some(f) if f.edge_count() > routed.edge_count() => {
                stats.direct += 1;
                out = out.plus(&f);
            }
            _ => {
                stats.merge(&route_stats);
                out = out.plus(&routed);
            }
        }
    }
    Ok(ModKSubgraph { subgraph: out, stats })
}

fn decomposition_route(sub: &BipartiteMultigraph, k: u64, seed: u64, stats: &mut ModKStats) -> Result<BipartiteMultigraph> {
    let mut routed = BipartiteMultigraph::new(sub.left(), sub.right());
    let dec = decompose_highly_connected(sub, 6 * k);
    stats.cut_edges += dec.removed_edges;
    for (p, piece) in dec.components.iter().enumerate() {
        if piece.len() < 2 {
            continue;
        }
        let part = restrict(&dec.graph, piece);
        if let Some(f) = easy(&part, k, stats) {
            routed = routed.plus(&f);
            continue;
        }
        let piece_seed = seed ^ (p as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        routed = routed.plus(&highly_connected(&part, piece, k, piece_seed, stats)?);
    }
    Ok(routed)
}

fn restrict(g: &BipartiteMultigraph, vertices: &[usize]) -> BipartiteMultigraph {
    let mut keep = vec![false; g.vertex_count()];
    for &v in vertices {
        keep[v] = true;
    }
    g.induced(&keep)
}

fn easy(g: &BipartiteMultigraph, k: u64, stats: &mut ModKStats) -> Option<BipartiteMultigraph> {
    if all_degrees_divisible(g, k) {
        stats.already_divisible += 1;
        return Some(g.clone());
    }
    let mut space: u64 = 1;
    for (_, _, m) in g.pairs() {
        space = space.saturating_mul(m + 1);
        if space > EXACT_SEARCH_LIMIT {
            return None;
        }
    }
    stats.exact += 1;
    let zero = vec![0; g.vertex_count()];
    // The empty subgraph always qualifies, so this cannot come back empty.
    exhaustive(g, &zero, k, true)
}

fn highly_connected(
    g: &BipartiteMultigraph,
    vertices: &[usize],
    k: u64,
    seed: u64,
    stats: &mut ModKStats,
) -> Result<BipartiteMultigraph> {
    let attempt = pack_spanning_trees(g, vertices, 3 * k as usize).and_then(|h| {
        let rest = g.minus(&h);
        let residue: Vec<u64> = rest.degrees().iter().map(|d| (k - d % k) % k).collect();
        let fh = subgraph_with_residues(&h, &residue, k, TargetPolicy::Max, seed)?;
        Ok(rest.plus(&fh))
    });
    match attempt {
        Ok(f) => {
            stats.pipeline += 1;
            Ok(f)
        }
        Err(PmlError::Packing { .. }) | Err(PmlError::OrientationExhausted) => {
            stats.fallback += 1;
            let zero = vec![0; g.vertex_count()];
            match subgraph_with_residues(g, &zero, k, TargetPolicy::Max, seed) {
                Ok(f) => Ok(f),
                Err(PmlError::OrientationExhausted) => Ok(BipartiteMultigraph::new(g.left(), g.right())),
                Err(e) => Err(e),
            }
        }
        Err(e) => Err(e),
    }
}
