//! Subgraphs with prescribed degree residues, and orientations modulo k.
//!
//! Both reduce to the same search: pick `F` inside a bipartite multigraph
//! with `deg_F(v) = target(v) (mod q)`. Small graphs are searched
//! exhaustively. Larger ones fix concrete degree targets in the right
//! residue classes, test them with a max-flow, and on failure shift targets
//! by `q` on both sides of the violated min cut, driven by a seeded RNG.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::flow::FlowNetwork;
use super::graph::BipartiteMultigraph;
use crate::error::{invalid, PmlError, Result};

/// Graphs with at most this many edges are searched exhaustively.
pub const EXHAUSTIVE_EDGE_LIMIT: u64 = 24;

/// Which degree targets the flow search starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetPolicy {
    /// As many edges as possible.
    Max,
    /// About half of each vertex's edges (orientations).
    Half,
}

/// `F` with `deg_F(v) = residue[v] (mod q)` for every vertex.
pub fn subgraph_with_residues(
    g: &BipartiteMultigraph,
    residue: &[u64],
    q: u64,
    policy: TargetPolicy,
    seed: u64,
) -> Result<BipartiteMultigraph> {
    if q == 0 || residue.len() != g.vertex_count() {
        return invalid("residue vector does not match the graph");
    }
    if q == 1 {
        return Ok(match policy {
            TargetPolicy::Max => g.clone(),
            TargetPolicy::Half => {
                let half = g.table().iter().map(|m| m / 2).collect();
                BipartiteMultigraph::from_table(g.left(), g.right(), half)
            }
        });
    }
    let left = g.left();
    let sum_l: u64 = residue[..left].iter().sum();
    let sum_r: u64 = residue[left..].iter().sum();
    if sum_l % q != sum_r % q {
        return Err(PmlError::OrientationExhausted);
    }
    let deg = g.degrees();
    if residue.iter().zip(&deg).any(|(&r, &d)| r % q > d) {
        return Err(PmlError::OrientationExhausted);
    }
    if g.edge_count() <= EXHAUSTIVE_EDGE_LIMIT {
        return exhaustive(g, residue, q, policy == TargetPolicy::Max).ok_or(PmlError::OrientationExhausted);
    }
    flow_search(g, residue, q, policy, seed)
}

/// Largest `F` (or any, when `maximize` is false) meeting the residues.
pub fn exhaustive(g: &BipartiteMultigraph, residue: &[u64], q: u64, maximize: bool) -> Option<BipartiteMultigraph> {
    let pairs = g.pairs();
    let n = g.vertex_count();
    let mut remaining = g.degrees();
    let mut search = Search {
        pairs: &pairs,
        residue,
        q,
        maximize,
        deg: vec![0; n],
        choice: vec![0; pairs.len()],
        best: None,
        best_size: 0,
    };
    search.go(0, 0, &mut remaining, pairs.iter().map(|p| p.2).sum());
    let choice = search.best?;
    let mut f = BipartiteMultigraph::new(g.left(), g.right());
    for (p, &(u, w, _)) in pairs.iter().enumerate() {
        f.set_between(u, w, choice[p]);
    }
    Some(f)
}

struct Search<'a> {
    pairs: &'a [(usize, usize, u64)],
    residue: &'a [u64],
    q: u64,
    maximize: bool,
    deg: Vec<u64>,
    choice: Vec<u64>,
    best: Option<Vec<u64>>,
    best_size: u64,
}

impl Search<'_> {
    fn reachable(&self, v: usize, remaining: u64) -> bool {
        // Some value in [deg, deg + remaining] has the right residue.
        let d = self.deg[v];
        let need = (self.residue[v] % self.q + self.q - d % self.q) % self.q;
        need <= remaining
    }

    /// Returns true to stop the search.
    fn go(&mut self, p: usize, size: u64, remaining: &mut [u64], left_edges: u64) -> bool {
        if self.best.is_some() && (!self.maximize || size + left_edges <= self.best_size) {
            return !self.maximize;
        }
        if p == self.pairs.len() {
            self.best = Some(self.choice.clone());
            self.best_size = size;
            return !self.maximize;
        }
        let (u, w, m) = self.pairs[p];
        remaining[u] -= m;
        remaining[w] -= m;
        for c in (0..=m).rev() {
            self.deg[u] += c;
            self.deg[w] += c;
            if self.reachable(u, remaining[u]) && self.reachable(w, remaining[w]) {
                self.choice[p] = c;
                if self.go(p + 1, size + c, remaining, left_edges - m) {
                    self.deg[u] -= c;
                    self.deg[w] -= c;
                    remaining[u] += m;
                    remaining[w] += m;
                    return true;
                }
            }
            self.deg[u] -= c;
            self.deg[w] -= c;
        }
        remaining[u] += m;
        remaining[w] += m;
        false
    }
}

fn flow_search(
    g: &BipartiteMultigraph,
    residue: &[u64],
    q: u64,
    policy: TargetPolicy,
    seed: u64,
) -> Result<BipartiteMultigraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (left, n) = (g.left(), g.vertex_count());
    let deg = g.degrees();
    let res: Vec<u64> = residue.iter().map(|r| r % q).collect();
    let top: Vec<u64> = (0..n).map(|v| res[v] + q * ((deg[v] - res[v]) / q)).collect();
    let mut d: Vec<u64> = (0..n)
        .map(|v| match policy {
            TargetPolicy::Max => top[v],
            TargetPolicy::Half => {
                let goal = deg[v] / 2;
                let steps = (goal.saturating_sub(res[v]) + q / 2) / q;
                (res[v] + q * steps).min(top[v])
            }
        })
        .collect();
    balance(&mut d, &deg, &top, left, q, policy);
    let limit = 40 * n + 200;
    for _ in 0..limit {
        let need_l: u64 = d[..left].iter().sum();
        let need_r: u64 = d[left..].iter().sum();
        if need_l != need_r {
            return Err(PmlError::Internal("unbalanced degree targets".into()));
        }
        let (src, sink) = (n, n + 1);
        let mut net = FlowNetwork::new(n + 2);
        for v in 0..left {
            net.add_arc(src, v, d[v]);
        }
        for v in left..n {
            net.add_arc(v, sink, d[v]);
        }
        let mut arcs = Vec::new();
        for (u, w, m) in g.pairs() {
            arcs.push((u, w, net.add_arc(u, w, m)));
        }
        if net.max_flow(src, sink) == need_l {
            let mut f = BipartiteMultigraph::new(g.left(), g.right());
            for (u, w, id) in arcs {
                f.set_between(u, w, net.flow(id));
            }
            return Ok(f);
        }
        let side = net.source_side(src);
        let x: Vec<usize> = (0..left).filter(|&v| side[v] && d[v] >= q).collect();
        let not_y: Vec<usize> = (left..n).filter(|&v| !side[v] && d[v] >= q).collect();
        let y: Vec<usize> = (left..n).filter(|&v| side[v] && d[v] + q <= top[v]).collect();
        let not_x: Vec<usize> = (0..left).filter(|&v| !side[v] && d[v] + q <= top[v]).collect();
        let can_lower = !x.is_empty() && !not_y.is_empty();
        let can_raise = !y.is_empty() && !not_x.is_empty();
        let raise = match (can_lower, can_raise) {
            (false, false) => return Err(PmlError::OrientationExhausted),
            (true, false) => false,
            (false, true) => true,
            (true, true) => {
                let p = if policy == TargetPolicy::Max { 0.7 } else { 0.5 };
                rng.gen_bool(p)
            }
        };
        if raise {
            let a = *y.choose(&mut rng).expect("nonempty");
            let b = *not_x.choose(&mut rng).expect("nonempty");
            d[a] += q;
            d[b] += q;
        } else {
            let a = *x.choose(&mut rng).expect("nonempty");
            let b = *not_y.choose(&mut rng).expect("nonempty");
            d[a] -= q;
            d[b] -= q;
        }
    }
    Err(PmlError::OrientationExhausted)
}

/// Shifts targets by `q` until both sides ask for the same number of edges.
fn balance(d: &mut [u64], deg: &[u64], top: &[u64], left: usize, q: u64, policy: TargetPolicy) {
    let n = d.len();
    loop {
        let sl: u64 = d[..left].iter().sum();
        let sr: u64 = d[left..].iter().sum();
        if sl == sr {
            return;
        }
        let (heavy, light) = if sl > sr { (0..left, left..n) } else { (left..n, 0..left) };
        // Lower the heavy side or raise the light side, whichever moves a
        // target least away from its preferred value.
        let pref = |v: usize| -> i64 {
            match policy {
                TargetPolicy::Max => deg[v] as i64,
                TargetPolicy::Half => (deg[v] / 2) as i64,
            }
        };
        let mut best: Option<(i64, usize, bool)> = None;
        for v in heavy {
            if d[v] >= q {
                let cost = (d[v] as i64 - q as i64 - pref(v)).abs() - (d[v] as i64 - pref(v)).abs();
                if best.is_none_or(|b| cost < b.0) {
                    best = Some((cost, v, false));
                }
            }
        }
        for v in light {
            if d[v] + q <= top[v] {
                let cost = (d[v] as i64 + q as i64 - pref(v)).abs() - (d[v] as i64 - pref(v)).abs();
                if best.is_none_or(|b| cost < b.0) {
                    best = Some((cost, v, true));
                }
            }
        }
        match best {
            Some((_, v, true)) => d[v] += q,
            Some((_, v, false)) => d[v] -= q,
            None => return,
        }
    }
}

/// Orientation with `out(v) - in(v) = beta(v) (mod k)` for every vertex.
///
/// Returned as the number of copies of each pair oriented left to right.
pub fn orientation_mod_k(g: &BipartiteMultigraph, beta: &[u64], k: u64, seed: u64) -> Result<BipartiteMultigraph> {
    if k == 0 || beta.len() != g.vertex_count() {
        return invalid("beta must give one residue per vertex");
    }
    let total: u64 = beta.iter().map(|b| b % k).sum();
    if total % k != 0 {
        return invalid("beta must sum to 0 modulo k");
    }
    let left = g.left();
    let deg = g.degrees();
    // Left v: out = fwd, so 2 fwd - deg = beta. Right v: in = fwd, so deg - 2 fwd = beta.
    let twice: Vec<u64> = (0..g.vertex_count())
        .map(|v| {
            let (b, dv) = (beta[v] % k, deg[v] % k);
            if v < left {
                (b + dv) % k
            } else {
                (dv + k - b) % k
            }
        })
        .collect();
    let (q, residue): (u64, Vec<u64>) = if k % 2 == 1 {
        let half = k.div_ceil(2);
        (k, twice.iter().map(|c| c * half % k).collect())
    } else {
        if twice.iter().any(|c| c % 2 == 1) {
            return Err(PmlError::OrientationExhausted);
        }
        (k / 2, twice.iter().map(|c| c / 2).collect())
    };
    subgraph_with_residues(g, &residue, q, TargetPolicy::Half, seed)
}

/// `(out - in) mod k` per vertex for a left-to-right count table.
pub fn orientation_residues(g: &BipartiteMultigraph, forward: &BipartiteMultigraph, k: u64) -> Vec<u64> {
    let left = g.left();
    let deg = g.degrees();
    let fwd = forward.degrees();
    (0..g.vertex_count())
        .map(|v| {
            let (out, inn) = if v < left { (fwd[v], deg[v] - fwd[v]) } else { (deg[v] - fwd[v], fwd[v]) };
            let diff = out as i64 - inn as i64;
            diff.rem_euclid(k as i64) as u64
        })
        .collect()
}
