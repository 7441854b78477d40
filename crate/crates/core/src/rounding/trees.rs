//! Packing edge-disjoint spanning trees (matroid union over graphic matroids).
//!
//! A greedy pass builds each forest as a maximum spanning forest weighted by
//! the unused multiplicity. Forests still short of spanning are completed by
//! Edmonds' matroid-partition augmenting paths (shortest first), which finds
//! a packing whenever one exists.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::graph::BipartiteMultigraph;
use super::mincut::stoer_wagner;
use crate::error::{PmlError, Result};

/// `count` edge-disjoint spanning trees of the subgraph induced by
/// `vertices`, returned as their union (a sub-multigraph of `g`).
pub fn pack_spanning_trees(g: &BipartiteMultigraph, vertices: &[usize], count: usize) -> Result<BipartiteMultigraph> {
    let trees = pack_trees(g, vertices, count)?;
    let mut h = BipartiteMultigraph::new(g.left(), g.right());
    for tree in &trees {
        for &(u, w) in tree {
            let m = h.between(u, w);
            h.set_between(u, w, m + 1);
        }
    }
    Ok(h)
}

/// The individual trees as edge lists in vertex ids.
pub fn pack_trees(g: &BipartiteMultigraph, vertices: &[usize], count: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    let nv = vertices.len();
    if nv <= 1 || count == 0 {
        return Ok(vec![Vec::new(); count]);
    }
    let mut local = vec![usize::MAX; g.vertex_count()];
    for (p, &v) in vertices.iter().enumerate() {
        local[v] = p;
    }
    let mut pairs: Vec<(usize, usize, u64)> = Vec::new();
    for (u, w, m) in g.pairs() {
        if local[u] != usize::MAX && local[w] != usize::MAX {
            pairs.push((local[u], local[w], m));
        }
    }
    let mut packing = Packing::new(nv, &pairs, count);
    packing.greedy();
    let target = count * (nv - 1);
    let mut failed = vec![false; pairs.len()];
    while packing.total() < target {
        let mut progressed = false;
        for p in 0..pairs.len() {
            if failed[p] || packing.usage[p] >= pairs[p].2 as usize {
                continue;
            }
            if packing.augment(p) {
                progressed = true;
                break;
            }
            failed[p] = true;
        }
        if !progressed {
            let (weight, side) = stoer_wagner(g, vertices);
            return Err(PmlError::Packing { cut_weight: weight, side });
        }
    }
    Ok(packing
        .forests
        .iter()
        .map(|f| f.edges.iter().map(|&p| (vertices[pairs[p].0], vertices[pairs[p].1])).collect())
        .collect())
}

struct Forest {
    edges: Vec<usize>,
    has: Vec<bool>,
}

struct Packing<'a> {
    nv: usize,
    pairs: &'a [(usize, usize, u64)],
    forests: Vec<Forest>,
    usage: Vec<usize>,
}

const NEW: (usize, usize) = (usize::MAX, usize::MAX);

impl<'a> Packing<'a> {
    fn new(nv: usize, pairs: &'a [(usize, usize, u64)], count: usize) -> Self {
        let forests = (0..count).map(|_| Forest { edges: Vec::new(), has: vec![false; pairs.len()] }).collect();
        Packing { nv, pairs, forests, usage: vec![0; pairs.len()] }
    }

    fn total(&self) -> usize {
        self.forests.iter().map(|f| f.edges.len()).sum()
    }

    fn greedy(&mut self) {
        for f in 0..self.forests.len() {
            let mut order: Vec<usize> = (0..self.pairs.len()).collect();
            order.sort_by_key(|&p| (core::cmp::Reverse(self.pairs[p].2 as usize - self.usage[p]), p));
            let mut dsu = Dsu::new(self.nv);
            for p in order {
                if self.usage[p] >= self.pairs[p].2 as usize {
                    continue;
                }
                let (u, w, _) = self.pairs[p];
                if dsu.union(u, w) {
                    self.forests[f].edges.push(p);
                    self.forests[f].has[p] = true;
                    self.usage[p] += 1;
                }
            }
        }
    }

    /// Vertex path between `u` and `w` in forest `f` as pair ids, or `None`
    /// when they lie in different trees.
    fn path(&self, f: usize, u: usize, w: usize) -> Option<Vec<usize>> {
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.nv];
        for &p in &self.forests[f].edges {
            let (a, b, _) = self.pairs[p];
            adj[a].push((b, p));
            adj[b].push((a, p));
        }
        let mut via = vec![usize::MAX; self.nv];
        let mut prev = vec![usize::MAX; self.nv];
        let mut seen = vec![false; self.nv];
        let mut queue = VecDeque::new();
        seen[u] = true;
        queue.push_back(u);
        while let Some(x) = queue.pop_front() {
            if x == w {
                break;
            }
            for &(y, p) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    via[y] = p;
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if !seen[w] {
            return None;
        }
        let mut out = Vec::new();
        let mut x = w;
        while x != u {
            out.push(via[x]);
            x = prev[x];
        }
        Some(out)
    }

    /// Tries to add one more copy of pair `p0` to the packing.
    fn augment(&mut self, p0: usize) -> bool {
        let k = self.forests.len();
        // Element = (forest, pair) currently placed, or NEW for the new copy.
        let mut parent: alloc::collections::BTreeMap<(usize, usize), (usize, usize)> = Default::default();
        let mut queue = VecDeque::new();
        queue.push_back(NEW);
        while let Some(x) = queue.pop_front() {
            let (xf, xp) = x;
            let pair = if x == NEW { p0 } else { xp };
            let (u, w, _) = self.pairs[pair];
            for f in 0..k {
                if f == xf || self.forests[f].has[pair] {
                    continue;
                }
                match self.path(f, u, w) {
                    None => {
                        self.apply(x, f, p0, &parent);
                        return true;
                    }
                    Some(path) => {
                        for q in path {
                            let y = (f, q);
                            if let alloc::collections::btree_map::Entry::Vacant(e) = parent.entry(y) {
                                e.insert(x);
                                queue.push_back(y);
                            }
                        }
                    }
                }
            }
        }
        false
    }

    fn apply(
        &mut self,
        last: (usize, usize),
        into: usize,
        p0: usize,
        parent: &alloc::collections::BTreeMap<(usize, usize), (usize, usize)>,
    ) {
        let mut cur = last;
        let mut target = into;
        loop {
            if cur == NEW {
                self.insert(target, p0);
                self.usage[p0] += 1;
                return;
            }
            let (src, pair) = cur;
            self.remove(src, pair);
            self.insert(target, pair);
            target = src;
            cur = parent[&cur];
        }
    }

    fn insert(&mut self, f: usize, p: usize) {
        self.forests[f].edges.push(p);
        self.forests[f].has[p] = true;
    }

    fn remove(&mut self, f: usize, p: usize) {
        let forest = &mut self.forests[f];
        let at = forest.edges.iter().position(|&q| q == p).expect("edge in forest");
        forest.edges.swap_remove(at);
        forest.has[p] = false;
    }
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
