use alloc::vec;
use alloc::vec::Vec;

/// Bipartite multigraph stored as a dense multiplicity table.
///
/// Vertex ids: left `i` is `i`, right `j` is `left + j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteMultigraph {
    left: usize,
    right: usize,
    mult: Vec<u64>,
}

impl BipartiteMultigraph {
    pub fn new(left: usize, right: usize) -> Self {
        BipartiteMultigraph { left, right, mult: vec![0; left * right] }
    }

    pub fn from_table(left: usize, right: usize, mult: Vec<u64>) -> Self {
        assert_eq!(mult.len(), left * right);
        BipartiteMultigraph { left, right, mult }
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn vertex_count(&self) -> usize {
        self.left + self.right
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.mult[i * self.right + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, m: u64) {
        self.mult[i * self.right + j] = m;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, m: u64) {
        self.mult[i * self.right + j] += m;
    }

    pub fn table(&self) -> &[u64] {
        &self.mult
    }

    pub fn edge_count(&self) -> u64 {
        self.mult.iter().sum()
    }

    pub fn degree(&self, v: usize) -> u64 {
        if v < self.left {
            (0..self.right).map(|j| self.get(v, j)).sum()
        } else {
            (0..self.left).map(|i| self.get(i, v - self.left)).sum()
        }
    }

    pub fn degrees(&self) -> Vec<u64> {
        (0..self.vertex_count()).map(|v| self.degree(v)).collect()
    }

    /// Edges `(u, w, multiplicity)` in vertex ids, multiplicity > 0.
    pub fn pairs(&self) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::new();
        for i in 0..self.left {
            for j in 0..self.right {
                let m = self.get(i, j);
                if m > 0 {
                    out.push((i, self.left + j, m));
                }
            }
        }
        out
    }

    /// Multiplicity between two vertex ids (0 for same-side pairs).
    pub fn between(&self, u: usize, w: usize) -> u64 {
        let (a, b) = if u < w { (u, w) } else { (w, u) };
        if a < self.left && b >= self.left {
            self.get(a, b - self.left)
        } else {
            0
        }
    }

    pub fn set_between(&mut self, u: usize, w: usize, m: u64) {
        let (a, b) = if u < w { (u, w) } else { (w, u) };
        debug_assert!(a < self.left && b >= self.left);
        self.set(a, b - self.left, m);
    }

    /// Keeps only edges with both ends in `keep`.
    pub fn induced(&self, keep: &[bool]) -> Self {
        let mut g = self.clone();
        for i in 0..self.left {
            for j in 0..self.right {
                if !(keep[i] && keep[self.left + j]) {
                    g.set(i, j, 0);
                }
            }
        }
        g
    }

    pub fn is_subgraph_of(&self, other: &Self) -> bool {
        self.left == other.left
            && self.right == other.right
            && self.mult.iter().zip(&other.mult).all(|(a, b)| a <= b)
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mult = self.mult.iter().zip(&other.mult).map(|(a, b)| a - b).collect();
        BipartiteMultigraph { left: self.left, right: self.right, mult }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mult = self.mult.iter().zip(&other.mult).map(|(a, b)| a + b).collect();
        BipartiteMultigraph { left: self.left, right: self.right, mult }
    }

    /// Connected components over vertices with at least one edge; isolated
    /// vertices come back as singletons.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                let others: Vec<usize> = if u < self.left {
                    (0..self.right).filter(|&j| self.get(u, j) > 0).map(|j| self.left + j).collect()
                } else {
                    (0..self.left).filter(|&i| self.get(i, u - self.left) > 0).collect()
                };
                for w in others {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}
