//! Dinic max-flow on small integer networks.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

pub struct FlowNetwork {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<u64>,
    next: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { head: vec![NIL; nodes], to: Vec::new(), cap: Vec::new(), next: Vec::new() }
    }

    /// Adds `a -> b` with capacity `c`; returns the arc id.
    pub fn add_arc(&mut self, a: usize, b: usize, c: u64) -> usize {
        let id = self.to.len();
        for (from, dest, cc) in [(a, b, c), (b, a, 0)] {
            self.to.push(dest);
            self.cap.push(cc);
            self.next.push(self.head[from]);
            self.head[from] = self.to.len() - 1;
        }
        id
    }

    /// Flow currently on arc `id`.
    pub fn flow(&self, id: usize) -> u64 {
        self.cap[id ^ 1]
    }

    pub fn residual(&self, id: usize) -> u64 {
        self.cap[id]
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let n = self.head.len();
        let mut total = 0;
        loop {
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut q = VecDeque::new();
            q.push_back(s);
            while let Some(x) = q.pop_front() {
                let mut e = self.head[x];
                while e != NIL {
                    if self.cap[e] > 0 && level[self.to[e]] == usize::MAX {
                        level[self.to[e]] = level[x] + 1;
                        q.push_back(self.to[e]);
                    }
                    e = self.next[e];
                }
            }
            if level[t] == usize::MAX {
                return total;
            }
            let mut it = self.head.clone();
            loop {
                let pushed = self.dfs(s, t, u64::MAX, &level, &mut it);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
    }

    fn dfs(&mut self, x: usize, t: usize, limit: u64, level: &[usize], it: &mut [usize]) -> u64 {
        if x == t {
            return limit;
        }
        while it[x] != NIL {
            let e = it[x];
            let y = self.to[e];
            if self.cap[e] > 0 && level[y] == level[x] + 1 {
                let got = self.dfs(y, t, limit.min(self.cap[e]), level, it);
                if got > 0 {
                    self.cap[e] -= got;
                    self.cap[e ^ 1] += got;
                    return got;
                }
            }
            it[x] = self.next[e];
        }
        0
    }

    /// Nodes reachable from `s` in the residual network.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            let mut e = self.head[x];
            while e != NIL {
                if self.cap[e] > 0 && !seen[self.to[e]] {
                    seen[self.to[e]] = true;
                    stack.push(self.to[e]);
                }
                e = self.next[e];
            }
        }
        seen
    }
}
