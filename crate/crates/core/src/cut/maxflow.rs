//! Dinic's algorithm on integer capacities.

use std::collections::VecDeque;

/// A flow network with paired arcs: arc `a` and its reverse `a ^ 1`.
#[derive(Clone, Debug, Default)]
pub struct FlowNetwork {
    adj: Vec<Vec<u32>>,
    to: Vec<u32>,
    cap: Vec<i64>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork { adj: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Adds `u → v` with capacity `c` and `v → u` with capacity `c_rev`.
    pub fn add_edge(&mut self, u: usize, v: usize, c: i64, c_rev: i64) {
        debug_assert!(c >= 0 && c_rev >= 0);
        let a = self.to.len() as u32;
        self.to.push(v as u32);
        self.cap.push(c);
        self.to.push(u as u32);
        self.cap.push(c_rev);
        self.adj[u].push(a);
        self.adj[v].push(a + 1);
    }

    fn levels(&self, s: usize) -> Vec<i32> {
        let mut level = vec![-1; self.len()];
        let mut q = VecDeque::new();
        level[s] = 0;
        q.push_back(s);
        while let Some(v) = q.pop_front() {
            for &a in &self.adj[v] {
                let u = self.to[a as usize] as usize;
                if self.cap[a as usize] > 0 && level[u] < 0 {
                    level[u] = level[v] + 1;
                    q.push_back(u);
                }
            }
        }
        level
    }

    fn blocking_flow(&mut self, s: usize, t: usize, level: &mut [i32]) -> i64 {
        let mut it = vec![0usize; self.len()];
        let mut path: Vec<u32> = Vec::new();
        let mut total = 0i64;
        let mut v = s;
        loop {
            if v == t {
                let f = path.iter().map(|&a| self.cap[a as usize]).min().unwrap_or(0);
                for &a in &path {
                    self.cap[a as usize] -= f;
                    self.cap[(a ^ 1) as usize] += f;
                }
                total += f;
                let k = path.iter().position(|&a| self.cap[a as usize] == 0).unwrap_or(0);
                path.truncate(k);
                v = if k == 0 { s } else { self.to[path[k - 1] as usize] as usize };
                continue;
            }
            let mut advanced = false;
            while it[v] < self.adj[v].len() {
                let a = self.adj[v][it[v]] as usize;
                let u = self.to[a] as usize;
                if self.cap[a] > 0 && level[u] == level[v] + 1 {
                    path.push(a as u32);
                    v = u;
                    advanced = true;
                    break;
                }
                it[v] += 1;
            }
            if !advanced {
                if v == s {
                    break;
                }
                level[v] = -1;
                let a = path.pop().expect("non-source vertex has an incoming path arc");
                v = self.to[(a ^ 1) as usize] as usize;
                it[v] += 1;
            }
        }
        total
    }

    /// Saturates the network; returns the max-flow value.
    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        loop {
            let mut level = self.levels(s);
            if level[t] < 0 {
                return flow;
            }
            flow += self.blocking_flow(s, t, &mut level);
        }
    }

    /// Vertices reachable from `s` in the residual graph.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        self.levels(s).into_iter().map(|l| l >= 0).collect()
    }

    /// Vertices that can reach `t` in the residual graph.
    pub fn reaches_sink(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut q = VecDeque::new();
        seen[t] = true;
        q.push_back(t);
        while let Some(w) = q.pop_front() {
            for &a in &self.adj[w] {
                let u = self.to[a as usize] as usize;
                if !seen[u] && self.cap[(a ^ 1) as usize] > 0 {
                    seen[u] = true;
                    q.push_back(u);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_network() {
        // CLRS figure 26.1: max flow 23.
        let mut g = FlowNetwork::new(6);
        for (u, v, c) in [(0, 1, 16), (0, 2, 13), (2, 1, 4), (1, 3, 12), (3, 2, 9), (2, 4, 14), (4, 3, 7), (3, 5, 20), (4, 5, 4)] {
            g.add_edge(u, v, c, 0);
        }
        assert_eq!(g.max_flow(0, 5), 23);
        let s = g.source_side(0);
        assert!(s[0] && !s[5]);
    }

    #[test]
    fn minimal_and_maximal_cuts_differ_on_ties() {
        // s -1-> a -1-> t: both {s} and {s, a} are minimum cuts.
        let mut g = FlowNetwork::new(3);
        g.add_edge(0, 1, 1, 0);
        g.add_edge(1, 2, 1, 0);
        assert_eq!(g.max_flow(0, 2), 1);
        assert_eq!(g.source_side(0), vec![true, false, false]);
        assert_eq!(g.reaches_sink(2), vec![false, false, true]);
    }
}
