//! Orientations of undirected graphs minimising the maximum out-degree.

use std::collections::VecDeque;

/// Unit-capacity Dinic max-flow on a small graph.
struct Dinic {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<i64>,
    next: Vec<usize>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            head: vec![NIL; n],
            to: Vec::new(),
            cap: Vec::new(),
            next: Vec::new(),
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: i64) -> usize {
        let id = self.to.len();
        for (a, b, cc) in [(u, v, c), (v, u, 0)] {
            self.to.push(b);
            self.cap.push(cc);
            self.next.push(self.head[a]);
            self.head[a] = self.to.len() - 1;
        }
        id
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let mut e = self.head[u];
            while e != NIL {
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    q.push_back(v);
                }
                e = self.next[e];
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, f: i64) -> i64 {
        if u == t {
            return f;
        }
        while self.iter[u] != NIL {
            let e = self.iter[u];
            let v = self.to[e];
            if self.cap[e] > 0 && self.level[v] == self.level[u] + 1 {
                let got = self.dfs(v, t, f.min(self.cap[e]));
                if got > 0 {
                    self.cap[e] -= got;
                    self.cap[e ^ 1] += got;
                    return got;
                }
            }
            self.iter[u] = self.next[e];
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        while self.bfs(s, t) {
            self.iter.clone_from(&self.head);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }
}

/// `heads[e]` is the endpoint edge `e` points to; the other endpoint is charged
/// with it as out-degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    pub heads: Vec<usize>,
    pub max_out_degree: usize,
}

impl Orientation {
    pub fn out_degrees(&self, n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
        let mut out = vec![0; n];
        for (e, &(a, b)) in edges.iter().enumerate() {
            out[if self.heads[e] == a { b } else { a }] += 1;
        }
        out
    }
}

/// Tries to charge every edge to an endpoint with at most `k` per vertex.
fn orient_within(n: usize, edges: &[(usize, usize)], k: usize) -> Option<Vec<usize>> {
    let m = edges.len();
    let (s, t) = (m + n, m + n + 1);
    let mut g = Dinic::new(m + n + 2);
    let mut choice = Vec::with_capacity(m);
    for (e, &(a, b)) in edges.iter().enumerate() {
        g.add_edge(s, e, 1);
        choice.push((g.add_edge(e, m + a, 1), g.add_edge(e, m + b, 1)));
    }
    for v in 0..n {
        g.add_edge(m + v, t, k as i64);
    }
    if g.max_flow(s, t) < m as i64 {
        return None;
    }
    Some(
        edges
            .iter()
            .zip(&choice)
            .map(|(&(a, b), &(ea, _))| if g.cap[ea] == 0 { b } else { a })
            .collect(),
    )
}

/// An orientation whose maximum out-degree is as small as possible, found by
/// binary search on the bound with a flow feasibility test. Deterministic.
pub fn min_max_outdegree_orientation(n: usize, edges: &[(usize, usize)]) -> Orientation {
    if edges.is_empty() {
        return Orientation {
            heads: Vec::new(),
            max_out_degree: 0,
        };
    }
    let mut deg = vec![0usize; n];
    for &(a, b) in edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    let (mut lo, mut hi) = (0usize, *deg.iter().max().unwrap());
    let mut best = orient_within(n, edges, hi).expect("max degree always suffices");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match orient_within(n, edges, mid) {
            Some(h) => {
                best = h;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    Orientation {
        heads: best,
        max_out_degree: lo,
    }
}

/// Exhaustive minimum over all `2^|E|` orientations; a reference for tiny graphs.
pub fn brute_force_min_max_outdegree(n: usize, edges: &[(usize, usize)]) -> usize {
    assert!(edges.len() <= 24, "brute force is limited to 24 edges");
    let mut best = usize::MAX;
    for code in 0u32..(1 << edges.len()) {
        let mut out = vec![0usize; n];
        for (e, &(a, b)) in edges.iter().enumerate() {
            out[if code >> e & 1 == 1 { a } else { b }] += 1;
        }
        best = best.min(out.into_iter().max().unwrap_or(0));
    }
    if edges.is_empty() {
        0
    } else {
        best
    }
}
