//! Maximum-cardinality matching on general graphs (Edmonds' blossom
//! algorithm), plus an exhaustive oracle for small graphs.

use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) has an endpoint outside the vertex range")]
    OutOfRange(usize, usize),
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("duplicate edge ({0}, {1})")]
    Duplicate(usize, usize),
    #[error("brute-force matching is limited to {max} vertices, got {got}")]
    TooLarge { max: usize, got: usize },
}

/// Simple undirected graph. Edges are stored with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); vertex_count];
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(GraphError::OutOfRange(a, b));
            }
            if a == b {
                return Err(GraphError::Loop(a));
            }
            let (u, v) = (a.min(b), a.max(b));
            if adj[u].contains(&v) {
                return Err(GraphError::Duplicate(u, v));
            }
            adj[u].push(v);
            adj[v].push(u);
            list.push((u, v));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph {
            vertex_count,
            edges: list,
            adj,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.vertex_count && self.adj[u].binary_search(&v).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Matching {
    pub edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// True when the edges are pairwise vertex-disjoint edges of `g`.
    pub fn is_valid_for(&self, g: &Graph) -> bool {
        let mut used = vec![false; g.vertex_count];
        self.edges.iter().all(|&(u, v)| {
            let ok = g.has_edge(u, v) && !used[u] && !used[v];
            if ok {
                used[u] = true;
                used[v] = true;
            }
            ok
        })
    }

    fn from_mates(mate: &[Option<usize>]) -> Self {
        let edges = mate
            .iter()
            .enumerate()
            .filter_map(|(u, m)| m.filter(|&v| u < v).map(|v| (u, v)))
            .collect();
        Matching { edges }
    }
}

/// Reusable buffers for augmenting-path searches. Only the vertices a
/// search touches are reset afterwards, so a search costs time proportional
/// to the alternating tree it grows rather than to the whole graph.
#[derive(Debug, Clone, Default)]
pub struct Augmenter {
    parent: Vec<Option<usize>>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    touched: Vec<usize>,
    is_touched: Vec<bool>,
    seen_epoch: Vec<u32>,
    epoch: u32,
    queue: VecDeque<usize>,
}

impl Augmenter {
    pub fn new(vertex_count: usize) -> Self {
        Augmenter {
            parent: vec![None; vertex_count],
            base: (0..vertex_count).collect(),
            used: vec![false; vertex_count],
            in_blossom: vec![false; vertex_count],
            touched: Vec::new(),
            is_touched: vec![false; vertex_count],
            seen_epoch: vec![0; vertex_count],
            epoch: 0,
            queue: VecDeque::new(),
        }
    }

    fn touch(&mut self, v: usize) {
        if !self.is_touched[v] {
            self.is_touched[v] = true;
            self.touched.push(v);
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.parent[v] = None;
            self.base[v] = v;
            self.used[v] = false;
            self.in_blossom[v] = false;
            self.is_touched[v] = false;
        }
        self.touched.clear();
        self.queue.clear();
    }

    fn lca(&mut self, mate: &[Option<usize>], mut a: usize, mut b: usize) -> usize {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.seen_epoch.iter_mut().for_each(|x| *x = 0);
            self.epoch = 1;
        }
        loop {
            a = self.base[a];
            self.seen_epoch[a] = self.epoch;
            match mate[a] {
                Some(m) => a = self.parent[m].expect("alternating tree parent"),
                None => break,
            }
        }
        loop {
            b = self.base[b];
            if self.seen_epoch[b] == self.epoch {
                return b;
            }
            b = self.parent[mate[b].expect("matched vertex on path")].expect("alternating tree parent");
        }
    }

    fn mark_path(&mut self, mate: &[Option<usize>], mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            let m = mate[v].expect("blossom path vertex is matched");
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[m]] = true;
            self.parent[v] = Some(child);
            child = m;
            v = self.parent[m].expect("alternating tree parent");
        }
    }

    /// Searches for an augmenting path from `root`; returns its free endpoint.
    fn find_path(&mut self, g: &Graph, active: Option<&[bool]>, mate: &[Option<usize>], root: usize) -> Option<usize> {
        self.reset();
        self.touch(root);
        self.used[root] = true;
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for &to in &g.adj[v] {
                if active.is_some_and(|a| !a[to]) || self.base[v] == self.base[to] || mate[v] == Some(to) {
                    continue;
                }
                let to_is_outer = to == root || mate[to].is_some_and(|m| self.parent[m].is_some());
                if to_is_outer {
                    let cur = self.lca(mate, v, to);
                    for &t in &self.touched {
                        self.in_blossom[t] = false;
                    }
                    self.mark_path(mate, v, cur, to);
                    self.mark_path(mate, to, cur, v);
                    for idx in 0..self.touched.len() {
                        let i = self.touched[idx];
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to].is_none() {
                    self.touch(to);
                    self.parent[to] = Some(v);
                    match mate[to] {
                        None => return Some(to),
                        Some(m) => {
                            self.touch(m);
                            self.used[m] = true;
                            self.queue.push_back(m);
                        }
                    }
                }
            }
        }
        None
    }

    /// Augments `mate` along a path from the exposed vertex `root`, within
    /// the subgraph induced by `active` when given. Returns whether the
    /// matching grew.
    pub fn augment_from(&mut self, g: &Graph, active: Option<&[bool]>, mate: &mut [Option<usize>], root: usize) -> bool {
        if mate[root].is_some() || active.is_some_and(|a| !a[root]) {
            return false;
        }
        let Some(mut v) = self.find_path(g, active, mate, root) else {
            return false;
        };
        loop {
            let pv = self.parent[v].expect("augmenting path parent");
            let next = mate[pv];
            mate[v] = Some(pv);
            mate[pv] = Some(v);
            match next {
                Some(n) => v = n,
                None => break,
            }
        }
        true
    }
}

/// Exact maximum-cardinality matching. Deterministic: a greedy pass over the
/// edge list seeds the matching, then roots are augmented in vertex order.
pub fn max_matching(g: &Graph) -> Matching {
    let n = g.vertex_count;
    let mut mate = vec![None; n];
    for &(u, v) in &g.edges {
        if mate[u].is_none() && mate[v].is_none() {
            mate[u] = Some(v);
            mate[v] = Some(u);
        }
    }
    let mut aug = Augmenter::new(n);
    for root in 0..n {
        if !g.adj[root].is_empty() {
            aug.augment_from(g, None, &mut mate, root);
        }
    }
    Matching::from_mates(&mate)
}

pub const BRUTE_FORCE_MAX_VERTICES: usize = 16;

/// Exhaustive maximum matching for graphs with at most 16 vertices.
pub fn max_matching_bruteforce(g: &Graph) -> Result<Matching, GraphError> {
    if g.vertex_count > BRUTE_FORCE_MAX_VERTICES {
        return Err(GraphError::TooLarge {
            max: BRUTE_FORCE_MAX_VERTICES,
            got: g.vertex_count,
        });
    }
    fn go(g: &Graph, free: u32, cur: &mut Vec<(usize, usize)>, best: &mut Vec<(usize, usize)>) {
        if cur.len() + (free.count_ones() as usize) / 2 <= best.len() {
            return;
        }
        if free == 0 {
            *best = cur.clone();
            return;
        }
        let v = free.trailing_zeros() as usize;
        let rest = free & !(1 << v);
        for &u in &g.adj[v] {
            if rest >> u & 1 == 1 {
                cur.push((v.min(u), v.max(u)));
                go(g, rest & !(1 << u), cur, best);
                cur.pop();
            }
        }
        go(g, rest, cur, best);
    }
    let mut best = Vec::new();
    let all = if g.vertex_count == 0 { 0 } else { u32::MAX >> (32 - g.vertex_count) };
    go(g, all, &mut Vec::new(), &mut best);
    // `go` only records strictly better leaves; an edgeless graph never improves.
    Ok(Matching { edges: best })
}
