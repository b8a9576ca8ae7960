//! Simple undirected graphs on vertices `1..=n`, girth computation and
//! Hopcroft-Karp maximum matching.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{HmpError, Result};

/// Unordered vertex pair stored as `(min, max)`.
pub type Edge = (usize, usize);

pub fn normalize(u: usize, v: usize) -> Edge {
    (u.min(v), u.max(v))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<Edge>,
    bipartition: Option<(Vec<usize>, Vec<usize>)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(HmpError::invalid(format!("self-loop at {u}")));
            }
            if u == 0 || v == 0 || u > n || v > n {
                return Err(HmpError::invalid(format!("edge ({u},{v}) outside 1..={n}")));
            }
            if !set.insert(normalize(u, v)) {
                return Err(HmpError::invalid(format!("duplicate edge ({u},{v})")));
            }
        }
        Ok(Graph {
            n,
            edges: set,
            bipartition: None,
        })
    }

    /// Attach a bipartition. Both sides must be disjoint, cover `1..=n` and
    /// every edge must cross.
    pub fn with_bipartition(mut self, left: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        let mut side = vec![None; self.n + 1];
        for (s, part) in [(0u8, &left), (1u8, &right)] {
            for &v in part {
                if v == 0 || v > self.n || side[v].is_some() {
                    return Err(HmpError::invalid(format!("bad bipartition vertex {v}")));
                }
                side[v] = Some(s);
            }
        }
        if side[1..].iter().any(Option::is_none) {
            return Err(HmpError::invalid("bipartition does not cover all vertices"));
        }
        if let Some(&(u, v)) = self.edges.iter().find(|&&(u, v)| side[u] == side[v]) {
            return Err(HmpError::invalid(format!(
                "edge ({u},{v}) does not cross the bipartition"
            )));
        }
        self.bipartition = Some((left, right));
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&normalize(u, v))
    }

    pub fn bipartition(&self) -> Option<&(Vec<usize>, Vec<usize>)> {
        self.bipartition.as_ref()
    }

    /// Sorted neighbour lists, indexed by vertex (index 0 unused).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n + 1];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// The common degree, if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let adj = self.adjacency();
        let d = adj.get(1).map_or(0, Vec::len);
        adj[1..].iter().all(|l| l.len() == d).then_some(d)
    }

    /// The attached bipartition, or a 2-colouring found by BFS (lowest vertex
    /// of each component on the left).
    pub fn two_coloring(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        if let Some(b) = &self.bipartition {
            return Some(b.clone());
        }
        let adj = self.adjacency();
        let mut color = vec![None; self.n + 1];
        for root in 1..=self.n {
            if color[root].is_some() {
                continue;
            }
            color[root] = Some(false);
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap();
                for &v in &adj[u] {
                    match color[v] {
                        None => {
                            color[v] = Some(!cu);
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        let (left, right): (Vec<usize>, Vec<usize>) =
            (1..=self.n).partition(|&v| color[v] == Some(false));
        Some((left, right))
    }

    /// Length of the shortest cycle, `None` for forests.
    ///
    /// BFS from every vertex; a non-tree edge `(u, v)` closes a closed walk
    /// of length `dist[u] + dist[v] + 1` containing a cycle no longer than
    /// that, and the root of a shortest cycle sees it exactly.
    pub fn girth(&self) -> Option<usize> {
        let adj = self.adjacency();
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; self.n + 1];
        let mut parent = vec![0usize; self.n + 1];
        for root in 1..=self.n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[root] = 0;
            parent[root] = 0;
            let mut queue = VecDeque::from([root]);
            'bfs: while let Some(u) = queue.pop_front() {
                if let Some(b) = best {
                    if 2 * dist[u] >= b {
                        break 'bfs;
                    }
                }
                for &v in &adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        queue.push_back(v);
                    } else if parent[u] != v {
                        let len = dist[u] + dist[v] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    pub fn remove_edges<'a>(&mut self, edges: impl IntoIterator<Item = &'a Edge>) {
        for e in edges {
            self.edges.remove(e);
        }
    }
}

/// True iff `g` has no cycle of length `<= 2d`.
pub fn verify_girth(g: &Graph, d: usize) -> bool {
    g.girth().is_none_or(|len| len > 2 * d)
}

/// Hopcroft-Karp maximum matching between `left` and the rest of the graph.
///
/// `adj` must list neighbours in increasing order; left vertices are
/// processed in the order given, so results are reproducible.
pub fn hopcroft_karp(n: usize, left: &[usize], adj: &[Vec<usize>]) -> Vec<Edge> {
    const FREE: usize = usize::MAX;
    let mut mate = vec![FREE; n + 1];
    let mut dist = vec![usize::MAX; n + 1];

    loop {
        // BFS layers from free left vertices.
        let mut queue = VecDeque::new();
        for &u in left {
            if mate[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = mate[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut augmented = false;
        for &u in left {
            if mate[u] == FREE && augment(u, adj, &mut mate, &mut dist) {
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }

    let mut out: Vec<Edge> = left
        .iter()
        .filter(|&&u| mate[u] != FREE)
        .map(|&u| normalize(u, mate[u]))
        .collect();
    out.sort_unstable();
    out
}

fn augment(u: usize, adj: &[Vec<usize>], mate: &mut [usize], dist: &mut [usize]) -> bool {
    for &v in &adj[u] {
        let w = mate[v];
        let ok = if w == usize::MAX {
            true
        } else if dist[w] == dist[u].wrapping_add(1) {
            augment(w, adj, mate, dist)
        } else {
            false
        };
        if ok {
            mate[u] = v;
            mate[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}
