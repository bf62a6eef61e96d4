//! Simple directed graphs over nodes `0..n`.
//!
//! An edge `(u, v)` means bank `u` lends to bank `v`: `u` is a creditor of
//! `v`, and losses flow from `v` back to `u`.

use std::collections::HashSet;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl DirectedGraph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        DirectedGraph { n, edges: Vec::new() }
    }

    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::structure(format!("edge ({u},{v}) references a node >= {n}")));
            }
            if u == v {
                return Err(Error::structure(format!("self-loop at node {u}")));
            }
            if !seen.insert((u, v)) {
                return Err(Error::structure(format!("duplicate edge ({u},{v})")));
            }
        }
        Ok(DirectedGraph { n, edges })
    }

    /// Generators guarantee simplicity themselves.
    pub(crate) fn from_edges_unchecked(n: usize, edges: Vec<(usize, usize)>) -> Self {
        debug_assert!(DirectedGraph::from_edges(n, edges.clone()).is_ok());
        DirectedGraph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(in-degree, out-degree)` for every node.
    pub fn degree_profile(&self) -> Vec<(usize, usize)> {
        let mut profile = vec![(0, 0); self.n];
        for &(u, v) in &self.edges {
            profile[u].1 += 1;
            profile[v].0 += 1;
        }
        profile
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        self.degree_profile().into_iter().map(|(i, _)| i).collect()
    }

    /// Compressed adjacency in both directions.
    pub fn adjacency(&self) -> Adjacency {
        Adjacency::new(self)
    }
}

/// CSR-style adjacency. `creditors(v)` lists every `u` with an edge `(u, v)`
/// together with the edge index; `debtors(u)` lists every `v` with `(u, v)`.
#[derive(Debug, Clone)]
pub struct Adjacency {
    in_offsets: Vec<usize>,
    in_items: Vec<(usize, usize)>,
    out_offsets: Vec<usize>,
    out_items: Vec<(usize, usize)>,
}

impl Adjacency {
    fn new(g: &DirectedGraph) -> Self {
        let n = g.n();
        let mut in_offsets = vec![0usize; n + 1];
        let mut out_offsets = vec![0usize; n + 1];
        for &(u, v) in g.edges() {
            in_offsets[v + 1] += 1;
            out_offsets[u + 1] += 1;
        }
        for i in 0..n {
            in_offsets[i + 1] += in_offsets[i];
            out_offsets[i + 1] += out_offsets[i];
        }
        let mut in_fill = in_offsets.clone();
        let mut out_fill = out_offsets.clone();
        let mut in_items = vec![(0, 0); g.m()];
        let mut out_items = vec![(0, 0); g.m()];
        for (idx, &(u, v)) in g.edges().iter().enumerate() {
            in_items[in_fill[v]] = (u, idx);
            in_fill[v] += 1;
            out_items[out_fill[u]] = (v, idx);
            out_fill[u] += 1;
        }
        // Ascending neighbour order keeps floating-point accumulation order
        // independent of how the edge list happens to be ordered.
        for v in 0..n {
            in_items[in_offsets[v]..in_offsets[v + 1]].sort_unstable();
            out_items[out_offsets[v]..out_offsets[v + 1]].sort_unstable();
        }
        Adjacency { in_offsets, in_items, out_offsets, out_items }
    }

    /// `(creditor, edge index)` pairs for edges into `v`.
    pub fn creditors(&self, v: usize) -> &[(usize, usize)] {
        &self.in_items[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// `(debtor, edge index)` pairs for edges out of `u`.
    pub fn debtors(&self, u: usize) -> &[(usize, usize)] {
        &self.out_items[self.out_offsets[u]..self.out_offsets[u + 1]]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out_offsets[u + 1] - self.out_offsets[u]
    }
}
