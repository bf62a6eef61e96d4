//! Random directed topologies.
//!
//! All generators are pure functions of their parameters and [`Seed`].

use std::collections::HashSet;

use rand::Rng;

use crate::graph::DirectedGraph;
use crate::seed::{Seed, SimRng};
use crate::{Error, Result};

/// Directed Erdős–Rényi graph: each ordered pair `(u, v)`, `u != v`, is an
/// edge independently with probability `min(avg_degree / n, 1)`.
pub fn erdos_renyi(n: usize, avg_degree: f64, seed: Seed) -> Result<DirectedGraph> {
    if n == 0 {
        return Err(Error::param("node count must be at least 1"));
    }
    if !avg_degree.is_finite() || avg_degree <= 0.0 {
        return Err(Error::param(format!("average degree must be positive, got {avg_degree}")));
    }
    let p = (avg_degree / n as f64).min(1.0);
    let mut rng = seed.rng();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(DirectedGraph::from_edges_unchecked(n, edges))
}

/// Parameters of the directed preferential-attachment growth process.
///
/// Each step does one of:
/// * with probability `a`: add a new node with an edge to an existing node
///   chosen by in-degree preference,
/// * with probability `b`: add an edge between two existing nodes, source by
///   out-degree preference and target by in-degree preference,
/// * with probability `eta`: add a new node with an edge from an existing node
///   chosen by out-degree preference.
///
/// In-degree preference picks `u` with probability
/// `(d_in(u) + delta_in) / (edges + delta_in * nodes)`; out-degree preference
/// is symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfParams {
    pub a: f64,
    pub b: f64,
    pub eta: f64,
    pub delta_in: f64,
    pub delta_out: f64,
}

impl SfParams {
    /// Tuned so that `m / n` is close to 3.
    pub const AVG_DEGREE_3: SfParams = SfParams { a: 0.2852, b: 0.68, eta: 0.0348, delta_in: 0.2, delta_out: 0.0 };
    /// Tuned so that `m / n` is close to 6.
    pub const AVG_DEGREE_6: SfParams = SfParams { a: 0.1411, b: 0.8417, eta: 0.0172, delta_in: 0.2, delta_out: 0.0 };

    pub fn validate(&self) -> Result<()> {
        let probs = [self.a, self.b, self.eta];
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::param("a, b, eta must be non-negative"));
        }
        if (self.a + self.b + self.eta - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!("a + b + eta must equal 1, got {}", self.a + self.b + self.eta)));
        }
        if !(self.delta_in.is_finite() && self.delta_in >= 0.0)
            || !(self.delta_out.is_finite() && self.delta_out >= 0.0)
        {
            return Err(Error::param("delta_in and delta_out must be non-negative"));
        }
        Ok(())
    }
}

/// Attempts per growth step before the step is skipped.
const SF_MAX_RETRIES: usize = 100;

struct Growth {
    nodes: usize,
    edges: Vec<(usize, usize)>,
    present: HashSet<(usize, usize)>,
}

impl Growth {
    /// Node drawn with probability proportional to `degree + delta`. With
    /// zero total weight the draw is uniform.
    fn pick(&self, rng: &mut SimRng, delta: f64, endpoint: impl Fn(&(usize, usize)) -> usize) -> usize {
        let edges = self.edges.len() as f64;
        let total = edges + delta * self.nodes as f64;
        if total > 0.0 && rng.random::<f64>() * total < edges {
            endpoint(&self.edges[rng.random_range(0..self.edges.len())])
        } else {
            rng.random_range(0..self.nodes)
        }
    }

    fn push(&mut self, u: usize, v: usize) {
        self.edges.push((u, v));
        self.present.insert((u, v));
    }
}

/// Directed scale-free graph grown from a single node until it has `n` nodes.
///
/// An internal edge that would be a self-loop or a duplicate is redrawn up to
/// 100 times; after that the step is dropped. New-node steps cannot collide.
pub fn scale_free(n: usize, params: SfParams, seed: Seed) -> Result<DirectedGraph> {
    if n == 0 {
        return Err(Error::param("node count must be at least 1"));
    }
    params.validate()?;
    if n > 1 && params.a == 0.0 && params.eta == 0.0 {
        return Err(Error::param("a = eta = 0 never adds nodes"));
    }
    let mut rng = seed.rng();
    let mut g = Growth { nodes: 1, edges: Vec::new(), present: HashSet::new() };
    let by_in = |e: &(usize, usize)| e.1;
    let by_out = |e: &(usize, usize)| e.0;

    while g.nodes < n {
        // The rule is drawn once per step; only the endpoints are redrawn.
        let r = rng.random::<f64>();
        if r < params.a {
            let w = g.pick(&mut rng, params.delta_in, by_in);
            let v = g.nodes;
            g.nodes += 1;
            g.push(v, w);
        } else if r < params.a + params.b {
            for _ in 0..SF_MAX_RETRIES {
                let v = g.pick(&mut rng, params.delta_out, by_out);
                let w = g.pick(&mut rng, params.delta_in, by_in);
                if v != w && !g.present.contains(&(v, w)) {
                    g.push(v, w);
                    break;
                }
            }
        } else {
            let v = g.pick(&mut rng, params.delta_out, by_out);
            let w = g.nodes;
            g.nodes += 1;
            g.push(v, w);
        }
    }
    Ok(DirectedGraph::from_edges_unchecked(n, g.edges))
}

/// Random in-arborescence by undirected preferential attachment, edges then
/// oriented towards the root. Node 0 is the root; node `x` joins at step `x`
/// and gets the single out-edge `(x, parent)`.
pub fn in_arborescence(n: usize, seed: Seed) -> Result<DirectedGraph> {
    if n == 0 {
        return Err(Error::param("node count must be at least 1"));
    }
    let mut rng = seed.rng();
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    // Every edge contributes both endpoints, so a uniform draw from this list
    // is a draw proportional to degree.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * n);
    for x in 1..n {
        let parent = if endpoints.is_empty() { 0 } else { endpoints[rng.random_range(0..endpoints.len())] };
        edges.push((x, parent));
        endpoints.push(x);
        endpoints.push(parent);
    }
    Ok(DirectedGraph::from_edges_unchecked(n, edges))
}
