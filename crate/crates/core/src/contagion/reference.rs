//! Literal, quadratic transcription of the cascade loop. It keeps every
//! round's equity vector and dead set and recomputes alive in-degrees from
//! the raw edge list, so it shares no bookkeeping with [`super::cascade`].
//! Intended as a test oracle.

use std::collections::BTreeSet;

use crate::balance::{NodeSheet, WeightedNetwork};

use super::CascadeResult;

pub fn reference_cascade(net: &WeightedNetwork, sheets: &[NodeSheet], shocked: &[usize], phi: f64) -> CascadeResult {
    let n = net.n();
    let edges = net.graph.edges();
    let has_edge = |u: usize, v: usize| edges.contains(&(u, v));

    // c[t][v] and dead[t]
    let mut c: Vec<Vec<f64>> = vec![(0..n)
        .map(|v| {
            if shocked.contains(&v) {
                sheets[v].net_worth - phi * sheets[v].effective_external
            } else {
                sheets[v].net_worth
            }
        })
        .collect()];
    let mut dead: Vec<BTreeSet<usize>> = vec![BTreeSet::new()];
    let mut t = 0;
    let mut proceed = true;

    while proceed && dead[t].len() != n {
        let alive = |x: usize, d: &BTreeSet<usize>| !d.contains(&x);
        let d_in = |v: usize, d: &BTreeSet<usize>| (0..n).filter(|&w| alive(w, d) && has_edge(w, v)).count();
        let mut next = c[t].clone();
        let mut next_dead = dead[t].clone();
        for u in 0..n {
            if !alive(u, &dead[t]) {
                continue;
            }
            for v in 0..n {
                if alive(v, &dead[t]) && c[t][v] < 0.0 && has_edge(u, v) {
                    let loss = (-c[t][v]).min(sheets[v].borrowing);
                    next[u] -= loss / d_in(v, &dead[t]) as f64;
                }
            }
            if c[t][u] < 0.0 {
                next_dead.insert(u);
            }
        }
        c.push(next);
        dead.push(next_dead);
        t += 1;
        if dead[t] == dead[t - 1] {
            proceed = false;
        }
    }

    CascadeResult {
        final_dead: dead[t].iter().copied().collect(),
        rounds: t,
        dead_trace: dead.iter().map(BTreeSet::len).collect(),
        equity: c[t].clone(),
        failures: Vec::new(),
    }
}
