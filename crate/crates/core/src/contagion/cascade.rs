use crate::balance::{NodeSheet, WeightedNetwork};

use super::apply_initial_shock;

/// A bank's exit from the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Failure {
    pub node: usize,
    /// Round in which its equity was negative while still alive.
    pub round: usize,
    /// Equity at that round.
    pub equity: f64,
    /// Total loss passed to surviving creditors in that round.
    pub outflow: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeResult {
    /// Dead banks at the end, ascending.
    pub final_dead: Vec<usize>,
    /// Rounds executed.
    pub rounds: usize,
    /// `|V_dead(t)|` for `t = 0..=rounds`.
    pub dead_trace: Vec<usize>,
    /// Final equity; dead banks keep the value they had when they died.
    pub equity: Vec<f64>,
    pub failures: Vec<Failure>,
}

impl CascadeResult {
    pub fn dead_count(&self) -> usize {
        self.final_dead.len()
    }
}

/// Runs the insolvency cascade from the shocked set `shocked` with severity
/// `phi`.
///
/// Each round every alive bank with negative equity passes its capped loss to
/// its alive creditors, then all such banks join the dead set and the alive
/// in-degrees are recomputed. The process stops when a round adds nobody or
/// every bank is dead.
pub fn cascade(net: &WeightedNetwork, sheets: &[NodeSheet], shocked: &[usize], phi: f64) -> CascadeResult {
    let n = net.n();
    let adj = net.graph.adjacency();
    let mut equity = apply_initial_shock(sheets, shocked, phi);
    let mut dead = vec![false; n];
    let mut dead_count = 0;
    let mut alive_in: Vec<usize> = (0..n).map(|v| adj.in_degree(v)).collect();
    let mut trace = vec![0];
    let mut failures = Vec::new();
    let mut round = 0;

    while dead_count < n {
        let failing: Vec<usize> = (0..n).filter(|&v| !dead[v] && equity[v] < 0.0).collect();
        let mut next = equity.clone();
        for &v in &failing {
            let mut outflow = 0.0;
            if alive_in[v] > 0 {
                let share = (-equity[v]).min(sheets[v].borrowing) / alive_in[v] as f64;
                for &(u, _) in adj.creditors(v) {
                    if !dead[u] {
                        next[u] -= share;
                        outflow += share;
                    }
                }
            }
            failures.push(Failure { node: v, round, equity: equity[v], outflow });
        }
        equity = next;
        for &v in &failing {
            dead[v] = true;
        }
        dead_count += failing.len();
        round += 1;
        trace.push(dead_count);
        if failing.is_empty() {
            break;
        }
        for &v in &failing {
            for &(w, _) in adj.debtors(v) {
                alive_in[w] -= 1;
            }
        }
    }

    CascadeResult {
        final_dead: (0..n).filter(|&v| dead[v]).collect(),
        rounds: round,
        dead_trace: trace,
        equity,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::{assign_homogeneous, compute_sheets, AssetConfig};
    use crate::graph::DirectedGraph;

    fn two_node(gamma: f64) -> (WeightedNetwork, Vec<NodeSheet>) {
        let g = DirectedGraph::from_edges(2, vec![(0, 1)]).unwrap();
        let net = assign_homogeneous(g, AssetConfig::new(4.0, 1.0, gamma).unwrap()).unwrap();
        let sheets = compute_sheets(&net).unwrap();
        (net, sheets)
    }

    #[test]
    fn both_banks_fail_at_low_equity() {
        let (net, sheets) = two_node(0.25);
        let r = cascade(&net, &sheets, &[1], 0.5);
        assert_eq!(r.final_dead, vec![0, 1]);
        assert_eq!(r.rounds, 2);
        assert_eq!(r.dead_trace, vec![0, 1, 2]);
        assert!((r.equity[0] + 0.25).abs() < 1e-12);
    }

    #[test]
    fn creditor_survives_at_high_equity() {
        let (net, sheets) = two_node(0.45);
        let r = cascade(&net, &sheets, &[1], 0.5);
        assert_eq!(r.final_dead, vec![1]);
        assert!((r.equity[0] - 0.75).abs() < 1e-12);
        assert_eq!(r.rounds, 2);
    }

    #[test]
    fn no_negative_equity_is_a_fixed_point() {
        let (net, sheets) = two_node(0.25);
        let r = cascade(&net, &sheets, &[], 0.5);
        assert!(r.final_dead.is_empty());
        assert_eq!(r.rounds, 1);
    }

    #[test]
    fn failing_bank_without_creditors_passes_nothing() {
        let (net, sheets) = two_node(0.25);
        let r = cascade(&net, &sheets, &[0], 0.5);
        // Node 0 has no creditors; e_0 = 1 so c_0(0) = 0.5 - 0.5 = 0, not negative.
        assert!(r.final_dead.is_empty());
        let r = cascade(&net, &sheets, &[0], 0.6);
        assert_eq!(r.final_dead, vec![0]);
        assert_eq!(r.failures[0].outflow, 0.0);
    }
}
