//! Asset and exposure allocation, and the balance sheets derived from it.

use rand::seq::index;

use crate::graph::DirectedGraph;
use crate::seed::Seed;
use crate::{round_count, Error, Result};

/// Totals shared by every bank in a network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssetConfig {
    /// Total external asset `E`.
    pub total_external: f64,
    /// Total interbank exposure `I`.
    pub total_interbank: f64,
    /// Equity-to-asset ratio.
    pub gamma: f64,
}

impl AssetConfig {
    /// `I` may only be zero for an edgeless graph, which the assignment
    /// functions check.
    pub fn new(total_external: f64, total_interbank: f64, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::param(format!("gamma must lie in (0,1), got {gamma}")));
        }
        if !(total_interbank.is_finite() && total_interbank >= 0.0) {
            return Err(Error::param(format!("I must be non-negative, got {total_interbank}")));
        }
        if !(total_external.is_finite() && total_external >= 0.0) {
            return Err(Error::param(format!("E must be non-negative, got {total_external}")));
        }
        Ok(AssetConfig { total_external, total_interbank, gamma })
    }

    /// Normalised totals: `I = m`, `E = ratio * m`. An edgeless graph uses one
    /// unit of scale for `E` so that it still carries external assets.
    pub fn normalized(m: usize, e_over_i: f64, gamma: f64) -> Result<Self> {
        let scale = m.max(1) as f64;
        AssetConfig::new(e_over_i * scale, m as f64, gamma)
    }
}

/// `(alpha, beta)`: a fraction `beta` of assets and exposures is concentrated
/// on a fraction `alpha` of banks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeteroParams {
    pub alpha: f64,
    pub beta: f64,
}

impl HeteroParams {
    pub const EXTREME: HeteroParams = HeteroParams { alpha: 0.1, beta: 0.95 };
    pub const MODERATE: HeteroParams = HeteroParams { alpha: 0.2, beta: 0.6 };

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0) {
            return Err(Error::param(format!("alpha and beta must lie in (0,1), got ({alpha},{beta})")));
        }
        Ok(HeteroParams { alpha, beta })
    }
}

/// A graph with edge weights `w(e)` and external-asset shares `sigma_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNetwork {
    pub graph: DirectedGraph,
    /// Parallel to `graph.edges()`.
    pub weights: Vec<f64>,
    pub sigma: Vec<f64>,
    pub config: AssetConfig,
}

impl WeightedNetwork {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// `b_v` for every node: the sum of weights of edges into `v`.
    pub fn weighted_in_degrees(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.n()];
        for (&(_, v), w) in self.graph.edges().iter().zip(&self.weights) {
            b[v] += w;
        }
        b
    }
}

/// Derived balance sheet of one bank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSheet {
    /// Interbank asset: total lent out.
    pub iota: f64,
    /// Interbank borrowing.
    pub borrowing: f64,
    /// Effective external asset `b - iota + sigma * E`.
    pub effective_external: f64,
    /// Total asset `b + sigma * E`.
    pub total_asset: f64,
    /// Net worth `gamma * total_asset`.
    pub net_worth: f64,
}

/// Equal shares: `sigma_v = 1/n`, `w(e) = I/m`.
pub fn assign_homogeneous(graph: DirectedGraph, config: AssetConfig) -> Result<WeightedNetwork> {
    let n = graph.n();
    let m = graph.m();
    if n == 0 {
        return Err(Error::structure("graph has no nodes"));
    }
    check_edge_capacity(m, config)?;
    let w = if m == 0 { 0.0 } else { config.total_interbank / m as f64 };
    Ok(WeightedNetwork { weights: vec![w; m], sigma: vec![1.0 / n as f64; n], graph, config })
}

fn check_edge_capacity(m: usize, config: AssetConfig) -> Result<()> {
    if m == 0 && config.total_interbank > 0.0 {
        return Err(Error::structure("graph has no edges to carry interbank exposure"));
    }
    if m > 0 && config.total_interbank <= 0.0 {
        return Err(Error::param("interbank exposure must be positive on a graph with edges"));
    }
    Ok(())
}

/// Concentrated allocation.
///
/// A uniform random set of `round(alpha * n)` privileged nodes shares
/// `beta * E` equally and the rest share `(1 - beta) * E`. Among the edges
/// touching a privileged node, a uniform random subset of
/// `max(1, floor(alpha * |touching|))` edges shares `beta * I`; every other
/// edge shares `(1 - beta) * I`.
pub fn assign_heterogeneous(
    graph: DirectedGraph,
    config: AssetConfig,
    hp: HeteroParams,
    seed: Seed,
) -> Result<WeightedNetwork> {
    let n = graph.n();
    let m = graph.m();
    check_edge_capacity(m, config)?;
    let privileged = round_count(hp.alpha, n);
    if privileged == 0 || privileged >= n {
        return Err(Error::param(format!(
            "alpha = {} selects {privileged} of {n} nodes; need between 1 and n-1",
            hp.alpha
        )));
    }
    let mut rng = seed.rng();
    let mut is_privileged = vec![false; n];
    let mut sigma = vec![(1.0 - hp.beta) / (n - privileged) as f64; n];
    for v in index::sample(&mut rng, n, privileged) {
        is_privileged[v] = true;
        sigma[v] = hp.beta / privileged as f64;
    }

    let touching: Vec<usize> = graph
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| is_privileged[u] || is_privileged[v])
        .map(|(i, _)| i)
        .collect();
    if touching.is_empty() {
        return Err(Error::structure("no edge touches a privileged node"));
    }
    let heavy = ((hp.alpha * touching.len() as f64 + 1e-9).floor() as usize).max(1);
    if heavy >= m {
        return Err(Error::structure("every edge would be privileged; (1-beta)I has nowhere to go"));
    }
    let i_total = config.total_interbank;
    let mut weights = vec![(1.0 - hp.beta) * i_total / (m - heavy) as f64; m];
    for k in index::sample(&mut rng, touching.len(), heavy) {
        weights[touching[k]] = hp.beta * i_total / heavy as f64;
    }
    Ok(WeightedNetwork { graph, weights, sigma, config })
}

/// Balance sheets without the positivity check on `e_v`.
pub fn sheets_unchecked(net: &WeightedNetwork) -> Vec<NodeSheet> {
    let n = net.n();
    let mut iota = vec![0.0; n];
    let mut borrowing = vec![0.0; n];
    for (&(u, v), &w) in net.graph.edges().iter().zip(&net.weights) {
        iota[u] += w;
        borrowing[v] += w;
    }
    let e = net.config.total_external;
    let gamma = net.config.gamma;
    (0..n)
        .map(|v| {
            let external = net.sigma[v] * e;
            let total_asset = borrowing[v] + external;
            NodeSheet {
                iota: iota[v],
                borrowing: borrowing[v],
                effective_external: borrowing[v] - iota[v] + external,
                total_asset,
                net_worth: gamma * total_asset,
            }
        })
        .collect()
}

/// Balance sheets, failing on the first node whose effective external asset
/// is not strictly positive.
pub fn compute_sheets(net: &WeightedNetwork) -> Result<Vec<NodeSheet>> {
    let sheets = sheets_unchecked(net);
    if let Some((node, s)) =
        sheets.iter().enumerate().find(|(_, s)| s.effective_external.is_nan() || s.effective_external <= 0.0)
    {
        return Err(Error::Validation { node, value: s.effective_external });
    }
    Ok(sheets)
}

/// Multiplies every edge weight and `E` (hence `I`) by `mu`.
pub fn scale_assets(net: &WeightedNetwork, mu: f64) -> Result<WeightedNetwork> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::param(format!("scale factor must be positive, got {mu}")));
    }
    let mut out = net.clone();
    out.weights.iter_mut().for_each(|w| *w *= mu);
    out.config.total_external *= mu;
    out.config.total_interbank *= mu;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node(e: f64, gamma: f64) -> WeightedNetwork {
        let g = DirectedGraph::from_edges(2, vec![(0, 1)]).unwrap();
        assign_homogeneous(g, AssetConfig::new(e, 1.0, gamma).unwrap()).unwrap()
    }

    #[test]
    fn homogeneous_two_node() {
        let g = DirectedGraph::from_edges(2, vec![(1, 0)]).unwrap();
        let net = assign_homogeneous(g, AssetConfig::new(2.0, 1.0, 0.1).unwrap()).unwrap();
        assert_eq!(net.sigma, vec![0.5, 0.5]);
        assert_eq!(net.weights, vec![1.0]);
    }

    #[test]
    fn homogeneous_needs_edges_for_exposure() {
        let cfg = AssetConfig::new(1.0, 1.0, 0.1).unwrap();
        assert!(matches!(assign_homogeneous(DirectedGraph::empty(3), cfg), Err(Error::Structure(_))));
    }

    #[test]
    fn sheet_gate_rejects_zero_effective_asset() {
        match compute_sheets(&two_node(2.0, 0.25)) {
            Err(Error::Validation { node, value }) => {
                assert_eq!(node, 0);
                assert_eq!(value, 0.0);
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn sheets_by_hand() {
        let s = compute_sheets(&two_node(4.0, 0.25)).unwrap();
        assert_eq!((s[0].borrowing, s[0].iota), (0.0, 1.0));
        assert_eq!((s[0].effective_external, s[0].total_asset, s[0].net_worth), (1.0, 2.0, 0.5));
        assert_eq!((s[1].borrowing, s[1].iota), (1.0, 0.0));
        assert_eq!((s[1].effective_external, s[1].total_asset, s[1].net_worth), (3.0, 3.0, 0.75));
    }

    #[test]
    fn isolated_node_sheet() {
        let net = assign_homogeneous(DirectedGraph::empty(1), AssetConfig::new(5.0, 0.0, 0.2).unwrap()).unwrap();
        let s = compute_sheets(&net).unwrap()[0];
        assert_eq!((s.iota, s.borrowing, s.effective_external, s.total_asset), (0.0, 0.0, 5.0, 5.0));
        assert!((s.net_worth - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hetero_levels_for_fifty_nodes() {
        let g = crate::generate::erdos_renyi(50, 6.0, Seed(5)).unwrap();
        let m = g.m() as f64;
        let net =
            assign_heterogeneous(g, AssetConfig::new(m, m, 0.2).unwrap(), HeteroParams::EXTREME, Seed(6)).unwrap();
        let high = net.sigma.iter().filter(|&&s| (s - 0.19).abs() < 1e-12).count();
        let low = net.sigma.iter().filter(|&&s| (s - 0.05 / 45.0).abs() < 1e-12).count();
        assert_eq!((high, low), (5, 45));
        assert!((net.sigma.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((net.weights.iter().sum::<f64>() - m).abs() < 1e-9 * m);
    }

    #[test]
    fn hetero_symmetric_case_matches_homogeneous_sigma() {
        let g = DirectedGraph::from_edges(2, vec![(0, 1), (1, 0)]).unwrap();
        let net = assign_heterogeneous(
            g,
            AssetConfig::new(2.0, 2.0, 0.2).unwrap(),
            HeteroParams::new(0.5, 0.5).unwrap(),
            Seed(1),
        )
        .unwrap();
        assert_eq!(net.sigma, vec![0.5, 0.5]);
    }

    #[test]
    fn hetero_structure_errors() {
        // Privileged node is 0 or 1: nothing touches it. Privileged node is
        // 2 or 3: the only edge would take all of I.
        let g = DirectedGraph::from_edges(4, vec![(2, 3)]).unwrap();
        let cfg = AssetConfig::new(1.0, 1.0, 0.2).unwrap();
        let hp = HeteroParams::new(0.25, 0.9).unwrap();
        for s in 0..16 {
            assert!(matches!(assign_heterogeneous(g.clone(), cfg, hp, Seed(s)), Err(Error::Structure(_))));
        }
    }

    #[test]
    fn scale_identity_and_doubling() {
        let net = two_node(4.0, 0.25);
        assert_eq!(scale_assets(&net, 1.0).unwrap(), net);
        let base = compute_sheets(&net).unwrap();
        let doubled = compute_sheets(&scale_assets(&net, 2.0).unwrap()).unwrap();
        for (a, b) in base.iter().zip(&doubled) {
            assert_eq!(b.net_worth, 2.0 * a.net_worth);
            assert_eq!(b.effective_external, 2.0 * a.effective_external);
        }
        assert!(scale_assets(&net, 0.0).is_err());
        assert!(scale_assets(&net, -1.0).is_err());
    }
}
