//! Survival of a leaf creditor as a function of total external asset.
//!
//! On a homogeneous in-arborescence, a leaf `u` lending to a shocked bank `v`
//! with at least two creditors fails for small `E` and survives for large
//! `E`. The scan locates the switch point.

use crate::balance::{assign_homogeneous, AssetConfig};
use crate::contagion::{cascade, SheetPolicy};
use crate::graph::DirectedGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdScan {
    /// Scanned `E` values and whether the leaf survived at each.
    pub samples: Vec<(f64, bool)>,
    /// Survival never switches back to failure along the scan.
    pub monotone: bool,
    /// Bisected switch point, when the scan is monotone and both outcomes
    /// occur.
    pub threshold: Option<f64>,
    /// Final `(fails, survives)` bracket around `threshold`.
    pub bracket: Option<(f64, f64)>,
}

/// Leaf/borrower pairs `(u, v)` with `d_in(u) = 0`, edge `(u, v)`,
/// `d_in(v) > 1`, `v` shocked and `u` not shocked.
pub fn find_leaf_pairs(graph: &DirectedGraph, shocked: &[usize]) -> Vec<(usize, usize)> {
    let indeg = graph.in_degrees();
    graph
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| indeg[u] == 0 && indeg[v] > 1 && shocked.contains(&v) && !shocked.contains(&u))
        .collect()
}

fn leaf_survives(
    graph: &DirectedGraph,
    leaf: usize,
    shocked: &[usize],
    phi: f64,
    gamma: f64,
    e: f64,
    policy: SheetPolicy,
) -> Result<bool> {
    let config = AssetConfig::new(e, graph.m() as f64, gamma)?;
    let net = assign_homogeneous(graph.clone(), config)?;
    let sheets = policy.sheets(&net)?;
    let result = cascade(&net, &sheets, shocked, phi);
    Ok(result.final_dead.binary_search(&leaf).is_err())
}

/// Scans `steps` evenly spaced values of `E` over `[e_lo, e_hi]` with
/// `I = m`, then bisects the switch from failure to survival.
///
/// Under [`SheetPolicy::Strict`], an `E` that leaves some bank with
/// non-positive effective external asset is an error.
#[allow(clippy::too_many_arguments)]
pub fn threshold_scan(
    graph: &DirectedGraph,
    leaf: usize,
    shocked: &[usize],
    phi: f64,
    gamma: f64,
    (e_lo, e_hi): (f64, f64),
    steps: usize,
    policy: SheetPolicy,
) -> Result<ThresholdScan> {
    if !(e_lo >= 0.0 && e_hi > e_lo) || steps < 2 {
        return Err(Error::param("need 0 <= e_lo < e_hi and at least two scan points"));
    }
    if leaf >= graph.n() {
        return Err(Error::param(format!("leaf {leaf} is not a node")));
    }
    let mut samples = Vec::with_capacity(steps);
    for i in 0..steps {
        let e = e_lo + (e_hi - e_lo) * i as f64 / (steps - 1) as f64;
        samples.push((e, leaf_survives(graph, leaf, shocked, phi, gamma, e, policy)?));
    }
    let monotone = samples.windows(2).all(|w| !(w[0].1 && !w[1].1));
    let switch = samples.windows(2).position(|w| !w[0].1 && w[1].1);

    let (threshold, bracket) = match (monotone, switch) {
        (true, Some(i)) => {
            let (mut lo, mut hi) = (samples[i].0, samples[i + 1].0);
            while hi - lo > 1e-10 * hi.max(1.0) {
                let mid = 0.5 * (lo + hi);
                if leaf_survives(graph, leaf, shocked, phi, gamma, mid, policy)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            (Some(0.5 * (lo + hi)), Some((lo, hi)))
        }
        _ => (None, None),
    };
    Ok(ThresholdScan { samples, monotone, threshold, bracket })
}
