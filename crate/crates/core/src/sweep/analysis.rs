//! Aggregates over sweep results. All of them are order-independent: inputs
//! are keyed and grouped through sorted maps.

use std::collections::{BTreeMap, BTreeSet};

use crate::contagion::mean_std;
use crate::{Error, Result};

use super::grid::{Cell, Level, Mechanism, Model, Topology};
use super::run::CellResult;

/// Two indices closer than `1 / (3n)` are treated as equal.
pub fn same_within_tolerance(a: f64, b: f64, n: usize) -> bool {
    (a - b).abs() <= tolerance(n)
}

// The slack absorbs rounding when a difference sits exactly on the boundary.
fn tolerance(n: usize) -> f64 {
    1.0 / (3.0 * n as f64) + 1e-12
}

/// Grid axis ignored when pairing two result sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Topology,
    Model,
    Mechanism,
}

fn masked(cell: &Cell, dims: &[Dimension]) -> Cell {
    let mut c = *cell;
    for d in dims {
        match d {
            Dimension::Topology => c.topology = Topology::Arborescence,
            Dimension::Model => c.model = Model::Homogeneous,
            Dimension::Mechanism => c.mechanism = Mechanism::Coordinated,
        }
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    /// Share of pairs with `xi_a >= xi_b - 1/(3n)`, in percent. `None`
    /// when no pair has valid results on both sides.
    pub percent: Option<f64>,
    pub pairs: usize,
    /// Pairs skipped because one side had no valid replicate.
    pub excluded: usize,
}

fn index_by(results: &[CellResult], dims: &[Dimension], side: &str) -> Result<BTreeMap<Cell, Option<f64>>> {
    let mut map = BTreeMap::new();
    for r in results {
        if map.insert(masked(&r.cell, dims), r.xi_mean).is_some() {
            return Err(Error::Pairing(format!("{side} has two cells that pair as {}", masked(&r.cell, dims).key())));
        }
    }
    Ok(map)
}

/// Percentage of paired cells in which `a` is at least as vulnerable as `b`
/// (within tolerance). Cells are paired on every grid coordinate except
/// `dims`; both sides must cover exactly the same paired keys.
pub fn compare_stability(a: &[CellResult], b: &[CellResult], dims: &[Dimension]) -> Result<Comparison> {
    let left = index_by(a, dims, "left")?;
    let right = index_by(b, dims, "right")?;
    if left.len() != right.len() || left.keys().zip(right.keys()).any(|(x, y)| x != y) {
        let missing =
            left.keys().find(|k| !right.contains_key(*k)).or_else(|| right.keys().find(|k| !left.contains_key(*k)));
        return Err(Error::Pairing(format!(
            "result sets do not pair up ({} vs {} cells{})",
            left.len(),
            right.len(),
            missing.map(|k| format!(", e.g. {}", k.key())).unwrap_or_default()
        )));
    }
    let mut hits = 0usize;
    let mut pairs = 0usize;
    let mut excluded = 0usize;
    for (key, xa) in &left {
        match (xa, right[key]) {
            (Some(xa), Some(xb)) => {
                pairs += 1;
                if *xa >= xb - tolerance(key.n) {
                    hits += 1;
                }
            }
            _ => excluded += 1,
        }
    }
    let percent = (pairs > 0).then(|| 100.0 * hits as f64 / pairs as f64);
    Ok(Comparison { percent, pairs, excluded })
}

/// One row of a comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupComparison {
    /// Row label, e.g. `er6/het-1095`.
    pub label: String,
    pub comparison: Comparison,
}

fn select<'a>(results: &'a [CellResult], pred: impl Fn(&Cell) -> bool + 'a) -> Vec<CellResult> {
    results.iter().filter(|r| pred(&r.cell)).copied().collect()
}

fn present<T: Ord + Copy>(results: &[CellResult], f: impl Fn(&Cell) -> T) -> BTreeSet<T> {
    results.iter().map(|r| f(&r.cell)).collect()
}

/// Heterogeneous `model` versus homogeneous, one row per (topology,
/// mechanism): percentage of cells where the heterogeneous network is at
/// least as vulnerable.
pub fn heterogeneity_effect(results: &[CellResult], model: Model) -> Result<Vec<GroupComparison>> {
    let mut rows = Vec::new();
    for topology in present(results, |c| c.topology) {
        for mechanism in present(results, |c| c.mechanism) {
            let het = select(results, |c| c.topology == topology && c.mechanism == mechanism && c.model == model);
            let homog = select(results, |c| {
                c.topology == topology && c.mechanism == mechanism && c.model == Model::Homogeneous
            });
            if het.is_empty() || homog.is_empty() {
                continue;
            }
            rows.push(GroupComparison {
                label: format!("{topology}/{mechanism}"),
                comparison: compare_stability(&het, &homog, &[Dimension::Model])?,
            });
        }
    }
    Ok(rows)
}

/// Percentage of cells where `sparse` is at least as stable as `dense`,
/// one row per (model, mechanism).
pub fn connectivity(results: &[CellResult], sparse: Topology, dense: Topology) -> Result<Vec<GroupComparison>> {
    let mut rows = Vec::new();
    for model in present(results, |c| c.model) {
        for mechanism in present(results, |c| c.mechanism) {
            let pick =
                |t: Topology| select(results, move |c| c.topology == t && c.model == model && c.mechanism == mechanism);
            let (s, d) = (pick(sparse), pick(dense));
            if s.is_empty() || d.is_empty() {
                continue;
            }
            rows.push(GroupComparison {
                label: format!("{model}/{mechanism}"),
                comparison: compare_stability(&d, &s, &[Dimension::Topology])?,
            });
        }
    }
    Ok(rows)
}

/// Percentage of cells with `xi_coordinated >= xi_idiosyncratic` (within
/// tolerance), one row per (topology, model).
pub fn coordinated_vs_idiosyncratic(results: &[CellResult]) -> Result<Vec<GroupComparison>> {
    let mut rows = Vec::new();
    for topology in present(results, |c| c.topology) {
        for model in present(results, |c| c.model) {
            let pick =
                |m: Mechanism| select(results, move |c| c.topology == topology && c.model == model && c.mechanism == m);
            let (coord, idio) = (pick(Mechanism::Coordinated), pick(Mechanism::Idiosyncratic));
            if coord.is_empty() && idio.is_empty() {
                continue;
            }
            rows.push(GroupComparison {
                label: format!("{topology}/{model}"),
                comparison: compare_stability(&coord, &idio, &[Dimension::Mechanism])?,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRow {
    pub topology: Topology,
    pub model: Model,
    pub mechanism: Mechanism,
    pub n: usize,
    /// Cells with a valid index.
    pub cells: usize,
    pub excluded: usize,
    /// Percentage of cells with `xi < threshold`, one per threshold; `None`
    /// when the group has no valid cell.
    pub percent_below: Vec<Option<f64>>,
}

/// Share of cells at the given `(phi, gamma)` whose index stays below each
/// threshold, grouped by (topology, model, mechanism, n).
pub fn residual_instability(
    results: &[CellResult],
    phi: Level,
    gamma: Level,
    thresholds: &[f64],
) -> Result<Vec<ResidualRow>> {
    if gamma.0 + 50 != phi.0 && gamma.0 + 100 != phi.0 {
        return Err(Error::param(format!("gamma = {gamma} must be phi - 0.05 or phi - 0.10 (phi = {phi})")));
    }
    // Valid indices and excluded-cell count per group.
    type Groups = BTreeMap<(Topology, Model, Mechanism, usize), (Vec<f64>, usize)>;
    let mut groups = Groups::new();
    for r in results.iter().filter(|r| r.cell.phi == phi && r.cell.gamma == gamma) {
        let c = r.cell;
        let entry = groups.entry((c.topology, c.model, c.mechanism, c.n)).or_default();
        match r.xi_mean {
            Some(x) => entry.0.push(x),
            None => entry.1 += 1,
        }
    }
    Ok(groups
        .into_iter()
        .map(|((topology, model, mechanism, n), (xs, excluded))| {
            let percent_below = thresholds
                .iter()
                .map(|&t| {
                    (!xs.is_empty()).then(|| 100.0 * xs.iter().filter(|&&x| x < t).count() as f64 / xs.len() as f64)
                })
                .collect();
            ResidualRow { topology, model, mechanism, n, cells: xs.len(), excluded, percent_below }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EiRow {
    pub topology: Topology,
    pub model: Model,
    pub mechanism: Mechanism,
    /// Mean over (n, phi, gamma, K) of `max_{E/I} xi - min_{E/I} xi`.
    pub mean_change: f64,
    pub groups: usize,
}

/// Sensitivity of the index to the external-to-interbank ratio.
pub fn ei_sensitivity(results: &[CellResult]) -> Vec<EiRow> {
    let mut by_axis: BTreeMap<Cell, Vec<(Level, f64)>> = BTreeMap::new();
    for r in results {
        if let Some(x) = r.xi_mean {
            let key = Cell { e_over_i: Level(0), ..r.cell };
            by_axis.entry(key).or_default().push((r.cell.e_over_i, x));
        }
    }
    let mut changes: BTreeMap<(Topology, Model, Mechanism), Vec<f64>> = BTreeMap::new();
    for (key, series) in by_axis {
        if series.len() < 2 {
            continue;
        }
        let max = series.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let min = series.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        changes.entry((key.topology, key.model, key.mechanism)).or_default().push(max - min);
    }
    changes
        .into_iter()
        .map(|((topology, model, mechanism), deltas)| EiRow {
            topology,
            model,
            mechanism,
            mean_change: mean_std(&deltas).0,
            groups: deltas.len(),
        })
        .collect()
}

/// Share of the total change of a series that happens inside a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratio {
    /// `(max - min inside [lo, hi]) / (max - min overall)`; `None` for a
    /// flat series.
    pub value: Option<f64>,
    /// What a uniformly changing series would give: window width over axis
    /// width.
    pub reference: f64,
}

/// Window ratio over `(x, y)` points. Both window endpoints must be on the
/// axis.
pub fn window_ratio(series: &[(f64, f64)], lo: f64, hi: f64) -> Result<Ratio> {
    let on_axis = |x: f64| series.iter().any(|p| (p.0 - x).abs() < 1e-9);
    if !on_axis(lo) || !on_axis(hi) {
        return Err(Error::param(format!("window endpoints {lo} and {hi} must both be axis points")));
    }
    let range = |pts: &mut dyn Iterator<Item = f64>| {
        pts.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)))
    };
    let (y_min, y_max) = range(&mut series.iter().map(|p| p.1));
    let (w_min, w_max) = range(&mut series.iter().filter(|p| p.0 >= lo - 1e-9 && p.0 <= hi + 1e-9).map(|p| p.1));
    let (x_min, x_max) = range(&mut series.iter().map(|p| p.0));
    let total = y_max - y_min;
    Ok(Ratio { value: (total > 0.0).then(|| (w_max - w_min) / total), reference: (hi - lo) / (x_max - x_min) })
}

/// Fraction of the change of the index over the γ axis that falls within
/// `0.05 <= gamma <= 0.2`.
pub fn lambda_ratio(xi_by_gamma: &[(f64, f64)]) -> Result<Ratio> {
    window_ratio(xi_by_gamma, 0.05, 0.2)
}

/// Fraction of the change of the index over the E/I axis that falls within
/// `0.5 <= E/I <= 1`.
pub fn delta_ratio(xi_by_ei: &[(f64, f64)]) -> Result<Ratio> {
    window_ratio(xi_by_ei, 0.5, 1.0)
}
