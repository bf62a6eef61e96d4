use std::sync::atomic::{AtomicUsize, Ordering};

use crate::balance::{assign_heterogeneous, assign_homogeneous, AssetConfig, HeteroParams, WeightedNetwork};
use crate::contagion::{vulnerability_index_with, SheetPolicy, ShockSpec};
use crate::generate::{erdos_renyi, in_arborescence, scale_free};
use crate::graph::DirectedGraph;
use crate::par::Execution;
use crate::seed::Seed;
use crate::{Error, Result};

use super::grid::{Cell, Model, Topology};

/// Averaged outcome of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellResult {
    pub cell: Cell,
    /// `None` when every replicate was invalid.
    pub xi_mean: Option<f64>,
    pub xi_std: Option<f64>,
    /// Replicates excluded from the average.
    pub invalid: usize,
}

/// Seed of a cell: the root seed hashed with the canonical cell key, so it
/// does not depend on enumeration order or scheduling.
pub fn cell_seed(root: Seed, cell: &Cell) -> Seed {
    root.derive(&cell.key())
}

pub(crate) fn generate_graph(topology: Topology, n: usize, seed: Seed) -> Result<DirectedGraph> {
    match topology {
        Topology::Arborescence => in_arborescence(n, seed),
        Topology::Er3 => erdos_renyi(n, 3.0, seed),
        Topology::Er6 => erdos_renyi(n, 6.0, seed),
        Topology::Sf3 | Topology::Sf6 => scale_free(n, topology.sf_params().expect("scale-free topology"), seed),
    }
}

/// Weights `graph` under `model` with `I = m` and `E = (E/I) * m`.
pub fn assign_model(
    graph: DirectedGraph,
    model: Model,
    e_over_i: f64,
    gamma: f64,
    seed: Seed,
) -> Result<WeightedNetwork> {
    let config = AssetConfig::normalized(graph.m(), e_over_i, gamma)?;
    match model {
        Model::Homogeneous => assign_homogeneous(graph, config),
        Model::Het1095 => assign_heterogeneous(graph, config, HeteroParams::EXTREME, seed),
        Model::Het2060 => assign_heterogeneous(graph, config, HeteroParams::MODERATE, seed),
    }
}

/// One replicate network for `cell`, with `I = m` and `E = (E/I) * m`.
pub fn build_network(cell: &Cell, seed: Seed) -> Result<WeightedNetwork> {
    let graph = generate_graph(cell.topology, cell.n, seed.derive("graph"))?;
    assign_model(graph, cell.model, cell.e_over_i.value(), cell.gamma.value(), seed.derive("hetero"))
}

pub(crate) fn run_cell_on<F>(
    exec: Execution,
    cell: &Cell,
    replicates: usize,
    root: Seed,
    policy: SheetPolicy,
    factory: F,
) -> Result<CellResult>
where
    F: Fn(Seed) -> Result<WeightedNetwork> + Sync + Send,
{
    if replicates == 0 {
        return Err(Error::param("replicates must be at least 1"));
    }
    let spec = ShockSpec::new(cell.k.value(), cell.phi.value())?;
    spec.check_against(cell.gamma.value())?;
    let mech = cell.mechanism.shock_mechanism(cell.model);
    match vulnerability_index_with(exec, factory, mech, spec, replicates, cell_seed(root, cell), policy) {
        Ok(est) => Ok(CellResult { cell: *cell, xi_mean: Some(est.mean), xi_std: Some(est.std), invalid: est.invalid }),
        Err(Error::Structure(_)) => Ok(CellResult { cell: *cell, xi_mean: None, xi_std: None, invalid: replicates }),
        Err(e) => Err(e),
    }
}

/// Runs `replicates` independent networks for one cell and averages
/// `|dead| / n`.
pub fn run_cell(cell: &Cell, replicates: usize, root: Seed, policy: SheetPolicy) -> Result<CellResult> {
    run_cell_on(Execution::Parallel, cell, replicates, root, policy, |s| build_network(cell, s))
}

/// Runs every cell. Output order matches `cells`; values do not depend on
/// `exec` or thread count. `progress(done, total)` is called after each
/// finished cell, possibly from several threads.
pub fn run_cells(
    exec: Execution,
    cells: &[Cell],
    replicates: usize,
    root: Seed,
    policy: SheetPolicy,
    progress: &(dyn Fn(usize, usize) + Sync),
) -> Result<Vec<CellResult>> {
    let done = AtomicUsize::new(0);
    let total = cells.len();
    exec.map_indexed(total, |i| {
        let cell = &cells[i];
        let r = run_cell_on(exec, cell, replicates, root, policy, |s| build_network(cell, s));
        progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
        r
    })
    .into_iter()
    .collect()
}
