//! Parameter grid, replicated per-cell runs and the aggregate tables.

mod analysis;
mod grid;
mod run;
mod threshold;

pub use analysis::{
    compare_stability, connectivity, coordinated_vs_idiosyncratic, delta_ratio, ei_sensitivity, heterogeneity_effect,
    lambda_ratio, residual_instability, same_within_tolerance, window_ratio, Comparison, Dimension, EiRow,
    GroupComparison, Ratio, ResidualRow,
};
pub use grid::{enumerate_grid, Cell, Level, Mechanism, Model, ParamGrid, Topology};
pub use run::{assign_model, build_network, cell_seed, run_cell, run_cells, CellResult};
pub use threshold::{find_leaf_pairs, threshold_scan, ThresholdScan};
