//! Insolvency cascades on interbank networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] and [`generate`]: directed graphs and the random topologies
//!   (Erdős–Rényi, directed scale-free, in-arborescence).
//! * [`balance`]: distribution of external assets and interbank exposures,
//!   and the per-bank balance sheets derived from them.
//! * [`contagion`]: shock selection, the discrete-time insolvency cascade and
//!   the vulnerability index estimator.
//! * [`sweep`]: the parameter grid, per-cell replication and every aggregate
//!   table computed from a sweep.
//! * [`io`]: text formats (edge lists, grid files, CSV) shared by the CLI.
//!
//! Everything random is driven by [`Seed`], so identical seeds reproduce
//! identical outputs regardless of thread count.

pub mod balance;
pub mod contagion;
mod error;
pub mod generate;
pub mod graph;
pub mod io;
pub mod par;
pub mod seed;
pub mod sweep;

pub use error::{Error, Result};
pub use graph::DirectedGraph;
pub use seed::Seed;

/// Round-half-up of `fraction * n`, tolerant of representation error
/// (`0.15 * 10` is `1.4999999999999998` in binary).
pub(crate) fn round_count(fraction: f64, n: usize) -> usize {
    (fraction * n as f64 + 0.5 + 1e-9).floor() as usize
}
