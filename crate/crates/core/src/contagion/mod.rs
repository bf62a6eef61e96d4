//! Initial shocks, the insolvency cascade and the vulnerability index.
//!
//! Notation follows the balance-sheet fields: a bank `v` with equity
//! `c_v(t) < 0` at round `t` passes `min(|c_v(t)|, b_v) / d_in(v, t)` to each
//! creditor still alive at the start of round `t`, and joins the dead set at
//! `t + 1`.

mod cascade;
mod index;
pub mod reference;

pub use cascade::{cascade, CascadeResult, Failure};
pub(crate) use index::mean_std;
pub use index::{vulnerability_index, vulnerability_index_with, SheetPolicy, XiEstimate};

use rand::seq::{index as sample_index, SliceRandom};

use crate::balance::{NodeSheet, WeightedNetwork};
use crate::seed::Seed;
use crate::{round_count, Error, Result};

/// Rule that picks the initially shocked banks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShockMechanism {
    /// Uniform random subset.
    Idiosyncratic,
    /// Largest in-degrees first. Used on homogeneous networks.
    CoordinatedUnweighted,
    /// Largest weighted in-degrees (`b_v`) first. Used on heterogeneous
    /// networks.
    CoordinatedWeighted,
}

/// Fraction of banks shocked and the severity of the shock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockSpec {
    pub k_fraction: f64,
    pub phi: f64,
}

impl ShockSpec {
    pub fn new(k_fraction: f64, phi: f64) -> Result<Self> {
        if !(k_fraction > 0.0 && k_fraction <= 1.0) {
            return Err(Error::param(format!("K must lie in (0,1], got {k_fraction}")));
        }
        if !(phi > 0.0 && phi <= 1.0) {
            return Err(Error::param(format!("phi must lie in (0,1], got {phi}")));
        }
        Ok(ShockSpec { k_fraction, phi })
    }

    /// The shock must exceed the equity buffer.
    pub fn check_against(&self, gamma: f64) -> Result<()> {
        if self.phi > gamma {
            Ok(())
        } else {
            Err(Error::param(format!("phi = {} must exceed gamma = {gamma}", self.phi)))
        }
    }
}

/// Number of shocked banks, `round-half-up(K * n)`.
pub fn shock_count(k_fraction: f64, n: usize) -> Result<usize> {
    if !(k_fraction > 0.0 && k_fraction <= 1.0) {
        return Err(Error::param(format!("K must lie in (0,1], got {k_fraction}")));
    }
    match round_count(k_fraction, n) {
        0 => Err(Error::param(format!("K = {k_fraction} with n = {n} shocks no node"))),
        k => Ok(k.min(n)),
    }
}

/// Picks the shocked set. The result is sorted ascending.
///
/// Coordinated mechanisms break ties at the cut uniformly at random.
pub fn select_shock_set(
    net: &WeightedNetwork,
    mech: ShockMechanism,
    k_fraction: f64,
    seed: Seed,
) -> Result<Vec<usize>> {
    let n = net.n();
    let k = shock_count(k_fraction, n)?;
    let mut rng = seed.rng();
    let mut chosen = match mech {
        ShockMechanism::Idiosyncratic => sample_index::sample(&mut rng, n, k).into_vec(),
        ShockMechanism::CoordinatedUnweighted | ShockMechanism::CoordinatedWeighted => {
            let score: Vec<f64> = if mech == ShockMechanism::CoordinatedWeighted {
                net.weighted_in_degrees()
            } else {
                net.graph.in_degrees().into_iter().map(|d| d as f64).collect()
            };
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            // Stable sort after a shuffle: equal scores stay in random order.
            order.sort_by(|&a, &b| score[b].total_cmp(&score[a]));
            order.truncate(k);
            order
        }
    };
    chosen.sort_unstable();
    Ok(chosen)
}

/// Equity after the initial shock: `c_v - phi * e_v` on shocked banks,
/// `c_v` elsewhere.
pub fn apply_initial_shock(sheets: &[NodeSheet], shocked: &[usize], phi: f64) -> Vec<f64> {
    let mut equity: Vec<f64> = sheets.iter().map(|s| s.net_worth).collect();
    for &v in shocked {
        equity[v] = sheets[v].net_worth - phi * sheets[v].effective_external;
    }
    equity
}
