use crate::balance::{compute_sheets, sheets_unchecked, NodeSheet, WeightedNetwork};
use crate::par::Execution;
use crate::seed::Seed;
use crate::{Error, Result};

use super::{cascade, select_shock_set, ShockMechanism, ShockSpec};

/// What to do with a network whose balance sheets have `e_v <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SheetPolicy {
    /// Reject the network; the trial counts as invalid.
    Strict,
    /// Simulate it anyway. The shock then raises the equity of such banks.
    #[default]
    Permissive,
}

impl SheetPolicy {
    pub fn sheets(self, net: &WeightedNetwork) -> Result<Vec<NodeSheet>> {
        match self {
            SheetPolicy::Strict => compute_sheets(net),
            SheetPolicy::Permissive => Ok(sheets_unchecked(net)),
        }
    }
}

/// Mean and spread of `|dead| / n` over independent trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiEstimate {
    pub mean: f64,
    /// Sample standard deviation; zero for a single valid trial.
    pub std: f64,
    pub valid: usize,
    pub invalid: usize,
}

/// Estimates the vulnerability index by drawing a fresh network and a fresh
/// shocked set per trial.
///
/// Trial `i` uses `seed.child(i)`; its network comes from
/// `factory(trial.derive("network"))` and its shocked set from
/// `trial.derive("shock")`. Networks the factory cannot build (structure or
/// validation errors) and, under [`SheetPolicy::Strict`], networks with
/// non-positive effective external assets count as invalid trials.
pub fn vulnerability_index<F>(
    factory: F,
    mech: ShockMechanism,
    spec: ShockSpec,
    trials: usize,
    seed: Seed,
    policy: SheetPolicy,
) -> Result<XiEstimate>
where
    F: Fn(Seed) -> Result<WeightedNetwork> + Sync + Send,
{
    vulnerability_index_with(Execution::Parallel, factory, mech, spec, trials, seed, policy)
}

/// [`vulnerability_index`] with an explicit execution path. The result does
/// not depend on `exec`.
pub fn vulnerability_index_with<F>(
    exec: Execution,
    factory: F,
    mech: ShockMechanism,
    spec: ShockSpec,
    trials: usize,
    seed: Seed,
    policy: SheetPolicy,
) -> Result<XiEstimate>
where
    F: Fn(Seed) -> Result<WeightedNetwork> + Sync + Send,
{
    if trials == 0 {
        return Err(Error::param("at least one trial is required"));
    }
    let outcomes = exec.map_indexed(trials, |i| -> Result<Option<(usize, usize)>> {
        let trial = seed.child(i as u64);
        let net = match factory(trial.derive("network")) {
            Ok(net) => net,
            Err(Error::Structure(_) | Error::Validation { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        spec.check_against(net.config.gamma)?;
        let sheets = match policy.sheets(&net) {
            Ok(s) => s,
            Err(Error::Validation { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let shocked = select_shock_set(&net, mech, spec.k_fraction, trial.derive("shock"))?;
        let result = cascade(&net, &sheets, &shocked, spec.phi);
        Ok(Some((result.dead_count(), net.n())))
    });

    let mut counts = Vec::with_capacity(trials);
    for outcome in outcomes {
        if let Some(c) = outcome? {
            counts.push(c);
        }
    }
    if counts.is_empty() {
        return Err(Error::Structure(format!("all {trials} trials produced invalid networks")));
    }
    let values: Vec<f64> = counts.iter().map(|&(d, n)| d as f64 / n as f64).collect();
    let (mut mean, _) = mean_std(&values);
    // With a common n the mean is an exact ratio of integers.
    if counts.iter().all(|c| c.1 == counts[0].1) {
        let dead: usize = counts.iter().map(|c| c.0).sum();
        mean = dead as f64 / (counts[0].1 * counts.len()) as f64;
    }
    let std = sample_std(&values, mean);
    Ok(XiEstimate { mean, std, valid: counts.len(), invalid: trials - counts.len() })
}

pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (mean, sample_std(values, mean))
}

fn sample_std(values: &[f64], mean: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}
