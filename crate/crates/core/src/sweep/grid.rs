use std::fmt;
use std::str::FromStr;

use crate::contagion::ShockMechanism;
use crate::generate::SfParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Topology {
    Arborescence,
    Er3,
    Er6,
    Sf3,
    Sf6,
}

impl Topology {
    pub const ALL: [Topology; 5] = [Topology::Arborescence, Topology::Er3, Topology::Er6, Topology::Sf3, Topology::Sf6];

    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Arborescence => "arb",
            Topology::Er3 => "er3",
            Topology::Er6 => "er6",
            Topology::Sf3 => "sf3",
            Topology::Sf6 => "sf6",
        }
    }

    pub(crate) fn sf_params(self) -> Option<SfParams> {
        match self {
            Topology::Sf3 => Some(SfParams::AVG_DEGREE_3),
            Topology::Sf6 => Some(SfParams::AVG_DEGREE_6),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    Homogeneous,
    /// `(alpha, beta) = (0.1, 0.95)`
    Het1095,
    /// `(alpha, beta) = (0.2, 0.6)`
    Het2060,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Homogeneous, Model::Het1095, Model::Het2060];

    pub fn as_str(self) -> &'static str {
        match self {
            Model::Homogeneous => "homog",
            Model::Het1095 => "het-1095",
            Model::Het2060 => "het-2060",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mechanism {
    Coordinated,
    Idiosyncratic,
}

impl Mechanism {
    pub const ALL: [Mechanism; 2] = [Mechanism::Coordinated, Mechanism::Idiosyncratic];

    pub fn as_str(self) -> &'static str {
        match self {
            Mechanism::Coordinated => "coord",
            Mechanism::Idiosyncratic => "idio",
        }
    }

    /// Coordinated shocks rank by plain in-degree on homogeneous networks and
    /// by weighted in-degree otherwise.
    pub fn shock_mechanism(self, model: Model) -> ShockMechanism {
        match (self, model) {
            (Mechanism::Idiosyncratic, _) => ShockMechanism::Idiosyncratic,
            (Mechanism::Coordinated, Model::Homogeneous) => ShockMechanism::CoordinatedUnweighted,
            (Mechanism::Coordinated, _) => ShockMechanism::CoordinatedWeighted,
        }
    }
}

macro_rules! impl_label {
    ($ty:ty, $what:literal) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                Self::ALL
                    .into_iter()
                    .find(|x| x.as_str() == s.trim())
                    .ok_or_else(|| Error::param(format!("unknown {} '{s}'", $what)))
            }
        }
    };
}

impl_label!(Topology, "topology");
impl_label!(Model, "model");
impl_label!(Mechanism, "mechanism");

/// A grid coordinate in thousandths, so that grid values compare exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level(pub u32);

impl Level {
    pub fn from_f64(x: f64) -> Result<Level> {
        let scaled = x * 1000.0;
        let rounded = scaled.round();
        if !x.is_finite() || x < 0.0 || (scaled - rounded).abs() > 1e-6 || rounded > u32::MAX as f64 {
            return Err(Error::param(format!("{x} is not a non-negative multiple of 0.001")));
        }
        Ok(Level(rounded as u32))
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 1000.0
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0 / 1000;
        let frac = self.0 % 1000;
        if frac == 0 {
            write!(f, "{whole}")
        } else {
            let digits = format!("{frac:03}");
            write!(f, "{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Level> {
        let x: f64 = s.trim().parse().map_err(|_| Error::param(format!("not a number: '{s}'")))?;
        Level::from_f64(x)
    }
}

/// One point of the parameter grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub topology: Topology,
    pub model: Model,
    pub mechanism: Mechanism,
    pub n: usize,
    pub e_over_i: Level,
    pub phi: Level,
    pub gamma: Level,
    pub k: Level,
}

impl Cell {
    /// Canonical key; also the label hashed into the cell's seed.
    pub fn key(&self) -> String {
        format!(
            "topology={};model={};mechanism={};n={};e_over_i={};phi={};gamma={};k={}",
            self.topology, self.model, self.mechanism, self.n, self.e_over_i, self.phi, self.gamma, self.k
        )
    }
}

/// Grid description. Each γ axis is `0.05, 0.10, ..., phi - 0.05` unless
/// `gamma` lists explicit values, which are then filtered to `gamma < phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    pub topologies: Vec<Topology>,
    pub models: Vec<Model>,
    pub mechanisms: Vec<Mechanism>,
    pub n_values: Vec<usize>,
    pub e_over_i: Vec<Level>,
    pub phi: Vec<Level>,
    pub k: Vec<Level>,
    pub gamma: Option<Vec<Level>>,
    pub replicates: usize,
}

fn levels(thousandths: impl IntoIterator<Item = u32>) -> Vec<Level> {
    thousandths.into_iter().map(Level).collect()
}

impl ParamGrid {
    /// Full parameter space: 737,100 cells.
    pub fn full() -> Self {
        ParamGrid {
            topologies: Topology::ALL.to_vec(),
            models: Model::ALL.to_vec(),
            mechanisms: Mechanism::ALL.to_vec(),
            n_values: vec![50, 100, 300],
            e_over_i: levels((1..=14).map(|i| 250 * i)),
            phi: levels((5..=9).map(|i| 100 * i)),
            k: levels((1..=9).map(|i| 100 * i)),
            gamma: None,
            replicates: 10,
        }
    }

    /// Desk-scale grid: n = 50, four E/I values, three K values, two shock
    /// severities.
    pub fn reduced() -> Self {
        ParamGrid {
            n_values: vec![50],
            e_over_i: levels([250, 1000, 2000, 3500]),
            phi: levels([500, 800]),
            k: levels([100, 500, 900]),
            ..ParamGrid::full()
        }
    }

    pub fn gammas_for(&self, phi: Level) -> Vec<Level> {
        match &self.gamma {
            Some(explicit) => explicit.iter().copied().filter(|g| g.0 > 0 && *g < phi).collect(),
            None => (1..).map(|i| Level(50 * i)).take_while(|g| g.0 + 50 <= phi.0).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("topologies", self.topologies.is_empty()),
            ("models", self.models.is_empty()),
            ("mechanisms", self.mechanisms.is_empty()),
            ("n", self.n_values.is_empty()),
            ("e_over_i", self.e_over_i.is_empty()),
            ("phi", self.phi.is_empty()),
            ("k", self.k.is_empty()),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::param(format!("grid dimension '{name}' is empty")));
        }
        if self.replicates == 0 {
            return Err(Error::param("replicates must be at least 1"));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(Error::param(format!("n = {n} is too small")));
        }
        if let Some(p) = self.phi.iter().find(|p| p.0 == 0 || p.0 > 1000) {
            return Err(Error::param(format!("phi = {p} outside (0,1]")));
        }
        if let Some(k) = self.k.iter().find(|k| k.0 == 0 || k.0 > 1000) {
            return Err(Error::param(format!("K = {k} outside (0,1]")));
        }
        if self.phi.iter().all(|&p| self.gammas_for(p).is_empty()) {
            return Err(Error::param("no gamma value lies below any phi"));
        }
        Ok(())
    }

    /// Stable 64-bit fingerprint of the grid contents (FNV-1a over the
    /// canonical text form).
    pub fn fingerprint(&self) -> u64 {
        let text = crate::io::grid_to_string(self);
        text.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
    }
}

/// Cartesian product in the order topology, model, mechanism, n, E/I, phi,
/// gamma, K.
pub fn enumerate_grid(grid: &ParamGrid) -> Result<Vec<Cell>> {
    grid.validate()?;
    let mut cells = Vec::new();
    for &topology in &grid.topologies {
        for &model in &grid.models {
            for &mechanism in &grid.mechanisms {
                for &n in &grid.n_values {
                    for &e_over_i in &grid.e_over_i {
                        for &phi in &grid.phi {
                            for gamma in grid.gammas_for(phi) {
                                for &k in &grid.k {
                                    cells.push(Cell { topology, model, mechanism, n, e_over_i, phi, gamma, k });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(cells)
}
