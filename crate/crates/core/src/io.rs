//! Plain-text formats: edge lists, weighted networks, grid files, CSV tables
//! and two-column series.
//!
//! Every file written here starts with one `#` line naming the tool version,
//! the root seed and the grid fingerprint. Readers skip `#` lines.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::balance::{AssetConfig, WeightedNetwork};
use crate::contagion::CascadeResult;
use crate::graph::DirectedGraph;
use crate::seed::Seed;
use crate::sweep::{
    connectivity, coordinated_vs_idiosyncratic, delta_ratio, ei_sensitivity, heterogeneity_effect, lambda_ratio,
    residual_instability, Cell, CellResult, GroupComparison, Level, Mechanism, Model, ParamGrid, Topology,
};
use crate::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CELLS_HEADER: &str = "topology,model,mechanism,n,e_over_i,phi,gamma,k,xi_mean,xi_std,invalid";

pub const CASCADE_HEADER: &str = "seed,n,topology,mechanism,k,phi,gamma,e_over_i,dead,rounds";

/// Provenance line written first in every output file.
pub fn provenance(seed: Seed, grid_hash: Option<u64>) -> String {
    match grid_hash {
        Some(h) => format!("# finstab {TOOL_VERSION} seed={seed} grid={h:016x}"),
        None => format!("# finstab {TOOL_VERSION} seed={seed} grid=none"),
    }
}

/// Seed and grid fingerprint from a provenance line, if `text` starts with
/// one.
pub fn parse_provenance(text: &str) -> Option<(Seed, Option<u64>)> {
    let line = text.lines().next()?.strip_prefix("# finstab ")?;
    let mut seed = None;
    let mut grid = None;
    for field in line.split_whitespace() {
        if let Some(s) = field.strip_prefix("seed=") {
            seed = s.parse().ok().map(Seed);
        } else if let Some(g) = field.strip_prefix("grid=") {
            grid = u64::from_str_radix(g, 16).ok();
        }
    }
    Some((seed?, grid))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| parse_err(line, format!("cannot parse '{s}'")))
}

/// `n m` followed by one `src dst` line per edge.
pub fn edge_list_to_string(g: &DirectedGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<DirectedGraph> {
    let mut lines = data_lines(text);
    let (ln, head) = lines.next().ok_or_else(|| parse_err(0, "empty edge list"))?;
    let mut parts = head.split_whitespace();
    let n: usize = parse_num(ln, parts.next().unwrap_or(""))?;
    let m: usize = parse_num(ln, parts.next().unwrap_or(""))?;
    let mut edges = Vec::with_capacity(m);
    for (ln, line) in lines {
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() < 2 {
            return Err(parse_err(ln, "expected 'src dst'"));
        }
        edges.push((parse_num(ln, cols[0])?, parse_num(ln, cols[1])?));
    }
    if edges.len() != m {
        return Err(parse_err(ln, format!("header announces {m} edges, found {}", edges.len())));
    }
    DirectedGraph::from_edges(n, edges)
}

/// Weighted network: `n m E gamma`, then `src dst w` per edge, then an
/// `id sigma` header and one line per node.
pub fn network_to_string(net: &WeightedNetwork) -> String {
    let g = &net.graph;
    let mut out = format!("{} {} {} {}\n", g.n(), g.m(), net.config.total_external, net.config.gamma);
    for (&(u, v), w) in g.edges().iter().zip(&net.weights) {
        let _ = writeln!(out, "{u} {v} {w}");
    }
    out.push_str("id sigma\n");
    for (i, s) in net.sigma.iter().enumerate() {
        let _ = writeln!(out, "{i} {s}");
    }
    out
}

pub fn parse_network(text: &str) -> Result<WeightedNetwork> {
    let lines: Vec<(usize, &str)> = data_lines(text).collect();
    let (ln, head) = *lines.first().ok_or_else(|| parse_err(0, "empty network file"))?;
    let cols: Vec<&str> = head.split_whitespace().collect();
    if cols.len() != 4 {
        return Err(parse_err(ln, "expected 'n m E gamma'"));
    }
    let n: usize = parse_num(ln, cols[0])?;
    let m: usize = parse_num(ln, cols[1])?;
    let e: f64 = parse_num(ln, cols[2])?;
    let gamma: f64 = parse_num(ln, cols[3])?;
    if lines.len() != 2 + m + n {
        return Err(parse_err(ln, format!("expected {m} edges and {n} nodes")));
    }
    let mut edges = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for &(ln, line) in &lines[1..=m] {
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 3 {
            return Err(parse_err(ln, "expected 'src dst w'"));
        }
        edges.push((parse_num(ln, cols[0])?, parse_num(ln, cols[1])?));
        let w: f64 = parse_num(ln, cols[2])?;
        if !(w > 0.0 && w.is_finite()) {
            return Err(parse_err(ln, format!("edge weight must be positive, got {w}")));
        }
        weights.push(w);
    }
    let (ln, table) = lines[m + 1];
    if table.split_whitespace().collect::<Vec<_>>() != ["id", "sigma"] {
        return Err(parse_err(ln, "expected the 'id sigma' node table"));
    }
    let mut sigma = vec![f64::NAN; n];
    for &(ln, line) in &lines[m + 2..] {
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 2 {
            return Err(parse_err(ln, "expected 'id sigma'"));
        }
        let id: usize = parse_num(ln, cols[0])?;
        let s: f64 = parse_num(ln, cols[1])?;
        match sigma.get_mut(id) {
            Some(slot) if slot.is_nan() && s >= 0.0 => *slot = s,
            _ => return Err(parse_err(ln, format!("bad or repeated node {id}"))),
        }
    }
    let total_sigma: f64 = sigma.iter().sum();
    if (total_sigma - 1.0).abs() > 1e-9 {
        return Err(parse_err(ln, format!("sigma sums to {total_sigma}, not 1")));
    }
    let graph = DirectedGraph::from_edges(n, edges)?;
    let config = AssetConfig::new(e, weights.iter().sum(), gamma)?;
    Ok(WeightedNetwork { graph, weights, sigma, config })
}

fn list<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Grid file text, `key = v1,v2,...` per line.
pub fn grid_to_string(grid: &ParamGrid) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "topologies = {}", list(&grid.topologies));
    let _ = writeln!(out, "models = {}", list(&grid.models));
    let _ = writeln!(out, "mechanisms = {}", list(&grid.mechanisms));
    let _ = writeln!(out, "n = {}", list(&grid.n_values));
    let _ = writeln!(out, "e_over_i = {}", list(&grid.e_over_i));
    let _ = writeln!(out, "phi = {}", list(&grid.phi));
    let _ = writeln!(out, "k = {}", list(&grid.k));
    if let Some(g) = &grid.gamma {
        let _ = writeln!(out, "gamma = {}", list(g));
    }
    let _ = writeln!(out, "replicates = {}", grid.replicates);
    out
}

fn parse_values<T: std::str::FromStr<Err = Error>>(line: usize, raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| parse_err(line, e.to_string())))
        .collect()
}

/// Parses a grid file. `preset = full|reduced` supplies defaults for keys
/// that are not given; without a preset every dimension must be listed.
pub fn parse_grid(text: &str) -> Result<ParamGrid> {
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (ln, line) in data_lines(text) {
        let (key, value) = line.split_once('=').ok_or_else(|| parse_err(ln, "expected 'key = values'"))?;
        let key = key.trim().to_ascii_lowercase();
        if entries.insert(key.clone(), (ln, value.trim().to_string())).is_some() {
            return Err(parse_err(ln, format!("duplicate key '{key}'")));
        }
    }
    if entries.is_empty() {
        return Err(Error::param("grid file defines no keys"));
    }
    let preset = match entries.remove("preset") {
        None => None,
        Some((_, p)) if p == "full" => Some(ParamGrid::full()),
        Some((_, p)) if p == "reduced" => Some(ParamGrid::reduced()),
        Some((ln, p)) => return Err(parse_err(ln, format!("unknown preset '{p}'"))),
    };
    let mut take = |key: &str| entries.remove(key);
    let missing = |key: &str| Error::param(format!("grid file is missing '{key}'"));

    macro_rules! field {
        ($key:literal, $ty:ty, $field:ident) => {
            match take($key) {
                Some((ln, raw)) => parse_values::<$ty>(ln, &raw)?,
                None => preset.as_ref().map(|p| p.$field.clone()).ok_or_else(|| missing($key))?,
            }
        };
    }
    let topologies = field!("topologies", Topology, topologies);
    let models = field!("models", Model, models);
    let mechanisms = field!("mechanisms", Mechanism, mechanisms);
    let e_over_i = field!("e_over_i", Level, e_over_i);
    let phi = field!("phi", Level, phi);
    let k = field!("k", Level, k);
    let n_values = match take("n") {
        Some((ln, raw)) => raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| parse_num::<usize>(ln, s))
            .collect::<Result<Vec<_>>>()?,
        None => preset.as_ref().map(|p| p.n_values.clone()).ok_or_else(|| missing("n"))?,
    };
    let gamma = match take("gamma") {
        Some((ln, raw)) => Some(parse_values::<Level>(ln, &raw)?),
        None => preset.as_ref().and_then(|p| p.gamma.clone()),
    };
    let replicates = match take("replicates") {
        Some((ln, raw)) => parse_num(ln, &raw)?,
        None => preset.as_ref().map_or(10, |p| p.replicates),
    };
    if let Some((key, (ln, _))) = entries.into_iter().next() {
        return Err(parse_err(ln, format!("unknown key '{key}'")));
    }
    let grid = ParamGrid { topologies, models, mechanisms, n_values, e_over_i, phi, k, gamma, replicates };
    grid.validate()?;
    Ok(grid)
}

fn opt_num(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn cell_row(r: &CellResult) -> String {
    let c = &r.cell;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        c.topology,
        c.model,
        c.mechanism,
        c.n,
        c.e_over_i,
        c.phi,
        c.gamma,
        c.k,
        opt_num(r.xi_mean),
        opt_num(r.xi_std),
        r.invalid
    )
}

pub fn cells_to_csv(results: &[CellResult], seed: Seed, grid_hash: u64) -> String {
    let mut out = provenance(seed, Some(grid_hash));
    out.push('\n');
    out.push_str(CELLS_HEADER);
    out.push('\n');
    for r in results {
        out.push_str(&cell_row(r));
        out.push('\n');
    }
    out
}

pub fn parse_cells_csv(text: &str) -> Result<Vec<CellResult>> {
    let mut lines = data_lines(text);
    match lines.next() {
        Some((_, h)) if h == CELLS_HEADER => {}
        Some((ln, _)) => return Err(parse_err(ln, format!("expected header '{CELLS_HEADER}'"))),
        None => return Err(parse_err(0, "empty cells file")),
    }
    let opt = |ln: usize, s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            parse_num(ln, s).map(Some)
        }
    };
    lines
        .map(|(ln, line)| {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 11 {
                return Err(parse_err(ln, format!("expected 11 fields, found {}", f.len())));
            }
            let lvl = |s: &str| s.parse::<Level>().map_err(|e| parse_err(ln, e.to_string()));
            let label = |e: Error| parse_err(ln, e.to_string());
            Ok(CellResult {
                cell: Cell {
                    topology: f[0].parse().map_err(label)?,
                    model: f[1].parse().map_err(label)?,
                    mechanism: f[2].parse().map_err(label)?,
                    n: parse_num(ln, f[3])?,
                    e_over_i: lvl(f[4])?,
                    phi: lvl(f[5])?,
                    gamma: lvl(f[6])?,
                    k: lvl(f[7])?,
                },
                xi_mean: opt(ln, f[8])?,
                xi_std: opt(ln, f[9])?,
                invalid: parse_num(ln, f[10])?,
            })
        })
        .collect()
}

/// Fields of one simulated cascade, for the single-run CSV row.
#[derive(Debug, Clone)]
pub struct CascadeRow<'a> {
    pub seed: Seed,
    pub topology: &'a str,
    pub mechanism: &'a str,
    pub k: f64,
    pub phi: f64,
    pub gamma: f64,
    pub e_over_i: f64,
}

pub fn cascade_row(row: &CascadeRow<'_>, n: usize, result: &CascadeResult) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        row.seed,
        n,
        row.topology,
        row.mechanism,
        row.k,
        row.phi,
        row.gamma,
        row.e_over_i,
        result.dead_count(),
        result.rounds
    )
}

/// Analysis tables written next to `cells.csv`, as `(file name, contents)`.
pub fn analysis_tables(results: &[CellResult], seed: Seed, grid_hash: u64) -> Result<Vec<(String, String)>> {
    let head = provenance(seed, Some(grid_hash));
    let mut files = Vec::new();

    let comparison_rows = |out: &mut String, prefix: &str, rows: &[GroupComparison]| {
        for r in rows {
            let c = r.comparison;
            let parts = r.label.replace('/', ",");
            let pct = c.percent.map(|p| format!("{p:.2}")).unwrap_or_default();
            let _ = writeln!(out, "{prefix}{parts},{pct},{},{}", c.pairs, c.excluded);
        }
    };

    let mut het = format!("{head}\nmodel,topology,mechanism,percent,pairs,excluded\n");
    for model in [Model::Het1095, Model::Het2060] {
        let rows = heterogeneity_effect(results, model)?;
        comparison_rows(&mut het, &format!("{model},"), &rows);
    }
    files.push(("heterogeneity.csv".to_string(), het));

    let mut conn = format!("{head}\nsparse,dense,model,mechanism,percent,pairs,excluded\n");
    for (sparse, dense) in
        [(Topology::Er3, Topology::Er6), (Topology::Sf3, Topology::Sf6), (Topology::Arborescence, Topology::Sf3)]
    {
        let rows = connectivity(results, sparse, dense)?;
        comparison_rows(&mut conn, &format!("{sparse},{dense},"), &rows);
    }
    files.push(("connectivity.csv".to_string(), conn));

    let mut cvi = format!("{head}\ntopology,model,percent,pairs,excluded\n");
    let both: Vec<CellResult> = {
        // Only cells present under both mechanisms can be compared.
        let mut seen: BTreeMap<Cell, usize> = BTreeMap::new();
        for r in results {
            *seen.entry(Cell { mechanism: Mechanism::Coordinated, ..r.cell }).or_default() += 1;
        }
        results.iter().filter(|r| seen[&Cell { mechanism: Mechanism::Coordinated, ..r.cell }] == 2).copied().collect()
    };
    comparison_rows(&mut cvi, "", &coordinated_vs_idiosyncratic(&both)?);
    files.push(("coordinated_vs_idiosyncratic.csv".to_string(), cvi));

    let mut residual =
        format!("{head}\nphi,gamma,topology,model,mechanism,n,cells,excluded,xi_lt_0.05,xi_lt_0.1,xi_lt_0.2\n");
    let phis: BTreeSet<Level> = results.iter().map(|r| r.cell.phi).collect();
    for phi in phis {
        for gap in [50, 100] {
            if phi.0 <= gap {
                continue;
            }
            let gamma = Level(phi.0 - gap);
            for row in residual_instability(results, phi, gamma, &[0.05, 0.1, 0.2])? {
                let p: Vec<String> =
                    row.percent_below.iter().map(|x| x.map(|x| format!("{x:.2}")).unwrap_or_default()).collect();
                let _ = writeln!(
                    residual,
                    "{phi},{gamma},{},{},{},{},{},{},{}",
                    row.topology,
                    row.model,
                    row.mechanism,
                    row.n,
                    row.cells,
                    row.excluded,
                    p.join(",")
                );
            }
        }
    }
    files.push(("residual_instability.csv".to_string(), residual));

    let mut ei = format!("{head}\ntopology,model,mechanism,mean_change,groups\n");
    for row in ei_sensitivity(results) {
        let _ = writeln!(ei, "{},{},{},{:.4},{}", row.topology, row.model, row.mechanism, row.mean_change, row.groups);
    }
    files.push(("ei_sensitivity.csv".to_string(), ei));

    let mut lambda = format!("{head}\ntopology,model,mechanism,n,phi,e_over_i,k,lambda,reference\n");
    for (key, series) in series_along(results, |c| c.gamma, |c| Cell { gamma: Level(0), ..*c }) {
        if let Ok(r) = lambda_ratio(&series) {
            let _ = writeln!(
                lambda,
                "{},{},{},{},{},{},{},{},{:.4}",
                key.topology,
                key.model,
                key.mechanism,
                key.n,
                key.phi,
                key.e_over_i,
                key.k,
                r.value.map(|v| format!("{v:.4}")).unwrap_or_default(),
                r.reference
            );
        }
    }
    files.push(("lambda.csv".to_string(), lambda));

    let mut delta = format!("{head}\ntopology,model,mechanism,n,phi,gamma,k,delta,reference\n");
    let half_phi = results.iter().filter(|r| (2 * r.cell.gamma.0).abs_diff(r.cell.phi.0) <= 50);
    let half_phi: Vec<CellResult> = half_phi.copied().collect();
    for (key, series) in series_along(&half_phi, |c| c.e_over_i, |c| Cell { e_over_i: Level(0), ..*c }) {
        if let Ok(r) = delta_ratio(&series) {
            let _ = writeln!(
                delta,
                "{},{},{},{},{},{},{},{},{:.4}",
                key.topology,
                key.model,
                key.mechanism,
                key.n,
                key.phi,
                key.gamma,
                key.k,
                r.value.map(|v| format!("{v:.4}")).unwrap_or_default(),
                r.reference
            );
        }
    }
    files.push(("delta.csv".to_string(), delta));

    Ok(files)
}

/// Groups valid results by `key` and returns each group's `(axis, xi)`
/// points sorted by the axis.
fn series_along(
    results: &[CellResult],
    axis: impl Fn(&Cell) -> Level,
    key: impl Fn(&Cell) -> Cell,
) -> BTreeMap<Cell, Vec<(f64, f64)>> {
    let mut groups: BTreeMap<Cell, Vec<(Level, f64)>> = BTreeMap::new();
    for r in results {
        if let Some(x) = r.xi_mean {
            groups.entry(key(&r.cell)).or_default().push((axis(&r.cell), x));
        }
    }
    groups
        .into_iter()
        .map(|(k, mut pts)| {
            pts.sort_by_key(|p| p.0);
            (k, pts.into_iter().map(|(l, x)| (l.value(), x)).collect())
        })
        .collect()
}

/// Free axis of a plotted series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeAxis {
    Gamma,
    EOverI,
}

impl std::str::FromStr for FreeAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma" => Ok(FreeAxis::Gamma),
            "e_over_i" | "ei" => Ok(FreeAxis::EOverI),
            _ => Err(Error::param(format!("free axis must be 'gamma' or 'e_over_i', got '{s}'"))),
        }
    }
}

/// Values fixed when slicing a series out of sweep results. `None` leaves
/// an axis unconstrained.
#[derive(Debug, Clone, Default)]
pub struct SeriesQuery {
    pub topology: Option<Topology>,
    pub model: Option<Model>,
    pub mechanism: Option<Mechanism>,
    pub n: Option<usize>,
    pub e_over_i: Option<Level>,
    pub phi: Option<Level>,
    pub gamma: Option<Level>,
    pub k: Option<Level>,
}

impl SeriesQuery {
    fn matches(&self, c: &Cell, free: FreeAxis) -> bool {
        self.topology.is_none_or(|t| t == c.topology)
            && self.model.is_none_or(|m| m == c.model)
            && self.mechanism.is_none_or(|m| m == c.mechanism)
            && self.n.is_none_or(|n| n == c.n)
            && self.phi.is_none_or(|p| p == c.phi)
            && self.k.is_none_or(|k| k == c.k)
            && (free == FreeAxis::EOverI || self.e_over_i.is_none_or(|e| e == c.e_over_i))
            && (free == FreeAxis::Gamma || self.gamma.is_none_or(|g| g == c.gamma))
    }
}

/// `(x, xi)` points per (topology, model, mechanism).
pub type SeriesMap = BTreeMap<(Topology, Model, Mechanism), Vec<(Level, f64)>>;

/// One `(x, xi)` series per (topology, model, mechanism) in the slice.
///
/// Fails when the slice is empty or when an unfixed axis leaves several
/// points at the same `x`.
pub fn emit_series(results: &[CellResult], query: &SeriesQuery, free: FreeAxis) -> Result<SeriesMap> {
    let mut out = SeriesMap::new();
    for r in results.iter().filter(|r| query.matches(&r.cell, free)) {
        if let Some(xi) = r.xi_mean {
            let c = r.cell;
            let x = match free {
                FreeAxis::Gamma => c.gamma,
                FreeAxis::EOverI => c.e_over_i,
            };
            out.entry((c.topology, c.model, c.mechanism)).or_default().push((x, xi));
        }
    }
    if out.is_empty() {
        let avail = |f: &dyn Fn(&Cell) -> String| {
            let set: BTreeSet<String> = results.iter().map(|r| f(&r.cell)).collect();
            set.into_iter().collect::<Vec<_>>().join(",")
        };
        return Err(Error::param(format!(
            "empty slice; available n={} phi={} k={} gamma={} e_over_i={}",
            avail(&|c| c.n.to_string()),
            avail(&|c| c.phi.to_string()),
            avail(&|c| c.k.to_string()),
            avail(&|c| c.gamma.to_string()),
            avail(&|c| c.e_over_i.to_string()),
        )));
    }
    for ((t, m, mech), pts) in out.iter_mut() {
        pts.sort_by_key(|p| p.0);
        if pts.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::param(format!(
                "slice {t}/{m}/{mech} has repeated x values; fix n, phi, k and the other axis"
            )));
        }
    }
    Ok(out)
}

pub fn series_to_string(points: &[(Level, f64)], seed: Seed, grid_hash: Option<u64>) -> String {
    let mut out = provenance(seed, grid_hash);
    out.push('\n');
    for (x, y) in points {
        let _ = writeln!(out, "{x} {y}");
    }
    out
}
