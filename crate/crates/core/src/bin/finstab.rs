//! `finstab` command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use finstab::contagion::{cascade, select_shock_set, SheetPolicy, ShockSpec};
use finstab::io::{self, CascadeRow, FreeAxis, SeriesQuery};
use finstab::par::{set_threads, Execution};
use finstab::sweep::{
    assign_model, build_network, cell_seed, enumerate_grid, run_cells, Cell, Level, Mechanism, Model, ParamGrid,
    Topology,
};
use finstab::{Error, Result, Seed};

#[derive(Parser)]
#[command(name = "finstab", version, about = "Insolvency cascades on interbank networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SeedArg {
    /// Root seed
    #[arg(long, env = "FINSTAB_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Write one random graph as an edge list
    Generate {
        #[arg(long)]
        topology: Topology,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        seed: SeedArg,
        /// Output file; standard output when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one cascade and print its CSV row
    Simulate {
        /// Required unless --fixture is given
        #[arg(long, required_unless_present = "fixture")]
        topology: Option<Topology>,
        #[arg(long, default_value = "homog")]
        model: Model,
        #[arg(long, default_value = "coord")]
        mech: Mechanism,
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Total external over total interbank asset
        #[arg(long, default_value = "1")]
        ei: Level,
        #[arg(long, default_value = "0.5")]
        phi: Level,
        #[arg(long, default_value = "0.25")]
        gamma: Level,
        /// Fraction of banks shocked
        #[arg(long, default_value = "0.1")]
        k: Level,
        #[command(flatten)]
        seed: SeedArg,
        /// Edge-list file to use instead of a generated graph
        #[arg(long)]
        fixture: Option<PathBuf>,
        /// Simulate even when some bank has non-positive effective external asset
        #[arg(long)]
        permissive: bool,
        /// Print the column header before the row
        #[arg(long)]
        header: bool,
    },
    /// Run every cell of a parameter grid
    Sweep {
        /// Grid file; the reduced grid when omitted
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Overrides the grid's replicate count
        #[arg(long)]
        replicates: Option<usize>,
        #[command(flatten)]
        seed: SeedArg,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads, 0 for one per core
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Exclude replicates with non-positive effective external asset
        #[arg(long)]
        strict: bool,
    },
    /// Recompute the analysis tables from a cells file
    Analyze {
        cells: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Write plot series (x, xi) from a cells file
    Series {
        cells: PathBuf,
        /// Axis along which each series varies
        #[arg(long, default_value = "gamma")]
        free: FreeAxis,
        #[arg(long)]
        topology: Option<Topology>,
        #[arg(long)]
        model: Option<Model>,
        #[arg(long)]
        mech: Option<Mechanism>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        ei: Option<Level>,
        #[arg(long)]
        phi: Option<Level>,
        #[arg(long)]
        gamma: Option<Level>,
        #[arg(long)]
        k: Option<Level>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn generate(topology: Topology, n: usize, seed: Seed, out: Option<&Path>) -> Result<()> {
    let cell = Cell {
        topology,
        model: Model::Homogeneous,
        mechanism: Mechanism::Coordinated,
        n,
        e_over_i: Level(1000),
        phi: Level(500),
        gamma: Level(250),
        k: Level(100),
    };
    let graph = build_network(&cell, seed)?.graph;
    let text = format!("{}\n{}", io::provenance(seed, None), io::edge_list_to_string(&graph));
    match out {
        Some(path) => write_file(path, &text),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    topology: Option<Topology>,
    model: Model,
    mech: Mechanism,
    n: usize,
    ei: Level,
    phi: Level,
    gamma: Level,
    k: Level,
    seed: Seed,
    fixture: Option<&Path>,
    policy: SheetPolicy,
    header: bool,
) -> Result<()> {
    let spec = ShockSpec::new(k.value(), phi.value())?;
    spec.check_against(gamma.value())?;
    let (net, trial, label) = match fixture {
        Some(path) => {
            let graph = io::parse_edge_list(&read_file(path)?)?;
            let trial = seed.derive("fixture");
            let net = assign_model(graph, model, ei.value(), gamma.value(), trial.derive("hetero"))?;
            (net, trial, "fixture".to_string())
        }
        None => {
            let topology =
                topology.ok_or_else(|| Error::Parameter("--topology is required without --fixture".into()))?;
            let cell = Cell { topology, model, mechanism: mech, n, e_over_i: ei, phi, gamma, k };
            // Same network and shock as replicate 0 of the matching sweep cell.
            let trial = cell_seed(seed, &cell).child(0);
            (build_network(&cell, trial.derive("network"))?, trial, topology.to_string())
        }
    };
    let shocked = select_shock_set(&net, mech.shock_mechanism(model), spec.k_fraction, trial.derive("shock"))?;
    let sheets = policy.sheets(&net)?;
    let result = cascade(&net, &sheets, &shocked, spec.phi);
    let row = CascadeRow {
        seed,
        topology: &label,
        mechanism: mech.as_str(),
        k: k.value(),
        phi: phi.value(),
        gamma: gamma.value(),
        e_over_i: ei.value(),
    };
    if header {
        println!("{}", io::CASCADE_HEADER);
    }
    println!("{}", io::cascade_row(&row, net.n(), &result));
    Ok(())
}

fn write_tables(results: &[finstab::sweep::CellResult], seed: Seed, hash: u64, out: &Path) -> Result<()> {
    for (name, text) in io::analysis_tables(results, seed, hash)? {
        write_file(&out.join(name), &text)?;
    }
    Ok(())
}

fn sweep(
    grid: Option<&Path>,
    replicates: Option<usize>,
    seed: Seed,
    out: &Path,
    jobs: usize,
    policy: SheetPolicy,
) -> Result<()> {
    let mut grid = match grid {
        Some(path) => io::parse_grid(&read_file(path)?)?,
        None => ParamGrid::reduced(),
    };
    if let Some(r) = replicates {
        grid.replicates = r;
    }
    grid.validate()?;
    let cells = enumerate_grid(&grid)?;
    set_threads(jobs);
    create_dir(out)?;
    eprintln!("sweeping {} cells x {} replicates", cells.len(), grid.replicates);
    let step = (cells.len() / 100).max(1);
    let progress = |done: usize, total: usize| {
        if done.is_multiple_of(step) || done == total {
            eprintln!("{done}/{total}");
        }
    };
    let results = run_cells(Execution::Parallel, &cells, grid.replicates, seed, policy, &progress)?;
    let hash = grid.fingerprint();
    write_file(&out.join("cells.csv"), &io::cells_to_csv(&results, seed, hash))?;
    write_tables(&results, seed, hash, out)
}

fn load_cells(path: &Path) -> Result<(Vec<finstab::sweep::CellResult>, Seed, Option<u64>)> {
    let text = read_file(path)?;
    let (seed, hash) = io::parse_provenance(&text).unwrap_or((Seed(0), None));
    Ok((io::parse_cells_csv(&text)?, seed, hash))
}

fn analyze(cells: &Path, out: &Path) -> Result<()> {
    let (results, seed, hash) = load_cells(cells)?;
    create_dir(out)?;
    write_tables(&results, seed, hash.unwrap_or(0), out)
}

fn series(cells: &Path, query: &SeriesQuery, free: FreeAxis, out: &Path) -> Result<()> {
    let (results, seed, hash) = load_cells(cells)?;
    let all = io::emit_series(&results, query, free)?;
    create_dir(out)?;
    let axis = match free {
        FreeAxis::Gamma => "gamma",
        FreeAxis::EOverI => "e_over_i",
    };
    for ((t, m, mech), points) in &all {
        let path = out.join(format!("series_{axis}_{t}_{m}_{mech}.txt"));
        write_file(&path, &io::series_to_string(points, seed, hash))?;
        eprintln!("{}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { topology, n, seed, out } => generate(topology, n, Seed(seed.seed), out.as_deref()),
        Command::Simulate { topology, model, mech, n, ei, phi, gamma, k, seed, fixture, permissive, header } => {
            let policy = if permissive { SheetPolicy::Permissive } else { SheetPolicy::Strict };
            simulate(topology, model, mech, n, ei, phi, gamma, k, Seed(seed.seed), fixture.as_deref(), policy, header)
        }
        Command::Sweep { grid, replicates, seed, out, jobs, strict } => {
            let policy = if strict { SheetPolicy::Strict } else { SheetPolicy::Permissive };
            sweep(grid.as_deref(), replicates, Seed(seed.seed), &out, jobs, policy)
        }
        Command::Analyze { cells, out } => analyze(&cells, &out),
        Command::Series { cells, free, topology, model, mech, n, ei, phi, gamma, k, out } => {
            let query = SeriesQuery { topology, model, mechanism: mech, n, e_over_i: ei, phi, gamma, k };
            series(&cells, &query, free, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
