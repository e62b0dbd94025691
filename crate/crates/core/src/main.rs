use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use graphflux::io::export::{export_results, ExportPaths, RunReport};
use graphflux::io::generate::{generate_synthetic, SyntheticKind, SyntheticParams};
use graphflux::io::netfile::{parse_network, LoadedNetwork, NetworkFile};
use graphflux::lp::{boundedness_report, enumerate_vertices_with, solve_lp_with, LpStatus};
use graphflux::pipeline::{prepare, run_pipeline, BoxBounds, GaugePolicy, PipelineError, RunConfig};

const EXIT_MISMATCH: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_UNBOUNDED: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "graphflux", version, about = "Outward-flux maximization on networks with mixed boundary conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and print the diagnostics table.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Directory for edges.csv, nodes.csv, network.geojson and reports.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse, check structure and report boundedness without solving.
    Validate {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write a synthetic network file.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 10)]
        rows: usize,
        #[arg(long, default_value_t = 10)]
        cols: usize,
        #[arg(long, default_value_t = 20)]
        rings: usize,
        #[arg(long, default_value_t = 30)]
        spokes: usize,
        #[arg(long, default_value_t = 7)]
        count: usize,
        /// Approximate total node count for multi-component networks.
        #[arg(long, default_value_t = 600)]
        nodes: usize,
        #[arg(long, default_value_t = 1.0)]
        width_min: f64,
        #[arg(long, default_value_t = 5.0)]
        width_max: f64,
        #[arg(long, default_value_t = 10.0)]
        spacing: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the simplex optimum against vertex enumeration.
    Oracle {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Grid,
    Radial,
    Multi,
}

#[derive(Clone, Copy, ValueEnum)]
enum Gauge {
    Auto,
    Error,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    phi_max: f64,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Fix a node potential, `ID=VALUE`; repeatable.
    #[arg(long = "fix", value_parser = parse_fix)]
    fixes: Vec<(String, f64)>,
    #[arg(long, value_enum, default_value_t = Gauge::Auto)]
    gauge: Gauge,
    #[arg(long, default_value_t = 10.0)]
    gauge_value: f64,
    /// Box bounds on every control, `LO,HI`.
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
    bounds: Option<(f64, f64)>,
}

fn parse_fix(s: &str) -> Result<(String, f64), String> {
    let (id, value) = s.split_once('=').ok_or("expected ID=VALUE")?;
    let value: f64 = value.trim().parse().map_err(|e| format!("bad value {value:?}: {e}"))?;
    Ok((id.trim().to_string(), value))
}

fn parse_bounds(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if lo > hi {
        return Err(format!("lower bound {lo} exceeds upper bound {hi}"));
    }
    Ok((lo, hi))
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn pipeline_failure(e: &PipelineError) -> ExitCode {
    fail(e.exit_code() as u8, e)
}

fn load(args: &RunArgs) -> Result<(LoadedNetwork, RunConfig), ExitCode> {
    let loaded = parse_network(&args.network).map_err(|e| fail(EXIT_INPUT, e))?;
    let mut fixes = BTreeMap::new();
    for (id, value) in &args.fixes {
        let v = loaded.index_of(id).ok_or_else(|| fail(EXIT_INPUT, format!("--fix names unknown node {id:?}")))?;
        fixes.insert(v, *value);
    }
    let config = RunConfig {
        phi_max: args.phi_max,
        eps: args.eps,
        fixes,
        bounds: args.bounds.map_or(BoxBounds::None, |(lower, upper)| BoxBounds::Global { lower, upper }),
        gauge: match args.gauge {
            Gauge::Auto => GaugePolicy::AutoFix { value: args.gauge_value },
            Gauge::Error => GaugePolicy::Error,
        },
        ..RunConfig::default()
    };
    Ok((loaded, config))
}

fn solve(args: &RunArgs, out: Option<&PathBuf>) -> ExitCode {
    let (loaded, config) = match load(args) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let ids = Some(loaded.node_ids.as_slice());
    let run = match run_pipeline(&config, &loaded.network, &loaded.boundary) {
        Ok(run) => run,
        Err(e) => return pipeline_failure(&e),
    };
    print!("{}", RunReport::new(&run, &config, &loaded.network, ids).to_text());
    if let Some(dir) = out {
        match export_results(&run, &config, &loaded.network, ids, &ExportPaths::in_dir(dir)) {
            Ok(summary) => {
                if let Some(notice) = summary.notice {
                    eprintln!("note: {notice}");
                }
                for p in summary.written {
                    eprintln!("wrote {}", p.display());
                }
            }
            Err(e) => return fail(EXIT_INPUT, format!("export failed: {e}")),
        }
    }
    ExitCode::SUCCESS
}

fn validate(args: &RunArgs) -> ExitCode {
    let (loaded, config) = match load(args) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let p = match prepare(&config, &loaded.network, &loaded.boundary) {
        Ok(p) => p,
        Err(e) => return pipeline_failure(&e),
    };
    let diag = boundedness_report(&p.lp, &p.maps.qg, &p.maps.q0, &p.caps.q_max);
    println!(
        "network: {} nodes, {} edges, {} components; {} controls, {} fixed, {} interior; {} LP rows",
        loaded.network.n_nodes(),
        loaded.network.n_edges(),
        p.components.count(),
        p.partition.ctrl.len(),
        p.partition.fix.len(),
        p.partition.interior.len(),
        p.lp.n_rows()
    );
    if !p.gauge_fixed.is_empty() {
        let ids: Vec<&str> = p.gauge_fixed.iter().map(|&v| loaded.node_ids[v].as_str()).collect();
        println!("gauge fixed: {}", ids.join(", "));
    }
    println!("{}", serde_json::to_string_pretty(&diag).expect("diagnosis serializes"));
    ExitCode::SUCCESS
}

fn oracle(args: &RunArgs) -> ExitCode {
    let (loaded, config) = match load(args) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let p = match prepare(&config, &loaded.network, &loaded.boundary) {
        Ok(p) => p,
        Err(e) => return pipeline_failure(&e),
    };
    let vertices = match enumerate_vertices_with(&p.lp, config.solver.tol_feas) {
        Ok(v) => v,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let sol = match solve_lp_with(&p.lp, &config.solver) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_MISMATCH, e),
    };
    let best = vertices.iter().map(|g| p.lp.objective(g)).reduce(f64::min);
    println!("vertices: {}", vertices.len());
    println!("simplex: {:?}, objective {:.12e}", sol.status, sol.objective);
    match best {
        Some(b) => println!("enumeration minimum: {b:.12e}"),
        None => println!("enumeration: no feasible vertex"),
    }
    match (sol.status, best) {
        (LpStatus::Unbounded, _) => fail(EXIT_UNBOUNDED, "problem is unbounded; enumeration covers vertices only"),
        (LpStatus::Infeasible, None) => {
            println!("agree: infeasible");
            ExitCode::from(EXIT_INFEASIBLE)
        }
        (LpStatus::Optimal, Some(b)) if (sol.objective - b).abs() <= 1e-8 * (1.0 + b.abs()) => {
            println!("agree");
            ExitCode::SUCCESS
        }
        _ => fail(EXIT_MISMATCH, "simplex and enumeration disagree"),
    }
}

#[allow(clippy::too_many_arguments)]
fn generate(
    kind: GenKind,
    (rows, cols, rings, spokes, count, nodes): (usize, usize, usize, usize, usize, usize),
    params: SyntheticParams,
    seed: u64,
    out: Option<&PathBuf>,
) -> ExitCode {
    let kind = match kind {
        GenKind::Grid => SyntheticKind::Grid { rows, cols },
        GenKind::Radial => SyntheticKind::Radial { rings, spokes },
        GenKind::Multi => SyntheticKind::MultiComponent { count, total_nodes: nodes },
    };
    let (net, bspec) = match generate_synthetic(kind, &params, seed) {
        Ok(v) => v,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let json = NetworkFile::from_network(&net, &bspec, None).to_json();
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json) {
                return fail(EXIT_INPUT, format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{json}"),
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Solve { run, out } => solve(run, out.as_ref()),
        Command::Validate { run } => validate(run),
        Command::Oracle { run } => oracle(run),
        Command::Gen { kind, rows, cols, rings, spokes, count, nodes, width_min, width_max, spacing, seed, out } => {
            let params = SyntheticParams { width_min: *width_min, width_max: *width_max, spacing: *spacing };
            generate(*kind, (*rows, *cols, *rings, *spokes, *count, *nodes), params, *seed, out.as_ref())
        }
    }
}
