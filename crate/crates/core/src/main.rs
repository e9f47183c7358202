use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nkcoop::harness::{
    build_network, render, run_experiment, ExperimentKind, ExperimentOutput, ExperimentSpec,
    Format, Topology, DEFAULT_LANDSCAPE_SEED,
};
use nkcoop::landscape::{enumerate_maxima, generate_landscape};
use nkcoop::network::{network_stats, Network};
use nkcoop::search::{run_search, SearchConfig, DEFAULT_MAX_SWEEPS};
use nkcoop::{Error, Result};

#[derive(Parser)]
#[command(
    name = "nkcoop",
    version,
    about = "Imitative search on NK landscapes over social networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Landscape generation and analysis
    Landscape {
        #[command(subcommand)]
        action: LandscapeCmd,
    },
    /// Network construction and statistics
    Network {
        #[command(subcommand)]
        action: NetworkCmd,
    },
    /// Single searches
    Search {
        #[command(subcommand)]
        action: SearchCmd,
    },
    /// Parameter sweeps
    Experiment {
        #[command(subcommand)]
        action: ExperimentCmd,
    },
}

#[derive(Args)]
struct LandscapeArgs {
    #[arg(long = "N", default_value_t = 16)]
    n: usize,
    #[arg(long = "K", default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_LANDSCAPE_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum LandscapeCmd {
    /// Count maxima and report relative-fitness statistics (JSON)
    Stats(LandscapeArgs),
    /// Write the component tables as JSON
    Export(LandscapeArgs),
}

#[derive(Args)]
struct NetworkArgs {
    #[arg(long, default_value = "hierarchical")]
    topology: String,
    #[arg(long = "L", default_value_t = 125)]
    l: usize,
    /// Link budget; defaults to the hierarchical count for L = 5^n
    #[arg(long = "E")]
    e: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum NetworkCmd {
    /// Write a network as a sorted edge list
    Build {
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree histogram and clustering (JSON)
    Stats {
        #[command(flatten)]
        net: NetworkArgs,
        /// Read the network from an edge list instead of building it
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SearchCmd {
    /// Run one search and print its result (JSON)
    Run {
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(long = "N", default_value_t = 16)]
        n: usize,
        #[arg(long = "K", default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_LANDSCAPE_SEED)]
        landscape_seed: u64,
        /// Imitation propensity of every agent
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Propensity of the main hub
        #[arg(long)]
        pstar: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
        max_sweeps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Run an experiment described by a config file and/or flags
    Run(ExperimentArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// Flat `key = value` config file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    topology: Option<String>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long = "E")]
    e: Option<usize>,
    /// Background propensity; also the grid of p-kinds when --grid is absent
    #[arg(long)]
    p: Option<f64>,
    /// Hub propensity; the grid of p*-kinds when --grid is absent
    #[arg(long)]
    pstar: Option<f64>,
    /// Comma list or start:stop:step
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Integer or "per-run"
    #[arg(long)]
    landscape_seed: Option<String>,
    #[arg(long)]
    fresh_network: Option<bool>,
    #[arg(long)]
    perturb_top_k: Option<usize>,
    /// Number, or "none" for no cap
    #[arg(long)]
    max_sweeps: Option<String>,
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_output(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.into(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build(args: &NetworkArgs) -> Result<Network> {
    let topology: Topology = args.topology.parse()?;
    let spec = ExperimentSpec {
        agents: args.l,
        links: args.e,
        ..Default::default()
    };
    build_network(topology, args.l, spec.link_budget(args.l)?, args.seed)
}

fn experiment_spec(args: &ExperimentArgs) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
        spec.apply_config(&text)?;
    }
    let flags: [(&str, Option<String>); 13] = [
        ("kind", args.kind.clone()),
        ("topology", args.topology.clone()),
        ("N", args.n.map(|v| v.to_string())),
        ("K", args.k.map(|v| v.to_string())),
        ("L", args.l.map(|v| v.to_string())),
        ("E", args.e.map(|v| v.to_string())),
        ("p_background", args.p.map(|v| v.to_string())),
        ("grid", args.grid.clone()),
        ("runs", args.runs.map(|v| v.to_string())),
        ("base_seed", args.seed.map(|v| v.to_string())),
        ("landscape_seed", args.landscape_seed.clone()),
        (
            "fresh_network_per_run",
            args.fresh_network.map(|v| v.to_string()),
        ),
        ("perturb_top_k", args.perturb_top_k.map(|v| v.to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            spec.set(key, &v)?;
        }
    }
    if let Some(v) = &args.max_sweeps {
        spec.set("max_sweeps", v)?;
    }
    if args.grid.is_none() && spec.grid.is_empty() {
        match spec.kind {
            ExperimentKind::SweepP | ExperimentKind::RhVsP => {
                spec.grid = args.p.into_iter().collect()
            }
            ExperimentKind::SweepPstar | ExperimentKind::RhVsPstar => {
                spec.grid = args.pstar.into_iter().collect()
            }
            _ => {}
        }
    }
    Ok(spec)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Landscape { action } => match action {
            LandscapeCmd::Stats(a) => {
                let l = generate_landscape(a.n, a.k, a.seed)?;
                let stats = enumerate_maxima(&l)?;
                write_output(
                    &(serde_json::to_string_pretty(&stats)? + "\n"),
                    a.out.as_deref(),
                )
            }
            LandscapeCmd::Export(a) => {
                let l = generate_landscape(a.n, a.k, a.seed)?;
                write_output(&(l.to_json()? + "\n"), a.out.as_deref())
            }
        },
        Command::Network { action } => match action {
            NetworkCmd::Build { net, out } => {
                write_output(&build(&net)?.to_edge_list(), out.as_deref())
            }
            NetworkCmd::Stats { net, edges, out } => {
                let network = match edges {
                    Some(path) => Network::load_edge_list(&path, None)?,
                    None => build(&net)?,
                };
                let stats = network_stats(&network);
                write_output(
                    &(serde_json::to_string_pretty(&stats)? + "\n"),
                    out.as_deref(),
                )
            }
        },
        Command::Search { action } => match action {
            SearchCmd::Run {
                net,
                n,
                k,
                landscape_seed,
                p,
                pstar,
                max_sweeps,
                out,
            } => {
                let landscape = generate_landscape(n, k, landscape_seed)?;
                let network = build(&net)?;
                let mut propensities = vec![p; network.node_count()];
                if let Some(ps) = pstar {
                    propensities[network.main_hub()] = ps;
                }
                let config = SearchConfig::new(&landscape, &network, propensities, net.seed)?
                    .with_max_sweeps(Some(max_sweeps));
                let result = run_search(&config)?;
                write_output(
                    &(serde_json::to_string_pretty(&result)? + "\n"),
                    out.as_deref(),
                )
            }
        },
        Command::Experiment {
            action: ExperimentCmd::Run(args),
        } => {
            let spec = experiment_spec(&args)?;
            let format: Format = args.format.parse()?;
            let text = match run_experiment(&spec)? {
                ExperimentOutput::Sweep(rows) => render(&rows, format)?,
                other => serde_json::to_string_pretty(&other)? + "\n",
            };
            write_output(&text, args.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
