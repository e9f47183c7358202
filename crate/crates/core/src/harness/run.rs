//! Experiment execution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{hierarchy_levels, ExperimentKind, ExperimentSpec, LandscapeSeed, Topology};
use crate::analytics::{aggregate, analytic_independent_cost};
use crate::error::{Error, Result};
use crate::landscape::{enumerate_maxima, generate_landscape, Landscape, LandscapeStats};
use crate::network::{
    build_hierarchical, build_random, build_scale_free, network_stats, Network, NetworkStats,
};
use crate::rng::{derive_seed, mix64};
use crate::search::{run_search, SearchConfig, SearchResult};

/// One aggregated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    /// Mean cost over halted runs (NaN when none halted).
    pub mean_cost: f64,
    pub std_error: f64,
    /// `L` times the fraction of halted runs won by the main hub.
    pub r_h: Option<f64>,
    /// Runs executed, halted or not.
    pub n_runs: usize,
    /// Runs that hit the sweep cap; excluded from the mean.
    pub n_excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeRecord {
    pub seed: u64,
    #[serde(flatten)]
    pub stats: LandscapeStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkRecord {
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub stats: NetworkStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExperimentOutput {
    Sweep(Vec<SweepRow>),
    Landscapes(Vec<LandscapeRecord>),
    Networks(Vec<NetworkRecord>),
}

/// Builds a network of the given topology.
pub fn build_network(topology: Topology, nodes: usize, links: usize, seed: u64) -> Result<Network> {
    match topology {
        Topology::Hierarchical => {
            let levels = hierarchy_levels(nodes).ok_or_else(|| {
                Error::param(format!("hierarchical network needs L = 5^n, got {nodes}"))
            })?;
            let net = build_hierarchical(levels)?;
            if net.edge_count() != links {
                return Err(Error::param(format!(
                    "hierarchical network on {nodes} nodes has {} links, not {links}",
                    net.edge_count()
                )));
            }
            Ok(net)
        }
        Topology::ScaleFree => build_scale_free(nodes, links, seed),
        Topology::Random => build_random(nodes, links, seed),
    }
}

/// Seed of the network shared by all runs when networks are not redrawn.
fn shared_network_seed(base_seed: u64) -> u64 {
    mix64(base_seed ^ 0x6e65_7477_6f72_6b00)
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    match spec.kind {
        ExperimentKind::LandscapeStats => landscape_records(spec).map(ExperimentOutput::Landscapes),
        ExperimentKind::NetworkStats => network_records(spec).map(ExperimentOutput::Networks),
        _ => run_sweep(spec).map(ExperimentOutput::Sweep),
    }
}

/// Runs a search or analytic experiment, one row per grid value.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    match spec.kind {
        ExperimentKind::AnalyticCurve => spec
            .grid
            .iter()
            .map(|&l| {
                Ok(SweepRow {
                    x: l,
                    mean_cost: analytic_independent_cost(spec.n, l as u64)?,
                    std_error: 0.0,
                    r_h: None,
                    n_runs: 0,
                    n_excluded: 0,
                })
            })
            .collect(),
        kind if kind.is_search() => {
            let fixed = match spec.landscape_seed {
                LandscapeSeed::Fixed(seed) => {
                    let l = generate_landscape(spec.n, spec.k, seed)?;
                    // warm the caches before sharing across workers
                    l.global_maximum()?;
                    Some(l)
                }
                LandscapeSeed::PerRun => None,
            };
            spec.grid
                .iter()
                .enumerate()
                .map(|(g, &x)| grid_point(spec, fixed.as_ref(), g, x))
                .collect()
        }
        kind => Err(Error::param(format!(
            "{kind:?} does not produce sweep rows"
        ))),
    }
}

struct RunOutcome {
    result: SearchResult,
    hub: usize,
}

fn grid_point(
    spec: &ExperimentSpec,
    fixed: Option<&Landscape>,
    grid_index: usize,
    x: f64,
) -> Result<SweepRow> {
    let nodes = if spec.kind == ExperimentKind::SweepL {
        x as usize
    } else {
        spec.agents
    };
    let links = spec.link_budget(nodes)?;
    let shared = if spec.topology.is_stochastic() && spec.fresh_network_per_run {
        None
    } else {
        Some(build_network(
            spec.topology,
            nodes,
            links,
            shared_network_seed(spec.base_seed),
        )?)
    };

    let outcomes: Vec<RunOutcome> = (0..spec.runs)
        .into_par_iter()
        .map(|run| {
            let seed = derive_seed(spec.base_seed, grid_index as u64, run as u64);
            one_run(spec, fixed, shared.as_ref(), nodes, links, x, seed).map_err(|e| Error::Run {
                seed,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let costs: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.result.halted)
        .map(|o| o.result.cost)
        .collect();
    let excluded = outcomes.len() - costs.len();
    let hub_wins = outcomes
        .iter()
        .filter(|o| o.result.halted && o.result.finder == Some(o.hub))
        .count();
    let (mean_cost, std_error, r_h) = match aggregate(&costs, excluded) {
        Ok(e) => (
            e.mean,
            e.std_error,
            Some(nodes as f64 * hub_wins as f64 / costs.len() as f64),
        ),
        Err(_) => (f64::NAN, f64::NAN, None),
    };
    Ok(SweepRow {
        x,
        mean_cost,
        std_error,
        r_h,
        n_runs: outcomes.len(),
        n_excluded: excluded,
    })
}

fn one_run(
    spec: &ExperimentSpec,
    fixed: Option<&Landscape>,
    shared: Option<&Network>,
    nodes: usize,
    links: usize,
    x: f64,
    seed: u64,
) -> Result<RunOutcome> {
    let own_landscape;
    let landscape = match fixed {
        Some(l) => l,
        None => {
            own_landscape = generate_landscape(spec.n, spec.k, seed)?;
            &own_landscape
        }
    };
    let own_network;
    let network = match shared {
        Some(n) => n,
        None => {
            own_network = build_network(spec.topology, nodes, links, seed)?;
            &own_network
        }
    };
    let mut propensities = vec![spec.p_background; nodes];
    match spec.kind {
        ExperimentKind::SweepP | ExperimentKind::RhVsP => propensities.fill(x),
        ExperimentKind::SweepPstar | ExperimentKind::RhVsPstar => {
            for h in network.hubs(spec.perturb_top_k) {
                propensities[h] = x;
            }
        }
        _ => {}
    }
    let config =
        SearchConfig::new(landscape, network, propensities, seed)?.with_max_sweeps(spec.max_sweeps);
    Ok(RunOutcome {
        result: run_search(&config)?,
        hub: network.main_hub(),
    })
}

fn landscape_records(spec: &ExperimentSpec) -> Result<Vec<LandscapeRecord>> {
    let seeds: Vec<u64> = match spec.landscape_seed {
        LandscapeSeed::Fixed(s) => vec![s],
        LandscapeSeed::PerRun => (0..spec.runs as u64)
            .map(|r| derive_seed(spec.base_seed, 0, r))
            .collect(),
    };
    seeds
        .into_par_iter()
        .map(|seed| {
            let l = generate_landscape(spec.n, spec.k, seed)?;
            Ok(LandscapeRecord {
                seed,
                stats: enumerate_maxima(&l)?,
            })
        })
        .collect()
}

fn network_records(spec: &ExperimentSpec) -> Result<Vec<NetworkRecord>> {
    let links = spec.link_budget(spec.agents)?;
    if !spec.topology.is_stochastic() {
        let net = build_network(spec.topology, spec.agents, links, 0)?;
        return Ok(vec![NetworkRecord {
            seed: None,
            stats: network_stats(&net),
        }]);
    }
    (0..spec.runs as u64)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(spec.base_seed, 0, r);
            let net = build_network(spec.topology, spec.agents, links, seed)?;
            Ok(NetworkRecord {
                seed: Some(seed),
                stats: network_stats(&net),
            })
        })
        .collect()
}
