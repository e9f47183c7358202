//! Experiment descriptions and their flat `key = value` config form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::MAX_N;
use crate::network::hierarchical_link_count;
use crate::search::DEFAULT_MAX_SWEEPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Cost against a homogeneous propensity `p`.
    SweepP,
    /// Cost against the hub propensity `p*`, other agents at `p_background`.
    SweepPstar,
    /// Cost against the group size `L = 5^n`, all agents at `p_background`.
    SweepL,
    RhVsP,
    RhVsPstar,
    LandscapeStats,
    NetworkStats,
    /// The independent-search formula evaluated on an `L` grid.
    AnalyticCurve,
}

impl ExperimentKind {
    pub fn is_search(self) -> bool {
        matches!(
            self,
            Self::SweepP | Self::SweepPstar | Self::SweepL | Self::RhVsP | Self::RhVsPstar
        )
    }

    fn grid_is_propensity(self) -> bool {
        matches!(
            self,
            Self::SweepP | Self::SweepPstar | Self::RhVsP | Self::RhVsPstar
        )
    }

    fn grid_is_size(self) -> bool {
        matches!(self, Self::SweepL | Self::AnalyticCurve)
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sweep_p" => Self::SweepP,
            "sweep_pstar" => Self::SweepPstar,
            "sweep_L" | "sweep_l" => Self::SweepL,
            "rh_vs_p" => Self::RhVsP,
            "rh_vs_pstar" => Self::RhVsPstar,
            "landscape_stats" => Self::LandscapeStats,
            "network_stats" => Self::NetworkStats,
            "analytic_curve" => Self::AnalyticCurve,
            _ => return Err(Error::param(format!("unknown experiment kind {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Hierarchical,
    #[serde(rename = "scalefree")]
    ScaleFree,
    Random,
}

impl Topology {
    pub const ALL: [Topology; 3] = [
        Topology::Hierarchical,
        Topology::ScaleFree,
        Topology::Random,
    ];

    /// Whether a fresh realization can be drawn per run.
    pub fn is_stochastic(self) -> bool {
        !matches!(self, Topology::Hierarchical)
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hierarchical" => Ok(Self::Hierarchical),
            "scalefree" | "scale-free" | "scale_free" => Ok(Self::ScaleFree),
            "random" => Ok(Self::Random),
            _ => Err(Error::param(format!("unknown topology {s:?}"))),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Hierarchical => "hierarchical",
            Topology::ScaleFree => "scalefree",
            Topology::Random => "random",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandscapeSeed {
    Fixed(u64),
    /// Each run draws its own landscape from the run seed.
    PerRun,
}

impl FromStr for LandscapeSeed {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-run" | "per_run" => Ok(Self::PerRun),
            _ => parse_num(s).map(Self::Fixed),
        }
    }
}

/// Default fixed landscape. For `N = 16, K = 5` it has 296 maxima, mean
/// relative local-maximum fitness 0.810 and mean relative fitness 0.609.
pub const DEFAULT_LANDSCAPE_SEED: u64 = 3223;

/// Number of levels `n` with `5^n == nodes`, if any.
pub fn hierarchy_levels(nodes: usize) -> Option<u32> {
    (1..=13).find(|&n| 5usize.checked_pow(n) == Some(nodes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub topology: Topology,
    pub n: usize,
    pub k: usize,
    pub landscape_seed: LandscapeSeed,
    /// Number of agents (network nodes).
    pub agents: usize,
    /// Link budget; defaults to the hierarchical count when `L = 5^n`.
    pub links: Option<usize>,
    /// Values of `p`, `p*` or `L`, depending on the kind.
    pub grid: Vec<f64>,
    pub p_background: f64,
    pub runs: usize,
    pub base_seed: u64,
    pub fresh_network_per_run: bool,
    /// Number of top-degree nodes receiving `p*`.
    pub perturb_top_k: usize,
    pub max_sweeps: Option<f64>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::SweepP,
            topology: Topology::Hierarchical,
            n: 16,
            k: 5,
            landscape_seed: LandscapeSeed::Fixed(DEFAULT_LANDSCAPE_SEED),
            agents: 125,
            links: None,
            grid: Vec::new(),
            p_background: 0.5,
            runs: 1000,
            base_seed: 0,
            fresh_network_per_run: true,
            perturb_top_k: 1,
            max_sweeps: Some(DEFAULT_MAX_SWEEPS),
        }
    }
}

fn parse_num<T: FromStr>(s: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    s.parse()
        .map_err(|e| Error::param(format!("cannot parse {s:?}: {e}")))
}

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::param(format!("expected a boolean, got {s:?}"))),
    }
}

/// Parses `0,0.1,0.2` or the range form `start:stop:step` (inclusive).
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let [start, stop, step]: [f64; 3] = [
            parse_num(parts[0])?,
            parse_num(parts[1])?,
            parse_num(parts[2])?,
        ];
        if !(step > 0.0) || stop < start {
            return Err(Error::param(format!("bad grid range {s:?}")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        // round away accumulated step error
        return Ok((0..count)
            .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
            .collect());
    }
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse_num)
        .collect()
}

impl ExperimentSpec {
    /// Sets one field from its config key. Keys follow the field names, with
    /// `N`, `K`, `L` and `E` for the sizes.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "kind" => self.kind = value.parse()?,
            "topology" => self.topology = value.parse()?,
            "N" | "n" => self.n = parse_num(value)?,
            "K" | "k" => self.k = parse_num(value)?,
            "landscape_seed" => self.landscape_seed = value.parse()?,
            "L" | "agents" => self.agents = parse_num(value)?,
            "E" | "links" => self.links = Some(parse_num(value)?),
            "grid" | "p_grid" | "pstar_grid" | "L_grid" => self.grid = parse_grid(value)?,
            "p_background" | "p" => self.p_background = parse_num(value)?,
            "runs" => self.runs = parse_num(value)?,
            "base_seed" | "seed" => self.base_seed = parse_num(value)?,
            "fresh_network_per_run" => self.fresh_network_per_run = parse_bool(value)?,
            "perturb_top_k" => self.perturb_top_k = parse_num(value)?,
            "max_sweeps" => {
                self.max_sweeps = match value {
                    "none" | "inf" => None,
                    v => Some(parse_num(v)?),
                }
            }
            other => return Err(Error::param(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; blank lines and `#` comments are skipped.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut spec = Self::default();
        spec.apply_config(text)?;
        Ok(spec)
    }

    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::param(format!("line {}: expected key = value", lineno + 1))
            })?;
            self.set(key, value)
                .map_err(|e| Error::param(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    /// Link budget for a network of `nodes` nodes.
    pub fn link_budget(&self, nodes: usize) -> Result<usize> {
        if nodes == self.agents {
            if let Some(e) = self.links {
                return Ok(e);
            }
        }
        hierarchy_levels(nodes)
            .map(|n| hierarchical_link_count(n) as usize)
            .ok_or_else(|| {
                Error::param(format!(
                    "L = {nodes} is not a power of 5; give the link budget E explicitly"
                ))
            })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_N || self.k >= self.n {
            return Err(Error::param(format!(
                "invalid (N, K) = ({}, {})",
                self.n, self.k
            )));
        }
        if self.runs == 0 {
            return Err(Error::param("runs must be at least 1"));
        }
        if self.perturb_top_k == 0 {
            return Err(Error::param("perturb_top_k must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.p_background) {
            return Err(Error::param(format!(
                "p_background {} outside [0, 1]",
                self.p_background
            )));
        }
        if self.agents == 0 {
            return Err(Error::param("L must be positive"));
        }
        if let Some(s) = self.max_sweeps {
            if !(s > 0.0) {
                return Err(Error::param("max_sweeps must be positive"));
            }
        }
        if (self.kind.grid_is_propensity() || self.kind.grid_is_size()) && self.grid.is_empty() {
            return Err(Error::param("grid must not be empty"));
        }
        if self.kind.grid_is_propensity() {
            if let Some(v) = self.grid.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::param(format!("propensity {v} outside [0, 1]")));
            }
        }
        if self.kind.grid_is_size() {
            if let Some(v) = self.grid.iter().find(|v| !(v.fract() == 0.0 && **v >= 1.0)) {
                return Err(Error::param(format!(
                    "group size {v} is not a positive integer"
                )));
            }
        }
        match self.kind {
            ExperimentKind::SweepL => {
                for &v in &self.grid {
                    if hierarchy_levels(v as usize).is_none() {
                        return Err(Error::param(format!("sweep_L needs L = 5^n, got {v}")));
                    }
                }
            }
            ExperimentKind::AnalyticCurve if self.n < 2 => {
                return Err(Error::param("analytic curve needs N >= 2"));
            }
            ExperimentKind::AnalyticCurve => {}
            _ => {
                if self.topology == Topology::Hierarchical
                    && hierarchy_levels(self.agents).is_none()
                {
                    return Err(Error::param(format!(
                        "hierarchical network needs L = 5^n, got {}",
                        self.agents
                    )));
                }
                self.link_budget(self.agents)?;
            }
        }
        Ok(())
    }
}
