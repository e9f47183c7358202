//! Asynchronous imitative-learning search.
//!
//! Each operation picks an agent uniformly at random. With probability `1 -
//! p_i` it flips one uniformly chosen bit of its string (the elementary move).
//! Otherwise it imitates its model, the fittest string among its network
//! neighbours: one uniformly chosen bit in which the two strings differ is
//! copied from the model. Agents identical to their model, and agents with no
//! neighbours, perform the elementary move instead. The search halts as soon
//! as an operation produces the global maximum.
//!
//! Cost accounting: `operations` counts string operations, `t* =
//! operations / L` is measured in sweeps and the cost is `operations / 2^N`.
//! A global maximum already present among the initial strings halts the run
//! with zero operations.

use rand::distr::{Distribution, Uniform};
use rand::{Rng as _, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::{BitString, Landscape};
use crate::network::{Network, Node};
use crate::rng::{stream_rng, Rng, Stream};

pub const DEFAULT_MAX_SWEEPS: f64 = 1e4;

/// Largest `N` for which runs look fitness up in the landscape's full table.
const TABULATE_UP_TO: usize = 20;

#[derive(Debug, Clone)]
pub struct SearchConfig<'a> {
    pub landscape: &'a Landscape,
    pub network: &'a Network,
    pub propensities: Vec<f64>,
    pub seed: u64,
    /// Cap on the run length in sweeps; `None` runs until the maximum is found.
    pub max_sweeps: Option<f64>,
}

impl<'a> SearchConfig<'a> {
    pub fn new(
        landscape: &'a Landscape,
        network: &'a Network,
        propensities: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        let config = Self {
            landscape,
            network,
            propensities,
            seed,
            max_sweeps: Some(DEFAULT_MAX_SWEEPS),
        };
        config.validate()?;
        Ok(config)
    }

    /// Every agent gets propensity `p`.
    pub fn homogeneous(
        landscape: &'a Landscape,
        network: &'a Network,
        p: f64,
        seed: u64,
    ) -> Result<Self> {
        Self::new(landscape, network, vec![p; network.node_count()], seed)
    }

    pub fn with_max_sweeps(mut self, max_sweeps: Option<f64>) -> Self {
        self.max_sweeps = max_sweeps;
        self
    }

    pub fn agents(&self) -> usize {
        self.network.node_count()
    }

    pub fn validate(&self) -> Result<()> {
        if self.network.node_count() == 0 {
            return Err(Error::param("search needs at least one agent"));
        }
        if self.propensities.len() != self.network.node_count() {
            return Err(Error::param(format!(
                "{} propensities for {} agents",
                self.propensities.len(),
                self.network.node_count()
            )));
        }
        if let Some((i, p)) = self
            .propensities
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(Error::param(format!(
                "propensity {p} of agent {i} outside [0, 1]"
            )));
        }
        if let Some(s) = self.max_sweeps {
            if !(s > 0.0) {
                return Err(Error::param(format!(
                    "max_sweeps must be positive, got {s}"
                )));
            }
        }
        Ok(())
    }
}

/// Strings held by the agents, with their cached fitnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    n: usize,
    agents: Vec<Slot>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Slot {
    fitness: f64,
    bits: u32,
}

impl AgentState {
    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn string(&self, i: Node) -> BitString {
        BitString::from_raw(self.agents[i].bits, self.n)
    }

    pub fn strings(&self) -> impl Iterator<Item = BitString> + '_ {
        self.agents
            .iter()
            .map(|a| BitString::from_raw(a.bits, self.n))
    }

    pub fn fitness(&self, i: Node) -> f64 {
        self.agents[i].fitness
    }

    /// Replaces agent `i`'s string and refreshes its cached fitness.
    pub fn set_string(&mut self, landscape: &Landscape, i: Node, x: BitString) -> Result<()> {
        self.agents[i] = Slot {
            fitness: landscape.fitness(x)?,
            bits: x.bits(),
        };
        Ok(())
    }
}

/// What an agent did in one operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// Bit `bit` was flipped at random.
    Elementary { bit: usize },
    /// Bit `bit` was copied from the string of neighbour `model`.
    Imitation { bit: usize, model: Node },
}

impl Move {
    pub fn bit(self) -> usize {
        match self {
            Move::Elementary { bit } | Move::Imitation { bit, .. } => bit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub halted: bool,
    /// Halting time in sweeps, `operations / L`.
    pub t_star: f64,
    pub operations: u64,
    /// `operations / 2^N`.
    pub cost: f64,
    /// Agent whose operation produced the global maximum.
    pub finder: Option<Node>,
}

enum Evaluator<'a> {
    Table(&'a [f64]),
    Direct(&'a Landscape),
}

impl<'a> Evaluator<'a> {
    fn new(landscape: &'a Landscape) -> Self {
        if landscape.n() <= TABULATE_UP_TO {
            if let Ok(t) = landscape.fitness_table() {
                return Evaluator::Table(t);
            }
        }
        Evaluator::Direct(landscape)
    }

    #[inline(always)]
    fn eval(&self, x: u32) -> f64 {
        match self {
            Evaluator::Table(t) => t[x as usize],
            Evaluator::Direct(l) => l.fitness_raw(x),
        }
    }
}

/// Draws the initial strings, `L` masked `u32` draws in agent order.
pub fn init_agents(config: &SearchConfig<'_>, rng: &mut Rng) -> AgentState {
    let eval = Evaluator::new(config.landscape);
    init_with(config, &eval, rng)
}

fn init_with(config: &SearchConfig<'_>, eval: &Evaluator<'_>, rng: &mut Rng) -> AgentState {
    let n = config.landscape.n();
    let agents = (0..config.agents())
        .map(|_| {
            let bits = BitString::random(n, rng).bits();
            Slot {
                fitness: eval.eval(bits),
                bits,
            }
        })
        .collect();
    AgentState { n, agents }
}

/// Applies one operation of agent `i`.
pub fn agent_step(
    state: &mut AgentState,
    config: &SearchConfig<'_>,
    i: Node,
    rng: &mut Rng,
) -> Move {
    let eval = Evaluator::new(config.landscape);
    let coin = ImitationCoin::new(config.propensities[i]);
    step_with(state, config.network.neighbors(i), coin, &eval, i, rng)
}

/// Imitation decision for one propensity: imitate iff a `u64` draw falls
/// below `p * 2^64`. Propensities 0 and 1 consume no draw.
#[derive(Debug, Clone, Copy)]
enum ImitationCoin {
    Never,
    Always,
    Below(u64),
}

impl ImitationCoin {
    fn new(p: f64) -> Self {
        if p <= 0.0 {
            ImitationCoin::Never
        } else if p >= 1.0 {
            ImitationCoin::Always
        } else {
            // exact for p a multiple of 2^-53
            ImitationCoin::Below((p * 18_446_744_073_709_551_616.0) as u64)
        }
    }

    #[inline(always)]
    fn toss(self, rng: &mut Rng) -> bool {
        match self {
            ImitationCoin::Never => false,
            ImitationCoin::Always => true,
            ImitationCoin::Below(t) => rng.next_u64() < t,
        }
    }
}

#[inline(always)]
fn step_with(
    state: &mut AgentState,
    neighbors: &[Node],
    coin: ImitationCoin,
    eval: &Evaluator<'_>,
    i: Node,
    rng: &mut Rng,
) -> Move {
    let current = state.agents[i].bits;
    let mut mv = None;
    if coin.toss(rng) {
        if let Some((model, model_bits)) = select_model(&state.agents, neighbors, rng) {
            let diff = current ^ model_bits;
            if diff != 0 {
                let bit = nth_set_bit(diff, rng.random_range(0..diff.count_ones()));
                mv = Some(Move::Imitation { bit, model });
            }
        }
    }
    let mv = mv.unwrap_or_else(|| Move::Elementary {
        bit: rng.random_range(0..state.n),
    });
    let bits = current ^ (1 << mv.bit());
    state.agents[i] = Slot {
        fitness: eval.eval(bits),
        bits,
    };
    mv
}

/// Fittest neighbour. Ties are broken uniformly over the tied neighbours by
/// reservoir sampling; a tied neighbour holding the same string as the current
/// pick cannot change the outcome, so no draw is spent on it.
#[inline(always)]
fn select_model(agents: &[Slot], neighbors: &[Node], rng: &mut Rng) -> Option<(Node, u32)> {
    let (&first, rest) = neighbors.split_first()?;
    let mut best = agents[first];
    let mut pick = first;
    let mut tied = 1u32;
    for &j in rest {
        let a = agents[j];
        if a.fitness > best.fitness {
            best = a;
            pick = j;
            tied = 1;
        } else if a.fitness == best.fitness {
            tied += 1;
            if a.bits != best.bits && rng.random_range(0..tied) == 0 {
                best = a;
                pick = j;
            }
        }
    }
    Some((pick, best.bits))
}

#[inline]
fn nth_set_bit(mut x: u32, n: u32) -> usize {
    for _ in 0..n {
        x &= x - 1;
    }
    x.trailing_zeros() as usize
}

/// Runs the search until some agent holds the global maximum or the sweep cap
/// is reached.
pub fn run_search(config: &SearchConfig<'_>) -> Result<SearchResult> {
    config.validate()?;
    let landscape = config.landscape;
    let (target, _) = landscape.global_maximum()?;
    let target = target.bits();
    let eval = Evaluator::new(landscape);
    let agents = config.agents();
    let mut rng = stream_rng(config.seed, Stream::Search);
    let mut state = init_with(config, &eval, &mut rng);

    let result = |halted: bool, operations: u64, finder: Option<Node>| SearchResult {
        halted,
        t_star: operations as f64 / agents as f64,
        operations,
        cost: operations as f64 / landscape.space_size() as f64,
        finder,
    };

    if let Some(finder) = state.agents.iter().position(|a| a.bits == target) {
        return Ok(result(true, 0, Some(finder)));
    }
    let cap = config
        .max_sweeps
        .map_or(u64::MAX, |s| (s * agents as f64).ceil() as u64);
    let coins: Vec<ImitationCoin> = config
        .propensities
        .iter()
        .map(|&p| ImitationCoin::new(p))
        .collect();
    let network = config.network;
    let pick_agent = Uniform::new(0, agents).map_err(|e| Error::param(e.to_string()))?;
    let mut operations = 0u64;
    while operations < cap {
        let i = pick_agent.sample(&mut rng);
        step_with(
            &mut state,
            network.neighbors(i),
            coins[i],
            &eval,
            i,
            &mut rng,
        );
        operations += 1;
        if state.agents[i].bits == target {
            return Ok(result(true, operations, Some(i)));
        }
    }
    Ok(result(false, operations, None))
}

/// Whether the agent that found the maximum is the network's main hub.
pub fn finder_is_main_hub(result: &SearchResult, net: &Network) -> Result<bool> {
    match (result.halted, result.finder) {
        (true, Some(f)) => Ok(f == net.main_hub()),
        _ => Err(Error::Contract(
            "finder queried on an unhalted search".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::generate_landscape;
    use crate::network::{build_hierarchical, build_random};

    fn setup(n: usize, k: usize) -> (Landscape, Network) {
        (
            generate_landscape(n, k, 1).unwrap(),
            build_hierarchical(3).unwrap(),
        )
    }

    #[test]
    fn init_shapes_and_determinism() {
        let (l, net) = setup(16, 5);
        let cfg = SearchConfig::homogeneous(&l, &net, 0.3, 5).unwrap();
        let a = init_agents(&cfg, &mut stream_rng(5, Stream::Search));
        let b = init_agents(&cfg, &mut stream_rng(5, Stream::Search));
        assert_eq!(a, b);
        assert_eq!(a.len(), 125);
        assert!(a.strings().all(|s| s.len() == 16));
        for i in 0..125 {
            assert_eq!(a.fitness(i), l.fitness(a.string(i)).unwrap());
        }
    }

    #[test]
    fn initial_strings_are_uniform() {
        let l = generate_landscape(2, 0, 1).unwrap();
        let net = Network::complete(1000);
        let cfg = SearchConfig::homogeneous(&l, &net, 0.0, 0).unwrap();
        let mut counts = [0usize; 4];
        for seed in 0..20 {
            let s = init_agents(&cfg, &mut stream_rng(seed, Stream::Search));
            for x in s.strings() {
                counts[x.bits() as usize] += 1;
            }
        }
        for c in counts {
            assert!((c as f64 / 20_000.0 - 0.25).abs() < 0.02, "{counts:?}");
        }
    }

    #[test]
    fn independent_moves_flip_one_bit() {
        let (l, net) = setup(16, 5);
        let cfg = SearchConfig::homogeneous(&l, &net, 0.0, 1).unwrap();
        let mut rng = stream_rng(1, Stream::Search);
        let mut state = init_agents(&cfg, &mut rng);
        for step in 0..1000 {
            let i = step % 125;
            let before = state.string(i);
            let mv = agent_step(&mut state, &cfg, i, &mut rng);
            assert!(matches!(mv, Move::Elementary { .. }));
            assert_eq!(before.hamming(state.string(i)), 1);
        }
    }

    #[test]
    fn single_differing_bit_is_copied() {
        let l = generate_landscape(8, 2, 3).unwrap();
        let net = Network::complete(2);
        let cfg = SearchConfig::homogeneous(&l, &net, 1.0, 0).unwrap();
        let mut rng = stream_rng(0, Stream::Search);
        let mut state = init_agents(&cfg, &mut rng);
        let model = BitString::new(0b1011_0110, 8).unwrap();
        state.set_string(&l, 1, model).unwrap();
        state.set_string(&l, 0, model.flipped(3)).unwrap();
        let mv = agent_step(&mut state, &cfg, 0, &mut rng);
        assert_eq!(mv, Move::Imitation { bit: 3, model: 1 });
        assert_eq!(state.string(0), model);
        // now identical: the elementary move takes over
        let mv = agent_step(&mut state, &cfg, 0, &mut rng);
        assert!(matches!(mv, Move::Elementary { .. }));
        assert_eq!(state.string(0).hamming(model), 1);
    }

    #[test]
    fn isolated_agents_move_independently() {
        let l = generate_landscape(8, 2, 3).unwrap();
        let net = Network::from_edges(3, [(0, 1)]).unwrap();
        let cfg = SearchConfig::homogeneous(&l, &net, 1.0, 0).unwrap();
        let mut rng = stream_rng(0, Stream::Search);
        let mut state = init_agents(&cfg, &mut rng);
        for _ in 0..50 {
            assert!(matches!(
                agent_step(&mut state, &cfg, 2, &mut rng),
                Move::Elementary { .. }
            ));
        }
    }

    #[test]
    fn imitation_contracts_hold_along_a_run() {
        let l = generate_landscape(16, 5, 4).unwrap();
        let net = build_random(125, 394, 4).unwrap();
        let cfg = SearchConfig::homogeneous(&l, &net, 0.6, 4).unwrap();
        let mut rng = stream_rng(4, Stream::Search);
        let mut state = init_agents(&cfg, &mut rng);
        for _ in 0..20_000 {
            let i = rng.random_range(0..125);
            let before = state.clone();
            let mv = agent_step(&mut state, &cfg, i, &mut rng);
            // exactly one bit of exactly one string changed
            let changed: Vec<_> = (0..125)
                .filter(|&j| before.string(j) != state.string(j))
                .collect();
            assert_eq!(changed, vec![i]);
            assert_eq!(before.string(i).hamming(state.string(i)), 1);
            assert_eq!(state.fitness(i), l.fitness(state.string(i)).unwrap());
            if let Move::Imitation { model, .. } = mv {
                let m = before.string(model);
                assert_eq!(m.hamming(state.string(i)) + 1, m.hamming(before.string(i)));
                for &j in net.neighbors(i) {
                    assert!(before.fitness(model) >= before.fitness(j));
                }
            }
        }
    }

    #[test]
    fn identical_configs_give_identical_results() {
        let (l, net) = setup(12, 3);
        let cfg = SearchConfig::homogeneous(&l, &net, 0.5, 77).unwrap();
        let a = run_search(&cfg).unwrap();
        assert_eq!(a, run_search(&cfg).unwrap());
        assert!(a.halted);
        assert_eq!(a.cost * 4096.0, a.operations as f64);
        assert_eq!(a.t_star * 125.0, a.operations as f64);
    }

    #[test]
    fn halting_at_initialisation() {
        // with N = 2 and 1000 agents the maximum is essentially always drawn
        let l = generate_landscape(2, 1, 0).unwrap();
        let net = Network::complete(1000);
        let cfg = SearchConfig::homogeneous(&l, &net, 0.0, 0).unwrap();
        let r = run_search(&cfg).unwrap();
        assert!(r.halted);
        assert_eq!((r.operations, r.cost), (0, 0.0));
        let mut rng = stream_rng(0, Stream::Search);
        let s = init_agents(&cfg, &mut rng);
        assert_eq!(s.string(r.finder.unwrap()), l.global_maximum().unwrap().0);
    }

    #[test]
    fn finder_is_at_the_global_maximum() {
        let l = generate_landscape(10, 3, 2).unwrap();
        let net = build_random(25, 60, 2).unwrap();
        for seed in 0..20 {
            let cfg = SearchConfig::homogeneous(&l, &net, 0.4, seed).unwrap();
            let r = run_search(&cfg).unwrap();
            assert!(r.halted);
            assert!(r.finder.unwrap() < 25);
        }
    }

    #[test]
    fn sweep_cap_reports_unhalted() {
        let (l, net) = setup(16, 5);
        let cfg = SearchConfig::homogeneous(&l, &net, 0.5, 3)
            .unwrap()
            .with_max_sweeps(Some(0.5));
        let r = run_search(&cfg).unwrap();
        if !r.halted {
            assert_eq!(r.operations, 63);
            assert!(finder_is_main_hub(&r, &net).is_err());
        }
    }

    #[test]
    fn hub_finder_checks() {
        let net = Network::complete(1);
        let r = SearchResult {
            halted: true,
            t_star: 3.0,
            operations: 3,
            cost: 0.75,
            finder: Some(0),
        };
        assert!(finder_is_main_hub(&r, &net).unwrap());
        let hier = build_hierarchical(2).unwrap();
        assert!(finder_is_main_hub(&r, &hier).unwrap());
        let r = SearchResult {
            finder: Some(7),
            ..r
        };
        assert!(!finder_is_main_hub(&r, &hier).unwrap());
    }

    #[test]
    fn rejects_invalid_configs() {
        let (l, net) = setup(8, 1);
        assert!(SearchConfig::new(&l, &net, vec![0.5; 3], 0).is_err());
        assert!(SearchConfig::homogeneous(&l, &net, 1.5, 0).is_err());
        let cfg = SearchConfig::homogeneous(&l, &net, 0.5, 0).unwrap();
        assert!(cfg.with_max_sweeps(Some(0.0)).validate().is_err());
    }

    #[test]
    fn nth_set_bit_walks_set_bits() {
        assert_eq!(nth_set_bit(0b1011_0000, 0), 4);
        assert_eq!(nth_set_bit(0b1011_0000, 1), 5);
        assert_eq!(nth_set_bit(0b1011_0000, 2), 7);
    }
}
