//! Preferential-attachment growth with a fixed link budget.
//!
//! With target ratio `r* = E / L` and `m0 = ceil(r*)`, growth starts from `m0`
//! isolated nodes. Each new node brings `m0` links while the current
//! links-to-nodes ratio is below `r*` and `m0 - 1` links otherwise, until `L`
//! nodes exist. The schedule alone fixes the final edge count; budgets it
//! cannot hit exactly are rejected.
//!
//! Targets are distinct existing nodes drawn one at a time with probability
//! proportional to their degree at the start of the step, renormalised over
//! the nodes not yet chosen. When every remaining candidate has degree zero
//! (the first step) the draw is uniform.

use rand::Rng as _;

use super::{Network, Node};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Returns `m0` and the number of links brought by each of the `L - m0` new
/// nodes, in growth order.
pub fn attachment_schedule(node_count: usize, link_budget: usize) -> Result<(usize, Vec<usize>)> {
    let infeasible = |why: &str| {
        Error::param(format!(
            "scale-free network with {node_count} nodes and {link_budget} links: {why}"
        ))
    };
    if link_budget == 0 {
        return Err(infeasible("needs at least one link"));
    }
    if node_count < 2 || link_budget > node_count * (node_count - 1) / 2 {
        return Err(infeasible("too many links for a simple graph"));
    }
    let m0 = link_budget.div_ceil(node_count);
    if node_count < m0 + 1 {
        return Err(infeasible("fewer nodes than m0 + 1"));
    }
    let mut links = 0usize;
    let mut schedule = Vec::with_capacity(node_count - m0);
    for nodes in m0..node_count {
        // links / nodes < E / L, in integers
        let add = if links * node_count < link_budget * nodes {
            m0
        } else {
            m0 - 1
        };
        if add > nodes {
            return Err(infeasible("step needs more targets than existing nodes"));
        }
        links += add;
        schedule.push(add);
    }
    if links != link_budget {
        return Err(infeasible(&format!(
            "growth schedule ends at {links} links"
        )));
    }
    Ok((m0, schedule))
}

pub fn build_scale_free(node_count: usize, link_budget: usize, seed: u64) -> Result<Network> {
    if node_count >= 2 && link_budget == node_count * (node_count - 1) / 2 {
        // only one simple graph has this budget; the growth rule cannot reach it
        return Ok(Network::complete(node_count));
    }
    let (m0, schedule) = attachment_schedule(node_count, link_budget)?;
    let mut rng = stream_rng(seed, Stream::Network);
    let mut degree = vec![0u64; node_count];
    let mut edges = Vec::with_capacity(link_budget);
    let mut chosen: Vec<Node> = Vec::with_capacity(m0);
    for (step, &add) in schedule.iter().enumerate() {
        let new = m0 + step;
        let existing = &degree[..new];
        chosen.clear();
        let mut remaining_weight: u64 = existing.iter().sum();
        for _ in 0..add {
            let target = if remaining_weight == 0 {
                let free = new - chosen.len();
                let r = rng.random_range(0..free);
                (0..new)
                    .filter(|j| !chosen.contains(j))
                    .nth(r)
                    .expect("free candidate")
            } else {
                let mut r = rng.random_range(0..remaining_weight);
                (0..new)
                    .filter(|j| !chosen.contains(j))
                    .find(|&j| {
                        if r < existing[j] {
                            true
                        } else {
                            r -= existing[j];
                            false
                        }
                    })
                    .expect("weighted candidate")
            };
            remaining_weight -= existing[target];
            chosen.push(target);
        }
        for &t in &chosen {
            degree[t] += 1;
            edges.push((t, new));
        }
        degree[new] = add as u64;
    }
    Network::from_edges(node_count, edges)
}
