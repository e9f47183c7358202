//! Uniform random network with a fixed number of links.

use rand::seq::index;

use super::{Network, Node};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Inverse of the row-major enumeration of pairs `(u, v)`, `u < v`.
fn pair_at(mut idx: usize, node_count: usize) -> (Node, Node) {
    let mut u = 0;
    let mut row = node_count - 1;
    while idx >= row {
        idx -= row;
        u += 1;
        row -= 1;
    }
    (u, u + 1 + idx)
}

/// Draws `link_budget` distinct pairs uniformly without replacement from the
/// `L (L - 1) / 2` possible ones. Connectivity is not enforced.
pub fn build_random(node_count: usize, link_budget: usize, seed: u64) -> Result<Network> {
    let pairs = node_count * node_count.saturating_sub(1) / 2;
    if link_budget > pairs {
        return Err(Error::param(format!(
            "{link_budget} links exceed the {pairs} pairs of {node_count} nodes"
        )));
    }
    let mut rng = stream_rng(seed, Stream::Network);
    let mut picks = index::sample(&mut rng, pairs, link_budget).into_vec();
    picks.sort_unstable();
    Network::from_edges(
        node_count,
        picks.into_iter().map(|i| pair_at(i, node_count)),
    )
}
