//! Deterministic hierarchical network.
//!
//! Node numbering: write a node index in base 5 with `n` digits. The least
//! significant digit is the position inside an elementary five-node cluster
//! (0 = centre, 1..=4 = corners); digit `m - 1` selects the replica created at
//! level `m` (0 = the old module, 1..=4 = the four copies). Node 0 is therefore
//! the centre of every module that contains it, and the main hub.
//!
//! Level 1 is a 5-clique on nodes `0..5`. Level `m` copies the current module
//! (nodes `0..5^(m-1)`) into the blocks `r * 5^(m-1) ..` for `r = 1..=4` and
//! links every peripheral node of each copy to node 0. A node of a copy is
//! peripheral when all its lower `m - 1` digits are non-zero, i.e. it descends
//! from corners at every level and never served as a centre; each copy has
//! `4^(m-1)` of them.

use super::{Network, Node};
use crate::error::{Error, Result};

/// Largest supported number of levels (`5^9` nodes).
const MAX_LEVELS: u32 = 9;

/// `6 * 5^(n-1) + 4 * (5^n - 4^n)`.
pub fn hierarchical_link_count(levels: u32) -> u64 {
    assert!(levels >= 1);
    6 * 5u64.pow(levels - 1) + 4 * (5u64.pow(levels) - 4u64.pow(levels))
}

/// Whether local index `j` (within a module of `digits` levels) is peripheral.
pub fn hierarchical_peripheral(mut j: Node, digits: u32) -> bool {
    for _ in 0..digits {
        if j.is_multiple_of(5) {
            return false;
        }
        j /= 5;
    }
    true
}

pub fn build_hierarchical(levels: u32) -> Result<Network> {
    if levels < 1 {
        return Err(Error::param(
            "hierarchical network needs at least one level",
        ));
    }
    if levels > MAX_LEVELS {
        return Err(Error::param(format!(
            "at most {MAX_LEVELS} levels supported"
        )));
    }
    let mut edges: Vec<(Node, Node)> = (0..5)
        .flat_map(|u| (u + 1..5).map(move |v| (u, v)))
        .collect();
    for m in 2..=levels {
        let module = 5usize.pow(m - 1);
        let base = edges.len();
        for r in 1..5 {
            let offset = r * module;
            edges.extend(
                edges[..base]
                    .iter()
                    .map(|&(u, v)| (u + offset, v + offset))
                    .collect::<Vec<_>>(),
            );
            edges.extend(
                (0..module)
                    .filter(|&j| hierarchical_peripheral(j, m - 1))
                    .map(|j| (0, offset + j)),
            );
        }
    }
    Network::from_edges(5usize.pow(levels), edges)
}
