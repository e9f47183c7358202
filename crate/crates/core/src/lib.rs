//! Imitative-learning search on NK fitness landscapes.
//!
//! A group of agents searches for the global maximum of an NK landscape.
//! Each agent either explores on its own by flipping bits or copies bits from
//! the fittest agent among its network neighbours. The crate provides the
//! landscapes ([`landscape`]), the hierarchical, scale-free and random
//! networks ([`network`]), the search dynamic ([`search`]), the analytic
//! independent-search baseline and sample statistics ([`analytics`]), and an
//! experiment runner with CSV/JSON output ([`harness`]).

pub mod analytics;
pub mod error;
pub mod harness;
pub mod landscape;
pub mod network;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
