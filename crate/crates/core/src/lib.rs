//! Exact Laurent expansions of cluster variables of type D.
//!
//! Cluster variables of type D_n are the tagged arcs of a once-punctured
//! n-gon. This crate expands them in the cluster of any tagged triangulation
//! in three independent ways (T-paths, snake-graph matchings, and mutation)
//! and checks the proper-Laurent and atomic-basis properties at small n.

pub mod atomic;
pub mod cluster;
pub mod error;
pub mod fixtures;
pub mod laurent;
pub mod snake;
pub mod surface;
pub mod tpath;
pub mod triangulation;

pub use error::{Error, Result};
