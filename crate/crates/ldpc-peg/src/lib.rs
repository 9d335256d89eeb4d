//! Construction and evaluation of irregular LDPC codes whose Tanner graphs
//! comply with both the symbol and the check node degree distribution.
//!
//! The crate covers the full pipeline:
//!
//! - [`degree`]: edge-perspective degree distributions, quantization into
//!   integer degree sequences, socket balancing between the two sides.
//! - [`graph`]: the bipartite Tanner graph with girth, compliance and
//!   degree-2 subgraph analytics.
//! - [`alist`]: the standard sparse parity-check interchange format.
//! - [`peg`]: progressive edge growth with five selection-criterion
//!   variants, including free-check-degree (FCD) selection in strict and
//!   relaxed modes.
//! - [`decoder`]: flooding-schedule sum-product belief propagation.
//! - [`sim`]: deterministic Monte-Carlo frame-error-rate estimation over
//!   BSC and AWGN channels.
//! - [`manifest`]: reproducibility metadata written next to every artifact.

pub mod alist;
pub mod decoder;
pub mod degree;
pub mod error;
pub mod graph;
pub mod manifest;
pub mod peg;
pub mod sim;

pub use error::{Error, Result};
