//! Round-faithful simulation of multi-message broadcast in the CONGEST model.
//!
//! The crate builds δ low-diameter spanning trees on an Erdős–Rényi graph by
//! running δ coalescing-branching random walks (multi-COBRA) in parallel,
//! then pipelines k messages down those trees. Arbitrary expander hosts are
//! handled by embedding a virtual random graph on top of them with lazy random
//! walks. Every stage is a deterministic function of its inputs and a seed,
//! and every stage counts simulated rounds and per-edge congestion.
//!
//! Module map:
//!
//! - [`graph`]: multigraph storage, G(n, p) sampling, BFS, diameter, regularization.
//! - [`spectral`]: normalized adjacency, dense symmetric eigensolver, the
//!   diagonal-perturbation check, conductance and mixing times.
//! - [`cobra`]: the phased multi-COBRA engine.
//! - [`packing`]: subgraphs to rooted BFS tree packings.
//! - [`broadcast`]: pipelined downcast over a packing, baselines, multi-source.
//! - [`embedding`]: virtual random graph over an arbitrary host.
//! - [`hardness`]: bandwidth gadgets, time-expanded max-flow, set splitting.
//! - [`harness`]: config-driven sweeps and scaling fits.
//! - [`io`]: text, JSON and CSV formats used by the `mcbsim` binary.

pub mod broadcast;
pub mod cobra;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod hardness;
pub mod harness;
pub mod io;
pub mod packing;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{BfsTree, Graph};
pub use rng::RngSeed;
