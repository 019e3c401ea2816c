//! Dense k-uniform hypergraph limits.
//!
//! Finite hypergraphs and their homomorphism densities, hyperpartitions and
//! combinatorial structures, step hypergraphons, W-random sampling, the
//! distances between these objects, a regularity search, and the numerical
//! experiments built on top of them.

pub mod canon;
pub mod combinatorics;
pub mod error;
pub mod experiments;
pub mod hom;
pub mod hyperpartition;
pub mod hypergraph;
pub mod hypergraphon;
pub mod metrics;
pub mod rational;
pub mod regularity;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
pub use hom::{densities, hom, t, t0, t_ind, DensityRecord, HomMode};
pub use hypergraph::{blowup, quotient, Hypergraph, Quotient, VertexPartition};
pub use rational::Rational;
