//! Hybrid local models for multipartite Bell scenarios.
//!
//! The crate builds the extremal behaviors of hybrid (k-local) models,
//! enumerates party-symmetric full-body facet inequalities through a
//! cone projection, and certifies them with exact classical and
//! no-signaling bounds plus seesaw lower bounds on quantum values.

pub mod behavior;
pub mod cpt;
pub mod error;
pub mod family;
pub mod generalize;
pub mod inequality;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod models;
pub mod named;
pub mod ns;
pub mod quantum;
pub mod scenario;
pub mod symmetry;
pub mod verify;

pub use behavior::{Behavior, Space};
pub use error::{Error, Result};
pub use inequality::{MarginalConvention, SymmetricInequality};
pub use models::{CardinalityTuple, HybridModel, Partition};
pub use scenario::{Multiset, Scenario};
pub use symmetry::SymmetryGroup;
