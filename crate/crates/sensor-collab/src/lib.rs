//! Sparse sensor collaboration and selection for distributed linear
//! coherent estimation over a coherent multiple-access channel.
//!
//! The crate builds the quadratic forms of the estimation model
//! ([`model`]), solves the fully connected / fixed-topology problems in
//! closed form via generalized eigenproblems ([`spectral`]), and attacks
//! the sparsity-promoting formulations with reweighted l1 minimization
//! driven by an ADMM splitting ([`admm`]) whose inner step is a
//! nonconvex QP with one quadratic constraint solved through its KKT
//! system ([`qp1qc`]). High-level entry points live in [`strategies`];
//! small-instance exhaustive references in [`oracle`].

pub mod admm;
pub mod cli;
pub mod error;
pub mod strategies;
pub mod model;
pub mod oracle;
pub mod qp1qc;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{build_forms, Metrics, QuadForms, Scenario, ScenarioParams};
