//! Optimal quantum measurements for single-parameter estimation.
//!
//! Convex information functionals (Fisher information at a point, Van Trees
//! information under a prior) attain their maximum over POVMs at extremal
//! POVMs. The random extremal sampling method (RESM) draws random POVMs from
//! Haar unitaries, refines them to rank 1, decomposes them into extremal POVMs
//! by linear-program vertex extraction, and scores every extremal member.

/// Library version, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod error;
pub mod extremal;
pub mod metrology;
pub mod models;
pub mod optimizer;
pub mod povm;
pub mod quantum_core;

pub use error::{Error, Result};
pub use extremal::{decompose, ExtremalDecomposition};
pub use metrology::{fisher_information, van_trees_information, CostFunction, CostValue};
pub use optimizer::{benchmark, resm_search, rsm_search, Method, SearchConfig, SearchResult};
pub use povm::{outcome_distribution, random_povm, to_rank1, Povm, Rank1Povm};
pub use quantum_core::{
    gell_mann_basis, hermitian_eig, sample_haar_unitary, DensityOperator, HermitianOperator, UnitaryMatrix,
};
