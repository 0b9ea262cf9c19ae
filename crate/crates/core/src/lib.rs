//! Sparse signal recovery under the mutual incoherence property.
//!
//! The crate is organised around six pieces:
//!
//! * [`measurement`]: measurement matrices, coherence, sparse Gram spectra.
//! * [`solvers`]: BP, QCBP, Dantzig selector and Lasso with optimality certificates.
//! * [`bounds`]: closed-form error bounds and oracle inequalities.
//! * [`oracle`]: oracle risk, effective dimension and noise-regime classification.
//! * [`geometry`]: cone constraints, robust null space property, polytope
//!   decompositions and quotient-property ratios.
//! * [`harness`]: Monte-Carlo experiments and named verification suites.

pub mod bounds;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod measurement;
pub mod oracle;
pub mod rng;
pub mod solvers;

mod linalg;

pub use bounds::{BoundReport, TheoremId};
pub use geometry::{PolytopeDecomposition, RnspConstants};
pub use harness::{ExperimentConfig, ExperimentReport, TrialRecord};
pub use measurement::{MeasurementMatrix, SparsityBudget};
pub use oracle::{NoiseRegime, OracleQuantities};
pub use solvers::{SolveError, SolveOutcome, SolverConfig, StepRule};

/// Dense real vector used throughout the crate.
pub type Vector = nalgebra::DVector<f64>;
/// Dense real matrix used throughout the crate.
pub type Matrix = nalgebra::DMatrix<f64>;
