//! Finite-dimensional verification of quantum measurement limits under
//! multiplicative conservation laws.
//!
//! A [`MeasuringProcess`] couples an object to a probe through a unitary and
//! reads a meter observable. The crate checks preciseness, nondisturbance and
//! the Araki–Yanase structure, tests additive and multiplicative conservation
//! laws, and evaluates the noise lower bounds those laws imply.

pub mod bounds;
pub mod conservation;
pub mod ensemble;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod models;
pub mod par;
pub mod random;

pub use num_complex;

pub use bounds::{
    bound_general, bound_report, bound_yanase, commutator_identity_residual, optimal_probe_state,
    ratio_and_cv, verify_way_consistency, BoundReport, Verdict, WayReport,
};
pub use conservation::{
    check_yanase, conservation_residual, exponentiate_additive, random_conserving_unitary,
    ConservedPair, LawKind,
};
pub use ensemble::{run_master_suite, SuiteConfig, SuiteSummary};
pub use error::{Result, WayError};
pub use linalg::{ComplexMatrix, StateVector, Tolerances};
pub use measurement::MeasuringProcess;
pub use models::{EnsembleSpec, NamedModel};
pub use par::Execution;
