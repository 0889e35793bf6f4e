//! Quantum tilted losses and the machinery to study them.
//!
//! The crate implements the entropic tilted loss over measurement outcome
//! distributions, the related risk measures (VaR / CVaR / EVaR and the
//! Petz-Rényi comparison), an exact small-n statevector simulator for QAOA
//! and tensor-product ansätze, finite-shot estimators with shift-rule and
//! finite-difference gradients, a momentum optimizer with tilt schedules,
//! and the analytic projector benchmark used for gradient-variance regime
//! experiments.
//!
//! Everything is deterministic under a caller-supplied 64-bit seed; see
//! [`rng`] for how randomness is derived.

pub mod error;
pub mod estimators;
pub mod linalg;
pub mod optimizer;
pub mod projector_benchmark;
pub mod rng;
pub mod spectra;
pub mod statevector;
pub mod suites;
pub mod tilted_loss;

pub use error::{Error, Result};
pub use spectra::{DiagonalObservable, Graph, OutcomeDistribution};
pub use statevector::{ProductAnsatzParams, QaoaCircuit, QaoaParams, StateVector};
pub use tilted_loss::{DenseOperatorPair, RiskLevel, Tilt};
