//! Constraint-aware QAOA for small link-based vehicle routing instances.
//!
//! The crate covers the whole pipeline: building the routing constraints and
//! their penalty QUBO, exporting Ising coefficients, simulating standard and
//! hybrid XY–X QAOA circuits (exact, finite-shot and noisy), optimizing the
//! angles, and scoring the final measurement histograms.

pub mod ansatz;
pub mod bits;
pub mod encode;
pub mod error;
pub mod experiment;
pub mod instance;
pub mod metrics;
pub mod optimize;
pub mod sim;

pub use bits::Bitstring;
pub use encode::{
    penalize, to_cost_operator, to_ising, CostOperator, IsingCoefficients, PenaltyRule,
    QuboProblem, SpinConvention,
};
pub use error::{Error, Result};
pub use instance::{build_constraints, ConstraintSet, LinkIndex, VrpInstance};
pub use sim::{DensityMatrix, NoiseModel, QuantumState, ShotHistogram, StateVector};
