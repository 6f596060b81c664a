//! Dense statevector and density-matrix engines, noise channels and sampling.

mod density;
mod gates;
mod kernels;
mod noise;
mod sampling;
mod statevector;

pub use density::{depolarizing_max, DensityMatrix};
pub use gates::{Gate, Gate1, Gate2, GateRecord, Matrix2, Matrix4};
pub use noise::{
    apply_noisy_gate, apply_readout_confusion, measured_depolarizing_infidelity, NoiseModel,
};
pub use sampling::{sample, sample_counts, ShotHistogram};
pub use statevector::StateVector;

use crate::error::Result;

/// Operations shared by the pure and mixed state engines.
pub trait QuantumState {
    fn num_qubits(&self) -> usize;

    fn apply_gate(&mut self, gate: &Gate) -> Result<()>;

    /// Multiplies basis state `x` by `exp(-i * angle * diagonal[x] / scale)`.
    fn apply_diagonal_phase(&mut self, diagonal: &[f64], angle: f64, scale: f64) -> Result<()>;

    /// Exact measurement distribution in the computational basis.
    fn probabilities(&self) -> Vec<f64>;
}
