use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::density::{depolarizing_max, DensityMatrix};
use super::gates::{Gate, Gate1, Gate2};
use super::statevector::StateVector;
use super::QuantumState;
use crate::error::{Error, Result};

/// Gate depolarizing strengths plus symmetric-or-not readout confusion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Depolarizing parameter after H, RZ and RX.
    pub p1: f64,
    /// Depolarizing parameter after RZZ, RXX and RYY.
    pub p2: f64,
    /// Probability of reading 1 when the qubit is 0.
    pub p01: f64,
    /// Probability of reading 0 when the qubit is 1.
    pub p10: f64,
    /// Also depolarize the X / CNOT gates of constraint-aware state preparation.
    #[serde(default)]
    pub noisy_preparation: bool,
}

impl NoiseModel {
    pub const NOISELESS: NoiseModel = NoiseModel {
        p1: 0.0,
        p2: 0.0,
        p01: 0.0,
        p10: 0.0,
        noisy_preparation: false,
    };

    /// Optimistic laboratory-grade reference values.
    pub fn reference() -> Self {
        NoiseModel {
            p1: 0.00015,
            p2: 0.00125,
            p01: 0.001,
            p10: 0.001,
            noisy_preparation: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v, max) in [
            ("p1", self.p1, 1.0),
            ("p2", self.p2, 1.0),
            ("p01", self.p01, 0.5),
            ("p10", self.p10, 0.5),
        ] {
            if !(0.0..=max).contains(&v) {
                return Err(Error::InvalidNoise(format!(
                    "{name} = {v} outside [0, {max}]"
                )));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0 && self.p01 == 0.0 && self.p10 == 0.0
    }

    /// Depolarizing parameter attached to a gate, zero if the gate is noiseless.
    pub fn gate_error(&self, gate: &Gate) -> f64 {
        match gate {
            Gate::One(_, Gate1::H | Gate1::Rx(_) | Gate1::Rz(_)) => self.p1,
            Gate::Two(_, _, Gate2::Rzz(_) | Gate2::Rxx(_) | Gate2::Ryy(_)) => self.p2,
            Gate::One(_, Gate1::X) if self.noisy_preparation => self.p1,
            Gate::Two(_, _, Gate2::Cnot) if self.noisy_preparation => self.p2,
            _ => 0.0,
        }
    }

    /// Closed-form average infidelity `(1 - 2^-k) * lambda` of the channels used.
    pub fn nominal_infidelity_1q(&self) -> f64 {
        self.p1 / 2.0
    }

    pub fn nominal_infidelity_2q(&self) -> f64 {
        3.0 * self.p2 / 4.0
    }
}

/// Applies `gate` and then its depolarizing channel, if any.
pub fn apply_noisy_gate(rho: &mut DensityMatrix, gate: &Gate, noise: &NoiseModel) -> Result<()> {
    rho.apply_gate(gate)?;
    let lambda = noise.gate_error(gate);
    if lambda > 0.0 {
        rho.depolarize(&gate.qubits(), lambda)?;
    }
    Ok(())
}

/// Average gate infidelity of the `k`-qubit depolarizing channel, measured by
/// running it on half of a maximally entangled `2k`-qubit state.
pub fn measured_depolarizing_infidelity(k: usize, lambda: f64) -> Result<f64> {
    if lambda > depolarizing_max(k) {
        return Err(Error::NoiseOutOfRange {
            value: lambda,
            max: depolarizing_max(k),
            qubits: k,
        });
    }
    let d = 1usize << k;
    // |Phi> = sum_i |i>|i> / sqrt(d)
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        amps[i * d + i] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    let phi = StateVector::from_amplitudes(amps)?;
    let mut rho = DensityMatrix::from_pure(&phi);
    let targets: Vec<usize> = (0..k).collect();
    rho.depolarize(&targets, lambda)?;

    let a = phi.amplitudes();
    let mut fid = C64::new(0.0, 0.0);
    for r in 0..d * d {
        for c in 0..d * d {
            fid += a[r].conj() * rho.entry(r, c) * a[c];
        }
    }
    let process_fidelity = fid.re;
    let average_fidelity = (d as f64 * process_fidelity + 1.0) / (d as f64 + 1.0);
    Ok(1.0 - average_fidelity)
}

/// Classical per-qubit readout confusion applied to an exact distribution.
pub fn apply_readout_confusion(probs: &[f64], p01: f64, p10: f64) -> Vec<f64> {
    let mut out = probs.to_vec();
    if p01 == 0.0 && p10 == 0.0 {
        return out;
    }
    let n = probs.len().trailing_zeros() as usize;
    for q in 0..n {
        let mask = 1usize << q;
        for i in 0..out.len() {
            if i & mask != 0 {
                continue;
            }
            let j = i | mask;
            let (zero, one) = (out[i], out[j]);
            out[i] = zero * (1.0 - p01) + one * p10;
            out[j] = zero * p01 + one * (1.0 - p10);
        }
    }
    out
}
