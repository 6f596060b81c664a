use num_complex::Complex64 as C64;

use super::gates::{Gate, Gate1, Gate2};
use super::kernels;
use super::QuantumState;
use crate::bits::Bitstring;
use crate::error::{Error, Result};

/// Dense pure state. Qubit 0 is the most significant bit of the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0>`
    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = C64::new(1.0, 0.0);
        StateVector { num_qubits, amps }
    }

    /// `|+>^n`
    pub fn uniform(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        StateVector {
            num_qubits,
            amps: vec![a; dim],
        }
    }

    /// Equal-amplitude superposition over the given basis states (duplicates ignored).
    pub fn equal_superposition(num_qubits: usize, support: &[Bitstring]) -> Result<Self> {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        for b in support {
            b.expect_len(num_qubits)?;
            amps[b.index()] = C64::new(1.0, 0.0);
        }
        let count = amps.iter().filter(|a| a.re != 0.0).count();
        if count == 0 {
            return Err(Error::InvalidAnsatz("empty support".into()));
        }
        let a = 1.0 / (count as f64).sqrt();
        amps.iter_mut().for_each(|z| *z *= a);
        Ok(StateVector { num_qubits, amps })
    }

    /// Takes ownership of raw amplitudes; the caller is responsible for normalization.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() {
            return Err(Error::InvalidAnsatz(format!(
                "{dim} amplitudes is not a power of two"
            )));
        }
        Ok(StateVector {
            num_qubits: dim.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, bits: &Bitstring) -> C64 {
        self.amps[bits.index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    pub fn apply_1q(&mut self, qubit: usize, gate: Gate1) -> Result<()> {
        check_qubit(qubit, self.num_qubits)?;
        let mask = self.mask(qubit);
        match gate.diagonal() {
            Some(d) => kernels::apply_diag_1q(&mut self.amps, mask, &d),
            None => kernels::apply_1q(&mut self.amps, mask, &gate.matrix()),
        }
        Ok(())
    }

    pub fn apply_2q(&mut self, a: usize, b: usize, gate: Gate2) -> Result<()> {
        check_pair(a, b, self.num_qubits)?;
        let (hi, lo) = (self.mask(a), self.mask(b));
        match gate.diagonal() {
            Some(d) => kernels::apply_diag_2q(&mut self.amps, hi, lo, &d),
            None => kernels::apply_2q(&mut self.amps, hi, lo, &gate.matrix()),
        }
        Ok(())
    }
}

impl QuantumState for StateVector {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        match *gate {
            Gate::One(q, g) => self.apply_1q(q, g),
            Gate::Two(a, b, g) => self.apply_2q(a, b, g),
        }
    }

    fn apply_diagonal_phase(&mut self, diagonal: &[f64], angle: f64, scale: f64) -> Result<()> {
        check_diagonal(diagonal.len(), self.amps.len())?;
        let k = -angle / scale;
        for (a, &d) in self.amps.iter_mut().zip(diagonal) {
            *a *= C64::from_polar(1.0, k * d);
        }
        Ok(())
    }

    fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

pub(crate) fn check_qubit(q: usize, n: usize) -> Result<()> {
    if q < n {
        Ok(())
    } else {
        Err(Error::QubitOutOfRange {
            index: q,
            qubits: n,
        })
    }
}

pub(crate) fn check_pair(a: usize, b: usize, n: usize) -> Result<()> {
    check_qubit(a, n)?;
    check_qubit(b, n)?;
    if a == b {
        Err(Error::QubitClash(a))
    } else {
        Ok(())
    }
}

pub(crate) fn check_diagonal(got: usize, expected: usize) -> Result<()> {
    if got == expected {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}
