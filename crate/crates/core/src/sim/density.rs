use num_complex::Complex64 as C64;

use super::gates::{Gate, Gate1, Gate2};
use super::kernels;
use super::statevector::{check_diagonal, check_pair, check_qubit, StateVector};
use super::QuantumState;
use crate::error::{Error, Result};

/// Dense density matrix stored row-major.
///
/// Treating `rho[r][c]` as amplitude `r * dim + c` of a `2n`-qubit vector lets
/// `U rho U^dagger` reuse the statevector kernels: `U` acts on the row bits and
/// `conj(U)` on the column bits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn zero(num_qubits: usize) -> Self {
        Self::from_pure(&StateVector::zero(num_qubits))
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let amps = state.amplitudes();
        let data = amps
            .iter()
            .flat_map(|r| amps.iter().map(move |c| r * c.conj()))
            .collect();
        DensityMatrix {
            num_qubits: state.num_qubits(),
            data,
        }
    }

    /// `I / 2^n`
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0 / dim as f64, 0.0);
        }
        DensityMatrix { num_qubits, data }
    }

    /// Convex mixture `sum_k w_k |psi_k><psi_k|` with weights normalized to one.
    pub fn mixture(states: &[(f64, StateVector)]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidAnsatz("empty mixture".into()))?;
        let total: f64 = states.iter().map(|(w, _)| w).sum();
        let mut rho = DensityMatrix::from_pure(&first.1);
        rho.data.iter_mut().for_each(|z| *z *= first.0 / total);
        for (w, s) in &states[1..] {
            if s.num_qubits() != rho.num_qubits {
                return Err(Error::LengthMismatch {
                    expected: rho.num_qubits,
                    got: s.num_qubits(),
                });
            }
            let term = DensityMatrix::from_pure(s);
            for (a, b) in rho.data.iter_mut().zip(term.data) {
                *a += b * (w / total);
            }
        }
        Ok(rho)
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    /// `Tr(rho^2)`
    pub fn purity(&self) -> f64 {
        // rho is Hermitian, so Tr(rho^2) = sum |rho_rc|^2.
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.entry(r, c) - self.entry(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise distance to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn row_mask(&self, qubit: usize) -> usize {
        1 << (2 * self.num_qubits - 1 - qubit)
    }

    fn col_mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    pub fn apply_1q(&mut self, qubit: usize, gate: Gate1) -> Result<()> {
        check_qubit(qubit, self.num_qubits)?;
        let (rm, cm) = (self.row_mask(qubit), self.col_mask(qubit));
        match gate.diagonal() {
            Some(d) => {
                kernels::apply_diag_1q(&mut self.data, rm, &d);
                kernels::apply_diag_1q(&mut self.data, cm, &d.map(|z| z.conj()));
            }
            None => {
                let m = gate.matrix();
                kernels::apply_1q(&mut self.data, rm, &m);
                kernels::apply_1q(&mut self.data, cm, &kernels::conj2(&m));
            }
        }
        Ok(())
    }

    pub fn apply_2q(&mut self, a: usize, b: usize, gate: Gate2) -> Result<()> {
        check_pair(a, b, self.num_qubits)?;
        let (ra, rb) = (self.row_mask(a), self.row_mask(b));
        let (ca, cb) = (self.col_mask(a), self.col_mask(b));
        match gate.diagonal() {
            Some(d) => {
                kernels::apply_diag_2q(&mut self.data, ra, rb, &d);
                kernels::apply_diag_2q(&mut self.data, ca, cb, &d.map(|z| z.conj()));
            }
            None => {
                let m = gate.matrix();
                kernels::apply_2q(&mut self.data, ra, rb, &m);
                kernels::apply_2q(&mut self.data, ca, cb, &kernels::conj4(&m));
            }
        }
        Ok(())
    }

    /// Depolarizing channel on `qubits`:
    /// `rho -> (1 - lambda) rho + lambda Tr_T(rho) ⊗ I / 2^k`.
    ///
    /// `lambda` may range over `[0, 4^k / (4^k - 1)]`.
    pub fn depolarize(&mut self, qubits: &[usize], lambda: f64) -> Result<()> {
        let k = qubits.len();
        if k == 0 {
            return Ok(());
        }
        let max = depolarizing_max(k);
        if !(0.0..=max).contains(&lambda) || lambda.is_nan() {
            return Err(Error::NoiseOutOfRange {
                value: lambda,
                max,
                qubits: k,
            });
        }
        let mut target = 0usize;
        for (i, &q) in qubits.iter().enumerate() {
            check_qubit(q, self.num_qubits)?;
            if qubits[..i].contains(&q) {
                return Err(Error::QubitClash(q));
            }
            target |= self.col_mask(q);
        }
        if lambda == 0.0 {
            return Ok(());
        }

        let dim = self.dim();
        let subsets: Vec<usize> = submasks(target).collect();
        let weight = lambda / subsets.len() as f64;
        let keep = 1.0 - lambda;
        for r0 in (0..dim).filter(|r| r & target == 0) {
            for c0 in (0..dim).filter(|c| c & target == 0) {
                let reduced: C64 = subsets
                    .iter()
                    .map(|&t| self.data[(r0 | t) * dim + (c0 | t)])
                    .sum();
                for &u in &subsets {
                    for &v in &subsets {
                        let z = &mut self.data[(r0 | u) * dim + (c0 | v)];
                        *z *= keep;
                        if u == v {
                            *z += reduced * weight;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Upper limit of the depolarizing parameter on `k` qubits.
pub fn depolarizing_max(k: usize) -> f64 {
    let d2 = 4f64.powi(k as i32);
    d2 / (d2 - 1.0)
}

fn submasks(mask: usize) -> impl Iterator<Item = usize> {
    // Walk submasks in increasing order: 0, then each successor.
    let mut next = Some(0usize);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask {
            None
        } else {
            Some(((cur | !mask).wrapping_add(1)) & mask)
        };
        Some(cur)
    })
}

impl QuantumState for DensityMatrix {
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
        let dim = self.dim();
        check_diagonal(diagonal.len(), dim)?;
        let phases: Vec<C64> = diagonal
            .iter()
            .map(|&d| C64::from_polar(1.0, -angle * d / scale))
            .collect();
        for (r, row) in self.data.chunks_mut(dim).enumerate() {
            for (z, pc) in row.iter_mut().zip(&phases) {
                *z *= phases[r] * pc.conj();
            }
        }
        Ok(())
    }

    fn probabilities(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.entry(i, i).re.max(0.0))
            .collect()
    }
}
