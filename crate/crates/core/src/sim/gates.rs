use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub type Matrix2 = [[C64; 2]; 2];
pub type Matrix4 = [[C64; 4]; 4];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Single-qubit gates used by the ansatz circuits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate1 {
    H,
    X,
    /// `exp(-i theta X / 2)`
    Rx(f64),
    /// `exp(-i theta Z / 2) = diag(e^{-i theta/2}, e^{i theta/2})`
    Rz(f64),
}

impl Gate1 {
    pub fn matrix(&self) -> Matrix2 {
        match *self {
            Gate1::H => {
                let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[s, s], [s, -s]]
            }
            Gate1::X => [[ZERO, ONE], [ONE, ZERO]],
            Gate1::Rx(theta) => {
                let c = C64::new((theta / 2.0).cos(), 0.0);
                let s = C64::new(0.0, -(theta / 2.0).sin());
                [[c, s], [s, c]]
            }
            Gate1::Rz(theta) => {
                let [d0, d1] = rz_diagonal(theta);
                [[d0, ZERO], [ZERO, d1]]
            }
        }
    }

    pub fn diagonal(&self) -> Option<[C64; 2]> {
        match *self {
            Gate1::Rz(theta) => Some(rz_diagonal(theta)),
            _ => None,
        }
    }
}

fn rz_diagonal(theta: f64) -> [C64; 2] {
    [
        C64::from_polar(1.0, -theta / 2.0),
        C64::from_polar(1.0, theta / 2.0),
    ]
}

/// Two-qubit gates. Matrices use the basis `|ab>` with the first qubit as the high bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate2 {
    /// Control on the first qubit.
    Cnot,
    /// `exp(-i theta Z⊗Z / 2)`
    Rzz(f64),
    /// `exp(-i theta X⊗X / 2)`
    Rxx(f64),
    /// `exp(-i theta Y⊗Y / 2)`
    Ryy(f64),
}

impl Gate2 {
    pub fn matrix(&self) -> Matrix4 {
        let mut m = [[ZERO; 4]; 4];
        match *self {
            Gate2::Cnot => {
                m[0][0] = ONE;
                m[1][1] = ONE;
                m[2][3] = ONE;
                m[3][2] = ONE;
            }
            Gate2::Rzz(theta) => {
                for (i, d) in rzz_diagonal(theta).into_iter().enumerate() {
                    m[i][i] = d;
                }
            }
            Gate2::Rxx(theta) => {
                let c = C64::new((theta / 2.0).cos(), 0.0);
                let s = C64::new(0.0, -(theta / 2.0).sin());
                for i in 0..4 {
                    m[i][i] = c;
                    m[i][3 - i] = s;
                }
            }
            Gate2::Ryy(theta) => {
                let c = C64::new((theta / 2.0).cos(), 0.0);
                let s = C64::new(0.0, -(theta / 2.0).sin());
                for (i, row) in m.iter_mut().enumerate() {
                    row[i] = c;
                }
                // Y⊗Y has -1 on |00><11|, |11><00| and +1 on |01><10|, |10><01|.
                m[0][3] = -s;
                m[3][0] = -s;
                m[1][2] = s;
                m[2][1] = s;
            }
        }
        m
    }

    pub fn diagonal(&self) -> Option<[C64; 4]> {
        match *self {
            Gate2::Rzz(theta) => Some(rzz_diagonal(theta)),
            _ => None,
        }
    }
}

fn rzz_diagonal(theta: f64) -> [C64; 4] {
    let even = C64::from_polar(1.0, -theta / 2.0);
    let odd = C64::from_polar(1.0, theta / 2.0);
    [even, odd, odd, even]
}

/// A gate bound to its qubits, as it appears in a circuit listing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    One(usize, Gate1),
    Two(usize, usize, Gate2),
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::One(_, Gate1::H) => "h",
            Gate::One(_, Gate1::X) => "x",
            Gate::One(_, Gate1::Rx(_)) => "rx",
            Gate::One(_, Gate1::Rz(_)) => "rz",
            Gate::Two(_, _, Gate2::Cnot) => "cx",
            Gate::Two(_, _, Gate2::Rzz(_)) => "rzz",
            Gate::Two(_, _, Gate2::Rxx(_)) => "rxx",
            Gate::Two(_, _, Gate2::Ryy(_)) => "ryy",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::One(q, _) => vec![q],
            Gate::Two(a, b, _) => vec![a, b],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::One(_, Gate1::Rx(t) | Gate1::Rz(t)) => Some(t),
            Gate::Two(_, _, Gate2::Rzz(t) | Gate2::Rxx(t) | Gate2::Ryy(t)) => Some(t),
            _ => None,
        }
    }

    pub fn record(&self) -> GateRecord {
        GateRecord {
            name: self.name().to_string(),
            qubits: self.qubits(),
            angle: self.angle(),
        }
    }
}

/// Serializable form of a [`Gate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub name: String,
    pub qubits: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unitarity_error<const N: usize>(m: &[[C64; N]; N]) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                let dot: C64 = (0..N).map(|k| m[i][k] * m[j][k].conj()).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - C64::new(want, 0.0)).norm());
            }
        }
        worst
    }

    #[test]
    fn all_gates_unitary() {
        for theta in [-2.7, -0.3, 0.0, 0.9, 3.1] {
            for g in [Gate1::H, Gate1::X, Gate1::Rx(theta), Gate1::Rz(theta)] {
                assert!(unitarity_error(&g.matrix()) < 1e-12, "{g:?}");
            }
            for g in [
                Gate2::Cnot,
                Gate2::Rzz(theta),
                Gate2::Rxx(theta),
                Gate2::Ryy(theta),
            ] {
                assert!(unitarity_error(&g.matrix()) < 1e-12, "{g:?}");
            }
        }
    }

    #[test]
    fn rx_pi_is_minus_i_x() {
        let m = Gate1::Rx(std::f64::consts::PI).matrix();
        assert!(m[0][0].norm() < 1e-15);
        assert!((m[1][0] - C64::new(0.0, -1.0)).norm() < 1e-15);
    }
}
