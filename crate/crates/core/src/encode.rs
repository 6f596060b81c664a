//! Penalty QUBO construction and its Ising / diagonal exports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::instance::{ConstraintSet, LinearConstraint, LinkIndex, Relation, VrpInstance};

/// Hard cap on the number of variables a dense cost diagonal may have.
pub const MAX_DIAGONAL_BITS: usize = 24;

/// How the penalty weight `P` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyRule {
    /// `P = factor * sum_{i != j} |w_ij|`.
    SumOfDistances {
        factor: f64,
    },
    Fixed(f64),
}

impl Default for PenaltyRule {
    fn default() -> Self {
        PenaltyRule::SumOfDistances { factor: 2.0 }
    }
}

impl PenaltyRule {
    pub fn weight(&self, inst: &VrpInstance) -> f64 {
        match *self {
            PenaltyRule::SumOfDistances { factor } => {
                let total: f64 = inst
                    .links()
                    .links()
                    .iter()
                    .map(|l| inst.distance(l.from, l.to).abs())
                    .sum();
                factor * total
            }
            PenaltyRule::Fixed(p) => p,
        }
    }
}

/// One constraint's penalty polynomial before scaling by `P`, with integer
/// coefficients obtained from `x^2 = x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyTerm {
    pub label: String,
    pub constant: i64,
    pub linear: Vec<(usize, i64)>,
    pub quadratic: Vec<((usize, usize), i64)>,
}

impl PenaltyTerm {
    fn from_constraint(c: &LinearConstraint) -> Result<Self> {
        let mut vars = c.vars.clone();
        vars.sort_unstable();
        vars.dedup();
        if vars.len() != c.vars.len() {
            return Err(Error::UnsupportedConstraint(format!(
                "{}: repeated variable",
                c.label
            )));
        }
        match c.relation {
            // (sum x - r)^2 = r^2 + (1 - 2r) sum x + 2 sum_{i<j} x_i x_j
            Relation::Equal => {
                let r = c.rhs;
                let linear = vars.iter().map(|&v| (v, 1 - 2 * r)).collect();
                let quadratic = pairs(&vars).map(|p| (p, 2)).collect();
                Ok(PenaltyTerm { label: c.label.clone(), constant: r * r, linear, quadratic })
            }
            // (1 - x)(1 - y) = 1 - x - y + xy
            Relation::AtLeast if c.rhs == 1 && vars.len() <= 2 => {
                let linear = vars.iter().map(|&v| (v, -1)).collect();
                let quadratic = pairs(&vars).map(|p| (p, 1)).collect();
                Ok(PenaltyTerm { label: c.label.clone(), constant: 1, linear, quadratic })
            }
            Relation::AtLeast => Err(Error::UnsupportedConstraint(format!(
                "{}: at-least penalties are defined only for `x (+ y) >= 1`, got {} variables with rhs {}",
                c.label,
                vars.len(),
                c.rhs
            ))),
        }
    }

    pub fn value(&self, bits: &Bitstring) -> i64 {
        let lin: i64 = self
            .linear
            .iter()
            .filter(|(v, _)| bits.get(*v))
            .map(|(_, a)| a)
            .sum();
        let quad: i64 = self
            .quadratic
            .iter()
            .filter(|((i, j), _)| bits.get(*i) && bits.get(*j))
            .map(|(_, a)| a)
            .sum();
        self.constant + lin + quad
    }
}

fn pairs(vars: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    vars.iter()
        .enumerate()
        .flat_map(move |(a, &i)| vars[a + 1..].iter().map(move |&j| (i.min(j), i.max(j))))
}

/// Pair-keyed maps travel as `[[i, j, value], ...]` since JSON keys must be strings.
mod pair_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<(usize, usize), f64>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let rows: Vec<(usize, usize, f64)> = map.iter().map(|(&(i, j), &v)| (i, j, v)).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<(usize, usize), f64>, D::Error> {
        let rows = Vec::<(usize, usize, f64)>::deserialize(d)?;
        Ok(rows.into_iter().map(|(i, j, v)| ((i, j), v)).collect())
    }
}

/// `C(x) = c + sum_i q_i x_i + sum_{i<j} Q_ij x_i x_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboProblem {
    pub constant: f64,
    pub linear: Vec<f64>,
    /// Upper-triangular couplings keyed by `(i, j)` with `i < j`.
    #[serde(with = "pair_map")]
    pub quadratic: BTreeMap<(usize, usize), f64>,
    pub penalty: f64,
    /// Route-cost coefficient per variable.
    pub costs: Vec<f64>,
    /// Per-constraint penalty polynomials, in constraint order.
    pub terms: Vec<PenaltyTerm>,
}

impl QuboProblem {
    pub fn var_count(&self) -> usize {
        self.linear.len()
    }

    pub fn value(&self, bits: &Bitstring) -> Result<f64> {
        bits.expect_len(self.var_count())?;
        Ok(self.value_unchecked(bits.bits()))
    }

    fn value_unchecked(&self, bits: &[bool]) -> f64 {
        let lin: f64 = self
            .linear
            .iter()
            .zip(bits)
            .filter(|(_, &b)| b)
            .map(|(q, _)| q)
            .sum();
        let quad: f64 = self
            .quadratic
            .iter()
            .filter(|((i, j), _)| bits[*i] && bits[*j])
            .map(|(_, q)| q)
            .sum();
        self.constant + lin + quad
    }

    /// Evaluates the uncollected form: route cost plus `P` times each
    /// constraint's penalty polynomial.
    pub fn term_sum_value(&self, bits: &Bitstring) -> Result<f64> {
        bits.expect_len(self.var_count())?;
        let cost: f64 = self
            .costs
            .iter()
            .zip(bits.bits())
            .filter(|(_, &b)| b)
            .map(|(w, _)| w)
            .sum();
        let penalties: f64 = self
            .terms
            .iter()
            .map(|t| self.penalty * t.value(bits) as f64)
            .sum();
        Ok(cost + penalties)
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.quadratic
            .get(&(i.min(j), i.max(j)))
            .copied()
            .unwrap_or(0.0)
    }
}

/// Folds each constraint into the route-cost objective as a quadratic penalty.
pub fn penalize(inst: &VrpInstance, cs: &ConstraintSet, rule: PenaltyRule) -> Result<QuboProblem> {
    let index = inst.links();
    let n = index.len();
    if cs.var_count != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: cs.var_count,
        });
    }
    if let Some(bad) = cs.iter().flat_map(|c| c.vars.iter()).find(|&&v| v >= n) {
        return Err(Error::UnsupportedConstraint(format!(
            "variable {bad} out of range"
        )));
    }
    let penalty = rule.weight(inst);
    if !(penalty.is_finite() && penalty > 0.0) {
        return Err(Error::InvalidInstance(format!(
            "penalty weight must be positive, got {penalty}"
        )));
    }

    let terms = cs
        .iter()
        .map(PenaltyTerm::from_constraint)
        .collect::<Result<Vec<_>>>()?;

    // Integer coefficients are summed across constraints first, then scaled once.
    let mut constant = 0i64;
    let mut linear = vec![0i64; n];
    let mut quadratic: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for t in &terms {
        constant += t.constant;
        for &(v, a) in &t.linear {
            linear[v] += a;
        }
        for &(p, a) in &t.quadratic {
            *quadratic.entry(p).or_default() += a;
        }
    }

    let costs: Vec<f64> = index
        .links()
        .iter()
        .map(|l| inst.distance(l.from, l.to))
        .collect();
    Ok(QuboProblem {
        constant: penalty * constant as f64,
        linear: costs
            .iter()
            .zip(&linear)
            .map(|(w, &a)| w + penalty * a as f64)
            .collect(),
        quadratic: quadratic
            .into_iter()
            .filter(|&(_, a)| a != 0)
            .map(|(p, a)| (p, penalty * a as f64))
            .collect(),
        penalty,
        costs,
        terms,
    })
}

/// Which spin value a set bit maps to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinConvention {
    /// `x = (z + 1) / 2`: a set bit is spin +1.
    Aligned,
    /// `x = (1 - z) / 2`: a set bit is spin -1, matching Pauli-Z on `|1>`.
    Computational,
}

impl SpinConvention {
    pub fn spin(&self, bit: bool) -> f64 {
        match (self, bit) {
            (SpinConvention::Aligned, true) | (SpinConvention::Computational, false) => 1.0,
            _ => -1.0,
        }
    }
}

/// `E(z) = c0 + sum_{i<j} J_ij z_i z_j + sum_i h_i z_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingCoefficients {
    pub constant: f64,
    pub field: Vec<f64>,
    #[serde(with = "pair_map")]
    pub coupling: BTreeMap<(usize, usize), f64>,
    pub convention: SpinConvention,
}

impl IsingCoefficients {
    pub fn var_count(&self) -> usize {
        self.field.len()
    }

    pub fn energy(&self, bits: &Bitstring) -> Result<f64> {
        bits.expect_len(self.var_count())?;
        let z: Vec<f64> = bits
            .bits()
            .iter()
            .map(|&b| self.convention.spin(b))
            .collect();
        let field: f64 = self.field.iter().zip(&z).map(|(h, z)| h * z).sum();
        let coupling: f64 = self
            .coupling
            .iter()
            .map(|(&(i, j), jij)| jij * z[i] * z[j])
            .sum();
        Ok(self.constant + field + coupling)
    }

    /// Largest coefficient magnitude over fields and couplings.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.field
            .iter()
            .chain(self.coupling.values())
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

pub fn to_ising(qubo: &QuboProblem, convention: SpinConvention) -> IsingCoefficients {
    let n = qubo.var_count();
    let mut constant = qubo.constant;
    let mut field = vec![0.0; n];
    let mut coupling = BTreeMap::new();
    for (&(i, j), &q) in &qubo.quadratic {
        coupling.insert((i, j), q / 4.0);
        field[i] += q / 4.0;
        field[j] += q / 4.0;
        constant += q / 4.0;
    }
    for (i, &q) in qubo.linear.iter().enumerate() {
        field[i] += q / 2.0;
        constant += q / 2.0;
    }
    if convention == SpinConvention::Computational {
        field.iter_mut().for_each(|h| *h = -*h);
    }
    IsingCoefficients {
        constant,
        field,
        coupling,
        convention,
    }
}

/// Energy scale that maps the computational-convention coefficients into `[-1, 1]`.
pub fn default_energy_scale(qubo: &QuboProblem) -> f64 {
    let s = to_ising(qubo, SpinConvention::Computational).max_abs_coefficient();
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

/// Diagonal of the cost Hamiltonian in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CostOperator {
    num_qubits: usize,
    diagonal: Vec<f64>,
    /// Amount subtracted from every QUBO value (zero unless the constant was dropped).
    shift: f64,
}

impl CostOperator {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn entry(&self, bits: &Bitstring) -> f64 {
        self.diagonal[bits.index()]
    }

    /// QUBO value of a basis index, undoing any dropped constant.
    pub fn qubo_value(&self, index: usize) -> f64 {
        self.diagonal[index] + self.shift
    }

    pub fn argmin(&self) -> usize {
        self.diagonal
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

pub fn to_cost_operator(qubo: &QuboProblem, drop_constant: bool) -> Result<CostOperator> {
    let n = qubo.var_count();
    if n > MAX_DIAGONAL_BITS {
        return Err(Error::TooLarge {
            size: n,
            limit: MAX_DIAGONAL_BITS,
        });
    }
    let shift = if drop_constant {
        to_ising(qubo, SpinConvention::Computational).constant
    } else {
        0.0
    };
    let mut bits = vec![false; n];
    let diagonal = (0..1usize << n)
        .map(|idx| {
            for (q, b) in bits.iter_mut().enumerate() {
                *b = (idx >> (n - 1 - q)) & 1 == 1;
            }
            qubo.value_unchecked(&bits) - shift
        })
        .collect();
    Ok(CostOperator {
        num_qubits: n,
        diagonal,
        shift,
    })
}

/// Everything needed to audit an encoding by eye.
#[derive(Debug, Clone, Serialize)]
pub struct EncodingReport {
    pub variables: Vec<String>,
    pub constraints: Vec<String>,
    pub penalty: f64,
    pub qubo: QuboProblem,
    pub ising_aligned: IsingCoefficients,
    pub ising_computational: IsingCoefficients,
    pub energy_scale: f64,
}

impl EncodingReport {
    pub fn new(index: &LinkIndex, cs: &ConstraintSet, qubo: &QuboProblem) -> Self {
        EncodingReport {
            variables: index.links().iter().map(|l| l.to_string()).collect(),
            constraints: cs.iter().map(|c| c.display_with(index)).collect(),
            penalty: qubo.penalty,
            qubo: qubo.clone(),
            ising_aligned: to_ising(qubo, SpinConvention::Aligned),
            ising_computational: to_ising(qubo, SpinConvention::Computational),
            energy_scale: default_energy_scale(qubo),
        }
    }
}
