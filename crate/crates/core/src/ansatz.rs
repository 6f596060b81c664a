//! Initial states, mixers and the layered QAOA evolution.
//!
//! Two ansatz families share one code path. Standard QAOA starts from `|+>^n`
//! and mixes with `RX(2 beta)` on every qubit. The constraint-aware ansatz
//! starts from an equal superposition over assignments that satisfy selected
//! two-variable one-hot constraints, and mixes with `exp(-i beta (XX + YY))`
//! on disjoint protected pairs plus `RX(2 lambda beta)` on the remaining
//! qubits.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::encode::{
    to_cost_operator, to_ising, CostOperator, IsingCoefficients, QuboProblem, SpinConvention,
};
use crate::error::{Error, Result};
use crate::instance::{ConstraintSet, LinkIndex};
use crate::sim::{
    apply_noisy_gate, DensityMatrix, Gate, Gate1, Gate2, NoiseModel, QuantumState, StateVector,
};

pub const GAMMA_BOUNDS: (f64, f64) = (-PI, PI);
pub const BETA_BOUNDS: (f64, f64) = (0.0, FRAC_PI_2);

/// Variables tied together by one-hot pair constraints, with every
/// assignment of them that satisfies all those constraints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    /// Qubits in ascending order.
    pub qubits: Vec<usize>,
    /// Admissible assignments, each listed in `qubits` order.
    pub patterns: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintGroups {
    pub components: Vec<Component>,
    pub xy_pairs: Vec<(usize, usize)>,
    pub x_qubits: Vec<usize>,
}

/// Groups the one-hot pair constraints and picks disjoint XY pairs.
///
/// Pairs whose two links leave the same node are matched first (they form a
/// per-node register of outgoing links), then the remaining candidates in
/// constraint order. Every qubit left unmatched receives an X term.
pub fn derive_constraint_groups(cs: &ConstraintSet, index: &LinkIndex) -> Result<ConstraintGroups> {
    let n = index.len();
    let selected: Vec<(usize, usize)> = cs
        .iter()
        .filter(|c| c.is_pair_one_hot())
        .map(|c| (c.vars[0], c.vars[1]))
        .collect();

    // Union-find over variables touched by the selected constraints.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(a, b) in &selected {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }

    let mut roots: Vec<usize> = Vec::new();
    for &(a, _) in &selected {
        let r = find(&mut parent, a);
        if !roots.contains(&r) {
            roots.push(r);
        }
    }
    let mut components = Vec::with_capacity(roots.len());
    for root in roots {
        let qubits: Vec<usize> = (0..n)
            .filter(|&v| selected.iter().any(|&(a, b)| a == v || b == v))
            .filter(|&v| find(&mut parent, v) == root)
            .collect();
        let local: Vec<(usize, usize)> = selected
            .iter()
            .filter(|(a, _)| qubits.contains(a))
            .map(|&(a, b)| {
                let pos = |v| qubits.iter().position(|&q| q == v).unwrap();
                (pos(a), pos(b))
            })
            .collect();
        let width = qubits.len();
        let patterns: Vec<Vec<bool>> = Bitstring::all(width)
            .map(|b| b.bits().to_vec())
            .filter(|p| local.iter().all(|&(a, b)| p[a] != p[b]))
            .collect();
        if patterns.is_empty() {
            return Err(Error::InfeasibleStructure(qubits));
        }
        components.push(Component { qubits, patterns });
    }

    let same_origin = |&(a, b): &(usize, usize)| index.link(a).from == index.link(b).from;
    let ordered = selected
        .iter()
        .filter(|p| same_origin(p))
        .chain(selected.iter().filter(|p| !same_origin(p)));
    let mut used = vec![false; n];
    let mut xy_pairs = Vec::new();
    for &(a, b) in ordered {
        if !used[a] && !used[b] {
            used[a] = true;
            used[b] = true;
            xy_pairs.push((a.min(b), a.max(b)));
        }
    }
    xy_pairs.sort_unstable();
    let x_qubits = (0..n).filter(|&q| !used[q]).collect();

    Ok(ConstraintGroups {
        components,
        xy_pairs,
        x_qubits,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    Standard,
    ConstraintAware,
}

impl AnsatzKind {
    pub fn label(&self) -> &'static str {
        match self {
            AnsatzKind::Standard => "standard",
            AnsatzKind::ConstraintAware => "constraint_aware",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `|+>^n`
    Uniform,
    /// Product over components of their admissible patterns, `|+>` elsewhere.
    Structured(Vec<Component>),
}

/// Everything needed to synthesize the circuit besides the angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    pub num_qubits: usize,
    pub depth: usize,
    /// Weight of the X terms; fixed to 1 for the standard ansatz.
    pub lambda: f64,
    pub xy_pairs: Vec<(usize, usize)>,
    pub x_qubits: Vec<usize>,
    pub init: InitialState,
}

impl AnsatzSpec {
    pub fn standard(num_qubits: usize, depth: usize) -> Self {
        AnsatzSpec {
            kind: AnsatzKind::Standard,
            num_qubits,
            depth,
            lambda: 1.0,
            xy_pairs: Vec::new(),
            x_qubits: (0..num_qubits).collect(),
            init: InitialState::Uniform,
        }
    }

    pub fn constraint_aware(
        groups: &ConstraintGroups,
        num_qubits: usize,
        depth: usize,
        lambda: f64,
    ) -> Result<Self> {
        let init = if groups.components.is_empty() {
            InitialState::Uniform
        } else {
            InitialState::Structured(groups.components.clone())
        };
        Self::custom(
            AnsatzKind::ConstraintAware,
            num_qubits,
            depth,
            lambda,
            groups.xy_pairs.clone(),
            groups.x_qubits.clone(),
            init,
        )
    }

    pub fn custom(
        kind: AnsatzKind,
        num_qubits: usize,
        depth: usize,
        lambda: f64,
        xy_pairs: Vec<(usize, usize)>,
        x_qubits: Vec<usize>,
        init: InitialState,
    ) -> Result<Self> {
        let spec = AnsatzSpec {
            kind,
            num_qubits,
            depth,
            lambda,
            xy_pairs,
            x_qubits,
            init,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_qubits;
        let bad = |msg: String| Err(Error::InvalidAnsatz(msg));
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return bad(format!(
                "lambda must be finite and nonnegative, got {}",
                self.lambda
            ));
        }
        let mut seen = vec![false; n];
        for &(a, b) in &self.xy_pairs {
            for q in [a, b] {
                if q >= n {
                    return bad(format!("xy pair qubit {q} out of range"));
                }
                if seen[q] {
                    return bad(format!("qubit {q} appears in overlapping xy pairs"));
                }
                seen[q] = true;
            }
            if a == b {
                return bad(format!("xy pair ({a}, {b}) repeats a qubit"));
            }
        }
        for &q in &self.x_qubits {
            if q >= n {
                return bad(format!("x qubit {q} out of range"));
            }
            if seen[q] {
                return bad(format!(
                    "x qubit {q} is already in an xy pair or listed twice"
                ));
            }
            seen[q] = true;
        }
        if let InitialState::Structured(components) = &self.init {
            let mut covered = vec![false; n];
            for c in components {
                if c.patterns.is_empty() {
                    return Err(Error::InfeasibleStructure(c.qubits.clone()));
                }
                for &q in &c.qubits {
                    if q >= n || covered[q] {
                        return bad(format!("component qubit {q} out of range or shared"));
                    }
                    covered[q] = true;
                }
                if c.patterns.iter().any(|p| p.len() != c.qubits.len()) {
                    return bad("pattern width differs from component size".into());
                }
            }
            for support in self.init_support() {
                if self
                    .xy_pairs
                    .iter()
                    .any(|&(a, b)| support.get(a) == support.get(b))
                {
                    return bad(format!(
                        "initial basis state {support} is not one-hot on every xy pair"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Basis states carrying equal amplitude in the initial state.
    pub fn init_support(&self) -> Vec<Bitstring> {
        let n = self.num_qubits;
        match &self.init {
            InitialState::Uniform => Bitstring::all(n).collect(),
            InitialState::Structured(components) => {
                let mut partial = vec![Bitstring::zeros(n)];
                for c in components {
                    partial = partial
                        .into_iter()
                        .flat_map(|base| {
                            c.patterns.iter().map(move |p| {
                                let mut b = base.clone();
                                for (&q, &v) in c.qubits.iter().zip(p) {
                                    b.set(q, v);
                                }
                                b
                            })
                        })
                        .collect();
                }
                let free: Vec<usize> = (0..n)
                    .filter(|q| !components.iter().any(|c| c.qubits.contains(q)))
                    .collect();
                for q in free {
                    partial = partial
                        .into_iter()
                        .flat_map(|b| {
                            let mut one = b.clone();
                            one.set(q, true);
                            [b, one]
                        })
                        .collect();
                }
                partial.sort_by_key(|b| b.index());
                partial
            }
        }
    }
}

/// Cost-layer data: the diagonal for the exact engine, the
/// computational-convention Ising terms for the gate engine, and the energy scale.
#[derive(Debug, Clone)]
pub struct CostModel {
    pub operator: CostOperator,
    pub ising: IsingCoefficients,
    pub scale: f64,
}

impl CostModel {
    pub fn new(qubo: &QuboProblem, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "energy scale must be positive, got {scale}"
            )));
        }
        Ok(CostModel {
            operator: to_cost_operator(qubo, true)?,
            ising: to_ising(qubo, SpinConvention::Computational),
            scale,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.operator.num_qubits()
    }

    /// Full QUBO value `C(x)` of a basis index.
    pub fn qubo_value(&self, index: usize) -> f64 {
        self.operator.qubo_value(index)
    }
}

/// QAOA angles. `gamma` lives in `[-pi, pi]^p`, `beta` in `[0, pi/2]^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterPoint {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
}

impl ParameterPoint {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if gamma.len() != beta.len() {
            return Err(Error::ParameterLength {
                expected: gamma.len(),
                got: beta.len(),
            });
        }
        Ok(ParameterPoint { gamma, beta })
    }

    pub fn depth(&self) -> usize {
        self.gamma.len()
    }

    pub fn random<R: Rng + ?Sized>(depth: usize, rng: &mut R) -> Self {
        let gamma = (0..depth)
            .map(|_| rng.random_range(GAMMA_BOUNDS.0..=GAMMA_BOUNDS.1))
            .collect();
        let beta = (0..depth)
            .map(|_| rng.random_range(BETA_BOUNDS.0..=BETA_BOUNDS.1))
            .collect();
        ParameterPoint { gamma, beta }
    }

    /// `[gamma_1..gamma_p, beta_1..beta_p]`
    pub fn to_flat(&self) -> Vec<f64> {
        self.gamma.iter().chain(&self.beta).copied().collect()
    }

    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if !flat.len().is_multiple_of(2) {
            return Err(Error::ParameterLength {
                expected: flat.len() + 1,
                got: flat.len(),
            });
        }
        let p = flat.len() / 2;
        Ok(ParameterPoint {
            gamma: flat[..p].to_vec(),
            beta: flat[p..].to_vec(),
        })
    }

    pub fn clamped(&self) -> Self {
        ParameterPoint {
            gamma: self
                .gamma
                .iter()
                .map(|g| g.clamp(GAMMA_BOUNDS.0, GAMMA_BOUNDS.1))
                .collect(),
            beta: self
                .beta
                .iter()
                .map(|b| b.clamp(BETA_BOUNDS.0, BETA_BOUNDS.1))
                .collect(),
        }
    }

    /// Lower and upper bounds matching [`ParameterPoint::to_flat`].
    pub fn flat_bounds(depth: usize) -> (Vec<f64>, Vec<f64>) {
        let lower = [vec![GAMMA_BOUNDS.0; depth], vec![BETA_BOUNDS.0; depth]].concat();
        let upper = [vec![GAMMA_BOUNDS.1; depth], vec![BETA_BOUNDS.1; depth]].concat();
        (lower, upper)
    }
}

/// Direct amplitude load of the initial state.
pub fn initial_statevector(spec: &AnsatzSpec) -> Result<StateVector> {
    match spec.init {
        InitialState::Uniform => Ok(StateVector::uniform(spec.num_qubits)),
        InitialState::Structured(_) => {
            StateVector::equal_superposition(spec.num_qubits, &spec.init_support())
        }
    }
}

/// Gate recipe for the initial state, starting from `|0...0>`.
///
/// A component with two admissible patterns is built from one H on the first
/// qubit where they differ, CNOTs fanning that qubit out to the other
/// differing qubits, and X gates for bits set in the pattern whose pivot is 0.
/// Components with a single pattern need only X gates.
pub fn preparation_circuit(spec: &AnsatzSpec) -> Result<Vec<Gate>> {
    let n = spec.num_qubits;
    let mut gates = Vec::new();
    let components: &[Component] = match &spec.init {
        InitialState::Uniform => &[],
        InitialState::Structured(c) => c,
    };
    for c in components {
        match c.patterns.as_slice() {
            [only] => {
                for (&q, &v) in c.qubits.iter().zip(only) {
                    if v {
                        gates.push(Gate::One(q, Gate1::X));
                    }
                }
            }
            [first, second] => {
                let pivot = (0..c.qubits.len())
                    .find(|&i| first[i] != second[i])
                    .expect("distinct patterns");
                let base = if first[pivot] { second } else { first };
                let other = if first[pivot] { first } else { second };
                let control = c.qubits[pivot];
                gates.push(Gate::One(control, Gate1::H));
                for (i, &q) in c.qubits.iter().enumerate() {
                    if i == pivot {
                        continue;
                    }
                    if base[i] {
                        gates.push(Gate::One(q, Gate1::X));
                    }
                    if base[i] != other[i] {
                        gates.push(Gate::Two(control, q, Gate2::Cnot));
                    }
                }
            }
            many => {
                return Err(Error::InvalidAnsatz(format!(
                    "no gate recipe for a component with {} admissible patterns",
                    many.len()
                )))
            }
        }
    }
    for q in 0..n {
        if !components.iter().any(|c| c.qubits.contains(&q)) {
            gates.push(Gate::One(q, Gate1::H));
        }
    }
    Ok(gates)
}

/// `exp(-i beta H_M)` as gates.
pub fn mixer_gates(spec: &AnsatzSpec, beta: f64) -> Vec<Gate> {
    let mut gates = Vec::with_capacity(2 * spec.xy_pairs.len() + spec.x_qubits.len());
    for &(a, b) in &spec.xy_pairs {
        // XX and YY commute on a pair, so this product is the exact exponential.
        gates.push(Gate::Two(a, b, Gate2::Rxx(2.0 * beta)));
        gates.push(Gate::Two(a, b, Gate2::Ryy(2.0 * beta)));
    }
    for &q in &spec.x_qubits {
        gates.push(Gate::One(q, Gate1::Rx(2.0 * spec.lambda * beta)));
    }
    gates
}

/// `exp(-i gamma H_C / s)` as RZZ and RZ gates, up to a global phase.
pub fn cost_gates(cost: &CostModel, gamma: f64) -> Vec<Gate> {
    let s = cost.scale;
    let couplings = cost
        .ising
        .coupling
        .iter()
        .filter(|(_, &j)| j != 0.0)
        .map(|(&(a, b), &j)| Gate::Two(a, b, Gate2::Rzz(2.0 * gamma * j / s)));
    let fields = cost
        .ising
        .field
        .iter()
        .enumerate()
        .filter(|(_, &h)| h != 0.0)
        .map(|(q, &h)| Gate::One(q, Gate1::Rz(2.0 * gamma * h / s)));
    couplings.chain(fields).collect()
}

pub fn apply_mixer_layer<S: QuantumState>(
    state: &mut S,
    spec: &AnsatzSpec,
    beta: f64,
) -> Result<()> {
    for g in mixer_gates(spec, beta) {
        state.apply_gate(&g)?;
    }
    Ok(())
}

/// Full gate listing: preparation followed by `p` cost/mixer layers.
pub fn circuit(spec: &AnsatzSpec, cost: &CostModel, params: &ParameterPoint) -> Result<Vec<Gate>> {
    check_params(spec, params)?;
    let mut gates = preparation_circuit(spec)?;
    for (&g, &b) in params.gamma.iter().zip(&params.beta) {
        gates.extend(cost_gates(cost, g));
        gates.extend(mixer_gates(spec, b));
    }
    Ok(gates)
}

/// How the cost unitary is realized on a statevector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Direct amplitude load and diagonal phase multiplication.
    Exact,
    /// Gate recipe and RZZ/RZ decomposition.
    Gates,
}

/// Final state plus how many cost and mixer layers were applied.
#[derive(Debug, Clone)]
pub struct Evolution<S> {
    pub state: S,
    pub cost_layers: usize,
    pub mixer_layers: usize,
}

fn check_params(spec: &AnsatzSpec, params: &ParameterPoint) -> Result<()> {
    if params.gamma.len() != spec.depth || params.beta.len() != spec.depth {
        return Err(Error::ParameterLength {
            expected: spec.depth,
            got: params.gamma.len().min(params.beta.len()),
        });
    }
    Ok(())
}

pub fn evolve_statevector(
    spec: &AnsatzSpec,
    cost: &CostModel,
    params: &ParameterPoint,
    engine: Engine,
) -> Result<Evolution<StateVector>> {
    check_params(spec, params)?;
    let mut state = match engine {
        Engine::Exact => initial_statevector(spec)?,
        Engine::Gates => {
            let mut s = StateVector::zero(spec.num_qubits);
            for g in preparation_circuit(spec)? {
                s.apply_gate(&g)?;
            }
            s
        }
    };
    let (mut cost_layers, mut mixer_layers) = (0, 0);
    for (&gamma, &beta) in params.gamma.iter().zip(&params.beta) {
        match engine {
            Engine::Exact => {
                state.apply_diagonal_phase(cost.operator.diagonal(), gamma, cost.scale)?
            }
            Engine::Gates => {
                for g in cost_gates(cost, gamma) {
                    state.apply_gate(&g)?;
                }
            }
        }
        cost_layers += 1;
        apply_mixer_layer(&mut state, spec, beta)?;
        mixer_layers += 1;
    }
    Ok(Evolution {
        state,
        cost_layers,
        mixer_layers,
    })
}

/// Gate-level evolution of a density matrix with optional depolarizing noise.
pub fn evolve_density(
    spec: &AnsatzSpec,
    cost: &CostModel,
    params: &ParameterPoint,
    noise: Option<&NoiseModel>,
) -> Result<Evolution<DensityMatrix>> {
    check_params(spec, params)?;
    let noise = noise.copied().unwrap_or(NoiseModel::NOISELESS);
    let mut rho = DensityMatrix::zero(spec.num_qubits);
    for g in preparation_circuit(spec)? {
        apply_noisy_gate(&mut rho, &g, &noise)?;
    }
    let (mut cost_layers, mut mixer_layers) = (0, 0);
    for (&gamma, &beta) in params.gamma.iter().zip(&params.beta) {
        for g in cost_gates(cost, gamma) {
            apply_noisy_gate(&mut rho, &g, &noise)?;
        }
        cost_layers += 1;
        for g in mixer_gates(spec, beta) {
            apply_noisy_gate(&mut rho, &g, &noise)?;
        }
        mixer_layers += 1;
    }
    Ok(Evolution {
        state: rho,
        cost_layers,
        mixer_layers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::{penalize, PenaltyRule};
    use crate::instance::{build_constraints, VrpInstance};

    fn groups() -> ConstraintGroups {
        let inst = VrpInstance::three_node();
        let cs = build_constraints(&inst).unwrap();
        derive_constraint_groups(&cs, &inst.links()).unwrap()
    }

    fn strings(bs: &[Bitstring]) -> Vec<String> {
        bs.iter().map(|b| b.to_string()).collect()
    }

    #[test]
    fn three_node_groups() {
        let g = groups();
        let pats = |c: &Component| -> Vec<String> {
            c.patterns
                .iter()
                .map(|p| p.iter().map(|&b| if b { '1' } else { '0' }).collect())
                .collect()
        };
        assert_eq!(g.components.len(), 2);
        assert_eq!(g.components[0].qubits, vec![1, 2, 3]);
        assert_eq!(pats(&g.components[0]), ["001", "110"]);
        assert_eq!(g.components[1].qubits, vec![0, 4, 5]);
        assert_eq!(pats(&g.components[1]), ["001", "110"]);
        assert_eq!(g.xy_pairs, vec![(2, 3), (4, 5)]);
        assert_eq!(g.x_qubits, vec![0, 1]);
    }

    #[test]
    fn empty_constraints_degenerate_to_uniform() {
        let cs = ConstraintSet {
            var_count: 6,
            constraints: vec![],
        };
        let g = derive_constraint_groups(&cs, &LinkIndex::new(3)).unwrap();
        assert!(g.components.is_empty() && g.xy_pairs.is_empty());
        assert_eq!(g.x_qubits, (0..6).collect::<Vec<_>>());
        let spec = AnsatzSpec::constraint_aware(&g, 6, 1, 0.5).unwrap();
        assert_eq!(spec.init, InitialState::Uniform);
    }

    #[test]
    fn contradictory_pairs_are_infeasible() {
        use crate::instance::{LinearConstraint, Relation};
        let one_hot = |a, b| LinearConstraint {
            vars: vec![a, b],
            rhs: 1,
            relation: Relation::Equal,
            label: String::new(),
        };
        // x0 != x1, x1 != x2, x0 != x2 has no solution.
        let cs = ConstraintSet {
            var_count: 6,
            constraints: vec![one_hot(0, 1), one_hot(1, 2), one_hot(0, 2)],
        };
        assert!(matches!(
            derive_constraint_groups(&cs, &LinkIndex::new(3)),
            Err(Error::InfeasibleStructure(q)) if q == vec![0, 1, 2]
        ));
    }

    #[test]
    fn constraint_aware_support() {
        let spec = AnsatzSpec::constraint_aware(&groups(), 6, 1, 0.7).unwrap();
        assert_eq!(
            strings(&spec.init_support()),
            ["000101", "011001", "100110", "111010"]
        );
    }

    #[test]
    fn standard_two_qubit_start() {
        let s = initial_statevector(&AnsatzSpec::standard(2, 1)).unwrap();
        for a in s.amplitudes() {
            assert!((a.re - 0.5).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn two_pattern_recipe() {
        let c = Component {
            qubits: vec![0, 1, 2],
            patterns: vec![vec![false, false, true], vec![true, true, false]],
        };
        let spec = AnsatzSpec::custom(
            AnsatzKind::ConstraintAware,
            3,
            0,
            1.0,
            vec![],
            vec![],
            InitialState::Structured(vec![c]),
        )
        .unwrap();
        let gates = preparation_circuit(&spec).unwrap();
        let names: Vec<_> = gates.iter().map(|g| (g.name(), g.qubits())).collect();
        assert_eq!(
            names,
            [
                ("h", vec![0]),
                ("cx", vec![0, 1]),
                ("x", vec![2]),
                ("cx", vec![0, 2])
            ]
        );
    }

    #[test]
    fn overlapping_pairs_rejected() {
        let err = AnsatzSpec::custom(
            AnsatzKind::ConstraintAware,
            4,
            1,
            1.0,
            vec![(0, 1), (1, 2)],
            vec![3],
            InitialState::Uniform,
        );
        assert!(matches!(err, Err(Error::InvalidAnsatz(_))));
        let err = AnsatzSpec::custom(
            AnsatzKind::ConstraintAware,
            4,
            1,
            1.0,
            vec![(0, 1)],
            vec![1],
            InitialState::Uniform,
        );
        assert!(err.is_err());
    }

    #[test]
    fn parameter_length_checked() {
        let inst = VrpInstance::three_node();
        let cs = build_constraints(&inst).unwrap();
        let qubo = penalize(&inst, &cs, PenaltyRule::default()).unwrap();
        let cost = CostModel::new(&qubo, 542.15).unwrap();
        let spec = AnsatzSpec::standard(6, 2);
        let params = ParameterPoint::new(vec![0.1], vec![0.2]).unwrap();
        assert!(matches!(
            evolve_statevector(&spec, &cost, &params, Engine::Exact),
            Err(Error::ParameterLength { .. })
        ));
    }

    #[test]
    fn zero_depth_returns_initial_state() {
        let inst = VrpInstance::three_node();
        let cs = build_constraints(&inst).unwrap();
        let qubo = penalize(&inst, &cs, PenaltyRule::default()).unwrap();
        let cost = CostModel::new(&qubo, 542.15).unwrap();
        let spec = AnsatzSpec::constraint_aware(&groups(), 6, 0, 0.7).unwrap();
        let params = ParameterPoint::new(vec![], vec![]).unwrap();
        let evo = evolve_statevector(&spec, &cost, &params, Engine::Exact).unwrap();
        assert_eq!(evo.state, initial_statevector(&spec).unwrap());
        assert_eq!((evo.cost_layers, evo.mixer_layers), (0, 0));
    }

    #[test]
    fn clamping_and_flat_layout() {
        let p = ParameterPoint::new(vec![4.0, -0.5], vec![-1.0, 0.3]).unwrap();
        let c = p.clamped();
        assert_eq!(c.gamma, vec![PI, -0.5]);
        assert_eq!(c.beta, vec![0.0, 0.3]);
        assert_eq!(ParameterPoint::from_flat(&c.to_flat()).unwrap(), c);
    }
}
