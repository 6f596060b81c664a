use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vrp_qaoa::ansatz::{
    cost_gates, derive_constraint_groups, evolve_density, evolve_statevector, initial_statevector,
    preparation_circuit, AnsatzKind, AnsatzSpec, CostModel, Engine, InitialState, ParameterPoint,
};
use vrp_qaoa::encode::default_energy_scale;
use vrp_qaoa::sim::{Gate, Gate1, Gate2};
use vrp_qaoa::{
    build_constraints, penalize, DensityMatrix, PenaltyRule, QuantumState, StateVector, VrpInstance,
};

fn cost_model() -> CostModel {
    let inst = VrpInstance::three_node();
    let cs = build_constraints(&inst).unwrap();
    let qubo = penalize(&inst, &cs, PenaltyRule::default()).unwrap();
    CostModel::new(&qubo, default_energy_scale(&qubo)).unwrap()
}

fn hybrid(depth: usize, lambda: f64) -> AnsatzSpec {
    let inst = VrpInstance::three_node();
    let cs = build_constraints(&inst).unwrap();
    let groups = derive_constraint_groups(&cs, &inst.links()).unwrap();
    AnsatzSpec::constraint_aware(&groups, 6, depth, lambda).unwrap()
}

fn random_gate(n: usize, rng: &mut impl Rng) -> Gate {
    let q = rng.random_range(0..n);
    let mut r = rng.random_range(0..n - 1);
    if r >= q {
        r += 1;
    }
    let t: f64 = rng.random_range(-3.2..3.2);
    match rng.random_range(0..8) {
        0 => Gate::One(q, Gate1::H),
        1 => Gate::One(q, Gate1::X),
        2 => Gate::One(q, Gate1::Rx(t)),
        3 => Gate::One(q, Gate1::Rz(t)),
        4 => Gate::Two(q, r, Gate2::Cnot),
        5 => Gate::Two(q, r, Gate2::Rzz(t)),
        6 => Gate::Two(q, r, Gate2::Rxx(t)),
        _ => Gate::Two(q, r, Gate2::Ryy(t)),
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `|<a|b>| = 1` up to tolerance, i.e. equal up to a global phase.
fn phase_distance(a: &StateVector, b: &StateVector) -> f64 {
    1.0 - a.inner(b).norm()
}

#[test]
fn density_matches_statevector_on_random_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let n = rng.random_range(2..=5);
        let mut psi = StateVector::zero(n);
        let mut rho = DensityMatrix::zero(n);
        for _ in 0..rng.random_range(5..40) {
            let g = random_gate(n, &mut rng);
            psi.apply_gate(&g).unwrap();
            rho.apply_gate(&g).unwrap();
        }
        assert!(max_diff(&psi.probabilities(), &rho.probabilities()) < 1e-9);
        assert!((rho.purity() - 1.0).abs() < 1e-9);
        assert!(rho.hermiticity_error() < 1e-12);
    }
}

#[test]
fn cost_gates_equal_diagonal_phase() {
    let cost = cost_model();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let gamma = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let mut start = StateVector::uniform(6);
        for _ in 0..10 {
            start.apply_gate(&random_gate(6, &mut rng)).unwrap();
        }
        let mut diag = start.clone();
        diag.apply_diagonal_phase(cost.operator.diagonal(), gamma, cost.scale)
            .unwrap();
        let mut gates = start;
        for g in cost_gates(&cost, gamma) {
            gates.apply_gate(&g).unwrap();
        }
        assert!(phase_distance(&diag, &gates) < 1e-9);
    }
}

#[test]
fn full_pipelines_agree() {
    let cost = cost_model();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for spec in [AnsatzSpec::standard(6, 2), hybrid(2, 0.7), hybrid(3, 0.3)] {
        for _ in 0..5 {
            let params = ParameterPoint::random(spec.depth, &mut rng);
            let exact = evolve_statevector(&spec, &cost, &params, Engine::Exact)
                .unwrap()
                .state;
            let gates = evolve_statevector(&spec, &cost, &params, Engine::Gates)
                .unwrap()
                .state;
            let rho = evolve_density(&spec, &cost, &params, None).unwrap().state;
            assert!(phase_distance(&exact, &gates) < 1e-9);
            assert!(max_diff(&exact.probabilities(), &rho.probabilities()) < 1e-9);
        }
    }
}

#[test]
fn preparation_recipe_matches_direct_load() {
    for spec in [AnsatzSpec::standard(6, 1), hybrid(1, 1.0)] {
        let direct = initial_statevector(&spec).unwrap();
        let mut built = StateVector::zero(6);
        for g in preparation_circuit(&spec).unwrap() {
            built.apply_gate(&g).unwrap();
        }
        let diff = direct
            .amplitudes()
            .iter()
            .zip(built.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12, "{diff}");
    }
}

#[test]
fn trivial_hybrid_reduces_to_standard() {
    let cost = cost_model();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for depth in 1..=3 {
        let standard = AnsatzSpec::standard(6, depth);
        let reduced = AnsatzSpec::custom(
            AnsatzKind::ConstraintAware,
            6,
            depth,
            1.0,
            Vec::new(),
            (0..6).collect(),
            InitialState::Uniform,
        )
        .unwrap();
        let params = ParameterPoint::random(depth, &mut rng);
        let a = evolve_statevector(&standard, &cost, &params, Engine::Exact)
            .unwrap()
            .state;
        let b = evolve_statevector(&reduced, &cost, &params, Engine::Exact)
            .unwrap()
            .state;
        let diff = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }
}

#[test]
fn zero_angles_keep_the_initial_distribution() {
    let cost = cost_model();
    let spec = hybrid(2, 0.5);
    let params = ParameterPoint::new(vec![0.0; 2], vec![0.0; 2]).unwrap();
    let probs = evolve_statevector(&spec, &cost, &params, Engine::Exact)
        .unwrap()
        .state
        .probabilities();
    for s in ["000101", "011001", "100110", "111010"] {
        let i = s.parse::<vrp_qaoa::Bitstring>().unwrap().index();
        assert!((probs[i] - 0.25).abs() < 1e-12);
    }
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}
