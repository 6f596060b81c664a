//! Shared fixtures for the benchmarks in `benches/`.

use vrp_qaoa::ansatz::{derive_constraint_groups, AnsatzSpec, CostModel, ParameterPoint};
use vrp_qaoa::encode::default_energy_scale;
use vrp_qaoa::{build_constraints, penalize, PenaltyRule, VrpInstance};

pub struct Fixture {
    pub cost: CostModel,
    pub standard: AnsatzSpec,
    pub hybrid: AnsatzSpec,
    pub params: ParameterPoint,
}

/// Three-node instance at depth `p` with fixed, non-trivial angles.
pub fn three_node(p: usize) -> Fixture {
    let inst = VrpInstance::three_node();
    let cs = build_constraints(&inst).expect("bundled instance");
    let qubo = penalize(&inst, &cs, PenaltyRule::default()).expect("bundled instance");
    let cost = CostModel::new(&qubo, default_energy_scale(&qubo)).expect("positive scale");
    let groups = derive_constraint_groups(&cs, &inst.links()).expect("bundled instance");
    let hybrid = AnsatzSpec::constraint_aware(&groups, 6, p, 0.7).expect("valid ansatz");
    let gamma = (0..p).map(|l| 0.4 + 0.3 * l as f64).collect();
    let beta = (0..p).map(|l| 0.9 - 0.2 * l as f64).collect();
    Fixture {
        cost,
        standard: AnsatzSpec::standard(6, p),
        hybrid,
        params: ParameterPoint::new(gamma, beta).expect("equal lengths"),
    }
}
