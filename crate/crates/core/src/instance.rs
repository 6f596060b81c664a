//! Link-based VRP instances, their constraint sets, and the exhaustive oracle.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::encode::QuboProblem;
use crate::error::{Error, Result};

/// Largest node count for which subtour subsets are enumerated by default.
pub const DEFAULT_MAX_NODES: usize = 6;

/// Largest variable count the exhaustive oracle will scan.
pub const MAX_ENUMERATION_BITS: usize = 24;

const TIE_TOLERANCE: f64 = 1e-9;

const THREE_NODE_JSON: &str = include_str!("../fixtures/three_node.json");

/// A directed-link VRP instance. Node 0 is the depot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VrpInstance {
    distances: Vec<Vec<f64>>,
    vehicles: usize,
}

impl VrpInstance {
    pub fn new(distances: Vec<Vec<f64>>, vehicles: usize) -> Result<Self> {
        let inst = VrpInstance {
            distances,
            vehicles,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// The three-node, two-vehicle instance used throughout the experiments.
    pub fn three_node() -> Self {
        Self::from_json(THREE_NODE_JSON).expect("bundled fixture is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: VrpInstance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn validate(&self) -> Result<()> {
        let m = self.distances.len();
        if m < 2 {
            return Err(Error::InvalidInstance(format!(
                "need at least 2 nodes, got {m}"
            )));
        }
        if self.vehicles < 1 {
            return Err(Error::InvalidInstance("need at least one vehicle".into()));
        }
        for (i, row) in self.distances.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidInstance(format!(
                    "distance row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            for (j, &w) in row.iter().enumerate() {
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidInstance(format!(
                        "distance w[{i}][{j}] = {w} must be finite and nonnegative"
                    )));
                }
                if i == j && w != 0.0 {
                    return Err(Error::InvalidInstance(format!("w[{i}][{i}] must be zero")));
                }
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.distances.len()
    }

    pub fn vehicles(&self) -> usize {
        self.vehicles
    }

    pub fn distance(&self, from: usize, to: usize) -> f64 {
        self.distances[from][to]
    }

    pub fn distances(&self) -> &[Vec<f64>] {
        &self.distances
    }

    pub fn links(&self) -> LinkIndex {
        LinkIndex::new(self.node_count())
    }
}

/// A directed link `(from, to)` between distinct nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Link {
    pub from: usize,
    pub to: usize,
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{},{}", self.from, self.to)
    }
}

/// Bijection between directed links and bit/qubit positions.
///
/// Links are ordered lexicographically by `(from, to)`; for three nodes this
/// gives `[x01, x02, x10, x12, x20, x21]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkIndex {
    links: Vec<Link>,
}

impl LinkIndex {
    pub fn new(node_count: usize) -> Self {
        let links = (0..node_count)
            .flat_map(|from| {
                (0..node_count)
                    .filter(move |&to| to != from)
                    .map(move |to| Link { from, to })
            })
            .collect();
        LinkIndex { links }
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn link(&self, var: usize) -> Link {
        self.links[var]
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn position(&self, from: usize, to: usize) -> Option<usize> {
        self.links.iter().position(|l| l.from == from && l.to == to)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    AtLeast,
}

/// `sum(vars) (= | >=) rhs` with unit coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub vars: Vec<usize>,
    pub rhs: i64,
    pub relation: Relation,
    pub label: String,
}

impl LinearConstraint {
    pub fn lhs(&self, bits: &Bitstring) -> i64 {
        self.vars.iter().filter(|&&v| bits.get(v)).count() as i64
    }

    pub fn holds(&self, bits: &Bitstring) -> bool {
        let lhs = self.lhs(bits);
        match self.relation {
            Relation::Equal => lhs == self.rhs,
            Relation::AtLeast => lhs >= self.rhs,
        }
    }

    /// Two-variable exactly-one constraint, the shape usable for XY pairs.
    pub fn is_pair_one_hot(&self) -> bool {
        self.relation == Relation::Equal && self.rhs == 1 && self.vars.len() == 2
    }

    fn same_shape(&self, other: &LinearConstraint) -> bool {
        let mut a = self.vars.clone();
        let mut b = other.vars.clone();
        a.sort_unstable();
        b.sort_unstable();
        a == b && self.rhs == other.rhs && self.relation == other.relation
    }

    pub fn display_with(&self, index: &LinkIndex) -> String {
        let lhs: Vec<String> = self
            .vars
            .iter()
            .map(|&v| index.link(v).to_string())
            .collect();
        let op = match self.relation {
            Relation::Equal => "=",
            Relation::AtLeast => ">=",
        };
        format!("{} {op} {}", lhs.join(" + "), self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub var_count: usize,
    pub constraints: Vec<LinearConstraint>,
}

impl ConstraintSet {
    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LinearConstraint> {
        self.constraints.iter()
    }
}

pub fn build_constraints(inst: &VrpInstance) -> Result<ConstraintSet> {
    build_constraints_with_budget(inst, DEFAULT_MAX_NODES)
}

/// Depot degree, per-customer degree and subtour-elimination constraints.
///
/// Order: depot in-degree, depot out-degree, then for each customer its
/// out-degree and in-degree, then one subtour cut per customer subset with
/// at least two members. Exact duplicates are dropped.
pub fn build_constraints_with_budget(
    inst: &VrpInstance,
    max_nodes: usize,
) -> Result<ConstraintSet> {
    let m = inst.node_count();
    if m > max_nodes {
        return Err(Error::SubtourBudget {
            nodes: m,
            limit: max_nodes,
        });
    }
    let index = inst.links();
    let var = |i: usize, j: usize| index.position(i, j).expect("distinct nodes");
    let k = inst.vehicles() as i64;

    let mut raw = vec![
        LinearConstraint {
            vars: (1..m).map(|i| var(i, 0)).collect(),
            rhs: k,
            relation: Relation::Equal,
            label: "depot in-degree".into(),
        },
        LinearConstraint {
            vars: (1..m).map(|j| var(0, j)).collect(),
            rhs: k,
            relation: Relation::Equal,
            label: "depot out-degree".into(),
        },
    ];
    for c in 1..m {
        raw.push(LinearConstraint {
            vars: (0..m).filter(|&j| j != c).map(|j| var(c, j)).collect(),
            rhs: 1,
            relation: Relation::Equal,
            label: format!("node {c} out-degree"),
        });
        raw.push(LinearConstraint {
            vars: (0..m).filter(|&i| i != c).map(|i| var(i, c)).collect(),
            rhs: 1,
            relation: Relation::Equal,
            label: format!("node {c} in-degree"),
        });
    }

    let customers = m - 1;
    for mask in 1usize..(1 << customers) {
        if mask.count_ones() < 2 {
            continue;
        }
        let subset: Vec<usize> = (1..m).filter(|c| mask >> (c - 1) & 1 == 1).collect();
        let vars = subset
            .iter()
            .flat_map(|&i| (0..m).filter(|j| !subset.contains(j)).map(move |j| (i, j)))
            .map(|(i, j)| var(i, j))
            .collect();
        raw.push(LinearConstraint {
            vars,
            rhs: 1,
            relation: Relation::AtLeast,
            label: format!("subtour {subset:?}"),
        });
    }

    let mut constraints: Vec<LinearConstraint> = Vec::with_capacity(raw.len());
    for c in raw {
        if !constraints.iter().any(|kept| kept.same_shape(&c)) {
            constraints.push(c);
        }
    }
    Ok(ConstraintSet {
        var_count: index.len(),
        constraints,
    })
}

pub fn is_feasible(bits: &Bitstring, cs: &ConstraintSet) -> Result<bool> {
    bits.expect_len(cs.var_count)?;
    Ok(cs.iter().all(|c| c.holds(bits)))
}

pub fn route_cost(bits: &Bitstring, inst: &VrpInstance) -> Result<f64> {
    let index = inst.links();
    bits.expect_len(index.len())?;
    Ok(index
        .links()
        .iter()
        .enumerate()
        .filter(|(q, _)| bits.get(*q))
        .map(|(_, l)| inst.distance(l.from, l.to))
        .sum())
}

/// Ground truth from scanning every assignment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceOptimum {
    pub qubo_argmin: Vec<Bitstring>,
    pub qubo_min: f64,
    /// Feasible strings attaining the minimum route cost.
    pub feasible_argmin: Vec<Bitstring>,
    /// Minimum route cost over feasible strings, if any exist.
    pub feasible_min: Option<f64>,
    pub feasible_count: usize,
}

pub fn brute_force_optimum(
    inst: &VrpInstance,
    cs: &ConstraintSet,
    qubo: &QuboProblem,
) -> Result<BruteForceOptimum> {
    let n = inst.links().len();
    if n > MAX_ENUMERATION_BITS {
        return Err(Error::TooLarge {
            size: n,
            limit: MAX_ENUMERATION_BITS,
        });
    }
    if qubo.var_count() != n || cs.var_count != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: qubo.var_count(),
        });
    }

    let mut qubo_min = f64::INFINITY;
    let mut qubo_argmin = Vec::new();
    let mut feasible_min = f64::INFINITY;
    let mut feasible_argmin = Vec::new();
    let mut feasible_count = 0;

    for bits in Bitstring::all(n) {
        let value = qubo.value(&bits)?;
        update_min(&mut qubo_min, &mut qubo_argmin, value, &bits);
        if is_feasible(&bits, cs)? {
            feasible_count += 1;
            let cost = route_cost(&bits, inst)?;
            update_min(&mut feasible_min, &mut feasible_argmin, cost, &bits);
        }
    }

    Ok(BruteForceOptimum {
        qubo_argmin,
        qubo_min,
        feasible_argmin,
        feasible_min: (feasible_count > 0).then_some(feasible_min),
        feasible_count,
    })
}

fn update_min(best: &mut f64, argmin: &mut Vec<Bitstring>, value: f64, bits: &Bitstring) {
    if value < *best - TIE_TOLERANCE {
        *best = value;
        argmin.clear();
        argmin.push(bits.clone());
    } else if (value - *best).abs() <= TIE_TOLERANCE {
        argmin.push(bits.clone());
        *best = best.min(value);
    }
}
