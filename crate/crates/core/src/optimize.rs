//! Objective evaluators and the restarted, box-clamped Nelder–Mead outer loop.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::{
    evolve_density, evolve_statevector, AnsatzSpec, CostModel, Engine, ParameterPoint,
};
use crate::error::{Error, Result};
use crate::sim::{apply_readout_confusion, sample_counts, NoiseModel, QuantumState, ShotHistogram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Objective evaluations per restart.
    pub max_evals: usize,
    pub objective_shots: u64,
    pub batches: usize,
    pub final_shots: u64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 5,
            max_evals: 150,
            objective_shots: 1024,
            batches: 3,
            final_shots: 4096,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("restarts", self.restarts as u64),
            ("max_evals", self.max_evals as u64),
            ("objective_shots", self.objective_shots),
            ("batches", self.batches as u64),
            ("final_shots", self.final_shots),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// How the energy expectation is estimated during optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// `<psi|H_C|psi> / s` from the exact statevector.
    Exact,
    /// Mean of `B` batch means over `S_obj` samples each, divided by `s`.
    Shots,
    /// As `Shots`, from a noisy density matrix with readout confusion.
    NoisyShots(NoiseModel),
}

impl ObjectiveKind {
    pub fn is_stochastic(&self) -> bool {
        !matches!(self, ObjectiveKind::Exact)
    }
}

/// Exact measurement distribution the given objective kind samples from.
pub fn output_distribution(
    spec: &AnsatzSpec,
    cost: &CostModel,
    params: &ParameterPoint,
    kind: &ObjectiveKind,
) -> Result<Vec<f64>> {
    match kind {
        ObjectiveKind::Exact | ObjectiveKind::Shots => {
            Ok(evolve_statevector(spec, cost, params, Engine::Exact)?
                .state
                .probabilities())
        }
        ObjectiveKind::NoisyShots(noise) => {
            let probs = evolve_density(spec, cost, params, Some(noise))?
                .state
                .probabilities();
            Ok(apply_readout_confusion(&probs, noise.p01, noise.p10))
        }
    }
}

/// Evaluates the scaled energy objective at `params`.
///
/// `rng` drives shot sampling and is untouched by the exact kind.
pub fn objective<R: Rng + ?Sized>(
    params: &ParameterPoint,
    spec: &AnsatzSpec,
    cost: &CostModel,
    kind: &ObjectiveKind,
    cfg: &OptimizerConfig,
    rng: &mut R,
) -> Result<f64> {
    let probs = output_distribution(spec, cost, params, kind)?;
    match kind {
        ObjectiveKind::Exact => {
            let energy: f64 = probs
                .iter()
                .enumerate()
                .map(|(i, p)| p * cost.qubo_value(i))
                .sum();
            Ok(energy / cost.scale)
        }
        ObjectiveKind::Shots | ObjectiveKind::NoisyShots(_) => {
            let mut total = 0.0;
            for _ in 0..cfg.batches {
                let counts = sample_counts(&probs, cfg.objective_shots, rng);
                let batch: f64 = counts
                    .iter()
                    .enumerate()
                    .map(|(i, &n)| n as f64 * cost.qubo_value(i))
                    .sum();
                total += batch / cfg.objective_shots as f64;
            }
            Ok(total / cfg.batches as f64 / cost.scale)
        }
    }
}

/// Nelder–Mead coefficients and stopping tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub initial_step: f64,
    /// Stop once the simplex spread in both `f` and `x` falls below this.
    pub tolerance: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.25,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalResult {
    pub x: Vec<f64>,
    pub f: f64,
    /// Objective value at every evaluation, in order.
    pub history: Vec<f64>,
}

struct Budget<'a, F> {
    f: F,
    lower: &'a [f64],
    upper: &'a [f64],
    max_evals: usize,
    history: Vec<f64>,
    best: Option<(Vec<f64>, f64)>,
}

impl<F: FnMut(&[f64]) -> Result<f64>> Budget<'_, F> {
    fn exhausted(&self) -> bool {
        self.history.len() >= self.max_evals
    }

    fn clamp(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(self.lower).zip(self.upper) {
            *v = v.clamp(*lo, *hi);
        }
    }

    fn eval(&mut self, mut x: Vec<f64>) -> Result<Option<(Vec<f64>, f64)>> {
        if self.exhausted() {
            return Ok(None);
        }
        self.clamp(&mut x);
        let fx = (self.f)(&x)?;
        self.history.push(fx);
        if self.best.as_ref().is_none_or(|(_, b)| fx < *b) {
            self.best = Some((x.clone(), fx));
        }
        Ok(Some((x, fx)))
    }
}

impl NelderMead {
    /// Minimizes `f` inside `[lower, upper]` with at most `max_evals` calls.
    ///
    /// Every trial point is clamped into the box before evaluation. The
    /// returned point is the best one evaluated.
    pub fn minimize<F>(
        &self,
        f: F,
        x0: &[f64],
        lower: &[f64],
        upper: &[f64],
        max_evals: usize,
    ) -> Result<LocalResult>
    where
        F: FnMut(&[f64]) -> Result<f64>,
    {
        let dim = x0.len();
        let mut budget = Budget {
            f,
            lower,
            upper,
            max_evals: max_evals.max(1),
            history: Vec::new(),
            best: None,
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        if let Some(p) = budget.eval(x0.to_vec())? {
            simplex.push(p);
        }
        let origin = simplex[0].0.clone();
        for i in 0..dim {
            let mut x = origin.clone();
            x[i] += self.initial_step;
            if x[i] > upper[i] {
                x[i] = origin[i] - self.initial_step;
            }
            match budget.eval(x)? {
                Some(p) => simplex.push(p),
                None => break,
            }
        }

        while simplex.len() == dim + 1 && dim > 0 && !budget.exhausted() {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let f_best = simplex[0].1;
            let f_worst = simplex[dim].1;
            let size = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if (f_worst - f_best).abs() <= self.tolerance && size <= self.tolerance {
                break;
            }

            let centroid: Vec<f64> = (0..dim)
                .map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
                .collect();
            let along = |t: f64, toward: &[f64]| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(toward)
                    .map(|(c, w)| c + t * (w - c))
                    .collect()
            };

            let worst = simplex[dim].0.clone();
            let Some(reflected) = budget.eval(along(-self.reflection, &worst))? else {
                break;
            };

            if reflected.1 < f_best {
                let Some(expanded) = budget.eval(along(self.expansion, &reflected.0))? else {
                    simplex[dim] = reflected;
                    break;
                };
                simplex[dim] = if expanded.1 < reflected.1 {
                    expanded
                } else {
                    reflected
                };
                continue;
            }
            if reflected.1 < simplex[dim - 1].1 {
                simplex[dim] = reflected;
                continue;
            }

            let (target, threshold) = if reflected.1 < f_worst {
                (along(self.contraction, &reflected.0), reflected.1)
            } else {
                (along(self.contraction, &worst), f_worst)
            };
            let Some(contracted) = budget.eval(target)? else {
                break;
            };
            if contracted.1 <= threshold {
                simplex[dim] = contracted;
                continue;
            }

            let best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = best
                    .iter()
                    .zip(&vertex.0)
                    .map(|(b, v)| b + self.shrink * (v - b))
                    .collect();
                match budget.eval(x)? {
                    Some(p) => *vertex = p,
                    None => break,
                }
            }
        }

        let (x, f) = budget.best.expect("at least one evaluation");
        Ok(LocalResult {
            x,
            f,
            history: budget.history,
        })
    }
}

/// SplitMix64 finalizer over `base ^ stream`, used to derive independent
/// generator seeds.
pub fn mix_seed(base: u64, stream: u64) -> u64 {
    let mut z = base
        ^ stream
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const EVALUATION_STREAM: u64 = u64::MAX;
const FINAL_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub restart: usize,
    pub evaluation: usize,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartOutcome {
    pub start: ParameterPoint,
    pub params: ParameterPoint,
    /// Best value seen along the restart's own trajectory.
    pub trajectory_best: f64,
    /// Value used to compare restarts (re-evaluated with a fixed seed for stochastic kinds).
    pub comparison: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizeResult {
    pub params: ParameterPoint,
    pub objective: f64,
    pub restarts: Vec<RestartOutcome>,
    pub trace: Vec<TraceRow>,
}

/// Random-restart Nelder–Mead over `gamma in [-pi, pi]^p`, `beta in [0, pi/2]^p`.
pub fn minimize(
    spec: &AnsatzSpec,
    cost: &CostModel,
    kind: &ObjectiveKind,
    cfg: &OptimizerConfig,
) -> Result<MinimizeResult> {
    cfg.validate()?;
    let (lower, upper) = ParameterPoint::flat_bounds(spec.depth);
    let nm = NelderMead::default();
    let mut restarts = Vec::with_capacity(cfg.restarts);
    let mut trace = Vec::new();

    for r in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, r as u64));
        let start = ParameterPoint::random(spec.depth, &mut rng);
        let local = nm.minimize(
            |x| {
                objective(
                    &ParameterPoint::from_flat(x)?,
                    spec,
                    cost,
                    kind,
                    cfg,
                    &mut rng,
                )
            },
            &start.to_flat(),
            &lower,
            &upper,
            cfg.max_evals,
        )?;
        let params = ParameterPoint::from_flat(&local.x)?;
        let comparison = if kind.is_stochastic() {
            let mut eval_rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, EVALUATION_STREAM));
            objective(&params, spec, cost, kind, cfg, &mut eval_rng)?
        } else {
            local.f
        };
        trace.extend(
            local
                .history
                .iter()
                .enumerate()
                .map(|(i, &objective)| TraceRow {
                    restart: r,
                    evaluation: i,
                    objective,
                }),
        );
        restarts.push(RestartOutcome {
            start,
            params,
            trajectory_best: local.f,
            comparison,
            evaluations: local.history.len(),
        });
    }

    let winner = restarts
        .iter()
        .min_by(|a, b| a.comparison.total_cmp(&b.comparison))
        .expect("at least one restart");
    Ok(MinimizeResult {
        params: winner.params.clone(),
        objective: winner.comparison,
        restarts,
        trace,
    })
}

/// Final histogram at the optimized angles, plus the exact distribution it was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalSample {
    pub histogram: ShotHistogram,
    pub distribution: Vec<f64>,
}

pub fn final_sampling(
    spec: &AnsatzSpec,
    cost: &CostModel,
    params: &ParameterPoint,
    kind: &ObjectiveKind,
    cfg: &OptimizerConfig,
) -> Result<FinalSample> {
    let distribution = output_distribution(spec, cost, params, kind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, FINAL_STREAM));
    let counts = sample_counts(&distribution, cfg.final_shots, &mut rng);
    let histogram = ShotHistogram::from_counts(spec.num_qubits, counts.into_iter().enumerate());
    Ok(FinalSample {
        histogram,
        distribution,
    })
}

pub fn write_trace_csv(path: impl AsRef<Path>, trace: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in trace {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
