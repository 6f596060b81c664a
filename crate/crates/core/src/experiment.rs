//! Sweep orchestration: config loading, per-run pipeline, result files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{derive_constraint_groups, AnsatzKind, AnsatzSpec, CostModel, ParameterPoint};
use crate::encode::{default_energy_scale, penalize, PenaltyRule, QuboProblem};
use crate::error::{Error, Result};
use crate::instance::{brute_force_optimum, build_constraints, VrpInstance};
use crate::metrics::{aggregate, run_metrics, AggregateStats, RunMetrics};
use crate::optimize::{final_sampling, minimize, mix_seed, ObjectiveKind, OptimizerConfig};
use crate::sim::{NoiseModel, ShotHistogram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    /// Exact expectation values.
    I,
    /// Finite-shot estimates.
    II,
    /// Finite shots with gate and readout noise.
    III,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::I => "I",
            Regime::II => "II",
            Regime::III => "III",
        })
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Regime::I),
            "II" | "2" => Ok(Regime::II),
            "III" | "3" => Ok(Regime::III),
            other => Err(Error::InvalidConfig(format!(
                "unknown regime {other:?}, expected I, II or III"
            ))),
        }
    }
}

fn default_models() -> Vec<AnsatzKind> {
    vec![AnsatzKind::Standard, AnsatzKind::ConstraintAware]
}

/// `0.4, 0.5, ..., 1.0`
pub fn default_lambdas() -> Vec<f64> {
    (4..=10).map(|i| i as f64 / 10.0).collect()
}

fn default_seeds() -> Vec<u64> {
    (0..30).collect()
}

fn default_depth() -> usize {
    2
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Resolved against the config file's directory when relative.
    pub instance: PathBuf,
    #[serde(default = "default_models")]
    pub models: Vec<AnsatzKind>,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default = "Regime::default_regime")]
    pub regime: Regime,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub penalty: PenaltyRule,
    /// Defaults to the largest Ising coefficient magnitude.
    #[serde(default)]
    pub energy_scale: Option<f64>,
    /// Also write one optimization trace CSV per run.
    #[serde(default)]
    pub write_traces: bool,
}

impl Regime {
    fn default_regime() -> Regime {
        Regime::I
    }
}

impl ExperimentConfig {
    pub fn new(instance: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            instance: instance.into(),
            models: default_models(),
            lambdas: default_lambdas(),
            regime: Regime::I,
            depth: default_depth(),
            optimizer: OptimizerConfig::default(),
            noise: None,
            seeds: default_seeds(),
            output_dir: default_output(),
            penalty: PenaltyRule::default(),
            energy_scale: None,
            write_traces: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        if cfg.instance.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.instance = dir.join(&cfg.instance);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::InvalidConfig("no ansatz models selected".into()));
        }
        if self.models.contains(&AnsatzKind::ConstraintAware) && self.lambdas.is_empty() {
            return Err(Error::InvalidConfig("lambda list is empty".into()));
        }
        if let Some(bad) = self.lambdas.iter().find(|l| !l.is_finite()) {
            return Err(Error::InvalidConfig(format!("lambda {bad} is not finite")));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig("seed list is empty".into()));
        }
        if self.regime == Regime::III {
            match &self.noise {
                Some(noise) => noise.validate()?,
                None => {
                    return Err(Error::InvalidConfig(
                        "regime III requires a noise model".into(),
                    ))
                }
            }
        }
        self.optimizer.validate()
    }

    pub fn objective_kind(&self) -> ObjectiveKind {
        match (self.regime, self.noise) {
            (Regime::I, _) => ObjectiveKind::Exact,
            (Regime::II, _) => ObjectiveKind::Shots,
            (Regime::III, noise) => {
                ObjectiveKind::NoisyShots(noise.unwrap_or(NoiseModel::NOISELESS))
            }
        }
    }

    /// Sweep cells in output order: each model, with every lambda for the
    /// constraint-aware one.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &model in &self.models {
            match model {
                AnsatzKind::Standard => cells.push(Cell {
                    model,
                    lambda: None,
                }),
                AnsatzKind::ConstraintAware => cells.extend(self.lambdas.iter().map(|&l| Cell {
                    model,
                    lambda: Some(l),
                })),
            }
        }
        cells
    }
}

/// One row of the results tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub model: AnsatzKind,
    pub lambda: Option<f64>,
}

impl Cell {
    fn lambda_label(&self) -> String {
        self.lambda
            .map(|l| format!("{l:.2}"))
            .unwrap_or_else(|| "-".into())
    }

    fn file_stem(&self, regime: Regime, seed: u64) -> String {
        match self.lambda {
            Some(l) => format!(
                "regime{regime}_{}_lambda{l:.2}_seed{seed}",
                self.model.label()
            ),
            None => format!("regime{regime}_{}_seed{seed}", self.model.label()),
        }
    }
}

/// Generator seed for one (model, lambda, seed) run.
pub fn run_seed(master: u64, cell: &Cell, seed: u64) -> u64 {
    let model = match cell.model {
        AnsatzKind::Standard => 1,
        AnsatzKind::ConstraintAware => 2,
    };
    let lambda = cell.lambda.map_or(0, f64::to_bits);
    mix_seed(mix_seed(mix_seed(master, model), lambda), seed)
}

/// Instance-level data shared read-only by every run.
#[derive(Debug, Clone)]
pub struct Problem {
    pub instance: VrpInstance,
    pub qubo: QuboProblem,
    pub cost: CostModel,
    pub optimal: Vec<usize>,
    pub c_star: f64,
    groups: crate::ansatz::ConstraintGroups,
}

impl Problem {
    pub fn new(
        instance: VrpInstance,
        penalty: PenaltyRule,
        energy_scale: Option<f64>,
    ) -> Result<Self> {
        let cs = build_constraints(&instance)?;
        let qubo = penalize(&instance, &cs, penalty)?;
        let oracle = brute_force_optimum(&instance, &cs, &qubo)?;
        let c_star = oracle
            .feasible_min
            .ok_or_else(|| Error::InvalidInstance("instance has no feasible routing".into()))?;
        let optimal = oracle.feasible_argmin.iter().map(|b| b.index()).collect();
        let scale = energy_scale.unwrap_or_else(|| default_energy_scale(&qubo));
        let cost = CostModel::new(&qubo, scale)?;
        let groups = derive_constraint_groups(&cs, &instance.links())?;
        Ok(Problem {
            instance,
            qubo,
            cost,
            optimal,
            c_star,
            groups,
        })
    }

    pub fn ansatz(&self, cell: &Cell, depth: usize) -> Result<AnsatzSpec> {
        let n = self.cost.num_qubits();
        match cell.model {
            AnsatzKind::Standard => Ok(AnsatzSpec::standard(n, depth)),
            AnsatzKind::ConstraintAware => {
                AnsatzSpec::constraint_aware(&self.groups, n, depth, cell.lambda.unwrap_or(1.0))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub regime: Regime,
    pub model: AnsatzKind,
    pub lambda: Option<f64>,
    pub seed: u64,
    pub run_seed: u64,
    pub params: ParameterPoint,
    pub objective: f64,
    pub evaluations: usize,
    pub metrics: RunMetrics,
    /// Optimal-set mass of the distribution the histogram was drawn from.
    pub exact_p_opt: f64,
    pub histogram: ShotHistogram,
    pub distribution: Vec<f64>,
}

impl RunRecord {
    pub fn cell(&self) -> Cell {
        Cell {
            model: self.model,
            lambda: self.lambda,
        }
    }
}

/// Runs one seed of one cell.
pub fn run_single(
    cfg: &ExperimentConfig,
    problem: &Problem,
    cell: &Cell,
    seed: u64,
) -> Result<(RunRecord, Vec<crate::optimize::TraceRow>)> {
    let spec = problem.ansatz(cell, cfg.depth)?;
    let kind = cfg.objective_kind();
    let opt = OptimizerConfig {
        seed: run_seed(cfg.optimizer.seed, cell, seed),
        ..cfg.optimizer
    };
    let result = minimize(&spec, &problem.cost, &kind, &opt)?;
    let sample = final_sampling(&spec, &problem.cost, &result.params, &kind, &opt)?;
    let metrics = run_metrics(
        &sample.histogram,
        &problem.optimal,
        |i| problem.cost.qubo_value(i),
        problem.c_star,
    )?;
    let exact_p_opt = problem
        .optimal
        .iter()
        .map(|&i| sample.distribution[i])
        .sum();
    let record = RunRecord {
        regime: cfg.regime,
        model: cell.model,
        lambda: cell.lambda,
        seed,
        run_seed: opt.seed,
        params: result.params,
        objective: result.objective,
        evaluations: result.restarts.iter().map(|r| r.evaluations).sum(),
        metrics,
        exact_p_opt,
        histogram: sample.histogram,
        distribution: sample.distribution,
    };
    Ok((record, result.trace))
}

/// Runs every (cell, seed) pair in parallel without touching the disk.
///
/// Records come back in cell order, then seed order.
pub fn execute(cfg: &ExperimentConfig, problem: &Problem) -> Result<Vec<RunRecord>> {
    execute_with(cfg, problem, |_, _| Ok(()))
}

fn execute_with<F>(cfg: &ExperimentConfig, problem: &Problem, on_run: F) -> Result<Vec<RunRecord>>
where
    F: Fn(&RunRecord, &[crate::optimize::TraceRow]) -> Result<()> + Sync,
{
    cfg.validate()?;
    let jobs: Vec<(Cell, u64)> = cfg
        .cells()
        .into_iter()
        .flat_map(|c| cfg.seeds.iter().map(move |&s| (c, s)))
        .collect();
    let results: Vec<Result<RunRecord>> = jobs
        .par_iter()
        .map(|(cell, seed)| {
            let (record, trace) = run_single(cfg, problem, cell, *seed)?;
            on_run(&record, &trace)?;
            Ok(record)
        })
        .collect();
    results.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub regime: Regime,
    pub cell: Cell,
    pub p_opt: AggregateStats,
    pub gap: AggregateStats,
    pub rank: AggregateStats,
}

/// Falls back to a NaN spread when there is a single run.
fn summarize(values: &[f64]) -> AggregateStats {
    aggregate(values).unwrap_or_else(|_| {
        let mean = values.first().copied().unwrap_or(f64::NAN);
        AggregateStats {
            mean,
            std: f64::NAN,
            ci_low: f64::NAN,
            ci_high: f64::NAN,
            runs: values.len(),
        }
    })
}

/// One row per cell, in the order cells first appear in `records`.
pub fn aggregate_rows(records: &[RunRecord]) -> Vec<AggregateRow> {
    let mut cells: Vec<(Regime, Cell)> = Vec::new();
    for r in records {
        let key = (r.regime, r.cell());
        if !cells.contains(&key) {
            cells.push(key);
        }
    }
    cells
        .into_iter()
        .map(|(regime, cell)| {
            let runs: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.regime == regime && r.cell() == cell)
                .collect();
            let pick = |f: fn(&RunMetrics) -> f64| {
                summarize(&runs.iter().map(|r| f(&r.metrics)).collect::<Vec<_>>())
            };
            AggregateRow {
                regime,
                cell,
                p_opt: pick(|m| m.p_opt),
                gap: pick(|m| m.expected_energy_gap),
                rank: pick(|m| m.sampling_rank as f64),
            }
        })
        .collect()
}

pub fn write_aggregate_csv(path: impl AsRef<Path>, rows: &[AggregateRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec![
        "regime".to_string(),
        "model".into(),
        "lambda".into(),
        "runs".into(),
    ];
    for metric in ["p_opt", "gap", "rank"] {
        for stat in ["mean", "std", "ci_low", "ci_high"] {
            header.push(format!("{metric}_{stat}"));
        }
    }
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![
            row.regime.to_string(),
            row.cell.model.label().to_string(),
            row.cell.lambda_label(),
            row.p_opt.runs.to_string(),
        ];
        for s in [&row.p_opt, &row.gap, &row.rank] {
            rec.extend(
                [s.mean, s.std, s.ci_low, s.ci_high]
                    .iter()
                    .map(|v| v.to_string()),
            );
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Long format: one line per (regime, model, lambda, metric).
pub fn write_plot_csv(path: impl AsRef<Path>, rows: &[AggregateRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "regime", "model", "lambda", "metric", "mean", "ci_low", "ci_high",
    ])?;
    for row in rows {
        for (name, s) in [
            ("p_opt", &row.p_opt),
            ("gap", &row.gap),
            ("rank", &row.rank),
        ] {
            w.write_record([
                row.regime.to_string(),
                row.cell.model.label().to_string(),
                row.cell.lambda_label(),
                name.to_string(),
                s.mean.to_string(),
                s.ci_low.to_string(),
                s.ci_high.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    pub rows: Vec<AggregateRow>,
    pub aggregate_csv: PathBuf,
    pub plot_csv: PathBuf,
}

fn io_err(path: &Path, e: impl fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Full sweep with result files under `cfg.output_dir`.
///
/// Per-run JSON files are written as runs finish, so an aborted sweep keeps
/// whatever completed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    run_experiment_with(cfg, |_| {})
}

/// As [`run_experiment`], calling `progress` after each run is stored.
pub fn run_experiment_with<P>(cfg: &ExperimentConfig, progress: P) -> Result<ExperimentOutput>
where
    P: Fn(&RunRecord) + Sync,
{
    cfg.validate()?;
    let instance = VrpInstance::from_path(&cfg.instance)?;
    let problem = Problem::new(instance, cfg.penalty, cfg.energy_scale)?;

    let out = &cfg.output_dir;
    let runs_dir = out.join("runs");
    fs::create_dir_all(&runs_dir).map_err(|e| io_err(&runs_dir, e))?;
    let cfg_path = out.join("config.json");
    fs::write(&cfg_path, serde_json::to_string_pretty(cfg)?).map_err(|e| io_err(&cfg_path, e))?;

    let collector = Mutex::new(());
    let records = execute_with(cfg, &problem, |record, trace| {
        let stem = record.cell().file_stem(record.regime, record.seed);
        let json = serde_json::to_string_pretty(record)?;
        let _guard = collector.lock().unwrap_or_else(|p| p.into_inner());
        let path = runs_dir.join(format!("{stem}.json"));
        fs::write(&path, json).map_err(|e| io_err(&path, e))?;
        if cfg.write_traces {
            crate::optimize::write_trace_csv(runs_dir.join(format!("{stem}_trace.csv")), trace)?;
        }
        progress(record);
        Ok(())
    })?;

    let rows = aggregate_rows(&records);
    let aggregate_csv = out.join("aggregate.csv");
    let plot_csv = out.join("plot.csv");
    write_aggregate_csv(&aggregate_csv, &rows)?;
    write_plot_csv(&plot_csv, &rows)?;
    Ok(ExperimentOutput {
        records,
        rows,
        aggregate_csv,
        plot_csv,
    })
}
