use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use vrp_qaoa::ansatz::{circuit, AnsatzKind, ParameterPoint};
use vrp_qaoa::encode::{default_energy_scale, EncodingReport, IsingCoefficients};
use vrp_qaoa::experiment::{run_experiment_with, Cell, ExperimentConfig, Problem, Regime};
use vrp_qaoa::instance::brute_force_optimum;
use vrp_qaoa::sim::GateRecord;
use vrp_qaoa::{build_constraints, penalize, Bitstring, NoiseModel, PenaltyRule, VrpInstance};

#[derive(Parser)]
#[command(
    name = "vrp-qaoa",
    version,
    about = "Constraint-aware QAOA for small vehicle routing instances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Brute-force the feasible optimum and the QUBO minimum.
    Solve {
        instance: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the penalty QUBO and its Ising forms.
    Encode {
        instance: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run a regime / lambda sweep described by a JSON config.
    Run(RunArgs),
    /// Dump the gate list of one ansatz as JSON.
    Circuit(CircuitArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AnsatzChoice {
    Standard,
    #[value(
        name = "constraint_aware",
        alias = "constraint-aware",
        alias = "proposed"
    )]
    ConstraintAware,
    Both,
}

impl AnsatzChoice {
    fn models(self) -> Vec<AnsatzKind> {
        match self {
            AnsatzChoice::Standard => vec![AnsatzKind::Standard],
            AnsatzChoice::ConstraintAware => vec![AnsatzKind::ConstraintAware],
            AnsatzChoice::Both => vec![AnsatzKind::Standard, AnsatzKind::ConstraintAware],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NoisePreset {
    /// p1 = 1.5e-4, p2 = 1.25e-3, symmetric readout flips of 1e-3.
    #[value(name = "paper")]
    Reference,
    None,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// I, II or III
    #[arg(long)]
    regime: Option<String>,
    /// Comma-separated lambda values.
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    /// Circuit depth.
    #[arg(long)]
    p: Option<usize>,
    /// A count `N` (seeds 0..N-1), a range `a..b` (inclusive) or a comma list.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long, value_enum)]
    ansatz: Option<AnsatzChoice>,
    #[arg(long)]
    shots_final: Option<u64>,
    #[arg(long, value_enum)]
    noise_preset: Option<NoisePreset>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct CircuitArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "constraint_aware")]
    ansatz: AnsatzChoice,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Comma-separated, one per layer; zeros when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gamma: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
}

fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().context("seed range start")?;
        let b: u64 = b
            .trim_start_matches('=')
            .trim()
            .parse()
            .context("seed range end")?;
        if b < a {
            bail!("empty seed range {text}");
        }
        return Ok((a..=b).collect());
    }
    if text.contains(',') {
        return text
            .split(',')
            .map(|s| s.trim().parse().context("seed list"))
            .collect();
    }
    let n: u64 = text.parse().context("seed count")?;
    Ok((0..n).collect())
}

fn apply_overrides(cfg: &mut ExperimentConfig, args: &RunArgs) -> Result<()> {
    if let Some(r) = &args.regime {
        cfg.regime = r.parse::<Regime>()?;
    }
    if let Some(l) = &args.lambda {
        cfg.lambdas = l.clone();
    }
    if let Some(p) = args.p {
        cfg.depth = p;
    }
    if let Some(s) = &args.seeds {
        cfg.seeds = parse_seeds(s)?;
    }
    if let Some(a) = args.ansatz {
        cfg.models = a.models();
    }
    if let Some(n) = args.shots_final {
        cfg.optimizer.final_shots = n;
    }
    match args.noise_preset {
        Some(NoisePreset::Reference) => cfg.noise = Some(NoiseModel::reference()),
        Some(NoisePreset::None) => cfg.noise = None,
        None => {}
    }
    if let Some(o) = &args.output {
        cfg.output_dir = o.clone();
    }
    Ok(())
}

fn load_instance(path: &Path) -> Result<VrpInstance> {
    VrpInstance::from_path(path).with_context(|| format!("loading instance {}", path.display()))
}

#[derive(Serialize)]
struct SolveReport {
    feasible_optimum: Vec<Bitstring>,
    optimal_cost: Option<f64>,
    feasible_count: usize,
    qubo_argmin: Vec<Bitstring>,
    qubo_min: f64,
}

fn solve(path: &Path, json: bool) -> Result<()> {
    let inst = load_instance(path)?;
    let cs = build_constraints(&inst)?;
    let qubo = penalize(&inst, &cs, PenaltyRule::default())?;
    let oracle = brute_force_optimum(&inst, &cs, &qubo)?;
    let report = SolveReport {
        feasible_optimum: oracle.feasible_argmin,
        optimal_cost: oracle.feasible_min,
        feasible_count: oracle.feasible_count,
        qubo_argmin: oracle.qubo_argmin,
        qubo_min: oracle.qubo_min,
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(());
    }
    let join = |v: &[Bitstring]| {
        v.iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    println!("feasible optimum : {}", join(&report.feasible_optimum));
    match report.optimal_cost {
        Some(c) => println!("optimal cost     : {c}"),
        None => println!("optimal cost     : (no feasible routing)"),
    }
    println!("feasible count   : {}", report.feasible_count);
    println!(
        "QUBO minimum     : {} at {}",
        tidy(report.qubo_min),
        join(&report.qubo_argmin)
    );
    Ok(())
}

/// Drops binary round-off from values that are short decimals.
fn tidy(v: f64) -> f64 {
    (v * 1e9).round() / 1e9
}

fn print_ising(title: &str, ising: &IsingCoefficients, vars: &[String]) {
    println!("\n{title}");
    println!("  constant {:>12.4}", ising.constant);
    for (v, h) in vars.iter().zip(&ising.field) {
        println!("  h[{v:<6}] {h:>12.4}");
    }
    for ((i, j), w) in &ising.coupling {
        println!("  J[{},{}] {w:>12.4}", vars[*i], vars[*j]);
    }
}

fn encode(path: &Path, json: bool) -> Result<()> {
    let inst = load_instance(path)?;
    let cs = build_constraints(&inst)?;
    let qubo = penalize(&inst, &cs, PenaltyRule::default())?;
    let report = EncodingReport::new(&inst.links(), &cs, &qubo);
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(());
    }
    let vars = &report.variables;
    println!("variables  {}", vars.join(" "));
    println!("penalty P  {}", tidy(report.penalty));
    println!("\nconstraints");
    for c in &report.constraints {
        println!("  {c}");
    }
    println!("\npenalty terms (before scaling by P)");
    for t in &qubo.terms {
        let mut parts = vec![format!("{}", t.constant)];
        parts.extend(t.linear.iter().map(|(i, c)| format!("{c:+} {}", vars[*i])));
        parts.extend(
            t.quadratic
                .iter()
                .map(|((i, j), c)| format!("{c:+} {} {}", vars[*i], vars[*j])),
        );
        println!("  [{}] {}", t.label, parts.join(" "));
    }
    println!("\nQUBO");
    println!("  constant {:>12.4}", qubo.constant);
    for (v, a) in vars.iter().zip(&qubo.linear) {
        println!("  {v:<10} {a:>12.4}");
    }
    for ((i, j), b) in &qubo.quadratic {
        println!("  {} {} {b:>12.4}", vars[*i], vars[*j]);
    }
    print_ising("Ising, x = (1 + z) / 2", &report.ising_aligned, vars);
    print_ising("Ising, x = (1 - z) / 2", &report.ising_computational, vars);
    println!("\nenergy scale s = {}", tidy(default_energy_scale(&qubo)));
    Ok(())
}

fn run(args: &RunArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    apply_overrides(&mut cfg, args)?;
    cfg.validate()?;
    let total = cfg.cells().len() * cfg.seeds.len();
    if !args.quiet {
        eprintln!(
            "regime {} | {} runs | p = {} | output {}",
            cfg.regime,
            total,
            cfg.depth,
            cfg.output_dir.display()
        );
    }
    let done = std::sync::atomic::AtomicUsize::new(0);
    let quiet = args.quiet;
    let out = run_experiment_with(&cfg, |r| {
        let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
        if !quiet {
            let lambda = r
                .lambda
                .map(|l| format!(" lambda={l:.2}"))
                .unwrap_or_default();
            eprintln!(
                "[{k}/{total}] {}{lambda} seed={} p_opt={:.4} gap={:.2} rank={}",
                r.model.label(),
                r.seed,
                r.metrics.p_opt,
                r.metrics.expected_energy_gap,
                r.metrics.sampling_rank
            );
        }
    })?;

    println!(
        "{:<18} {:>6} {:>22} {:>26} {:>10}",
        "model", "lambda", "p_opt (95% CI)", "gap (95% CI)", "rank"
    );
    for row in &out.rows {
        let Cell { model, lambda } = row.cell;
        println!(
            "{:<18} {:>6} {:>7.4} [{:.4}, {:.4}] {:>8.2} [{:.2}, {:.2}] {:>10.2}",
            model.label(),
            lambda
                .map(|l| format!("{l:.2}"))
                .unwrap_or_else(|| "-".into()),
            row.p_opt.mean,
            row.p_opt.ci_low,
            row.p_opt.ci_high,
            row.gap.mean,
            row.gap.ci_low,
            row.gap.ci_high,
            row.rank.mean
        );
    }
    println!(
        "\nwrote {} and {}",
        out.aggregate_csv.display(),
        out.plot_csv.display()
    );
    Ok(())
}

fn dump_circuit(args: &CircuitArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let problem = Problem::new(inst, PenaltyRule::default(), None)?;
    let model = match args.ansatz {
        AnsatzChoice::Standard => AnsatzKind::Standard,
        AnsatzChoice::ConstraintAware => AnsatzKind::ConstraintAware,
        AnsatzChoice::Both => bail!("pick one ansatz for a circuit dump"),
    };
    let cell = Cell {
        model,
        lambda: Some(args.lambda),
    };
    let spec = problem.ansatz(&cell, args.p)?;
    let gamma = args.gamma.clone().unwrap_or_else(|| vec![0.0; args.p]);
    let beta = args.beta.clone().unwrap_or_else(|| vec![0.0; args.p]);
    let params = ParameterPoint::new(gamma, beta)?;
    let gates = circuit(&spec, &problem.cost, &params)?;
    let records: Vec<GateRecord> = gates.iter().map(|g| g.record()).collect();
    println!("{}", serde_json::to_string_pretty(&records)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { instance, json } => solve(instance, *json),
        Command::Encode { instance, json } => encode(instance, *json),
        Command::Run(args) => run(args),
        Command::Circuit(args) => dump_circuit(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
