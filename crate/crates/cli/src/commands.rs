use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use subsup::bench::{fuzz_theorems, run_comparison, ComparisonConfig, FuzzConfig};
use subsup::bounds::{bound_table, BoundTable};
use subsup::debate::{DebateConfig, DebateInstance, View};
use subsup::dual::{choose_alpha, solve_dual, DualConfig, Primal};
use subsup::exact::write_frontier_csv;
use subsup::families::{make_tightness, tightness_expected_ratio, Instance, RandomParams};
use subsup::greedy::{run_ratio_marginal, write_traces_csv, Algorithm, StopPolicy};
use subsup::setfn::{curvature_report, CurvatureReport, DEFAULT_PAIR_CAP};
use subsup::{SetFunction, Subset};

use crate::output::{load_config, RunDir};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Debate,
    Synthetic,
    Instance,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ViewArg {
    Global,
    Local,
}

/// Parses `0.25` or `1/3`.
fn parse_fraction(text: &str) -> Result<f64, String> {
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    match text.split_once('/') {
        Some((a, b)) => Ok(parse(a)? / parse(b)?),
        None => parse(text),
    }
}

/// The instance given by path, or a random coverage / power-cost instance.
fn load_or_generate(path: Option<&Path>, n: usize, seed: u64) -> Result<Instance> {
    match path {
        Some(p) => Instance::load(p).with_context(|| format!("loading instance {}", p.display())),
        None => Ok(Instance::random(seed, n, &RandomParams::default())?),
    }
}

// ---------------------------------------------------------------- bench

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub source: Source,
    /// Drives instance generation and the random baseline. Overrides
    /// `debate.seed`.
    pub seed: u64,
    pub debate: DebateConfig,
    /// Ground-set size for synthetic instances.
    pub n: usize,
    pub params: RandomParams,
    pub instance: Option<PathBuf>,
    /// Defaults to `g(V)/2`.
    pub theta: Option<f64>,
    pub beta_plus: f64,
    pub with_opt: bool,
    pub with_curvature: bool,
    pub grid_points: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        let comparison = ComparisonConfig::default();
        BenchConfig {
            source: Source::Synthetic,
            seed: 0,
            debate: DebateConfig::default(),
            n: 8,
            params: RandomParams::default(),
            instance: None,
            theta: None,
            beta_plus: comparison.beta_plus,
            with_opt: false,
            with_curvature: false,
            grid_points: comparison.grid_points,
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// JSON config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Use the multi-agent debate simulator.
    #[arg(long, conflicts_with_all = ["synthetic", "instance"])]
    debate: bool,
    /// Use a random coverage / power-cost instance.
    #[arg(long, conflicts_with = "instance")]
    synthetic: bool,
    /// Load an instance file.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Selectable debate agents.
    #[arg(long)]
    m: Option<usize>,
    /// Debate questions.
    #[arg(long = "T", alias = "questions")]
    questions: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long, value_enum)]
    view: Option<ViewArg>,
    /// Sampled peers per agent and round under the local view.
    #[arg(long)]
    peer_count: Option<usize>,
    /// Monte Carlo scenarios for the debate objective.
    #[arg(long)]
    scenarios: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Synthetic ground-set size.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    theta: Option<f64>,
    /// Each curve runs until its cost reaches beta_plus·θ.
    #[arg(long)]
    beta_plus: Option<f64>,
    /// Attach the exact Pareto frontier.
    #[arg(long)]
    with_opt: bool,
    /// Attach exact curvatures and per-step guarantees.
    #[arg(long)]
    with_curvature: bool,
    #[arg(long)]
    grid_points: Option<usize>,
}

impl BenchArgs {
    pub fn resolve(&self) -> Result<BenchConfig> {
        let mut c: BenchConfig = load_config(self.config.as_deref())?;
        if self.debate {
            c.source = Source::Debate;
        }
        if self.synthetic {
            c.source = Source::Synthetic;
        }
        if let Some(path) = &self.instance {
            c.source = Source::Instance;
            c.instance = Some(path.clone());
        }
        let d = &mut c.debate;
        if let Some(m) = self.m {
            d.m = m;
        }
        if let Some(t) = self.questions {
            d.questions = t;
        }
        if let Some(r) = self.rounds {
            d.rounds = r;
        }
        if let Some(s) = self.scenarios {
            d.n_scenarios = s;
        }
        let peers = match (self.peer_count, d.view) {
            (Some(p), _) => p,
            (None, View::Local { peer_count }) => peer_count,
            (None, View::Global) => 3,
        };
        match self.view {
            Some(ViewArg::Global) => d.view = View::Global,
            Some(ViewArg::Local) => d.view = View::Local { peer_count: peers },
            None => {
                if let View::Local { peer_count } = &mut d.view {
                    *peer_count = peers;
                }
            }
        }
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        c.debate.seed = c.seed;
        if let Some(n) = self.n {
            c.n = n;
        }
        if self.theta.is_some() {
            c.theta = self.theta;
        }
        if let Some(b) = self.beta_plus {
            c.beta_plus = b;
        }
        c.with_opt |= self.with_opt;
        c.with_curvature |= self.with_curvature;
        if let Some(p) = self.grid_points {
            c.grid_points = p;
        }
        if c.source == Source::Instance && c.instance.is_none() {
            bail!("source \"instance\" needs an instance path");
        }
        Ok(c)
    }
}

pub fn bench(args: &BenchArgs) -> Result<ExitCode> {
    let config = args.resolve()?;
    let run = RunDir::create(&args.out, "bench", config.seed, &config)?;

    let (label, f, g): (String, Box<dyn SetFunction>, Box<dyn SetFunction>) = match config.source {
        Source::Debate => {
            let inst = DebateInstance::generate(config.debate.clone())?;
            let view = match config.debate.view {
                View::Global => "global",
                View::Local { .. } => "local",
            };
            let label = format!(
                "debate m={} T={} r={} view={view}",
                config.debate.m, config.debate.questions, config.debate.rounds
            );
            (label, Box::new(inst.objective()), Box::new(inst.cost()))
        }
        Source::Synthetic => {
            let inst = Instance::random(config.seed, config.n, &config.params)?;
            inst.save(run.path("instance.json"))?;
            (format!("synthetic n={}", config.n), Box::new(inst.objective), Box::new(inst.cost))
        }
        Source::Instance => {
            let path = config.instance.as_deref().expect("checked in resolve");
            let inst = load_or_generate(Some(path), 0, 0)?;
            let theta = config.theta.or(inst.theta);
            let label = format!("instance {}", path.display());
            return finish_bench(&run, &config, label, &inst.objective, &inst.cost, theta);
        }
    };
    finish_bench(&run, &config, label, f.as_ref(), g.as_ref(), config.theta)
}

fn finish_bench(
    run: &RunDir,
    config: &BenchConfig,
    label: String,
    f: &dyn SetFunction,
    g: &dyn SetFunction,
    theta: Option<f64>,
) -> Result<ExitCode> {
    let comparison = ComparisonConfig {
        algorithms: ComparisonConfig::all_algorithms(config.seed),
        theta,
        beta_plus: config.beta_plus,
        with_opt: config.with_opt,
        grid_points: config.grid_points,
        with_curvature: config.with_curvature,
    };
    let report = run_comparison(&label, f, g, &comparison)?;

    let (out, curves) = run.writer("curves.csv")?;
    write_traces_csv(out, &report.traces)?;
    let mut written = vec![curves];
    if let Some(rows) = &report.frontier {
        let (out, path) = run.writer("frontier.csv")?;
        write_frontier_csv(out, rows)?;
        written.push(path);
    }
    written.push(run.write_json("report.json", &report)?);

    println!("{label}: θ = {}, curves run to cost {}", report.theta, report.budget_cap);
    println!("{:<16} {:>6} {:>14} {:>14} {:>14}", "algorithm", "steps", "f", "g", "auc");
    for t in &report.traces {
        println!(
            "{:<16} {:>6} {:>14.6} {:>14.6} {:>14.6}",
            t.algorithm.name(),
            t.steps.len(),
            t.f_value(),
            t.g_value(),
            report.auc(t.algorithm).unwrap_or(f64::NAN)
        );
    }
    if let Some(ratio) = report.min_frontier_ratio(Algorithm::RatioMarginal) {
        println!("ratio-marginal / optimum, worst checkpoint: {ratio:.6}");
    }
    if let Some(c) = &report.curvature {
        println!("γ = {}, γ' = {}, c = {}", c.gamma_weak, c.gamma_strict, c.c_sub);
    }
    for path in &written {
        println!("wrote {}", path.display());
    }
    for v in &report.violations {
        eprintln!("violation: {} {}", v.theorem, v.details);
    }
    Ok(if report.violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

// ---------------------------------------------------------------- tightness

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TightnessConfig {
    pub k: usize,
    pub gamma: f64,
}

impl Default for TightnessConfig {
    fn default() -> Self {
        TightnessConfig {
            k: 300,
            gamma: 1.0 / 3.0,
        }
    }
}

#[derive(Debug, Args)]
pub struct TightnessArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write the result and config snapshot here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    /// Target curvature, as a decimal or a fraction like 1/3.
    #[arg(long, value_parser = parse_fraction)]
    gamma: Option<f64>,
}

#[derive(Debug, Serialize)]
struct TightnessResult {
    k: usize,
    gamma: f64,
    k_prime: usize,
    epsilon: f64,
    ground_size: usize,
    selected: Vec<usize>,
    realized_ratio: f64,
    closed_form: f64,
    asymptote: f64,
}

pub fn tightness(args: &TightnessArgs) -> Result<ExitCode> {
    let mut config: TightnessConfig = load_config(args.config.as_deref())?;
    if let Some(k) = args.k {
        config.k = k;
    }
    if let Some(g) = args.gamma {
        config.gamma = g;
    }
    let t = make_tightness(config.k, config.gamma)?;
    let trace = run_ratio_marginal(&t.objective, &t.cost, t.theta(), StopPolicy::BeforeOverflow)?;
    let result = TightnessResult {
        k: t.k,
        gamma: t.gamma,
        k_prime: t.k_prime,
        epsilon: t.epsilon,
        ground_size: t.ground_size(),
        selected: trace.elements(),
        realized_ratio: trace.f_value() / t.objective.value(&t.o_set()),
        closed_form: tightness_expected_ratio(&t),
        asymptote: 1.0 - (-(1.0 - t.gamma)).exp(),
    };
    println!("k = {}, γ = {}, k' = {}, ε = {}", result.k, result.gamma, result.k_prime, result.epsilon);
    println!("greedy picked {} of {} elements", result.selected.len(), result.ground_size);
    println!("realized ratio  {:.12}", result.realized_ratio);
    println!("closed form     {:.12}", result.closed_form);
    println!("asymptote       {:.12}", result.asymptote);
    if let Some(dir) = &args.out {
        let run = RunDir::create(dir, "tightness", config.k as u64, &config)?;
        println!("wrote {}", run.write_json("result.json", &result)?.display());
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- verify

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// JSON fuzzing config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Smallest ground-set size.
    #[arg(long)]
    n_min: Option<usize>,
    /// Largest ground-set size.
    #[arg(long)]
    n_max: Option<usize>,
    /// Multiply every guarantee by this factor to check that violations
    /// are reported.
    #[arg(long, hide = true, num_args = 0..=1, default_missing_value = "1.5")]
    corrupt_bound: Option<f64>,
}

pub fn verify(args: &VerifyArgs) -> Result<ExitCode> {
    let mut config: FuzzConfig = load_config(args.config.as_deref())?;
    if let Some(n) = args.instances {
        config.n_instances = n;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(lo) = args.n_min {
        config.size_range.0 = lo;
    }
    if let Some(hi) = args.n_max {
        config.size_range.1 = hi;
    }
    if let Some(x) = args.corrupt_bound {
        config.bound_inflation = x;
    }
    let run = RunDir::create(&args.out, "verify", config.seed, &config)?;
    let report = fuzz_theorems(&config)?;

    let (mut log, log_path) = run.writer("violations.jsonl")?;
    for v in &report.violations {
        serde_json::to_writer(&mut log, v)?;
        writeln!(log)?;
    }
    log.flush()?;
    let report_path = run.write_json("report.json", &report)?;

    let checks: Vec<String> = report.checks.iter().map(|(k, v)| format!("{k}={v}")).collect();
    println!(
        "{} instances ({} skipped): {}",
        report.instances,
        report.skipped,
        checks.join(" ")
    );
    let misses = report.beyond.iter().filter(|b| !b.holds).count();
    println!("beyond-overflow comparisons (informational): {misses} of {} below the bound", report.beyond.len());
    println!("{} violations", report.violations.len());
    println!("violation log: {}", log_path.display());
    println!("report: {}", report_path.display());
    Ok(if report.violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

// ---------------------------------------------------------------- dual

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PrimalArg {
    /// Ratio-marginal greedy stopped at the first overflow.
    Greedy,
    /// Ratio-marginal greedy stopped before the first overflow.
    GreedyBefore,
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualCmdConfig {
    /// Instance file; a random instance of size `n` when absent.
    pub instance: Option<PathBuf>,
    pub n: usize,
    pub seed: u64,
    pub tau: f64,
    /// `null` picks the strongest guarantee from the exact curvatures.
    pub alpha: Option<f64>,
    pub epsilon: Option<f64>,
    pub primal: PrimalArg,
}

impl Default for DualCmdConfig {
    fn default() -> Self {
        DualCmdConfig {
            instance: None,
            n: 8,
            seed: 0,
            tau: 1.0,
            alpha: None,
            epsilon: None,
            primal: PrimalArg::Greedy,
        }
    }
}

#[derive(Debug, Args)]
pub struct DualArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Size of the random instance used when no file is given.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Objective target.
    #[arg(long)]
    tau: Option<f64>,
    /// Relaxation factor in (0, 1], or "auto".
    #[arg(long)]
    alpha: Option<String>,
    /// Bisection tolerance; defaults to g(V)·2^-20.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum)]
    primal: Option<PrimalArg>,
}

#[derive(Debug, Serialize)]
struct DualOutput {
    set: Subset,
    f: f64,
    g: f64,
    budget_found: f64,
    iterations: usize,
    tau: f64,
    alpha: f64,
    epsilon: f64,
    non_monotone: Vec<(f64, f64)>,
}

pub fn dual(args: &DualArgs) -> Result<ExitCode> {
    let mut config: DualCmdConfig = load_config(args.config.as_deref())?;
    if args.instance.is_some() {
        config.instance = args.instance.clone();
    }
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(t) = args.tau {
        config.tau = t;
    }
    match args.alpha.as_deref() {
        None => {}
        Some("auto") => config.alpha = None,
        Some(x) => config.alpha = Some(x.parse().with_context(|| format!("alpha {x:?}"))?),
    }
    if args.epsilon.is_some() {
        config.epsilon = args.epsilon;
    }
    if let Some(p) = args.primal {
        config.primal = p;
    }

    let inst = load_or_generate(config.instance.as_deref(), config.n, config.seed)?;
    let primal = match config.primal {
        PrimalArg::Greedy => Primal::Greedy {
            policy: StopPolicy::FirstOverflow,
        },
        PrimalArg::GreedyBefore => Primal::Greedy {
            policy: StopPolicy::BeforeOverflow,
        },
        PrimalArg::Exact => Primal::Exact,
    };
    let alpha = match (config.alpha, primal) {
        (Some(a), _) => a,
        (None, Primal::Exact) => 1.0,
        (None, Primal::Greedy { .. }) => {
            let c = curvature_report(&inst.objective, &inst.cost, DEFAULT_PAIR_CAP)?;
            choose_alpha(c.gamma_weak, Some(c.c_sub))?
        }
    };
    let result = solve_dual(
        &inst.objective,
        &inst.cost,
        &DualConfig {
            tau: config.tau,
            epsilon: config.epsilon,
            alpha,
            primal,
        },
    )?;
    let output = DualOutput {
        set: result.set,
        f: result.f,
        g: result.g,
        budget_found: result.budget_found,
        iterations: result.iterations,
        tau: config.tau,
        alpha,
        epsilon: result.epsilon,
        non_monotone: result.non_monotone,
    };
    println!("{}", serde_json::to_string_pretty(&output)?);
    if let Some(dir) = &args.out {
        let run = RunDir::create(dir, "dual", config.seed, &config)?;
        eprintln!("wrote {}", run.write_json("result.json", &output)?.display());
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- curvature

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Size of the random instance used when no file is given.
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

pub fn curvature(args: &CurvatureArgs) -> Result<ExitCode> {
    let inst = load_or_generate(args.instance.as_deref(), args.n, args.seed)?;
    let report = curvature_report(&inst.objective, &inst.cost, DEFAULT_PAIR_CAP)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print_curvature(&report);
    }
    Ok(ExitCode::SUCCESS)
}

fn print_curvature(r: &CurvatureReport) {
    println!("γ  (weak supermodular)   {}", r.gamma_weak);
    if let Some(w) = &r.weak_witness {
        println!("    S = {}, T = {}, g(T)/g(T|S) = {}", w.s, w.t, w.ratio);
    }
    println!("γ' (strict supermodular) {}", r.gamma_strict);
    if let Some(w) = &r.strict_witness {
        println!("    v = {}, S = {}, g(v)/g(v|S) = {}", w.v, w.s, w.ratio);
    }
    println!("c  (submodular)          {}", r.c_sub);
    if let Some(w) = &r.sub_witness {
        println!("    v = {}, S = {}, f(v|S)/f(v) = {}", w.v, w.s, w.ratio);
    }
}

// ---------------------------------------------------------------- bounds

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Weak supermodular curvature of the cost.
    #[arg(long, value_parser = parse_fraction)]
    gamma: f64,
    /// Submodular curvature of the objective.
    #[arg(long, value_parser = parse_fraction)]
    c: Option<f64>,
    /// Realized overflow factor g(S)/θ.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long)]
    json: bool,
}

pub fn bounds(args: &BoundsArgs) -> Result<ExitCode> {
    let table: BoundTable = bound_table(args.c, args.gamma, args.beta)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&table)?);
        return Ok(ExitCode::SUCCESS);
    }
    let show = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.12}"));
    println!("γ = {}, c = {}, β = {}", table.gamma, show(table.c), table.beta);
    let rows = [
        ("main", "1 - e^-(1-γ)", Some(table.main)),
        ("overflow_cap", "(2-γ)/(1-γ)", Some(table.overflow_cap)),
        ("beta", "1 - e^-β(1-γ)", Some(table.beta_bound)),
        ("curv_f", "1 - (1-(1-c)(1-γ))^(1/(1-c))", table.curv_f),
        ("beyond", "curv_f continued to β", table.beyond),
    ];
    for (name, formula, value) in rows {
        println!("{name:<13}{formula:<32}{}", show(value));
    }
    Ok(ExitCode::SUCCESS)
}
