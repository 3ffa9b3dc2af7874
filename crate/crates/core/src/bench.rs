//! Algorithm comparisons on a fixed instance, and randomized validation of
//! the approximation guarantees against exact oracles.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_beta, bound_beyond, bound_curv_f, bound_main, bound_overflow_cap};
use crate::exact::{Enumeration, FrontierRow, EXACT_CAP};
use crate::families::{make_random_instance, CostSpec, Instance, ObjectiveSpec, RandomParams};
use crate::greedy::{run, Algorithm, GreedyTrace, StopPolicy};
use crate::par::map_range;
use crate::setfn::{
    curvature_report, curvature_submodular, curvature_supermodular_strict,
    curvature_supermodular_weak, CurvatureReport, SetFunction, DEFAULT_PAIR_CAP,
};
use crate::{Error, Result, Subset};

/// Absolute tolerance on normalized bound inequalities.
pub const FUZZ_TOLERANCE: f64 = 1e-9;

/// How far past `θ` the continued trace runs during fuzzing.
pub const FUZZ_BETA_PLUS: f64 = 4.0;

/// `f` of the step function through `(g, f)` points at cost `cost`: the value
/// of the last point with `g ≤ cost`, or 0 before the first.
pub fn value_at(points: &[(f64, f64)], cost: f64) -> f64 {
    let i = points.partition_point(|p| p.0 <= cost);
    if i == 0 {
        0.0
    } else {
        points[i - 1].1
    }
}

/// Area under the step function on `[0, cap]`, holding the last value flat.
pub fn auc(points: &[(f64, f64)], cap: f64) -> f64 {
    let mut area = 0.0;
    let mut last = (0.0f64, 0.0f64);
    for &(g, f) in points {
        let (a, b) = (last.0.min(cap), g.min(cap));
        area += last.1 * (b - a);
        last = (g, f);
    }
    area + last.1 * (cap - last.0.min(cap))
}

/// The `(g, f)` points of a trace, starting at the empty set.
pub fn curve_points(trace: &GreedyTrace) -> Vec<(f64, f64)> {
    std::iter::once((0.0, 0.0))
        .chain(trace.steps.iter().map(|s| (s.g, s.f)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConfig {
    pub algorithms: Vec<Algorithm>,
    /// Defaults to `g(V)/2`.
    pub theta: Option<f64>,
    /// Each algorithm runs until `g ≥ beta_plus·θ`.
    pub beta_plus: f64,
    pub with_opt: bool,
    /// Uniform frontier thresholds on `[0, cap]`, on top of every realized cost.
    pub grid_points: usize,
    pub with_curvature: bool,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        ComparisonConfig {
            algorithms: Vec::new(),
            theta: None,
            beta_plus: 2.0,
            with_opt: false,
            grid_points: 50,
            with_curvature: false,
        }
    }
}

impl ComparisonConfig {
    /// Ratio-marginal followed by the four baselines.
    pub fn all_algorithms(seed: u64) -> Vec<Algorithm> {
        let mut algs = vec![Algorithm::RatioMarginal];
        algs.extend(Algorithm::baselines(seed));
        algs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub step: usize,
    pub beta: f64,
    /// `1 − e^{−β(1−γ)}`, the guarantee at this realized `β`.
    pub guarantee: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub theorem: String,
    pub seed: Option<u64>,
    pub details: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<Instance>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub instance: String,
    pub theta: f64,
    pub budget_cap: f64,
    pub traces: Vec<GreedyTrace>,
    pub frontier: Option<Vec<FrontierRow>>,
    pub curvature: Option<CurvatureReport>,
    /// Guarantees along the ratio-marginal trace (needs the curvature).
    pub bounds: Vec<BoundPoint>,
    pub violations: Vec<Violation>,
}

impl BenchmarkReport {
    pub fn trace(&self, algorithm: Algorithm) -> Option<&GreedyTrace> {
        self.traces.iter().find(|t| t.algorithm == algorithm)
    }

    pub fn auc(&self, algorithm: Algorithm) -> Option<f64> {
        self.trace(algorithm)
            .map(|t| auc(&curve_points(t), self.budget_cap))
    }

    /// Smallest `f_alg(c)/f_opt(c)` over the algorithm's own realized costs
    /// `c ≤ cap` (points where the optimum is 0 count as ratio 1).
    pub fn min_frontier_ratio(&self, algorithm: Algorithm) -> Option<f64> {
        let frontier = self.frontier.as_ref()?;
        let opt: Vec<(f64, f64)> = frontier.iter().map(|r| (r.theta, r.f_opt)).collect();
        let trace = self.trace(algorithm)?;
        let mut worst = 1.0f64;
        for s in trace.steps.iter().filter(|s| s.g <= self.budget_cap) {
            let best = value_at(&opt, s.g);
            if best > 0.0 {
                worst = worst.min(s.f / best);
            }
        }
        Some(worst)
    }
}

/// Runs every algorithm under `ContinueTo(β⁺)` on the same functions and
/// optionally attaches the exact Pareto frontier and curvature.
pub fn run_comparison(
    label: &str,
    f: &dyn SetFunction,
    g: &dyn SetFunction,
    config: &ComparisonConfig,
) -> Result<BenchmarkReport> {
    let n = f.ground_size();
    let g_full = g.value(&Subset::full(n));
    let theta = config.theta.unwrap_or(g_full / 2.0);
    let budget_cap = config.beta_plus * theta;
    let policy = StopPolicy::ContinueTo {
        beta_plus: config.beta_plus,
    };
    let traces = config
        .algorithms
        .iter()
        .map(|&alg| run(alg, f, g, theta, policy))
        .collect::<Result<Vec<_>>>()?;

    let mut violations = Vec::new();
    let frontier = if config.with_opt {
        if n > EXACT_CAP {
            return Err(Error::GroundSetTooLarge { n, cap: EXACT_CAP });
        }
        let table = Enumeration::new(f, g)?;
        let mut grid: Vec<f64> = traces
            .iter()
            .flat_map(|t| t.steps.iter().map(|s| s.g))
            .filter(|&c| c <= budget_cap)
            .collect();
        let points = config.grid_points.max(1);
        grid.extend((0..=points).map(|i| budget_cap * i as f64 / points as f64));
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let rows = table.frontier(&grid);
        let opt: Vec<(f64, f64)> = rows.iter().map(|r| (r.theta, r.f_opt)).collect();
        for t in &traces {
            for (i, s) in t.steps.iter().enumerate() {
                let best = value_at(&opt, s.g);
                if s.g <= budget_cap && s.f > best + FUZZ_TOLERANCE * best.abs().max(1.0) {
                    violations.push(Violation {
                        theorem: "frontier_upper_bound".into(),
                        seed: None,
                        details: format!("{} step {} f={} exceeds opt {}", t.algorithm.name(), i + 1, s.f, best),
                        instance: None,
                    });
                }
            }
        }
        Some(rows)
    } else {
        None
    };

    let curvature = if config.with_curvature {
        Some(curvature_report(f, g, DEFAULT_PAIR_CAP)?)
    } else {
        None
    };
    let bounds = match (&curvature, traces.iter().find(|t| t.algorithm == Algorithm::RatioMarginal)) {
        (Some(c), Some(t)) if c.gamma_weak < 1.0 => t
            .steps
            .iter()
            .enumerate()
            .filter(|(_, s)| s.g > 0.0)
            .map(|(i, s)| {
                let beta = s.g / theta;
                Ok(BoundPoint {
                    step: i + 1,
                    beta,
                    guarantee: bound_beta(c.gamma_weak, beta)?,
                })
            })
            .collect::<Result<_>>()?,
        _ => Vec::new(),
    };

    Ok(BenchmarkReport {
        instance: label.to_string(),
        theta,
        budget_cap,
        traces,
        frontier,
        curvature,
        bounds,
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FuzzConfig {
    pub n_instances: usize,
    pub seed: u64,
    /// Inclusive range of ground-set sizes.
    pub size_range: (usize, usize),
    /// `θ` is drawn as this fraction range of `g(V)`.
    pub theta_fraction: (f64, f64),
    pub params: RandomParams,
    /// Multiplies every guarantee before checking; values above 1 make the
    /// checks fail and exist to exercise the reporting path.
    pub bound_inflation: f64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            n_instances: 200,
            seed: 0,
            size_range: (5, 10),
            theta_fraction: (0.05, 0.6),
            params: RandomParams::default(),
            bound_inflation: 1.0,
        }
    }
}

/// A `f(S_K) ≥ bound_beyond·f*` comparison on a trace continued past the
/// first overflow. Reported, not counted as a violation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeyondCheck {
    pub seed: u64,
    pub beta_plus: f64,
    pub ratio: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub instances: usize,
    /// Instances where every element alone exceeded `θ`.
    pub skipped: usize,
    /// Number of inequalities evaluated per check name.
    pub checks: BTreeMap<String, usize>,
    pub violations: Vec<Violation>,
    pub beyond: Vec<BeyondCheck>,
}

struct Checker<'a> {
    seed: u64,
    instance: &'a Instance,
    checks: BTreeMap<String, usize>,
    violations: Vec<Violation>,
}

impl Checker<'_> {
    /// Records `lhs ≥ rhs − tol`.
    fn check(&mut self, name: &str, lhs: f64, rhs: f64, details: impl FnOnce() -> String) {
        *self.checks.entry(name.to_string()).or_default() += 1;
        if lhs < rhs - FUZZ_TOLERANCE {
            self.violations.push(Violation {
                theorem: name.to_string(),
                seed: Some(self.seed),
                details: format!("{} (lhs {lhs}, rhs {rhs})", details()),
                instance: Some(self.instance.clone()),
            });
        }
    }
}

/// Checks each guarantee on random coverage / power-cost instances with
/// exact curvature and optimum. All quantities are normalized by `f(V)` and
/// `θ` before comparison.
pub fn fuzz_theorems(config: &FuzzConfig) -> Result<FuzzReport> {
    let (lo, hi) = config.size_range;
    if lo == 0 || lo > hi {
        return Err(Error::invalid("size_range", lo as f64, "need 1 <= lo <= hi"));
    }
    if hi > DEFAULT_PAIR_CAP {
        return Err(Error::GroundSetTooLarge {
            n: hi,
            cap: DEFAULT_PAIR_CAP,
        });
    }
    let (tf_lo, tf_hi) = config.theta_fraction;
    if !(0.0 < tf_lo && tf_lo <= tf_hi) {
        return Err(Error::invalid("theta_fraction", tf_lo, "need 0 < lo <= hi"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let plans: Vec<(u64, usize, f64)> = (0..config.n_instances)
        .map(|_| (rng.gen(), rng.gen_range(lo..=hi), rng.gen_range(tf_lo..=tf_hi)))
        .collect();

    let results = map_range(plans.len(), |i| {
        let (seed, n, fraction) = plans[i];
        fuzz_one(seed, n, fraction, config)
    });

    let mut report = FuzzReport {
        instances: config.n_instances,
        ..FuzzReport::default()
    };
    for result in results {
        match result? {
            None => report.skipped += 1,
            Some(one) => {
                for (k, v) in one.checks {
                    *report.checks.entry(k).or_default() += v;
                }
                report.violations.extend(one.violations);
                report.beyond.extend(one.beyond);
            }
        }
    }
    Ok(report)
}

struct OneResult {
    checks: BTreeMap<String, usize>,
    violations: Vec<Violation>,
    beyond: Vec<BeyondCheck>,
}

fn fuzz_one(seed: u64, n: usize, fraction: f64, config: &FuzzConfig) -> Result<Option<OneResult>> {
    let (f, g) = make_random_instance(seed, n, &config.params)?;
    let full = Subset::full(n);
    let (f_full, g_full) = (f.value(&full), g.value(&full));
    let theta = fraction * g_full;
    let instance = Instance {
        seed: Some(seed),
        objective: ObjectiveSpec::Coverage(f.clone()),
        cost: CostSpec::Power(g.clone()),
        theta: Some(theta),
    };

    let run_policy = |policy| match run(Algorithm::RatioMarginal, &f, &g, theta, policy) {
        Err(Error::EmptyAfterPreprocessing { .. }) => Ok(None),
        other => other.map(Some),
    };
    let Some(first) = run_policy(StopPolicy::FirstOverflow)? else {
        return Ok(None);
    };
    let cont = run_policy(StopPolicy::ContinueTo { beta_plus: FUZZ_BETA_PLUS })?.expect("same preprocessing");

    let gamma = curvature_supermodular_weak(&g, DEFAULT_PAIR_CAP)?.value;
    let gamma_strict = curvature_supermodular_strict(&g, DEFAULT_PAIR_CAP)?.value;
    let c = match curvature_submodular(&f, DEFAULT_PAIR_CAP) {
        Ok(c) => c.value,
        Err(Error::DegenerateObjective) => 1.0,
        Err(e) => return Err(e),
    };
    let table = Enumeration::new(&f, &g)?;
    let opt = table.primal(theta);

    // normalized: f by f(V), g by θ
    let fs = if f_full > 0.0 { 1.0 / f_full } else { 1.0 };
    let f_star = opt.best_value * fs;
    let g_star = g.value(&opt.best_set) / theta;
    let f_n = |t: &GreedyTrace, len: usize| t.f_at(len) * fs;
    let g_n = |t: &GreedyTrace, len: usize| t.g_at(len) / theta;
    let k = config.bound_inflation;

    let mut ck = Checker {
        seed,
        instance: &instance,
        checks: BTreeMap::new(),
        violations: Vec::new(),
    };
    let mut beyond = Vec::new();

    if gamma < 1.0 {
        let main = bound_main(gamma)?;
        match first.overflow_step {
            Some(step) => {
                let (before, at) = (step, step + 1);
                let beta = g_n(&first, at);
                let boundary = bound_beta(gamma, beta)?;
                let rhs_prev = k * main * f_star;
                let rhs_at = k * boundary * f_star;
                *ck.checks.entry("boundary".into()).or_default() += 1;
                let holds = f_n(&first, before) >= rhs_prev - FUZZ_TOLERANCE
                    || f_n(&first, at) >= rhs_at - FUZZ_TOLERANCE;
                if !holds {
                    ck.violations.push(Violation {
                        theorem: "boundary".into(),
                        seed: Some(seed),
                        details: format!(
                            "f(S_k-1)={} < {rhs_prev} and f(S_k)={} < {rhs_at} at beta={beta}",
                            f_n(&first, before),
                            f_n(&first, at)
                        ),
                        instance: Some(instance.clone()),
                    });
                }
                ck.check("main", f_n(&first, at), k * main * f_star, || "f(S_k) below main bound".into());
                let cap = bound_overflow_cap(gamma)?;
                // checked as cap·θ ≥ g(S_k), scaled so inflation tightens it
                ck.check("overflow_cap", cap / k, beta, || format!("g(S_k)/θ exceeds cap {cap}"));
                let curv = if c < 1.0 { bound_curv_f(c, gamma)? } else { main };
                ck.check("curv_f", f_n(&first, at), k * curv * f_star, || format!("c={c} gamma={gamma}"));
            }
            None => {
                let last = first.steps.len();
                ck.check("exhausted", f_n(&first, last), k * f_star, || {
                    "candidates ran out below the budget".into()
                });
            }
        }

        for len in 1..=first.steps.len() {
            let beta = g_n(&first, len);
            if beta > 1.0 {
                break;
            }
            let bound = if beta > 0.0 { bound_beta(gamma, beta)? } else { 0.0 };
            ck.check("before_overflow", f_n(&first, len), k * bound * f_star, || {
                format!("step {len} beta={beta}")
            });
        }

        let shrink = (1.0 - c) * (1.0 - gamma);
        for i in 0..cont.steps.len() {
            let (fi, gi) = (f_n(&cont, i), g_n(&cont, i));
            if gi > g_star {
                break;
            }
            let df = f_n(&cont, i + 1) - fi;
            let dg = g_n(&cont, i + 1) - gi;
            let lhs = (g_star - shrink * gi) * df;
            let rhs = (f_star - fi) * (1.0 - gamma) * dg;
            ck.check("curv_recur", lhs, k * rhs, || format!("step {i} -> {}", i + 1));
        }

        if let Some(step) = cont.overflow_step {
            let last = cont.steps.len();
            let realized = g_n(&cont, last);
            if last > step && realized >= 1.0 {
                let bound = bound_beyond(c.min(1.0 - 1e-12), gamma, realized)?;
                let ratio = if f_star > 0.0 { f_n(&cont, last) / f_star } else { 1.0 };
                beyond.push(BeyondCheck {
                    seed,
                    beta_plus: realized,
                    ratio,
                    bound,
                    holds: ratio >= bound - FUZZ_TOLERANCE,
                });
            }
        }
    }

    if gamma_strict < 1.0 {
        for len in 1..=cont.steps.len() {
            let beta = g_n(&cont, len);
            let bound = if beta > 0.0 { bound_beta(gamma_strict, beta)? } else { 0.0 };
            ck.check("strict_curvature", f_n(&cont, len), k * bound * f_star, || {
                format!("step {len} beta={beta} gamma'={gamma_strict}")
            });
        }
    }

    Ok(Some(OneResult {
        checks: ck.checks,
        violations: ck.violations,
        beyond,
    }))
}
