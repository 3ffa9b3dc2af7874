//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export returns a JSON string that the page parses and draws. The
//! computations live in plain functions so they can be tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use subsup::bench::{curve_points, run_comparison, ComparisonConfig};
use subsup::bounds::{bound_beta, bound_curv_f, bound_main, bound_overflow_cap};
use subsup::debate::{DebateConfig, DebateInstance, View};
use subsup::exact::EXACT_CAP;
use subsup::families::{make_tightness, tightness_expected_ratio};
use subsup::greedy::{run_ratio_marginal, GreedyStep, StopPolicy};
use subsup::{Result, SetFunction, Subset};

/// Guarantees as functions of `γ` on `[0, 1)`.
#[derive(Debug, Serialize)]
pub struct BoundCurves {
    pub gamma: Vec<f64>,
    pub main: Vec<f64>,
    pub beta: Vec<f64>,
    pub curv_f: Vec<f64>,
    pub overflow_cap: Vec<f64>,
}

pub fn bound_curves_data(c: f64, beta: f64, points: usize) -> Result<BoundCurves> {
    let points = points.max(2);
    let gamma: Vec<f64> = (0..points).map(|i| 0.99 * i as f64 / (points - 1) as f64).collect();
    let map = |f: &dyn Fn(f64) -> Result<f64>| gamma.iter().map(|&g| f(g)).collect::<Result<Vec<_>>>();
    Ok(BoundCurves {
        main: map(&bound_main)?,
        beta: map(&|g| bound_beta(g, beta))?,
        curv_f: map(&|g| bound_curv_f(c, g))?,
        overflow_cap: map(&bound_overflow_cap)?,
        gamma,
    })
}

#[derive(Debug, Serialize)]
pub struct TightnessDemo {
    pub k_prime: usize,
    pub epsilon: f64,
    pub realized: f64,
    pub closed_form: f64,
    pub asymptote: f64,
    /// `(g/θ, f/f(O))` along the returned prefix.
    pub path: Vec<(f64, f64)>,
    /// The first pick that would overflow `θ`.
    pub overflow: Option<(f64, f64)>,
}

pub fn tightness_data(k: usize, gamma: f64) -> Result<TightnessDemo> {
    let t = make_tightness(k, gamma)?;
    let trace = run_ratio_marginal(&t.objective, &t.cost, t.theta(), StopPolicy::BeforeOverflow)?;
    let f_opt = t.objective.value(&t.o_set());
    let scaled = |s: &GreedyStep| (s.g / t.theta(), s.f / f_opt);
    let mut path = vec![(0.0, 0.0)];
    path.extend(trace.steps[..trace.returned_prefix].iter().map(scaled));
    let overflow = trace.steps.get(trace.returned_prefix).map(scaled);
    Ok(TightnessDemo {
        k_prime: t.k_prime,
        epsilon: t.epsilon,
        realized: trace.f_value() / f_opt,
        closed_form: tightness_expected_ratio(&t),
        asymptote: 1.0 - (-(1.0 - gamma)).exp(),
        path,
        overflow,
    })
}

#[derive(Debug, Serialize)]
pub struct Curve {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Serialize)]
pub struct DebateDemo {
    pub theta: f64,
    pub budget_cap: f64,
    pub curves: Vec<Curve>,
    /// Present when `m` is small enough to enumerate.
    pub frontier: Option<Vec<(f64, f64)>>,
}

/// Above this the exact frontier takes too long for an interactive page.
pub const DEMO_OPT_CAP: usize = 14;

pub fn debate_data(m: usize, questions: usize, rounds: usize, local: bool, seed: u64) -> Result<DebateDemo> {
    let config = DebateConfig {
        m,
        questions,
        rounds,
        view: if local { View::local() } else { View::Global },
        n_scenarios: 20,
        seed,
        ..DebateConfig::default()
    };
    let inst = DebateInstance::generate(config)?;
    let (f, g) = (inst.objective(), inst.cost());
    let full = Subset::full(m);
    // the cost grows quadratically, so most of g(V) buys nothing
    let theta = g.value(&full) / 8.0;
    let report = run_comparison(
        "debate",
        &f,
        &g,
        &ComparisonConfig {
            algorithms: ComparisonConfig::all_algorithms(seed),
            theta: Some(theta),
            with_opt: m <= DEMO_OPT_CAP.min(EXACT_CAP),
            ..ComparisonConfig::default()
        },
    )?;
    Ok(DebateDemo {
        theta: report.theta,
        budget_cap: report.budget_cap,
        curves: report
            .traces
            .iter()
            .map(|t| Curve {
                name: t.algorithm.name().to_string(),
                points: curve_points(t),
            })
            .collect(),
        frontier: report
            .frontier
            .map(|rows| rows.iter().map(|r| (r.theta, r.f_opt)).collect()),
    })
}

fn to_js<T: Serialize>(value: Result<T>) -> Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn bound_curves(c: f64, beta: f64, points: usize) -> Result<String, JsError> {
    to_js(bound_curves_data(c, beta, points))
}

#[wasm_bindgen]
pub fn tightness_demo(k: usize, gamma: f64) -> Result<String, JsError> {
    to_js(tightness_data(k, gamma))
}

#[wasm_bindgen]
pub fn debate_demo(m: usize, questions: usize, rounds: usize, local: bool, seed: u64) -> Result<String, JsError> {
    to_js(debate_data(m, questions, rounds, local, seed))
}
