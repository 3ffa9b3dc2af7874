//! The ratio-marginal greedy and the baseline heuristics it is compared
//! against.
//!
//! Every algorithm shares the same skeleton: drop elements that alone exceed
//! the budget, then repeatedly add the best remaining candidate under an
//! algorithm-specific rule until the stop policy fires. Ties go to the lowest
//! element index.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::setfn::SetFunction;
use crate::{Error, Result, Subset};

/// Relative tolerance under which two scores count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum StopPolicy {
    /// Return the last prefix within the budget.
    BeforeOverflow,
    /// Return the first prefix that exceeds the budget.
    FirstOverflow,
    /// Keep selecting until `g ≥ beta_plus·θ` or no candidate is left.
    ContinueTo { beta_plus: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    RatioMarginal,
    GreedyF,
    GreedyG,
    RatioFg,
    Random(u64),
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::RatioMarginal => "ratio-marginal",
            Algorithm::GreedyF => "greedy-f",
            Algorithm::GreedyG => "greedy-g",
            Algorithm::RatioFg => "ratio-fg",
            Algorithm::Random(_) => "random",
        }
    }

    /// The four baselines, with `Random` seeded by `seed`.
    pub fn baselines(seed: u64) -> [Algorithm; 4] {
        [
            Algorithm::GreedyF,
            Algorithm::GreedyG,
            Algorithm::RatioFg,
            Algorithm::Random(seed),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyStep {
    pub element: usize,
    /// `f` of the prefix ending at this step.
    pub f: f64,
    /// `g` of the prefix ending at this step.
    pub g: f64,
    /// Marginal ratio `Δf/Δg` of this step (infinite when `Δg = 0`).
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace {
    pub algorithm: Algorithm,
    pub steps: Vec<GreedyStep>,
    pub theta: f64,
    pub dropped: Vec<usize>,
    pub policy: StopPolicy,
    /// Number of leading steps forming the answer set.
    pub returned_prefix: usize,
    /// Index of the first step with `g > θ`, if any.
    pub overflow_step: Option<usize>,
}

impl GreedyTrace {
    /// The set formed by the first `len` steps.
    pub fn prefix(&self, len: usize) -> Subset {
        self.steps[..len].iter().map(|s| s.element).collect()
    }

    /// `f` of the first `len` steps; 0 for the empty prefix.
    pub fn f_at(&self, len: usize) -> f64 {
        len.checked_sub(1).map_or(0.0, |i| self.steps[i].f)
    }

    pub fn g_at(&self, len: usize) -> f64 {
        len.checked_sub(1).map_or(0.0, |i| self.steps[i].g)
    }

    pub fn selected(&self) -> Subset {
        self.prefix(self.returned_prefix)
    }

    pub fn f_value(&self) -> f64 {
        self.f_at(self.returned_prefix)
    }

    pub fn g_value(&self) -> f64 {
        self.g_at(self.returned_prefix)
    }

    pub fn elements(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.element).collect()
    }
}

/// `g(S_step)/θ` for a 0-based step index.
pub fn empirical_beta(trace: &GreedyTrace, step: usize) -> Option<f64> {
    trace.steps.get(step).map(|s| s.g / trace.theta)
}

pub fn run_ratio_marginal(
    f: &dyn SetFunction,
    g: &dyn SetFunction,
    theta: f64,
    policy: StopPolicy,
) -> Result<GreedyTrace> {
    run(Algorithm::RatioMarginal, f, g, theta, policy)
}

/// Runs any algorithm, including [`Algorithm::RatioMarginal`], under the
/// shared preprocessing, stopping and tie-breaking rules.
pub fn run_baseline(
    kind: Algorithm,
    f: &dyn SetFunction,
    g: &dyn SetFunction,
    theta: f64,
    policy: StopPolicy,
) -> Result<GreedyTrace> {
    run(kind, f, g, theta, policy)
}

/// `a` beats `b` when `a.0/a.1 > b.0/b.1` beyond the tie tolerance. A zero
/// denominator is an infinite ratio; two of those compare by numerator.
fn ratio_beats(a: (f64, f64), b: (f64, f64)) -> bool {
    match (a.1 <= 0.0, b.1 <= 0.0) {
        (true, true) => beats(a.0, b.0),
        (true, false) => true,
        (false, true) => false,
        (false, false) => beats(a.0 * b.1, b.0 * a.1),
    }
}

fn beats(a: f64, b: f64) -> bool {
    a > b + TIE_TOLERANCE * a.abs().max(b.abs())
}

pub fn run(
    algorithm: Algorithm,
    f: &dyn SetFunction,
    g: &dyn SetFunction,
    theta: f64,
    policy: StopPolicy,
) -> Result<GreedyTrace> {
    let n = f.ground_size();
    if g.ground_size() != n {
        return Err(Error::ElementOutOfRange {
            v: g.ground_size().max(n) - 1,
            n: g.ground_size().min(n),
        });
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::invalid("theta", theta, "must be positive and finite"));
    }
    if let StopPolicy::ContinueTo { beta_plus } = policy {
        if !(beta_plus > 1.0) {
            return Err(Error::invalid("beta_plus", beta_plus, "must exceed 1"));
        }
    }

    let mut dropped = Vec::new();
    let mut remaining = Vec::new();
    for v in 0..n {
        let alone = g.value(&Subset::from_iter([v]));
        // NaN fails the comparison and is dropped too
        if alone <= theta {
            remaining.push(v);
        } else {
            dropped.push(v);
        }
    }
    if remaining.is_empty() && n > 0 {
        return Err(Error::EmptyAfterPreprocessing { theta });
    }

    let mut rng = match algorithm {
        Algorithm::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let skip_worthless = matches!(algorithm, Algorithm::RatioMarginal | Algorithm::GreedyF);

    let mut trace = GreedyTrace {
        algorithm,
        steps: Vec::new(),
        theta,
        dropped,
        policy,
        returned_prefix: 0,
        overflow_step: None,
    };
    let mut current = Subset::new();
    let (mut f_cur, mut g_cur) = (0.0, 0.0);

    loop {
        let df = f.gains(&current, &remaining);
        let dg = g.gains(&current, &remaining);
        let eligible: Vec<usize> = (0..remaining.len())
            .filter(|&i| (g_cur + dg[i]).is_finite() && !(skip_worthless && df[i] <= 0.0))
            .collect();
        if eligible.is_empty() {
            trace.returned_prefix = trace.steps.len();
            break;
        }

        let pick = match algorithm {
            Algorithm::Random(_) => *eligible
                .choose(rng.as_mut().expect("seeded"))
                .expect("nonempty"),
            _ => {
                let mut best = eligible[0];
                for &i in &eligible[1..] {
                    let better = match algorithm {
                        Algorithm::RatioMarginal => ratio_beats((df[i], dg[i]), (df[best], dg[best])),
                        Algorithm::GreedyF => beats(df[i], df[best]),
                        Algorithm::GreedyG => beats(-dg[i], -dg[best]),
                        Algorithm::RatioFg => ratio_beats(
                            (f_cur + df[i], g_cur + dg[i]),
                            (f_cur + df[best], g_cur + dg[best]),
                        ),
                        Algorithm::Random(_) => unreachable!(),
                    };
                    if better {
                        best = i;
                    }
                }
                best
            }
        };

        let v = remaining.remove(pick);
        current.insert(v);
        // re-evaluate rather than accumulate so the trace matches f(S_i) exactly
        f_cur = f.value(&current);
        g_cur = g.value(&current);
        let ratio = if dg[pick] > 0.0 {
            df[pick] / dg[pick]
        } else {
            f64::INFINITY
        };
        trace.steps.push(GreedyStep {
            element: v,
            f: f_cur,
            g: g_cur,
            ratio,
        });
        let index = trace.steps.len() - 1;

        if g_cur > theta && trace.overflow_step.is_none() {
            trace.overflow_step = Some(index);
            match policy {
                StopPolicy::BeforeOverflow => {
                    trace.returned_prefix = index;
                    break;
                }
                StopPolicy::FirstOverflow => {
                    trace.returned_prefix = index + 1;
                    break;
                }
                StopPolicy::ContinueTo { .. } => {}
            }
        }
        if let StopPolicy::ContinueTo { beta_plus } = policy {
            if g_cur >= beta_plus * theta {
                trace.returned_prefix = trace.steps.len();
                break;
            }
        }
    }
    Ok(trace)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    algorithm: &'a str,
    step: usize,
    element: usize,
    f: f64,
    g: f64,
    ratio: f64,
    beta: f64,
}

/// Writes traces as CSV with columns
/// `algorithm, step, element, f, g, ratio, beta` (steps numbered from 1).
pub fn write_traces_csv<W: Write>(out: W, traces: &[GreedyTrace]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for trace in traces {
        for (i, s) in trace.steps.iter().enumerate() {
            w.serialize(CsvRow {
                algorithm: trace.algorithm.name(),
                step: i + 1,
                element: s.element,
                f: s.f,
                g: s.g,
                ratio: s.ratio,
                beta: s.g / trace.theta,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}
