//! Cost minimization subject to `f(S) ≥ τ`, by bisecting over the budget of
//! a primal maximizer.

use serde::{Deserialize, Serialize};

use crate::bounds::{bound_curv_f, bound_main};
use crate::exact::Enumeration;
use crate::greedy::{run_ratio_marginal, StopPolicy};
use crate::setfn::SetFunction;
use crate::{Error, Result, Subset};

/// The primal algorithm queried at each probed budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "primal", rename_all = "snake_case")]
pub enum Primal {
    /// Ratio-marginal greedy with the budget as `θ`.
    Greedy { policy: StopPolicy },
    /// Exhaustive primal optimum (ground sets up to the exact cap).
    Exact,
}

impl Default for Primal {
    fn default() -> Self {
        Primal::Greedy {
            policy: StopPolicy::BeforeOverflow,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualConfig {
    pub tau: f64,
    /// Bisection stops once `R − L ≤ ε`; defaults to `g(V)·2⁻²⁰`.
    pub epsilon: Option<f64>,
    pub alpha: f64,
    pub primal: Primal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub budget: f64,
    pub accepted: bool,
    pub f: f64,
    pub g: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualResult {
    pub set: Subset,
    pub f: f64,
    pub g: f64,
    /// The last accepted budget.
    pub budget_found: f64,
    pub epsilon: f64,
    /// Bisection steps, not counting a forced final probe.
    pub iterations: usize,
    pub probes: Vec<Probe>,
    /// Probed budget pairs `(lower, higher)` where the primal returned a
    /// strictly larger objective at the lower budget. Bisection assumes this
    /// never happens; exact primals never produce it.
    pub non_monotone: Vec<(f64, f64)>,
}

/// The strongest objective guarantee of the greedy primal: the `c`-aware
/// bound when the submodular curvature is known and below 1.
pub fn choose_alpha(gamma: f64, c: Option<f64>) -> Result<f64> {
    match c {
        Some(c) if c < 1.0 => bound_curv_f(c, gamma),
        _ => bound_main(gamma),
    }
}

pub fn solve_dual(f: &dyn SetFunction, g: &dyn SetFunction, config: &DualConfig) -> Result<DualResult> {
    match config.primal {
        Primal::Greedy { policy } => solve_dual_with(f, g, config, |budget| {
            if budget <= 0.0 {
                return Ok(Subset::new());
            }
            match run_ratio_marginal(f, g, budget, policy) {
                Ok(trace) => Ok(trace.selected()),
                Err(Error::EmptyAfterPreprocessing { .. }) => Ok(Subset::new()),
                Err(e) => Err(e),
            }
        }),
        Primal::Exact => {
            let table = Enumeration::new(f, g)?;
            solve_dual_with(f, g, config, |budget| Ok(table.primal(budget).best_set))
        }
    }
}

/// Bisection with an arbitrary primal `budget → set`.
pub fn solve_dual_with<P>(
    f: &dyn SetFunction,
    g: &dyn SetFunction,
    config: &DualConfig,
    mut primal: P,
) -> Result<DualResult>
where
    P: FnMut(f64) -> Result<Subset>,
{
    let DualConfig { tau, alpha, .. } = *config;
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::invalid("tau", tau, "must be finite and nonnegative"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid("alpha", alpha, "must lie in (0, 1]"));
    }
    let full = Subset::full(f.ground_size());
    let needed = alpha * tau;
    let f_full = f.value(&full);
    if f_full < needed {
        return Err(Error::TargetUnreachable {
            needed,
            max: f_full,
        });
    }
    let g_full = g.value(&full);
    if !g_full.is_finite() {
        return Err(Error::NonFinite(full.to_string()));
    }
    let epsilon = config.epsilon.unwrap_or(g_full * 2f64.powi(-20));
    if !(epsilon > 0.0) && g_full > 0.0 {
        return Err(Error::invalid("epsilon", epsilon, "must be positive"));
    }

    let mut probe = |budget: f64, probes: &mut Vec<Probe>| -> Result<(Subset, bool)> {
        let set = primal(budget)?;
        let (fs, gs) = (f.value(&set), g.value(&set));
        let accepted = fs >= needed;
        probes.push(Probe {
            budget,
            accepted,
            f: fs,
            g: gs,
        });
        Ok((set, accepted))
    };

    let (mut lo, mut hi) = (0.0, g_full);
    let mut probes = Vec::new();
    let mut best: Option<Subset> = None;
    // halvings until R − L ≤ ε, counted up front so rounding in the
    // midpoints cannot add an extra probe
    let iterations = if g_full > epsilon {
        (g_full / epsilon).log2().ceil() as usize
    } else {
        0
    };
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        let (set, accepted) = probe(mid, &mut probes)?;
        if accepted {
            hi = mid;
            best = Some(set);
        } else {
            lo = mid;
        }
    }
    let set = match best {
        Some(set) => set,
        None => {
            let (set, accepted) = probe(hi, &mut probes)?;
            if !accepted {
                return Err(Error::PrimalFailure {
                    budget: hi,
                    value: f.value(&set),
                    needed,
                });
            }
            set
        }
    };

    let mut non_monotone = Vec::new();
    for lower in &probes {
        for higher in probes.iter().filter(|p| p.budget > lower.budget) {
            if lower.f > higher.f {
                non_monotone.push((lower.budget, higher.budget));
            }
        }
    }

    Ok(DualResult {
        f: f.value(&set),
        g: g.value(&set),
        set,
        budget_found: hi,
        epsilon,
        iterations,
        probes,
        non_monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::bound_dual_cost;
    use crate::exact::dual_opt;
    use crate::families::{make_random_instance, RandomParams, WeightedCoverage};
    use crate::setfn::from_fn;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn config(tau: f64, alpha: f64, epsilon: f64, primal: Primal) -> DualConfig {
        DualConfig {
            tau,
            epsilon: Some(epsilon),
            alpha,
            primal,
        }
    }

    #[test]
    fn modular_case_is_exact() {
        let card = from_fn(6, |s: &Subset| s.len() as f64);
        let r = solve_dual(&card, &card, &config(3.0, 1.0, 0.01, Primal::default())).unwrap();
        assert_eq!((r.f, r.g), (3.0, 3.0));
        assert!((3.0..=3.01).contains(&r.budget_found), "{}", r.budget_found);
        // ⌈log₂(6 / 0.01)⌉ = 10
        assert_eq!(r.iterations, 10);
        assert!(r.non_monotone.is_empty());
    }

    #[test]
    fn zero_target_shrinks_to_empty() {
        let card = from_fn(6, |s: &Subset| s.len() as f64);
        let r = solve_dual(&card, &card, &config(0.0, 1.0, 0.01, Primal::default())).unwrap();
        assert!(r.probes[0].accepted);
        assert!(r.probes.iter().all(|p| p.accepted));
        assert_eq!(r.set, Subset::new());
    }

    #[test]
    fn coverage_case_within_dual_cost_bound() {
        let f = WeightedCoverage::unit(vec![vec![1, 2], vec![2, 3], vec![4]]).unwrap();
        let g = from_fn(3, |s: &Subset| (s.len() * s.len()) as f64);
        let b_star = dual_opt(&f, &g, 3.0).unwrap().best_value;
        assert_eq!(b_star, 4.0);
        let r = solve_dual(&f, &g, &config(3.0, 1.0, 0.01, Primal::default())).unwrap();
        assert!(r.f >= 3.0);
        assert!(r.g <= bound_dual_cost(2.0, 0.01, b_star).unwrap());
    }

    #[test]
    fn errors() {
        let card = from_fn(4, |s: &Subset| s.len() as f64);
        assert!(matches!(
            solve_dual(&card, &card, &config(5.0, 1.0, 0.01, Primal::default())),
            Err(Error::TargetUnreachable { .. })
        ));
        // a primal that never finds anything
        let r = solve_dual_with(&card, &card, &config(2.0, 1.0, 0.01, Primal::Exact), |_| Ok(Subset::new()));
        assert!(matches!(r, Err(Error::PrimalFailure { budget, .. }) if budget == 4.0));
    }

    #[test]
    fn non_monotone_primal_is_logged() {
        let card = from_fn(4, |s: &Subset| s.len() as f64);
        let r = solve_dual_with(&card, &card, &config(1.0, 1.0, 0.5, Primal::Exact), |b| {
            Ok(Subset::from_mask(if b < 1.5 { 0b11 } else { 0b1 }))
        })
        .unwrap();
        // probes 2, 1, 0.5 all accept, with f = 1, 2, 2
        assert_eq!(r.iterations, 3);
        assert_eq!(r.non_monotone, vec![(1.0, 2.0), (0.5, 2.0)]);
        assert_eq!(r.budget_found, 0.5);
    }

    #[test]
    fn choose_alpha_examples() {
        assert_abs_diff_eq!(choose_alpha(0.0, None).unwrap(), 1.0 - (-1.0f64).exp(), epsilon = 1e-15);
        assert_eq!(choose_alpha(0.5, Some(0.2)).unwrap(), bound_curv_f(0.2, 0.5).unwrap());
        assert_abs_diff_eq!(choose_alpha(0.9, None).unwrap(), 0.09516, epsilon = 5e-6);
        assert_eq!(choose_alpha(0.9, Some(1.0)).unwrap(), bound_main(0.9).unwrap());
    }

    proptest! {
        #[test]
        fn exact_primal_brackets_b_star(seed in any::<u64>(), n in 2usize..9, frac in 0.05f64..1.0) {
            let (f, g) = make_random_instance(seed, n, &RandomParams::default()).unwrap();
            let full = Subset::full(n);
            let tau = frac * f.value(&full);
            let cfg = DualConfig { tau, epsilon: None, alpha: 1.0, primal: Primal::Exact };
            let r = solve_dual(&f, &g, &cfg).unwrap();
            let b_star = dual_opt(&f, &g, tau).unwrap().best_value;
            prop_assert!(r.f >= tau);
            prop_assert!(r.budget_found >= b_star);
            prop_assert!(r.budget_found <= b_star + r.epsilon);
            prop_assert!(r.non_monotone.is_empty());
            let bound = (g.value(&full) / r.epsilon).log2().ceil() as usize;
            prop_assert_eq!(r.iterations, bound);
        }
    }
}
