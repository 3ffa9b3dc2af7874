//! Closed-form approximation guarantees for the ratio-marginal greedy and the
//! dual bisection. Powers of near-one bases are taken in log space.

use serde::Serialize;

use crate::{Error, Result};

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if (0.0..1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::invalid(name, x, "must lie in [0, 1)"))
    }
}

/// `1 − e^{−(1−γ)}`.
pub fn bound_main(gamma: f64) -> Result<f64> {
    bound_beta(gamma, 1.0)
}

/// `(2−γ)/(1−γ)`: how far the first overflowing prefix can exceed `θ`.
pub fn bound_overflow_cap(gamma: f64) -> Result<f64> {
    check_unit("gamma", gamma)?;
    Ok((2.0 - gamma) / (1.0 - gamma))
}

/// `1 − e^{−β(1−γ)}`.
pub fn bound_beta(gamma: f64, beta: f64) -> Result<f64> {
    check_unit("gamma", gamma)?;
    if !(beta > 0.0) {
        return Err(Error::invalid("beta", beta, "must be positive"));
    }
    Ok(-(-beta * (1.0 - gamma)).exp_m1())
}

/// `ln (1 − (1−c)(1−γ))^{1/(1−c)}`.
fn log_curv_term(c: f64, gamma: f64) -> f64 {
    let keep = 1.0 - c;
    (-keep * (1.0 - gamma)).ln_1p() / keep
}

/// `1 − (1 − (1−c)(1−γ))^{1/(1−c)}`.
pub fn bound_curv_f(c: f64, gamma: f64) -> Result<f64> {
    check_unit("c", c)?;
    check_unit("gamma", gamma)?;
    Ok(-log_curv_term(c, gamma).exp_m1())
}

/// The guarantee after running past the first overflow up to `g = β⁺θ`:
///
/// `1 − ((β⁺ + q)/(1 + q))^{−q} · (1 − (1−c)(1−γ))^{1/(1−c)}` with
/// `q = (1−γ)/γ`. At `γ = 0` the ratio term becomes `e^{−(β⁺−1)}`.
pub fn bound_beyond(c: f64, gamma: f64, beta_plus: f64) -> Result<f64> {
    check_unit("c", c)?;
    check_unit("gamma", gamma)?;
    if !(beta_plus >= 1.0) {
        return Err(Error::invalid("beta_plus", beta_plus, "must be at least 1"));
    }
    let log_ratio = if gamma == 0.0 {
        -(beta_plus - 1.0)
    } else {
        let q = (1.0 - gamma) / gamma;
        // ((β⁺+q)/(1+q))^{−q} = exp(−q·ln(1 + (β⁺−1)/(1+q)))
        -q * ((beta_plus - 1.0) / (1.0 + q)).ln_1p()
    };
    let log_tail = if c == 0.0 && gamma == 0.0 {
        f64::NEG_INFINITY
    } else {
        log_curv_term(c, gamma)
    };
    Ok(-(log_ratio + log_tail).exp_m1())
}

/// `β(1 + ε/B*)·B*`, the cost guarantee of the dual bisection.
pub fn bound_dual_cost(beta_primal: f64, epsilon: f64, b_star: f64) -> Result<f64> {
    if !(b_star > 0.0) {
        return Err(Error::invalid("b_star", b_star, "must be positive"));
    }
    if !(beta_primal >= 1.0) {
        return Err(Error::invalid("beta", beta_primal, "must be at least 1"));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::invalid("epsilon", epsilon, "must be nonnegative"));
    }
    Ok(beta_primal * (b_star + epsilon))
}

/// Every guarantee evaluated at one `(c, γ, β)` point; `None` where the
/// inputs fall outside a formula's domain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundTable {
    pub c: Option<f64>,
    pub gamma: f64,
    pub beta: f64,
    pub main: f64,
    pub overflow_cap: f64,
    pub beta_bound: f64,
    pub curv_f: Option<f64>,
    pub beyond: Option<f64>,
}

pub fn bound_table(c: Option<f64>, gamma: f64, beta: f64) -> Result<BoundTable> {
    Ok(BoundTable {
        c,
        gamma,
        beta,
        main: bound_main(gamma)?,
        overflow_cap: bound_overflow_cap(gamma)?,
        beta_bound: bound_beta(gamma, beta)?,
        curv_f: c.map(|c| bound_curv_f(c, gamma)).transpose()?,
        beyond: match c {
            Some(c) if beta >= 1.0 => Some(bound_beyond(c, gamma, beta)?),
            _ => None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn main_examples() {
        assert_abs_diff_eq!(bound_main(0.0).unwrap(), 1.0 - (-1.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(bound_main(0.0).unwrap(), 0.63212, epsilon = 5e-6);
        // 1 - e^{-1/3} = 0.2834686894...
        assert_abs_diff_eq!(bound_main(2.0 / 3.0).unwrap(), 0.283_468_689_426_46, epsilon = 1e-12);
        assert!(bound_main(1.0 - 1e-12).unwrap() < 1e-11);
        assert!(bound_main(1.0).is_err());
    }

    #[test]
    fn overflow_cap_examples() {
        assert_eq!(bound_overflow_cap(0.0).unwrap(), 2.0);
        assert_eq!(bound_overflow_cap(0.5).unwrap(), 3.0);
        assert_abs_diff_eq!(bound_overflow_cap(2.0 / 3.0).unwrap(), 4.0, epsilon = 1e-12);
        assert!(bound_overflow_cap(1.0).is_err());
    }

    #[test]
    fn beta_examples() {
        assert_eq!(bound_beta(0.0, 1.0).unwrap(), bound_main(0.0).unwrap());
        // 1 - e^{-2} = 0.8646647167...
        assert_abs_diff_eq!(bound_beta(0.0, 2.0).unwrap(), 0.864_664_716_763_387, epsilon = 1e-14);
        assert!(bound_beta(0.3, 1e-12).unwrap() < 1e-11);
        assert!(bound_beta(0.3, 0.0).is_err());
        assert!(bound_beta(1.2, 1.0).is_err());
    }

    #[test]
    fn curv_f_examples() {
        assert!(bound_curv_f(0.0, 1e-12).unwrap() > 1.0 - 1e-11);
        let near = bound_curv_f(1.0 - 1e-6, 0.3).unwrap();
        assert_abs_diff_eq!(near, bound_main(0.3).unwrap(), epsilon = 1e-4);
        assert_abs_diff_eq!(bound_main(0.3).unwrap(), 0.50341, epsilon = 5e-6);
        assert_abs_diff_eq!(bound_curv_f(0.0, 0.4).unwrap(), 0.6, epsilon = 1e-15);
        assert!(bound_curv_f(1.0, 0.4).is_err());
    }

    #[test]
    fn beyond_examples() {
        for (c, g) in [(0.0, 0.3), (0.5, 0.5), (0.9, 0.1), (0.2, 0.0)] {
            assert_abs_diff_eq!(
                bound_beyond(c, g, 1.0).unwrap(),
                bound_curv_f(c, g).unwrap(),
                epsilon = 1e-12
            );
        }
        assert_abs_diff_eq!(bound_beyond(0.5, 0.5, 2.0).unwrap(), 0.625, epsilon = 1e-14);
        assert!(bound_beyond(0.5, 0.5, 1e12).unwrap() > 1.0 - 1e-6);
        assert_eq!(bound_beyond(0.0, 0.0, 3.0).unwrap(), 1.0);
        assert!(bound_beyond(0.5, 0.5, 0.9).is_err());
    }

    #[test]
    fn beyond_gamma_zero_limit() {
        for c in [0.0, 0.1, 0.5, 0.9] {
            for bp in [1.0, 1.5, 2.0, 4.0] {
                let limit = bound_beyond(c, 0.0, bp).unwrap();
                let near = bound_beyond(c, 1e-6, bp).unwrap();
                assert!((limit - near).abs() < 1e-4, "c={c} β⁺={bp}");
                let direct = 1.0 - (-(bp - 1.0f64)).exp() * c.powf(1.0 / (1.0 - c));
                assert_abs_diff_eq!(limit, direct, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn dual_cost_examples() {
        assert_abs_diff_eq!(bound_dual_cost(2.0, 0.01, 1.0).unwrap(), 2.02, epsilon = 1e-14);
        assert_eq!(bound_dual_cost(3.0, 0.0, 5.0).unwrap(), 15.0);
        assert_abs_diff_eq!(bound_dual_cost(1.0, 0.1, 10.0).unwrap(), 10.1, epsilon = 1e-14);
        assert!(bound_dual_cost(1.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn curv_f_dominates_main_on_grid() {
        for i in 0..100 {
            for j in 0..100 {
                let (c, g) = (i as f64 / 100.0, j as f64 / 100.0);
                assert!(bound_curv_f(c, g).unwrap() >= bound_main(g).unwrap() - 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn beta_bound_monotonicity(g in 0.0f64..0.99, b in 0.01f64..10.0, db in 0.01f64..1.0, dg in 0.001f64..0.01) {
            let base = bound_beta(g, b).unwrap();
            prop_assert!(bound_beta(g, b + db).unwrap() > base);
            prop_assert!(bound_beta(g + dg, b).unwrap() < base);
            prop_assert!((0.0..=1.0).contains(&base));
        }

        #[test]
        fn all_bounds_in_unit_interval(c in 0.0f64..0.999, g in 0.0f64..0.999, bp in 1.0f64..50.0) {
            for v in [
                bound_main(g).unwrap(),
                bound_curv_f(c, g).unwrap(),
                bound_beyond(c, g, bp).unwrap(),
            ] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert!(bound_curv_f(c, g).unwrap() >= bound_main(g).unwrap() - 1e-12);
        }

        #[test]
        fn beyond_nondecreasing(c in 0.0f64..0.999, g in 0.0f64..0.999, bp in 1.0f64..20.0, d in 0.0f64..5.0) {
            prop_assert!(bound_beyond(c, g, bp + d).unwrap() >= bound_beyond(c, g, bp).unwrap() - 1e-15);
        }
    }
}
