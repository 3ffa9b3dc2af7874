//! Exhaustive oracles for small ground sets.
//!
//! Both functions are tabulated once over all `2^n` subsets (in parallel when
//! enabled). Primal, dual and frontier queries then scan the tables, so their
//! answers are bit-identical to direct evaluation.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::setfn::{value_table, SetFunction};
use crate::{Error, Result, Subset};

/// Largest ground set the oracles accept.
pub const EXACT_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub best_set: Subset,
    /// `f(best_set)` for primal queries, `g(best_set)` for dual queries.
    pub best_value: f64,
    pub feasible_count: u64,
    pub enumerated: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierRow {
    pub theta: f64,
    pub f_opt: f64,
    pub witness_mask: u64,
}

/// Tabulated `f` and `g`, indexed by bitmask.
#[derive(Clone, Debug)]
pub struct Enumeration {
    f: Vec<f64>,
    g: Vec<f64>,
}

impl Enumeration {
    pub fn new(f: &dyn SetFunction, g: &dyn SetFunction) -> Result<Self> {
        let n = f.ground_size();
        if g.ground_size() != n {
            return Err(Error::ElementOutOfRange {
                v: g.ground_size().max(n) - 1,
                n: g.ground_size().min(n),
            });
        }
        Ok(Enumeration {
            f: value_table(f, EXACT_CAP)?,
            g: value_table(g, EXACT_CAP)?,
        })
    }

    pub fn f(&self, mask: u64) -> f64 {
        self.f[mask as usize]
    }

    pub fn g(&self, mask: u64) -> f64 {
        self.g[mask as usize]
    }

    fn full(&self) -> usize {
        self.f.len() - 1
    }

    /// Max `f` subject to `g ≤ θ`; ties prefer smaller cost, then smaller
    /// mask. The empty set is always feasible.
    pub fn primal(&self, theta: f64) -> ExactResult {
        let mut best = 0usize;
        let mut feasible = 0u64;
        for m in 0..self.f.len() {
            if !(self.g[m] <= theta) {
                continue;
            }
            feasible += 1;
            let (fm, fb) = (self.f[m], self.f[best]);
            if fm > fb || (fm == fb && self.g[m] < self.g[best]) {
                best = m;
            }
        }
        ExactResult {
            best_set: Subset::from_mask(best as u64),
            best_value: self.f[best],
            feasible_count: feasible,
            enumerated: self.f.len() as u64,
        }
    }

    /// Min `g` subject to `f ≥ τ`; ties prefer larger `f`, then smaller mask.
    pub fn dual(&self, tau: f64) -> Result<ExactResult> {
        let mut best: Option<usize> = None;
        let mut feasible = 0u64;
        for m in 0..self.f.len() {
            if !(self.f[m] >= tau) {
                continue;
            }
            feasible += 1;
            let better = match best {
                None => true,
                Some(b) => {
                    self.g[m] < self.g[b] || (self.g[m] == self.g[b] && self.f[m] > self.f[b])
                }
            };
            if better {
                best = Some(m);
            }
        }
        let best = best.ok_or(Error::Infeasible {
            tau,
            max: self.f[self.full()],
        })?;
        Ok(ExactResult {
            best_set: Subset::from_mask(best as u64),
            best_value: self.g[best],
            feasible_count: feasible,
            enumerated: self.f.len() as u64,
        })
    }

    /// For each threshold, the best `f` among subsets with `g ≤ θ`, in grid
    /// order. The witness follows the same tie rule as [`Enumeration::primal`].
    pub fn frontier(&self, grid: &[f64]) -> Vec<FrontierRow> {
        let mut order: Vec<usize> = (0..self.f.len()).filter(|&m| !self.g[m].is_nan()).collect();
        order.sort_by(|&a, &b| self.g[a].total_cmp(&self.g[b]).then(a.cmp(&b)));
        let mut best = Vec::with_capacity(order.len());
        let mut current = order[0];
        for &m in &order {
            if self.f[m] > self.f[current] {
                current = m;
            }
            best.push(current);
        }
        grid.iter()
            .map(|&theta| {
                let within = order.partition_point(|&m| self.g[m] <= theta);
                // ∅ has g = 0, so any θ ≥ 0 admits at least one subset
                let witness = within.checked_sub(1).map_or(0, |i| best[i]);
                FrontierRow {
                    theta,
                    f_opt: if within == 0 { 0.0 } else { self.f[witness] },
                    witness_mask: witness as u64,
                }
            })
            .collect()
    }
}

pub fn primal_opt(f: &dyn SetFunction, g: &dyn SetFunction, theta: f64) -> Result<ExactResult> {
    Ok(Enumeration::new(f, g)?.primal(theta))
}

pub fn dual_opt(f: &dyn SetFunction, g: &dyn SetFunction, tau: f64) -> Result<ExactResult> {
    Enumeration::new(f, g)?.dual(tau)
}

pub fn pareto_frontier(
    f: &dyn SetFunction,
    g: &dyn SetFunction,
    grid: &[f64],
) -> Result<Vec<FrontierRow>> {
    Ok(Enumeration::new(f, g)?.frontier(grid))
}

/// Writes frontier rows as CSV with columns `theta, f_opt, witness_mask`.
pub fn write_frontier_csv<W: Write>(out: W, rows: &[FrontierRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_random_instance, RandomParams, WeightedCoverage};
    use crate::setfn::from_fn;
    use proptest::prelude::*;

    fn abc() -> (WeightedCoverage, impl SetFunction) {
        (
            WeightedCoverage::unit(vec![vec![1, 2], vec![2, 3], vec![4]]).unwrap(),
            from_fn(3, |s: &Subset| (s.len() * s.len()) as f64),
        )
    }

    #[test]
    fn primal_examples() {
        let (f, g) = abc();
        let r = primal_opt(&f, &g, 4.0).unwrap();
        assert_eq!(r.best_value, 3.0);
        assert_eq!(r.best_set, Subset::from_mask(0b011));
        assert_eq!(r.feasible_count, 7);
        assert_eq!(r.enumerated, 8);
        assert_eq!(primal_opt(&f, &g, 9.0).unwrap().best_set, Subset::full(3));
        let r = primal_opt(&f, &g, 0.5).unwrap();
        assert_eq!((r.best_set, r.best_value), (Subset::new(), 0.0));
    }

    #[test]
    fn dual_examples() {
        let card = from_fn(6, |s: &Subset| s.len() as f64);
        assert_eq!(dual_opt(&card, &card, 3.0).unwrap().best_value, 3.0);
        let (f, g) = abc();
        let r = dual_opt(&f, &g, 3.0).unwrap();
        assert_eq!((r.best_value, r.best_set), (4.0, Subset::from_mask(0b011)));
        assert!(matches!(
            dual_opt(&f, &g, 5.0),
            Err(Error::Infeasible { max, .. }) if max == 4.0
        ));
    }

    #[test]
    fn frontier_examples() {
        let (f, g) = abc();
        let rows = pareto_frontier(&f, &g, &[1.0, 4.0, 9.0]).unwrap();
        let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.theta, r.f_opt)).collect();
        assert_eq!(pairs, vec![(1.0, 2.0), (4.0, 3.0), (9.0, 4.0)]);
        assert_eq!(rows[1].witness_mask, 0b011);
        let rows = pareto_frontier(&f, &g, &[0.0]).unwrap();
        assert_eq!((rows[0].f_opt, rows[0].witness_mask), (0.0, 0));
        assert_eq!(pareto_frontier(&f, &g, &[4.0, 4.0]).unwrap().len(), 2);
    }

    #[test]
    fn rejects_large_ground_sets() {
        let big = from_fn(21, |s: &Subset| s.len() as f64);
        assert!(matches!(
            primal_opt(&big, &big, 1.0),
            Err(Error::GroundSetTooLarge { n: 21, cap: 20 })
        ));
    }

    #[test]
    fn frontier_csv() {
        let (f, g) = abc();
        let rows = pareto_frontier(&f, &g, &[1.0, 4.0]).unwrap();
        let mut buf = Vec::new();
        write_frontier_csv(&mut buf, &rows).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "theta,f_opt,witness_mask\n1.0,2.0,1\n4.0,3.0,3\n"
        );
    }

    proptest! {
        #[test]
        fn oracle_properties(seed in any::<u64>(), n in 1usize..9, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
            let (f, g) = make_random_instance(seed, n, &RandomParams::default()).unwrap();
            let e = Enumeration::new(&f, &g).unwrap();
            let full = (1u64 << n) - 1;
            let (lo, hi) = (t1.min(t2), t1.max(t2));

            // frontier agrees with the primal and is monotone
            let grid = [lo * e.g(full), hi * e.g(full)];
            let rows = e.frontier(&grid);
            for row in &rows {
                let p = e.primal(row.theta);
                prop_assert_eq!(row.f_opt, p.best_value);
                prop_assert_eq!(row.witness_mask, p.best_set.to_mask().unwrap());
                prop_assert!(e.g(row.witness_mask) <= row.theta);
            }
            prop_assert!(rows[0].f_opt <= rows[1].f_opt);

            // dual is antitone in τ, and round-trips through the primal
            let (tau_lo, tau_hi) = (lo * e.f(full), hi * e.f(full));
            let d_lo = e.dual(tau_lo).unwrap();
            let d_hi = e.dual(tau_hi).unwrap();
            prop_assert!(d_lo.best_value <= d_hi.best_value);
            prop_assert!(e.primal(d_hi.best_value).best_value >= tau_hi);
            prop_assert_eq!(d_hi.best_value, e.g(d_hi.best_set.to_mask().unwrap()));
        }
    }
}
