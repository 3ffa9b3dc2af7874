//! Set functions, memoized oracles, exhaustive structure checks and exact
//! curvature computation.
//!
//! Curvature definitions used here, for grounded monotone functions:
//!
//! * weak supermodular curvature of `g`:
//!   `1 - min g(T) / g(T|S)` over ordered pairs with `g(T) >= g(S)`;
//! * strict supermodular curvature of `g`:
//!   `1 - min g(v) / g(v|S)` over elements `v` not in `S`;
//! * submodular curvature of `f`:
//!   `1 - min f(v|S) / f(v)` over elements with `f(v) > 0`.
//!
//! Pairs whose denominator is zero never enter the minimum. All three values
//! are clamped to `[0, 1]`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::par::map_range;
use crate::{Error, Result, Subset};

/// Absolute slack on every structural inequality.
pub const TOLERANCE: f64 = 1e-9;
/// Default ground-set cap for the `(A, B, e)` triple enumeration.
pub const DEFAULT_TRIPLE_CAP: usize = 16;
/// Default ground-set cap for the ordered pair enumeration of curvature.
pub const DEFAULT_PAIR_CAP: usize = 12;

/// A real-valued function on subsets of `0..ground_size()`.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;

    fn value(&self, s: &Subset) -> f64;

    /// `value(s ∪ {v}) - value(s)` for each candidate. Families with cheap
    /// incremental structure override this.
    fn gains(&self, s: &Subset, candidates: &[usize]) -> Vec<f64> {
        let base = self.value(s);
        candidates
            .iter()
            .map(|&v| self.value(&s.with(v)) - base)
            .collect()
    }

    /// The marginal `f(v | s)`; `v` must lie in the ground set and outside `s`.
    fn marginal(&self, v: usize, s: &Subset) -> Result<f64> {
        let n = self.ground_size();
        if v >= n {
            return Err(Error::ElementOutOfRange { v, n });
        }
        if s.contains(v) {
            return Err(Error::ElementInSet(v));
        }
        Ok(self.value(&s.with(v)) - self.value(s))
    }
}

impl<T: SetFunction + ?Sized> SetFunction for &T {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, s: &Subset) -> f64 {
        (**self).value(s)
    }
    fn gains(&self, s: &Subset, candidates: &[usize]) -> Vec<f64> {
        (**self).gains(s, candidates)
    }
}

impl<T: SetFunction + ?Sized> SetFunction for Box<T> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, s: &Subset) -> f64 {
        (**self).value(s)
    }
    fn gains(&self, s: &Subset, candidates: &[usize]) -> Vec<f64> {
        (**self).gains(s, candidates)
    }
}

impl<T: SetFunction + ?Sized> SetFunction for Arc<T> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, s: &Subset) -> f64 {
        (**self).value(s)
    }
    fn gains(&self, s: &Subset, candidates: &[usize]) -> Vec<f64> {
        (**self).gains(s, candidates)
    }
}

/// A set function backed by a closure.
pub struct FromFn<F> {
    n: usize,
    f: F,
}

pub fn from_fn<F>(n: usize, f: F) -> FromFn<F>
where
    F: Fn(&Subset) -> f64 + Send + Sync,
{
    FromFn { n, f }
}

impl<F> SetFunction for FromFn<F>
where
    F: Fn(&Subset) -> f64 + Send + Sync,
{
    fn ground_size(&self) -> usize {
        self.n
    }
    fn value(&self, s: &Subset) -> f64 {
        (self.f)(s)
    }
}

/// `inner` viewed on the sub-ground-set `elements`; local index `i` stands
/// for `elements[i]`.
pub struct Restricted<F> {
    inner: F,
    elements: Vec<usize>,
}

impl<F: SetFunction> Restricted<F> {
    pub fn new(inner: F, elements: Vec<usize>) -> Result<Self> {
        let n = inner.ground_size();
        if let Some(&v) = elements.iter().find(|&&v| v >= n) {
            return Err(Error::ElementOutOfRange { v, n });
        }
        Ok(Restricted { inner, elements })
    }

    fn lift(&self, s: &Subset) -> Subset {
        s.iter().map(|i| self.elements[i]).collect()
    }
}

impl<F: SetFunction> SetFunction for Restricted<F> {
    fn ground_size(&self) -> usize {
        self.elements.len()
    }
    fn value(&self, s: &Subset) -> f64 {
        self.inner.value(&self.lift(s))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FnKind {
    Objective,
    Cost,
}

/// A grounded set function with a shared memo of evaluated subsets.
///
/// The memo sits behind a lock, so an oracle can be evaluated from several
/// workers at once; a cached value is always the one the inner function
/// produced.
pub struct Oracle<F> {
    inner: F,
    kind: FnKind,
    cache: RwLock<HashMap<Subset, f64>>,
    hits: AtomicU64,
}

impl<F: SetFunction> Oracle<F> {
    /// Wraps `inner`, rejecting it unless `inner(∅) = 0`.
    pub fn new(inner: F, kind: FnKind) -> Result<Self> {
        let empty = inner.value(&Subset::new());
        if empty != 0.0 {
            return Err(Error::NotGrounded(empty));
        }
        Ok(Oracle {
            inner,
            kind,
            cache: RwLock::new(HashMap::new()),
            hits: AtomicU64::new(0),
        })
    }

    pub fn kind(&self) -> FnKind {
        self.kind
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }

    pub fn eval(&self, s: &Subset) -> f64 {
        debug_assert!(s.bound() <= self.inner.ground_size());
        if let Some(&v) = self.cache.read().expect("oracle cache poisoned").get(s) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return v;
        }
        let v = self.inner.value(s);
        self.cache
            .write()
            .expect("oracle cache poisoned")
            .insert(s.clone(), v);
        v
    }

    pub fn cache_hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn cache_len(&self) -> usize {
        self.cache.read().expect("oracle cache poisoned").len()
    }
}

impl<F: SetFunction> SetFunction for Oracle<F> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }
    fn value(&self, s: &Subset) -> f64 {
        self.eval(s)
    }
}

/// Values of `f` on every subset of its ground set, indexed by bitmask.
pub fn value_table(f: &dyn SetFunction, cap: usize) -> Result<Vec<f64>> {
    let n = f.ground_size();
    if n > cap || n >= 64 {
        return Err(Error::GroundSetTooLarge { n, cap });
    }
    Ok(map_range(1usize << n, |m| f.value(&Subset::from_mask(m as u64))))
}

fn finite_table(f: &dyn SetFunction, cap: usize) -> Result<Vec<f64>> {
    let table = value_table(f, cap)?;
    if let Some(m) = table.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(Subset::from_mask(m as u64).to_string()));
    }
    Ok(table)
}

/// A violated `(A, B, e)` triple, `A ⊆ B`, `e ∉ B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub a: Subset,
    pub b: Subset,
    pub e: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub monotone: bool,
    pub submodular: bool,
    pub supermodular: bool,
    /// `(S, e)` with `f(S ∪ {e}) < f(S)`.
    pub monotone_witness: Option<(Subset, usize)>,
    pub submodular_witness: Option<Triple>,
    pub supermodular_witness: Option<Triple>,
}

/// Exhaustively checks monotonicity and both returns inequalities over every
/// `(A, B, e)` with `A ⊆ B` and `e ∉ B`. The reported witness of each failing
/// property is the first in (B, e, A) mask order.
pub fn check_structure(f: &dyn SetFunction, cap: usize) -> Result<StructureReport> {
    let table = finite_table(f, cap)?;
    let n = f.ground_size();
    let full = (1usize << n) - 1;

    let per_b = map_range(1usize << n, |b| {
        let mut mono = None;
        let mut sub = None;
        let mut sup = None;
        for e in 0..n {
            let bit = 1usize << e;
            if b & bit != 0 {
                continue;
            }
            let gain_b = table[b | bit] - table[b];
            if mono.is_none() && gain_b < -TOLERANCE {
                mono = Some(e);
            }
            if sub.is_some() && sup.is_some() {
                continue;
            }
            // ascending submasks of b
            let mut a = 0usize;
            loop {
                let gain_a = table[a | bit] - table[a];
                if sub.is_none() && gain_a < gain_b - TOLERANCE {
                    sub = Some((a, e));
                }
                if sup.is_none() && gain_a > gain_b + TOLERANCE {
                    sup = Some((a, e));
                }
                if a == b {
                    break;
                }
                a = (a.wrapping_sub(b)) & b & full;
            }
        }
        (mono, sub, sup)
    });

    let triple = |b: usize, (a, e): (usize, usize)| Triple {
        a: Subset::from_mask(a as u64),
        b: Subset::from_mask(b as u64),
        e,
    };
    let monotone_witness = per_b
        .iter()
        .enumerate()
        .find_map(|(b, r)| r.0.map(|e| (Subset::from_mask(b as u64), e)));
    let submodular_witness = per_b
        .iter()
        .enumerate()
        .find_map(|(b, r)| r.1.map(|ae| triple(b, ae)));
    let supermodular_witness = per_b
        .iter()
        .enumerate()
        .find_map(|(b, r)| r.2.map(|ae| triple(b, ae)));

    Ok(StructureReport {
        monotone: monotone_witness.is_none(),
        submodular: submodular_witness.is_none(),
        supermodular: supermodular_witness.is_none(),
        monotone_witness,
        submodular_witness,
        supermodular_witness,
    })
}

/// The pair attaining the weak curvature minimum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub s: Subset,
    pub t: Subset,
    pub ratio: f64,
}

/// The `(v, S)` pair attaining an element-wise curvature minimum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementWitness {
    pub v: usize,
    pub s: Subset,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curvature<W> {
    pub value: f64,
    /// `None` when no pair has a positive denominator; the value is then 0.
    pub witness: Option<W>,
}

fn grounded_table(f: &dyn SetFunction, cap: usize) -> Result<Vec<f64>> {
    let table = finite_table(f, cap)?;
    if table[0].abs() > TOLERANCE {
        return Err(Error::NotGrounded(table[0]));
    }
    Ok(table)
}

fn best_of<W>(candidates: Vec<Option<(f64, W)>>) -> Option<(f64, W)> {
    let mut best: Option<(f64, W)> = None;
    for (ratio, w) in candidates.into_iter().flatten() {
        if best.as_ref().is_none_or(|(r, _)| ratio < *r) {
            best = Some((ratio, w));
        }
    }
    best
}

fn finish<W>(best: Option<(f64, W)>) -> Curvature<W> {
    match best {
        Some((ratio, w)) => Curvature {
            value: (1.0 - ratio).clamp(0.0, 1.0),
            witness: Some(w),
        },
        None => Curvature {
            value: 0.0,
            witness: None,
        },
    }
}

/// Weak supermodular curvature over all ordered pairs `(S, T)`, `T ≠ ∅`,
/// overlapping pairs included.
pub fn curvature_supermodular_weak(
    g: &dyn SetFunction,
    cap: usize,
) -> Result<Curvature<PairWitness>> {
    let table = grounded_table(g, cap)?;
    let size = table.len();
    let per_s = map_range(size, |s| {
        let mut best: Option<(f64, usize)> = None;
        for t in 1..size {
            if table[t] + TOLERANCE < table[s] {
                continue;
            }
            let denom = table[t | s] - table[s];
            if denom <= 0.0 {
                continue;
            }
            let ratio = table[t] / denom;
            if best.is_none_or(|(r, _)| ratio < r) {
                best = Some((ratio, t));
            }
        }
        best.map(|(r, t)| (r, (s, t)))
    });
    Ok(finish(best_of(per_s).map(|(ratio, (s, t))| {
        (
            ratio,
            PairWitness {
                s: Subset::from_mask(s as u64),
                t: Subset::from_mask(t as u64),
                ratio,
            },
        )
    })))
}

/// Strict supermodular curvature over all `(v, S)`, `v ∉ S`.
pub fn curvature_supermodular_strict(
    g: &dyn SetFunction,
    cap: usize,
) -> Result<Curvature<ElementWitness>> {
    let table = grounded_table(g, cap)?;
    let n = g.ground_size();
    let per_s = map_range(table.len(), |s| {
        let mut best: Option<(f64, usize)> = None;
        for v in (0..n).filter(|v| s & (1 << v) == 0) {
            let denom = table[s | 1 << v] - table[s];
            if denom <= 0.0 {
                continue;
            }
            let ratio = table[1 << v] / denom;
            if best.is_none_or(|(r, _)| ratio < r) {
                best = Some((ratio, v));
            }
        }
        best.map(|(r, v)| (r, (v, s)))
    });
    Ok(finish(best_of(per_s).map(|(ratio, (v, s))| {
        (
            ratio,
            ElementWitness {
                v,
                s: Subset::from_mask(s as u64),
                ratio,
            },
        )
    })))
}

/// Submodular curvature over all `(v, S)`, `v ∉ S`, skipping elements with
/// `f(v) = 0`.
pub fn curvature_submodular(
    f: &dyn SetFunction,
    cap: usize,
) -> Result<Curvature<ElementWitness>> {
    let table = grounded_table(f, cap)?;
    let n = f.ground_size();
    if (0..n).all(|v| table[1 << v] <= 0.0) {
        return Err(Error::DegenerateObjective);
    }
    let per_s = map_range(table.len(), |s| {
        let mut best: Option<(f64, usize)> = None;
        for v in (0..n).filter(|v| s & (1 << v) == 0 && table[1 << v] > 0.0) {
            let ratio = (table[s | 1 << v] - table[s]) / table[1 << v];
            if best.is_none_or(|(r, _)| ratio < r) {
                best = Some((ratio, v));
            }
        }
        best.map(|(r, v)| (r, (v, s)))
    });
    Ok(finish(best_of(per_s).map(|(ratio, (v, s))| {
        (
            ratio,
            ElementWitness {
                v,
                s: Subset::from_mask(s as u64),
                ratio,
            },
        )
    })))
}

/// All three curvatures of an (objective, cost) pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub gamma_weak: f64,
    pub gamma_strict: f64,
    pub c_sub: f64,
    pub weak_witness: Option<PairWitness>,
    pub strict_witness: Option<ElementWitness>,
    pub sub_witness: Option<ElementWitness>,
}

pub fn curvature_report(
    f: &dyn SetFunction,
    g: &dyn SetFunction,
    cap: usize,
) -> Result<CurvatureReport> {
    let weak = curvature_supermodular_weak(g, cap)?;
    let strict = curvature_supermodular_strict(g, cap)?;
    let sub = curvature_submodular(f, cap)?;
    Ok(CurvatureReport {
        gamma_weak: weak.value,
        gamma_strict: strict.value,
        c_sub: sub.value,
        weak_witness: weak.witness,
        strict_witness: strict.witness,
        sub_witness: sub.witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn card(n: usize) -> impl SetFunction {
        from_fn(n, |s| s.len() as f64)
    }

    fn square(n: usize) -> impl SetFunction {
        from_fn(n, |s| (s.len() * s.len()) as f64)
    }

    fn cover(sets: Vec<Vec<u32>>) -> impl SetFunction {
        let n = sets.len();
        from_fn(n, move |s| {
            let mut seen = std::collections::BTreeSet::new();
            for v in s.iter() {
                seen.extend(sets[v].iter().copied());
            }
            seen.len() as f64
        })
    }

    fn triangle() -> impl SetFunction {
        let edges = [(0, 1), (1, 2), (0, 2)];
        from_fn(3, move |s| {
            edges
                .iter()
                .filter(|(a, b)| s.contains(*a) && s.contains(*b))
                .count() as f64
        })
    }

    #[test]
    fn eval_examples() {
        let f = Oracle::new(card(4), FnKind::Objective).unwrap();
        assert_eq!(f.eval(&[0, 2].into_iter().collect()), 2.0);
        assert_eq!(f.eval(&Subset::new()), 0.0);
        let g = Oracle::new(square(3), FnKind::Cost).unwrap();
        assert_eq!(g.eval(&Subset::full(3)), 9.0);
    }

    #[test]
    fn oracle_cache_is_transparent() {
        let raw = square(5);
        let g = Oracle::new(square(5), FnKind::Cost).unwrap();
        for m in 0..32u64 {
            let s = Subset::from_mask(m);
            assert_eq!(g.eval(&s).to_bits(), raw.value(&s).to_bits());
        }
        assert_eq!(g.cache_len(), 32);
        for m in 0..32u64 {
            let s = Subset::from_mask(m);
            assert_eq!(g.eval(&s).to_bits(), raw.value(&s).to_bits());
        }
        // the empty set was evaluated once at construction, uncached
        assert_eq!(g.cache_hits(), 32);
    }

    #[test]
    fn oracle_rejects_ungrounded() {
        let bad = from_fn(2, |s| 1.0 + s.len() as f64);
        assert!(matches!(
            Oracle::new(bad, FnKind::Objective),
            Err(Error::NotGrounded(v)) if v == 1.0
        ));
    }

    #[test]
    fn marginal_examples() {
        let f = card(4);
        assert_eq!(f.marginal(3, &Subset::from_mask(0b1)).unwrap(), 1.0);
        let g = square(3);
        assert_eq!(g.marginal(1, &Subset::from_mask(0b101)).unwrap(), 5.0);
        // A = {1,2}, B = {2,3}: B adds only element 3
        let c = cover(vec![vec![1, 2], vec![2, 3]]);
        assert_eq!(c.marginal(1, &Subset::from_mask(0b1)).unwrap(), 1.0);
        assert!(matches!(
            g.marginal(0, &Subset::from_mask(0b1)),
            Err(Error::ElementInSet(0))
        ));
        assert!(matches!(
            g.marginal(7, &Subset::new()),
            Err(Error::ElementOutOfRange { v: 7, n: 3 })
        ));
    }

    #[test]
    fn structure_of_modular() {
        let r = check_structure(&card(5), DEFAULT_TRIPLE_CAP).unwrap();
        assert!(r.monotone && r.submodular && r.supermodular);
    }

    #[test]
    fn structure_of_square() {
        let r = check_structure(&square(3), DEFAULT_TRIPLE_CAP).unwrap();
        assert!(r.monotone && r.supermodular && !r.submodular);
        let w = r.submodular_witness.unwrap();
        assert_eq!(w.a, Subset::new());
        assert_eq!(w.b, Subset::from_mask(0b1));
        assert_eq!(w.e, 1);
    }

    #[test]
    fn structure_of_coverage() {
        let c = cover(vec![vec![1, 2], vec![2, 3], vec![4]]);
        let r = check_structure(&c, DEFAULT_TRIPLE_CAP).unwrap();
        assert!(r.monotone && r.submodular && !r.supermodular);
    }

    #[test]
    fn structure_detects_non_monotone() {
        let f = from_fn(2, |s| if s.len() == 1 { 2.0 } else { 0.0 });
        let r = check_structure(&f, DEFAULT_TRIPLE_CAP).unwrap();
        assert!(!r.monotone);
        assert_eq!(r.monotone_witness, Some((Subset::from_mask(0b1), 1)));
    }

    #[test]
    fn structure_rejects_oversized() {
        assert!(matches!(
            check_structure(&card(17), DEFAULT_TRIPLE_CAP),
            Err(Error::GroundSetTooLarge { n: 17, cap: 16 })
        ));
        assert!(check_structure(&card(9), 8).is_err());
    }

    #[test]
    fn weak_curvature_examples() {
        assert_eq!(curvature_supermodular_weak(&card(6), 12).unwrap().value, 0.0);

        let w = curvature_supermodular_weak(&square(8), 12).unwrap();
        assert!((w.value - 2.0 / 3.0).abs() < 1e-12);
        let pair = w.witness.unwrap();
        // every disjoint pair with |S| = |T| attains 1/3
        assert!(pair.s.intersection(&pair.t).is_empty());
        assert_eq!(pair.s.len(), pair.t.len());
        assert!((pair.ratio - 1.0 / 3.0).abs() < 1e-15);

        let t = curvature_supermodular_weak(&triangle(), 12).unwrap();
        assert_eq!(t.value, 1.0);
        assert_eq!(t.witness.unwrap().ratio, 0.0);
    }

    #[test]
    fn strict_curvature_examples() {
        assert_eq!(curvature_supermodular_strict(&card(6), 12).unwrap().value, 0.0);
        let s8 = curvature_supermodular_strict(&square(8), 12).unwrap();
        assert!((s8.value - 14.0 / 15.0).abs() < 1e-12);
        assert_eq!(s8.witness.unwrap().s.len(), 7);
        let s2 = curvature_supermodular_strict(&square(2), 12).unwrap();
        assert!((s2.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn submodular_curvature_examples() {
        assert_eq!(curvature_submodular(&card(5), 12).unwrap().value, 0.0);
        let c = curvature_submodular(&cover(vec![vec![1, 2], vec![2, 3]]), 12).unwrap();
        assert_eq!(c.value, 0.5);
        let w = c.witness.unwrap();
        assert_eq!((w.v, w.s.clone()), (1, Subset::from_mask(0b1)));
        let disjoint = cover(vec![vec![1], vec![2, 3], vec![4]]);
        assert_eq!(curvature_submodular(&disjoint, 12).unwrap().value, 0.0);
        let zero = from_fn(3, |_| 0.0);
        assert!(matches!(
            curvature_submodular(&zero, 12),
            Err(Error::DegenerateObjective)
        ));
    }

    #[test]
    fn curvature_rejects_bad_inputs() {
        assert!(matches!(
            curvature_supermodular_weak(&card(13), DEFAULT_PAIR_CAP),
            Err(Error::GroundSetTooLarge { .. })
        ));
        let shifted = from_fn(3, |s| 1.0 + s.len() as f64);
        assert!(matches!(
            curvature_supermodular_strict(&shifted, 12),
            Err(Error::NotGrounded(_))
        ));
        let inf = from_fn(2, |s| if s.contains(1) { f64::INFINITY } else { 0.0 });
        assert!(matches!(
            curvature_supermodular_weak(&inf, 12),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn restriction_reindexes() {
        let g = Restricted::new(square(6), vec![5, 2]).unwrap();
        assert_eq!(g.ground_size(), 2);
        assert_eq!(g.value(&Subset::full(2)), 4.0);
        assert!(Restricted::new(square(3), vec![3]).is_err());
    }

    proptest! {
        // weighted sums of |S|^p stay monotone supermodular; weak <= strict
        #[test]
        fn weak_never_exceeds_strict(
            costs in proptest::collection::vec(0.1f64..3.0, 2..7),
            p in prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0)],
        ) {
            let n = costs.len();
            let g = from_fn(n, move |s| s.iter().map(|v| costs[v]).sum::<f64>().powf(p));
            let weak = curvature_supermodular_weak(&g, 12).unwrap().value;
            let strict = curvature_supermodular_strict(&g, 12).unwrap().value;
            prop_assert!(weak <= strict + 1e-12);
            prop_assert!((0.0..=1.0).contains(&weak));
            prop_assert!((0.0..=1.0).contains(&strict));
            prop_assert!(check_structure(&g, 16).unwrap().supermodular);
        }
    }
}
