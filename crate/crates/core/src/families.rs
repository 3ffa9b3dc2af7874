//! Concrete objective and cost families, the adversarial tightness instance,
//! random fuzzing instances and the JSON instance file format.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::setfn::SetFunction;
use crate::{Error, Result, Subset};

/// `f(S)` = total weight of atoms covered by at least one element of `S`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoverage")]
pub struct WeightedCoverage {
    atoms: Vec<f64>,
    covers: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawCoverage {
    atoms: Vec<f64>,
    covers: Vec<Vec<usize>>,
}

impl TryFrom<RawCoverage> for WeightedCoverage {
    type Error = Error;
    fn try_from(raw: RawCoverage) -> Result<Self> {
        WeightedCoverage::new(raw.atoms, raw.covers)
    }
}

impl WeightedCoverage {
    /// `atoms[a]` is the weight of atom `a`; `covers[v]` lists the atoms
    /// element `v` covers. Cover lists are sorted and deduplicated.
    pub fn new(atoms: Vec<f64>, mut covers: Vec<Vec<usize>>) -> Result<Self> {
        if let Some(&w) = atoms.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::invalid("atom weight", w, "must be finite and nonnegative"));
        }
        for list in &mut covers {
            list.sort_unstable();
            list.dedup();
            if let Some(&a) = list.iter().find(|&&a| a >= atoms.len()) {
                return Err(Error::ElementOutOfRange {
                    v: a,
                    n: atoms.len(),
                });
            }
        }
        Ok(WeightedCoverage { atoms, covers })
    }

    /// Unweighted coverage over atoms `0..`; each list names the atoms one
    /// element covers.
    pub fn unit(covers: Vec<Vec<usize>>) -> Result<Self> {
        let atoms = covers.iter().flatten().map(|a| a + 1).max().unwrap_or(0);
        WeightedCoverage::new(vec![1.0; atoms], covers)
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn covers(&self) -> &[Vec<usize>] {
        &self.covers
    }

    fn covered(&self, s: &Subset) -> Vec<bool> {
        let mut covered = vec![false; self.atoms.len()];
        for v in s.iter() {
            for &a in &self.covers[v] {
                covered[a] = true;
            }
        }
        covered
    }
}

impl SetFunction for WeightedCoverage {
    fn ground_size(&self) -> usize {
        self.covers.len()
    }

    fn value(&self, s: &Subset) -> f64 {
        self.covered(s)
            .iter()
            .zip(&self.atoms)
            .filter(|(c, _)| **c)
            .map(|(_, w)| w)
            .sum()
    }

    fn gains(&self, s: &Subset, candidates: &[usize]) -> Vec<f64> {
        let covered = self.covered(s);
        candidates
            .iter()
            .map(|&v| {
                if s.contains(v) {
                    return 0.0;
                }
                self.covers[v]
                    .iter()
                    .filter(|&&a| !covered[a])
                    .map(|&a| self.atoms[a])
                    .sum()
            })
            .collect()
    }
}

/// `g(S) = (Σ_{v∈S} c_v)^p`, supermodular for `p >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPower")]
pub struct PowerCost {
    unit_costs: Vec<f64>,
    exponent: f64,
}

#[derive(Deserialize)]
struct RawPower {
    unit_costs: Vec<f64>,
    exponent: f64,
}

impl TryFrom<RawPower> for PowerCost {
    type Error = Error;
    fn try_from(raw: RawPower) -> Result<Self> {
        PowerCost::new(raw.unit_costs, raw.exponent)
    }
}

impl PowerCost {
    pub fn new(unit_costs: Vec<f64>, exponent: f64) -> Result<Self> {
        if !(exponent >= 1.0 && exponent.is_finite()) {
            return Err(Error::invalid("exponent", exponent, "must be at least 1"));
        }
        if let Some(&c) = unit_costs.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(Error::invalid("unit cost", c, "must be finite and nonnegative"));
        }
        Ok(PowerCost {
            unit_costs,
            exponent,
        })
    }

    pub fn unit_costs(&self) -> &[f64] {
        &self.unit_costs
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }
}

impl SetFunction for PowerCost {
    fn ground_size(&self) -> usize {
        self.unit_costs.len()
    }

    fn value(&self, s: &Subset) -> f64 {
        let total: f64 = s.iter().map(|v| self.unit_costs[v]).sum();
        if self.exponent == 1.0 {
            total
        } else {
            total.powf(self.exponent)
        }
    }
}

/// `g(S) = offset·[S ≠ ∅] + |E_S|`, the number of induced edges. Supermodular
/// only for `offset = 0`; a positive offset is subadditive on disjoint sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeCountCost {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default)]
    offset: f64,
}

impl EdgeCountCost {
    pub fn new(n: usize, edges: Vec<(usize, usize)>, offset: f64) -> Result<Self> {
        if let Some(&(a, b)) = edges.iter().find(|(a, b)| *a >= n || *b >= n) {
            return Err(Error::ElementOutOfRange { v: a.max(b), n });
        }
        if !(offset >= 0.0) {
            return Err(Error::invalid("offset", offset, "must be nonnegative"));
        }
        Ok(EdgeCountCost { n, edges, offset })
    }
}

impl SetFunction for EdgeCountCost {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn value(&self, s: &Subset) -> f64 {
        if s.is_empty() {
            return 0.0;
        }
        let induced = self
            .edges
            .iter()
            .filter(|(a, b)| s.contains(*a) && s.contains(*b))
            .count();
        self.offset + induced as f64
    }
}

/// Cost of the tightness instance on elements `v_1..v_{k'}`, `o_1..o_k`, `u`
/// (in that index order):
///
/// `g(S) = ∞` if `u ∈ S`, else `|S| + jump·[V ⊆ S]·|S ∩ O|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpCost {
    v_count: usize,
    o_count: usize,
    jump: f64,
}

impl JumpCost {
    pub fn new(v_count: usize, o_count: usize, jump: f64) -> Result<Self> {
        if !(jump >= 0.0 && jump.is_finite()) {
            return Err(Error::invalid("jump", jump, "must be finite and nonnegative"));
        }
        Ok(JumpCost {
            v_count,
            o_count,
            jump,
        })
    }

    pub fn u(&self) -> usize {
        self.v_count + self.o_count
    }
}

impl SetFunction for JumpCost {
    fn ground_size(&self) -> usize {
        self.v_count + self.o_count + 1
    }

    fn value(&self, s: &Subset) -> f64 {
        if s.contains(self.u()) {
            return f64::INFINITY;
        }
        let mut vs = 0usize;
        let mut os = 0usize;
        for e in s.iter() {
            if e < self.v_count {
                vs += 1;
            } else {
                os += 1;
            }
        }
        let base = (vs + os) as f64;
        if vs == self.v_count && os > 0 {
            base + self.jump * os as f64
        } else {
            base
        }
    }
}

/// The adversarial max-cover instance on which the ratio-marginal greedy
/// stops at `V = {v_1..v_{k'}}` while `O = {o_1..o_k}` is optimal.
///
/// Weights are divided by `k^{k'}` so they stay representable for large `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessInstance {
    pub k: usize,
    pub gamma: f64,
    pub epsilon: f64,
    pub k_prime: usize,
    pub objective: WeightedCoverage,
    pub cost: JumpCost,
}

impl TightnessInstance {
    pub fn ground_size(&self) -> usize {
        self.k_prime + self.k + 1
    }

    pub fn v_set(&self) -> Subset {
        (0..self.k_prime).collect()
    }

    pub fn o_set(&self) -> Subset {
        (self.k_prime..self.k_prime + self.k).collect()
    }

    pub fn u(&self) -> usize {
        self.k_prime + self.k
    }

    /// The budget: `θ = k`.
    pub fn theta(&self) -> f64 {
        self.k as f64
    }

    pub fn to_instance(&self) -> Instance {
        Instance {
            seed: None,
            objective: ObjectiveSpec::Coverage(self.objective.clone()),
            cost: CostSpec::Jump(self.cost.clone()),
            theta: Some(self.theta()),
        }
    }
}

/// Builds the tightness instance with the smallest `ε ∈ (0, 2]` making
/// `k' = (k + ε)(1 − γ)` an integer below `k`.
pub fn make_tightness(k: usize, gamma: f64) -> Result<TightnessInstance> {
    if k < 3 {
        return Err(Error::invalid("k", k as f64, "must be at least 3"));
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid("gamma", gamma, "must lie in [0, 1)"));
    }
    let kf = k as f64;
    let keep = 1.0 - gamma;
    // smallest integer strictly above k(1-γ); the slack absorbs rounding of γ
    let k_prime = (kf * keep + 1e-9).floor() as usize + 1;
    let epsilon = k_prime as f64 / keep - kf;
    if k_prime >= k || !(epsilon > 0.0 && epsilon <= 2.0 + 1e-12) {
        return Err(Error::NoAdmissibleEpsilon { k, gamma });
    }

    let shrink = (kf - 1.0) / kf;
    // k^{-k'} underflows to 0 for large instances, which is harmless here
    let tiny = kf.powi(-(k_prime as i32));
    let grid = k_prime * k;
    let mut atoms = Vec::with_capacity(grid + k);
    for i in 0..k_prime {
        let w = shrink.powi(i as i32) / kf;
        atoms.extend(std::iter::repeat_n(w, k));
    }
    atoms.extend(std::iter::repeat_n(shrink.powi(k_prime as i32) - tiny, k));

    let mut covers = Vec::with_capacity(k_prime + k + 1);
    for i in 0..k_prime {
        covers.push((i * k..(i + 1) * k).collect());
    }
    for j in 0..k {
        let mut list: Vec<usize> = (0..k_prime).map(|i| i * k + j).collect();
        list.push(grid + j);
        covers.push(list);
    }
    // u duplicates o_1's private region
    covers.push(vec![grid]);

    Ok(TightnessInstance {
        k,
        gamma,
        epsilon,
        k_prime,
        objective: WeightedCoverage::new(atoms, covers)?,
        cost: JumpCost::new(k_prime, k, kf + epsilon - k_prime as f64 - 1.0)?,
    })
}

/// Closed-form greedy/optimal ratio `(1 − (1 − 1/k)^{k'}) / (1 − k^{−k'})`.
pub fn tightness_expected_ratio(inst: &TightnessInstance) -> f64 {
    let kf = inst.k as f64;
    let kp = inst.k_prime as f64;
    let numerator = -(kp * (-1.0 / kf).ln_1p()).exp_m1();
    let denominator = -(-kp * kf.ln()).exp_m1();
    numerator / denominator
}

/// Ranges for random coverage/power-cost instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomParams {
    /// Atom count is drawn from `[lo·n, hi·n]`.
    pub atoms_per_element: (usize, usize),
    pub weight_range: (f64, f64),
    pub cover_prob: f64,
    pub cost_range: (f64, f64),
    /// Exponent choices for the power cost.
    pub exponents: Vec<f64>,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            atoms_per_element: (1, 3),
            weight_range: (0.1, 1.0),
            cover_prob: 0.25,
            cost_range: (0.5, 2.0),
            exponents: vec![1.0, 1.5, 2.0],
        }
    }
}

pub const RANDOM_INSTANCE_CAP: usize = 16;

/// A random weighted coverage objective and power cost, deterministic in
/// `seed`.
pub fn make_random_instance(
    seed: u64,
    n: usize,
    params: &RandomParams,
) -> Result<(WeightedCoverage, PowerCost)> {
    if n > RANDOM_INSTANCE_CAP {
        return Err(Error::GroundSetTooLarge {
            n,
            cap: RANDOM_INSTANCE_CAP,
        });
    }
    if params.exponents.is_empty() {
        return Err(Error::invalid("exponents", 0.0, "need at least one choice"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = params.atoms_per_element;
    let atom_count = rng.gen_range(lo.max(1) * n.max(1)..=hi.max(lo).max(1) * n.max(1));
    let atoms: Vec<f64> = (0..atom_count)
        .map(|_| rng.gen_range(params.weight_range.0..=params.weight_range.1))
        .collect();
    let covers = (0..n)
        .map(|_| {
            let mut list: Vec<usize> = (0..atom_count)
                .filter(|_| rng.gen_bool(params.cover_prob))
                .collect();
            if list.is_empty() {
                list.push(rng.gen_range(0..atom_count));
            }
            list
        })
        .collect();
    let unit_costs = (0..n)
        .map(|_| rng.gen_range(params.cost_range.0..=params.cost_range.1))
        .collect();
    let exponent = *params.exponents.choose(&mut rng).expect("nonempty");
    Ok((
        WeightedCoverage::new(atoms, covers)?,
        PowerCost::new(unit_costs, exponent)?,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ObjectiveSpec {
    Coverage(WeightedCoverage),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CostSpec {
    Power(PowerCost),
    EdgeCount(EdgeCountCost),
    Jump(JumpCost),
}

impl SetFunction for ObjectiveSpec {
    fn ground_size(&self) -> usize {
        match self {
            ObjectiveSpec::Coverage(c) => c.ground_size(),
        }
    }
    fn value(&self, s: &Subset) -> f64 {
        match self {
            ObjectiveSpec::Coverage(c) => c.value(s),
        }
    }
    fn gains(&self, s: &Subset, candidates: &[usize]) -> Vec<f64> {
        match self {
            ObjectiveSpec::Coverage(c) => c.gains(s, candidates),
        }
    }
}

impl SetFunction for CostSpec {
    fn ground_size(&self) -> usize {
        match self {
            CostSpec::Power(g) => g.ground_size(),
            CostSpec::EdgeCount(g) => g.ground_size(),
            CostSpec::Jump(g) => g.ground_size(),
        }
    }
    fn value(&self, s: &Subset) -> f64 {
        match self {
            CostSpec::Power(g) => g.value(s),
            CostSpec::EdgeCount(g) => g.value(s),
            CostSpec::Jump(g) => g.value(s),
        }
    }
}

/// An objective/cost pair as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub objective: ObjectiveSpec,
    pub cost: CostSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl Instance {
    pub fn random(seed: u64, n: usize, params: &RandomParams) -> Result<Self> {
        let (f, g) = make_random_instance(seed, n, params)?;
        Ok(Instance {
            seed: Some(seed),
            objective: ObjectiveSpec::Coverage(f),
            cost: CostSpec::Power(g),
            theta: None,
        })
    }

    pub fn ground_size(&self) -> usize {
        self.objective.ground_size()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Instance = serde_json::from_str(text)?;
        let (nf, ng) = (inst.objective.ground_size(), inst.cost.ground_size());
        if nf != ng {
            return Err(Error::ElementOutOfRange {
                v: nf.max(ng) - 1,
                n: nf.min(ng),
            });
        }
        Ok(inst)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Instance::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}
