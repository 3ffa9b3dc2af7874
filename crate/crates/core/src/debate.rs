//! Synthetic multi-agent debate: agent pools, pre-sampled scenarios, and the
//! coverage-style objective and token cost over selectable agents.
//!
//! Agent ids run over `0..=m`; id 0 is the evaluator (agent-0), which always
//! participates. Ground-set element `v` is agent `v + 1`.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::par::map_slice;
use crate::setfn::SetFunction;
use crate::{Error, Result, Subset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "view", rename_all = "snake_case")]
pub enum View {
    /// Every participant sees every other participant's last answer.
    Global,
    /// Each agent hears from `peer_count` freshly sampled agents per round.
    Local { peer_count: usize },
}

impl View {
    pub fn local() -> Self {
        View::Local { peer_count: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PoolParams {
    pub accuracy_range: (f64, f64),
    pub openness_range: (f64, f64),
    /// Input-token price range.
    pub price_range: (f64, f64),
    /// Weight of accuracy in the price score; 1 makes price rank follow
    /// accuracy rank, 0 makes prices independent of accuracy.
    pub mixing_weight: f64,
    /// Output price = input price × this factor (> 1).
    pub out_multiplier: f64,
}

impl Default for PoolParams {
    fn default() -> Self {
        PoolParams {
            accuracy_range: (0.2, 0.8),
            openness_range: (0.1, 0.9),
            price_range: (1.0, 10.0),
            mixing_weight: 0.7,
            out_multiplier: 4.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DebateConfig {
    /// Selectable agents.
    pub m: usize,
    /// Questions.
    pub questions: usize,
    pub rounds: usize,
    pub view: View,
    pub prompt_tokens: f64,
    pub output_tokens: f64,
    pub n_scenarios: usize,
    pub seed: u64,
    pub pool: PoolParams,
}

impl Default for DebateConfig {
    fn default() -> Self {
        DebateConfig {
            m: 15,
            questions: 100,
            rounds: 2,
            view: View::Global,
            prompt_tokens: 200.0,
            output_tokens: 100.0,
            n_scenarios: 50,
            seed: 0,
            pool: PoolParams::default(),
        }
    }
}

impl DebateConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m", self.m),
            ("questions", self.questions),
            ("rounds", self.rounds),
            ("n_scenarios", self.n_scenarios),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::invalid(name, 0.0, "must be at least 1"));
            }
        }
        if let View::Local { peer_count: 0 } = self.view {
            return Err(Error::invalid("peer_count", 0.0, "must be at least 1"));
        }
        if !(self.prompt_tokens >= 0.0 && self.output_tokens >= 0.0) {
            return Err(Error::invalid("tokens", self.prompt_tokens.min(self.output_tokens), "must be nonnegative"));
        }
        let p = &self.pool;
        for (name, (lo, hi)) in [("accuracy_range", p.accuracy_range), ("openness_range", p.openness_range)] {
            if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                return Err(Error::invalid(name, lo, "must satisfy 0 <= lo <= hi <= 1"));
            }
        }
        if !(0.0 < p.price_range.0 && p.price_range.0 <= p.price_range.1 && p.price_range.1.is_finite()) {
            return Err(Error::invalid("price_range", p.price_range.0, "must satisfy 0 < lo <= hi"));
        }
        if !(0.0..=1.0).contains(&p.mixing_weight) {
            return Err(Error::invalid("mixing_weight", p.mixing_weight, "must lie in [0, 1]"));
        }
        if !(p.out_multiplier > 1.0 && p.out_multiplier.is_finite()) {
            return Err(Error::invalid("out_multiplier", p.out_multiplier, "must exceed 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub accuracy: f64,
    pub openness: f64,
    pub cost_in: f64,
    pub cost_out: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentPool {
    /// `agents[0]` is agent-0.
    pub agents: Vec<Agent>,
    pub questions: usize,
}

impl AgentPool {
    pub fn m(&self) -> usize {
        self.agents.len() - 1
    }
}

pub fn generate_pool(config: &DebateConfig) -> Result<AgentPool> {
    config.validate()?;
    let p = &config.pool;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let count = config.m + 1;
    let accuracy: Vec<f64> = (0..count)
        .map(|_| rng.gen_range(p.accuracy_range.0..=p.accuracy_range.1))
        .collect();
    let openness: Vec<f64> = (0..count)
        .map(|_| rng.gen_range(p.openness_range.0..=p.openness_range.1))
        .collect();
    let span = p.accuracy_range.1 - p.accuracy_range.0;
    let agents = (0..count)
        .map(|i| {
            let normalized = if span > 0.0 {
                (accuracy[i] - p.accuracy_range.0) / span
            } else {
                0.5
            };
            let noise: f64 = rng.gen();
            let score = p.mixing_weight * normalized + (1.0 - p.mixing_weight) * noise;
            let cost_in = p.price_range.0 + (p.price_range.1 - p.price_range.0) * score;
            Agent {
                accuracy: accuracy[i],
                openness: openness[i],
                cost_in,
                cost_out: cost_in * p.out_multiplier,
            }
        })
        .collect();
    Ok(AgentPool {
        agents,
        questions: config.questions,
    })
}

/// One draw of all simulator randomness. Bitsets are over questions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DebateScenario {
    /// `[agent]` questions answered correctly before the first round.
    pub initial_correct: Vec<Vec<u64>>,
    /// `[agent][round]` questions on which the agent would adopt a correct
    /// answer it is exposed to.
    pub acceptance_coins: Vec<Vec<Vec<u64>>>,
    /// `[agent][round]` sampled peers; empty under the global view.
    pub peer_edges: Vec<Vec<Vec<usize>>>,
}

fn words(questions: usize) -> usize {
    questions.div_ceil(64)
}

fn bitset_from(indices: impl IntoIterator<Item = usize>, questions: usize) -> Vec<u64> {
    let mut bits = vec![0u64; words(questions)];
    for q in indices {
        bits[q / 64] |= 1 << (q % 64);
    }
    bits
}

pub fn sample_scenarios(pool: &AgentPool, config: &DebateConfig) -> Result<Vec<DebateScenario>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    // keep scenario draws independent of the pool stream
    rng.set_stream(1);
    let t = pool.questions;
    let count = pool.agents.len();
    let scenarios = (0..config.n_scenarios)
        .map(|_| {
            let initial_correct = pool
                .agents
                .iter()
                .map(|a| {
                    let k = ((a.accuracy * t as f64).floor() as usize).min(t);
                    bitset_from(sample(&mut rng, t, k), t)
                })
                .collect();
            let acceptance_coins = pool
                .agents
                .iter()
                .map(|a| {
                    (0..config.rounds)
                        .map(|_| bitset_from((0..t).filter(|_| rng.gen_bool(a.openness)), t))
                        .collect()
                })
                .collect();
            let peer_edges = match config.view {
                View::Global => Vec::new(),
                View::Local { peer_count } => (0..count)
                    .map(|i| {
                        (0..config.rounds)
                            .map(|_| {
                                let k = peer_count.min(count - 1);
                                sample(&mut rng, count - 1, k)
                                    .into_iter()
                                    .map(|j| if j >= i { j + 1 } else { j })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect(),
            };
            DebateScenario {
                initial_correct,
                acceptance_coins,
                peer_edges,
            }
        })
        .collect();
    Ok(scenarios)
}

/// Questions agent-0 answers correctly after all rounds, with the given
/// participants (which must include agent 0).
fn agent0_correct(scenario: &DebateScenario, participants: &[usize], view: View) -> u32 {
    let agents = scenario.initial_correct.len();
    let mut present = vec![false; agents];
    for &p in participants {
        present[p] = true;
    }
    let mut state: Vec<Vec<u64>> = scenario.initial_correct.clone();
    let rounds = scenario.acceptance_coins[0].len();
    for round in 0..rounds {
        let previous = state.clone();
        match view {
            View::Global => {
                let mut any = vec![0u64; previous[0].len()];
                for &j in participants {
                    for (a, s) in any.iter_mut().zip(&previous[j]) {
                        *a |= s;
                    }
                }
                for &i in participants {
                    let coin = &scenario.acceptance_coins[i][round];
                    for (w, s) in state[i].iter_mut().enumerate() {
                        *s |= any[w] & coin[w];
                    }
                }
            }
            View::Local { .. } => {
                for &i in participants {
                    let coin = &scenario.acceptance_coins[i][round];
                    for &j in &scenario.peer_edges[i][round] {
                        if !present[j] {
                            continue;
                        }
                        for (w, s) in state[i].iter_mut().enumerate() {
                            *s |= previous[j][w] & coin[w];
                        }
                    }
                }
            }
        }
    }
    state[0].iter().map(|w| w.count_ones()).sum()
}

fn participants_of(s: &Subset) -> Vec<usize> {
    std::iter::once(0).chain(s.iter().map(|v| v + 1)).collect()
}

fn subset_of_agents(agents: &[usize], m: usize) -> Result<Subset> {
    let mut s = Subset::new();
    for &a in agents {
        if a == 0 {
            return Err(Error::AgentZeroSelected);
        }
        if a > m {
            return Err(Error::ElementOutOfRange { v: a, n: m + 1 });
        }
        s.insert(a - 1);
    }
    Ok(s)
}

/// Mean number of questions agent-0 gets right, relative to debating alone.
#[derive(Clone, Debug)]
pub struct DebateObjective {
    scenarios: Arc<Vec<DebateScenario>>,
    view: View,
    m: usize,
    solo_total: u64,
}

impl DebateObjective {
    pub fn new(pool: &AgentPool, config: &DebateConfig, scenarios: Arc<Vec<DebateScenario>>) -> Self {
        let mut f = DebateObjective {
            scenarios,
            view: config.view,
            m: pool.m(),
            solo_total: 0,
        };
        f.solo_total = f.total(&[0]);
        f
    }

    fn total(&self, participants: &[usize]) -> u64 {
        map_slice(&self.scenarios, |sc| agent0_correct(sc, participants, self.view) as u64)
            .into_iter()
            .sum()
    }

    /// Agent-0's mean correct count with no other participants.
    pub fn solo_value(&self) -> f64 {
        self.solo_total as f64 / self.scenarios.len() as f64
    }

    /// The objective for explicit agent ids (1..=m).
    pub fn value_for_agents(&self, agents: &[usize]) -> Result<f64> {
        Ok(self.value(&subset_of_agents(agents, self.m)?))
    }
}

impl SetFunction for DebateObjective {
    fn ground_size(&self) -> usize {
        self.m
    }

    fn value(&self, s: &Subset) -> f64 {
        let gained = self.total(&participants_of(s)) as i64 - self.solo_total as i64;
        gained as f64 / self.scenarios.len() as f64
    }
}

/// Token expenditure of the debate, relative to agent-0 debating alone.
#[derive(Clone, Debug)]
pub struct DebateCost {
    agents: Vec<Agent>,
    rounds: usize,
    prompt_tokens: f64,
    output_tokens: f64,
}

impl DebateCost {
    pub fn new(pool: &AgentPool, config: &DebateConfig) -> Self {
        DebateCost {
            agents: pool.agents.clone(),
            rounds: config.rounds,
            prompt_tokens: config.prompt_tokens,
            output_tokens: config.output_tokens,
        }
    }

    fn raw(&self, participants: &[usize]) -> f64 {
        let others = (participants.len() - 1) as f64;
        let mut total = 0.0;
        for round in 1..=self.rounds {
            let read = self.prompt_tokens + if round >= 2 { self.output_tokens * others } else { 0.0 };
            for &i in participants {
                let a = &self.agents[i];
                total += read * a.cost_in + self.output_tokens * a.cost_out;
            }
        }
        total
    }

    pub fn value_for_agents(&self, agents: &[usize]) -> Result<f64> {
        Ok(self.value(&subset_of_agents(agents, self.agents.len() - 1)?))
    }
}

impl SetFunction for DebateCost {
    fn ground_size(&self) -> usize {
        self.agents.len() - 1
    }

    fn value(&self, s: &Subset) -> f64 {
        if s.is_empty() {
            return 0.0;
        }
        self.raw(&participants_of(s)) - self.raw(&[0])
    }
}

/// A generated pool with its scenario batch. Serializes as config and pool
/// only; scenarios are regenerated from the seed.
#[derive(Clone, Debug)]
pub struct DebateInstance {
    pub config: DebateConfig,
    pub pool: AgentPool,
    pub scenarios: Arc<Vec<DebateScenario>>,
}

impl DebateInstance {
    pub fn generate(config: DebateConfig) -> Result<Self> {
        let pool = generate_pool(&config)?;
        let scenarios = Arc::new(sample_scenarios(&pool, &config)?);
        Ok(DebateInstance {
            config,
            pool,
            scenarios,
        })
    }

    pub fn objective(&self) -> DebateObjective {
        DebateObjective::new(&self.pool, &self.config, Arc::clone(&self.scenarios))
    }

    pub fn cost(&self) -> DebateCost {
        DebateCost::new(&self.pool, &self.config)
    }
}
