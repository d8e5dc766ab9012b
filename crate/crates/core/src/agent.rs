//! Choice and expected-utility recursions for full-knowledge agents.
//!
//! All agents choose actions softmax-proportionally to exponentiated
//! expected utility, `C(a; s, d) ∝ exp(alpha · EU(s, a, d))`, where the
//! delay `d` counts steps since the current planning moment and discounts
//! utility hyperbolically by `1 / (1 + k·d)`. The three agent types differ
//! only in how they model their own future choices inside the EU
//! expectation:
//!
//! * `NonDiscounting` — factor fixed at 1, future self at delay `d+1`;
//! * `Naive` — future self keeps the running delay (`d+1`), so it is
//!   modelled as sharing the present self's discounted values;
//! * `Sophisticated` — future self re-plans from delay 0, which is what it
//!   will actually do.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use arrayvec::ArrayVec;
use hashbrown::HashMap;
use rand_core::{RngCore, SeedableRng};

use crate::belief::Belief;
use crate::math;
use crate::world::{
    available_actions, transition, utility, Action, ActionVec, Episode, GridSpec, State,
    UtilityParams, WorldConfig,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AgentType {
    NonDiscounting,
    Naive,
    Sophisticated,
}

impl AgentType {
    pub const ALL: [AgentType; 3] = [
        AgentType::NonDiscounting,
        AgentType::Naive,
        AgentType::Sophisticated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgentType::NonDiscounting => "non_discounting",
            AgentType::Naive => "naive",
            AgentType::Sophisticated => "sophisticated",
        }
    }

    pub fn from_name(name: &str) -> Option<AgentType> {
        match name {
            "non_discounting" => Some(AgentType::NonDiscounting),
            "naive" => Some(AgentType::Naive),
            "sophisticated" => Some(AgentType::Sophisticated),
            _ => None,
        }
    }
}

/// One complete agent hypothesis: prior belief over world configurations,
/// utility schedule, type, discount strength and softmax noise.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentParams {
    pub prior: Belief,
    pub utilities: UtilityParams,
    pub agent_type: AgentType,
    pub k: f64,
    pub alpha: f64,
}

impl AgentParams {
    /// Discount strength actually applied: `NonDiscounting` ignores `k`.
    pub fn effective_k(&self) -> f64 {
        match self.agent_type {
            AgentType::NonDiscounting => 0.0,
            _ => self.k,
        }
    }
}

/// Hyperbolic discount factor `1 / (1 + k·d)`; equals 1 at `d = 0` or
/// `k = 0` and strictly decreases in `d` for `k > 0`.
pub fn discount_factor(k: f64, delay: u32) -> f64 {
    1.0 / (1.0 + k * delay as f64)
}

/// A normalized distribution over at most five actions.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionDistribution {
    entries: ArrayVec<(Action, f64), 5>,
}

impl ActionDistribution {
    /// Softmax over `scores` at inverse temperature `alpha`, computed with
    /// the maximum subtracted before exponentiating.
    pub fn softmax(actions: &[Action], scores: &[f64], alpha: f64) -> Self {
        debug_assert_eq!(actions.len(), scores.len());
        debug_assert!(!actions.is_empty());
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut entries: ArrayVec<(Action, f64), 5> = actions
            .iter()
            .zip(scores)
            .map(|(&a, &s)| (a, math::exp(alpha * (s - max))))
            .collect();
        let total: f64 = entries.iter().map(|(_, w)| w).sum();
        for (_, w) in entries.iter_mut() {
            *w /= total;
        }
        ActionDistribution { entries }
    }

    pub fn entries(&self) -> &[(Action, f64)] {
        &self.entries
    }

    pub fn prob(&self, action: Action) -> f64 {
        self.entries
            .iter()
            .find(|(a, _)| *a == action)
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = Action> + '_ {
        self.entries.iter().map(|(a, _)| *a)
    }

    /// Inverse-CDF sample for a uniform draw `u` in `[0, 1)`.
    pub fn sample(&self, u: f64) -> Action {
        let mut acc = 0.0;
        for (action, p) in &self.entries {
            acc += p;
            if u < acc {
                return *action;
            }
        }
        self.entries.last().expect("nonempty distribution").0
    }
}

const DELAY_SHIFT: u32 = 38;

/// Memoized evaluator for one `(params, grid, config)` triple. Owns its
/// parameters (they are small) so evaluators can cache planners without
/// borrowing from themselves. Not shared across hypotheses.
pub struct Planner<'g> {
    grid: &'g GridSpec,
    config: WorldConfig,
    params: AgentParams,
    choice_memo: HashMap<u64, ActionDistribution>,
    ev_memo: HashMap<u64, f64>,
}

impl<'g> Planner<'g> {
    pub fn new(params: AgentParams, grid: &'g GridSpec, config: WorldConfig) -> Self {
        Planner {
            grid,
            config,
            params,
            choice_memo: HashMap::new(),
            ev_memo: HashMap::new(),
        }
    }

    fn key(&self, state: &State, delay: u16) -> u64 {
        state.key(self.grid) | (delay as u64) << DELAY_SHIFT
    }

    /// `C(·; state, delay)`: softmax over the expected utilities of the
    /// legal actions.
    pub fn choice(&mut self, state: &State, delay: u16) -> ActionDistribution {
        let key = self.key(state, delay);
        if let Some(dist) = self.choice_memo.get(&key) {
            return dist.clone();
        }
        let (actions, scores) = self.action_values(state, delay);
        let dist = ActionDistribution::softmax(&actions, &scores, self.params.alpha);
        self.choice_memo.insert(key, dist.clone());
        dist
    }

    /// Legal actions and their expected utilities at `delay`.
    pub fn action_values(&mut self, state: &State, delay: u16) -> (ActionVec, ArrayVec<f64, 5>) {
        let actions = available_actions(state, self.grid, &self.config);
        assert!(
            !actions.is_empty(),
            "scenario invalid: dead-end state at {}",
            state.position
        );
        let scores = actions
            .iter()
            .map(|&a| self.expected_utility(state, a, delay))
            .collect();
        (actions, scores)
    }

    /// `EU(state, action, delay)`: discounted step utility plus the
    /// expectation over the successor's own choice distribution.
    pub fn expected_utility(&mut self, state: &State, action: Action, delay: u16) -> f64 {
        let factor = discount_factor(self.params.effective_k(), delay as u32);
        let step = factor * utility(state, action, &self.params.utilities);
        let succ = transition(state, action, self.grid, &self.config);
        if succ.is_done() {
            step
        } else {
            step + self.continuation_value(&succ, delay + 1)
        }
    }

    /// Expected `EU(state, ·, delay)` under the action distribution the
    /// agent attributes to itself at `state`: delay-matched for Naive and
    /// NonDiscounting agents, delay-0 for Sophisticated ones.
    fn continuation_value(&mut self, state: &State, delay: u16) -> f64 {
        let key = self.key(state, delay);
        if let Some(&v) = self.ev_memo.get(&key) {
            return v;
        }
        let choice_delay = match self.params.agent_type {
            AgentType::Sophisticated => 0,
            _ => delay,
        };
        let dist = self.choice(state, choice_delay);
        let mut value = 0.0;
        for (action, p) in dist.entries() {
            value += p * self.expected_utility(state, *action, delay);
        }
        self.ev_memo.insert(key, value);
        value
    }

    /// What the agent actually does: choice at delay 0.
    pub fn act(&mut self, state: &State) -> ActionDistribution {
        self.choice(state, 0)
    }
}

/// One-shot `EU(state, action, delay)` under full knowledge of `config`.
pub fn expected_utility(
    state: &State,
    action: Action,
    delay: u16,
    params: &AgentParams,
    grid: &GridSpec,
    config: &WorldConfig,
) -> f64 {
    Planner::new(params.clone(), grid, *config).expected_utility(state, action, delay)
}

/// One-shot `C(·; state, delay)` under full knowledge of `config`.
pub fn choice_distribution(
    state: &State,
    delay: u16,
    params: &AgentParams,
    grid: &GridSpec,
    config: &WorldConfig,
) -> ActionDistribution {
    Planner::new(params.clone(), grid, *config).choice(state, delay)
}

/// The acting distribution: `choice_distribution` at delay 0.
pub fn act_distribution(
    state: &State,
    params: &AgentParams,
    grid: &GridSpec,
    config: &WorldConfig,
) -> ActionDistribution {
    Planner::new(params.clone(), grid, *config).act(state)
}

/// Acting distribution for every non-`Done` state reachable from the
/// start, found by a breadth-first sweep over the transition graph.
pub fn policy_table(
    params: &AgentParams,
    grid: &GridSpec,
    config: &WorldConfig,
) -> BTreeMap<State, ActionDistribution> {
    let mut planner = Planner::new(params.clone(), grid, *config);
    let mut table = BTreeMap::new();
    let mut stack = alloc::vec![State::initial(grid)];
    while let Some(state) = stack.pop() {
        if state.is_done() || table.contains_key(&state) {
            continue;
        }
        let dist = planner.act(&state);
        for (action, _) in dist.entries() {
            let succ = transition(&state, *action, grid, config);
            if !succ.is_done() && !table.contains_key(&succ) {
                stack.push(succ);
            }
        }
        table.insert(state, dist);
    }
    table
}

pub(crate) fn unit_from_u64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Samples one episode by drawing each action from the agent's acting
/// distribution. Reproducible for a fixed seed. Agents whose prior is not
/// a point mass plan with the belief-aware recursion and observe the true
/// configuration as they move.
///
/// Panics if the agent's belief becomes inconsistent with an observation,
/// which cannot happen on a validated scenario whose prior puts positive
/// weight on the true configuration.
pub fn simulate(params: &AgentParams, grid: &GridSpec, config: &WorldConfig, seed: u64) -> Episode {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut walker = crate::belief::TrajectoryWalker::new(params, grid, *config);
    let mut state = State::initial(grid);
    let mut actions = Vec::new();
    while !state.is_done() {
        let dist = walker
            .act(&state)
            .expect("simulate: observation inconsistent with the agent's belief");
        let action = dist.sample(unit_from_u64(rng.next_u64()));
        actions.push(action);
        state = transition(&state, action, grid, config);
    }
    Episode {
        true_config: *config,
        start: State::initial(grid),
        actions,
    }
}
