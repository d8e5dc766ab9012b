//! The agent's subjective uncertainty over the world configuration:
//! observation generation, Bayesian updating, and the belief-aware
//! planning recursion.
//!
//! The sensor is noise-free and local: a restaurant's open/closed status
//! is seen exactly when the agent is within Manhattan distance 1 of its
//! cell. Because moves only ever enter adjacent cells, updating on the
//! current observation before choosing guarantees that every
//! configuration the agent still considers possible agrees on which
//! actions are legal.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use arrayvec::ArrayVec;
use hashbrown::HashMap;

use crate::agent::{discount_factor, ActionDistribution, AgentParams, AgentType, Planner};
use crate::world::{
    available_actions, transition, utility, Action, ActionVec, Cell, GridSpec, RestaurantId,
    State, WorldConfig,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BeliefError {
    /// Every configuration in the belief's support contradicts the
    /// observation: the scenario and trajectory do not fit together.
    ImpossibleObservation,
    /// A belief needs at least one strictly positive weight.
    EmptyBelief,
    NegativeWeight,
}

impl fmt::Display for BeliefError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BeliefError::ImpossibleObservation => {
                write!(f, "observation is impossible under every configuration in the belief")
            }
            BeliefError::EmptyBelief => write!(f, "belief has no positive-weight configuration"),
            BeliefError::NegativeWeight => write!(f, "belief weights must be non-negative"),
        }
    }
}

/// A finite distribution over world configurations. Zero-weight entries
/// are dropped, the support is kept sorted, and weights are normalized at
/// construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Belief {
    entries: Vec<(WorldConfig, f64)>,
}

impl Belief {
    pub fn new(entries: impl IntoIterator<Item = (WorldConfig, f64)>) -> Result<Self, BeliefError> {
        let mut entries: Vec<(WorldConfig, f64)> = entries.into_iter().collect();
        if entries.iter().any(|(_, w)| *w < 0.0 || !w.is_finite()) {
            return Err(BeliefError::NegativeWeight);
        }
        entries.retain(|(_, w)| *w > 0.0);
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let total: f64 = entries.iter().map(|(_, w)| w).sum();
        if entries.is_empty() || total <= 0.0 {
            return Err(BeliefError::EmptyBelief);
        }
        if (total - 1.0).abs() > 1e-15 {
            for (_, w) in entries.iter_mut() {
                *w /= total;
            }
        }
        Ok(Belief { entries })
    }

    pub fn point_mass(config: WorldConfig) -> Self {
        Belief {
            entries: alloc::vec![(config, 1.0)],
        }
    }

    pub fn as_point_mass(&self) -> Option<WorldConfig> {
        match self.entries.as_slice() {
            [(config, _)] => Some(*config),
            _ => None,
        }
    }

    pub fn entries(&self) -> &[(WorldConfig, f64)] {
        &self.entries
    }

    pub fn weight_of(&self, config: &WorldConfig) -> f64 {
        self.entries
            .iter()
            .find(|(c, _)| c == config)
            .map(|(_, w)| *w)
            .unwrap_or(0.0)
    }

    /// Marginal probability that restaurant `id` is open.
    pub fn open_probability(&self, id: RestaurantId) -> f64 {
        self.entries
            .iter()
            .filter(|(c, _)| c.is_open(id))
            .map(|(_, w)| w)
            .sum()
    }

    /// Canonical hashable key: support plus weights rounded to 12 decimal
    /// places. Rounding keeps recurring beliefs hot in memo tables without
    /// moving any value past test tolerances.
    fn fingerprint(&self) -> Vec<(u32, i64)> {
        self.entries
            .iter()
            .map(|(c, w)| (c.open_bits(), libm::round(w * 1e12) as i64))
            .collect()
    }
}

/// Statuses of the restaurants visible from one position, in restaurant-id
/// order. The sensor is exact, so every reported status matches the
/// generating configuration.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Observation {
    seen: ArrayVec<(RestaurantId, bool), 8>,
}

impl Observation {
    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    pub fn seen(&self) -> &[(RestaurantId, bool)] {
        &self.seen
    }

    pub fn consistent_with(&self, config: &WorldConfig) -> bool {
        self.seen
            .iter()
            .all(|(id, open)| config.is_open(*id) == *open)
    }
}

/// The true status of every restaurant within Manhattan distance 1 of
/// `position`. Deterministic and noise-free.
pub fn observe(grid: &GridSpec, config: &WorldConfig, position: Cell) -> Observation {
    let mut seen = ArrayVec::new();
    for (index, r) in grid.restaurants().iter().enumerate() {
        if r.cell.manhattan(position) <= 1 {
            let id = RestaurantId(index as u8);
            if seen.try_push((id, config.is_open(id))).is_err() {
                break; // more than 8 adjacent restaurants cannot occur on a 4-connected grid
            }
        }
    }
    Observation { seen }
}

/// Bayes update under the exact sensor: configurations inconsistent with
/// the observation lose all mass, the rest are renormalized. An
/// observation that rules nothing out returns the belief unchanged, so
/// updating is exactly idempotent.
pub fn belief_update(belief: &Belief, obs: &Observation) -> Result<Belief, BeliefError> {
    if obs.is_empty() {
        return Ok(belief.clone());
    }
    if belief
        .entries
        .iter()
        .all(|(c, _)| obs.consistent_with(c))
    {
        return Ok(belief.clone());
    }
    let surviving: Vec<(WorldConfig, f64)> = belief
        .entries
        .iter()
        .filter(|(c, _)| obs.consistent_with(c))
        .copied()
        .collect();
    if surviving.is_empty() {
        return Err(BeliefError::ImpossibleObservation);
    }
    Belief::new(surviving)
}

const DELAY_SHIFT: u32 = 38;
const BELIEF_SHIFT: u32 = 50;

/// Memoized belief-aware evaluator for one hypothesis. Beliefs are
/// interned so memo keys stay scalar; keys are (state, delay, belief).
pub struct BeliefPlanner<'g> {
    grid: &'g GridSpec,
    params: AgentParams,
    beliefs: Vec<Belief>,
    fingerprints: BTreeMap<Vec<(u32, i64)>, u32>,
    choice_memo: HashMap<u64, ActionDistribution>,
    ev_memo: HashMap<u64, f64>,
}

impl<'g> BeliefPlanner<'g> {
    pub fn new(params: AgentParams, grid: &'g GridSpec) -> Self {
        BeliefPlanner {
            grid,
            params,
            beliefs: Vec::new(),
            fingerprints: BTreeMap::new(),
            choice_memo: HashMap::new(),
            ev_memo: HashMap::new(),
        }
    }

    pub fn intern(&mut self, belief: Belief) -> u32 {
        let fp = belief.fingerprint();
        if let Some(&id) = self.fingerprints.get(&fp) {
            return id;
        }
        let id = self.beliefs.len() as u32;
        assert!(id < 1 << 14, "belief registry overflow");
        self.beliefs.push(belief);
        self.fingerprints.insert(fp, id);
        id
    }

    pub fn belief(&self, id: u32) -> &Belief {
        &self.beliefs[id as usize]
    }

    fn key(&self, belief_id: u32, state: &State, delay: u16) -> u64 {
        state.key(self.grid) | (delay as u64) << DELAY_SHIFT | (belief_id as u64) << BELIEF_SHIFT
    }

    /// Legal actions at `state` under an already-updated belief. All
    /// configurations in the support agree on these because adjacent
    /// restaurant statuses have just been observed.
    pub(crate) fn actions(&self, belief_id: u32, state: &State) -> ActionVec {
        let belief = &self.beliefs[belief_id as usize];
        let (first, _) = belief.entries()[0];
        let actions = available_actions(state, self.grid, &first);
        debug_assert!(
            belief.entries().iter().all(|(c, _)| {
                available_actions(state, self.grid, c).as_slice() == actions.as_slice()
            }),
            "support configurations disagree on available actions"
        );
        assert!(
            !actions.is_empty(),
            "scenario invalid: dead-end state at {}",
            state.position
        );
        actions
    }

    /// Choice distribution at `state` given the belief already updated on
    /// the current position's observation.
    pub fn choice_updated(&mut self, belief_id: u32, state: &State, delay: u16) -> ActionDistribution {
        let key = self.key(belief_id, state, delay);
        if let Some(dist) = self.choice_memo.get(&key) {
            return dist.clone();
        }
        let actions = self.actions(belief_id, state);
        let scores: ArrayVec<f64, 5> = actions
            .iter()
            .map(|&a| self.eu_updated(belief_id, state, a, delay))
            .collect();
        let dist = ActionDistribution::softmax(&actions, &scores, self.params.alpha);
        self.choice_memo.insert(key, dist.clone());
        dist
    }

    /// Expected utility under the updated belief: the expectation over
    /// configurations of the discounted step utility plus the successor
    /// value, where each configuration branch generates its own successor
    /// observation and the belief threads forward.
    pub fn eu_updated(&mut self, belief_id: u32, state: &State, action: Action, delay: u16) -> f64 {
        let factor = discount_factor(self.params.effective_k(), delay as u32);
        let step = factor * utility(state, action, &self.params.utilities);
        let branches: Vec<(WorldConfig, f64)> =
            self.beliefs[belief_id as usize].entries().to_vec();
        let mut future = 0.0;
        for (config, weight) in branches {
            let succ = transition(state, action, self.grid, &config);
            if succ.is_done() {
                continue;
            }
            let obs = observe(self.grid, &config, succ.position);
            let next_belief = belief_update(&self.beliefs[belief_id as usize], &obs)
                .expect("successor observation is consistent with its own branch");
            let next_id = self.intern(next_belief);
            future += weight * self.continuation_value(next_id, &succ, delay + 1);
        }
        step + future
    }

    fn continuation_value(&mut self, belief_id: u32, state: &State, delay: u16) -> f64 {
        let key = self.key(belief_id, state, delay);
        if let Some(&v) = self.ev_memo.get(&key) {
            return v;
        }
        let choice_delay = match self.params.agent_type {
            AgentType::Sophisticated => 0,
            _ => delay,
        };
        let dist = self.choice_updated(belief_id, state, choice_delay);
        let mut value = 0.0;
        for (action, p) in dist.entries() {
            value += p * self.eu_updated(belief_id, state, *action, delay);
        }
        self.ev_memo.insert(key, value);
        value
    }
}

/// `EU(belief, obs, state, action, delay)`: updates the belief on the
/// current observation, then runs the uncertainty-aware recursion.
pub fn eu_uncertain(
    belief: &Belief,
    obs: &Observation,
    state: &State,
    action: Action,
    delay: u16,
    params: &AgentParams,
    grid: &GridSpec,
) -> Result<f64, BeliefError> {
    let updated = belief_update(belief, obs)?;
    let mut planner = BeliefPlanner::new(params.clone(), grid);
    let id = planner.intern(updated);
    Ok(planner.eu_updated(id, state, action, delay))
}

/// `C(·; belief, obs, state, delay)`: softmax over [`eu_uncertain`] with
/// the same stability contract as the full-knowledge choice rule.
pub fn choice_distribution_uncertain(
    belief: &Belief,
    obs: &Observation,
    state: &State,
    delay: u16,
    params: &AgentParams,
    grid: &GridSpec,
) -> Result<ActionDistribution, BeliefError> {
    let updated = belief_update(belief, obs)?;
    let mut planner = BeliefPlanner::new(params.clone(), grid);
    let id = planner.intern(updated);
    Ok(planner.choice_updated(id, state, delay))
}

enum WalkerPlanner<'g> {
    /// Prior is a point mass on the true configuration: the cheap
    /// full-knowledge recursion applies unchanged.
    Full(Planner<'g>),
    Belief(BeliefPlanner<'g>),
}

/// Steps an agent through one episode in the true configuration,
/// maintaining its belief between steps. Used for simulation, likelihood
/// evaluation and argmax rollouts.
pub struct TrajectoryWalker<'g> {
    grid: &'g GridSpec,
    true_config: WorldConfig,
    planner: WalkerPlanner<'g>,
    belief: Belief,
    prior: Belief,
}

impl<'g> TrajectoryWalker<'g> {
    pub fn new(params: &AgentParams, grid: &'g GridSpec, true_config: WorldConfig) -> Self {
        let planner = if params.prior.as_point_mass() == Some(true_config) {
            WalkerPlanner::Full(Planner::new(params.clone(), grid, true_config))
        } else {
            WalkerPlanner::Belief(BeliefPlanner::new(params.clone(), grid))
        };
        TrajectoryWalker {
            grid,
            true_config,
            planner,
            belief: params.prior.clone(),
            prior: params.prior.clone(),
        }
    }

    /// Resets the belief to the agent's prior (episodes are independent
    /// outings; nothing carries over). Memo tables are retained.
    pub fn reset(&mut self) {
        self.belief = self.prior.clone();
    }

    fn observe_here(&mut self, state: &State) -> Result<Option<u32>, BeliefError> {
        match &mut self.planner {
            WalkerPlanner::Full(_) => Ok(None),
            WalkerPlanner::Belief(planner) => {
                let obs = observe(self.grid, &self.true_config, state.position);
                self.belief = belief_update(&self.belief, &obs)?;
                Ok(Some(planner.intern(self.belief.clone())))
            }
        }
    }

    /// The acting distribution at `state`, after updating the belief on
    /// the observation made there.
    pub fn act(&mut self, state: &State) -> Result<ActionDistribution, BeliefError> {
        let belief_id = self.observe_here(state)?;
        Ok(match (&mut self.planner, belief_id) {
            (WalkerPlanner::Full(planner), _) => planner.act(state),
            (WalkerPlanner::Belief(planner), Some(id)) => planner.choice_updated(id, state, 0),
            (WalkerPlanner::Belief(_), None) => unreachable!(),
        })
    }

    /// Legal actions and their delay-0 expected utilities at `state`,
    /// after updating the belief on the observation made there.
    pub fn action_values(
        &mut self,
        state: &State,
    ) -> Result<(ActionVec, ArrayVec<f64, 5>), BeliefError> {
        let belief_id = self.observe_here(state)?;
        Ok(match (&mut self.planner, belief_id) {
            (WalkerPlanner::Full(planner), _) => planner.action_values(state, 0),
            (WalkerPlanner::Belief(planner), Some(id)) => {
                let actions = planner.actions(id, state);
                let scores = actions
                    .iter()
                    .map(|&a| planner.eu_updated(id, state, a, 0))
                    .collect();
                (actions, scores)
            }
            (WalkerPlanner::Belief(_), None) => unreachable!(),
        })
    }
}
