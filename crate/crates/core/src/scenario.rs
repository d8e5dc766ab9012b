//! Scenario bundles: a grid, the true configuration, the configuration
//! space agents may be uncertain over, a hypothesis grid, and observed
//! episodes — plus whole-bundle validation and the deterministic search
//! that recovers fixture parameters from a target trajectory.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::agent::{AgentParams, AgentType};
use crate::belief::TrajectoryWalker;
use crate::inference::HypothesisGrid;
use crate::world::{
    self, transition, Episode, GridSpec, State, ValidationIssue, WorldConfig,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub grid: GridSpec,
    pub true_config: WorldConfig,
    /// Support of the agents' candidate priors.
    pub config_space: Vec<WorldConfig>,
    pub hypothesis_grid: HypothesisGrid,
    pub episodes: Vec<Episode>,
}

impl Scenario {
    /// Every invariant of the bundle: grid geometry, dead-end freedom
    /// under each configuration in the space, hypothesis-grid structure,
    /// prior support containment, and legal episode replay.
    pub fn validate(&self) -> Vec<ValidationIssue> {
        let mut issues = world::validate(&self.grid, &self.config_space);
        let mut issue = |m: String| issues.push(ValidationIssue { message: m });

        if self.config_space.is_empty() {
            issue("config_space must be nonempty".into());
        }
        if !self.config_space.contains(&self.true_config) {
            issue("true_config must be an element of config_space".into());
        }
        let mut sorted = self.config_space.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.config_space.len() {
            issue("config_space contains duplicate configurations".into());
        }

        for b in &self.hypothesis_grid.prior_levels {
            for (config, _) in b.entries() {
                if !self.config_space.contains(config) {
                    issue("a prior level puts weight outside config_space".into());
                }
            }
        }

        for (i, episode) in self.episodes.iter().enumerate() {
            if episode.true_config != self.true_config {
                issue(format!("episode {i} does not use the scenario's true_config"));
            }
            if let Err(e) = episode.replay(&self.grid) {
                issue(format!("episode {i} does not replay: {e}"));
            }
        }

        issues.extend(self.hypothesis_grid.validate(&self.grid));
        issues
    }
}

/// EU margin below which an argmax rollout is treated as ambiguous.
pub const ARGMAX_MARGIN: f64 = 1e-6;

/// Deterministic greedy rollout: at every state take the action with the
/// strictly largest delay-0 expected utility. Returns `None` when the top
/// two utilities are within [`ARGMAX_MARGIN`] (a tie) or when the agent's
/// belief contradicts an observation en route.
pub fn argmax_rollout(
    params: &AgentParams,
    grid: &GridSpec,
    true_config: WorldConfig,
) -> Option<Episode> {
    let mut walker = TrajectoryWalker::new(params, grid, true_config);
    let mut state = State::initial(grid);
    let mut actions = Vec::new();
    while !state.is_done() {
        let (available, scores) = walker.action_values(&state).ok()?;
        let mut best = 0;
        for i in 1..scores.len() {
            if scores[i] > scores[best] {
                best = i;
            }
        }
        if scores
            .iter()
            .enumerate()
            .any(|(i, &s)| i != best && scores[best] - s < ARGMAX_MARGIN)
        {
            return None;
        }
        let action = available[best];
        actions.push(action);
        state = transition(&state, action, grid, &true_config);
    }
    Some(Episode {
        true_config,
        start: State::initial(grid),
        actions,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchError {
    /// No grid hypothesis reproduces the target trajectory.
    NotFound,
    NoTargetEpisode,
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::NotFound => {
                write!(f, "no hypothesis on the grid reproduces the target trajectory")
            }
            SearchError::NoTargetEpisode => {
                write!(f, "scenario has no episode to use as a search target")
            }
        }
    }
}

/// Scans the scenario's hypothesis grid — restricted to its largest alpha
/// level and, optionally, to a subset of agent types — for the first
/// hypothesis whose argmax rollout reproduces the scenario's first episode
/// exactly. Scan order is the grid's enumeration order, so the result is
/// reproducible.
pub fn parameter_search_with_types(
    scenario: &Scenario,
    types: Option<&[AgentType]>,
) -> Result<(usize, AgentParams), SearchError> {
    let target = scenario.episodes.first().ok_or(SearchError::NoTargetEpisode)?;
    let hgrid = &scenario.hypothesis_grid;
    let max_alpha_idx = hgrid
        .alpha_levels
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite alpha"))
        .map(|(i, _)| i)
        .expect("nonempty alpha levels");
    for index in 0..hgrid.hypothesis_count() {
        let idx = hgrid.decompose(index).expect("index in range");
        if idx.alpha_idx != max_alpha_idx {
            continue;
        }
        if let Some(allowed) = types {
            if !allowed.contains(&hgrid.types[idx.type_idx]) {
                continue;
            }
        }
        let params = hgrid
            .params(&scenario.grid, index)
            .expect("validated hypothesis grid");
        if let Some(rollout) = argmax_rollout(&params, &scenario.grid, scenario.true_config) {
            if rollout.actions == target.actions {
                return Ok((index, params));
            }
        }
    }
    Err(SearchError::NotFound)
}

/// [`parameter_search_with_types`] over the full type list: recovers the
/// canonical fixture parameters behind a bundled scenario's target
/// trajectory.
pub fn canonical_parameter_search(scenario: &Scenario) -> Result<AgentParams, SearchError> {
    parameter_search_with_types(scenario, None).map(|(_, params)| params)
}
