//! Simulation and exact Bayesian inversion of boundedly rational agents in
//! deterministic gridworlds.
//!
//! The forward model simulates softmax-noisy, hyperbolically discounting
//! agents (Naive or Sophisticated about their own future discounting,
//! possibly holding false beliefs about which restaurants are open). The
//! inverse model enumerates a discretized hypothesis space over utilities,
//! beliefs, discounting, noise and agent type, and conditions it on
//! observed action sequences by exact dynamic-programming likelihoods.
//!
//! The crate is `no_std` + `alloc`; IO, file formats and the CLI live in
//! the companion `invplan` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod agent;
pub mod belief;
pub mod canonical;
pub mod inference;
mod math;
pub mod predicate;
pub mod scenario;
pub mod world;

pub use agent::{
    act_distribution, choice_distribution, discount_factor, expected_utility, policy_table,
    simulate, ActionDistribution, AgentParams, AgentType, Planner,
};
pub use belief::{
    belief_update, choice_distribution_uncertain, eu_uncertain, observe, Belief, BeliefError,
    BeliefPlanner, Observation, TrajectoryWalker,
};
pub use inference::{
    episode_likelihood, event_probability, marginal2d, posterior, posterior_from_log_likelihoods,
    property_likelihoods, property_likelihoods_from_scores, score_log_likelihoods, score_one,
    GridDim, HypothesisEvaluator, HypothesisGrid, InferenceError, Matrix, Posterior,
    SliceConstraint, UtilityGroup,
};
pub use predicate::{NameTable, PredicateError, PropertyPredicate};
pub use scenario::{
    argmax_rollout, canonical_parameter_search, parameter_search_with_types, Scenario,
    SearchError, ARGMAX_MARGIN,
};
pub use world::{
    available_actions, bfs_distance, reachable_cells, transition, utility, validate, Action,
    Cell, Episode, GridSpec, Phase, ReplayError, Restaurant, RestaurantId, State, UtilityParams,
    ValidationIssue, WorldConfig, WorldConfigError,
};
