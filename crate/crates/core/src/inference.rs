//! Exact Bayesian inversion by enumeration: a discretized hypothesis grid
//! over agent parameters, per-hypothesis trajectory likelihoods computed
//! with the planning recursions, and the normalized posterior with its
//! marginals, event probabilities and property scores.
//!
//! Hypotheses are enumerated in a fixed nested order — type, discount
//! level, noise level, prior level, then one utility level per group —
//! so indices are reproducible and results never depend on map iteration
//! order. Per-step probabilities accumulate in log space and are
//! exponentiated only during normalization.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::agent::{AgentParams, AgentType};
use crate::belief::{Belief, BeliefError, TrajectoryWalker};
use crate::math;
use crate::predicate::{NameTable, PropertyPredicate};
use crate::world::{
    available_actions, transition, Episode, GridSpec, UtilityParams, ValidationIssue,
};

/// One utility dimension of the hypothesis grid: a set of restaurants
/// constrained to share a single (immediate, delayed) level drawn from
/// `levels`. Most groups hold one restaurant; the canonical full-knowledge
/// scenarios tie the two donut branches together.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityGroup {
    pub name: String,
    pub members: Vec<String>,
    pub levels: Vec<(f64, f64)>,
}

/// The discretized hypothesis space θ = (prior, utilities, type, k, α).
/// The hypothesis count is the full product of the dimension sizes;
/// `NonDiscounting` hypotheses appear once per `k` level and simply ignore
/// it, which keeps the type marginal at `1/|types|` under a uniform prior.
#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisGrid {
    pub groups: Vec<UtilityGroup>,
    pub time_cost: f64,
    pub k_levels: Vec<f64>,
    pub alpha_levels: Vec<f64>,
    /// Optional relative prior weights over `alpha_levels` (uniform when
    /// absent). Everything else is uniform.
    pub alpha_prior_weights: Option<Vec<f64>>,
    pub prior_levels: Vec<Belief>,
    pub types: Vec<AgentType>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InferenceError {
    /// No hypothesis on the grid assigns the evidence positive
    /// probability.
    AllHypothesesZero,
    UnknownDimension(String),
    EmptyProperty(String),
    IndexOutOfRange { index: usize, count: usize },
    Belief(BeliefError),
    InvalidGrid(String),
}

impl core::fmt::Display for InferenceError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            InferenceError::AllHypothesesZero => {
                write!(f, "no grid hypothesis can produce the observed episodes")
            }
            InferenceError::UnknownDimension(d) => write!(f, "unknown grid dimension `{d}`"),
            InferenceError::EmptyProperty(p) => {
                write!(f, "property `{p}` is satisfied by no grid hypothesis")
            }
            InferenceError::IndexOutOfRange { index, count } => {
                write!(f, "hypothesis index {index} out of range (grid has {count})")
            }
            InferenceError::Belief(e) => write!(f, "{e}"),
            InferenceError::InvalidGrid(m) => write!(f, "invalid hypothesis grid: {m}"),
        }
    }
}

impl From<BeliefError> for InferenceError {
    fn from(e: BeliefError) -> Self {
        InferenceError::Belief(e)
    }
}

/// Decomposed hypothesis index, most-significant dimension first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisIndex {
    pub type_idx: usize,
    pub k_idx: usize,
    pub alpha_idx: usize,
    pub prior_idx: usize,
    pub level_idx: Vec<usize>,
}

impl HypothesisGrid {
    pub fn hypothesis_count(&self) -> usize {
        self.types.len()
            * self.k_levels.len()
            * self.alpha_levels.len()
            * self.prior_levels.len()
            * self.groups.iter().map(|g| g.levels.len()).product::<usize>()
    }

    pub fn decompose(&self, index: usize) -> Result<HypothesisIndex, InferenceError> {
        let count = self.hypothesis_count();
        if index >= count {
            return Err(InferenceError::IndexOutOfRange { index, count });
        }
        let mut rest = index;
        let mut level_idx = alloc::vec![0; self.groups.len()];
        for (i, g) in self.groups.iter().enumerate().rev() {
            level_idx[i] = rest % g.levels.len();
            rest /= g.levels.len();
        }
        let prior_idx = rest % self.prior_levels.len();
        rest /= self.prior_levels.len();
        let alpha_idx = rest % self.alpha_levels.len();
        rest /= self.alpha_levels.len();
        let k_idx = rest % self.k_levels.len();
        rest /= self.k_levels.len();
        Ok(HypothesisIndex {
            type_idx: rest,
            k_idx,
            alpha_idx,
            prior_idx,
            level_idx,
        })
    }

    pub fn compose(&self, idx: &HypothesisIndex) -> usize {
        let mut index = idx.type_idx;
        index = index * self.k_levels.len() + idx.k_idx;
        index = index * self.alpha_levels.len() + idx.alpha_idx;
        index = index * self.prior_levels.len() + idx.prior_idx;
        for (i, g) in self.groups.iter().enumerate() {
            index = index * g.levels.len() + idx.level_idx[i];
        }
        index
    }

    /// Materializes hypothesis `index` as agent parameters.
    pub fn params(&self, grid: &GridSpec, index: usize) -> Result<AgentParams, InferenceError> {
        let idx = self.decompose(index)?;
        let mut rewards = alloc::vec![(0.0, 0.0); grid.restaurant_count()];
        for (g, &level) in self.groups.iter().zip(&idx.level_idx) {
            let pair = g.levels[level];
            for member in &g.members {
                let id = grid.restaurant_id(member).ok_or_else(|| {
                    InferenceError::InvalidGrid(format!("unknown restaurant `{member}`"))
                })?;
                rewards[id.index()] = pair;
            }
        }
        Ok(AgentParams {
            prior: self.prior_levels[idx.prior_idx].clone(),
            utilities: UtilityParams::from_table(rewards, self.time_cost),
            agent_type: self.types[idx.type_idx],
            k: self.k_levels[idx.k_idx],
            alpha: self.alpha_levels[idx.alpha_idx],
        })
    }

    /// Normalized prior weight of hypothesis `index`: uniform over every
    /// dimension except the optional alpha weighting.
    pub fn prior_weight(&self, index: usize) -> Result<f64, InferenceError> {
        let idx = self.decompose(index)?;
        let alpha_w = match &self.alpha_prior_weights {
            Some(ws) => {
                let total: f64 = ws.iter().sum();
                ws[idx.alpha_idx] / total
            }
            None => 1.0 / self.alpha_levels.len() as f64,
        };
        let rest = self.hypothesis_count() / self.alpha_levels.len();
        Ok(alpha_w / rest as f64)
    }

    /// Name table for predicates: every restaurant plus every group name.
    pub fn name_table(&self, grid: &GridSpec) -> NameTable {
        let mut table = NameTable::default();
        for (i, r) in grid.restaurants().iter().enumerate() {
            table.insert(&r.name, alloc::vec![crate::world::RestaurantId(i as u8)]);
        }
        for g in &self.groups {
            let ids: Vec<_> = g
                .members
                .iter()
                .filter_map(|m| grid.restaurant_id(m))
                .collect();
            table.insert(&g.name, ids);
        }
        table
    }

    /// Structural checks: groups partition the grid's restaurants, all
    /// level lists are nonempty, weights are usable.
    pub fn validate(&self, grid: &GridSpec) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();
        let mut issue = |m: String| issues.push(ValidationIssue { message: m });
        if self.types.is_empty() {
            issue("grid needs at least one agent type".to_string());
        }
        if self.k_levels.is_empty() || self.alpha_levels.is_empty() || self.prior_levels.is_empty()
        {
            issue("k, alpha and prior level lists must be nonempty".to_string());
        }
        if self.k_levels.iter().any(|k| *k < 0.0)
            || self.alpha_levels.iter().any(|a| *a < 0.0)
        {
            issue("k and alpha levels must be non-negative".to_string());
        }
        if let Some(ws) = &self.alpha_prior_weights {
            if ws.len() != self.alpha_levels.len() {
                issue("alpha_prior_weights length must match alpha_levels".to_string());
            }
            if ws.iter().any(|w| *w <= 0.0 || !w.is_finite()) {
                issue("alpha_prior_weights must be positive and finite".to_string());
            }
        }
        let mut covered = alloc::collections::BTreeSet::new();
        for g in &self.groups {
            if g.levels.is_empty() {
                issue(format!("utility group `{}` has no levels", g.name));
            }
            if g.members.is_empty() {
                issue(format!("utility group `{}` has no members", g.name));
            }
            for m in &g.members {
                if grid.restaurant_id(m).is_none() {
                    issue(format!("utility group `{}` names unknown restaurant `{m}`", g.name));
                } else if !covered.insert(m.clone()) {
                    issue(format!("restaurant `{m}` appears in more than one utility group"));
                }
            }
        }
        for r in grid.restaurants() {
            if !covered.contains(&r.name) {
                issue(format!("restaurant `{}` is not covered by any utility group", r.name));
            }
        }
        if self.hypothesis_count() == 0 {
            issue("hypothesis grid is empty".to_string());
        }
        issues
    }
}

/// Likelihood evaluator for one hypothesis. Planner memo tables persist
/// inside the per-configuration walkers and are reused across every
/// episode that shares the true configuration.
pub struct HypothesisEvaluator<'g> {
    params: AgentParams,
    grid: &'g GridSpec,
    walkers: Vec<(crate::world::WorldConfig, TrajectoryWalker<'g>)>,
}

impl<'g> HypothesisEvaluator<'g> {
    pub fn new(params: AgentParams, grid: &'g GridSpec) -> Self {
        HypothesisEvaluator {
            params,
            grid,
            walkers: Vec::new(),
        }
    }

    pub fn params(&self) -> &AgentParams {
        &self.params
    }

    fn walker_for(&mut self, config: crate::world::WorldConfig) -> &mut TrajectoryWalker<'g> {
        let pos = match self.walkers.iter().position(|(c, _)| *c == config) {
            Some(pos) => pos,
            None => {
                self.walkers
                    .push((config, TrajectoryWalker::new(&self.params, self.grid, config)));
                self.walkers.len() - 1
            }
        };
        &mut self.walkers[pos].1
    }

    /// Log-probability of the episode's action sequence: the product over
    /// steps of the acting distribution's probability of the observed
    /// action, with the belief reset to the prior at the episode start.
    pub fn episode_log_likelihood(&mut self, episode: &Episode) -> Result<f64, BeliefError> {
        let grid = self.grid;
        let walker = self.walker_for(episode.true_config);
        walker.reset();
        let mut state = episode.start;
        let mut log_likelihood = 0.0;
        for &action in &episode.actions {
            if state.is_done() {
                return Ok(f64::NEG_INFINITY);
            }
            // Outside the true configuration's legal set the episode is
            // impossible regardless of the hypothesis.
            if !available_actions(&state, grid, &episode.true_config).contains(&action) {
                return Ok(f64::NEG_INFINITY);
            }
            let dist = walker.act(&state)?;
            let p = dist.prob(action);
            if p <= 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            log_likelihood += math::ln(p);
            state = transition(&state, action, grid, &episode.true_config);
        }
        Ok(log_likelihood)
    }

    /// Product of per-episode likelihoods in log space; episodes are
    /// conditionally independent given the hypothesis.
    pub fn episodes_log_likelihood(&mut self, episodes: &[Episode]) -> Result<f64, BeliefError> {
        let mut total = 0.0;
        for episode in episodes {
            total += self.episode_log_likelihood(episode)?;
            if total == f64::NEG_INFINITY {
                break;
            }
        }
        Ok(total)
    }
}

/// `P(a_{0:T} | θ)` for one episode, in linear space.
pub fn episode_likelihood(
    params: &AgentParams,
    grid: &GridSpec,
    episode: &Episode,
) -> Result<f64, BeliefError> {
    let mut eval = HypothesisEvaluator::new(params.clone(), grid);
    Ok(math::exp(eval.episode_log_likelihood(episode)?))
}

/// Scores every hypothesis serially. `NonDiscounting` hypotheses are
/// computed once per (alpha, prior, utilities) combination and copied
/// across `k` levels, which they ignore.
pub fn score_log_likelihoods(
    hgrid: &HypothesisGrid,
    grid: &GridSpec,
    episodes: &[Episode],
) -> Result<Vec<f64>, InferenceError> {
    let count = hgrid.hypothesis_count();
    let mut scores = alloc::vec![f64::NAN; count];
    for index in 0..count {
        let idx = hgrid.decompose(index)?;
        if hgrid.types[idx.type_idx] == AgentType::NonDiscounting && idx.k_idx > 0 {
            let mut base = idx.clone();
            base.k_idx = 0;
            scores[index] = scores[hgrid.compose(&base)];
            continue;
        }
        scores[index] = score_one(hgrid, grid, episodes, index)?;
    }
    Ok(scores)
}

/// Log-likelihood of the episode list under hypothesis `index`. The unit
/// of work for parallel scoring.
pub fn score_one(
    hgrid: &HypothesisGrid,
    grid: &GridSpec,
    episodes: &[Episode],
    index: usize,
) -> Result<f64, InferenceError> {
    let params = hgrid.params(grid, index)?;
    let mut eval = HypothesisEvaluator::new(params, grid);
    Ok(eval.episodes_log_likelihood(episodes)?)
}

/// Normalized posterior over hypothesis indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Posterior {
    pub weights: Vec<f64>,
    pub log_likelihoods: Vec<f64>,
}

/// Combines prior weights with log-likelihoods. Fails if every hypothesis
/// has zero posterior mass.
pub fn posterior_from_log_likelihoods(
    hgrid: &HypothesisGrid,
    log_likelihoods: Vec<f64>,
) -> Result<Posterior, InferenceError> {
    let count = hgrid.hypothesis_count();
    assert_eq!(log_likelihoods.len(), count);
    let mut log_posts = Vec::with_capacity(count);
    for (index, &ll) in log_likelihoods.iter().enumerate() {
        let prior = hgrid.prior_weight(index)?;
        log_posts.push(ll + math::ln(prior));
    }
    let log_z = math::log_sum_exp(&log_posts);
    if log_z == f64::NEG_INFINITY {
        return Err(InferenceError::AllHypothesesZero);
    }
    let mut weights: Vec<f64> = log_posts.iter().map(|&lp| math::exp(lp - log_z)).collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    Ok(Posterior {
        weights,
        log_likelihoods,
    })
}

/// Full exact inversion: enumerate, score, normalize.
pub fn posterior(
    hgrid: &HypothesisGrid,
    grid: &GridSpec,
    episodes: &[Episode],
) -> Result<Posterior, InferenceError> {
    let scores = score_log_likelihoods(hgrid, grid, episodes)?;
    posterior_from_log_likelihoods(hgrid, scores)
}

/// A marginalization axis of the hypothesis grid.
#[derive(Clone, Debug, PartialEq)]
pub enum GridDim {
    /// Total (immediate + delayed) utility of a utility group.
    UtilityTotal(String),
    K,
    Alpha,
    AgentType,
    /// The agent's prior probability that a restaurant is open.
    PriorOpen(String),
}

impl GridDim {
    pub fn label(&self) -> String {
        match self {
            GridDim::UtilityTotal(g) => format!("u_total({g})"),
            GridDim::K => "k".to_string(),
            GridDim::Alpha => "alpha".to_string(),
            GridDim::AgentType => "type".to_string(),
            GridDim::PriorOpen(r) => format!("p_open({r})"),
        }
    }
}

/// A constraint fixing one grid dimension to one level, used to slice
/// marginal matrices.
#[derive(Clone, Debug, PartialEq)]
pub enum SliceConstraint {
    Type(AgentType),
    K(f64),
    Alpha(f64),
    UtilityTotal(String, f64),
    PriorOpen(String, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub x_dim: String,
    pub y_dim: String,
    pub x_labels: Vec<String>,
    pub y_labels: Vec<String>,
    /// Row-major in x: `cells[xi][yi]`.
    pub cells: Vec<Vec<f64>>,
}

fn float_label(v: f64) -> String {
    format!("{v}")
}

fn dedup_sorted(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite levels"));
    values.dedup_by(|a, b| math::abs(*a - *b) < 1e-9);
    values
}

struct DimView {
    labels: Vec<String>,
    /// Level index for every hypothesis.
    assignment: Vec<usize>,
}

fn group_position(hgrid: &HypothesisGrid, name: &str) -> Result<usize, InferenceError> {
    hgrid
        .groups
        .iter()
        .position(|g| g.name == name)
        .ok_or_else(|| InferenceError::UnknownDimension(format!("u_total({name})")))
}

fn dim_view(
    hgrid: &HypothesisGrid,
    grid: &GridSpec,
    dim: &GridDim,
) -> Result<DimView, InferenceError> {
    let count = hgrid.hypothesis_count();
    let mut assignment = Vec::with_capacity(count);
    match dim {
        GridDim::UtilityTotal(name) => {
            let gi = group_position(hgrid, name)?;
            let totals: Vec<f64> = hgrid.groups[gi].levels.iter().map(|(i, d)| i + d).collect();
            let levels = dedup_sorted(totals.clone());
            let level_of = |t: f64| {
                levels
                    .iter()
                    .position(|l| math::abs(l - t) < 1e-9)
                    .expect("total present in deduped levels")
            };
            for index in 0..count {
                let idx = hgrid.decompose(index)?;
                assignment.push(level_of(totals[idx.level_idx[gi]]));
            }
            Ok(DimView {
                labels: levels.iter().map(|&v| float_label(v)).collect(),
                assignment,
            })
        }
        GridDim::K => {
            for index in 0..count {
                assignment.push(hgrid.decompose(index)?.k_idx);
            }
            Ok(DimView {
                labels: hgrid.k_levels.iter().map(|&v| float_label(v)).collect(),
                assignment,
            })
        }
        GridDim::Alpha => {
            for index in 0..count {
                assignment.push(hgrid.decompose(index)?.alpha_idx);
            }
            Ok(DimView {
                labels: hgrid.alpha_levels.iter().map(|&v| float_label(v)).collect(),
                assignment,
            })
        }
        GridDim::AgentType => {
            for index in 0..count {
                assignment.push(hgrid.decompose(index)?.type_idx);
            }
            Ok(DimView {
                labels: hgrid.types.iter().map(|t| t.name().to_string()).collect(),
                assignment,
            })
        }
        GridDim::PriorOpen(name) => {
            let id = grid
                .restaurant_id(name)
                .ok_or_else(|| InferenceError::UnknownDimension(format!("p_open({name})")))?;
            let probs: Vec<f64> = hgrid
                .prior_levels
                .iter()
                .map(|b| b.open_probability(id))
                .collect();
            let levels = dedup_sorted(probs.clone());
            for index in 0..count {
                let idx = hgrid.decompose(index)?;
                let p = probs[idx.prior_idx];
                assignment.push(
                    levels
                        .iter()
                        .position(|l| math::abs(l - p) < 1e-9)
                        .expect("probability present in deduped levels"),
                );
            }
            Ok(DimView {
                labels: levels.iter().map(|&v| float_label(v)).collect(),
                assignment,
            })
        }
    }
}

fn slice_mask(
    hgrid: &HypothesisGrid,
    grid: &GridSpec,
    slice: &[SliceConstraint],
) -> Result<Vec<bool>, InferenceError> {
    let count = hgrid.hypothesis_count();
    let mut mask = alloc::vec![true; count];
    for constraint in slice {
        match constraint {
            SliceConstraint::Type(t) => {
                for index in 0..count {
                    mask[index] &= hgrid.types[hgrid.decompose(index)?.type_idx] == *t;
                }
            }
            SliceConstraint::K(v) => {
                for index in 0..count {
                    let k = hgrid.k_levels[hgrid.decompose(index)?.k_idx];
                    mask[index] &= math::abs(k - *v) < 1e-9;
                }
            }
            SliceConstraint::Alpha(v) => {
                for index in 0..count {
                    let a = hgrid.alpha_levels[hgrid.decompose(index)?.alpha_idx];
                    mask[index] &= math::abs(a - *v) < 1e-9;
                }
            }
            SliceConstraint::UtilityTotal(name, v) => {
                let gi = group_position(hgrid, name)?;
                for index in 0..count {
                    let (i, d) = hgrid.groups[gi].levels[hgrid.decompose(index)?.level_idx[gi]];
                    mask[index] &= math::abs(i + d - *v) < 1e-9;
                }
            }
            SliceConstraint::PriorOpen(name, v) => {
                let id = grid.restaurant_id(name).ok_or_else(|| {
                    InferenceError::UnknownDimension(format!("p_open({name})"))
                })?;
                for index in 0..count {
                    let p = hgrid.prior_levels[hgrid.decompose(index)?.prior_idx]
                        .open_probability(id);
                    mask[index] &= math::abs(p - *v) < 1e-9;
                }
            }
        }
    }
    Ok(mask)
}

/// Projects posterior mass onto two grid dimensions, optionally within a
/// slice fixing other dimensions. Entries are renormalized to sum to 1
/// whenever the sliced mass is positive.
pub fn marginal2d(
    hgrid: &HypothesisGrid,
    grid: &GridSpec,
    post: &Posterior,
    dim_x: &GridDim,
    dim_y: &GridDim,
    slice: &[SliceConstraint],
) -> Result<Matrix, InferenceError> {
    if dim_x == dim_y {
        return Err(InferenceError::UnknownDimension(
            "dimension selectors must be distinct".to_string(),
        ));
    }
    let view_x = dim_view(hgrid, grid, dim_x)?;
    let view_y = dim_view(hgrid, grid, dim_y)?;
    let mask = slice_mask(hgrid, grid, slice)?;
    let mut cells = alloc::vec![alloc::vec![0.0; view_y.labels.len()]; view_x.labels.len()];
    let mut total = 0.0;
    for (index, &w) in post.weights.iter().enumerate() {
        if !mask[index] {
            continue;
        }
        cells[view_x.assignment[index]][view_y.assignment[index]] += w;
        total += w;
    }
    if total > 0.0 {
        for row in cells.iter_mut() {
            for cell in row.iter_mut() {
                *cell /= total;
            }
        }
    }
    Ok(Matrix {
        x_dim: dim_x.label(),
        y_dim: dim_y.label(),
        x_labels: view_x.labels,
        y_labels: view_y.labels,
        cells,
    })
}

/// Total posterior probability of the hypotheses satisfying `predicate`.
pub fn event_probability(
    hgrid: &HypothesisGrid,
    grid: &GridSpec,
    post: &Posterior,
    predicate: &PropertyPredicate,
) -> Result<f64, InferenceError> {
    let mut total = 0.0;
    for (index, &w) in post.weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let params = hgrid.params(grid, index)?;
        if predicate.test(&params) {
            total += w;
        }
    }
    Ok(total)
}

/// Per-property marginal likelihood of the episodes, normalized across the
/// properties: `L(c) = Σ_{h ⊨ c} lik(h)·prior(h) / Σ_{h ⊨ c} prior(h)`,
/// returned as `L(c) / Σ_c' L(c')` in the order given.
pub fn property_likelihoods(
    hgrid: &HypothesisGrid,
    grid: &GridSpec,
    episodes: &[Episode],
    properties: &[PropertyPredicate],
) -> Result<Vec<(String, f64)>, InferenceError> {
    let scores = score_log_likelihoods(hgrid, grid, episodes)?;
    property_likelihoods_from_scores(hgrid, grid, &scores, properties)
}

/// As [`property_likelihoods`], reusing already-computed log-likelihoods.
pub fn property_likelihoods_from_scores(
    hgrid: &HypothesisGrid,
    grid: &GridSpec,
    log_likelihoods: &[f64],
    properties: &[PropertyPredicate],
) -> Result<Vec<(String, f64)>, InferenceError> {
    let count = hgrid.hypothesis_count();
    let mut log_marginals = Vec::with_capacity(properties.len());
    for property in properties {
        let mut terms = Vec::new();
        let mut prior_mass = 0.0;
        for index in 0..count {
            let params = hgrid.params(grid, index)?;
            if property.test(&params) {
                let prior = hgrid.prior_weight(index)?;
                terms.push(log_likelihoods[index] + math::ln(prior));
                prior_mass += prior;
            }
        }
        if terms.is_empty() {
            return Err(InferenceError::EmptyProperty(property.name.clone()));
        }
        log_marginals.push(math::log_sum_exp(&terms) - math::ln(prior_mass));
    }
    let log_z = math::log_sum_exp(&log_marginals);
    if log_z == f64::NEG_INFINITY {
        return Err(InferenceError::AllHypothesesZero);
    }
    Ok(properties
        .iter()
        .zip(&log_marginals)
        .map(|(p, &lm)| (p.name.clone(), math::exp(lm - log_z)))
        .collect())
}
