//! The bundled restaurant world and its canonical scenarios.
//!
//! The map is one concrete layout of the classic restaurant-choice
//! problem: two donut branches, a vegetarian cafe, and a noodle shop that
//! is closed in the true configuration.
//!
//! ```text
//!         x=0  1  2  3  4  5
//!   y=9    #   .  V  .  .  #
//!   y=8    #   .  #  #  .  #
//!   y=7    #   .  #  #  .  #
//!   y=6   D2   .  #  #  .  N
//!   y=5    #   .  #  #  .  #
//!   y=4    #   .  #  #  .  #
//!   y=3    #   .  #  #  .  #
//!   y=2    #   .  S  .  .  #
//!   y=1    #   #  .  #  #  #
//!   y=0    #   #  .  .  . D1
//! ```
//!
//! Walk distances from the start: D1 5, D2 6, Noodle 7, and the cafe 9
//! by the west corridor (which passes one cell adjacent to D2, five moves
//! in) or 11 by the east corridor (which passes one cell adjacent to the
//! noodle shop). D1 hangs off a southern spur that no through-route
//! touches, so the only way to stand next to a donut counter is to walk
//! there deliberately — or to head up the west corridor toward the cafe.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::agent::AgentType;
use crate::belief::Belief;
use crate::inference::{HypothesisGrid, UtilityGroup};
use crate::scenario::Scenario;
use crate::world::{Action, Cell, Episode, GridSpec, State, WorldConfig};

pub const D1: &str = "D1";
pub const D2: &str = "D2";
pub const NOODLE: &str = "Noodle";
pub const VEG: &str = "Veg";
/// Group name tying the two donut branches to one utility dimension in
/// the full-knowledge scenarios.
pub const DONUT: &str = "Donut";

/// Movement cost per step in every canonical scenario. Chosen (together
/// with the map distances) so that a single utility assignment gives both
/// canonical rollouts comfortable argmax margins.
pub const CANONICAL_TIME_COST: f64 = -0.02;

pub const K_LEVELS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
pub const ALPHA_LEVELS: [f64; 4] = [0.1, 1.0, 10.0, 100.0];

const OPEN_CELLS: [(u16, u16); 27] = [
    // southern spur to D1
    (2, 2), (2, 1), (2, 0), (3, 0), (4, 0), (5, 0),
    // west corridor past D2 up to the cafe
    (1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7), (1, 8), (1, 9), (0, 6), (2, 9),
    // east corridor past the noodle shop
    (3, 2), (4, 2), (4, 3), (4, 4), (4, 5), (4, 6), (4, 7), (4, 8), (4, 9), (3, 9), (5, 6),
];

/// The canonical 6x10 restaurant world.
pub fn restaurant_world() -> GridSpec {
    let walls = (0..6u16)
        .flat_map(|x| (0..10u16).map(move |y| (x, y)))
        .filter(|cell| !OPEN_CELLS.contains(cell))
        .map(|(x, y)| Cell::new(x, y));
    GridSpec::new(
        6,
        10,
        walls,
        [
            (D1.to_string(), Cell::new(5, 0)),
            (D2.to_string(), Cell::new(0, 6)),
            (NOODLE.to_string(), Cell::new(5, 6)),
            (VEG.to_string(), Cell::new(2, 9)),
        ],
        Cell::new(2, 2),
        14,
    )
}

/// True configuration of every canonical scenario: the noodle shop is
/// closed, everything else is open.
pub fn true_config(grid: &GridSpec) -> WorldConfig {
    WorldConfig::from_status(grid, [(D1, true), (D2, true), (NOODLE, false), (VEG, true)])
        .expect("canonical grid covers these restaurants")
}

/// The tempted walk: straight up the west corridor toward the cafe, then
/// left into donut branch D2 at the adjacent cell.
pub fn naive_actions() -> Vec<Action> {
    use Action::*;
    vec![West, North, North, North, North, West, Proceed, Proceed]
}

/// The detour walk: around the east corridor, past the (closed) noodle
/// shop, reaching the cafe from the far side.
pub fn sophisticated_actions() -> Vec<Action> {
    use Action::*;
    vec![
        East, East, North, North, North, North, North, North, North, West, West, Proceed, Proceed,
    ]
}

fn episode(grid: &GridSpec, config: WorldConfig, actions: Vec<Action>) -> Episode {
    Episode {
        true_config: config,
        start: State::initial(grid),
        actions,
    }
}

/// The per-group utility levels of the canonical grids: totals 0..=4,
/// each split either all-immediate or half/half.
pub fn default_utility_levels() -> Vec<(f64, f64)> {
    vec![
        (0.0, 0.0),
        (1.0, 0.0),
        (0.5, 0.5),
        (2.0, 0.0),
        (1.0, 1.0),
        (3.0, 0.0),
        (1.5, 1.5),
        (4.0, 0.0),
        (2.0, 2.0),
    ]
}

/// All-immediate utility levels with the given totals.
pub fn immediate_levels(totals: &[f64]) -> Vec<(f64, f64)> {
    totals.iter().map(|&t| (t, 0.0)).collect()
}

fn group(name: &str, members: &[&str], levels: Vec<(f64, f64)>) -> UtilityGroup {
    UtilityGroup {
        name: name.to_string(),
        members: members.iter().map(|m| m.to_string()).collect(),
        levels,
    }
}

/// Hypothesis grid for the full-knowledge scenarios: one shared donut
/// dimension, a cafe dimension, and a degenerate noodle dimension (the
/// shop is closed and known closed, so its utility is unidentifiable).
fn full_knowledge_grid(prior: Belief) -> HypothesisGrid {
    HypothesisGrid {
        groups: vec![
            group(DONUT, &[D1, D2], default_utility_levels()),
            group(NOODLE, &[NOODLE], vec![(0.0, 0.0)]),
            group(VEG, &[VEG], default_utility_levels()),
        ],
        time_cost: CANONICAL_TIME_COST,
        k_levels: K_LEVELS.to_vec(),
        alpha_levels: ALPHA_LEVELS.to_vec(),
        alpha_prior_weights: None,
        prior_levels: vec![prior],
        types: AgentType::ALL.to_vec(),
    }
}

/// The tempted episode with a full-knowledge hypothesis space. The cafe
/// dimension gets one extra level of headroom (totals up to 5) so the
/// likelihood ridge "higher than the donut utility, but not so high that
/// the temptation is resisted" has room to peak strictly inside the grid.
pub fn naive_donut() -> Scenario {
    let grid = restaurant_world();
    let config = true_config(&grid);
    let mut hypothesis_grid = full_knowledge_grid(Belief::point_mass(config));
    for g in hypothesis_grid.groups.iter_mut() {
        if g.name == VEG {
            g.levels.push((5.0, 0.0));
            g.levels.push((2.5, 2.5));
        }
    }
    Scenario {
        name: "naive-donut".to_string(),
        description: "A walker heads straight for the Vegetarian Cafe but turns into donut \
                      branch D2 at the adjacent cell. Full-knowledge hypothesis space."
            .to_string(),
        true_config: config,
        config_space: vec![config],
        hypothesis_grid,
        episodes: vec![episode(&grid, config, naive_actions())],
        grid,
    }
}

/// The detour episode with a full-knowledge hypothesis space.
pub fn sophisticated_veg() -> Scenario {
    let grid = restaurant_world();
    let config = true_config(&grid);
    Scenario {
        name: "sophisticated-veg".to_string(),
        description: "A walker takes the strictly longer east corridor to the Vegetarian \
                      Cafe, never coming within one step of a donut branch. Full-knowledge \
                      hypothesis space."
            .to_string(),
        true_config: config,
        config_space: vec![config],
        hypothesis_grid: full_knowledge_grid(Belief::point_mass(config)),
        episodes: vec![episode(&grid, config, sophisticated_actions())],
        grid,
    }
}

/// Noise levels of the multi-episode scenario. The top level stays at 100
/// so argmax fixtures live on the grid, but the prior makes near-perfect
/// maximizers rare: most prior mass sits on noisy deciders. The balance
/// between "prefers the cafe but is time-inconsistent" and "prefers donuts
/// and was noisy once" is sensitive to exactly this noise prior, which is
/// why it is pinned in the scenario rather than left uniform.
pub const MULTI_EPISODE_ALPHA_LEVELS: [f64; 4] = [0.1, 0.3, 1.0, 100.0];
pub const MULTI_EPISODE_ALPHA_WEIGHTS: [f64; 4] = [1.0, 1.0, 0.2, 0.0005];

/// Three outings by the same walker: donut branch D2 twice, the cafe once
/// (by the long way). Full-knowledge hypothesis space.
pub fn three_episodes() -> Scenario {
    let grid = restaurant_world();
    let config = true_config(&grid);
    let mut hypothesis_grid = full_knowledge_grid(Belief::point_mass(config));
    hypothesis_grid.alpha_levels = MULTI_EPISODE_ALPHA_LEVELS.to_vec();
    hypothesis_grid.alpha_prior_weights = Some(MULTI_EPISODE_ALPHA_WEIGHTS.to_vec());
    Scenario {
        name: "three-episodes".to_string(),
        description: "Three independent outings: the tempted walk into D2, the long detour \
                      to the Vegetarian Cafe, and the tempted walk again."
            .to_string(),
        true_config: config,
        config_space: vec![config],
        hypothesis_grid,
        episodes: vec![
            episode(&grid, config, naive_actions()),
            episode(&grid, config, sophisticated_actions()),
            episode(&grid, config, naive_actions()),
        ],
        grid,
    }
}

/// Config space toggling a subset of restaurants, everything else pinned
/// to the canonical true status.
fn toggled_configs(grid: &GridSpec, uncertain: &[&str]) -> Vec<WorldConfig> {
    let names = [D1, D2, NOODLE, VEG];
    let truth = |name: &str| name != NOODLE;
    let mut configs = Vec::new();
    for mask in 0..(1u32 << uncertain.len()) {
        let status = names.map(|name| {
            let open = match uncertain.iter().position(|u| *u == name) {
                Some(bit) => mask & (1 << bit) != 0,
                None => truth(name),
            };
            (name, open)
        });
        configs.push(WorldConfig::from_status(grid, status).expect("known names"));
    }
    configs
}

/// Independent-product prior over the uncertain restaurants.
pub fn product_prior(
    grid: &GridSpec,
    configs: &[WorldConfig],
    open_probs: &[(&str, f64)],
) -> Belief {
    let entries: Vec<(WorldConfig, f64)> = configs
        .iter()
        .map(|config| {
            let mut w = 1.0;
            for (name, p) in open_probs {
                let id = grid.restaurant_id(name).expect("known name");
                w *= if config.is_open(id) { *p } else { 1.0 - *p };
            }
            (*config, w)
        })
        .collect();
    Belief::new(entries).expect("positive product weights")
}

/// The detour episode with the walker possibly unaware that the noodle
/// shop is closed: hypothesis space over the noodle shop's utility, the
/// cafe's utility, and the prior that the shop is open.
pub fn noodle_uncertainty() -> Scenario {
    let grid = restaurant_world();
    let config = true_config(&grid);
    let config_space = toggled_configs(&grid, &[NOODLE]);
    let prior_levels = [0.1, 0.3, 0.5, 0.7, 0.9]
        .iter()
        .map(|&p| product_prior(&grid, &config_space, &[(NOODLE, p)]))
        .collect();
    Scenario {
        name: "noodle-uncertainty".to_string(),
        description: "The long detour to the cafe, observed by a model that does not assume \
                      the walker knows the noodle shop is closed."
            .to_string(),
        true_config: config,
        config_space,
        hypothesis_grid: HypothesisGrid {
            groups: vec![
                group(DONUT, &[D1, D2], vec![(1.0, 1.0)]),
                group(NOODLE, &[NOODLE], immediate_levels(&[0.0, 1.0, 2.0, 3.0, 4.0])),
                group(VEG, &[VEG], immediate_levels(&[0.0, 1.0, 2.0, 3.0, 4.0])),
            ],
            time_cost: CANONICAL_TIME_COST,
            k_levels: K_LEVELS.to_vec(),
            alpha_levels: ALPHA_LEVELS.to_vec(),
            alpha_prior_weights: None,
            prior_levels,
            types: AgentType::ALL.to_vec(),
        },
        episodes: vec![episode(&grid, config, sophisticated_actions())],
        grid,
    }
}

fn explain_grid(grid: &GridSpec) -> (Vec<WorldConfig>, HypothesisGrid) {
    let config_space = toggled_configs(grid, &[D1, NOODLE]);
    let mut prior_levels = Vec::new();
    for &p_d1 in &[0.1, 0.5, 0.9] {
        for &p_noodle in &[0.1, 0.5, 0.9] {
            prior_levels.push(product_prior(
                grid,
                &config_space,
                &[(D1, p_d1), (NOODLE, p_noodle)],
            ));
        }
    }
    let coarse = immediate_levels(&[0.0, 2.0, 4.0]);
    let hgrid = HypothesisGrid {
        groups: vec![
            group(D1, &[D1], coarse.clone()),
            group(D2, &[D2], coarse.clone()),
            group(NOODLE, &[NOODLE], coarse.clone()),
            group(VEG, &[VEG], coarse),
        ],
        time_cost: CANONICAL_TIME_COST,
        k_levels: K_LEVELS.to_vec(),
        alpha_levels: ALPHA_LEVELS.to_vec(),
        alpha_prior_weights: None,
        prior_levels,
        types: AgentType::ALL.to_vec(),
    };
    (config_space, hgrid)
}

/// The tempted episode under joint uncertainty: independent D1 and D2
/// utilities, unknown D1 and noodle-shop status.
pub fn explain_naive() -> Scenario {
    let grid = restaurant_world();
    let config = true_config(&grid);
    let (config_space, hypothesis_grid) = explain_grid(&grid);
    Scenario {
        name: "explain-naive".to_string(),
        description: "The tempted walk into D2, observed without assuming accurate beliefs \
                      or equal donut branches."
            .to_string(),
        true_config: config,
        config_space,
        hypothesis_grid,
        episodes: vec![episode(&grid, config, naive_actions())],
        grid,
    }
}

/// The detour episode under the same joint uncertainty.
pub fn explain_sophisticated() -> Scenario {
    let grid = restaurant_world();
    let config = true_config(&grid);
    let (config_space, hypothesis_grid) = explain_grid(&grid);
    Scenario {
        name: "explain-sophisticated".to_string(),
        description: "The long detour to the cafe, observed without assuming accurate \
                      beliefs or equal donut branches."
            .to_string(),
        true_config: config,
        config_space,
        hypothesis_grid,
        episodes: vec![episode(&grid, config, sophisticated_actions())],
        grid,
    }
}

/// Every bundled scenario, in a stable order.
pub fn all_scenarios() -> Vec<Scenario> {
    vec![
        naive_donut(),
        sophisticated_veg(),
        three_episodes(),
        noodle_uncertainty(),
        explain_naive(),
        explain_sophisticated(),
    ]
}
