//! The bundled restaurant world: topology invariants, validation, and the
//! canonical parameter search that pins the fixture hypotheses.

use invplan_core::canonical::{
    self, naive_actions, restaurant_world, sophisticated_actions, true_config, D1, D2, DONUT, VEG,
};
use invplan_core::scenario::parameter_search_with_types;
use invplan_core::{argmax_rollout, bfs_distance, AgentType, Cell};

#[test]
fn every_bundled_scenario_validates_and_replays() {
    for scenario in canonical::all_scenarios() {
        let issues = scenario.validate();
        assert!(
            issues.is_empty(),
            "{}: {:?}",
            scenario.name,
            issues.iter().map(|i| i.message.clone()).collect::<Vec<_>>()
        );
    }
}

#[test]
fn topology_matches_the_intended_decision_structure() {
    let grid = restaurant_world();
    let config = true_config(&grid);
    let cell = |name: &str| grid.restaurant(grid.restaurant_id(name).unwrap()).cell;
    let dist = |target: Cell| bfs_distance(&grid, &config, grid.start, target).unwrap();

    // D1 is strictly closer to the start than D2.
    assert!(dist(cell(D1)) < dist(cell(D2)));
    assert_eq!(dist(cell(D1)), 5);
    assert_eq!(dist(cell(D2)), 6);

    // The west route to the cafe (past D2) is strictly shorter than the
    // east route (past the noodle shop): 9 vs 11 moves.
    assert_eq!(dist(cell(VEG)), 9);
    let west_route = naive_actions();
    assert_eq!(west_route.len() - 3, 5, "D2 swerve leaves the west route 5 moves in");
    assert_eq!(sophisticated_actions().len() - 2, 11);

    // The direct route passes exactly one cell adjacent to D2; the east
    // route never comes within one step of either donut branch.
    let scenario = canonical::sophisticated_veg();
    let states = scenario.episodes[0].replay(&grid).unwrap();
    for s in &states {
        assert!(s.position.manhattan(cell(D1)) > 1);
        assert!(s.position.manhattan(cell(D2)) > 1);
    }
}

#[test]
fn three_episode_bundle_reuses_the_sophisticated_episode() {
    let bundle = canonical::three_episodes();
    let veg_episode = canonical::sophisticated_veg();
    assert_eq!(bundle.episodes[1].actions, veg_episode.episodes[0].actions);
    assert_eq!(bundle.episodes[0].actions, bundle.episodes[2].actions);
}

#[test]
fn search_finds_a_naive_hypothesis_reproducing_the_tempted_walk() {
    let scenario = canonical::naive_donut();
    let (_, params) = parameter_search_with_types(&scenario, None).expect("fixture exists");
    assert_eq!(params.agent_type, AgentType::Naive);
    let grid = &scenario.grid;
    let donut = params.utilities.total(grid.restaurant_id(D1).unwrap());
    let veg = params.utilities.total(grid.restaurant_id(VEG).unwrap());
    assert!(veg > donut, "cafe must be preferred in total utility: {veg} vs {donut}");

    let rollout = argmax_rollout(&params, grid, scenario.true_config).unwrap();
    assert_eq!(rollout.actions, naive_actions());
    let outcome = rollout.outcome(grid).unwrap();
    assert_eq!(grid.restaurant(outcome).name, D2);
}

#[test]
fn search_finds_a_sophisticated_hypothesis_with_the_same_ordering() {
    let scenario = canonical::sophisticated_veg();
    let (_, params) =
        parameter_search_with_types(&scenario, Some(&[AgentType::Sophisticated])).unwrap();
    let grid = &scenario.grid;
    let donut = params.utilities.total(grid.restaurant_id(D2).unwrap());
    let veg = params.utilities.total(grid.restaurant_id(VEG).unwrap());
    assert!(veg > donut);

    let rollout = argmax_rollout(&params, grid, scenario.true_config).unwrap();
    assert_eq!(rollout.actions, sophisticated_actions());
    let outcome = rollout.outcome(grid).unwrap();
    assert_eq!(grid.restaurant(outcome).name, VEG);
}

#[test]
fn no_non_discounting_hypothesis_reproduces_the_tempted_walk() {
    let scenario = canonical::naive_donut();
    let result = parameter_search_with_types(&scenario, Some(&[AgentType::NonDiscounting]));
    assert!(result.is_err(), "a time-consistent agent never detours into D2: {result:?}");
}

#[test]
fn donut_group_ties_both_branches() {
    let scenario = canonical::naive_donut();
    let hgrid = &scenario.hypothesis_grid;
    let donut = hgrid.groups.iter().find(|g| g.name == DONUT).unwrap();
    assert_eq!(donut.members, vec![D1.to_string(), D2.to_string()]);
}
