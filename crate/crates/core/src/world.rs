//! The deterministic gridworld decision problem: geometry, restaurant
//! status, legal actions, transitions and per-step utility.
//!
//! An episode is a walk on a 4-connected grid. Entering an open restaurant
//! cell starts a forced two-step meal (`Arrived` then `Eating`, one
//! `Proceed` action each) after which the state is absorbing (`Done`).
//! Closed restaurants are impassable, exactly like walls. Movement beyond
//! the horizon terminates the episode with no further utility.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use arrayvec::ArrayVec;

/// Grid coordinates; `x` grows east, `y` grows north.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub x: u16,
    pub y: u16,
}

impl Cell {
    pub const fn new(x: u16, y: u16) -> Self {
        Cell { x, y }
    }

    pub fn manhattan(self, other: Cell) -> u32 {
        let dx = (self.x as i32 - other.x as i32).unsigned_abs();
        let dy = (self.y as i32 - other.y as i32).unsigned_abs();
        dx + dy
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Index of a restaurant within its grid's name-sorted restaurant list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RestaurantId(pub u8);

impl RestaurantId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Restaurant {
    pub name: String,
    pub cell: Cell,
}

/// Static geometry of a decision problem. Restaurants are kept sorted by
/// name so `RestaurantId` assignment is reproducible.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub width: u16,
    pub height: u16,
    pub walls: BTreeSet<Cell>,
    restaurants: Vec<Restaurant>,
    pub start: Cell,
    pub horizon: u16,
}

/// Phase codes share a byte with the restaurant index in memo keys, which
/// caps how many restaurants a grid may declare.
pub const MAX_RESTAURANTS: usize = 30;

impl GridSpec {
    /// Builds a spec without checking invariants; run [`validate`] before
    /// handing the grid to a planner.
    pub fn new(
        width: u16,
        height: u16,
        walls: impl IntoIterator<Item = Cell>,
        restaurants: impl IntoIterator<Item = (String, Cell)>,
        start: Cell,
        horizon: u16,
    ) -> Self {
        let mut restaurants: Vec<Restaurant> = restaurants
            .into_iter()
            .map(|(name, cell)| Restaurant { name, cell })
            .collect();
        restaurants.sort_by(|a, b| a.name.cmp(&b.name));
        GridSpec {
            width,
            height,
            walls: walls.into_iter().collect(),
            restaurants,
            start,
            horizon,
        }
    }

    pub fn restaurants(&self) -> &[Restaurant] {
        &self.restaurants
    }

    pub fn restaurant_count(&self) -> usize {
        self.restaurants.len()
    }

    pub fn restaurant_id(&self, name: &str) -> Option<RestaurantId> {
        self.restaurants
            .iter()
            .position(|r| r.name == name)
            .map(|i| RestaurantId(i as u8))
    }

    pub fn restaurant(&self, id: RestaurantId) -> &Restaurant {
        &self.restaurants[id.index()]
    }

    pub fn restaurant_at(&self, cell: Cell) -> Option<RestaurantId> {
        self.restaurants
            .iter()
            .position(|r| r.cell == cell)
            .map(|i| RestaurantId(i as u8))
    }

    pub fn in_bounds(&self, cell: Cell) -> bool {
        cell.x < self.width && cell.y < self.height
    }

    pub(crate) fn cell_index(&self, cell: Cell) -> u32 {
        cell.y as u32 * self.width as u32 + cell.x as u32
    }
}

/// Open/closed status of every restaurant on a grid, packed as a bitmask
/// in restaurant-id order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldConfig {
    open_bits: u32,
    restaurant_count: u8,
}

impl WorldConfig {
    /// Builds a config from explicit per-restaurant statuses. Every
    /// restaurant of `grid` must appear exactly once.
    pub fn from_status<'a>(
        grid: &GridSpec,
        status: impl IntoIterator<Item = (&'a str, bool)>,
    ) -> Result<Self, WorldConfigError> {
        let mut open_bits = 0u32;
        let mut seen = 0u32;
        for (name, open) in status {
            let id = grid
                .restaurant_id(name)
                .ok_or_else(|| WorldConfigError::UnknownRestaurant(String::from(name)))?;
            let bit = 1u32 << id.0;
            if seen & bit != 0 {
                return Err(WorldConfigError::DuplicateRestaurant(String::from(name)));
            }
            seen |= bit;
            if open {
                open_bits |= bit;
            }
        }
        let want = (1u32 << grid.restaurant_count()) - 1;
        if seen != want {
            return Err(WorldConfigError::IncompleteStatus);
        }
        Ok(WorldConfig {
            open_bits,
            restaurant_count: grid.restaurant_count() as u8,
        })
    }

    pub fn all_open(grid: &GridSpec) -> Self {
        WorldConfig {
            open_bits: (1u32 << grid.restaurant_count()) - 1,
            restaurant_count: grid.restaurant_count() as u8,
        }
    }

    pub fn is_open(&self, id: RestaurantId) -> bool {
        self.open_bits & (1u32 << id.0) != 0
    }

    pub fn restaurant_count(&self) -> usize {
        self.restaurant_count as usize
    }

    pub(crate) fn open_bits(&self) -> u32 {
        self.open_bits
    }

    pub fn matches_grid(&self, grid: &GridSpec) -> bool {
        self.restaurant_count as usize == grid.restaurant_count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WorldConfigError {
    UnknownRestaurant(String),
    DuplicateRestaurant(String),
    IncompleteStatus,
}

impl fmt::Display for WorldConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorldConfigError::UnknownRestaurant(n) => write!(f, "unknown restaurant `{n}`"),
            WorldConfigError::DuplicateRestaurant(n) => write!(f, "duplicate restaurant `{n}`"),
            WorldConfigError::IncompleteStatus => {
                write!(f, "status must cover every restaurant of the grid exactly once")
            }
        }
    }
}

/// Per-restaurant reward schedule plus the cost of each movement step.
/// `immediate` is credited on the arrival step, `delayed` one step later.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityParams {
    rewards: Vec<(f64, f64)>,
    pub time_cost: f64,
}

impl UtilityParams {
    pub fn new<'a>(
        grid: &GridSpec,
        rewards: impl IntoIterator<Item = (&'a str, f64, f64)>,
        time_cost: f64,
    ) -> Result<Self, WorldConfigError> {
        let mut table = alloc::vec![None; grid.restaurant_count()];
        for (name, immediate, delayed) in rewards {
            let id = grid
                .restaurant_id(name)
                .ok_or_else(|| WorldConfigError::UnknownRestaurant(String::from(name)))?;
            if table[id.index()].is_some() {
                return Err(WorldConfigError::DuplicateRestaurant(String::from(name)));
            }
            table[id.index()] = Some((immediate, delayed));
        }
        if table.iter().any(Option::is_none) {
            return Err(WorldConfigError::IncompleteStatus);
        }
        Ok(UtilityParams {
            rewards: table.into_iter().map(Option::unwrap).collect(),
            time_cost,
        })
    }

    pub fn from_table(rewards: Vec<(f64, f64)>, time_cost: f64) -> Self {
        UtilityParams { rewards, time_cost }
    }

    pub fn immediate(&self, id: RestaurantId) -> f64 {
        self.rewards[id.index()].0
    }

    pub fn delayed(&self, id: RestaurantId) -> f64 {
        self.rewards[id.index()].1
    }

    /// Undiscounted immediate + delayed utility of one restaurant.
    pub fn total(&self, id: RestaurantId) -> f64 {
        let (i, d) = self.rewards[id.index()];
        i + d
    }

    pub fn rewards(&self) -> &[(f64, f64)] {
        &self.rewards
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    Moving,
    Arrived(RestaurantId),
    Eating(RestaurantId),
    Done,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    pub position: Cell,
    pub time: u16,
    pub phase: Phase,
}

impl State {
    pub fn initial(grid: &GridSpec) -> Self {
        State {
            position: grid.start,
            time: 0,
            phase: Phase::Moving,
        }
    }

    pub fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    /// Packs (position, time, phase) into a memo key. Requires a validated
    /// grid (restaurant count within [`MAX_RESTAURANTS`], horizon < 2^12).
    pub(crate) fn key(&self, grid: &GridSpec) -> u64 {
        let phase_code: u64 = match self.phase {
            Phase::Moving => 0,
            Phase::Arrived(r) => 1 + 2 * r.0 as u64,
            Phase::Eating(r) => 2 + 2 * r.0 as u64,
            Phase::Done => 63,
        };
        grid.cell_index(self.position) as u64 | (self.time as u64) << 20 | phase_code << 32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    North,
    South,
    East,
    West,
    Proceed,
}

impl Action {
    pub const MOVES: [Action; 4] = [Action::North, Action::South, Action::East, Action::West];

    fn delta(self) -> (i32, i32) {
        match self {
            Action::North => (0, 1),
            Action::South => (0, -1),
            Action::East => (1, 0),
            Action::West => (-1, 0),
            Action::Proceed => (0, 0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::North => "north",
            Action::South => "south",
            Action::East => "east",
            Action::West => "west",
            Action::Proceed => "proceed",
        }
    }

    pub fn from_name(name: &str) -> Option<Action> {
        match name {
            "north" => Some(Action::North),
            "south" => Some(Action::South),
            "east" => Some(Action::East),
            "west" => Some(Action::West),
            "proceed" => Some(Action::Proceed),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// At most the four moves plus `Proceed`.
pub type ActionVec = ArrayVec<Action, 5>;

fn move_destination(grid: &GridSpec, from: Cell, action: Action) -> Option<Cell> {
    let (dx, dy) = action.delta();
    let x = from.x as i32 + dx;
    let y = from.y as i32 + dy;
    if x < 0 || y < 0 {
        return None;
    }
    let cell = Cell::new(x as u16, y as u16);
    grid.in_bounds(cell).then_some(cell)
}

/// Destination cell of a move if it is enterable: inside the grid, not a
/// wall, and not a closed restaurant.
fn enterable_destination(
    grid: &GridSpec,
    config: &WorldConfig,
    from: Cell,
    action: Action,
) -> Option<Cell> {
    let cell = move_destination(grid, from, action)?;
    if grid.walls.contains(&cell) {
        return None;
    }
    if let Some(id) = grid.restaurant_at(cell) {
        if !config.is_open(id) {
            return None;
        }
    }
    Some(cell)
}

/// Legal actions in a non-`Done` state: the enterable moves while `Moving`,
/// `Proceed` during a meal. May only come back empty on a grid that fails
/// [`validate`]'s dead-end sweep.
pub fn available_actions(state: &State, grid: &GridSpec, config: &WorldConfig) -> ActionVec {
    debug_assert!(!state.is_done(), "no actions available in a Done state");
    let mut actions = ActionVec::new();
    match state.phase {
        Phase::Moving => {
            for action in Action::MOVES {
                if enterable_destination(grid, config, state.position, action).is_some() {
                    actions.push(action);
                }
            }
        }
        Phase::Arrived(_) | Phase::Eating(_) => actions.push(Action::Proceed),
        Phase::Done => {}
    }
    actions
}

/// Applies one legal action. Panics on an illegal action; callers filter
/// through [`available_actions`] first.
pub fn transition(state: &State, action: Action, grid: &GridSpec, config: &WorldConfig) -> State {
    match (state.phase, action) {
        (Phase::Moving, Action::Proceed) | (Phase::Done, _) => {
            panic!("illegal action {action} in state {state:?}")
        }
        (Phase::Moving, mv) => {
            let dest = enterable_destination(grid, config, state.position, mv)
                .unwrap_or_else(|| panic!("illegal action {mv} from {}", state.position));
            let time = state.time + 1;
            match grid.restaurant_at(dest) {
                Some(id) => State {
                    position: dest,
                    time,
                    phase: Phase::Arrived(id),
                },
                None if time >= grid.horizon => State {
                    position: dest,
                    time,
                    phase: Phase::Done,
                },
                None => State {
                    position: dest,
                    time,
                    phase: Phase::Moving,
                },
            }
        }
        (Phase::Arrived(id), Action::Proceed) => State {
            position: state.position,
            // A meal in progress always runs to completion; only movement
            // counts against the horizon.
            time: (state.time + 1).min(grid.horizon),
            phase: Phase::Eating(id),
        },
        (Phase::Eating(_), Action::Proceed) => State {
            position: state.position,
            time: (state.time + 1).min(grid.horizon),
            phase: Phase::Done,
        },
        (Phase::Arrived(_) | Phase::Eating(_), mv) => {
            panic!("illegal action {mv} during a meal")
        }
    }
}

/// Per-step utility: `time_cost` while moving, the restaurant's immediate
/// utility on the arrival step, its delayed utility on the eating step.
/// Depends only on the phase, never on position or time.
pub fn utility(state: &State, _action: Action, u: &UtilityParams) -> f64 {
    match state.phase {
        Phase::Moving => u.time_cost,
        Phase::Arrived(id) => u.immediate(id),
        Phase::Eating(id) => u.delayed(id),
        Phase::Done => 0.0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationIssue {
    pub message: String,
}

impl ValidationIssue {
    fn new(message: String) -> Self {
        ValidationIssue { message }
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Checks every `GridSpec` invariant and, for each configuration in
/// `configs`, that no Moving state reachable from the start within the
/// horizon is a dead end. Returns all violations found.
pub fn validate(grid: &GridSpec, configs: &[WorldConfig]) -> Vec<ValidationIssue> {
    use alloc::format;

    let mut issues = Vec::new();
    if grid.width == 0 || grid.height == 0 {
        issues.push(ValidationIssue::new(format!(
            "grid dimensions must be positive, got {}x{}",
            grid.width, grid.height
        )));
    }
    if grid.horizon == 0 {
        issues.push(ValidationIssue::new(String::from("horizon must be >= 1")));
    }
    if grid.horizon >= 1 << 12 {
        issues.push(ValidationIssue::new(format!(
            "horizon {} exceeds the supported maximum {}",
            grid.horizon,
            (1 << 12) - 1
        )));
    }
    if grid.restaurant_count() > MAX_RESTAURANTS {
        issues.push(ValidationIssue::new(format!(
            "too many restaurants: {} (max {MAX_RESTAURANTS})",
            grid.restaurant_count()
        )));
    }
    for wall in &grid.walls {
        if !grid.in_bounds(*wall) {
            issues.push(ValidationIssue::new(format!("wall {wall} out of bounds")));
        }
    }
    if !grid.in_bounds(grid.start) {
        issues.push(ValidationIssue::new(format!(
            "start {} out of bounds",
            grid.start
        )));
    }
    if grid.walls.contains(&grid.start) {
        issues.push(ValidationIssue::new(format!(
            "start {} lies on a wall",
            grid.start
        )));
    }
    let mut cells_seen: BTreeMap<Cell, &str> = BTreeMap::new();
    for r in grid.restaurants() {
        if !grid.in_bounds(r.cell) {
            issues.push(ValidationIssue::new(format!(
                "restaurant {} at {} out of bounds",
                r.name, r.cell
            )));
        }
        if grid.walls.contains(&r.cell) {
            issues.push(ValidationIssue::new(format!(
                "restaurant {} at {} lies on a wall",
                r.name, r.cell
            )));
        }
        if r.cell == grid.start {
            issues.push(ValidationIssue::new(format!(
                "restaurant {} occupies the start cell",
                r.name
            )));
        }
        if let Some(other) = cells_seen.insert(r.cell, &r.name) {
            issues.push(ValidationIssue::new(format!(
                "restaurants {} and {} share cell {}",
                other, r.name, r.cell
            )));
        }
    }
    for window in grid.restaurants().windows(2) {
        if window[0].name == window[1].name {
            issues.push(ValidationIssue::new(format!(
                "duplicate restaurant name {}",
                window[0].name
            )));
        }
    }
    if !issues.is_empty() {
        // Geometry is already broken; the reachability sweep below could
        // panic or loop on nonsense, so report what we have.
        return issues;
    }

    for config in configs {
        if !config.matches_grid(grid) {
            issues.push(ValidationIssue::new(String::from(
                "configuration does not cover the grid's restaurants",
            )));
            continue;
        }
        if grid.restaurant_at(grid.start).is_some() {
            continue; // already reported above
        }
        // Breadth-first sweep over Moving positions reachable within the
        // horizon; every swept cell needs at least one legal action.
        let mut frontier = alloc::vec![grid.start];
        let mut visited: BTreeSet<Cell> = frontier.iter().copied().collect();
        let mut depth = 0u16;
        while !frontier.is_empty() && depth < grid.horizon {
            let mut next = Vec::new();
            for cell in frontier {
                let state = State {
                    position: cell,
                    time: depth,
                    phase: Phase::Moving,
                };
                let actions = available_actions(&state, grid, config);
                if actions.is_empty() {
                    issues.push(ValidationIssue::new(format!(
                        "dead-end reachable state at {cell} (no legal action)"
                    )));
                    continue;
                }
                for action in actions {
                    let dest = enterable_destination(grid, config, cell, action)
                        .expect("available move has a destination");
                    if grid.restaurant_at(dest).is_none() && visited.insert(dest) {
                        next.push(dest);
                    }
                }
            }
            frontier = next;
            depth += 1;
        }
    }
    issues
}

/// Positions of all Moving states reachable from the start within the
/// horizon under `config`, including the start itself.
pub fn reachable_cells(grid: &GridSpec, config: &WorldConfig) -> BTreeSet<Cell> {
    let mut frontier = alloc::vec![grid.start];
    let mut visited: BTreeSet<Cell> = frontier.iter().copied().collect();
    let mut depth = 0u16;
    while !frontier.is_empty() && depth < grid.horizon {
        let mut next = Vec::new();
        for cell in frontier {
            let state = State {
                position: cell,
                time: depth,
                phase: Phase::Moving,
            };
            for action in available_actions(&state, grid, config) {
                if let Some(dest) = enterable_destination(grid, config, cell, action) {
                    if grid.restaurant_at(dest).is_none() && visited.insert(dest) {
                        next.push(dest);
                    }
                }
            }
        }
        frontier = next;
        depth += 1;
    }
    visited
}

/// One observed action sequence in a fixed true world configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Episode {
    pub true_config: WorldConfig,
    pub start: State,
    pub actions: Vec<Action>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplayError {
    IllegalAction { step: usize, action: Action },
    ActionAfterDone { step: usize },
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayError::IllegalAction { step, action } => {
                write!(f, "illegal action `{action}` at step {step}")
            }
            ReplayError::ActionAfterDone { step } => {
                write!(f, "action at step {step} after the episode ended")
            }
        }
    }
}

impl Episode {
    pub fn new(true_config: WorldConfig, start: State, actions: Vec<Action>) -> Self {
        Episode {
            true_config,
            start,
            actions,
        }
    }

    /// States visited while replaying the actions from the start,
    /// including the start state itself.
    pub fn replay(&self, grid: &GridSpec) -> Result<Vec<State>, ReplayError> {
        let mut states = alloc::vec![self.start];
        let mut state = self.start;
        for (step, &action) in self.actions.iter().enumerate() {
            if state.is_done() {
                return Err(ReplayError::ActionAfterDone { step });
            }
            if !available_actions(&state, grid, &self.true_config).contains(&action) {
                return Err(ReplayError::IllegalAction { step, action });
            }
            state = transition(&state, action, grid, &self.true_config);
            states.push(state);
        }
        Ok(states)
    }

    /// The restaurant eaten at, if the episode ends with a completed meal.
    pub fn outcome(&self, grid: &GridSpec) -> Option<RestaurantId> {
        let states = self.replay(grid).ok()?;
        states.iter().rev().find_map(|s| match s.phase {
            Phase::Eating(id) => Some(id),
            _ => None,
        })
    }
}

/// Breadth-first walk distance from `from` to entering `target`, treating
/// closed restaurants as walls. `None` if unreachable.
pub fn bfs_distance(grid: &GridSpec, config: &WorldConfig, from: Cell, target: Cell) -> Option<u32> {
    if from == target {
        return Some(0);
    }
    let mut frontier = alloc::vec![from];
    let mut visited: BTreeSet<Cell> = frontier.iter().copied().collect();
    let mut depth = 0u32;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for cell in frontier {
            for action in Action::MOVES {
                if let Some(dest) = enterable_destination(grid, config, cell, action) {
                    if dest == target {
                        return Some(depth);
                    }
                    // Restaurants can be entered but not walked through.
                    if grid.restaurant_at(dest).is_none() && visited.insert(dest) {
                        next.push(dest);
                    }
                }
            }
        }
        frontier = next;
    }
    None
}
