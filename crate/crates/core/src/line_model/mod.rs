//! Players, scenarios, paths and strategies for rendezvous on the line, and
//! exact evaluation of a strategy pair.

pub mod consistency;
pub mod evaluate;
pub mod fixtures;
pub mod game;
pub mod path;
pub mod strategy;

pub use consistency::{check_consistency, ConsistencyVerdict, Violation};
pub use evaluate::{
    agent_position, evaluate_bundle, evaluate_paths, gift_position, realize_all, realize_scenario,
    scenario_end_time, scenario_events, GiftOwner, Outcome, RealizedScenario, ScenarioEvents,
};
pub use game::{GameInstance, GameKind, Player, ScenarioFrame, ScenarioId};
pub use path::{Direction, PathPlan, Waypoint};
pub use strategy::{DecisionNode, Observation, ObservationKind, PlayerStrategy, StrategyBundle};
