use serde::{Deserialize, Serialize};

use super::path::{Direction, PathPlan};
use crate::error::ModelError;
use crate::rational::Rational;

/// What a player perceives at a decision point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ObservationKind {
    Root,
    /// Met the other player.
    Met,
    /// The other player's gift lies at the current location.
    Found,
    /// No gift here although some scenario the player cannot rule out
    /// would have put one here.
    Absent,
    /// Own gift dropped.
    Drop,
    /// Scheduled waypoint with nothing observed.
    Turn,
}

impl ObservationKind {
    /// `Found` and `Absent` children are taken only when the observation
    /// matches; every other label marks an unconditional waypoint.
    pub fn is_conditional(self) -> bool {
        matches!(self, ObservationKind::Found | ObservationKind::Absent)
    }

    pub fn matches(self, gift_here: bool) -> bool {
        match self {
            ObservationKind::Found => gift_here,
            ObservationKind::Absent => !gift_here,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub time: Rational,
    pub kind: ObservationKind,
    pub location: Rational,
}

/// Node of an adaptive strategy.
///
/// The player reaches `(t, x)` having observed `obs`, then heads in `dir`
/// until the children's common time. All children share the same `t` and
/// `x`; the one whose observation matches is followed. With no matching
/// child the player keeps going in `dir` for good.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionNode {
    pub t: Rational,
    pub obs: ObservationKind,
    pub x: Rational,
    pub dir: Direction,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<DecisionNode>,
}

impl DecisionNode {
    pub fn root(dir: Direction) -> Self {
        DecisionNode {
            t: Rational::ZERO,
            obs: ObservationKind::Root,
            x: Rational::ZERO,
            dir,
            children: Vec::new(),
        }
    }

    pub fn new(t: Rational, obs: ObservationKind, x: Rational, dir: Direction) -> Self {
        DecisionNode {
            t,
            obs,
            x,
            dir,
            children: Vec::new(),
        }
    }

    pub fn with_children(mut self, children: Vec<DecisionNode>) -> Self {
        self.children = children;
        self
    }

    /// Non-adaptive chain through the waypoints of `plan`. Waypoints at
    /// `drop_time` are labelled `Drop`, the rest `Turn`.
    pub fn chain(plan: &PathPlan, drop_time: Option<Rational>) -> Self {
        let wps = plan.waypoints();
        let mut node: Option<DecisionNode> = None;
        for i in (0..wps.len()).rev() {
            let dir = match wps.get(i + 1) {
                Some(next) => {
                    if next.x < wps[i].x {
                        Direction::Backward
                    } else {
                        Direction::Forward
                    }
                }
                None => plan.terminal_direction(),
            };
            let obs = if i == 0 {
                ObservationKind::Root
            } else if Some(wps[i].t) == drop_time {
                ObservationKind::Drop
            } else {
                ObservationKind::Turn
            };
            let mut n = DecisionNode::new(wps[i].t, obs, wps[i].x, dir);
            if let Some(child) = node.take() {
                n.children.push(child);
            }
            node = Some(n);
        }
        node.expect("path has at least one waypoint")
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.t.is_zero() || !self.x.is_zero() || self.obs != ObservationKind::Root {
            return Err(ModelError::InvalidTree(
                "root must be a ROOT node at t=0, x=0".into(),
            ));
        }
        self.validate_below()
    }

    fn validate_below(&self) -> Result<(), ModelError> {
        let Some(first) = self.children.first() else {
            return Ok(());
        };
        for c in &self.children {
            if c.t != first.t || c.x != first.x {
                return Err(ModelError::InvalidTree(format!(
                    "children of the node at t={} disagree on time or position",
                    self.t
                )));
            }
            if c.obs == ObservationKind::Root {
                return Err(ModelError::InvalidTree("ROOT below the root".into()));
            }
        }
        let dt = first.t - self.t;
        if dt.signum() <= 0 {
            return Err(ModelError::InvalidTree(format!(
                "child time {} does not follow {}",
                first.t, self.t
            )));
        }
        if (first.x - self.x).abs() > dt {
            return Err(ModelError::InvalidTree(format!(
                "speed limit exceeded between t={} and t={}",
                self.t, first.t
            )));
        }
        match self.children.len() {
            1 => {}
            2 => {
                let mut kinds = [self.children[0].obs, self.children[1].obs];
                kinds.sort();
                if kinds != [ObservationKind::Found, ObservationKind::Absent] {
                    return Err(ModelError::InvalidTree(format!(
                        "branching at t={} must be on FOUND/ABSENT",
                        first.t
                    )));
                }
            }
            n => {
                return Err(ModelError::InvalidTree(format!(
                    "{n} children at t={}; at most a FOUND/ABSENT pair is allowed",
                    first.t
                )))
            }
        }
        self.children.iter().try_for_each(|c| c.validate_below())
    }

    /// Child to follow given whether a gift lies at the child's position.
    pub fn select_child(&self, gift_here: bool) -> Option<&DecisionNode> {
        self.children.iter().find(|c| c.obs.matches(gift_here))
    }

    /// Same tree with every time and position multiplied by `factor`.
    pub fn scaled(&self, factor: Rational) -> DecisionNode {
        DecisionNode {
            t: self.t * factor,
            obs: self.obs,
            x: self.x * factor,
            dir: self.dir,
            children: self.children.iter().map(|c| c.scaled(factor)).collect(),
        }
    }

    pub fn mirrored(&self) -> DecisionNode {
        DecisionNode {
            t: self.t,
            obs: self.obs,
            x: -self.x,
            dir: self.dir.reversed(),
            children: self.children.iter().map(|c| c.mirrored()).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(|c| c.node_count()).sum::<usize>()
    }
}

/// How a player's behaviour is written down.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlayerStrategy {
    /// Observation-driven decision tree in the player's own frame.
    Tree(DecisionNode),
    /// One explicit path per scenario (index 0 is scenario 1). Nothing
    /// guarantees these respect what the player can know; see
    /// `check_consistency`.
    Scenarios { scenarios: Vec<PathPlan> },
}

impl PlayerStrategy {
    pub fn fixed(plan: &PathPlan, drop_time: Option<Rational>) -> Self {
        PlayerStrategy::Tree(DecisionNode::chain(plan, drop_time))
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            PlayerStrategy::Tree(root) => root.validate(),
            PlayerStrategy::Scenarios { scenarios } => {
                if scenarios.len() != 4 {
                    return Err(ModelError::InvalidTree(format!(
                        "expected 4 scenario paths, got {}",
                        scenarios.len()
                    )));
                }
                scenarios.iter().try_for_each(|p| p.validate())
            }
        }
    }

    pub fn scaled(&self, factor: Rational) -> Self {
        match self {
            PlayerStrategy::Tree(root) => PlayerStrategy::Tree(root.scaled(factor)),
            PlayerStrategy::Scenarios { scenarios } => PlayerStrategy::Scenarios {
                scenarios: scenarios.iter().map(|p| p.scaled(factor)).collect(),
            },
        }
    }

    pub fn mirrored(&self) -> Self {
        match self {
            PlayerStrategy::Tree(root) => PlayerStrategy::Tree(root.mirrored()),
            PlayerStrategy::Scenarios { scenarios } => PlayerStrategy::Scenarios {
                scenarios: scenarios.iter().map(|p| p.mirrored()).collect(),
            },
        }
    }
}

/// Strategies of both players together with their drop times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyBundle {
    #[serde(default)]
    pub drop_i: Option<Rational>,
    #[serde(default)]
    pub drop_ii: Option<Rational>,
    pub player_i: PlayerStrategy,
    pub player_ii: PlayerStrategy,
}

impl StrategyBundle {
    /// Non-adaptive bundle from two paths.
    pub fn fixed(
        f: &PathPlan,
        g: &PathPlan,
        drop_i: Option<Rational>,
        drop_ii: Option<Rational>,
    ) -> Self {
        StrategyBundle {
            drop_i,
            drop_ii,
            player_i: PlayerStrategy::fixed(f, drop_i),
            player_ii: PlayerStrategy::fixed(g, drop_ii),
        }
    }

    /// Non-adaptive bundle from turning-point lists, both players starting
    /// forward.
    pub fn from_turns(
        f_turns: &[Rational],
        g_turns: &[Rational],
        drop_i: Option<Rational>,
        drop_ii: Option<Rational>,
    ) -> Result<Self, ModelError> {
        let f = PathPlan::from_turning_points(f_turns, Direction::Forward)?;
        let g = PathPlan::from_turning_points(g_turns, Direction::Forward)?;
        Ok(Self::fixed(&f, &g, drop_i, drop_ii))
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.player_i.validate()?;
        self.player_ii.validate()
    }

    pub fn scaled(&self, factor: Rational) -> Self {
        StrategyBundle {
            drop_i: self.drop_i.map(|t| t * factor),
            drop_ii: self.drop_ii.map(|t| t * factor),
            player_i: self.player_i.scaled(factor),
            player_ii: self.player_ii.scaled(factor),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bundle serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}
