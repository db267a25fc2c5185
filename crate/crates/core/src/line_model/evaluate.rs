use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::consistency::{check_consistency, ConsistencyVerdict};
use super::game::{GameInstance, GameKind, Player, ScenarioFrame};
use super::path::{first_root, PathPlan, Waypoint};
use super::strategy::{DecisionNode, Observation, ObservationKind, PlayerStrategy, StrategyBundle};
use crate::error::ModelError;
use crate::rational::Rational;

fn check_time(instance: &GameInstance, t: Rational) -> Result<(), ModelError> {
    if t.signum() < 0 || t > instance.horizon {
        return Err(ModelError::TimeOutOfDomain {
            t,
            horizon: instance.horizon,
        });
    }
    Ok(())
}

/// Absolute position `sigma D + epsilon g(t)` of II's agent in `frame`.
pub fn agent_position(
    instance: &GameInstance,
    frame: ScenarioFrame,
    g: &PathPlan,
    t: Rational,
) -> Result<Rational, ModelError> {
    check_time(instance, t)?;
    Ok(frame.place(instance.distance, g.position(t)))
}

/// Whose gift is being located.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GiftOwner {
    PlayerI,
    Agent(ScenarioFrame),
}

/// Absolute resting place of a gift: Player I's at `f(tau1)`, an agent's at
/// `a(tau2)`. `path` is the dropper's realised path in its own frame.
pub fn gift_position(
    instance: &GameInstance,
    owner: GiftOwner,
    path: &PathPlan,
) -> Result<Rational, ModelError> {
    match owner {
        GiftOwner::PlayerI => {
            let tau = instance.drop_i.ok_or(ModelError::NoGift(Player::I))?;
            check_time(instance, tau)?;
            Ok(path.position(tau))
        }
        GiftOwner::Agent(frame) => {
            let tau = instance.drop_ii.ok_or(ModelError::NoGift(Player::II))?;
            agent_position(instance, frame, path, tau)
        }
    }
}

/// Separate ending events of one scenario, before the game's rule combines
/// them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioEvents {
    pub meeting: Option<Rational>,
    /// Player I first stands on the agent's gift.
    pub i_finds: Option<Rational>,
    /// The agent first stands on Player I's gift.
    pub agent_finds: Option<Rational>,
}

impl ScenarioEvents {
    pub fn end_time(&self, kind: GameKind) -> Option<Rational> {
        let min = |a: Option<Rational>, b: Option<Rational>| match (a, b) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        match kind {
            GameKind::NoGift => self.meeting,
            GameKind::OneGift => min(self.meeting, self.i_finds),
            GameKind::TwoGiftsOr => min(min(self.meeting, self.i_finds), self.agent_finds),
            GameKind::TwoGiftsAnd => {
                let both = match (self.i_finds, self.agent_finds) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    _ => None,
                };
                min(self.meeting, both)
            }
        }
    }
}

pub fn scenario_events(
    instance: &GameInstance,
    frame: ScenarioFrame,
    f: &PathPlan,
    g: &PathPlan,
) -> ScenarioEvents {
    let horizon = instance.horizon;
    let d = instance.distance;
    let zero = Rational::ZERO;
    let all_breaks = || {
        f.breakpoints_between(zero, horizon)
            .chain(g.breakpoints_between(zero, horizon))
    };
    let meeting = first_root(zero, horizon, all_breaks(), |t| {
        f.position(t) - frame.place(d, g.position(t))
    });
    let i_finds = match instance.drop_ii {
        Some(tau) if instance.kind.player_ii_has_gift() => {
            let gift = frame.place(d, g.position(tau));
            first_root(tau, horizon, f.breakpoints_between(tau, horizon), |t| {
                f.position(t) - gift
            })
        }
        _ => None,
    };
    let agent_finds = match instance.drop_i {
        Some(tau) if instance.kind.player_i_has_gift() => {
            let gift = f.position(tau);
            first_root(tau, horizon, g.breakpoints_between(tau, horizon), |t| {
                frame.place(d, g.position(t)) - gift
            })
        }
        _ => None,
    };
    ScenarioEvents {
        meeting,
        i_finds,
        agent_finds,
    }
}

/// Ending time of one scenario under the game's rule, `None` when nothing
/// ends it by the horizon. `f` is I's realised path, `g` II's realised path
/// in its own frame.
pub fn scenario_end_time(
    instance: &GameInstance,
    frame: ScenarioFrame,
    f: &PathPlan,
    g: &PathPlan,
) -> Option<Rational> {
    scenario_events(instance, frame, f, g).end_time(instance.kind)
}

/// Paths and observations of both players in one scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizedScenario {
    pub frame: ScenarioFrame,
    pub f: PathPlan,
    pub g: PathPlan,
    pub observations_i: Vec<Observation>,
    pub observations_ii: Vec<Observation>,
}

enum Cursor<'a> {
    Fixed(&'a PathPlan),
    Tree {
        node: &'a DecisionNode,
        path: PathPlan,
        stopped: bool,
    },
}

impl<'a> Cursor<'a> {
    fn new(strategy: &'a PlayerStrategy, frame: ScenarioFrame) -> Self {
        match strategy {
            PlayerStrategy::Tree(root) => Cursor::Tree {
                node: root,
                path: PathPlan::origin(root.dir),
                stopped: false,
            },
            PlayerStrategy::Scenarios { scenarios } => Cursor::Fixed(&scenarios[frame.index()]),
        }
    }

    fn next_decision(&self) -> Option<Rational> {
        match self {
            Cursor::Tree {
                node,
                stopped: false,
                ..
            } => node.children.first().map(|c| c.t),
            _ => None,
        }
    }

    /// Own-frame position at `t`, valid up to the next decision time.
    fn position(&self, t: Rational) -> Rational {
        match self {
            Cursor::Fixed(p) => p.position(t),
            Cursor::Tree {
                node,
                path,
                stopped,
            } => {
                if t <= node.t {
                    return path.position(t);
                }
                match node.children.first() {
                    Some(c) if !stopped => node.x + (c.x - node.x) * (t - node.t) / (c.t - node.t),
                    _ => node.x + node.dir.velocity() * (t - node.t),
                }
            }
        }
    }

    fn advance(&mut self, gift_here: bool) -> Option<ObservationKind> {
        let Cursor::Tree {
            node,
            path,
            stopped,
        } = self
        else {
            return None;
        };
        match node.select_child(gift_here) {
            Some(child) => {
                path.push_unchecked(Waypoint::new(child.t, child.x));
                path.set_terminal(child.dir);
                *node = child;
                Some(child.obs)
            }
            None => {
                *stopped = true;
                None
            }
        }
    }

    fn finish(self) -> PathPlan {
        match self {
            Cursor::Fixed(p) => p.clone(),
            Cursor::Tree { node, mut path, .. } => {
                path.set_terminal(node.dir);
                path
            }
        }
    }
}

/// Walks both strategies through one scenario, feeding each player what it
/// observes at its decision points.
pub fn realize_scenario(
    instance: &GameInstance,
    bundle: &StrategyBundle,
    frame: ScenarioFrame,
) -> Result<RealizedScenario, ModelError> {
    let d = instance.distance;
    let mut ci = Cursor::new(&bundle.player_i, frame);
    let mut cii = Cursor::new(&bundle.player_ii, frame);
    let mut obs_i = Vec::new();
    let mut obs_ii = Vec::new();
    let drop_i = instance.drop_i.filter(|_| instance.kind.player_i_has_gift());
    let drop_ii = instance.drop_ii.filter(|_| instance.kind.player_ii_has_gift());
    loop {
        let next = match (ci.next_decision(), cii.next_decision()) {
            (Some(a), Some(b)) => a.min(b),
            (a, None) => match a {
                Some(a) => a,
                None => break,
            },
            (None, Some(b)) => b,
        };
        if next > instance.horizon {
            break;
        }
        let x_i = ci.position(next);
        let x_agent = frame.place(d, cii.position(next));
        let met = x_i == x_agent;
        // gifts are fixed once dropped, so these only look at the past
        let agent_gift = drop_ii
            .filter(|tau| *tau <= next)
            .map(|tau| frame.place(d, cii.position(tau)));
        let i_gift = drop_i.filter(|tau| *tau <= next).map(|tau| ci.position(tau));
        let i_sees_gift = agent_gift == Some(x_i);
        let ii_sees_gift = i_gift == Some(x_agent);
        let label = |met: bool, seen: bool, own_drop: Option<Rational>| {
            if met {
                ObservationKind::Met
            } else if seen {
                ObservationKind::Found
            } else if own_drop == Some(next) {
                ObservationKind::Drop
            } else {
                ObservationKind::Absent
            }
        };
        if ci.next_decision() == Some(next) {
            ci.advance(i_sees_gift);
            obs_i.push(Observation {
                time: next,
                kind: label(met, i_sees_gift, drop_i),
                location: x_i,
            });
        }
        if cii.next_decision() == Some(next) {
            cii.advance(ii_sees_gift);
            obs_ii.push(Observation {
                time: next,
                kind: label(met, ii_sees_gift, drop_ii),
                location: x_agent,
            });
        }
    }
    Ok(RealizedScenario {
        frame,
        f: ci.finish(),
        g: cii.finish(),
        observations_i: obs_i,
        observations_ii: obs_ii,
    })
}

pub fn realize_all(
    instance: &GameInstance,
    bundle: &StrategyBundle,
) -> Result<Vec<RealizedScenario>, ModelError> {
    instance.validate()?;
    bundle.validate()?;
    ScenarioFrame::ALL
        .iter()
        .map(|&frame| realize_scenario(instance, bundle, frame))
        .collect()
}

/// Four scenario end times and their mean.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    /// Indexed by scenario (entry 0 is scenario 1).
    pub end_times: [Option<Rational>; 4],
    /// Sorted ascending, unresolved entries last.
    pub ordered_times: [Option<Rational>; 4],
    pub value: Option<Rational>,
}

impl Outcome {
    pub fn from_end_times(end_times: [Option<Rational>; 4]) -> Self {
        let mut ordered_times = end_times;
        ordered_times.sort_by(|a, b| match (a, b) {
            (Some(a), Some(b)) => a.cmp(b),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        });
        let value = end_times
            .iter()
            .copied()
            .sum::<Option<Rational>>()
            .map(|s| s / Rational::from(4));
        Outcome {
            end_times,
            ordered_times,
            value,
        }
    }

    pub fn is_resolved(&self) -> bool {
        self.value.is_some()
    }
}

fn time_label(t: &Option<Rational>) -> String {
    match t {
        Some(t) => t.to_string(),
        None => "unresolved".to_string(),
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Outcome", 3)?;
        let ends: Vec<String> = self.end_times.iter().map(time_label).collect();
        let ordered: Vec<String> = self.ordered_times.iter().map(time_label).collect();
        s.serialize_field("end_times", &ends)?;
        s.serialize_field("ordered_times", &ordered)?;
        s.serialize_field("value", &time_label(&self.value))?;
        s.end()
    }
}

/// Realises the bundle in all four scenarios and returns the ending times.
/// Rejects bundles that act on information the player cannot have.
pub fn evaluate_bundle(
    instance: &GameInstance,
    bundle: &StrategyBundle,
) -> Result<Outcome, ModelError> {
    let realized = realize_all(instance, bundle)?;
    if let ConsistencyVerdict::Violation(v) = check_consistency(instance, bundle)? {
        return Err(ModelError::Inconsistent {
            player: v.player,
            first: v.scenarios.0,
            second: v.scenarios.1,
            time: v.time,
        });
    }
    Ok(outcome_of(instance, &realized))
}

pub(crate) fn outcome_of(instance: &GameInstance, realized: &[RealizedScenario]) -> Outcome {
    let mut ends = [None; 4];
    for r in realized {
        ends[r.frame.index()] = scenario_end_time(instance, r.frame, &r.f, &r.g);
    }
    Outcome::from_end_times(ends)
}

/// Convenience for non-adaptive pairs: I follows `f`, II follows `g`.
pub fn evaluate_paths(instance: &GameInstance, f: &PathPlan, g: &PathPlan) -> Outcome {
    let mut ends = [None; 4];
    for frame in ScenarioFrame::ALL {
        ends[frame.index()] = scenario_end_time(instance, frame, f, g);
    }
    Outcome::from_end_times(ends)
}
