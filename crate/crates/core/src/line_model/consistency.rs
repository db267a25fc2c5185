use super::evaluate::{realize_all, scenario_end_time, RealizedScenario};
use super::game::{GameInstance, Player, ScenarioId};
use super::path::{first_root, PathPlan};
use crate::error::ModelError;
use crate::rational::Rational;

/// Two scenarios in which a player moved differently before anything it
/// observed could tell them apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub player: Player,
    pub scenarios: (ScenarioId, ScenarioId),
    /// Last time the two paths agree.
    pub time: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsistencyVerdict {
    Consistent,
    Violation(Violation),
}

impl ConsistencyVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, ConsistencyVerdict::Consistent)
    }
}

/// Where the other player's gift lies in scenario `r`, in `player`'s own
/// coordinates.
fn foreign_gift(instance: &GameInstance, player: Player, r: &RealizedScenario) -> Option<Rational> {
    let d = instance.distance;
    match player {
        Player::I => {
            let tau = instance.drop_ii.filter(|_| instance.kind.player_ii_has_gift())?;
            Some(r.frame.place(d, r.g.position(tau)))
        }
        Player::II => {
            let tau = instance.drop_i.filter(|_| instance.kind.player_i_has_gift())?;
            Some(r.frame.own_coordinate(d, r.f.position(tau)))
        }
    }
}

fn own_path(player: Player, r: &RealizedScenario) -> &PathPlan {
    match player {
        Player::I => &r.f,
        Player::II => &r.g,
    }
}

/// Checks that each player's realised behaviour depends only on what it
/// has observed. Scenarios end at meetings, so the only observation that can
/// separate two live scenarios is whether the other player's gift lies at
/// the player's own location.
pub fn check_consistency(
    instance: &GameInstance,
    bundle: &super::strategy::StrategyBundle,
) -> Result<ConsistencyVerdict, ModelError> {
    let realized = realize_all(instance, bundle)?;
    Ok(check_realized(instance, &realized))
}

pub(crate) fn check_realized(instance: &GameInstance, realized: &[RealizedScenario]) -> ConsistencyVerdict {
    let horizon = instance.horizon;
    let ends: Vec<Rational> = realized
        .iter()
        .map(|r| scenario_end_time(instance, r.frame, &r.f, &r.g).unwrap_or(horizon))
        .collect();
    for player in [Player::I, Player::II] {
        let other_drop = match player {
            Player::I => instance.drop_ii,
            Player::II => instance.drop_i,
        };
        for a in 0..realized.len() {
            for b in a + 1..realized.len() {
                let (ra, rb) = (&realized[a], &realized[b]);
                let limit = ends[a].min(ends[b]);
                let Some(split) = own_path(player, ra).first_difference(own_path(player, rb), limit) else {
                    continue;
                };
                if split >= limit {
                    continue;
                }
                let path = own_path(player, ra);
                let told_apart = match (foreign_gift(instance, player, ra), foreign_gift(instance, player, rb)) {
                    (Some(ga), Some(gb)) if ga != gb => {
                        let tau = other_drop.expect("gift implies a drop time");
                        let hit = |gift: Rational| {
                            first_root(tau, split, path.breakpoints_between(tau, split), |t| {
                                path.position(t) - gift
                            })
                        };
                        match (hit(ga), hit(gb)) {
                            (Some(x), Some(y)) => Some(x.min(y)),
                            (x, y) => x.or(y),
                        }
                    }
                    _ => None,
                };
                if told_apart.is_none() {
                    return ConsistencyVerdict::Violation(Violation {
                        player,
                        scenarios: (ra.frame.id, rb.frame.id),
                        time: split,
                    });
                }
            }
        }
    }
    ConsistencyVerdict::Consistent
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line_model::fixtures;
    use crate::line_model::game::GameKind;
    use crate::line_model::path::Direction;
    use crate::line_model::strategy::{PlayerStrategy, StrategyBundle};
    use crate::rational::q;

    fn turns(ts: &[i128]) -> PathPlan {
        let ts: Vec<Rational> = ts.iter().map(|&t| q(t, 1)).collect();
        PathPlan::from_turning_points(&ts, Direction::Forward).unwrap()
    }

    #[test]
    fn divergence_point() {
        let h = q(64, 1);
        let back = PathPlan::straight(Direction::Backward);
        assert_eq!(turns(&[16]).first_difference(&turns(&[16]), h), None);
        assert_eq!(turns(&[16]).first_difference(&turns(&[20]), h), Some(q(16, 1)));
        assert_eq!(turns(&[16]).first_difference(&back, h), Some(q(0, 1)));
        assert_eq!(turns(&[16]).first_difference(&turns(&[20]), q(10, 1)), None);
    }

    #[test]
    fn fixtures_are_consistent() {
        let d = q(16, 1);
        let g1 = GameInstance::one_gift(d, q(4, 1)).unwrap();
        assert!(check_consistency(&g1, &fixtures::one_gift(d)).unwrap().is_consistent());
        let and = GameInstance::two_gifts(GameKind::TwoGiftsAnd, d, q(0, 1), q(0, 1)).unwrap();
        let b = fixtures::two_gifts_and_pair1(d);
        assert!(check_consistency(&and, &b).unwrap().is_consistent());
    }

    #[test]
    fn scenario_paths_without_information_are_rejected() {
        let d = q(16, 1);
        let inst = GameInstance::no_gift(d).unwrap();
        let mut paths = vec![turns(&[16]); 4];
        paths[2] = turns(&[10]);
        let bundle = StrategyBundle {
            drop_i: None,
            drop_ii: None,
            player_i: PlayerStrategy::Scenarios { scenarios: paths },
            player_ii: PlayerStrategy::fixed(&turns(&[8, 16, 32]), None),
        };
        match check_consistency(&inst, &bundle).unwrap() {
            ConsistencyVerdict::Violation(v) => {
                assert_eq!(v.player, Player::I);
                assert_eq!(v.time, q(10, 1));
            }
            other => panic!("expected a violation, got {other:?}"),
        }
        assert!(matches!(
            crate::line_model::evaluate_bundle(&inst, &bundle),
            Err(ModelError::Inconsistent { .. })
        ));
    }

    #[test]
    fn divergence_after_a_find_is_allowed() {
        // I learns the scenario class at t = 16 in pair 1 and acts on it
        let d = q(16, 1);
        let inst = GameInstance::two_gifts(GameKind::TwoGiftsAnd, d, q(0, 1), q(0, 1)).unwrap();
        let realized = realize_all(&inst, &fixtures::two_gifts_and_pair1(d)).unwrap();
        let paths: Vec<PathPlan> = realized.iter().map(|r| r.f.clone()).collect();
        let bundle = StrategyBundle {
            drop_i: Some(q(0, 1)),
            drop_ii: Some(q(0, 1)),
            player_i: PlayerStrategy::Scenarios { scenarios: paths.clone() },
            player_ii: fixtures::two_gifts_and_pair1(d).player_ii,
        };
        assert!(check_consistency(&inst, &bundle).unwrap().is_consistent());
        // diverging one unit earlier is not
        let mut early = paths;
        early[3] = turns(&[15]);
        let bundle = StrategyBundle {
            player_i: PlayerStrategy::Scenarios { scenarios: early },
            ..bundle
        };
        assert!(!check_consistency(&inst, &bundle).unwrap().is_consistent());
    }
}
