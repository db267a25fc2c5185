//! Known strategy pairs, written for an arbitrary initial distance `d`.

use super::path::{Direction, PathPlan};
use super::strategy::{DecisionNode, ObservationKind, PlayerStrategy, StrategyBundle};
use crate::rational::Rational;

fn frac(d: Rational, num: i128, den: i128) -> Rational {
    d * Rational::new(num, den)
}

fn turns(ts: &[Rational]) -> PathPlan {
    PathPlan::from_turning_points(ts, Direction::Forward).expect("fixture turns increase")
}

/// No gifts: `f = [D]`, `g = [D/2, D, 2D]`, expected time `13D/8`.
pub fn no_gift(d: Rational) -> StrategyBundle {
    let f = turns(&[d]);
    let g = turns(&[frac(d, 1, 2), d, frac(d, 2, 1)]);
    StrategyBundle::fixed(&f, &g, None, None)
}

/// One gift dropped at `D/4`: `f = [3D/4]`, `g = [D/4; D/4, 3D/2]`, expected
/// time `21D/16`.
pub fn one_gift(d: Rational) -> StrategyBundle {
    let tau = frac(d, 1, 4);
    let f = turns(&[frac(d, 3, 4)]);
    let g = turns(&[tau, frac(d, 3, 2)]);
    StrategyBundle::fixed(&f, &g, None, Some(tau))
}

/// One gift dropped at `z <= D/4`: `f = [D - z]`, `g = [z; z]`, expected
/// time `3D/2 - 3z/4`.
pub fn one_gift_early_drop(d: Rational, z: Rational) -> StrategyBundle {
    let f = turns(&[d - z]);
    let g = if z.is_zero() {
        PathPlan::straight(Direction::Backward)
    } else {
        turns(&[z])
    };
    StrategyBundle::fixed(&f, &g, None, Some(z))
}

/// Two gifts, either find ends: both drop at `D/2` and turn there; expected
/// time `5D/4`.
pub fn two_gifts_or(d: Rational) -> StrategyBundle {
    let half = frac(d, 1, 2);
    let p = turns(&[half]);
    StrategyBundle::fixed(&p, &p, Some(half), Some(half))
}

/// Node at `t` heading `dir`, with position fixed by the parent's heading.
fn node(t: Rational, obs: ObservationKind, x: Rational, dir: Direction) -> DecisionNode {
    DecisionNode::new(t, obs, x, dir)
}

/// Two players heading forward from the root, checking for a gift at time
/// `t_check` and position `x_check`; FOUND keeps `on_found`, ABSENT takes
/// the other direction.
fn branch(t_check: Rational, x_check: Rational, on_found: Direction) -> Vec<DecisionNode> {
    vec![
        node(t_check, ObservationKind::Found, x_check, on_found),
        node(t_check, ObservationKind::Absent, x_check, on_found.reversed()),
    ]
}

/// Two gifts, both needed, dropped at time 0. Each player walks forward
/// for `D` and keeps going only if the other's gift is there. Expected time
/// `3D/2`.
pub fn two_gifts_and_pair1(d: Rational) -> StrategyBundle {
    let zero = Rational::ZERO;
    let tree = DecisionNode::new(zero, ObservationKind::Root, zero, Direction::Forward)
        .with_children(branch(d, d, Direction::Forward));
    StrategyBundle {
        drop_i: Some(zero),
        drop_ii: Some(zero),
        player_i: PlayerStrategy::Tree(tree.clone()),
        player_ii: PlayerStrategy::Tree(tree),
    }
}

/// Two gifts, both needed, II drops at `D/4`, I at any `x`. I checks at
/// `3D/4`; II follows `[D/4; D/4, 3D/4, 7D/4]`. Expected time `3D/2`.
pub fn two_gifts_and_pair2(d: Rational, x: Rational) -> StrategyBundle {
    let zero = Rational::ZERO;
    let check = frac(d, 3, 4);
    let tree_i = DecisionNode::new(zero, ObservationKind::Root, zero, Direction::Forward)
        .with_children(branch(check, check, Direction::Forward));
    let tau = frac(d, 1, 4);
    let g = turns(&[tau, check, frac(d, 7, 4)]);
    StrategyBundle {
        drop_i: Some(x),
        drop_ii: Some(tau),
        player_i: PlayerStrategy::Tree(tree_i),
        player_ii: PlayerStrategy::fixed(&g, Some(tau)),
    }
}

/// Two gifts, both needed, both dropped at `D/2`. Each player turns at its
/// drop and, at `3D/2`, keeps going back only if the other's gift is there.
/// Expected time `3D/2`.
pub fn two_gifts_and_pair3(d: Rational) -> StrategyBundle {
    let zero = Rational::ZERO;
    let half = frac(d, 1, 2);
    let check = frac(d, 3, 2);
    let tree = DecisionNode::new(zero, ObservationKind::Root, zero, Direction::Forward).with_children(vec![
        node(half, ObservationKind::Drop, half, Direction::Backward)
            .with_children(branch(check, -half, Direction::Backward)),
    ]);
    StrategyBundle {
        drop_i: Some(half),
        drop_ii: Some(half),
        player_i: PlayerStrategy::Tree(tree.clone()),
        player_ii: PlayerStrategy::Tree(tree),
    }
}
