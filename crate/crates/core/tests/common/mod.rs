#![allow(dead_code)]

use rendezvous_core::line_model::{
    check_consistency, evaluate_bundle, ConsistencyVerdict, Direction, GameInstance, GameKind, PathPlan,
    PlayerStrategy, StrategyBundle, Waypoint,
};
use rendezvous_core::{q, ModelError, Rational};

pub fn turns(ts: &[i128]) -> PathPlan {
    let ts: Vec<Rational> = ts.iter().map(|&t| q(t, 1)).collect();
    PathPlan::from_turning_points(&ts, Direction::Forward).unwrap()
}

pub fn dec(s: &str) -> Rational {
    s.parse().unwrap()
}

/// Brute force over unconditional bang-bang paths with integer turn times,
/// simulated tick by tick on integers. With an even `d` and integer drop
/// times, positions stay integral at integer times and the gap between I and
/// the agent stays even, so every meeting and find lands on a tick.
pub struct GridOracle {
    pub kind: GameKind,
    pub d: i64,
    pub drop_i: Option<i64>,
    pub drop_ii: Option<i64>,
    pub horizon: i64,
}

fn path_positions(initial: i64, turns: &[i64], horizon: i64) -> Vec<i64> {
    let mut out = Vec::with_capacity(horizon as usize + 1);
    let (mut x, mut v) = (0, initial);
    for t in 0..=horizon {
        if turns.contains(&t) {
            v = -v;
        }
        out.push(x);
        x += v;
    }
    out
}

/// Every subset of `points` of size at most `max_turns`, both initial
/// directions.
pub fn bang_bang_paths(points: &[i64], max_turns: usize, horizon: i64) -> Vec<(i64, Vec<i64>, Vec<i64>)> {
    let mut subsets: Vec<Vec<i64>> = vec![vec![]];
    for &p in points {
        let grown: Vec<Vec<i64>> = subsets
            .iter()
            .filter(|s| s.len() < max_turns)
            .map(|s| {
                let mut s = s.clone();
                s.push(p);
                s
            })
            .collect();
        subsets.extend(grown);
    }
    let mut out = Vec::new();
    for initial in [1, -1] {
        for s in &subsets {
            out.push((initial, s.clone(), path_positions(initial, s, horizon)));
        }
    }
    out
}

impl GridOracle {
    /// Sum of the four end times, or `None` if some scenario never ends.
    pub fn total(&self, f: &[i64], g: &[i64]) -> Option<i64> {
        let mut total = 0;
        for (sigma, eps) in [(1, -1), (-1, -1), (-1, 1), (1, 1)] {
            let a = |t: usize| sigma * self.d + eps * g[t];
            let first = |pred: &dyn Fn(usize) -> bool, from: i64| {
                (from.max(0) as usize..=self.horizon as usize).find(|&t| pred(t)).map(|t| t as i64)
            };
            let meet = first(&|t| f[t] == a(t), 0);
            let i_find = self.drop_ii.and_then(|tau| {
                let gift = a(tau as usize);
                first(&|t| f[t] == gift, tau)
            });
            let a_find = self.drop_i.and_then(|tau| {
                let gift = f[tau as usize];
                first(&|t| a(t) == gift, tau)
            });
            let min = |x: Option<i64>, y: Option<i64>| match (x, y) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            };
            let end = match self.kind {
                GameKind::NoGift => meet,
                GameKind::OneGift => min(meet, i_find),
                GameKind::TwoGiftsOr => min(meet, min(i_find, a_find)),
                GameKind::TwoGiftsAnd => min(meet, i_find.zip(a_find).map(|(x, y)| x.max(y))),
            };
            total += end?;
        }
        Some(total)
    }

    /// Best unconditional pair with turns on `points`, as a value.
    pub fn best(&self, points: &[i64], max_turns: usize) -> (Rational, Vec<i64>, Vec<i64>) {
        let paths = bang_bang_paths(points, max_turns, self.horizon);
        let mut best: Option<(i64, Vec<i64>, Vec<i64>)> = None;
        for (fi, ft, fp) in &paths {
            for (gi, gt, gp) in &paths {
                let Some(total) = self.total(fp, gp) else { continue };
                if best.as_ref().is_none_or(|b| total < b.0) {
                    let tag = |i: &i64, t: &Vec<i64>| std::iter::once(*i).chain(t.iter().copied()).collect();
                    best = Some((total, tag(fi, ft), tag(gi, gt)));
                }
            }
        }
        let (total, f, g) = best.expect("some pair resolves every scenario");
        (q(total as i128, 4), f, g)
    }
}

/// Scenario-form bundle where one player walks `base` in every scenario
/// except `odd`, where it stands still from `diverge` for one time unit.
/// Nothing is observable before `diverge` when it precedes both half the
/// distance and the other player's drop.
pub fn diverging_bundle(
    instance: &GameInstance,
    player_i_diverges: bool,
    base: &PathPlan,
    other: &PathPlan,
    odd: usize,
    diverge: Rational,
) -> StrategyBundle {
    let mut waypoints: Vec<Waypoint> = base.waypoints().iter().copied().filter(|w| w.t < diverge).collect();
    let x = base.position(diverge);
    waypoints.push(Waypoint::new(diverge, x));
    waypoints.push(Waypoint::new(diverge + Rational::ONE, x));
    let variant = PathPlan::new(waypoints, base.terminal_direction()).unwrap();
    let mut scenario_paths = vec![base.clone(); 4];
    scenario_paths[odd] = variant;
    let own = PlayerStrategy::Scenarios { scenarios: scenario_paths };
    let (player_i, player_ii) = if player_i_diverges {
        (own, PlayerStrategy::fixed(other, instance.drop_ii))
    } else {
        (PlayerStrategy::fixed(other, instance.drop_i), own)
    };
    StrategyBundle {
        drop_i: instance.drop_i,
        drop_ii: instance.drop_ii,
        player_i,
        player_ii,
    }
}

/// True when both the checker and the evaluator reject `bundle`.
pub fn rejected(instance: &GameInstance, bundle: &StrategyBundle) -> bool {
    let verdict = check_consistency(instance, bundle).unwrap();
    matches!(verdict, ConsistencyVerdict::Violation(_))
        && matches!(evaluate_bundle(instance, bundle), Err(ModelError::Inconsistent { .. }))
}

/// End times listed by scenario, as integers where possible.
pub fn by_scenario(xs: [i128; 4]) -> [Option<Rational>; 4] {
    xs.map(|x| Some(q(x, 1)))
}
