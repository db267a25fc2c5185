use serde::{Deserialize, Serialize};

use super::state::{branch_slots, for_each_combo, SolverState, SplitSide, NO_NODE};
use crate::error::SolveError;
use crate::line_model::{
    evaluate_bundle, fixtures, DecisionNode, Direction, GameInstance, GameKind, ObservationKind, Player,
    PlayerStrategy, StrategyBundle,
};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveOptions {
    /// Return every optimal bundle instead of one.
    pub collect_all: bool,
    /// Fix Player I's initial heading to forward. Mirroring I's path maps
    /// scenarios 1, 2 onto 3, 4 and keeps the value, so this only trims
    /// mirror images.
    pub symmetry: bool,
    /// Start without an incumbent instead of the best known closed-form
    /// bundle. Slower; used to cross-check the bound.
    pub unseeded: bool,
}

/// Optimum for one drop schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub instance: GameInstance,
    pub value: Rational,
    pub optimal_bundles: Vec<StrategyBundle>,
    pub node_count: u64,
}

impl SolveResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serialization cannot fail")
    }
}

#[derive(Debug, Clone, Copy)]
struct ArenaNode {
    parent: u32,
    player: Player,
    t: i128,
    x: i128,
    obs: ObservationKind,
    dir: Direction,
}

struct Search {
    options: SolveOptions,
    drop_i: Option<Rational>,
    drop_ii: Option<Rational>,
    arena: Vec<ArenaNode>,
    /// Best sum of the four end times so far, in units.
    incumbent: Option<i128>,
    best: Vec<StrategyBundle>,
    node_count: u64,
    /// Smallest doubled lower bound among branches cut at the horizon.
    cut_at_horizon: Option<i128>,
}

/// Solves with default options, returning every optimal bundle.
pub fn solve_fixed_drops(instance: &GameInstance) -> Result<SolveResult, SolveError> {
    solve_with(
        instance,
        SolveOptions {
            collect_all: true,
            ..SolveOptions::default()
        },
    )
}

/// Value only, with a single witness bundle. Used by mesh sweeps.
pub fn solve_value(instance: &GameInstance) -> Result<SolveResult, SolveError> {
    solve_with(instance, SolveOptions::default())
}

pub fn solve_with(instance: &GameInstance, options: SolveOptions) -> Result<SolveResult, SolveError> {
    let root = SolverState::initial(instance)?;
    let scale = root.scale;
    let (seed_value, seed_bundle) = if options.unseeded { (None, None) } else { seed(instance) };
    let mut search = Search {
        options,
        drop_i: instance.drop_i,
        drop_ii: instance.drop_ii,
        arena: Vec::new(),
        incumbent: match seed_value {
            Some(v) => Some(scale.units(v * Rational::from(4))?),
            None => None,
        },
        best: Vec::new(),
        node_count: 0,
        cut_at_horizon: None,
    };
    search.explore(&root)?;

    let Some(total) = search.incumbent else {
        return Err(SolveError::NoResolvedStrategy(instance.horizon));
    };
    if let Some(cut) = search.cut_at_horizon {
        if cut < 2 * total {
            return Err(SolveError::HorizonTooSmall {
                horizon: instance.horizon,
                lower_bound: scale.mean_of_sum(cut) / Rational::from(2),
            });
        }
    }
    let mut bundles = search.best;
    if bundles.is_empty() {
        bundles.push(seed_bundle.expect("an incumbent without a search hit comes from the seed"));
    }
    let mut keyed: Vec<(String, StrategyBundle)> = bundles.into_iter().map(|b| (b.to_json(), b)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    Ok(SolveResult {
        instance: instance.clone(),
        value: scale.mean_of_sum(total),
        optimal_bundles: keyed.into_iter().map(|(_, b)| b).collect(),
        node_count: search.node_count,
    })
}

/// Best of the known closed-form bundles, evaluated at this instance's drop
/// times. The no-gift pair always works since a meeting ends every game.
fn seed(instance: &GameInstance) -> (Option<Rational>, Option<StrategyBundle>) {
    let d = instance.distance;
    let with_drops = |b: StrategyBundle| StrategyBundle {
        drop_i: instance.drop_i,
        drop_ii: instance.drop_ii,
        ..b
    };
    let mut candidates = vec![fixtures::no_gift(d)];
    match instance.kind {
        GameKind::NoGift => {}
        GameKind::OneGift => {
            candidates.push(fixtures::one_gift(d));
            if let Some(z) = instance.drop_ii.filter(|z| *z < d) {
                candidates.push(fixtures::one_gift_early_drop(d, z));
            }
        }
        GameKind::TwoGiftsOr => candidates.push(fixtures::two_gifts_or(d)),
        GameKind::TwoGiftsAnd => {
            candidates.push(fixtures::two_gifts_and_pair1(d));
            candidates.push(fixtures::two_gifts_and_pair2(d, instance.drop_i.unwrap_or(Rational::ZERO)));
            candidates.push(fixtures::two_gifts_and_pair3(d));
        }
    }
    let mut best: (Option<Rational>, Option<StrategyBundle>) = (None, None);
    for b in candidates {
        let b = with_drops(b);
        if let Ok(out) = evaluate_bundle(instance, &b) {
            if let Some(v) = out.value {
                if best.0.is_none_or(|bv| v < bv) {
                    best = (Some(v), Some(b));
                }
            }
        }
    }
    best
}

impl Search {
    fn prune(&self, bound2: i128) -> bool {
        match self.incumbent {
            None => false,
            Some(inc) if self.options.collect_all => bound2 > 2 * inc,
            Some(inc) => bound2 >= 2 * inc,
        }
    }

    fn explore(&mut self, st: &SolverState) -> Result<(), SolveError> {
        self.node_count += 1;
        if st.live_count() == 0 {
            self.record_leaf(st);
            return Ok(());
        }
        if self.prune(st.lower_bound2()) {
            return Ok(());
        }
        let Some(slots) = branch_slots(st, self.options.symmetry) else {
            return Ok(());
        };
        let mark = self.arena.len();
        let mut children: Vec<(i128, usize, SolverState)> = Vec::new();
        let mut combos: Vec<Vec<Direction>> = Vec::new();
        for_each_combo(&slots, |picks| combos.push(picks.to_vec()));
        for (k, picks) in combos.iter().enumerate() {
            let mut child = st.clone();
            for (slot, &dir) in slots.iter().zip(picks) {
                child.set_direction(slot.player, slot.class, dir);
            }
            self.place_nodes(st, &mut child);
            let Some(t_next) = child.next_event_units()? else {
                continue;
            };
            if t_next > child.horizon {
                let mut bound = 2 * child.resolved;
                for s in 0..4 {
                    if child.ctx[s].live {
                        bound += (2 * t_next).max(2 * child.t + child.remaining2(s));
                    }
                }
                if !self.prune(bound) {
                    self.cut_at_horizon = Some(self.cut_at_horizon.map_or(bound, |c| c.min(bound)));
                }
                continue;
            }
            child.advance_to(t_next);
            let bound = if child.live_count() == 0 {
                2 * child.resolved
            } else {
                child.lower_bound2()
            };
            if self.prune(bound) {
                continue;
            }
            children.push((bound, k, child));
        }
        children.sort_by_key(|(bound, k, _)| (*bound, *k));
        for (_, _, child) in &children {
            self.explore(child)?;
        }
        self.arena.truncate(mark);
        Ok(())
    }

    /// Adds decision-tree nodes for classes that start, split or turn at
    /// this event, and points the child's scenarios at them.
    fn place_nodes(&mut self, before: &SolverState, child: &mut SolverState) {
        for player in [Player::I, Player::II] {
            for class in child.live_classes(player) {
                let members: Vec<usize> = (0..4)
                    .filter(|&s| child.ctx[s].live && child.class_of(player, s) == class)
                    .collect();
                let lead = members[0];
                let current = match player {
                    Player::I => child.ctx[lead].i_node,
                    Player::II => child.ctx[lead].ii_node,
                };
                let split = match player {
                    Player::I => before.split_i[class as usize],
                    Player::II => before.split_ii[class as usize],
                };
                let dir = child.direction(player, class);
                let turned = current != NO_NODE && self.arena[current as usize].dir != dir;
                if current != NO_NODE && split.is_none() && !turned {
                    continue;
                }
                let obs = if current == NO_NODE {
                    ObservationKind::Root
                } else {
                    match split {
                        Some(SplitSide::Found) => ObservationKind::Found,
                        Some(SplitSide::Absent) => ObservationKind::Absent,
                        None => self.label(before, player, &members),
                    }
                };
                let x = match player {
                    Player::I => child.ctx[lead].x,
                    Player::II => child.ctx[lead].g,
                };
                let id = self.arena.len() as u32;
                self.arena.push(ArenaNode {
                    parent: current,
                    player,
                    t: child.t,
                    x,
                    obs,
                    dir,
                });
                for &s in &members {
                    match player {
                        Player::I => child.ctx[s].i_node = id,
                        Player::II => child.ctx[s].ii_node = id,
                    }
                }
            }
        }
    }

    /// Label for a turn made without a split.
    fn label(&self, st: &SolverState, player: Player, members: &[usize]) -> ObservationKind {
        let class = st.class_of(player, members[0]);
        let met = (0..4).any(|s| st.class_of(player, s) == class && st.flags[s].met && st.ends[s] == Some(st.t));
        let sees = |s: usize| {
            let c = &st.ctx[s];
            match player {
                Player::I => c.q == Some(c.x),
                Player::II => c.p == Some(st.agent(s)),
            }
        };
        let own_drop = match player {
            Player::I => st.tau_i,
            Player::II => st.tau_ii,
        };
        if met {
            ObservationKind::Met
        } else if members.iter().all(|&s| sees(s)) {
            ObservationKind::Found
        } else if own_drop == Some(st.t) {
            ObservationKind::Drop
        } else {
            ObservationKind::Turn
        }
    }

    fn record_leaf(&mut self, st: &SolverState) {
        let total = st.resolved;
        match self.incumbent {
            Some(inc) if total > inc => {}
            Some(inc) if total == inc => {
                if self.options.collect_all {
                    self.best.push(self.build_bundle(st));
                }
            }
            _ => {
                self.incumbent = Some(total);
                self.best = vec![self.build_bundle(st)];
            }
        }
    }

    fn build_bundle(&self, st: &SolverState) -> StrategyBundle {
        StrategyBundle {
            drop_i: self.drop_i,
            drop_ii: self.drop_ii,
            player_i: PlayerStrategy::Tree(self.build_tree(st, Player::I)),
            player_ii: PlayerStrategy::Tree(self.build_tree(st, Player::II)),
        }
    }

    fn build_tree(&self, st: &SolverState, player: Player) -> DecisionNode {
        let mut used = vec![false; self.arena.len()];
        for c in &st.ctx {
            let mut n = match player {
                Player::I => c.i_node,
                Player::II => c.ii_node,
            };
            while n != NO_NODE && !used[n as usize] {
                used[n as usize] = true;
                n = self.arena[n as usize].parent;
            }
        }
        let root = (0..self.arena.len())
            .find(|&i| used[i] && self.arena[i].parent == NO_NODE && self.arena[i].player == player)
            .expect("every player has a root node");
        self.subtree(root as u32, &used, st)
    }

    fn subtree(&self, id: u32, used: &[bool], st: &SolverState) -> DecisionNode {
        let n = self.arena[id as usize];
        let mut children: Vec<DecisionNode> = (0..self.arena.len())
            .filter(|&i| used[i] && self.arena[i].parent == id)
            .map(|i| self.subtree(i as u32, used, st))
            .collect();
        children.sort_by_key(|c| c.obs);
        DecisionNode::new(st.scale.rational(n.t), n.obs, st.scale.rational(n.x), n.dir).with_children(children)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn no_gift_value() {
        let inst = GameInstance::no_gift(q(16, 1)).unwrap();
        let r = solve_fixed_drops(&inst).unwrap();
        assert_eq!(r.value, q(26, 1));
        for b in &r.optimal_bundles {
            assert_eq!(evaluate_bundle(&inst, b).unwrap().value, Some(r.value));
        }
    }

    #[test]
    fn one_gift_value() {
        let inst = GameInstance::one_gift(q(16, 1), q(4, 1)).unwrap();
        let r = solve_fixed_drops(&inst).unwrap();
        assert_eq!(r.value, q(21, 1));
    }

    #[test]
    fn value_mode_agrees() {
        let inst = GameInstance::one_gift(q(16, 1), q(4, 1)).unwrap();
        let r = solve_value(&inst).unwrap();
        assert_eq!(r.value, q(21, 1));
        assert_eq!(r.optimal_bundles.len(), 1);
    }

    #[test]
    fn tiny_horizon_is_reported() {
        let inst = GameInstance::with_horizon(GameKind::NoGift, q(16, 1), None, None, q(20, 1)).unwrap();
        assert!(matches!(
            solve_fixed_drops(&inst),
            Err(SolveError::HorizonTooSmall { .. }) | Err(SolveError::NoResolvedStrategy(_))
        ));
    }
}
