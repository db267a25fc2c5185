//! Search state of the fixed-drop solver.
//!
//! Times and positions are held as integers in units of `1 / den`, where
//! `den` is a common denominator of the inputs times `2^40`. Every event
//! time is reached by adding a distance or half a gap, so each event adds at
//! most one factor of two to the denominators in play; running out of
//! factors is reported instead of rounding.

use crate::error::SolveError;
use crate::line_model::{Direction, GameInstance, GameKind, Player, ScenarioFrame, ScenarioId};
use crate::rational::Rational;
use num_integer::Integer;

const HALVINGS: u32 = 40;
pub(crate) const NO_NODE: u32 = u32::MAX;
/// Stands in for "cannot end" in lower bounds.
pub(crate) const FAR: i128 = i128::MAX / 16;

/// Conversion between rationals and the solver's integer units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Scale {
    den: i128,
}

impl Scale {
    fn for_instance(instance: &GameInstance) -> Result<Scale, SolveError> {
        let mut l: i128 = 1;
        let values = [Some(instance.distance), instance.drop_i, instance.drop_ii, Some(instance.horizon)];
        for r in values.into_iter().flatten() {
            l = l.lcm(&r.denom());
            if l > (1 << 60) {
                return Err(SolveError::Precision("input denominators too large"));
            }
        }
        Ok(Scale { den: l << HALVINGS })
    }

    pub(crate) fn units(&self, r: Rational) -> Result<i128, SolveError> {
        r.numer()
            .checked_mul(self.den / r.denom())
            .filter(|v| v.abs() < FAR / 4)
            .ok_or(SolveError::Precision("value out of range"))
    }

    pub(crate) fn rational(&self, v: i128) -> Rational {
        Rational::new(v, self.den)
    }

    /// `sum / 4` as a rational, for averaging the four scenario end times.
    pub(crate) fn mean_of_sum(&self, sum: i128) -> Rational {
        Rational::new(sum, self.den * 4)
    }
}

fn sgn(d: Direction) -> i128 {
    d.sign() as i128
}

/// Bookkeeping for one of the four scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Context {
    /// Player I's position (absolute).
    pub x: i128,
    /// Player II's position in its own frame.
    pub g: i128,
    /// Information class of each player: index of a scenario in the class.
    pub i_class: u8,
    pub ii_class: u8,
    /// Current decision-tree node of each player (arena index).
    pub i_node: u32,
    pub ii_node: u32,
    pub live: bool,
    pub i_found: bool,
    pub a_found: bool,
    /// Absolute resting places of I's gift and of the agent's gift.
    pub p: Option<i128>,
    pub q: Option<i128>,
}

/// What happened at the current event, per scenario.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct EventFlags {
    pub met: bool,
    pub i_first: bool,
    pub a_first: bool,
}

/// A split at the current event: the class now holding the scenarios that
/// observed a gift, or the one holding those that did not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SplitSide {
    Found,
    Absent,
}

/// State of every scenario at an event time, with each information class's
/// current heading and whether it may turn now.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverState {
    pub(crate) kind: GameKind,
    pub(crate) scale: Scale,
    pub(crate) d: i128,
    pub(crate) tau_i: Option<i128>,
    pub(crate) tau_ii: Option<i128>,
    pub(crate) horizon: i128,
    pub(crate) t: i128,
    pub(crate) ctx: [Context; 4],
    /// Headings indexed by class id; II's are in its own frame.
    pub(crate) dir_i: [Direction; 4],
    pub(crate) dir_ii: [Direction; 4],
    pub(crate) elig_i: [bool; 4],
    pub(crate) elig_ii: [bool; 4],
    pub(crate) split_i: [Option<SplitSide>; 4],
    pub(crate) split_ii: [Option<SplitSide>; 4],
    pub(crate) flags: [EventFlags; 4],
    pub(crate) ends: [Option<i128>; 4],
    pub(crate) resolved: i128,
}

/// One heading per information class that may turn now. Classes are named
/// by the lowest scenario id they contain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionChoice {
    pub player_i: Vec<(ScenarioId, Direction)>,
    pub player_ii: Vec<(ScenarioId, Direction)>,
}

const FRAMES: [ScenarioFrame; 4] = ScenarioFrame::ALL;

impl SolverState {
    /// State at time 0, after any drops scheduled at time 0. Both players
    /// may choose their initial heading.
    pub fn initial(instance: &GameInstance) -> Result<SolverState, SolveError> {
        instance.validate()?;
        let scale = Scale::for_instance(instance)?;
        let kind = instance.kind;
        let tau_i = match instance.drop_i {
            Some(t) if kind.player_i_has_gift() => Some(scale.units(t)?),
            _ => None,
        };
        let tau_ii = match instance.drop_ii {
            Some(t) if kind.player_ii_has_gift() => Some(scale.units(t)?),
            _ => None,
        };
        let ctx = Context {
            x: 0,
            g: 0,
            i_class: 0,
            ii_class: 0,
            i_node: NO_NODE,
            ii_node: NO_NODE,
            live: true,
            i_found: false,
            a_found: false,
            p: None,
            q: None,
        };
        let mut st = SolverState {
            kind,
            scale,
            d: scale.units(instance.distance)?,
            tau_i,
            tau_ii,
            horizon: scale.units(instance.horizon)?,
            t: 0,
            ctx: [ctx; 4],
            dir_i: [Direction::Forward; 4],
            dir_ii: [Direction::Forward; 4],
            elig_i: [false; 4],
            elig_ii: [false; 4],
            split_i: [None; 4],
            split_ii: [None; 4],
            flags: [EventFlags::default(); 4],
            ends: [None; 4],
            resolved: 0,
        };
        st.resolve();
        st.elig_i = [true; 4];
        st.elig_ii = [true; 4];
        Ok(st)
    }

    pub fn clock(&self) -> Rational {
        self.scale.rational(self.t)
    }

    /// Ending times fixed so far, by scenario.
    pub fn end_times(&self) -> [Option<Rational>; 4] {
        self.ends.map(|e| e.map(|v| self.scale.rational(v)))
    }

    pub fn live_scenarios(&self) -> Vec<ScenarioId> {
        (0..4).filter(|&s| self.ctx[s].live).map(|s| s as ScenarioId + 1).collect()
    }

    /// Live information classes of `player`, each as its scenario ids.
    pub fn classes(&self, player: Player) -> Vec<Vec<ScenarioId>> {
        self.live_classes(player)
            .into_iter()
            .map(|c| {
                (0..4)
                    .filter(|&s| self.ctx[s].live && self.class_of(player, s) == c)
                    .map(|s| s as ScenarioId + 1)
                    .collect()
            })
            .collect()
    }

    pub(crate) fn class_of(&self, player: Player, s: usize) -> u8 {
        match player {
            Player::I => self.ctx[s].i_class,
            Player::II => self.ctx[s].ii_class,
        }
    }

    /// Class ids with at least one live member, ascending.
    pub(crate) fn live_classes(&self, player: Player) -> Vec<u8> {
        let mut out: Vec<u8> = (0..4)
            .filter(|&s| self.ctx[s].live)
            .map(|s| self.class_of(player, s))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Lowest scenario id among the live members of class `c`.
    pub(crate) fn class_name(&self, player: Player, c: u8) -> ScenarioId {
        (0..4)
            .find(|&s| self.ctx[s].live && self.class_of(player, s) == c)
            .map(|s| s as ScenarioId + 1)
            .unwrap_or(c + 1)
    }

    pub(crate) fn agent(&self, s: usize) -> i128 {
        let f = FRAMES[s];
        f.sigma as i128 * self.d + f.epsilon as i128 * self.ctx[s].g
    }

    fn u(&self, s: usize) -> i128 {
        sgn(self.dir_i[self.ctx[s].i_class as usize])
    }

    /// Agent's absolute velocity.
    fn va(&self, s: usize) -> i128 {
        FRAMES[s].epsilon as i128 * sgn(self.dir_ii[self.ctx[s].ii_class as usize])
    }

    pub(crate) fn live_count(&self) -> usize {
        self.ctx.iter().filter(|c| c.live).count()
    }

    /// Sets the heading of a class.
    pub(crate) fn set_direction(&mut self, player: Player, class: u8, dir: Direction) {
        match player {
            Player::I => self.dir_i[class as usize] = dir,
            Player::II => self.dir_ii[class as usize] = dir,
        }
    }

    pub(crate) fn direction(&self, player: Player, class: u8) -> Direction {
        match player {
            Player::I => self.dir_i[class as usize],
            Player::II => self.dir_ii[class as usize],
        }
    }

    pub(crate) fn eligible(&self, player: Player, class: u8) -> bool {
        match player {
            Player::I => self.elig_i[class as usize],
            Player::II => self.elig_ii[class as usize],
        }
    }

    /// Applies a choice naming classes by scenario id.
    pub fn with_directions(&self, choice: &DirectionChoice) -> SolverState {
        let mut st = self.clone();
        for (player, list) in [(Player::I, &choice.player_i), (Player::II, &choice.player_ii)] {
            for &(id, dir) in list {
                let c = st.class_of(player, (id - 1) as usize);
                st.set_direction(player, c, dir);
            }
        }
        st
    }

    /// Earliest future event under the current headings, in units.
    pub(crate) fn next_event_units(&self) -> Result<Option<i128>, SolveError> {
        let mut best: Option<i128> = None;
        let mut offer = |c: i128| {
            if best.is_none_or(|b| c < b) {
                best = Some(c);
            }
        };
        if self.live_count() == 0 {
            return Ok(None);
        }
        for tau in [self.tau_i, self.tau_ii].into_iter().flatten() {
            if tau > self.t {
                offer(tau);
            }
        }
        for s in 0..4 {
            let c = &self.ctx[s];
            if !c.live {
                continue;
            }
            let (u, va, a) = (self.u(s), self.va(s), self.agent(s));
            let gap = a - c.x;
            let rel = va - u;
            if rel != 0 && gap.signum() == -rel.signum() {
                if gap % 2 != 0 {
                    return Err(SolveError::Precision("meeting time needs another halving"));
                }
                offer(self.t + gap.abs() / 2);
            }
            if !c.i_found {
                if let Some(q) = c.q {
                    let dq = q - c.x;
                    if dq.signum() == u {
                        offer(self.t + dq.abs());
                    }
                }
            }
            if !c.a_found {
                if let Some(p) = c.p {
                    let dp = p - a;
                    if dp.signum() == va {
                        offer(self.t + dp.abs());
                    }
                }
            }
        }
        Ok(best)
    }

    /// Moves everyone to time `t_next` under the current headings and
    /// processes what happens there.
    pub(crate) fn advance_to(&mut self, t_next: i128) {
        let dt = t_next - self.t;
        for s in 0..4 {
            let (u, v) = (self.u(s), sgn(self.dir_ii[self.ctx[s].ii_class as usize]));
            let c = &mut self.ctx[s];
            c.x += u * dt;
            c.g += v * dt;
        }
        self.t = t_next;
        self.resolve();
    }

    /// Drops, meetings, finds, scenario endings, class splits and turn
    /// eligibility at the current time.
    fn resolve(&mut self) {
        let t = self.t;
        self.flags = [EventFlags::default(); 4];
        self.split_i = [None; 4];
        self.split_ii = [None; 4];
        let drop_i_now = self.tau_i == Some(t);
        let drop_ii_now = self.tau_ii == Some(t);
        for s in 0..4 {
            if !self.ctx[s].live {
                continue;
            }
            let a = self.agent(s);
            let c = &mut self.ctx[s];
            if drop_i_now {
                c.p = Some(c.x);
            }
            if drop_ii_now {
                c.q = Some(a);
            }
            let mut fl = EventFlags {
                met: a == c.x,
                ..EventFlags::default()
            };
            if !c.i_found && c.q == Some(c.x) {
                c.i_found = true;
                fl.i_first = true;
            }
            if !c.a_found && c.p == Some(a) {
                c.a_found = true;
                fl.a_first = true;
            }
            let ended = fl.met
                || match self.kind {
                    GameKind::NoGift => false,
                    GameKind::OneGift => c.i_found,
                    GameKind::TwoGiftsOr => c.i_found || c.a_found,
                    GameKind::TwoGiftsAnd => c.i_found && c.a_found,
                };
            if ended {
                c.live = false;
                self.ends[s] = Some(t);
                self.resolved += t;
            }
            self.flags[s] = fl;
        }

        let mut elig_i = [drop_i_now; 4];
        let mut elig_ii = [drop_ii_now; 4];
        for s in 0..4 {
            let fl = self.flags[s];
            if fl.met || fl.i_first {
                elig_i[self.ctx[s].i_class as usize] = true;
            }
            if fl.met || fl.a_first {
                elig_ii[self.ctx[s].ii_class as usize] = true;
            }
        }
        self.elig_i = elig_i;
        self.elig_ii = elig_ii;
        self.split(Player::I);
        self.split(Player::II);
    }

    /// Whether `player` would see the other's gift at its location in `s`.
    fn sees_gift(&self, player: Player, s: usize) -> bool {
        let c = &self.ctx[s];
        match player {
            Player::I => c.q == Some(c.x),
            Player::II => c.p == Some(self.agent(s)),
        }
    }

    fn split(&mut self, player: Player) {
        for class in self.live_classes(player) {
            let members: Vec<usize> = (0..4)
                .filter(|&s| self.ctx[s].live && self.class_of(player, s) == class)
                .collect();
            let (found, absent): (Vec<usize>, Vec<usize>) =
                members.iter().partition(|&&s| self.sees_gift(player, s));
            if found.is_empty() || absent.is_empty() {
                continue;
            }
            for (side, group) in [(SplitSide::Found, &found), (SplitSide::Absent, &absent)] {
                let id = group[0] as u8;
                for &s in group.iter() {
                    match player {
                        Player::I => self.ctx[s].i_class = id,
                        Player::II => self.ctx[s].ii_class = id,
                    }
                }
                let (dir, elig) = (self.direction(player, class), self.eligible(player, class));
                match player {
                    Player::I => {
                        self.dir_i[id as usize] = dir;
                        self.elig_i[id as usize] = elig;
                        self.split_i[id as usize] = Some(side);
                    }
                    Player::II => {
                        self.dir_ii[id as usize] = dir;
                        self.elig_ii[id as usize] = elig;
                        self.split_ii[id as usize] = Some(side);
                    }
                }
            }
        }
    }

    /// Admissible lower bound on the sum of the four ending times, doubled
    /// so that half-gaps stay integral.
    pub(crate) fn lower_bound2(&self) -> i128 {
        let mut total = 2 * self.resolved;
        for s in 0..4 {
            if self.ctx[s].live {
                total += 2 * self.t + self.remaining2(s);
            }
        }
        total
    }

    /// Twice a lower bound on the time scenario `s` still needs.
    pub(crate) fn remaining2(&self, s: usize) -> i128 {
        let c = &self.ctx[s];
        let a = self.agent(s);
        let gap = (a - c.x).abs();
        let meet = gap;
        // reaching a gift that is not down yet: it will lie where the other
        // player stands at its drop time
        let pending = |tau: Option<i128>| match tau {
            Some(tau) if tau > self.t => {
                let r = tau - self.t;
                2 * r.max(gap - r)
            }
            _ => FAR,
        };
        let i_find = match c.q {
            Some(q) => 2 * (q - c.x).abs(),
            None => pending(self.tau_ii),
        };
        let a_find = match c.p {
            Some(p) => 2 * (p - a).abs(),
            None => pending(self.tau_i),
        };
        match self.kind {
            GameKind::NoGift => meet,
            GameKind::OneGift => meet.min(i_find),
            GameKind::TwoGiftsOr => meet.min(i_find).min(a_find),
            GameKind::TwoGiftsAnd => {
                let i_part = if c.i_found { 0 } else { i_find };
                let a_part = if c.a_found { 0 } else { a_find };
                meet.min(i_part.max(a_part))
            }
        }
    }

    /// Whether scenario `s` can only end through `player`'s own movement:
    /// a meeting or a find by that player.
    fn needs(&self, player: Player, s: usize) -> bool {
        let c = &self.ctx[s];
        match (self.kind, player) {
            (GameKind::NoGift, _) => true,
            (GameKind::OneGift, Player::I) => true,
            (GameKind::TwoGiftsAnd, Player::I) => !c.i_found,
            (GameKind::TwoGiftsAnd, Player::II) => !c.a_found,
            _ => false,
        }
    }

    /// Heading `dir` for `class` is pointless when the player has no drop
    /// ahead and every live member can only end through it while all its
    /// targets lie strictly behind: nothing can then happen to the class
    /// and it could never turn back.
    pub(crate) fn senseless(&self, player: Player, class: u8, dir: Direction) -> bool {
        let own_drop = match player {
            Player::I => self.tau_i,
            Player::II => self.tau_ii,
        };
        if own_drop.is_some_and(|tau| tau > self.t) {
            return false;
        }
        let mut any = false;
        for (s, c) in self.ctx.iter().enumerate() {
            if !c.live || self.class_of(player, s) != class {
                continue;
            }
            if !self.needs(player, s) {
                return false;
            }
            any = true;
            let (here, heading, targets) = match player {
                Player::I => (c.x, sgn(dir), [Some(self.agent(s)), c.q.filter(|_| !c.i_found)]),
                Player::II => (
                    self.agent(s),
                    FRAMES[s].epsilon as i128 * sgn(dir),
                    [Some(c.x), c.p.filter(|_| !c.a_found)],
                ),
            };
            if targets.iter().flatten().any(|&y| (y - here).signum() != -heading) {
                return false;
            }
        }
        any
    }
}

/// Earliest time at which anything can happen under the state's current
/// headings: a meeting, a first find by I or by an agent, or a scheduled
/// drop. `None` when nothing ever happens.
pub fn next_event_time(state: &SolverState) -> Result<Option<Rational>, SolveError> {
    Ok(state.next_event_units()?.map(|v| state.scale.rational(v)))
}

/// All joint headings worth exploring from `state`: one heading per class
/// that may turn now, skipping headings that lead nowhere. With `symmetry`
/// Player I's initial heading is fixed to forward. Empty when some class
/// is already stuck.
pub fn direction_branches(state: &SolverState, symmetry: bool) -> Vec<DirectionChoice> {
    let slots = branch_slots(state, symmetry);
    let Some(slots) = slots else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for_each_combo(&slots, |picks| {
        let mut choice = DirectionChoice {
            player_i: Vec::new(),
            player_ii: Vec::new(),
        };
        for (slot, &dir) in slots.iter().zip(picks) {
            let name = state.class_name(slot.player, slot.class);
            match slot.player {
                Player::I => choice.player_i.push((name, dir)),
                Player::II => choice.player_ii.push((name, dir)),
            }
        }
        out.push(choice);
    });
    out
}

#[derive(Debug, Clone)]
pub(crate) struct Slot {
    pub player: Player,
    pub class: u8,
    pub options: Vec<Direction>,
}

/// Classes that choose a heading now, with their admissible headings.
/// `None` when a class is stuck with no admissible heading.
pub(crate) fn branch_slots(state: &SolverState, symmetry: bool) -> Option<Vec<Slot>> {
    let mut slots = Vec::new();
    for player in [Player::I, Player::II] {
        for class in state.live_classes(player) {
            if !state.eligible(player, class) {
                if state.senseless(player, class, state.direction(player, class)) {
                    return None;
                }
                continue;
            }
            let mut options: Vec<Direction> = [Direction::Forward, Direction::Backward]
                .into_iter()
                .filter(|&d| !state.senseless(player, class, d))
                .collect();
            if symmetry && player == Player::I && state.t == 0 {
                options.retain(|&d| d == Direction::Forward);
            }
            if options.is_empty() {
                return None;
            }
            slots.push(Slot {
                player,
                class,
                options,
            });
        }
    }
    Some(slots)
}

pub(crate) fn for_each_combo(slots: &[Slot], mut f: impl FnMut(&[Direction])) {
    let mut idx = vec![0usize; slots.len()];
    let mut picks: Vec<Direction> = slots.iter().map(|s| s.options[0]).collect();
    loop {
        f(&picks);
        let mut k = 0;
        loop {
            if k == slots.len() {
                return;
            }
            idx[k] += 1;
            if idx[k] < slots[k].options.len() {
                picks[k] = slots[k].options[idx[k]];
                break;
            }
            idx[k] = 0;
            picks[k] = slots[k].options[0];
            k += 1;
        }
    }
}
