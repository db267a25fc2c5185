use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::rational::Rational;

/// Direction of travel, in the moving player's own frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> i32 {
        match self {
            Direction::Forward => 1,
            Direction::Backward => -1,
        }
    }

    pub fn from_sign(sign: i32) -> Option<Direction> {
        match sign {
            1 => Some(Direction::Forward),
            -1 => Some(Direction::Backward),
            _ => None,
        }
    }

    pub fn reversed(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }

    pub fn velocity(self) -> Rational {
        Rational::from(self.sign())
    }
}

impl Serialize for Direction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i32(self.sign())
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = i32::deserialize(deserializer)?;
        Direction::from_sign(v)
            .ok_or_else(|| serde::de::Error::custom(format!("direction must be +1 or -1, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Waypoint {
    pub t: Rational,
    pub x: Rational,
}

impl Waypoint {
    pub fn new(t: Rational, x: Rational) -> Self {
        Waypoint { t, x }
    }
}

/// A speed-limited path starting at the player's origin.
///
/// Linear between waypoints; after the last waypoint the player keeps moving
/// at unit speed in `terminal_direction`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathPlan {
    waypoints: Vec<Waypoint>,
    terminal_direction: Direction,
}

impl PathPlan {
    pub fn new(waypoints: Vec<Waypoint>, terminal_direction: Direction) -> Result<Self, ModelError> {
        let plan = PathPlan {
            waypoints,
            terminal_direction,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let first = self
            .waypoints
            .first()
            .ok_or_else(|| ModelError::InvalidPath("path has no waypoints".into()))?;
        if !first.t.is_zero() || !first.x.is_zero() {
            return Err(ModelError::InvalidPath(format!(
                "path must start at (0, 0), starts at ({}, {})",
                first.t, first.x
            )));
        }
        for w in self.waypoints.windows(2) {
            let dt = w[1].t - w[0].t;
            if dt.signum() <= 0 {
                return Err(ModelError::InvalidPath(format!(
                    "waypoint times must increase strictly ({} then {})",
                    w[0].t, w[1].t
                )));
            }
            if (w[1].x - w[0].x).abs() > dt {
                return Err(ModelError::InvalidPath(format!(
                    "speed limit exceeded between t={} and t={}",
                    w[0].t, w[1].t
                )));
            }
        }
        Ok(())
    }

    /// Unit speed forever in one direction.
    pub fn straight(direction: Direction) -> Self {
        PathPlan {
            waypoints: vec![Waypoint::new(Rational::ZERO, Rational::ZERO)],
            terminal_direction: direction,
        }
    }

    /// Bang-bang path from turning-point notation `[f1, ..., fk]`: start in
    /// `initial`, reverse at each listed time.
    pub fn from_turning_points(turns: &[Rational], initial: Direction) -> Result<Self, ModelError> {
        let mut waypoints = vec![Waypoint::new(Rational::ZERO, Rational::ZERO)];
        let mut dir = initial;
        for &t in turns {
            let last = *waypoints.last().unwrap();
            let dt = t - last.t;
            if dt.signum() <= 0 {
                return Err(ModelError::InvalidPath(format!(
                    "turning points must increase strictly, got {t} after {}",
                    last.t
                )));
            }
            waypoints.push(Waypoint::new(t, last.x + dir.velocity() * dt));
            dir = dir.reversed();
        }
        Ok(PathPlan {
            waypoints,
            terminal_direction: dir,
        })
    }

    /// Turning points of a unit-speed path starting forward, if it is one.
    pub fn turning_points(&self) -> Option<Vec<Rational>> {
        let mut dir = Direction::Forward;
        let mut turns = Vec::new();
        for w in self.waypoints.windows(2) {
            let dt = w[1].t - w[0].t;
            let dx = w[1].x - w[0].x;
            let seg = if dx == dt {
                Direction::Forward
            } else if dx == -dt {
                Direction::Backward
            } else {
                return None;
            };
            if seg != dir {
                turns.push(w[0].t);
                dir = seg;
            }
        }
        if self.terminal_direction != dir {
            turns.push(self.waypoints.last().unwrap().t);
        }
        // a turn at t = 0 means the path starts backward
        if turns.first().is_some_and(|t| t.is_zero()) {
            return None;
        }
        Some(turns)
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    pub fn terminal_direction(&self) -> Direction {
        self.terminal_direction
    }

    pub fn last(&self) -> Waypoint {
        *self.waypoints.last().unwrap()
    }

    /// Position at time `t >= 0`.
    pub fn position(&self, t: Rational) -> Rational {
        debug_assert!(t.signum() >= 0);
        let idx = self.waypoints.partition_point(|w| w.t <= t);
        let a = self.waypoints[idx - 1];
        match self.waypoints.get(idx) {
            Some(b) => a.x + (b.x - a.x) * (t - a.t) / (b.t - a.t),
            None => a.x + self.terminal_direction.velocity() * (t - a.t),
        }
    }

    /// Waypoint times strictly inside `(from, to)`.
    pub fn breakpoints_between(&self, from: Rational, to: Rational) -> impl Iterator<Item = Rational> + '_ {
        self.waypoints
            .iter()
            .map(|w| w.t)
            .filter(move |t| *t > from && *t < to)
    }

    /// Last time before `self` and `other` stop coinciding on `[0, horizon]`,
    /// `None` if they agree throughout.
    pub fn first_difference(&self, other: &PathPlan, horizon: Rational) -> Option<Rational> {
        let zero = Rational::ZERO;
        let mut times: Vec<Rational> = self
            .breakpoints_between(zero, horizon)
            .chain(other.breakpoints_between(zero, horizon))
            .collect();
        times.push(horizon);
        times.sort();
        times.dedup();
        let mut prev = zero;
        for t in times {
            if self.position(t) != other.position(t) {
                return Some(prev);
            }
            prev = t;
        }
        None
    }

    /// Same path with every time and position multiplied by `factor > 0`.
    pub fn scaled(&self, factor: Rational) -> PathPlan {
        assert!(factor.signum() > 0, "scale factor must be positive");
        PathPlan {
            waypoints: self
                .waypoints
                .iter()
                .map(|w| Waypoint::new(w.t * factor, w.x * factor))
                .collect(),
            terminal_direction: self.terminal_direction,
        }
    }

    /// Mirror image `-f`.
    pub fn mirrored(&self) -> PathPlan {
        PathPlan {
            waypoints: self.waypoints.iter().map(|w| Waypoint::new(w.t, -w.x)).collect(),
            terminal_direction: self.terminal_direction.reversed(),
        }
    }

    /// Appends a waypoint; used when realising strategies step by step.
    pub(crate) fn push_unchecked(&mut self, w: Waypoint) {
        self.waypoints.push(w);
    }

    pub(crate) fn set_terminal(&mut self, dir: Direction) {
        self.terminal_direction = dir;
    }

    pub(crate) fn origin(dir: Direction) -> Self {
        Self::straight(dir)
    }
}

/// Smallest `t` in `[from, to]` where the piecewise-linear `diff` vanishes.
/// `breaks` must contain every kink of `diff` inside the interval.
pub(crate) fn first_root(
    from: Rational,
    to: Rational,
    breaks: impl IntoIterator<Item = Rational>,
    diff: impl Fn(Rational) -> Rational,
) -> Option<Rational> {
    if from > to {
        return None;
    }
    let mut times: Vec<Rational> = breaks.into_iter().filter(|t| *t > from && *t < to).collect();
    times.push(from);
    times.push(to);
    times.sort();
    times.dedup();
    let mut prev_t = times[0];
    let mut prev_d = diff(prev_t);
    if prev_d.is_zero() {
        return Some(prev_t);
    }
    for &t in &times[1..] {
        let d = diff(t);
        if d.is_zero() {
            return Some(t);
        }
        if d.signum() != prev_d.signum() {
            return Some(prev_t + (t - prev_t) * prev_d / (prev_d - d));
        }
        prev_t = t;
        prev_d = d;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn turning_point_notation_round_trips() {
        let turns = vec![q(8, 1), q(16, 1), q(32, 1)];
        let g = PathPlan::from_turning_points(&turns, Direction::Forward).unwrap();
        assert_eq!(g.position(q(8, 1)), q(8, 1));
        assert_eq!(g.position(q(16, 1)), q(0, 1));
        assert_eq!(g.position(q(32, 1)), q(16, 1));
        assert_eq!(g.position(q(40, 1)), q(8, 1));
        assert_eq!(g.turning_points().unwrap(), turns);
    }

    #[test]
    fn rejects_speeding_and_bad_origin() {
        let bad = PathPlan::new(
            vec![Waypoint::new(q(0, 1), q(0, 1)), Waypoint::new(q(1, 1), q(2, 1))],
            Direction::Forward,
        );
        assert!(bad.is_err());
        let off = PathPlan::new(vec![Waypoint::new(q(0, 1), q(1, 1))], Direction::Forward);
        assert!(off.is_err());
        let slow = PathPlan::new(
            vec![Waypoint::new(q(0, 1), q(0, 1)), Waypoint::new(q(2, 1), q(1, 1))],
            Direction::Backward,
        )
        .unwrap();
        assert_eq!(slow.position(q(1, 1)), q(1, 2));
        assert_eq!(slow.position(q(3, 1)), q(0, 1));
        assert_eq!(slow.turning_points(), None);
    }

    #[test]
    fn first_root_finds_crossings_and_touches() {
        let f = PathPlan::from_turning_points(&[q(16, 1)], Direction::Forward).unwrap();
        // f(t) = 12 first at t = 12
        let r = first_root(q(0, 1), q(64, 1), f.breakpoints_between(q(0, 1), q(64, 1)), |t| {
            f.position(t) - q(12, 1)
        });
        assert_eq!(r, Some(q(12, 1)));
        // touch exactly at the apex
        let r = first_root(q(0, 1), q(64, 1), f.breakpoints_between(q(0, 1), q(64, 1)), |t| {
            f.position(t) - q(16, 1)
        });
        assert_eq!(r, Some(q(16, 1)));
        let r = first_root(q(0, 1), q(64, 1), f.breakpoints_between(q(0, 1), q(64, 1)), |t| {
            f.position(t) - q(17, 1)
        });
        assert_eq!(r, None);
    }
}
