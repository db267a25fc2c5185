use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::rational::Rational;

/// Which ending rule the game uses and who carries a gift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    /// Plain rendezvous: the scenario ends when the players meet.
    NoGift,
    /// Player II carries a gift; ends when they meet or I finds it.
    OneGift,
    /// Both carry gifts; ends on a meeting or when either gift is found.
    TwoGiftsOr,
    /// Both carry gifts; ends on a meeting or once both gifts are found.
    TwoGiftsAnd,
}

impl GameKind {
    pub const ALL: [GameKind; 4] = [
        GameKind::NoGift,
        GameKind::OneGift,
        GameKind::TwoGiftsOr,
        GameKind::TwoGiftsAnd,
    ];

    pub fn player_i_has_gift(self) -> bool {
        matches!(self, GameKind::TwoGiftsOr | GameKind::TwoGiftsAnd)
    }

    pub fn player_ii_has_gift(self) -> bool {
        !matches!(self, GameKind::NoGift)
    }

    /// Short command-line name.
    pub fn short_name(self) -> &'static str {
        match self {
            GameKind::NoGift => "g",
            GameKind::OneGift => "g1",
            GameKind::TwoGiftsOr => "g2or",
            GameKind::TwoGiftsAnd => "g2and",
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for GameKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "g" | "g0" | "none" | "no_gift" => Ok(GameKind::NoGift),
            "g1" | "one" | "one_gift" => Ok(GameKind::OneGift),
            "g2or" | "or" | "two_gifts_or" => Ok(GameKind::TwoGiftsOr),
            "g2and" | "and" | "two_gifts_and" => Ok(GameKind::TwoGiftsAnd),
            other => Err(format!(
                "unknown game {other:?} (expected g, g1, g2or or g2and)"
            )),
        }
    }
}

/// The two players. Player I sits at the origin; Player II is placed at
/// distance D with unknown side and orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    I,
    II,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::I => f.write_str("I"),
            Player::II => f.write_str("II"),
        }
    }
}

/// Scenario number, 1 to 4.
pub type ScenarioId = u8;

/// One of nature's four equiprobable placements of Player II.
///
/// In scenario `s` the agent of Player II sits at `sigma * D + epsilon * g(t)`
/// where `g` is II's path in its own frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScenarioFrame {
    pub id: ScenarioId,
    pub sigma: i8,
    pub epsilon: i8,
}

impl ScenarioFrame {
    /// Scenario 1: facing each other (f + g = D); 2: facing away (-f - g = D);
    /// 3: both facing down (-f + g = D); 4: both facing up (f - g = D).
    pub const ALL: [ScenarioFrame; 4] = [
        ScenarioFrame { id: 1, sigma: 1, epsilon: -1 },
        ScenarioFrame { id: 2, sigma: -1, epsilon: -1 },
        ScenarioFrame { id: 3, sigma: -1, epsilon: 1 },
        ScenarioFrame { id: 4, sigma: 1, epsilon: 1 },
    ];

    pub fn by_id(id: ScenarioId) -> Option<ScenarioFrame> {
        Self::ALL.get(id.checked_sub(1)? as usize).copied()
    }

    pub fn index(&self) -> usize {
        (self.id - 1) as usize
    }

    /// Absolute position of the agent when II stands at `g` in its own frame.
    pub fn place(&self, distance: Rational, g: Rational) -> Rational {
        Rational::from(self.sigma as i32) * distance + Rational::from(self.epsilon as i32) * g
    }

    /// Inverse of [`ScenarioFrame::place`]: the own-frame coordinate that
    /// puts the agent at absolute position `x`.
    pub fn own_coordinate(&self, distance: Rational, x: Rational) -> Rational {
        Rational::from(self.epsilon as i32) * (x - Rational::from(self.sigma as i32) * distance)
    }
}

/// A game with fixed parameters: kind, initial distance, drop schedule and
/// horizon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameInstance {
    pub kind: GameKind,
    pub distance: Rational,
    pub drop_i: Option<Rational>,
    pub drop_ii: Option<Rational>,
    pub horizon: Rational,
}

impl GameInstance {
    /// Builds an instance with the default horizon `4 D` (extended to cover
    /// late drop times).
    pub fn new(
        kind: GameKind,
        distance: Rational,
        drop_i: Option<Rational>,
        drop_ii: Option<Rational>,
    ) -> Result<Self, ModelError> {
        let mut horizon = Rational::from(4) * distance;
        for tau in drop_i.iter().chain(drop_ii.iter()) {
            horizon = horizon.max(*tau + Rational::from(3) * distance);
        }
        Self::with_horizon(kind, distance, drop_i, drop_ii, horizon)
    }

    pub fn with_horizon(
        kind: GameKind,
        distance: Rational,
        drop_i: Option<Rational>,
        drop_ii: Option<Rational>,
        horizon: Rational,
    ) -> Result<Self, ModelError> {
        let instance = GameInstance {
            kind,
            distance,
            drop_i,
            drop_ii,
            horizon,
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn no_gift(distance: Rational) -> Result<Self, ModelError> {
        Self::new(GameKind::NoGift, distance, None, None)
    }

    pub fn one_gift(distance: Rational, drop_ii: Rational) -> Result<Self, ModelError> {
        Self::new(GameKind::OneGift, distance, None, Some(drop_ii))
    }

    pub fn two_gifts(
        kind: GameKind,
        distance: Rational,
        drop_i: Rational,
        drop_ii: Rational,
    ) -> Result<Self, ModelError> {
        Self::new(kind, distance, Some(drop_i), Some(drop_ii))
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.distance.signum() <= 0 {
            return Err(ModelError::NonPositiveDistance(self.distance));
        }
        if self.horizon.signum() <= 0 {
            return Err(ModelError::NonPositiveHorizon(self.horizon));
        }
        let expected = match self.kind {
            GameKind::NoGift => "neither player",
            GameKind::OneGift => "player II only",
            _ => "both players",
        };
        if self.drop_i.is_some() != self.kind.player_i_has_gift()
            || self.drop_ii.is_some() != self.kind.player_ii_has_gift()
        {
            return Err(ModelError::DropScheduleMismatch {
                kind: self.kind.short_name(),
                expected,
            });
        }
        for tau in self.drop_i.iter().chain(self.drop_ii.iter()) {
            if tau.signum() < 0 {
                return Err(ModelError::NegativeDropTime(*tau));
            }
            if *tau > self.horizon {
                return Err(ModelError::DropBeyondHorizon {
                    tau: *tau,
                    horizon: self.horizon,
                });
            }
        }
        Ok(())
    }

    pub fn drop_time(&self, player: Player) -> Option<Rational> {
        match player {
            Player::I => self.drop_i,
            Player::II => self.drop_ii,
        }
    }

    /// The same game with every length and time multiplied by `factor`.
    pub fn scaled(&self, factor: Rational) -> Result<Self, ModelError> {
        Self::with_horizon(
            self.kind,
            self.distance * factor,
            self.drop_i.map(|t| t * factor),
            self.drop_ii.map(|t| t * factor),
            self.horizon * factor,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn frames_match_meeting_equations() {
        // f(t) = agent(t) must read f + g = D, -f - g = D, -f + g = D, f - g = D.
        let d = q(16, 1);
        let (f, g) = (q(3, 1), q(5, 1));
        let lhs = [f + g, -f - g, -f + g, f - g];
        for (frame, lhs) in ScenarioFrame::ALL.iter().zip(lhs) {
            let agent = frame.place(d, g);
            // f = agent  <=>  lhs == D
            assert_eq!(f == agent, lhs == d);
            let meeting_g = frame.own_coordinate(d, f);
            assert_eq!(frame.place(d, meeting_g), f);
        }
    }

    #[test]
    fn drop_schedule_must_match_kind() {
        let d = q(16, 1);
        assert!(GameInstance::new(GameKind::NoGift, d, None, Some(q(1, 1))).is_err());
        assert!(GameInstance::new(GameKind::OneGift, d, None, None).is_err());
        assert!(GameInstance::new(GameKind::OneGift, d, Some(q(1, 1)), Some(q(1, 1))).is_err());
        assert!(GameInstance::new(GameKind::TwoGiftsAnd, d, Some(q(0, 1)), Some(q(0, 1))).is_ok());
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert_eq!(
            GameInstance::no_gift(q(0, 1)),
            Err(ModelError::NonPositiveDistance(q(0, 1)))
        );
        assert!(GameInstance::one_gift(q(16, 1), q(-1, 1)).is_err());
        let err = GameInstance::with_horizon(GameKind::OneGift, q(16, 1), None, Some(q(70, 1)), q(64, 1));
        assert!(matches!(err, Err(ModelError::DropBeyondHorizon { .. })));
    }

    #[test]
    fn default_horizon_is_at_least_four_distances() {
        let g = GameInstance::one_gift(q(16, 1), q(4, 1)).unwrap();
        assert_eq!(g.horizon, q(64, 1));
        let late = GameInstance::one_gift(q(16, 1), q(40, 1)).unwrap();
        assert_eq!(late.horizon, q(88, 1));
    }

    #[test]
    fn game_names_parse() {
        for kind in GameKind::ALL {
            assert_eq!(kind.short_name().parse::<GameKind>().unwrap(), kind);
        }
        assert!("g3".parse::<GameKind>().is_err());
    }
}
