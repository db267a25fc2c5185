use thiserror::Error;

use crate::line_model::{Player, ScenarioId};
use crate::rational::Rational;

/// Errors raised while building or evaluating a game model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("initial distance must be positive, got {0}")]
    NonPositiveDistance(Rational),
    #[error("horizon must be positive, got {0}")]
    NonPositiveHorizon(Rational),
    #[error("{kind} requires drop times for {expected}")]
    DropScheduleMismatch {
        kind: &'static str,
        expected: &'static str,
    },
    #[error("drop time {0} is negative")]
    NegativeDropTime(Rational),
    #[error("drop time {tau} lies beyond the horizon {horizon}")]
    DropBeyondHorizon { tau: Rational, horizon: Rational },
    #[error("time {t} is outside [0, {horizon}]")]
    TimeOutOfDomain { t: Rational, horizon: Rational },
    #[error("{0} has no gift in this game")]
    NoGift(Player),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid decision tree: {0}")]
    InvalidTree(String),
    #[error(
        "inconsistent strategy for player {player}: scenarios {first} and {second} \
         diverge at t={time} before any observation tells them apart"
    )]
    Inconsistent {
        player: Player,
        first: ScenarioId,
        second: ScenarioId,
        time: Rational,
    },
}

/// Errors from the fixed-drop solver.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(
        "horizon {horizon} is too small: a branch with lower bound {lower_bound} \
         had to be cut at the horizon"
    )]
    HorizonTooSmall {
        horizon: Rational,
        lower_bound: Rational,
    },
    #[error("no strategy pair resolves every scenario before the horizon {0}")]
    NoResolvedStrategy(Rational),
    #[error("exact arithmetic budget exhausted ({0})")]
    Precision(&'static str),
}

/// Errors from mesh sweeps and mesh persistence.
#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh step must be positive, got {0}")]
    NonPositiveStep(Rational),
    #[error("empty mesh range: lo {lo} > hi {hi}")]
    EmptyRange { lo: Rational, hi: Rational },
    #[error("wrong game: {0}")]
    WrongGame(&'static str),
    #[error("solve failed at {point}: {source}")]
    Solve {
        point: String,
        #[source]
        source: SolveError,
    },
    #[error("mesh file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
