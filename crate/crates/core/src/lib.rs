//! Rendezvous on the line with dropped gifts: exact model, optimal
//! fixed-drop solver and mesh bounds over drop times.

pub mod error;
pub mod exact_solver;
pub mod line_model;
pub mod mesh_bounds;
pub mod rational;

pub use error::{MeshError, ModelError, SolveError};
pub use rational::{q, Rational};
