//! Bearings-only target motion analysis workbench.
//!
//! Synthesizes noisy bearing observations for an observer/target engagement
//! and estimates the target's initial range, course and speed with three
//! solvers sharing one counted objective:
//!
//! * [`ga`]: binary-chromosome genetic algorithm with space narrowing,
//! * [`cma`]: CMA-ES in a normalized box,
//! * [`grid`]: exhaustive lattice search.
//!
//! [`harness`] wraps any of them in reproducible Monte Carlo experiments.

pub mod cma;
pub mod config;
pub mod error;
pub mod ga;
pub mod grid;
pub mod harness;
pub mod kinematics;
pub mod objective;
pub mod output;
pub mod presets;
pub mod seeding;
pub mod solver;

pub use error::{Result, TmaError};
pub use kinematics::{BearingSeries, Leg, Point, Scenario, TargetTruth, Track};
pub use objective::{BearingObjective, Candidate, CandidateXY, Interval, SearchBounds, SearchBoundsXY};
pub use solver::{solve, SolverConfig, SolverKind, SolverReport};
