//! Ball-trajectory based recognition of volleyball setting tactics.
//!
//! Frames go through [`detect`] to produce ball candidates, [`track`]
//! links candidates into trajectories and picks the setting trajectory,
//! [`rotation`] follows rotation to tell whether the opposite is in the back
//! row, and [`classify`] labels the set. [`simulate`] produces labelled
//! synthetic rounds for evaluation.

// `!(a < b)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analyze;
pub mod classify;
pub mod config;
pub mod detect;
pub mod error;
pub mod geometry;
pub mod rotation;
pub mod simulate;
pub mod track;

pub use error::{Error, Result};
