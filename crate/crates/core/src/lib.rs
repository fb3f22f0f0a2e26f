//! Boosting reductions from weak learners to online convex optimization.
//!
//! The online boosters combine `N` weak online learners with a fresh
//! online gradient descent run per round; the statistical boosters resample
//! or relabel a fixed sample according to OGD plays over `T` rounds. The
//! [`games`] module solves bilinear zero-sum games with an improper oracle,
//! and [`harness`] runs seeded experiments that compare realized regret and
//! correlation against the closed-form bounds.

pub mod boost_online;
pub mod boost_stat;
pub mod cli;
pub mod domain;
pub mod error;
pub mod games;
pub mod harness;
pub mod oco;
pub mod rng;
pub mod verify;
pub mod weaklearn;

pub use error::{Error, Result};
