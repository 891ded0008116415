//! Symbolic planning over an action language, coupled with option learning
//! and an average-reward trust evaluator.
//!
//! The pipeline: [`symlang`] parses and grounds a domain into a transition
//! system, [`planner`] searches it for plans that beat the incumbent's
//! quality, [`controller`] learns one option per symbolic transition inside an
//! environment from [`envs`], and [`trust`] turns option outcomes into the
//! gain values the planner reads back. [`harness`] runs the whole loop.

pub mod controller;
pub mod envs;
pub mod harness;
pub mod planner;
pub mod symlang;
pub mod trust;
