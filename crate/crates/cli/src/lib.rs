//! Experiment runner for the channel-estimation library: deterministic
//! Monte-Carlo sweeps emitting CSV artifacts.
//!
//! A study is a pure function from an [`config::ExperimentConfig`] to a
//! CSV string: all randomness derives from the master seed through
//! [`seeding::derive_seed`], so rerunning a study with the same
//! configuration reproduces its artifact byte for byte. The artifact
//! embeds the configuration digest, tying every result file to the exact
//! parameters that produced it.

pub mod config;
pub mod output;
pub mod seeding;
pub mod studies;
pub mod trial;
