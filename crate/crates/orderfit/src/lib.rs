//! Order-aware learning to rank when the best order is never observed.
//!
//! Training data consists of sessions `(X, Π, s)`: a list of items `X`, the
//! order `Π` it was actually shown in, and a single non-negative score `s`
//! for the whole list (dwell time, engagement, ...). No session reveals the
//! score-maximizing order. This crate implements three ways to learn an
//! ordering policy from such data and the tooling to compare them:
//!
//! - [`plackett_luce`] — ListMLE and weighted ListMLE over a Plackett-Luce
//!   permutation model with a linear scorer, trained by gradient descent;
//!   inference sorts predicted item scores.
//! - [`payoff_gain`] — an item-payoff × positional-gain score model trained
//!   by alternating minimization (closed-form ridge step for the gains,
//!   projected gradient descent on the unit ball for the payoff weights);
//!   inference matches sorted payoffs to sorted gains.
//! - [`assignment`] — exact and greedy linear-sum-assignment solvers for any
//!   score function that decomposes over (item, position) pairs, plus a
//!   brute-force oracle.
//!
//! [`synthetic`] generates ground-truth benchmark data, [`eval`] computes
//! NDCG and top-1 metrics over groups of observed orders, and [`cli`] wires
//! everything into the `orderfit` command-line tool with stable file
//! formats ([`formats`]).
//!
//! Runnable walkthroughs live in `examples/`; start with
//! `cargo run --example synthetic_benchmark --release`.

pub mod assignment;
pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod formats;
pub mod payoff_gain;
pub mod plackett_luce;
pub mod synthetic;

pub use data::{sort_descending, Dataset, ItemList, Permutation, Session};
pub use error::{Error, Result};
pub use payoff_gain::{AltMinConfig, PayoffGainModel};
pub use plackett_luce::{GDConfig, PLModel};
