//! Nonlinear variable selection with the DCOL statistic.
//!
//! The building blocks are the DCOL variance estimate `S_delta` of a response
//! ordered by a predictor ([`assoc`]), its permutation and Pearson tests, the
//! roughening step that damps an already-selected predictor ([`roughening`]),
//! and the forward stagewise loop that ties them together ([`selector`]).
//! [`predictor`] fits an additive spline model on the selected variables and
//! [`simulation`] generates sparse additive benchmarks.

pub mod assoc;
pub mod cli;
pub mod data;
pub mod error;
pub mod io;
pub mod predictor;
pub mod roughening;
pub mod selector;
pub mod simulation;
pub mod smoother;
pub mod stats;

pub use assoc::{AssociationScore, PairedSample, PermutationPlan};
pub use data::{Dataset, Frame};
pub use error::{NvsdError, Result};
pub use predictor::AdditiveModel;
pub use roughening::{RougheningConfig, RougheningMode};
pub use selector::{select_variables, SelectionConfig, SelectionTrace};
