//! Measurement-adaptive slotted random access for a single cell.
//!
//! The crate contains the analytical model (channel, collision and
//! transmission probabilities, class Markov chain, Lyapunov drift), the
//! base-station estimator and controller, a slot-level simulator for the
//! FPFB / FPDB / DPDB protocol variants, brute-force oracles and a small
//! MDP toolkit used to check the drift-minimisation results on toy models.
//!
//! Numeric code is generic over [`Scalar`] (plain arithmetic, so exact
//! rationals work) or [`Real`] (floats, for logs and root finding).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod controller;
pub mod error;
pub mod estimator;
pub mod mdp;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod sim;

pub use error::{ModelError, Result};
pub use scalar::{Real, Scalar};

/// Exact rational scalar used by the oracle tests.
pub type Exact = num_rational::Ratio<i128>;

pub type ChannelParamsF64 = model::ChannelParams<f64>;
pub type ActionPairF64 = model::ActionPair<f64>;
pub type ContentionConfigF64 = controller::ContentionConfig<f64>;
pub type PowerConfigF64 = controller::PowerConfig<f64>;
pub type BroadcastInfoF64 = controller::BroadcastInfo<f64>;
pub type RateEstimatesF64 = estimator::RateEstimates<f64>;
pub type TransitionMatrixF64 = model::TransitionMatrix<f64>;
pub type TransitionMatrixExact = model::TransitionMatrix<Exact>;
pub type SyntheticModelF64 = mdp::SyntheticModel<f64>;
