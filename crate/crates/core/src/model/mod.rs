//! Channel, probability and Markov structure of the saturated random-access cell.

mod channel;
mod lyapunov;
mod markov;
mod probability;
mod state;

pub use channel::{detect, snr_db, ChannelParams};
pub use lyapunov::{drift_exact, lyapunov, lyapunov_of_counts};
pub use markov::{class_transition_matrix, TransitionMatrix};
pub use probability::{
    collision_given_detected, collision_prob_k_detected, collision_prob_oracle, dropping_prob,
    success_prob, transmit_prob_exact, COLLISION_ORACLE_MAX_USERS, TRANSMIT_ENUMERATION_MAX_USERS,
};
pub use state::{ActionPair, Position, SequencePool, SystemState, UserState};
