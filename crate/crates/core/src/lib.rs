//! Queue stability for a two-user downlink broadcast channel.
//!
//! A single transmitter holds one queue per receiver. Each slot it sends
//! whatever queues are non-empty: one packet alone, or a superposed packet
//! carrying both messages. Whether a receiver decodes depends on Rayleigh
//! fading and on how it handles the other user's signal. This crate
//! provides:
//!
//! - [`channel`]: closed-form decoding probabilities for the generic,
//!   interference-as-noise and successive-decoding receivers under fixed or
//!   queue-adaptive power, and a Monte Carlo fading estimator for them.
//! - [`region`]: the stability region assembled from the two dominant
//!   systems, membership tests, boundary tracing and dominant-system
//!   service rates.
//! - [`sim`]: a slot-level simulator of the coupled queues (including the
//!   dummy-packet dominant systems), a stability classifier and a
//!   ray-bisection boundary estimator.
//! - [`batch`]: order-independent batch execution, data-parallel when the
//!   `parallel` feature is enabled.

pub mod batch;
pub mod channel;
mod error;
pub mod region;
pub mod rng;
pub mod sim;

pub use channel::{
    Decoding, FadingDraw, PowerScheme, ProfileEstimate, SuccessProfile, SystemParams, TxSet,
    User, Warning,
};
pub use error::{Error, Result};
pub use region::{
    DominantRates, DominantSystem, Membership, RatePoint, StabilityRegion, SubRegion,
};
pub use sim::{DominantMode, SimConfig, SimResult, Simulator, Verdict};
