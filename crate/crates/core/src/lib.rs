//! Real-time transmission of a two-component Markov source over a
//! physically degraded broadcast channel with nested feedback.
//!
//! The encoder observes the source pair `(U_t, V_t)`, sends `X_t`, and
//! learns both channel outputs `Y_t` (inner) and `Z_t` (outer) one step
//! later; the inner decoder also learns `Z_t`. The crate provides:
//!
//! * [`model`]: instances, validation and model files;
//! * [`belief`]: exact filters for the inner, outer and decoder beliefs,
//!   and a brute-force oracle for them;
//! * [`strategy`]: general, Markov, coordinator and belief-structured
//!   strategies with their translations;
//! * [`evaluate`]: exact and simulated expected distortion;
//! * [`search`]: exhaustive and dynamic-programming optimizers and a
//!   refutation sampler.
//!
//! Every numeric routine is generic over [`Prob`]: [`Exact`] rationals or
//! `f64`.

pub mod belief;
pub mod error;
pub mod evaluate;
pub mod exact;
pub mod model;
pub mod par;
pub mod prob;
pub mod random;
pub mod search;
pub mod strategy;

pub use error::{Error, Result};
pub use exact::Exact;
pub use prob::Prob;
