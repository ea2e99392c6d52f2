//! Perfect teleportation of a qubit through a partially entangled two-qudit
//! channel whose two largest Schmidt coefficients are equal.
//!
//! The crate is organised bottom-up:
//!
//! - [`corelin`]: dense complex state vectors, operators, partial projections.
//! - [`channel`]: validated Schmidt channels, the Case I/II families, vertex
//!   states and the random sampler.
//! - [`protocol`]: Alice's joint-measurement basis (rotation cascade and
//!   closed form), collapsed states, outcome probabilities, Bob's corrections
//!   and a brute-force projection oracle.
//! - [`metrics`]: concurrences, measurement entanglement and classical cost.
//! - [`extensions`]: imperfect qutrit teleportation and receiver-side phase
//!   noise.
//!
//! Index convention everywhere: the qubit (subsystem 1) is the slowest index,
//! then Alice's qudit (2), then Bob's qudit (3).

#![forbid(unsafe_code)]

pub mod channel;
pub mod corelin;
pub mod error;
pub mod extensions;
pub mod mc;
pub mod metrics;
pub mod protocol;

pub use channel::SchmidtChannel;
pub use corelin::{Operator, StateVec};
pub use error::{Error, Result};
pub use protocol::{Label, MeasurementBasis, Sign, TeleportOutcome};

/// Decimal rendering with 17 significant digits (round-trip exact for f64).
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Tolerances shared by the whole crate.
pub mod tol {
    /// Squared-norm deviation accepted for a "normalized" vector.
    pub const NORM: f64 = 1e-12;
    /// Orthonormality / unitarity.
    pub const ORTHO: f64 = 1e-10;
    /// Fidelity assertions.
    pub const FIDELITY: f64 = 1e-9;
    /// Residual norm below which Gram-Schmidt drops a candidate.
    pub const GS_RESIDUAL: f64 = 1e-8;
    /// Window in which channel coefficients are silently renormalized.
    pub const RENORMALIZE: f64 = 1e-6;
    /// Outcome probabilities at or below this are treated as vanished.
    pub const VANISHED: f64 = 1e-24;
}
