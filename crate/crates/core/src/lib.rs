//! Sharp lower bounds for `P(X >= 0)` and `P(X > 0)` of a centered random
//! variable `X`, given ratios of its moments.
//!
//! The crate is split by concern:
//!
//! * [`bounds`] evaluates the closed-form bounds (and the classical ones they
//!   improve on).
//! * [`distributions`] holds finite discrete distributions and the explicit
//!   extremal constructions that attain each bound.
//! * [`oracle`] is an independent brute-force check: it minimizes the event
//!   probability over all distributions on a support grid that satisfy the
//!   same moment constraints.
//! * [`chaos`] applies the fourth-moment bound to second-order Rademacher and
//!   Gaussian chaos, Hilbert-space norms and centered exponential sums.

pub mod bounds;
pub mod chaos;
pub mod distributions;
mod error;
mod event;
pub mod oracle;

pub use error::{Error, Result};
pub use event::Event;

/// `(2*sqrt(3) - 3) / 15`, the uniform lower bound on `P(S >= 0)` for a
/// second-order chaos `S`.
pub fn chaos_positivity_constant() -> f64 {
    (2.0 * 3f64.sqrt() - 3.0) / 15.0
}
