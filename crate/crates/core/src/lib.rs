//! Quasi-deterministic burstiness bounds for the aggregate of independent
//! periodic flows.
//!
//! Each flow sends a packet of fixed size once per period, starting at an
//! independent uniformly random phase. The aggregate always fits a token
//! bucket with rate `r_tot` and burst `l_tot`; this crate bounds the
//! probability `P(B > b)` that the smallest burst `B` needed for rate `r_tot`
//! exceeds a smaller `b`.
//!
//! - [`homogeneous`]: one group with a common period (closed-form and exact
//!   bounds, plus the same-period/different-size variants).
//! - [`heterogeneous`]: combining per-group curves by discrete convolution or
//!   by the union bound.
//! - [`simulator`]: exact per-sample burstiness and Monte Carlo tails with
//!   Kolmogorov-Smirnov bands.

pub mod curve;
pub mod error;
pub mod heterogeneous;
pub mod homogeneous;
pub mod rational;
pub mod scenario;
pub mod simulator;

pub use curve::{format_prob, monotone_envelope, CdfLowerBound, Prob, TailBoundCurve};
pub use error::{BoundError, Result};
pub use rational::Rational;
pub use scenario::{validate_scenario, FlowGroupSpec, Quantization, Scenario, ScenarioSpec};
