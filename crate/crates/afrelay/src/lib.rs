//! Performance analysis of interference-limited multi-hop
//! amplify-and-forward relaying over Nakagami-m fading.
//!
//! Each hop's received SIR is the ratio of two Gamma-distributed power
//! gains and follows a beta distribution of the second kind; the
//! end-to-end SIR of a K-hop chain combines per-hop SIRs harmonically and
//! is sandwiched between min γᵢ / K and min γᵢ. The crate provides:
//!
//! - closed-form per-hop SIR distributions and their min-based end-to-end
//!   bound CDFs ([`sir`], [`analysis`]),
//! - outage-probability brackets, small-outage asymptotes, and the
//!   diversity/coding gains they imply at high SNR ([`analysis`]),
//! - reduction of multiple co-channel interferers to a single equivalent
//!   Nakagami interferer ([`channel`]),
//! - a deterministic, chunk-parallel Monte-Carlo engine that validates
//!   every closed form against the exact sampled channel ([`montecarlo`]),
//! - a declarative experiment front-end producing plot-ready CSV sweeps
//!   ([`experiment`]).
//!
//! Start with the runnable examples (`cargo run --example outage_bounds`)
//! or the `afrelay` binary (`afrelay run fig2`).

pub mod analysis;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod montecarlo;
pub mod sir;
pub mod specfun;

pub use analysis::{AsymptoticParams, GainReport, OutageQuery};
pub use channel::{HopParams, InterfererSpec, SystemConfig};
pub use error::{Error, Result};
pub use experiment::{Experiment, OutageReport, RunOptions};
pub use montecarlo::{E2eSample, McConfig, McEstimate};
pub use sir::SirBounds;
