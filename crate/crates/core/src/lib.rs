//! Distributed downlink power setting for dense two-tier cellular networks
//! with carrier aggregation.
//!
//! Teams of access points (one macro leader plus the micros inside its
//! macrocell) play a competitive game over per-location, per-carrier transmit
//! power levels. The crate covers the whole pipeline:
//!
//! - [`scenario`]: network geometry, tiles, teams and user populations.
//! - [`propagation`]: the attenuation tensor consumed by the game.
//! - [`game`]: payoffs, dynamic pricing, the best-reply power setting (BPS)
//!   dynamics and multi-carrier orchestration.
//! - [`analysis`]: independent oracles (continuous best reply, exhaustive Nash
//!   enumeration, strategic-substitutes checks).
//! - [`simulate`]: traffic, proportional-fair scheduling, energy and metrics.
//! - [`runner`]: batch commands and CSV artifacts behind the `bps` binary.

pub mod analysis;
pub mod error;
pub mod game;
pub mod propagation;
pub mod rng;
pub mod runner;
pub mod scenario;
pub mod simulate;

pub use error::{Error, Result};
