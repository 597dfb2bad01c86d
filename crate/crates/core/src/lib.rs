//! Exact computation for absorbing birth-death games with state-dependent
//! win/lose probabilities and ties, and for the cover statistics of a
//! non-symmetric random walk on a cycle.
//!
//! Everything is computed over arbitrary-precision rationals; closed forms,
//! linear-system oracles and seeded Monte-Carlo simulation live side by side
//! so each route can verify the others.
//!
//! The crate is `no_std`-compatible (with `alloc`); the `std` feature, on by
//! default, currently only marks builds that link the standard library.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod chain;
pub mod combinatorics;
pub mod error;
pub mod float;
pub mod gambler;
pub mod montecarlo;
pub mod oracle;
pub mod polygon;
pub mod scalar;

pub use chain::{GamblerChain, PolygonChain};
pub use error::{Error, Result};
pub use scalar::Scalar;
