//! Worst-case robust downlink beamforming for multiuser MISO cognitive radio
//! networks.
//!
//! The crate builds three robust transmit-power minimization programs
//! (loosely bounded, strictly bounded and exact worst-case SINR bounds),
//! solves them with a built-in conic solver, extracts beamforming weights and
//! verifies the designs against sampled and closed-form channel perturbations.

// `!(x > 0.0)` guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod conic;
pub mod error;
pub mod evaluate;
pub mod extract;
pub mod formulations;
pub mod model;
pub mod selftest;

pub use error::{Error, Result};
