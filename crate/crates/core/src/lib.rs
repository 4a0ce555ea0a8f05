//! Ergodic capacity of adaptive transmission over general fading laws.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod distributions;
pub mod error;
pub mod mc;
pub mod numerics;
pub mod schemes;

pub use error::{Error, Result};
