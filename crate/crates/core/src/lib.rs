//! Scheduling friendly jammers around a protected storage region so that
//! legitimate links stay clear while eavesdroppers beyond the fence stay
//! jammed, for as many time slots as the batteries allow.

pub mod energy;
pub mod error;
pub mod geometry;
pub mod greedy;
pub mod harness;
pub mod ilp;
pub mod lifetime;
pub mod mrs;
pub mod oracles;
pub mod schedule;
pub mod sinr;

pub use error::{Error, Result};
