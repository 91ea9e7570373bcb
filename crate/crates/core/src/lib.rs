//! Lattices, parabolic groups, period sections and theta characters for the
//! rank-16 even unimodular lattices E8+E8 and Gamma16.

pub mod ambient;
pub mod error;
pub mod exec;
pub mod family;
pub mod lattice;
pub mod linalg;
pub mod narain;
pub mod parabolic;
pub mod period;
pub mod sweep;
pub mod theta;

pub use error::{Error, Result};
pub use exec::ExecMode;
