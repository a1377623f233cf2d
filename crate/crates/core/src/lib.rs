//! Link-level simulation of Zak-OTFS and CP-OFDM over doubly-spread
//! channels.
//!
//! The signal-processing modules are generic over the sample precision
//! ([`Real`] is implemented for `f32` and `f64`); the link layer and the
//! sweep harness run in `f64`. Aliases for the common instantiations are
//! exported at the crate root.

pub mod channel;
pub mod dd;
pub mod error;
pub mod link;
pub mod lsmr;
pub mod ofdm;
pub mod otfs;
pub mod overhead;
pub mod rng;
pub mod scalar;
pub mod selftest;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::Real;

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;
pub type DdFrame64 = dd::DdFrame<f64>;
pub type DdFrame32 = dd::DdFrame<f32>;
pub type DdFilter64 = dd::DdFilter<f64>;
pub type DdFilter32 = dd::DdFilter<f32>;
