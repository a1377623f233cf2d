//! Discrete delay-Doppler signal representation.
//!
//! A frame lives on an `M x N` lattice of delay bins (spacing `1/B`) and
//! Doppler bins (spacing `1/T`). Frames are quasi-periodic: stepping one
//! delay period multiplies by a Doppler-dependent phase, stepping one
//! Doppler period is a plain wrap. The critically sampled Zak pair in
//! [`zak`] maps frames to `M * N` time samples at rate `B` and back.

mod filter;
mod frame;
mod grid;
mod pulse;
mod twisted;
mod zak;

pub use filter::{DdFilter, Tap};
pub use frame::DdFrame;
pub use grid::DdGrid;
pub use pulse::{gauss_sinc_filter, gauss_sinc_filter_oversampled, DEFAULT_ALPHA, TRUNCATION_THRESHOLD};
pub use twisted::{twisted_adjoint, twisted_convolve, TwistedOperator};
pub use zak::{forward_zak, inverse_zak};
