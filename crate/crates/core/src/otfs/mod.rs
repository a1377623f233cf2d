//! Zak-OTFS transceiver with a point pilot.
//!
//! A frame carries one pilot pulsone at the grid center, surrounded by a
//! full-height delay strip (pilot region) and guard strips; the rest of the
//! lattice carries data. The receiver reads the effective channel filter
//! straight off the pilot response and equalizes all data carriers jointly
//! with LSMR, using twisted convolution as the channel operator.

mod equalizer;
mod estimate;
mod layout;
mod modem;

pub use equalizer::{lsmr_equalize, DataOperator, EqualizerOutput, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use estimate::{doppler_window, estimate_channel};
pub use layout::{k_max_for, FrameLayout, LayoutVariant, Role};
pub use modem::{demodulate, modulate, OtfsConfig, PowerSplit};

use crate::dd::DdGrid;

/// True when the delay period strictly exceeds the delay spread and the
/// Doppler period strictly exceeds the Doppler spread, i.e. the channel
/// response to one pulsone predicts the response to every other pulsone.
pub fn crystallization_check(tau_max: f64, nu_max: f64, grid: &DdGrid) -> bool {
    grid.tau_p() > tau_max && grid.nu_p() > nu_max
}
