//! CP-OFDM reference transceiver: comb DMRS with power boost, LS channel
//! estimation with bilinear interpolation, and per-subcarrier MMSE.

mod config;
mod estimate;
mod modem;

pub use config::{DmrsPattern, OfdmConfig, ReRole, ResourceGrid, SLOT_SYMBOLS};
pub use estimate::{estimate_grid_channel, mmse_equalize};
pub use modem::{demodulate, ici_leakage, modulate, pilot_symbol, synthesize_symbol};
