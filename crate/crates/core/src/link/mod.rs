//! Modulation, channel coding and Monte-Carlo link simulation.
//!
//! One transport block per frame fills the data resource elements: payload,
//! CRC-16, a systematic IRA LDPC code at the MCS rate, a fixed bit
//! interleaver and Gray QAM. Effective spectral efficiency counts payload
//! bits only and only when the measured block error rate meets the gate.

mod coding;
mod crc;
mod ldpc;
mod mcs;
mod qam;
mod sim;

pub use coding::{BlockCodec, MAX_DECODER_ITERATIONS};
pub use crc::{crc_attach, crc_check, CRC_BITS};
pub use ldpc::{DecodeOutput, LdpcCode};
pub use mcs::{Mcs, MCS_TABLE};
pub use qam::{qam_demap, qam_map, Modulation};
pub use sim::{
    failing_errors, run_link, wilson_interval, ChannelSpec, LinkConfig, LinkResult, RunParams, Waveform, CHUNK_FRAMES,
};
