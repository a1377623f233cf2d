use num_rational::Ratio;

use super::crc::CRC_BITS;
use super::qam::Modulation;
use crate::error::{Error, Result};

/// Modulation and code rate pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mcs {
    pub id: u8,
    pub modulation: Modulation,
    pub code_rate: Ratio<u32>,
}

const fn entry(id: u8, modulation: Modulation, num: u32, den: u32) -> Mcs {
    Mcs { id, modulation, code_rate: Ratio::new_raw(num, den) }
}

pub const MCS_TABLE: [Mcs; 9] = [
    entry(0, Modulation::Qpsk, 1, 3),
    entry(1, Modulation::Qpsk, 1, 2),
    entry(2, Modulation::Qpsk, 2, 3),
    entry(3, Modulation::Qam16, 1, 2),
    entry(4, Modulation::Qam16, 2, 3),
    entry(5, Modulation::Qam16, 3, 4),
    entry(6, Modulation::Qam64, 2, 3),
    entry(7, Modulation::Qam64, 3, 4),
    entry(8, Modulation::Qam64, 5, 6),
];

impl Mcs {
    pub fn by_id(id: u8) -> Result<Self> {
        MCS_TABLE.iter().copied().find(|m| m.id == id).ok_or_else(|| Error::Config(format!("unknown MCS id {id}")))
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.modulation.bits_per_symbol()
    }

    /// Information bits per modulation symbol, before CRC.
    pub fn spectral_efficiency(&self) -> f64 {
        self.bits_per_symbol() as f64 * *self.code_rate.numer() as f64 / *self.code_rate.denom() as f64
    }

    /// Encoder input length (payload plus CRC) for a block filling `res`
    /// resource elements.
    pub fn code_dimension(&self, res: usize) -> usize {
        let n = (res * self.bits_per_symbol()) as u64;
        (n * *self.code_rate.numer() as u64 / *self.code_rate.denom() as u64) as usize
    }

    /// Payload bits of one transport block over `res` resource elements.
    pub fn info_bits(&self, res: usize) -> usize {
        self.code_dimension(res).saturating_sub(CRC_BITS)
    }

    pub fn name(&self) -> String {
        format!("{}-{}/{}", self.modulation.name(), self.code_rate.numer(), self.code_rate.denom())
    }
}
