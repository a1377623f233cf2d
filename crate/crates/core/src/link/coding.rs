use num_rational::Ratio;
use rand::seq::SliceRandom;

use super::crc::{crc_attach, crc_check, CRC_BITS};
use super::ldpc::LdpcCode;
use crate::error::{Error, Result};
use crate::rng;

pub const MAX_DECODER_ITERATIONS: usize = 50;
const INTERLEAVER_TAG: u64 = 0x171E;

/// CRC attachment, LDPC coding and bit interleaving for one transport
/// block that exactly fills `coded_bits`.
#[derive(Clone, Debug)]
pub struct BlockCodec {
    code: LdpcCode,
    perm: Vec<usize>,
}

impl BlockCodec {
    pub fn new(coded_bits: usize, rate: Ratio<u32>) -> Result<Self> {
        if !(rate > Ratio::new(0, 1) && rate < Ratio::new(1, 1)) {
            return Err(Error::Config(format!("unsupported code rate {rate}")));
        }
        let k = (coded_bits as u64 * *rate.numer() as u64 / *rate.denom() as u64) as usize;
        if k <= CRC_BITS || k >= coded_bits {
            return Err(Error::Config(format!("{coded_bits} coded bits at rate {rate} leave no payload")));
        }
        let code = LdpcCode::new(coded_bits, k)?;
        let mut perm: Vec<usize> = (0..coded_bits).collect();
        perm.shuffle(&mut rng::stream(INTERLEAVER_TAG, &[coded_bits as u64]));
        Ok(Self { code, perm })
    }

    pub fn info_bits(&self) -> usize {
        self.code.k() - CRC_BITS
    }

    pub fn coded_bits(&self) -> usize {
        self.code.n()
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.info_bits() {
            return Err(Error::Dimension(format!("block takes {} bits, got {}", self.info_bits(), info.len())));
        }
        let cw = self.code.encode(&crc_attach(info))?;
        Ok(self.perm.iter().map(|&i| cw[i]).collect())
    }

    /// Returns the decoded payload and whether its CRC passed.
    pub fn decode(&self, llr: &[f64]) -> Result<(Vec<u8>, bool)> {
        if llr.len() != self.coded_bits() {
            return Err(Error::Dimension(format!(
                "block has {} coded bits, got {} LLRs",
                self.coded_bits(),
                llr.len()
            )));
        }
        let mut ordered = vec![0.0; llr.len()];
        for (&i, &l) in self.perm.iter().zip(llr) {
            ordered[i] = l;
        }
        let out = self.code.decode(&ordered, MAX_DECODER_ITERATIONS)?;
        let ok = crc_check(&out.info);
        let mut info = out.info;
        info.truncate(self.info_bits());
        Ok((info, ok))
    }
}
