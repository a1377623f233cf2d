use crc::{Crc, CRC_16_XMODEM};

/// Length of the transport-block CRC in bits.
pub const CRC_BITS: usize = 16;

const CRC16: Crc<u16> = Crc::<u16>::new(&CRC_16_XMODEM);

fn checksum(bits: &[u8]) -> u16 {
    let mut digest = CRC16.digest();
    let mut byte = 0u8;
    for (i, &b) in bits.iter().enumerate() {
        byte = (byte << 1) | (b & 1);
        if i % 8 == 7 {
            digest.update(&[byte]);
            byte = 0;
        }
    }
    let rem = bits.len() % 8;
    if rem != 0 {
        // zero-pad the last partial byte on the left, keeping the bit order
        digest.update(&[byte]);
    }
    digest.finalize()
}

/// Appends a CRC-16 (polynomial 0x1021, zero init) to a bit vector.
pub fn crc_attach(bits: &[u8]) -> Vec<u8> {
    let c = checksum(bits);
    let mut out = bits.to_vec();
    out.extend((0..CRC_BITS).rev().map(|i| ((c >> i) & 1) as u8));
    out
}

/// True when the trailing 16 bits match the CRC of the rest.
pub fn crc_check(block: &[u8]) -> bool {
    if block.len() < CRC_BITS {
        return false;
    }
    let (data, tail) = block.split_at(block.len() - CRC_BITS);
    let c = checksum(data);
    tail.iter().enumerate().all(|(i, &b)| b == ((c >> (CRC_BITS - 1 - i)) & 1) as u8)
}
