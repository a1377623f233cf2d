use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// SINR used in place of an infinite one so LLRs stay finite.
const SINR_CAP: f64 = 1e10;

/// Gray-mapped square QAM with unit average power.
///
/// Bit labels follow the NR convention, e.g. QPSK maps `(b0, b1)` to
/// `((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)`, so `00` is `(1 + j) / sqrt(2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
            Modulation::Qam64 => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Modulation::Qpsk => "qpsk",
            Modulation::Qam16 => "16qam",
            Modulation::Qam64 => "64qam",
        }
    }

    /// Point for the label whose first bit is the most significant.
    pub fn point(self, label: usize) -> Complex64 {
        let q = self.bits_per_symbol();
        let b = |i: usize| 1.0 - 2.0 * ((label >> (q - 1 - i)) & 1) as f64;
        match self {
            Modulation::Qpsk => Complex64::new(b(0), b(1)) / 2f64.sqrt(),
            Modulation::Qam16 => Complex64::new(b(0) * (2.0 - b(2)), b(1) * (2.0 - b(3))) / 10f64.sqrt(),
            Modulation::Qam64 => {
                Complex64::new(b(0) * (4.0 - b(2) * (2.0 - b(4))), b(1) * (4.0 - b(3) * (2.0 - b(5)))) / 42f64.sqrt()
            }
        }
    }

    pub fn constellation(self) -> Vec<Complex64> {
        (0..1 << self.bits_per_symbol()).map(|i| self.point(i)).collect()
    }

    /// Nearest constellation point.
    pub fn slice(self, z: Complex64) -> Complex64 {
        // per-axis levels are symmetric and evenly spaced, so round on each axis
        let (levels, scale) = match self {
            Modulation::Qpsk => (1.0, 2f64.sqrt()),
            Modulation::Qam16 => (3.0, 10f64.sqrt()),
            Modulation::Qam64 => (7.0, 42f64.sqrt()),
        };
        let axis = |v: f64| {
            let x = ((v * scale + levels) / 2.0).round().clamp(0.0, levels) * 2.0 - levels;
            x / scale
        };
        Complex64::new(axis(z.re), axis(z.im))
    }
}

/// Maps bits (one per byte, 0 or 1) to symbols.
pub fn qam_map(bits: &[u8], modulation: Modulation) -> Result<Vec<Complex64>> {
    let q = modulation.bits_per_symbol();
    if !bits.len().is_multiple_of(q) {
        return Err(Error::Dimension(format!("{} bits is not a multiple of {q}", bits.len())));
    }
    Ok(bits.chunks(q).map(|c| modulation.point(c.iter().fold(0, |acc, &b| (acc << 1) | (b & 1) as usize))).collect())
}

/// Max-log LLRs, positive for bit 0. `sinr[i]` is the SINR of `symbols[i]`
/// relative to the unit-power constellation.
pub fn qam_demap(symbols: &[Complex64], sinr: &[f64], modulation: Modulation) -> Result<Vec<f64>> {
    if symbols.len() != sinr.len() {
        return Err(Error::Dimension(format!("{} symbols but {} SINR values", symbols.len(), sinr.len())));
    }
    let q = modulation.bits_per_symbol();
    let points = modulation.constellation();
    let mut llr = Vec::with_capacity(symbols.len() * q);
    let mut d = vec![0.0; points.len()];
    for (&z, &g) in symbols.iter().zip(sinr) {
        let g = g.clamp(0.0, SINR_CAP);
        for (di, p) in d.iter_mut().zip(&points) {
            *di = (z - p).norm_sqr();
        }
        for i in 0..q {
            let mask = 1 << (q - 1 - i);
            let (mut d0, mut d1) = (f64::INFINITY, f64::INFINITY);
            for (label, &di) in d.iter().enumerate() {
                if label & mask == 0 {
                    d0 = d0.min(di);
                } else {
                    d1 = d1.min(di);
                }
            }
            llr.push(g * (d1 - d0));
        }
    }
    Ok(llr)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [Modulation; 3] = [Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64];

    #[test]
    fn qpsk_anchor() {
        let s = qam_map(&[0, 0, 1, 0], Modulation::Qpsk).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s[0] - Complex64::new(h, h)).norm() < 1e-15);
        assert!((s[1] - Complex64::new(-h, h)).norm() < 1e-15);
    }

    #[test]
    fn unit_average_power() {
        for m in ALL {
            let p: f64 =
                m.constellation().iter().map(|z| z.norm_sqr()).sum::<f64>() / (1 << m.bits_per_symbol()) as f64;
            assert!((p - 1.0).abs() < 1e-12, "{m:?}");
        }
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        for m in ALL {
            let pts = m.constellation();
            let dmin = pts
                .iter()
                .enumerate()
                .flat_map(|(i, a)| pts.iter().skip(i + 1).map(move |b| (a - b).norm()))
                .fold(f64::INFINITY, f64::min);
            for (i, a) in pts.iter().enumerate() {
                for (j, b) in pts.iter().enumerate() {
                    if i != j && ((a - b).norm() - dmin).abs() < 1e-9 {
                        assert_eq!((i ^ j).count_ones(), 1, "{m:?} {i} {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn round_trip_at_infinite_sinr() {
        for m in ALL {
            let bits: Vec<u8> =
                (0..m.bits_per_symbol() << m.bits_per_symbol()).map(|i| ((i * 7 + i / 3) % 2) as u8).collect();
            let s = qam_map(&bits, m).unwrap();
            let llr = qam_demap(&s, &vec![f64::INFINITY; s.len()], m).unwrap();
            let back: Vec<u8> = llr.iter().map(|&l| u8::from(l < 0.0)).collect();
            assert_eq!(back, bits);
            assert!(llr.iter().all(|l| l.is_finite()));
        }
    }

    #[test]
    fn slicer_matches_exhaustive_search() {
        for m in ALL {
            let pts = m.constellation();
            for i in 0..200 {
                let z = Complex64::new((i as f64 * 0.37).sin() * 1.3, (i as f64 * 0.91).cos() * 1.3);
                let best = pts.iter().copied().min_by(|a, b| (z - a).norm().total_cmp(&(z - b).norm())).unwrap();
                assert!((m.slice(z) - best).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn length_errors() {
        assert!(qam_map(&[0, 1, 0], Modulation::Qpsk).is_err());
        assert!(qam_demap(&[Complex64::new(0.0, 0.0)], &[], Modulation::Qpsk).is_err());
    }
}
