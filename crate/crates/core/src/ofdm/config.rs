use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// OFDM symbols per slot.
pub const SLOT_SYMBOLS: usize = 14;

const NR_BASE_SCS: f64 = 15e3;
const NR_FFT_STEP: usize = 128;

/// Pilot symbols and the frequency comb they occupy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DmrsPattern {
    pub time_positions: Vec<usize>,
    pub freq_comb: usize,
    pub freq_offset: usize,
}

impl DmrsPattern {
    /// Front-loaded mapping at symbol 2 of every slot plus `additional`
    /// (0..=3) later symbols, comb 2, offset 0.
    pub fn type_a(additional: usize, n_symbols: usize) -> Result<Self> {
        let in_slot: &[usize] = match additional {
            0 => &[2],
            1 => &[2, 11],
            2 => &[2, 7, 11],
            3 => &[2, 5, 8, 11],
            _ => return Err(Error::Parameter(format!("dmrs additional positions {additional} not in 0..=3"))),
        };
        let time_positions = (0..n_symbols.div_ceil(SLOT_SYMBOLS))
            .flat_map(|slot| in_slot.iter().map(move |p| slot * SLOT_SYMBOLS + p))
            .filter(|&s| s < n_symbols)
            .collect();
        Ok(Self { time_positions, freq_comb: 2, freq_offset: 0 })
    }

    pub fn is_pilot(&self, m: usize, s: usize) -> bool {
        m % self.freq_comb == self.freq_offset % self.freq_comb && self.time_positions.contains(&s)
    }

    /// Number of `additional` positions for a Type-A pattern, if it is one.
    pub fn additional(&self) -> Option<usize> {
        let first: Vec<usize> = self.time_positions.iter().copied().take_while(|&s| s < SLOT_SYMBOLS).collect();
        match first.as_slice() {
            [2] => Some(0),
            [2, 11] => Some(1),
            [2, 7, 11] => Some(2),
            [2, 5, 8, 11] => Some(3),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReRole {
    Pilot,
    Data,
}

/// Numerology and reference-signal setup of one OFDM frame.
///
/// Sampling runs at `n_fft * delta_f`; the allocation occupies FFT bins
/// `0..n_sub`.
#[derive(Clone, Debug, PartialEq)]
pub struct OfdmConfig {
    pub delta_f: f64,
    pub n_sub: usize,
    pub n_fft: usize,
    pub n_symbols: usize,
    /// CP length in samples, per symbol.
    pub cp_lengths: Vec<usize>,
    pub dmrs: DmrsPattern,
    pub boost_db: f64,
}

fn subcarriers(bandwidth: f64, delta_f: f64) -> Result<usize> {
    if !(bandwidth > 0.0 && delta_f > 0.0) {
        return Err(Error::Parameter("bandwidth and subcarrier spacing must be positive".into()));
    }
    let n = (bandwidth / delta_f).round();
    if n < 1.0 || (n * delta_f - bandwidth).abs() > 1e-6 * bandwidth {
        return Err(Error::Parameter(format!("{bandwidth} Hz is not a multiple of {delta_f} Hz")));
    }
    Ok(n as usize)
}

impl OfdmConfig {
    /// NR numerology: `delta_f = 15 kHz * 2^mu`, 14 symbols per slot, normal
    /// CP (144/2048 of the FFT length, 16/2048 more on the first symbol of
    /// each half millisecond). The FFT length is the smallest multiple of 128
    /// covering the allocation, which keeps every CP an integer number of
    /// samples.
    pub fn nr(bandwidth: f64, duration: f64, delta_f: f64, dmrs_additional: usize, boost_db: f64) -> Result<Self> {
        let n_sub = subcarriers(bandwidth, delta_f)?;
        let ratio = delta_f / NR_BASE_SCS;
        let mu = ratio.log2().round();
        if mu < 0.0 || (2f64.powf(mu) - ratio).abs() > 1e-9 {
            return Err(Error::Parameter(format!("{delta_f} Hz is not an NR subcarrier spacing")));
        }
        let scale = 2usize.pow(mu as u32);
        let slots_f = duration * 1e3 * scale as f64;
        let slots = slots_f.round();
        if slots < 1.0 || (slots - slots_f).abs() > 1e-6 {
            return Err(Error::Parameter(format!("duration {duration} s is not a whole number of slots")));
        }
        let n_symbols = SLOT_SYMBOLS * slots as usize;
        let n_fft = n_sub.div_ceil(NR_FFT_STEP).max(1) * NR_FFT_STEP;
        let short = n_fft * 144 / 2048;
        let extra = n_fft * 16 / 2048 * scale;
        let half_ms = 7 * scale;
        let cp_lengths = (0..n_symbols).map(|s| if s % half_ms == 0 { short + extra } else { short }).collect();
        Ok(Self {
            delta_f,
            n_sub,
            n_fft,
            n_symbols,
            cp_lengths,
            dmrs: DmrsPattern::type_a(dmrs_additional, n_symbols)?,
            boost_db,
        })
    }

    /// Critically sampled frame: `n_fft = n_sub`, a fixed CP of
    /// `ceil(t_cp B)` samples, and as many symbols as fit in `duration`.
    pub fn critical(
        bandwidth: f64,
        duration: f64,
        delta_f: f64,
        t_cp: f64,
        dmrs: DmrsPattern,
        boost_db: f64,
    ) -> Result<Self> {
        if t_cp < 0.0 {
            return Err(Error::Parameter("negative cyclic prefix".into()));
        }
        let n_sub = subcarriers(bandwidth, delta_f)?;
        let cp = (t_cp * bandwidth - 1e-9).ceil().max(0.0) as usize;
        let n_symbols = (duration * bandwidth / (n_sub + cp) as f64 + 1e-9).floor() as usize;
        if n_symbols == 0 {
            return Err(Error::Parameter("no OFDM symbol fits in the frame".into()));
        }
        if dmrs.freq_comb == 0 || dmrs.time_positions.iter().any(|&s| s >= n_symbols) {
            return Err(Error::Parameter("DMRS pattern does not fit the frame".into()));
        }
        Ok(Self { delta_f, n_sub, n_fft: n_sub, n_symbols, cp_lengths: vec![cp; n_symbols], dmrs, boost_db })
    }

    pub fn sample_rate(&self) -> f64 {
        self.n_fft as f64 * self.delta_f
    }

    pub fn bandwidth(&self) -> f64 {
        self.n_sub as f64 * self.delta_f
    }

    pub fn frame_len(&self) -> usize {
        self.cp_lengths.iter().sum::<usize>() + self.n_symbols * self.n_fft
    }

    pub fn duration(&self) -> f64 {
        self.frame_len() as f64 / self.sample_rate()
    }

    /// Shortest CP in seconds.
    pub fn t_cp(&self) -> f64 {
        self.cp_lengths.iter().copied().min().unwrap_or(0) as f64 / self.sample_rate()
    }

    /// Fraction of the frame spent on cyclic prefixes.
    pub fn cp_fraction(&self) -> f64 {
        self.cp_lengths.iter().sum::<usize>() as f64 / self.frame_len() as f64
    }

    pub fn role(&self, m: usize, s: usize) -> ReRole {
        if self.dmrs.is_pilot(m, s) {
            ReRole::Pilot
        } else {
            ReRole::Data
        }
    }

    pub fn pilot_count(&self) -> usize {
        let comb = self.dmrs.freq_comb.max(1);
        let per_symbol = (0..self.n_sub).filter(|m| m % comb == self.dmrs.freq_offset % comb).count();
        self.dmrs.time_positions.len() * per_symbol
    }

    pub fn data_count(&self) -> usize {
        self.n_sub * self.n_symbols - self.pilot_count()
    }

    /// Fraction of resource elements spent on DMRS.
    pub fn pilot_fraction(&self) -> f64 {
        self.pilot_count() as f64 / (self.n_sub * self.n_symbols) as f64
    }

    /// Nominal (data, pilot) amplitudes giving unit mean power per sample.
    pub fn amplitudes(&self) -> (f64, f64) {
        let boost = 10f64.powf(self.boost_db / 10.0);
        let weight = self.data_count() as f64 + boost * self.pilot_count() as f64;
        let data = (self.frame_len() as f64 / weight).sqrt();
        (data, data * boost.sqrt())
    }

    /// Signal power that an SNR refers to: the in-band share of the unit
    /// sample power, so the SNR is per active subcarrier.
    pub fn noise_reference(&self) -> f64 {
        self.n_fft as f64 / self.n_sub as f64
    }
}

/// Frequency-time grid of one frame, `n_sub` subcarriers by `n_symbols`
/// symbols, stored symbol-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ResourceGrid<T: Real> {
    n_sub: usize,
    n_symbols: usize,
    values: Vec<Complex<T>>,
}

impl<T: Real> ResourceGrid<T> {
    pub fn zeros(n_sub: usize, n_symbols: usize) -> Self {
        Self { n_sub, n_symbols, values: vec![Complex::new(T::zero(), T::zero()); n_sub * n_symbols] }
    }

    pub fn from_vec(n_sub: usize, n_symbols: usize, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != n_sub * n_symbols {
            return Err(Error::Dimension(format!("{} values for a {n_sub}x{n_symbols} grid", values.len())));
        }
        Ok(Self { n_sub, n_symbols, values })
    }

    pub fn n_sub(&self) -> usize {
        self.n_sub
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn get(&self, m: usize, s: usize) -> Complex<T> {
        self.values[s * self.n_sub + m]
    }

    pub fn set(&mut self, m: usize, s: usize, v: Complex<T>) {
        self.values[s * self.n_sub + m] = v;
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn symbol(&self, s: usize) -> &[Complex<T>] {
        &self.values[s * self.n_sub..(s + 1) * self.n_sub]
    }
}
