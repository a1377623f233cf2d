use num_complex::Complex;

use super::FrameLayout;
use crate::dd::{forward_zak, gauss_sinc_filter, inverse_zak, DdFilter, DdFrame, DdGrid, TwistedOperator};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Nominal amplitudes of a data carrier and of the pilot for a frame whose
/// total energy is `M N` (unit mean power per time sample).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerSplit {
    pub data_amp: f64,
    pub pilot_amp: f64,
}

impl PowerSplit {
    /// `pdr_db` is the pilot energy relative to the energy of one data
    /// carrier: `d P_d + P_p = carriers` and `P_p = 10^(pdr/10) P_d`.
    pub fn new(carriers: usize, data_carriers: usize, pdr_db: f64) -> Self {
        let ratio = 10f64.powf(pdr_db / 10.0);
        let p_data = carriers as f64 / (data_carriers as f64 + ratio);
        Self { data_amp: p_data.sqrt(), pilot_amp: (ratio * p_data).sqrt() }
    }
}

#[derive(Clone, Debug)]
pub struct OtfsConfig {
    pub layout: FrameLayout,
    pub pdr_db: f64,
    pub alpha_tau: f64,
    pub alpha_nu: f64,
}

impl OtfsConfig {
    pub fn new(layout: FrameLayout, pdr_db: f64) -> Self {
        Self { layout, pdr_db, alpha_tau: crate::dd::DEFAULT_ALPHA, alpha_nu: crate::dd::DEFAULT_ALPHA }
    }

    pub fn grid(&self) -> &DdGrid {
        self.layout.grid()
    }

    pub fn power_split(&self) -> PowerSplit {
        PowerSplit::new(self.grid().len(), self.layout.data_region().len(), self.pdr_db)
    }

    pub fn tx_filter<T: Real>(&self) -> Result<DdFilter<T>> {
        gauss_sinc_filter(*self.grid(), self.alpha_tau, self.alpha_nu)
    }
}

/// Builds the delay-Doppler frame (pilot, zeros in guard, scaled data),
/// applies the transmit pulse filter and returns the time realization,
/// scaled to unit mean power per sample.
pub fn modulate<T: Real>(cfg: &OtfsConfig, data_symbols: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let layout = &cfg.layout;
    let data_idx = layout.data_region();
    if data_symbols.len() != data_idx.len() {
        return Err(Error::Dimension(format!(
            "layout has {} data carriers, got {} symbols",
            data_idx.len(),
            data_symbols.len()
        )));
    }
    let grid = *cfg.grid();
    let power = cfg.power_split();
    let mut frame = DdFrame::<T>::zeros(grid);
    let amp = T::of(power.data_amp);
    {
        let buf = frame.as_mut_slice();
        for (&i, &x) in data_idx.iter().zip(data_symbols) {
            buf[i] = x * amp;
        }
    }
    let (kp, lp) = layout.pilot();
    frame.set(kp, lp, Complex::new(T::of(power.pilot_amp), T::zero()));

    let filter = cfg.tx_filter::<T>()?;
    let shaped =
        if filter == DdFilter::identity(grid) { frame } else { TwistedOperator::new(&filter).apply(&frame)? };
    let mut s = inverse_zak(&shaped);
    let energy: T = s.iter().map(|z| z.norm_sqr()).sum();
    if energy > T::zero() {
        let g = (T::of(grid.len() as f64) / energy).sqrt();
        s.iter_mut().for_each(|z| *z *= g);
    }
    Ok(s)
}

/// Received time samples back to the delay-Doppler domain.
pub fn demodulate<T: Real>(rx: &[Complex<T>], grid: DdGrid) -> Result<DdFrame<T>> {
    forward_zak(rx, grid)
}
