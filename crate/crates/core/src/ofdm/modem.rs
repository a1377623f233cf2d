use num_complex::Complex;
use rustfft::FftPlanner;

use super::{OfdmConfig, ReRole, ResourceGrid};
use crate::channel::{apply_paths, PathSet, DEFAULT_OVERSAMPLE};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, label};
use crate::scalar::Real;

/// Known QPSK value of the pilot at subcarrier `m`, symbol `s`.
pub fn pilot_symbol<T: Real>(m: usize, s: usize) -> Complex<T> {
    let b = derive_seed(label::PILOT, &[m as u64, s as u64]);
    let h = T::of(std::f64::consts::FRAC_1_SQRT_2);
    let re = if b & 1 == 0 { h } else { -h };
    let im = if b & 2 == 0 { h } else { -h };
    Complex::new(re, im)
}

/// One OFDM symbol: unitary inverse DFT of `bins` (length `n_fft`, zero
/// padded if shorter) with the last `cp` samples prepended.
pub fn synthesize_symbol<T: Real>(bins: &[Complex<T>], n_fft: usize, cp: usize) -> Vec<Complex<T>> {
    let mut body = vec![Complex::new(T::zero(), T::zero()); n_fft];
    body[..bins.len()].copy_from_slice(bins);
    FftPlanner::new().plan_fft_inverse(n_fft).process(&mut body);
    let scale = T::of(1.0 / (n_fft as f64).sqrt());
    body.iter_mut().for_each(|z| *z *= scale);
    let mut out = Vec::with_capacity(n_fft + cp);
    out.extend_from_slice(&body[n_fft - cp..]);
    out.extend_from_slice(&body);
    out
}

/// Maps pilots and data symbols (symbol-major order over data REs) onto the
/// frame and returns the time signal at unit mean power per sample.
pub fn modulate<T: Real>(cfg: &OfdmConfig, data_symbols: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    if data_symbols.len() != cfg.data_count() {
        return Err(Error::Dimension(format!(
            "frame has {} data REs, got {} symbols",
            cfg.data_count(),
            data_symbols.len()
        )));
    }
    let (a_d, a_p) = cfg.amplitudes();
    let (a_d, a_p) = (T::of(a_d), T::of(a_p));
    let mut data = data_symbols.iter();
    let mut bins = vec![Complex::new(T::zero(), T::zero()); cfg.n_sub];
    let mut out = Vec::with_capacity(cfg.frame_len());
    for s in 0..cfg.n_symbols {
        for (m, b) in bins.iter_mut().enumerate() {
            *b = match cfg.role(m, s) {
                ReRole::Pilot => pilot_symbol::<T>(m, s) * a_p,
                ReRole::Data => *data.next().expect("counted above") * a_d,
            };
        }
        out.extend(synthesize_symbol(&bins, cfg.n_fft, cfg.cp_lengths[s]));
    }
    let energy: T = out.iter().map(|z| z.norm_sqr()).sum();
    if energy > T::zero() {
        let g = (T::of(out.len() as f64) / energy).sqrt();
        out.iter_mut().for_each(|z| *z *= g);
    }
    Ok(out)
}

/// Drops each CP and takes the unitary DFT, keeping the active bins.
pub fn demodulate<T: Real>(cfg: &OfdmConfig, rx: &[Complex<T>]) -> Result<ResourceGrid<T>> {
    if rx.len() != cfg.frame_len() {
        return Err(Error::Dimension(format!("expected {} samples, got {}", cfg.frame_len(), rx.len())));
    }
    let fft = FftPlanner::new().plan_fft_forward(cfg.n_fft);
    let scale = T::of(1.0 / (cfg.n_fft as f64).sqrt());
    let mut grid = ResourceGrid::zeros(cfg.n_sub, cfg.n_symbols);
    let mut pos = 0;
    let mut buf = vec![Complex::new(T::zero(), T::zero()); cfg.n_fft];
    for s in 0..cfg.n_symbols {
        pos += cfg.cp_lengths[s];
        buf.copy_from_slice(&rx[pos..pos + cfg.n_fft]);
        pos += cfg.n_fft;
        fft.process(&mut buf);
        for (m, &v) in buf[..cfg.n_sub].iter().enumerate() {
            grid.set(m, s, v * scale);
        }
    }
    Ok(grid)
}

/// Share of received power that a time-varying channel moves off the
/// diagonal of the per-symbol subcarrier-to-subcarrier matrix, for symbol
/// `s` of the frame.
pub fn ici_leakage(cfg: &OfdmConfig, paths: &PathSet, s: usize) -> f64 {
    let start: usize = cfg.cp_lengths[..s].iter().sum::<usize>() + s * cfg.n_fft;
    let cp = cfg.cp_lengths[s];
    let fs = cfg.sample_rate();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(cfg.n_fft);
    let (mut diag, mut off) = (0.0, 0.0);
    let mut bins = vec![Complex::new(0.0, 0.0); cfg.n_sub];
    for j in 0..cfg.n_sub {
        bins.iter_mut().for_each(|b| *b = Complex::new(0.0, 0.0));
        bins[j] = Complex::new(1.0, 0.0);
        let mut tx = vec![Complex::new(0.0, 0.0); cfg.frame_len()];
        let sym = synthesize_symbol(&bins, cfg.n_fft, cp);
        tx[start..start + sym.len()].copy_from_slice(&sym);
        let rx = apply_paths(&tx, fs, paths, DEFAULT_OVERSAMPLE);
        let mut body = rx[start + cp..start + cp + cfg.n_fft].to_vec();
        fft.process(&mut body);
        for (m, v) in body.iter().take(cfg.n_sub).enumerate() {
            let p = v.norm_sqr() / cfg.n_fft as f64;
            if m == j {
                diag += p;
            } else {
                off += p;
            }
        }
    }
    if diag + off > 0.0 {
        off / (diag + off)
    } else {
        0.0
    }
}
