//! Gauss-sinc pulse shaping in the delay-Doppler domain.
//!
//! The prototype is `w(x) = sinc(x) exp(-alpha x^2)` on each axis, `x` in
//! units of one delay (or Doppler) bin. Sampled on the integer lattice the
//! sinc factor is a Kronecker delta, so the critically sampled filter is the
//! identity; the oversampled variant exposes the pulse shape itself.

use num_complex::Complex;

use super::{DdFilter, DdGrid};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Taps below this fraction of the peak magnitude are discarded.
pub const TRUNCATION_THRESHOLD: f64 = 1e-6;

pub const DEFAULT_ALPHA: f64 = 0.01;

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

fn prototype(x: f64, alpha: f64) -> f64 {
    sinc(x) * (-alpha * x * x).exp()
}

/// Critically sampled Gauss-sinc filter on `grid`.
pub fn gauss_sinc_filter<T: Real>(grid: DdGrid, alpha_tau: f64, alpha_nu: f64) -> Result<DdFilter<T>> {
    gauss_sinc_filter_oversampled(grid, alpha_tau, alpha_nu, 1)
}

/// Gauss-sinc filter sampled every `1/oversample` bin. The taps live on
/// `grid.refined(oversample)` and are clipped to one period around the
/// origin on each axis.
pub fn gauss_sinc_filter_oversampled<T: Real>(
    grid: DdGrid,
    alpha_tau: f64,
    alpha_nu: f64,
    oversample: usize,
) -> Result<DdFilter<T>> {
    if !(alpha_tau > 0.0 && alpha_nu > 0.0) {
        return Err(Error::Parameter(format!("Gauss-sinc spreads must be positive (got {alpha_tau}, {alpha_nu})")));
    }
    let fine = grid.refined(oversample)?;
    let os = oversample as f64;
    let half_k = (fine.m() as i64 - 1) / 2;
    let half_l = (fine.n() as i64 - 1) / 2;
    let wk: Vec<(i64, f64)> = (-half_k..=half_k).map(|k| (k, prototype(k as f64 / os, alpha_tau))).collect();
    let wl: Vec<(i64, f64)> = (-half_l..=half_l).map(|l| (l, prototype(l as f64 / os, alpha_nu))).collect();
    // peak of the separable product is w(0) w(0) = 1
    let taps = wk.iter().flat_map(|&(k, a)| {
        wl.iter().filter_map(move |&(l, b)| {
            let w = a * b;
            (w.abs() >= TRUNCATION_THRESHOLD).then(|| (k, l, Complex::new(T::of(w), T::zero())))
        })
    });
    DdFilter::new(fine, taps)
}
