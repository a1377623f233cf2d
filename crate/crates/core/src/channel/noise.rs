use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Real;

/// Additive white Gaussian noise, specified against a reference signal
/// power. `snr_db = +inf` disables the noise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn disabled() -> Self {
        Self { snr_db: f64::INFINITY, seed: 0 }
    }

    pub fn is_disabled(&self) -> bool {
        self.snr_db == f64::INFINITY
    }

    /// Per-sample noise variance for the given reference signal power.
    pub fn variance(&self, signal_power_ref: f64) -> f64 {
        if self.is_disabled() {
            0.0
        } else {
            signal_power_ref / 10f64.powf(self.snr_db / 10.0)
        }
    }
}

/// Adds circular complex Gaussian noise of variance
/// `signal_power_ref / 10^(snr_db / 10)` per sample.
pub fn add_awgn<T: Real>(s: &[Complex<T>], noise: &NoiseSpec, signal_power_ref: f64) -> Result<Vec<Complex<T>>> {
    if signal_power_ref.is_nan() || signal_power_ref <= 0.0 {
        return Err(Error::Parameter(format!("reference signal power must be positive (got {signal_power_ref})")));
    }
    if noise.is_disabled() {
        return Ok(s.to_vec());
    }
    let sigma = (noise.variance(signal_power_ref) / 2.0).sqrt();
    let mut rng = rng::stream(noise.seed, &[rng::label::NOISE]);
    Ok(s.iter()
        .map(|v| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *v + Complex::new(T::of(sigma * re), T::of(sigma * im))
        })
        .collect())
}
