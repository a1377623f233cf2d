//! Doubly-spread multipath channels: path model, the Vehicular-A profile,
//! time-domain application and additive noise.

mod apply;
mod noise;

pub use apply::{apply_paths, apply_paths_periodic, DEFAULT_OVERSAMPLE};
pub use noise::{add_awgn, NoiseSpec};

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::C64;

/// One propagation path: `y(t) += gain * s(t - delay) * exp(j 2π doppler (t - delay))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Path {
    pub gain: C64,
    /// seconds, non-negative
    pub delay: f64,
    /// Hz
    pub doppler: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathSet {
    paths: Vec<Path>,
}

impl PathSet {
    pub fn new(paths: Vec<Path>) -> Result<Self> {
        if let Some(p) = paths.iter().find(|p| p.delay.is_nan() || p.delay < 0.0 || !p.doppler.is_finite()) {
            return Err(Error::Parameter(format!("invalid path {p:?}")));
        }
        Ok(Self { paths })
    }

    /// A single unit path with no delay or Doppler.
    pub fn identity() -> Self {
        Self { paths: vec![Path { gain: C64::new(1.0, 0.0), delay: 0.0, doppler: 0.0 }] }
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn tau_max(&self) -> f64 {
        self.paths.iter().map(|p| p.delay).fold(0.0, f64::max)
    }

    pub fn nu_max(&self) -> f64 {
        self.paths.iter().map(|p| p.doppler.abs()).fold(0.0, f64::max)
    }

    pub fn power(&self) -> f64 {
        self.paths.iter().map(|p| p.gain.norm_sqr()).sum()
    }

    /// Scales gains so that `Σ |gain|^2 = 1`.
    pub fn normalized(mut self) -> Self {
        let p = self.power();
        if p > 0.0 {
            let s = p.sqrt();
            self.paths.iter_mut().for_each(|q| q.gain /= s);
        }
        self
    }
}

/// ITU-R Vehicular-A tap delays (seconds).
pub const VEH_A_DELAYS: [f64; 6] = [0.0, 0.31e-6, 0.71e-6, 1.09e-6, 1.73e-6, 2.51e-6];
/// ITU-R Vehicular-A tap powers (dB).
pub const VEH_A_POWERS_DB: [f64; 6] = [0.0, -1.0, -9.0, -10.0, -15.0, -20.0];

/// How per-path Doppler shifts are drawn from the maximum Doppler.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DopplerModel {
    /// `nu_max cos(theta)` with `theta` uniform on `[0, 2π)`.
    #[default]
    Jakes,
    /// `±nu_max` with a random sign per path.
    Extreme,
}

/// The standard Veh-A profile (`tau_max = 2.51 us`) with Jakes Dopplers.
pub fn veh_a_paths(nu_max: f64, seed: u64) -> PathSet {
    veh_a_scaled(VEH_A_DELAYS[5], nu_max, DopplerModel::Jakes, seed)
}

/// Veh-A with the delay list scaled linearly so that its largest delay is
/// `tau_max`. `tau_max = 0` collapses the profile to a single unit path.
/// Every path gets an independent uniform phase.
pub fn veh_a_scaled(tau_max: f64, nu_max: f64, model: DopplerModel, seed: u64) -> PathSet {
    let mut rng = rng::stream(seed, &[rng::label::CHANNEL]);
    let doppler = |rng: &mut rand_chacha::ChaCha8Rng| match model {
        DopplerModel::Jakes => nu_max * (TAU * rng.random::<f64>()).cos(),
        DopplerModel::Extreme => {
            if rng.random::<bool>() {
                nu_max
            } else {
                -nu_max
            }
        }
    };
    let paths = if tau_max <= 0.0 {
        let phase = TAU * rng.random::<f64>();
        vec![Path { gain: C64::from_polar(1.0, phase), delay: 0.0, doppler: doppler(&mut rng) }]
    } else {
        let scale = tau_max / VEH_A_DELAYS[5];
        VEH_A_DELAYS
            .iter()
            .zip(VEH_A_POWERS_DB)
            .map(|(&d, p_db)| {
                let amp = 10f64.powf(p_db / 20.0);
                let phase = TAU * rng.random::<f64>();
                Path { gain: C64::from_polar(amp, phase), delay: d * scale, doppler: doppler(&mut rng) }
            })
            .collect()
    };
    PathSet { paths }.normalized()
}
