use serde::Serialize;

use crate::error::{Error, Result};

const PERIOD_PRODUCT_TOL: f64 = 1e-12;

/// Zak-OTFS numerology: `M` delay bins per delay period `tau_p`, `N` Doppler
/// bins per Doppler period `nu_p = 1/tau_p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DdGrid {
    m: usize,
    n: usize,
    tau_p: f64,
    nu_p: f64,
}

impl DdGrid {
    pub fn new(m: usize, n: usize, tau_p: f64, nu_p: f64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Parameter(format!("grid needs M, N >= 1 (got {m}x{n})")));
        }
        if !(tau_p > 0.0 && nu_p > 0.0 && tau_p.is_finite() && nu_p.is_finite()) {
            return Err(Error::Parameter("periods must be positive and finite".into()));
        }
        if ((tau_p * nu_p) - 1.0).abs() > PERIOD_PRODUCT_TOL {
            return Err(Error::Parameter(format!(
                "delay and Doppler periods must satisfy tau_p * nu_p = 1 (got {})",
                tau_p * nu_p
            )));
        }
        Ok(Self { m, n, tau_p, nu_p })
    }

    pub fn from_delay_period(m: usize, n: usize, tau_p: f64) -> Result<Self> {
        Self::new(m, n, tau_p, 1.0 / tau_p)
    }

    /// Grid for a resource of `bandwidth x duration` and a requested Doppler
    /// period. `M = round(B / nu_p)` and `N = round(B T / M)`; the Doppler
    /// period is then recomputed as `B / M`. The returned flag is true when
    /// the requested period had to be moved.
    pub fn snapped(bandwidth: f64, duration: f64, nu_p: f64) -> Result<(Self, bool)> {
        if !(bandwidth > 0.0 && duration > 0.0 && nu_p > 0.0) {
            return Err(Error::Parameter("bandwidth, duration and nu_p must be positive".into()));
        }
        let m = (bandwidth / nu_p).round().max(1.0) as usize;
        let carriers = (bandwidth * duration).round().max(1.0) as usize;
        let n = ((carriers as f64) / m as f64).round().max(1.0) as usize;
        let nu = bandwidth / m as f64;
        let grid = Self::new(m, n, 1.0 / nu, nu)?;
        Ok((grid, (nu - nu_p).abs() > 1e-9 * nu_p))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau_p(&self) -> f64 {
        self.tau_p
    }

    pub fn nu_p(&self) -> f64 {
        self.nu_p
    }

    /// Number of carriers `M N`, equal to `B T`.
    pub fn len(&self) -> usize {
        self.m * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bandwidth(&self) -> f64 {
        self.m as f64 / self.tau_p
    }

    pub fn duration(&self) -> f64 {
        self.n as f64 * self.tau_p
    }

    pub fn delay_resolution(&self) -> f64 {
        self.tau_p / self.m as f64
    }

    pub fn doppler_resolution(&self) -> f64 {
        self.nu_p / self.n as f64
    }

    /// Same periods, `factor` times finer sampling on both axes.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::Parameter("refinement factor must be >= 1".into()));
        }
        Self::new(self.m * factor, self.n * factor, self.tau_p, self.nu_p)
    }

    /// Flat index of `(k, l)` in the fundamental domain (delay-major).
    #[inline]
    pub fn index(&self, k: usize, l: usize) -> usize {
        k * self.n + l
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / self.n, idx % self.n)
    }

    pub fn same_lattice(&self, other: &DdGrid) -> bool {
        self.m == other.m && self.n == other.n && (self.tau_p - other.tau_p).abs() <= 1e-12 * self.tau_p
    }
}
