use std::collections::BTreeMap;

use num_complex::Complex;

use super::DdGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// One tap of a delay-Doppler filter: integer delay bin `k`, integer
/// Doppler bin `l`, complex gain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tap<T: Real> {
    pub k: i64,
    pub l: i64,
    pub gain: Complex<T>,
}

/// Sparse delay-Doppler filter. Taps are kept sorted by `(k, l)` with
/// duplicates merged. The support must fit inside one period on each
/// axis: `|k| < M` and `2 |l| + 1 <= N`.
#[derive(Clone, Debug, PartialEq)]
pub struct DdFilter<T: Real> {
    grid: DdGrid,
    taps: Vec<Tap<T>>,
}

impl<T: Real> DdFilter<T> {
    pub fn new(grid: DdGrid, taps: impl IntoIterator<Item = (i64, i64, Complex<T>)>) -> Result<Self> {
        let mut merged: BTreeMap<(i64, i64), Complex<T>> = BTreeMap::new();
        for (k, l, g) in taps {
            if k.unsigned_abs() as usize >= grid.m() {
                return Err(Error::Parameter(format!("delay tap {k} outside |k| < {}", grid.m())));
            }
            if 2 * l.unsigned_abs() as usize + 1 > grid.n() {
                return Err(Error::Parameter(format!("Doppler tap {l} outside 2|l|+1 <= {}", grid.n())));
            }
            *merged.entry((k, l)).or_insert(Complex::new(T::zero(), T::zero())) += g;
        }
        let taps = merged.into_iter().map(|((k, l), gain)| Tap { k, l, gain }).collect();
        Ok(Self { grid, taps })
    }

    pub fn identity(grid: DdGrid) -> Self {
        Self { grid, taps: vec![Tap { k: 0, l: 0, gain: Complex::new(T::one(), T::zero()) }] }
    }

    pub fn grid(&self) -> &DdGrid {
        &self.grid
    }

    pub fn taps(&self) -> &[Tap<T>] {
        &self.taps
    }

    pub fn gain(&self, k: i64, l: i64) -> Complex<T> {
        self.taps
            .binary_search_by(|t| (t.k, t.l).cmp(&(k, l)))
            .map(|i| self.taps[i].gain)
            .unwrap_or_else(|_| Complex::new(T::zero(), T::zero()))
    }

    /// `(k_min, k_max, l_min, l_max)` over the stored taps.
    pub fn support(&self) -> Option<(i64, i64, i64, i64)> {
        let first = self.taps.first()?;
        Some(self.taps.iter().fold((first.k, first.k, first.l, first.l), |(a, b, c, d), t| {
            (a.min(t.k), b.max(t.k), c.min(t.l), d.max(t.l))
        }))
    }

    pub fn energy(&self) -> T {
        self.taps.iter().map(|t| t.gain.norm_sqr()).sum()
    }

    /// Drops taps whose magnitude is below `rel * max |gain|`.
    pub fn pruned(&self, rel: T) -> Self {
        let peak = self.taps.iter().map(|t| t.gain.norm()).fold(T::zero(), T::max);
        Self { grid: self.grid, taps: self.taps.iter().copied().filter(|t| t.gain.norm() >= rel * peak).collect() }
    }
}
