use num_complex::Complex;

use super::DdGrid;
use crate::error::{Error, Result};
use crate::scalar::{cis_turns, norm_sqr, Real};

/// `M x N` complex symbols on the fundamental domain of a [`DdGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct DdFrame<T: Real> {
    grid: DdGrid,
    symbols: Vec<Complex<T>>,
}

impl<T: Real> DdFrame<T> {
    pub fn zeros(grid: DdGrid) -> Self {
        Self { grid, symbols: vec![Complex::new(T::zero(), T::zero()); grid.len()] }
    }

    pub fn from_vec(grid: DdGrid, symbols: Vec<Complex<T>>) -> Result<Self> {
        if symbols.len() != grid.len() {
            return Err(Error::Dimension(format!("frame needs {} symbols, got {}", grid.len(), symbols.len())));
        }
        Ok(Self { grid, symbols })
    }

    /// Frame with a single unit pulse at `(k, l)`.
    pub fn impulse(grid: DdGrid, k: usize, l: usize) -> Self {
        let mut f = Self::zeros(grid);
        f.set(k, l, Complex::new(T::one(), T::zero()));
        f
    }

    pub fn grid(&self) -> &DdGrid {
        &self.grid
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.symbols
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.symbols
    }

    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.symbols
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize) -> Complex<T> {
        self.symbols[self.grid.index(k, l)]
    }

    #[inline]
    pub fn set(&mut self, k: usize, l: usize, v: Complex<T>) {
        let i = self.grid.index(k, l);
        self.symbols[i] = v;
    }

    /// Quasi-periodic extension: the value at `(k0 + a M, l0 + b N)` is
    /// `symbols[k0, l0] * exp(j 2π a l0 / N)`.
    pub fn extended_at(&self, k: i64, l: i64) -> Complex<T> {
        let (m, n) = (self.grid.m() as i64, self.grid.n() as i64);
        let a = k.div_euclid(m);
        let k0 = k.rem_euclid(m) as usize;
        let l0 = l.rem_euclid(n) as usize;
        let v = self.get(k0, l0);
        if a == 0 {
            v
        } else {
            v * cis_turns::<T>((a * l0 as i64) as f64 / n as f64)
        }
    }

    pub fn energy(&self) -> T {
        norm_sqr(&self.symbols)
    }
}
