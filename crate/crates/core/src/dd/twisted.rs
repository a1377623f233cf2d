use num_complex::Complex;

use super::{DdFilter, DdFrame, DdGrid};
use crate::error::{Error, Result};
use crate::scalar::{cis_turns, Real};

/// A delay-Doppler filter unrolled into its sparse operator form.
///
/// The filter acts by twisted convolution,
///
/// ```text
/// y[k, l] = Σ_{(k', l')} h[k', l'] x_ext(k - k', l - l') exp(j 2π l' (k - k') / (M N)),
/// ```
///
/// where `x_ext` is the quasi-periodic extension of `x`. Every phase in the
/// expression is a multiple of `1 / (M N)`, so each coefficient is a tap gain
/// times an `M N`-th root of unity.
#[derive(Clone, Debug)]
pub struct TwistedOperator<T: Real> {
    grid: DdGrid,
    // (output index, input index, coefficient), grouped by output index
    entries: Vec<(u32, u32, Complex<T>)>,
}

impl<T: Real> TwistedOperator<T> {
    pub fn new(h: &DdFilter<T>) -> Self {
        let grid = *h.grid();
        let (m, n) = (grid.m() as i64, grid.n() as i64);
        let mn = m * n;
        let roots: Vec<Complex<T>> = (0..mn).map(|i| cis_turns::<T>(i as f64 / mn as f64)).collect();
        let mut entries = Vec::with_capacity(grid.len() * h.taps().len());
        for k in 0..m {
            for l in 0..n {
                let out = (k * n + l) as u32;
                for tap in h.taps() {
                    let kk = k - tap.k;
                    let a = kk.div_euclid(m);
                    let k0 = kk.rem_euclid(m);
                    let l0 = (l - tap.l).rem_euclid(n);
                    let phase = (tap.l * kk + a * l0 * m).rem_euclid(mn) as usize;
                    entries.push((out, (k0 * n + l0) as u32, tap.gain * roots[phase]));
                }
            }
        }
        Self { grid, entries }
    }

    pub fn grid(&self) -> &DdGrid {
        &self.grid
    }

    /// `y = H x` on flat delay-major buffers.
    pub fn apply_into(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        y.iter_mut().for_each(|v| *v = Complex::new(T::zero(), T::zero()));
        for &(o, i, c) in &self.entries {
            y[o as usize] += c * x[i as usize];
        }
    }

    /// `x = H^H y` on flat delay-major buffers.
    pub fn adjoint_into(&self, y: &[Complex<T>], x: &mut [Complex<T>]) {
        x.iter_mut().for_each(|v| *v = Complex::new(T::zero(), T::zero()));
        for &(o, i, c) in &self.entries {
            x[i as usize] += c.conj() * y[o as usize];
        }
    }

    pub fn apply(&self, x: &DdFrame<T>) -> Result<DdFrame<T>> {
        self.check(x.grid())?;
        let mut y = DdFrame::zeros(self.grid);
        self.apply_into(x.as_slice(), y.as_mut_slice());
        Ok(y)
    }

    pub fn adjoint(&self, y: &DdFrame<T>) -> Result<DdFrame<T>> {
        self.check(y.grid())?;
        let mut x = DdFrame::zeros(self.grid);
        self.adjoint_into(y.as_slice(), x.as_mut_slice());
        Ok(x)
    }

    fn check(&self, other: &DdGrid) -> Result<()> {
        if self.grid.same_lattice(other) {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "filter grid {}x{} does not match frame grid {}x{}",
                self.grid.m(),
                self.grid.n(),
                other.m(),
                other.n()
            )))
        }
    }
}

pub fn twisted_convolve<T: Real>(h: &DdFilter<T>, x: &DdFrame<T>) -> Result<DdFrame<T>> {
    TwistedOperator::new(h).apply(x)
}

/// Adjoint of [`twisted_convolve`] with respect to the fundamental-domain
/// inner product.
pub fn twisted_adjoint<T: Real>(h: &DdFilter<T>, y: &DdFrame<T>) -> Result<DdFrame<T>> {
    TwistedOperator::new(h).adjoint(y)
}
