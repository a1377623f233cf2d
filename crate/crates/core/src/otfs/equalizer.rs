use num_complex::Complex;

use super::{FrameLayout, PowerSplit};
use crate::dd::{DdFilter, DdFrame, TwistedOperator};
use crate::error::{Error, Result};
use crate::lsmr::{lsmr, LinearOperator, LsmrParams};
use crate::scalar::Real;

pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Channel operator restricted to the data carriers: unit-power data
/// symbols in, received delay-Doppler samples out.
pub struct DataOperator<'a, T: Real> {
    op: TwistedOperator<T>,
    data: &'a [usize],
    amp: T,
}

impl<'a, T: Real> DataOperator<'a, T> {
    pub fn new(h: &DdFilter<T>, data: &'a [usize], amp: T) -> Self {
        Self { op: TwistedOperator::new(h), data, amp }
    }
}

impl<T: Real> LinearOperator<T> for DataOperator<'_, T> {
    fn nrows(&self) -> usize {
        self.op.grid().len()
    }

    fn ncols(&self) -> usize {
        self.data.len()
    }

    fn apply(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        let mut frame = vec![Complex::new(T::zero(), T::zero()); self.nrows()];
        for (&i, &v) in self.data.iter().zip(x) {
            frame[i] = v * self.amp;
        }
        self.op.apply_into(&frame, y);
    }

    fn apply_adjoint(&self, y: &[Complex<T>], x: &mut [Complex<T>]) {
        let mut frame = vec![Complex::new(T::zero(), T::zero()); self.nrows()];
        self.op.adjoint_into(y, &mut frame);
        for (&i, v) in self.data.iter().zip(x.iter_mut()) {
            *v = frame[i] * self.amp;
        }
    }
}

#[derive(Clone, Debug)]
pub struct EqualizerOutput<T: Real> {
    /// Soft estimates of the unit-power data symbols, in data-region order.
    pub symbols: Vec<Complex<T>>,
    pub converged: bool,
    pub iterations: usize,
    pub residual_norm: T,
}

/// Joint equalization of every data carrier. The pilot response predicted
/// by `h_est` is removed first; LSMR then solves
/// `min ||y - H x||^2 + noise_var ||x||^2` over the data symbols.
pub fn lsmr_equalize<T: Real>(
    rx_frame: &DdFrame<T>,
    h_est: &DdFilter<T>,
    layout: &FrameLayout,
    power: &PowerSplit,
    noise_var: T,
    max_iter: usize,
    tol: T,
) -> Result<EqualizerOutput<T>> {
    let grid = *layout.grid();
    if !grid.same_lattice(rx_frame.grid()) || !grid.same_lattice(h_est.grid()) {
        return Err(Error::Dimension("frame, filter and layout must share one grid".into()));
    }
    let op = DataOperator::new(h_est, layout.data_region(), T::of(power.data_amp));

    let (kp, lp) = layout.pilot();
    let mut pilot = DdFrame::<T>::zeros(grid);
    pilot.set(kp, lp, Complex::new(T::of(power.pilot_amp), T::zero()));
    let mut pilot_rx = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    op.op.apply_into(pilot.as_slice(), &mut pilot_rx);
    let b: Vec<Complex<T>> = rx_frame.as_slice().iter().zip(&pilot_rx).map(|(y, p)| y - p).collect();

    let params =
        LsmrParams { damp: noise_var.max(T::zero()).sqrt(), atol: tol, btol: tol, max_iter, ..LsmrParams::default() };
    let sol = lsmr(&op, &b, &params);
    Ok(EqualizerOutput {
        converged: sol.converged(),
        iterations: sol.iterations,
        residual_norm: sol.residual_norm,
        symbols: sol.x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::{twisted_convolve, DdGrid};
    use crate::otfs::LayoutVariant;
    use crate::C64;

    #[test]
    fn identity_channel_returns_data() {
        let g = DdGrid::from_delay_period(16, 8, 1e-3).unwrap();
        let layout = FrameLayout::with_k_max(g, 1, LayoutVariant::Narrow).unwrap();
        let power = PowerSplit::new(g.len(), layout.data_region().len(), 3.0);
        let data: Vec<C64> = (0..layout.data_region().len()).map(|i| C64::from_polar(1.0, i as f64)).collect();
        let mut tx = DdFrame::<f64>::zeros(g);
        for (&i, &x) in layout.data_region().iter().zip(&data) {
            tx.as_mut_slice()[i] = x * power.data_amp;
        }
        let (kp, lp) = layout.pilot();
        tx.set(kp, lp, C64::new(power.pilot_amp, 0.0));
        let rx = twisted_convolve(&DdFilter::identity(g), &tx).unwrap();
        let out = lsmr_equalize(&rx, &DdFilter::identity(g), &layout, &power, 0.0, 200, 1e-10).unwrap();
        for (a, b) in out.symbols.iter().zip(&data) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(out.converged);
    }

    fn random_frame(layout: &FrameLayout, power: &PowerSplit, seed: u64) -> (Vec<C64>, DdFrame<f64>) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = *layout.grid();
        let data: Vec<C64> = (0..layout.data_region().len())
            .map(|_| C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU))
            .collect();
        let mut tx = DdFrame::<f64>::zeros(g);
        for (&i, &x) in layout.data_region().iter().zip(&data) {
            tx.as_mut_slice()[i] = x * power.data_amp;
        }
        let (kp, lp) = layout.pilot();
        tx.set(kp, lp, C64::new(power.pilot_amp, 0.0));
        (data, tx)
    }

    #[test]
    fn noiseless_three_tap_recovery() {
        let g = DdGrid::from_delay_period(16, 8, 1e-3).unwrap();
        let layout = FrameLayout::with_k_max(g, 2, LayoutVariant::Narrow).unwrap();
        let power = PowerSplit::new(g.len(), layout.data_region().len(), 5.0);
        let h =
            DdFilter::new(g, [(0, 0, C64::new(0.9, 0.1)), (1, 1, C64::new(-0.3, 0.4)), (2, -1, C64::new(0.2, -0.25))])
                .unwrap();
        let (data, tx) = random_frame(&layout, &power, 11);
        let rx = twisted_convolve(&h, &tx).unwrap();
        let out = lsmr_equalize(&rx, &h, &layout, &power, 0.0, 200, 1e-12).unwrap();
        let err = out.symbols.iter().zip(&data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-6, "max error {err}");
    }

    #[test]
    fn matches_dense_regularized_solution() {
        use nalgebra::{DMatrix, DVector};
        let g = DdGrid::from_delay_period(8, 4, 1e-3).unwrap();
        let layout = FrameLayout::with_k_max(g, 1, LayoutVariant::Narrow).unwrap();
        let power = PowerSplit::new(g.len(), layout.data_region().len(), 0.0);
        let h =
            DdFilter::new(g, [(0, 0, C64::new(1.0, 0.0)), (1, 1, C64::new(0.5, -0.5)), (1, -1, C64::new(0.0, 0.3))])
                .unwrap();
        let (_, tx) = random_frame(&layout, &power, 5);
        let mut rx = twisted_convolve(&h, &tx).unwrap();
        for (i, y) in rx.as_mut_slice().iter_mut().enumerate() {
            *y += C64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()) * 0.2;
        }
        let sigma2 = 0.05;
        let out = lsmr_equalize(&rx, &h, &layout, &power, sigma2, 500, 1e-14).unwrap();

        let op = DataOperator::new(&h, layout.data_region(), power.data_amp);
        let (rows, cols) = (op.nrows(), op.ncols());
        let mut a = DMatrix::<C64>::zeros(rows, cols);
        let mut e = vec![C64::new(0.0, 0.0); cols];
        let mut col = vec![C64::new(0.0, 0.0); rows];
        for j in 0..cols {
            e.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            e[j] = C64::new(1.0, 0.0);
            op.apply(&e, &mut col);
            for i in 0..rows {
                a[(i, j)] = col[i];
            }
        }
        let (kp, lp) = layout.pilot();
        let mut pilot = DdFrame::<f64>::zeros(g);
        pilot.set(kp, lp, C64::new(power.pilot_amp, 0.0));
        let presp = twisted_convolve(&h, &pilot).unwrap();
        let b = DVector::<C64>::from_iterator(rows, rx.as_slice().iter().zip(presp.as_slice()).map(|(y, p)| y - p));
        let ah = a.adjoint();
        let normal = &ah * &a + DMatrix::<C64>::identity(cols, cols) * C64::new(sigma2, 0.0);
        let want = normal.lu().solve(&(&ah * &b)).unwrap();
        for (x, w) in out.symbols.iter().zip(want.iter()) {
            assert!((x - w).norm() < 1e-5, "{x} vs {w}");
        }
    }
}
