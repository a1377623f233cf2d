use num_complex::Complex;
use rustfft::FftPlanner;

use super::{DdFrame, DdGrid};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Time samples (rate `B`, length `M N`) of a delay-Doppler frame:
/// `s[k + n M] = N^{-1/2} Σ_l X[k, l] exp(j 2π n l / N)`.
pub fn inverse_zak<T: Real>(frame: &DdFrame<T>) -> Vec<Complex<T>> {
    let grid = *frame.grid();
    let (m, n) = (grid.m(), grid.n());
    let fft = FftPlanner::<T>::new().plan_fft_inverse(n);
    let scale = T::one() / T::of(n as f64).sqrt();
    let mut out = vec![Complex::new(T::zero(), T::zero()); m * n];
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
    for k in 0..m {
        buf.copy_from_slice(&frame.as_slice()[k * n..(k + 1) * n]);
        fft.process(&mut buf);
        for (idx, v) in buf.iter().enumerate() {
            out[k + idx * m] = *v * scale;
        }
    }
    out
}

/// Inverse of [`inverse_zak`] (and its adjoint).
pub fn forward_zak<T: Real>(s: &[Complex<T>], grid: DdGrid) -> Result<DdFrame<T>> {
    let (m, n) = (grid.m(), grid.n());
    if s.len() != m * n {
        return Err(Error::Dimension(format!("forward Zak needs {} samples, got {}", m * n, s.len())));
    }
    let fft = FftPlanner::<T>::new().plan_fft_forward(n);
    let scale = T::one() / T::of(n as f64).sqrt();
    let mut symbols = vec![Complex::new(T::zero(), T::zero()); m * n];
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
    for k in 0..m {
        for (idx, v) in buf.iter_mut().enumerate() {
            *v = s[k + idx * m];
        }
        fft.process(&mut buf);
        for (l, v) in buf.iter().enumerate() {
            symbols[k * n + l] = *v * scale;
        }
    }
    DdFrame::from_vec(grid, symbols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cis_turns;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_frame(grid: DdGrid, rng: &mut ChaCha8Rng) -> DdFrame<f64> {
        let v = (0..grid.len()).map(|_| Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        DdFrame::from_vec(grid, v).unwrap()
    }

    /// Term-by-term evaluation of the synthesis sum.
    fn synthesis_oracle(frame: &DdFrame<f64>) -> Vec<Complex<f64>> {
        let g = frame.grid();
        let (m, n) = (g.m(), g.n());
        let mut s = vec![Complex::new(0.0, 0.0); m * n];
        for k in 0..m {
            for nn in 0..n {
                let mut acc = Complex::new(0.0, 0.0);
                for l in 0..n {
                    acc += frame.get(k, l) * cis_turns::<f64>((nn * l) as f64 / n as f64);
                }
                s[k + nn * m] = acc / (n as f64).sqrt();
            }
        }
        s
    }

    #[test]
    fn single_pulsone_is_impulse_train() {
        let g = DdGrid::from_delay_period(2, 2, 1e-3).unwrap();
        let s = inverse_zak(&DdFrame::<f64>::impulse(g, 0, 0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [h, 0.0, h, 0.0];
        for (a, b) in s.iter().zip(want) {
            assert!((a - Complex::new(b, 0.0)).norm() < 1e-15);
        }
        let back = forward_zak(&s, g).unwrap();
        assert!((back.get(0, 0) - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert!(back.get(1, 0).norm() + back.get(0, 1).norm() + back.get(1, 1).norm() < 1e-15);
    }

    #[test]
    fn zero_signal_gives_zero_frame() {
        let g = DdGrid::from_delay_period(4, 2, 1e-3).unwrap();
        let f = forward_zak::<f64>(&[Complex::new(0.0, 0.0); 8], g).unwrap();
        assert_eq!(f.energy(), 0.0);
    }

    #[test]
    fn matches_direct_sum_oracle() {
        let g = DdGrid::from_delay_period(4, 4, 1e-3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_frame(g, &mut rng);
        let fast = inverse_zak(&f);
        let slow = synthesis_oracle(&f);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (m, n) in [(2, 8), (8, 2), (16, 4), (5, 3)] {
            let g = DdGrid::from_delay_period(m, n, 1e-3).unwrap();
            let f = random_frame(g, &mut rng);
            let s = inverse_zak(&f);
            let e_t: f64 = s.iter().map(|z| z.norm_sqr()).sum();
            assert!((e_t - f.energy()).abs() < 1e-12 * f.energy());
            let back = forward_zak(&s, g).unwrap();
            for (a, b) in back.as_slice().iter().zip(f.as_slice()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn length_mismatch() {
        let g = DdGrid::from_delay_period(2, 2, 1e-3).unwrap();
        assert!(matches!(forward_zak::<f64>(&[Complex::new(0.0, 0.0); 3], g), Err(Error::Dimension(_))));
    }

    #[test]
    fn works_in_single_precision() {
        let g = DdGrid::from_delay_period(8, 4, 1e-3).unwrap();
        let f = DdFrame::<f32>::impulse(g, 3, 1);
        let back = forward_zak(&inverse_zak(&f), g).unwrap();
        assert!((back.get(3, 1) - Complex::new(1.0f32, 0.0)).norm() < 1e-5);
    }
}
