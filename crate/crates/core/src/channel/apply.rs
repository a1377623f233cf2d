use num_complex::Complex;
use rustfft::FftPlanner;

use super::PathSet;
use crate::scalar::{cis_turns, Real};

/// Delays are quantized to `1 / (oversample * fs)`.
pub const DEFAULT_OVERSAMPLE: usize = 4;

fn quantize_delay(delay: f64, fs: f64, oversample: usize) -> f64 {
    let os = oversample.max(1) as f64;
    (delay * fs * os).round() / os
}

/// Signed FFT frequency of bin `i` for a transform of length `len`, in cycles per sample.
fn bin_freq(i: usize, len: usize) -> f64 {
    let f = if i <= len / 2 { i as f64 } else { i as f64 - len as f64 };
    f / len as f64
}

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() < 1e-9
}

/// `y[n] = Σ_i g_i s(n/fs - τ_i) exp(j 2π ν_i (n/fs - τ_i))` for a signal that
/// is zero outside its support. Fractional delays use band-limited (FFT
/// phase ramp) interpolation on a zero-padded copy; the output keeps the
/// input length, so energy delayed past the end is dropped.
pub fn apply_paths<T: Real>(s: &[Complex<T>], fs: f64, paths: &PathSet, oversample: usize) -> Vec<Complex<T>> {
    let len = s.len();
    let mut y = vec![Complex::new(T::zero(), T::zero()); len];
    if len == 0 {
        return y;
    }
    let padded_len = 2 * len;
    let mut spectrum: Option<Vec<Complex<T>>> = None;
    let mut planner = FftPlanner::<T>::new();
    let mut delayed = vec![Complex::new(T::zero(), T::zero()); len];
    for p in paths.paths() {
        let d = quantize_delay(p.delay, fs, oversample);
        if is_integer(d) {
            let shift = d.round() as usize;
            delayed.iter_mut().for_each(|v| *v = Complex::new(T::zero(), T::zero()));
            if shift < len {
                delayed[shift..].copy_from_slice(&s[..len - shift]);
            }
        } else {
            let spec = spectrum.get_or_insert_with(|| {
                let mut buf = s.to_vec();
                buf.resize(padded_len, Complex::new(T::zero(), T::zero()));
                planner.plan_fft_forward(padded_len).process(&mut buf);
                buf
            });
            let mut buf: Vec<Complex<T>> =
                spec.iter().enumerate().map(|(i, v)| *v * cis_turns::<T>(-bin_freq(i, padded_len) * d)).collect();
            planner.plan_fft_inverse(padded_len).process(&mut buf);
            let scale = T::one() / T::of(padded_len as f64);
            for (o, v) in delayed.iter_mut().zip(&buf) {
                *o = *v * scale;
            }
        }
        accumulate(&mut y, &delayed, p.gain, p.doppler / fs, d);
    }
    y
}

/// Same channel acting on the periodic extension of `s` (period
/// `s.len()`). This is the model for a Zak-OTFS frame, whose time
/// realization is one period of a periodic pulse train.
pub fn apply_paths_periodic<T: Real>(s: &[Complex<T>], fs: f64, paths: &PathSet, oversample: usize) -> Vec<Complex<T>> {
    let len = s.len();
    let mut y = vec![Complex::new(T::zero(), T::zero()); len];
    if len == 0 {
        return y;
    }
    let mut spectrum: Option<Vec<Complex<T>>> = None;
    let mut planner = FftPlanner::<T>::new();
    let mut delayed = vec![Complex::new(T::zero(), T::zero()); len];
    for p in paths.paths() {
        let d = quantize_delay(p.delay, fs, oversample);
        if is_integer(d) {
            let shift = (d.round() as usize) % len;
            for (n, v) in delayed.iter_mut().enumerate() {
                *v = s[(n + len - shift) % len];
            }
        } else {
            let spec = spectrum.get_or_insert_with(|| {
                let mut buf = s.to_vec();
                planner.plan_fft_forward(len).process(&mut buf);
                buf
            });
            let mut buf: Vec<Complex<T>> =
                spec.iter().enumerate().map(|(i, v)| *v * cis_turns::<T>(-bin_freq(i, len) * d)).collect();
            planner.plan_fft_inverse(len).process(&mut buf);
            let scale = T::one() / T::of(len as f64);
            for (o, v) in delayed.iter_mut().zip(&buf) {
                *o = *v * scale;
            }
        }
        accumulate(&mut y, &delayed, p.gain, p.doppler / fs, d);
    }
    y
}

/// `y[n] += g * delayed[n] * exp(j 2π ν_norm (n - d))`, ν_norm in cycles per sample.
fn accumulate<T: Real>(y: &mut [Complex<T>], delayed: &[Complex<T>], gain: crate::C64, nu: f64, d: f64) {
    let g = Complex::new(T::of(gain.re), T::of(gain.im));
    if nu == 0.0 {
        for (o, v) in y.iter_mut().zip(delayed) {
            *o += g * v;
        }
    } else {
        for (n, (o, v)) in y.iter_mut().zip(delayed).enumerate() {
            *o += g * v * cis_turns::<T>(nu * (n as f64 - d));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Path;
    use crate::C64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_signal(len: usize, seed: u64) -> Vec<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
    }

    fn single(gain: C64, delay: f64, doppler: f64) -> PathSet {
        PathSet::new(vec![Path { gain, delay, doppler }]).unwrap()
    }

    #[test]
    fn identity_channel() {
        let s = random_signal(64, 1);
        let y = apply_paths(&s, 1e6, &PathSet::identity(), 4);
        assert_eq!(y, s);
        let yp = apply_paths_periodic(&s, 1e6, &PathSet::identity(), 4);
        assert_eq!(yp, s);
    }

    #[test]
    fn integer_delay_shifts_with_leading_zeros() {
        let s = random_signal(32, 2);
        let fs = 1e6;
        let y = apply_paths(&s, fs, &single(C64::new(1.0, 0.0), 3.0 / fs, 0.0), 4);
        assert!(y[..3].iter().all(|v| v.norm() == 0.0));
        assert_eq!(&y[3..], &s[..29]);
    }

    #[test]
    fn pure_doppler_matches_closed_form() {
        let s = random_signal(128, 3);
        let (fs, nu) = (1e6, 1234.5);
        let y = apply_paths(&s, fs, &single(C64::new(1.0, 0.0), 0.0, nu), 4);
        for (n, (a, b)) in y.iter().zip(&s).enumerate() {
            let want = b * C64::from_polar(1.0, std::f64::consts::TAU * nu * n as f64 / fs);
            assert!((a - want).norm() < 1e-12);
        }
    }

    #[test]
    fn linearity() {
        let s1 = random_signal(100, 4);
        let s2 = random_signal(100, 5);
        let (a, b) = (C64::new(0.3, -1.2), C64::new(-0.7, 0.4));
        let paths = crate::channel::veh_a_paths(900.0, 6);
        let fs = 1.92e6;
        let mix: Vec<C64> = s1.iter().zip(&s2).map(|(x, y)| a * x + b * y).collect();
        let lhs = apply_paths(&mix, fs, &paths, 4);
        let y1 = apply_paths(&s1, fs, &paths, 4);
        let y2 = apply_paths(&s2, fs, &paths, 4);
        for i in 0..100 {
            assert!((lhs[i] - (a * y1[i] + b * y2[i])).norm() < 1e-10);
        }
    }

    #[test]
    fn unit_path_preserves_energy_up_to_edge() {
        let s = random_signal(2000, 7);
        let fs = 1e6;
        let y = apply_paths(&s, fs, &single(C64::new(1.0, 0.0), 2.25e-6, 0.0), 4);
        let es: f64 = s.iter().map(|v| v.norm_sqr()).sum();
        let ey: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        assert!(((ey - es) / es).abs() < 0.01);
    }

    #[test]
    fn doppler_breaks_time_invariance() {
        // shifting the input by dn shifts the output and rotates it by exp(j2π ν dn / fs)
        let fs = 1e6;
        let nu = 5e3;
        let s = random_signal(64, 8);
        let paths = single(C64::new(1.0, 0.0), 2.0 / fs, nu);
        let y = apply_paths_periodic(&s, fs, &paths, 4);
        let dn = 5;
        let shifted: Vec<C64> = (0..64).map(|n| s[(n + 64 - dn) % 64]).collect();
        let ys = apply_paths_periodic(&shifted, fs, &paths, 4);
        let rot = C64::from_polar(1.0, std::f64::consts::TAU * nu * dn as f64 / fs);
        for n in dn..64 {
            assert!((ys[n] - y[n - dn] * rot).norm() < 1e-10);
        }
        assert!((ys[dn] - y[0]).norm() > 1e-3);
    }

    #[test]
    fn fractional_periodic_delay_is_band_limited_shift() {
        // a complex exponential at an integer bin is delayed exactly
        let len = 32;
        let fs = 1e6;
        let f = 3.0;
        let s: Vec<C64> =
            (0..len).map(|n| C64::from_polar(1.0, std::f64::consts::TAU * f * n as f64 / len as f64)).collect();
        let d = 0.25;
        let y = apply_paths_periodic(&s, fs, &single(C64::new(1.0, 0.0), d / fs, 0.0), 4);
        for (n, v) in y.iter().enumerate() {
            let want = C64::from_polar(1.0, std::f64::consts::TAU * f * (n as f64 - d) / len as f64);
            assert!((v - want).norm() < 1e-12);
        }
    }
}
