use num_complex::Complex;

use super::{FrameLayout, Role};
use crate::dd::{DdFilter, DdFrame, DdGrid};
use crate::error::{Error, Result};
use crate::scalar::{cis_turns, Real};

/// Doppler half-width of the estimation window: the largest `l` with
/// `2l + 1 <= N`, so the read covers the pilot strip over the whole Doppler
/// period (all of it for odd `N`, all but one bin for even `N`). A narrower
/// window sized from the Doppler spread truncates the leakage of fractional
/// Doppler shifts, which leaves a model-error floor near -10 dB.
pub fn doppler_window(grid: &DdGrid) -> usize {
    (grid.n() - 1) / 2
}

/// Reads the effective channel filter off the response to the point pilot:
/// `h[k, l] = y_ext(k_p + k, l_p + l) exp(-j 2π l k_p / (M N)) / a_p` for
/// `k in 0..=k_max`, `|l| <= l_max`. The phase factor undoes the twist the
/// pilot position adds, so a noiseless channel whose support lies in the
/// window is recovered exactly.
pub fn estimate_channel<T: Real>(
    rx_frame: &DdFrame<T>,
    layout: &FrameLayout,
    pilot_amplitude: T,
    k_max: usize,
    l_max: usize,
) -> Result<DdFilter<T>> {
    let grid = *layout.grid();
    if !grid.same_lattice(rx_frame.grid()) {
        return Err(Error::Dimension("received frame and layout use different grids".into()));
    }
    let (m, n) = (grid.m(), grid.n());
    if 2 * l_max + 1 > n || k_max >= m {
        return Err(Error::EstimationWindow(format!(
            "window k <= {k_max}, |l| <= {l_max} exceeds one period of the {m}x{n} grid"
        )));
    }
    let (kp, lp) = layout.pilot();
    for k in 0..=k_max {
        let col = (kp + k) % m;
        if layout.role(col, lp) == Role::Data {
            return Err(Error::EstimationWindow(format!("delay column {col} carries data")));
        }
    }
    if pilot_amplitude == T::zero() {
        return Err(Error::Estimation("pilot amplitude is zero".into()));
    }
    let mn = (m * n) as f64;
    let l_max = l_max as i64;
    let mut taps = Vec::with_capacity((k_max + 1) * (2 * l_max as usize + 1));
    for k in 0..=k_max as i64 {
        for l in -l_max..=l_max {
            let y = rx_frame.extended_at(kp as i64 + k, lp as i64 + l);
            let untwist: Complex<T> = cis_turns(-(l * kp as i64) as f64 / mn);
            taps.push((k, l, y * untwist / pilot_amplitude));
        }
    }
    DdFilter::new(grid, taps)
}
