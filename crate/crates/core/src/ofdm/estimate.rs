use num_complex::Complex;

use super::{pilot_symbol, OfdmConfig, ReRole, ResourceGrid};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Linear interpolation of samples at sorted positions `xs`, extrapolated
/// linearly past the ends (held constant when there is only one sample).
fn interp_linear<T: Real>(xs: &[usize], ys: &[Complex<T>], x: usize, extrapolate: bool) -> Complex<T> {
    if xs.len() == 1 {
        return ys[0];
    }
    let i = match xs.binary_search(&x) {
        Ok(i) => return ys[i],
        Err(i) => i,
    };
    if !extrapolate {
        if i == 0 {
            return ys[0];
        }
        if i == xs.len() {
            return ys[xs.len() - 1];
        }
    }
    let j = i.clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[j - 1] as f64, xs[j] as f64);
    let t = T::of((x as f64 - x0) / (x1 - x0));
    ys[j - 1] + (ys[j] - ys[j - 1]) * t
}

/// Per-RE channel estimate, scaled so that `Y = H x + noise` holds for the
/// unit-power data symbols `x`.
///
/// LS estimates on the pilot REs are interpolated linearly across frequency
/// (with linear extrapolation at the band edges) within each pilot symbol,
/// then linearly across time, holding the first and last pilot symbols
/// constant outside their span.
pub fn estimate_grid_channel<T: Real>(cfg: &OfdmConfig, grid: &ResourceGrid<T>) -> Result<ResourceGrid<T>> {
    if grid.n_sub() != cfg.n_sub || grid.n_symbols() != cfg.n_symbols {
        return Err(Error::Dimension("resource grid does not match the configuration".into()));
    }
    let times = &cfg.dmrs.time_positions;
    if times.is_empty() {
        return Err(Error::Estimation("no pilot symbols".into()));
    }
    let freqs: Vec<usize> = (0..cfg.n_sub).filter(|&m| cfg.role(m, times[0]) == ReRole::Pilot).collect();
    if freqs.is_empty() {
        return Err(Error::Estimation("no pilot subcarriers".into()));
    }
    let (a_d, a_p) = cfg.amplitudes();
    let scale = T::of(a_d / a_p);

    // frequency interpolation inside each pilot symbol
    let mut per_symbol: Vec<Vec<Complex<T>>> = Vec::with_capacity(times.len());
    for &s in times {
        let ls: Vec<Complex<T>> = freqs.iter().map(|&m| grid.get(m, s) / pilot_symbol::<T>(m, s) * scale).collect();
        per_symbol.push((0..cfg.n_sub).map(|m| interp_linear(&freqs, &ls, m, true)).collect());
    }

    let mut h = ResourceGrid::zeros(cfg.n_sub, cfg.n_symbols);
    let mut column = vec![Complex::new(T::zero(), T::zero()); times.len()];
    for m in 0..cfg.n_sub {
        for (c, row) in column.iter_mut().zip(&per_symbol) {
            *c = row[m];
        }
        for s in 0..cfg.n_symbols {
            h.set(m, s, interp_linear(times, &column, s, false));
        }
    }
    Ok(h)
}

/// Per-subcarrier MMSE estimates `conj(H) Y / (|H|^2 + noise_var)` at the
/// data REs, in symbol-major order.
pub fn mmse_equalize<T: Real>(
    cfg: &OfdmConfig,
    grid: &ResourceGrid<T>,
    h_hat: &ResourceGrid<T>,
    noise_var: T,
) -> Vec<Complex<T>> {
    let mut out = Vec::with_capacity(cfg.data_count());
    for s in 0..cfg.n_symbols {
        for m in 0..cfg.n_sub {
            if cfg.role(m, s) == ReRole::Data {
                let h = h_hat.get(m, s);
                let den = h.norm_sqr() + noise_var;
                out.push(if den > T::zero() {
                    h.conj() * grid.get(m, s) / den
                } else {
                    Complex::new(T::zero(), T::zero())
                });
            }
        }
    }
    out
}
