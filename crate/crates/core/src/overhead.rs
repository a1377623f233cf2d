//! Overhead arithmetic for CP-OFDM and for Zak-OTFS pilot/guard strips.

use crate::error::{Error, Result};

/// Fraction of each OFDM symbol period spent on the cyclic prefix.
pub fn cp_overhead(delta_f: f64, t_cp: f64) -> f64 {
    t_cp / (t_cp + 1.0 / delta_f)
}

/// Overhead of a pilot strip plus its guard strip, each `strip_width` wide,
/// in a frame whose period along the same axis is `period`. Works in either
/// axis: seconds against a delay period, or hertz against a Doppler period.
pub fn zak_strip_overhead(strip_width: f64, period: f64) -> Result<f64> {
    if !(strip_width >= 0.0 && period > 0.0) {
        return Err(Error::Parameter(format!("strip width {strip_width} and period {period} must be positive")));
    }
    if strip_width >= period {
        return Err(Error::InfeasibleLayout(format!("strip width {strip_width} does not fit in period {period}")));
    }
    Ok(2.0 * strip_width / period)
}

/// Longest pilot spacing in time (in symbols) and in frequency (in
/// subcarriers) that still samples the channel at its Nyquist rate.
/// Spacings are capped at one slot and one resource block.
pub fn nyquist_pilot_spacing(delta_f: f64, t_cp: f64, tau_max: f64, nu_max: f64) -> (usize, usize) {
    let t_sym = t_cp + 1.0 / delta_f;
    let cap = |x: f64, max: usize| if x.is_finite() { (x.floor() as usize).clamp(1, max) } else { max };
    (cap(1.0 / (2.0 * nu_max * t_sym), 14), cap(1.0 / (2.0 * tau_max * delta_f), 12))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OfdmOverhead {
    pub delta_f: f64,
    pub t_cp: f64,
    pub cp: f64,
    pub pilot: f64,
    pub total: f64,
}

/// CP share plus the share of the remaining resource taken by a
/// Nyquist-spaced pilot lattice.
pub fn ofdm_overhead(delta_f: f64, t_cp: f64, tau_max: f64, nu_max: f64) -> OfdmOverhead {
    let cp = cp_overhead(delta_f, t_cp);
    let (dt, df) = nyquist_pilot_spacing(delta_f, t_cp, tau_max, nu_max);
    let pilot = (1.0 - cp) / (dt * df) as f64;
    OfdmOverhead { delta_f, t_cp, cp, pilot, total: cp + pilot }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverheadRow {
    pub tau_max: f64,
    pub nu_max: f64,
    pub ofdm: OfdmOverhead,
    pub zak: f64,
}

/// OFDM overhead as Doppler spread grows at a fixed delay spread. The
/// subcarrier spacing is the smallest NR spacing at least ten times the
/// Doppler spread while the CP stays at `tau_max`. The Zak-OTFS column uses
/// Doppler-axis strips of width `tau_max` in a delay period of
/// `1 / nu_p`.
pub fn doppler_table(tau_max: f64, nu_list: &[f64], nu_p: f64) -> Result<Vec<OverheadRow>> {
    nu_list
        .iter()
        .map(|&nu| {
            let mut delta_f = 15e3;
            while delta_f < 10.0 * nu {
                delta_f *= 2.0;
            }
            Ok(OverheadRow {
                tau_max,
                nu_max: nu,
                ofdm: ofdm_overhead(delta_f, tau_max, tau_max, nu),
                zak: zak_strip_overhead(tau_max, 1.0 / nu_p)?,
            })
        })
        .collect()
}

/// OFDM overhead as delay spread grows at a fixed Doppler spread and
/// subcarrier spacing, with the CP tracking the delay spread. The Zak-OTFS
/// column uses delay-axis strips of width `nu_max` in a Doppler period
/// `nu_p`.
pub fn delay_table(nu_max: f64, tau_list: &[f64], delta_f: f64, nu_p: f64) -> Result<Vec<OverheadRow>> {
    tau_list
        .iter()
        .map(|&tau| {
            Ok(OverheadRow {
                tau_max: tau,
                nu_max,
                ofdm: ofdm_overhead(delta_f, tau, tau, nu_max),
                zak: zak_strip_overhead(nu_max, nu_p)?,
            })
        })
        .collect()
}

/// Percentage with up to four decimals and no trailing zeros, e.g. `2.5%`.
pub fn percent(x: f64) -> String {
    let s = format!("{:.4}", 100.0 * x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    format!("{s}%")
}

pub fn format_table(rows: &[OverheadRow]) -> String {
    let mut out = format!(
        "{:>10}  {:>9}  {:>11}  {:>8}  {:>10}  {:>10}  {:>6}\n",
        "tau_max_us", "nu_max_hz", "delta_f_khz", "ofdm_cp", "ofdm_pilot", "ofdm_total", "zak"
    );
    for r in rows {
        out.push_str(&format!(
            "{:>10.2}  {:>9.0}  {:>11.0}  {:>8}  {:>10}  {:>10}  {:>6}\n",
            r.tau_max * 1e6,
            r.nu_max,
            r.ofdm.delta_f / 1e3,
            percent(r.ofdm.cp),
            percent(r.ofdm.pilot),
            percent(r.ofdm.total),
            percent(r.zak)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cp_fraction() {
        let x = cp_overhead(15e3, 4.7e-6);
        assert!((x - 4.7 / (4.7 + 1e3 / 15.0)).abs() < 1e-15);
        assert!((100.0 * x - 6.585).abs() < 1e-3);
        assert_eq!(cp_overhead(15e3, 0.0), 0.0);
        assert!(cp_overhead(30e3, 4.7e-6) > x);
    }

    #[test]
    fn strip_examples() {
        assert_eq!(percent(zak_strip_overhead(2.5e-6, 200e-6).unwrap()), "2.5%");
        assert_eq!(percent(zak_strip_overhead(1e3, 160e3).unwrap()), "1.25%");
        assert!((zak_strip_overhead(2.5e-6, 200e-6).unwrap() - 0.025).abs() < 1e-15);
        assert_eq!(zak_strip_overhead(0.0, 1.0).unwrap(), 0.0);
        assert!(matches!(zak_strip_overhead(1.0, 1.0), Err(Error::InfeasibleLayout(_))));
        assert!(matches!(zak_strip_overhead(-1.0, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn ofdm_overhead_grows_with_doppler_and_delay() {
        let rows = doppler_table(4.7e-6, &[1e3, 2e3, 3e3, 4e3], 5e3).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].ofdm.total >= w[0].ofdm.total);
            assert_eq!(w[1].zak, w[0].zak);
        }
        assert!(rows[3].ofdm.total > rows[0].ofdm.total);
        let rows = delay_table(1e3, &[1.15e-6, 2.3e-6, 4.7e-6], 15e3, 160e3).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].ofdm.total > w[0].ofdm.total);
        }
        assert_eq!(percent(rows[0].zak), "1.25%");
    }

    #[test]
    fn pilot_spacing_caps() {
        assert_eq!(nyquist_pilot_spacing(15e3, 4.7e-6, 0.0, 0.0), (14, 12));
        let (dt, df) = nyquist_pilot_spacing(15e3, 4.7e-6, 4.7e-6, 2000.0);
        assert_eq!((dt, df), (3, 7));
    }
}
