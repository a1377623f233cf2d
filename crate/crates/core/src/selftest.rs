//! Quick oracle checks runnable from the command line.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{apply_paths, apply_paths_periodic, Path, PathSet};
use crate::dd::{forward_zak, inverse_zak, twisted_adjoint, twisted_convolve, DdFilter, DdFrame, DdGrid};
use crate::error::Result;
use crate::link::BlockCodec;
use crate::ofdm::{self, OfdmConfig};
use crate::otfs::{estimate_channel, FrameLayout};
use crate::overhead::{percent, zak_strip_overhead};
use crate::rng::stream;
use crate::scalar::inner;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_frame(grid: DdGrid, r: &mut impl Rng) -> DdFrame<f64> {
    let v = (0..grid.len()).map(|_| Complex64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5)).collect();
    DdFrame::from_vec(grid, v).expect("length matches")
}

/// Integer-bin paths and the matching delay-Doppler filter: delay `k / B`
/// and Doppler `l / T` give tap `(k, l)` with the path gain.
pub fn integer_channel(grid: DdGrid, taps: &[(i64, i64, Complex64)]) -> (PathSet, DdFilter<f64>) {
    let paths = taps
        .iter()
        .map(|&(k, l, g)| Path { gain: g, delay: k as f64 / grid.bandwidth(), doppler: l as f64 / grid.duration() })
        .collect();
    (PathSet::new(paths).expect("finite paths"), DdFilter::new(grid, taps.iter().copied()).expect("taps in support"))
}

fn zak_round_trip(seed: u64) -> Result<f64> {
    let mut r = stream(seed, &[1]);
    let mut worst = 0.0f64;
    for m in [2, 4, 8, 16, 32] {
        for n in [2, 4, 8, 16, 32] {
            let g = DdGrid::from_delay_period(m, n, 1e-4)?;
            let x = random_frame(g, &mut r);
            let s = inverse_zak(&x);
            let back = forward_zak(&s, g)?;
            let e_t: f64 = s.iter().map(|z| z.norm_sqr()).sum();
            worst = worst.max((e_t - x.energy()).abs());
            for (a, b) in back.as_slice().iter().zip(x.as_slice()) {
                worst = worst.max((a - b).norm());
            }
        }
    }
    Ok(worst)
}

fn twisted_oracle(seed: u64) -> Result<f64> {
    let g = DdGrid::from_delay_period(16, 8, 1e-4)?;
    let mut r = stream(seed, &[2]);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let taps: Vec<(i64, i64, Complex64)> = (0..3)
            .map(|_| (r.random_range(0..4), r.random_range(-2..=2), Complex64::new(r.random(), r.random())))
            .collect();
        let (paths, h) = integer_channel(g, &taps);
        let x = random_frame(g, &mut r);
        let dd = twisted_convolve(&h, &x)?;
        let td = forward_zak(&apply_paths_periodic(&inverse_zak(&x), g.bandwidth(), &paths, 1), g)?;
        for (a, b) in dd.as_slice().iter().zip(td.as_slice()) {
            worst = worst.max((a - b).norm());
        }
        let y = random_frame(g, &mut r);
        let lhs = inner(dd.as_slice(), y.as_slice());
        let rhs = inner(x.as_slice(), twisted_adjoint(&h, &y)?.as_slice());
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

fn predictability(seed: u64) -> Result<f64> {
    let g = DdGrid::from_delay_period(16, 8, 1e-4)?;
    let layout = FrameLayout::pilot_only(g);
    let (kp, lp) = layout.pilot();
    let mut r = stream(seed, &[3]);
    let taps = [(0, 0, Complex64::new(1.0, 0.0)), (2, 1, Complex64::new(0.3, -0.4)), (3, -2, Complex64::new(0.0, 0.5))];
    let (paths, _) = integer_channel(g, &taps);
    let respond = |x: &DdFrame<f64>| -> Result<DdFrame<f64>> {
        forward_zak(&apply_paths_periodic(&inverse_zak(x), g.bandwidth(), &paths, 1), g)
    };
    let pilot = respond(&DdFrame::impulse(g, kp, lp))?;
    let h = estimate_channel(&pilot, &layout, 1.0, 3, 2)?;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (k, l) = (r.random_range(0..16), r.random_range(0..8));
        let e = DdFrame::impulse(g, k, l);
        let measured = respond(&e)?;
        let predicted = twisted_convolve(&h, &e)?;
        let err: f64 = measured.as_slice().iter().zip(predicted.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum();
        worst = worst.max((err / measured.energy()).sqrt());
    }
    Ok(worst)
}

fn cp_absorption() -> Result<f64> {
    let cfg = OfdmConfig::nr(180e3, 1e-3, 15e3, 1, 0.0)?;
    let fs = cfg.sample_rate();
    let paths = PathSet::new(vec![
        Path { gain: Complex64::new(0.9, 0.0), delay: 0.0, doppler: 0.0 },
        Path { gain: Complex64::new(0.0, 0.4), delay: 5.0 / fs, doppler: 0.0 },
    ])?;
    let data =
        vec![Complex64::new(std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2); cfg.data_count()];
    let tx = ofdm::modulate(&cfg, &data)?;
    let x = ofdm::demodulate(&cfg, &tx)?;
    let y = ofdm::demodulate(&cfg, &apply_paths(&tx, fs, &paths, 1))?;
    let mut worst = 0.0f64;
    for s in 0..cfg.n_symbols {
        for m in 0..cfg.n_sub {
            let f = m as f64 * cfg.delta_f;
            let h: Complex64 = paths
                .paths()
                .iter()
                .map(|p| p.gain * Complex64::from_polar(1.0, -std::f64::consts::TAU * f * p.delay))
                .sum();
            worst = worst.max((y.get(m, s) - h * x.get(m, s)).norm());
        }
    }
    Ok(worst)
}

fn coding_loopback(seed: u64) -> Result<bool> {
    let codec = BlockCodec::new(960, num_rational::Ratio::new(1, 2))?;
    let mut r = stream(seed, &[5]);
    let info: Vec<u8> = (0..codec.info_bits()).map(|_| r.random_range(0..2u8)).collect();
    let llr: Vec<f64> = codec.encode(&info)?.iter().map(|&b| if b == 0 { 20.0 } else { -20.0 }).collect();
    let (bits, ok) = codec.decode(&llr)?;
    Ok(ok && bits == info)
}

fn check(name: &'static str, outcome: Result<(bool, String)>) -> Check {
    match outcome {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: e.to_string() },
    }
}

/// Runs every check; each is small enough to finish in well under a second.
pub fn run_selftest(seed: u64) -> Vec<Check> {
    vec![
        check("zak round trip", zak_round_trip(seed).map(|e| (e < 1e-12, format!("max error {e:.2e}")))),
        check(
            "twisted convolution vs time domain",
            twisted_oracle(seed).map(|e| (e < 1e-9, format!("max error {e:.2e}"))),
        ),
        check(
            "pilot predicts every carrier",
            predictability(seed).map(|e| (e < 1e-6, format!("max relative error {e:.2e}"))),
        ),
        check("cp absorbs short delays", cp_absorption().map(|e| (e < 1e-9, format!("max error {e:.2e}")))),
        check(
            "zak strip overhead",
            zak_strip_overhead(2.5e-6, 200e-6).and_then(|a| {
                let b = zak_strip_overhead(1e3, 160e3)?;
                Ok((percent(a) == "2.5%" && percent(b) == "1.25%", format!("{} {}", percent(a), percent(b))))
            }),
        ),
        check(
            "coding loopback",
            coding_loopback(seed)
                .map(|ok| (ok, if ok { "960-bit rate-1/2 block decoded" } else { "decode mismatch" }.into())),
        ),
    ]
}
