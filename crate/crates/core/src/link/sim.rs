use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coding::BlockCodec;
use super::mcs::Mcs;
use super::qam::{qam_demap, qam_map, Modulation};
use crate::channel::{
    add_awgn, apply_paths, apply_paths_periodic, veh_a_scaled, DopplerModel, NoiseSpec, DEFAULT_OVERSAMPLE,
};
use crate::error::{Error, Result};
use crate::ofdm::{self, OfdmConfig};
use crate::otfs::{self, OtfsConfig};
use crate::rng::{derive_seed, label, stream};

/// Frames simulated between early-stop checks.
pub const CHUNK_FRAMES: usize = 20;

/// z-score of a two-sided 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Waveform {
    Otfs,
    Ofdm,
}

impl Waveform {
    pub fn name(self) -> &'static str {
        match self {
            Waveform::Otfs => "otfs",
            Waveform::Ofdm => "ofdm",
        }
    }
}

/// Veh-A channel scaled to the given spreads, plus the SNR per frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub tau_max: f64,
    pub nu_max: f64,
    pub snr_db: f64,
    #[serde(default)]
    pub doppler: DopplerModel,
}

#[derive(Clone, Debug)]
pub enum LinkConfig {
    Otfs { config: OtfsConfig, mcs: Mcs },
    Ofdm { config: OfdmConfig, mcs: Mcs },
}

impl LinkConfig {
    pub fn waveform(&self) -> Waveform {
        match self {
            LinkConfig::Otfs { .. } => Waveform::Otfs,
            LinkConfig::Ofdm { .. } => Waveform::Ofdm,
        }
    }

    pub fn mcs(&self) -> Mcs {
        match self {
            LinkConfig::Otfs { mcs, .. } | LinkConfig::Ofdm { mcs, .. } => *mcs,
        }
    }

    pub fn data_res(&self) -> usize {
        match self {
            LinkConfig::Otfs { config, .. } => config.layout.data_region().len(),
            LinkConfig::Ofdm { config, .. } => config.data_count(),
        }
    }

    /// Time-bandwidth product of the whole resource.
    pub fn resource(&self) -> f64 {
        match self {
            LinkConfig::Otfs { config, .. } => config.grid().bandwidth() * config.grid().duration(),
            LinkConfig::Ofdm { config, .. } => config.bandwidth() * config.duration(),
        }
    }

    pub fn info_bits(&self) -> usize {
        self.mcs().info_bits(self.data_res())
    }

    /// Compact description without commas, e.g.
    /// `otfs nu_p=8000 M=21 N=8 layout=narrow pdr=5 mcs=qpsk-1/2`.
    pub fn descriptor(&self) -> String {
        match self {
            LinkConfig::Otfs { config, mcs } => format!(
                "otfs nu_p={} M={} N={} layout={} pdr={} mcs={}",
                config.grid().nu_p(),
                config.grid().m(),
                config.grid().n(),
                config.layout.variant().name(),
                config.pdr_db,
                mcs.name()
            ),
            LinkConfig::Ofdm { config, mcs } => format!(
                "ofdm df={} dmrs={} boost={} mcs={}",
                config.delta_f,
                config.dmrs.time_positions.len(),
                config.boost_db,
                mcs.name()
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunParams {
    pub n_frames: usize,
    pub seed: u64,
    pub bler_gate: f64,
    /// Stop as soon as the gate can no longer be met.
    pub early_stop: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkResult {
    pub waveform: Waveform,
    pub descriptor: String,
    pub info_bits: usize,
    pub frames: usize,
    pub errors: usize,
    pub bler: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `info_bits / (B T)` when the block error rate is below the gate, else 0.
    pub effective_se: f64,
    pub passed: bool,
    pub stopped_early: bool,
    /// Frames whose LSMR solve hit the iteration limit.
    pub unconverged: usize,
}

/// Wilson score interval at 95%.
pub fn wilson_interval(errors: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let den = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / den;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / den;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if p == 1.0 { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Smallest error count whose BLER over `n_frames` reaches the gate.
pub fn failing_errors(bler_gate: f64, n_frames: usize) -> usize {
    ((bler_gate * n_frames as f64) - 1e-9).ceil().max(0.0) as usize
}

struct FrameOutcome {
    ok: bool,
    converged: bool,
}

fn random_bits(n: usize, seed: u64, frame: u64) -> Vec<u8> {
    let mut r = stream(seed, &[label::DATA, frame]);
    (0..n).map(|_| r.random_range(0..2u8)).collect()
}

/// Decision-directed SINR of unbiased soft symbols: the estimates are
/// rescaled by their projection on the hard decisions and the residual
/// spread around the decisions is the disturbance.
fn decision_directed(soft: &[Complex64], modulation: Modulation, floor: f64) -> (Vec<Complex64>, f64) {
    let hard: Vec<Complex64> = soft.iter().map(|&z| modulation.slice(z)).collect();
    let num: f64 = soft.iter().zip(&hard).map(|(z, q)| (q.conj() * z).re).sum();
    let den: f64 = hard.iter().map(|q| q.norm_sqr()).sum();
    let beta = if num > 0.0 && den > 0.0 { num / den } else { 1.0 };
    let unbiased: Vec<Complex64> = soft.iter().map(|z| z / beta).collect();
    let err = unbiased.iter().map(|&z| (z - modulation.slice(z)).norm_sqr()).sum::<f64>() / soft.len().max(1) as f64;
    (unbiased, 1.0 / err.max(floor))
}

fn otfs_frame(
    config: &OtfsConfig,
    mcs: &Mcs,
    codec: &BlockCodec,
    ch: &ChannelSpec,
    seed: u64,
    frame: u64,
) -> Result<FrameOutcome> {
    let grid = *config.grid();
    let info = random_bits(codec.info_bits(), seed, frame);
    let symbols = qam_map(&codec.encode(&info)?, mcs.modulation)?;
    let tx = otfs::modulate(config, &symbols)?;

    let paths = veh_a_scaled(ch.tau_max, ch.nu_max, ch.doppler, derive_seed(seed, &[label::CHANNEL, frame]));
    let rx = apply_paths_periodic(&tx, grid.bandwidth(), &paths, DEFAULT_OVERSAMPLE);
    let noise = NoiseSpec { snr_db: ch.snr_db, seed: derive_seed(seed, &[label::NOISE, frame]) };
    let rx = add_awgn(&rx, &noise, 1.0)?;
    let noise_var = noise.variance(1.0);

    let y = otfs::demodulate(&rx, grid)?;
    let power = config.power_split();
    let h = otfs::estimate_channel(
        &y,
        &config.layout,
        power.pilot_amp,
        config.layout.k_max(),
        otfs::doppler_window(&grid),
    )?;
    let eq = otfs::lsmr_equalize(&y, &h, &config.layout, &power, noise_var, otfs::DEFAULT_MAX_ITER, otfs::DEFAULT_TOL)?;

    let gain = power.data_amp * power.data_amp * h.energy();
    let floor = if gain > 0.0 { noise_var / gain } else { f64::INFINITY };
    let (soft, sinr) = decision_directed(&eq.symbols, mcs.modulation, floor);
    let llr = qam_demap(&soft, &vec![sinr; soft.len()], mcs.modulation)?;
    let (bits, crc_ok) = codec.decode(&llr)?;
    Ok(FrameOutcome { ok: crc_ok && bits == info, converged: eq.converged })
}

fn ofdm_frame(
    config: &OfdmConfig,
    mcs: &Mcs,
    codec: &BlockCodec,
    ch: &ChannelSpec,
    seed: u64,
    frame: u64,
) -> Result<FrameOutcome> {
    let info = random_bits(codec.info_bits(), seed, frame);
    let symbols = qam_map(&codec.encode(&info)?, mcs.modulation)?;
    let tx = ofdm::modulate(config, &symbols)?;

    let paths = veh_a_scaled(ch.tau_max, ch.nu_max, ch.doppler, derive_seed(seed, &[label::CHANNEL, frame]));
    let rx = apply_paths(&tx, config.sample_rate(), &paths, DEFAULT_OVERSAMPLE);
    let noise = NoiseSpec { snr_db: ch.snr_db, seed: derive_seed(seed, &[label::NOISE, frame]) };
    let rx = add_awgn(&rx, &noise, config.noise_reference())?;
    let noise_var = noise.variance(config.noise_reference());

    let y = ofdm::demodulate(config, &rx)?;
    let h = ofdm::estimate_grid_channel(config, &y)?;
    let z = ofdm::mmse_equalize(config, &y, &h, noise_var);

    let mut gains = Vec::with_capacity(z.len());
    let mut received = Vec::with_capacity(z.len());
    for s in 0..config.n_symbols {
        for m in 0..config.n_sub {
            if config.role(m, s) == ofdm::ReRole::Data {
                gains.push(h.get(m, s));
                received.push(y.get(m, s));
            }
        }
    }
    let soft: Vec<Complex64> = z
        .iter()
        .zip(&gains)
        .map(|(zi, hi)| {
            let g = hi.norm_sqr();
            if g > 0.0 {
                zi * (g + noise_var) / g
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let disturbance = soft
        .iter()
        .zip(&gains)
        .zip(&received)
        .map(|((x, hi), yi)| (yi - hi * mcs.modulation.slice(*x)).norm_sqr())
        .sum::<f64>()
        / soft.len().max(1) as f64;
    let d = disturbance.max(noise_var);
    let sinr: Vec<f64> = gains.iter().map(|g| if d > 0.0 { g.norm_sqr() / d } else { f64::INFINITY }).collect();
    let llr = qam_demap(&soft, &sinr, mcs.modulation)?;
    let (bits, crc_ok) = codec.decode(&llr)?;
    Ok(FrameOutcome { ok: crc_ok && bits == info, converged: true })
}

/// Monte-Carlo block error rate of one configuration on one channel.
///
/// Frame `i` draws its channel, noise and payload from streams derived from
/// `(seed, i)`, so every configuration run with the same seed sees the same
/// channel realizations. Frames run in parallel in fixed chunks; with early
/// stopping the run ends after the first chunk at which the gate is already
/// missed, which keeps the result independent of scheduling.
pub fn run_link(cfg: &LinkConfig, ch: &ChannelSpec, params: &RunParams) -> Result<LinkResult> {
    if params.n_frames == 0 {
        return Err(Error::Config("need at least one frame".into()));
    }
    if !(params.bler_gate > 0.0 && params.bler_gate < 1.0) {
        return Err(Error::Config(format!("BLER gate {} not in (0, 1)", params.bler_gate)));
    }
    let mcs = cfg.mcs();
    let data_res = cfg.data_res();
    if data_res == 0 {
        return Err(Error::Config("configuration has no data resource elements".into()));
    }
    let codec = BlockCodec::new(data_res * mcs.bits_per_symbol(), mcs.code_rate)?;
    let limit = failing_errors(params.bler_gate, params.n_frames);

    let (mut frames, mut errors, mut unconverged) = (0usize, 0usize, 0usize);
    let mut stopped_early = false;
    while frames < params.n_frames {
        let end = (frames + CHUNK_FRAMES).min(params.n_frames);
        let outcomes: Vec<FrameOutcome> = (frames..end)
            .into_par_iter()
            .map(|f| match cfg {
                LinkConfig::Otfs { config, mcs } => otfs_frame(config, mcs, &codec, ch, params.seed, f as u64),
                LinkConfig::Ofdm { config, mcs } => ofdm_frame(config, mcs, &codec, ch, params.seed, f as u64),
            })
            .collect::<Result<_>>()?;
        errors += outcomes.iter().filter(|o| !o.ok).count();
        unconverged += outcomes.iter().filter(|o| !o.converged).count();
        frames = end;
        if params.early_stop && errors >= limit && frames < params.n_frames {
            stopped_early = true;
            break;
        }
    }
    let bler = errors as f64 / frames as f64;
    let (ci_low, ci_high) = wilson_interval(errors, frames);
    let passed = !stopped_early && bler < params.bler_gate;
    let info_bits = codec.info_bits();
    Ok(LinkResult {
        waveform: cfg.waveform(),
        descriptor: cfg.descriptor(),
        info_bits,
        frames,
        errors,
        bler,
        ci_low,
        ci_high,
        effective_se: if passed { info_bits as f64 / cfg.resource() } else { 0.0 },
        passed,
        stopped_early,
        unconverged,
    })
}
