//! Per-cell configuration search over a grid of delay and Doppler spreads.

use std::io::Write;

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::DopplerModel;
use crate::dd::DdGrid;
use crate::error::{Error, Result};
use crate::link::{run_link, ChannelSpec, LinkConfig, LinkResult, Mcs, RunParams, Waveform, MCS_TABLE};
use crate::ofdm::OfdmConfig;
use crate::otfs::{crystallization_check, FrameLayout, LayoutVariant, OtfsConfig};
use crate::rng::derive_seed;

/// Zak-OTFS search space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OtfsSearch {
    /// Doppler periods in Hz, snapped so that `M = B / nu_p` is an integer.
    pub nu_p: Vec<f64>,
    pub pdr_db: Vec<f64>,
    pub layouts: Vec<LayoutVariant>,
    pub mcs: Vec<u8>,
}

impl Default for OtfsSearch {
    fn default() -> Self {
        Self {
            nu_p: vec![1e3, 2e3, 4e3, 6e3, 8e3, 12e3, 14e3, 24e3],
            pdr_db: vec![-15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0],
            layouts: LayoutVariant::ALL.to_vec(),
            mcs: MCS_TABLE.iter().map(|m| m.id).collect(),
        }
    }
}

/// CP-OFDM search space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OfdmSearch {
    pub delta_f: Vec<f64>,
    pub boost_db: Vec<f64>,
    /// Additional DMRS symbols per slot after the front-loaded one (0..=3).
    pub dmrs_additional: Vec<usize>,
    pub mcs: Vec<u8>,
}

impl Default for OfdmSearch {
    fn default() -> Self {
        Self {
            delta_f: vec![15e3, 30e3, 60e3],
            boost_db: vec![-6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0],
            dmrs_additional: vec![0, 1, 2, 3],
            mcs: MCS_TABLE.iter().map(|m| m.id).collect(),
        }
    }
}

/// Everything a sweep run needs. All fields have desk-scale defaults, so a
/// config file only lists what it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    /// Delay spreads in seconds.
    pub tau_max: Vec<f64>,
    /// Doppler spreads in Hz.
    pub nu_max: Vec<f64>,
    /// Power-to-noise ratio in dB; `inf` disables noise.
    pub snr_db: f64,
    pub duration: f64,
    pub bw_otfs: f64,
    pub bw_ofdm: f64,
    pub n_frames: usize,
    pub seed: u64,
    pub bler_gate: f64,
    pub doppler: DopplerModel,
    pub otfs: OtfsSearch,
    pub ofdm: OfdmSearch,
}

pub const DESK_BW_OTFS: f64 = 168e3;
pub const DESK_BW_OFDM: f64 = 180e3;
pub const PAPER_BW_OTFS: f64 = 672e3;
pub const PAPER_BW_OFDM: f64 = 720e3;

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            tau_max: vec![0.0, 1.17e-6, 2.34e-6, 4.16e-6, 4.7e-6],
            nu_max: vec![0.0, 100.0, 400.0, 800.0, 1200.0, 1600.0, 2000.0],
            snr_db: 12.0,
            duration: 1e-3,
            bw_otfs: DESK_BW_OTFS,
            bw_ofdm: DESK_BW_OFDM,
            n_frames: 200,
            seed: 1,
            bler_gate: 0.1,
            doppler: DopplerModel::Jakes,
            otfs: OtfsSearch::default(),
            ofdm: OfdmSearch::default(),
        }
    }
}

impl SweepSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Switches to the full-size bandwidths (672 kHz Zak-OTFS, 720 kHz OFDM).
    pub fn paper_scale(mut self) -> Self {
        self.bw_otfs = PAPER_BW_OTFS;
        self.bw_ofdm = PAPER_BW_OFDM;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("tau_max", self.tau_max.is_empty()),
            ("nu_max", self.nu_max.is_empty()),
            ("otfs.nu_p", self.otfs.nu_p.is_empty()),
            ("otfs.pdr_db", self.otfs.pdr_db.is_empty()),
            ("otfs.layouts", self.otfs.layouts.is_empty()),
            ("otfs.mcs", self.otfs.mcs.is_empty()),
            ("ofdm.delta_f", self.ofdm.delta_f.is_empty()),
            ("ofdm.boost_db", self.ofdm.boost_db.is_empty()),
            ("ofdm.dmrs_additional", self.ofdm.dmrs_additional.is_empty()),
            ("ofdm.mcs", self.ofdm.mcs.is_empty()),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::Config(format!("{name} must not be empty")));
        }
        if !(self.bler_gate > 0.0 && self.bler_gate < 1.0) {
            return Err(Error::Config(format!("bler_gate {} not in (0, 1)", self.bler_gate)));
        }
        if self.n_frames == 0 {
            return Err(Error::Config("n_frames must be positive".into()));
        }
        if self.tau_max.iter().chain(&self.nu_max).any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::Config("spreads must be finite and non-negative".into()));
        }
        if !(self.duration > 0.0 && self.bw_otfs > 0.0 && self.bw_ofdm > 0.0) {
            return Err(Error::Config("duration and bandwidths must be positive".into()));
        }
        if self.snr_db.is_nan() {
            return Err(Error::Config("snr_db is NaN".into()));
        }
        for id in self.otfs.mcs.iter().chain(&self.ofdm.mcs) {
            Mcs::by_id(*id)?;
        }
        if let Some(a) = self.ofdm.dmrs_additional.iter().find(|&&a| a > 3) {
            return Err(Error::Config(format!("dmrs_additional {a} not in 0..=3")));
        }
        Ok(())
    }

    pub fn channel(&self, tau_max: f64, nu_max: f64) -> ChannelSpec {
        ChannelSpec { tau_max, nu_max, snr_db: self.snr_db, doppler: self.doppler }
    }

    /// Seed of one cell. It depends on the spreads, not on the position in
    /// the grid, and both waveforms share it so they see the same channels.
    pub fn cell_seed(&self, tau_max: f64, nu_max: f64) -> u64 {
        derive_seed(self.seed, &[tau_max.to_bits(), nu_max.to_bits()])
    }
}

fn mcs_list(ids: &[u8]) -> Vec<Mcs> {
    ids.iter().filter_map(|&id| Mcs::by_id(id).ok()).collect()
}

/// Every valid Zak-OTFS configuration for a cell. Doppler periods that
/// violate the crystallization condition and layouts that leave no room for
/// data are dropped.
pub fn otfs_candidates(spec: &SweepSpec, tau_max: f64, nu_max: f64) -> Vec<LinkConfig> {
    let mut out = Vec::new();
    for &nu_p in &spec.otfs.nu_p {
        let grid = match DdGrid::snapped(spec.bw_otfs, spec.duration, nu_p) {
            Ok((g, moved)) => {
                if moved {
                    debug!("nu_p {nu_p} Hz snapped to {} Hz (M = {}, N = {})", g.nu_p(), g.m(), g.n());
                }
                g
            }
            Err(e) => {
                debug!("nu_p {nu_p} Hz skipped: {e}");
                continue;
            }
        };
        if !crystallization_check(tau_max, nu_max, &grid) {
            debug!("nu_p {} Hz does not crystallize ({tau_max} s, {nu_max} Hz)", grid.nu_p());
            continue;
        }
        for &variant in &spec.otfs.layouts {
            let layout = match FrameLayout::build(grid, tau_max, variant) {
                Ok(l) => l,
                Err(e) => {
                    debug!("layout {} at nu_p {} skipped: {e}", variant.name(), grid.nu_p());
                    continue;
                }
            };
            for &pdr in &spec.otfs.pdr_db {
                for mcs in mcs_list(&spec.otfs.mcs) {
                    out.push(LinkConfig::Otfs { config: OtfsConfig::new(layout.clone(), pdr), mcs });
                }
            }
        }
    }
    out
}

/// Every valid CP-OFDM configuration.
pub fn ofdm_candidates(spec: &SweepSpec) -> Vec<LinkConfig> {
    let mut out = Vec::new();
    for &df in &spec.ofdm.delta_f {
        for &add in &spec.ofdm.dmrs_additional {
            for &boost in &spec.ofdm.boost_db {
                let config = match OfdmConfig::nr(spec.bw_ofdm, spec.duration, df, add, boost) {
                    Ok(c) => c,
                    Err(e) => {
                        debug!("ofdm df {df} skipped: {e}");
                        continue;
                    }
                };
                for mcs in mcs_list(&spec.ofdm.mcs) {
                    out.push(LinkConfig::Ofdm { config: config.clone(), mcs });
                }
            }
        }
    }
    out
}

/// Best configuration of one waveform in one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellOutcome {
    /// Winning configuration, `None` when no candidate met the gate.
    pub best: Option<LinkResult>,
    pub candidates: usize,
    pub evaluated: usize,
}

impl CellOutcome {
    pub fn se(&self) -> f64 {
        self.best.as_ref().map_or(0.0, |r| r.effective_se)
    }
}

fn potential_se(c: &LinkConfig) -> f64 {
    c.info_bits() as f64 / c.resource()
}

/// Exhaustive search for the highest effective SE that meets the BLER gate.
///
/// Candidates are visited in order of decreasing payload SE (stable in
/// candidate order), so the first one that passes is the argmax and the
/// rest need not be simulated.
pub fn optimize_cell(spec: &SweepSpec, tau_max: f64, nu_max: f64, waveform: Waveform) -> Result<CellOutcome> {
    let mut cands = match waveform {
        Waveform::Otfs => otfs_candidates(spec, tau_max, nu_max),
        Waveform::Ofdm => ofdm_candidates(spec),
    };
    cands.retain(|c| c.info_bits() > 0);
    cands.sort_by(|a, b| potential_se(b).total_cmp(&potential_se(a)));
    let total = cands.len();
    let ch = spec.channel(tau_max, nu_max);
    let params = RunParams {
        n_frames: spec.n_frames,
        seed: spec.cell_seed(tau_max, nu_max),
        bler_gate: spec.bler_gate,
        early_stop: true,
    };
    for (i, cand) in cands.iter().enumerate() {
        let r = match run_link(cand, &ch, &params) {
            Ok(r) => r,
            Err(e) => {
                debug!("{} skipped: {e}", cand.descriptor());
                continue;
            }
        };
        debug!("{} bler {:.3} over {} frames", r.descriptor, r.bler, r.frames);
        if r.passed {
            return Ok(CellOutcome { best: Some(r), candidates: total, evaluated: i + 1 });
        }
    }
    Ok(CellOutcome { best: None, candidates: total, evaluated: total })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub tau_max: f64,
    pub nu_max: f64,
    pub otfs: CellOutcome,
    pub ofdm: CellOutcome,
}

impl CellResult {
    /// `se_otfs / se_ofdm`; infinite when only OFDM failed, NaN when both did.
    pub fn ratio(&self) -> f64 {
        let (a, b) = (self.otfs.se(), self.ofdm.se());
        if b > 0.0 {
            a / b
        } else if a > 0.0 {
            f64::INFINITY
        } else {
            f64::NAN
        }
    }
}

pub fn run_cell(spec: &SweepSpec, tau_max: f64, nu_max: f64) -> Result<CellResult> {
    let otfs = optimize_cell(spec, tau_max, nu_max, Waveform::Otfs)?;
    let ofdm = optimize_cell(spec, tau_max, nu_max, Waveform::Ofdm)?;
    info!(
        "cell tau {:.3} us nu {} Hz: otfs {:.4} ({}/{} tried) ofdm {:.4} ({}/{} tried)",
        tau_max * 1e6,
        nu_max,
        otfs.se(),
        otfs.evaluated,
        otfs.candidates,
        ofdm.se(),
        ofdm.evaluated,
        ofdm.candidates
    );
    Ok(CellResult { tau_max, nu_max, otfs, ofdm })
}

/// All cells, delay-major. Cells run in parallel on the current rayon pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<CellResult>> {
    spec.validate()?;
    let cells: Vec<(f64, f64)> = spec.tau_max.iter().flat_map(|&t| spec.nu_max.iter().map(move |&n| (t, n))).collect();
    cells.par_iter().map(|&(t, n)| run_cell(spec, t, n)).collect()
}

/// Six significant digits, without exponent for ordinary magnitudes.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // %g semantics: the exponent is taken after rounding to 6 digits.
    let sci = format!("{x:.5e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{exp}")
    }
}

pub const CSV_HEADER: [&str; 15] = [
    "tau_max_us",
    "nu_max_hz",
    "se_otfs",
    "se_ofdm",
    "ratio",
    "otfs_infeasible",
    "ofdm_infeasible",
    "best_otfs",
    "best_ofdm",
    "bler_otfs",
    "bler_otfs_lo",
    "bler_otfs_hi",
    "bler_ofdm",
    "bler_ofdm_lo",
    "bler_ofdm_hi",
];

fn bler_fields(o: &CellOutcome) -> [String; 4] {
    match &o.best {
        Some(r) => [r.descriptor.clone(), sig6(r.bler), sig6(r.ci_low), sig6(r.ci_high)],
        None => ["none".into(), String::new(), String::new(), String::new()],
    }
}

pub fn write_csv<W: Write>(cells: &[CellResult], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for c in cells {
        let [otfs_cfg, ob, olo, ohi] = bler_fields(&c.otfs);
        let [ofdm_cfg, fb, flo, fhi] = bler_fields(&c.ofdm);
        w.write_record([
            sig6(c.tau_max * 1e6),
            sig6(c.nu_max),
            sig6(c.otfs.se()),
            sig6(c.ofdm.se()),
            sig6(c.ratio()),
            c.otfs.best.is_none().to_string(),
            c.ofdm.best.is_none().to_string(),
            otfs_cfg,
            ofdm_cfg,
            ob,
            olo,
            ohi,
            fb,
            flo,
            fhi,
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing CSV: {e}")))?;
    Ok(())
}
