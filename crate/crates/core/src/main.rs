use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use ddsim::channel::DopplerModel;
use ddsim::dd::DdGrid;
use ddsim::link::{run_link, ChannelSpec, LinkConfig, Mcs, RunParams};
use ddsim::ofdm::OfdmConfig;
use ddsim::otfs::{FrameLayout, LayoutVariant, OtfsConfig};
use ddsim::overhead::{delay_table, doppler_table, format_table, percent, zak_strip_overhead};
use ddsim::sweep::{run_sweep, write_csv, SweepSpec};
use ddsim::{selftest, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "ddsim", version, about = "Zak-OTFS vs CP-OFDM link-level simulator")]
struct Cli {
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Frames per candidate configuration (overrides the config file).
    #[arg(long, global = true)]
    frames: Option<usize>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Block error rate a configuration must stay below.
    #[arg(long, global = true)]
    bler_gate: Option<f64>,
    /// Use the 672 kHz / 720 kHz bandwidths instead of the desk-scale ones.
    #[arg(long, global = true)]
    paper_scale: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct ChannelArgs {
    /// Delay spread in seconds.
    #[arg(long, default_value_t = 0.0)]
    tau_max: f64,
    /// Doppler spread in Hz.
    #[arg(long, default_value_t = 0.0)]
    nu_max: f64,
    /// Power-to-noise ratio in dB (`inf` for no noise).
    #[arg(long, default_value_t = 12.0)]
    snr_db: f64,
    #[arg(long, value_enum, default_value_t = DopplerArg::Jakes)]
    doppler: DopplerArg,
    /// MCS index 0..=8.
    #[arg(long, default_value_t = 1)]
    mcs: u8,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum DopplerArg {
    Jakes,
    Extreme,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum LayoutArg {
    Narrow,
    Medium,
    Wide,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the configuration search over a grid of spreads and write CSV.
    Sweep {
        /// TOML config; omitted keys take the desk-scale defaults.
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate one Zak-OTFS configuration and print the result as JSON.
    RunOtfs {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Doppler period in Hz.
        #[arg(long, default_value_t = 8e3)]
        nu_p: f64,
        #[arg(long, value_enum, default_value_t = LayoutArg::Narrow)]
        layout: LayoutArg,
        #[arg(long, default_value_t = 5.0)]
        pdr_db: f64,
    },
    /// Simulate one CP-OFDM configuration and print the result as JSON.
    RunOfdm {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Subcarrier spacing in Hz.
        #[arg(long, default_value_t = 15e3)]
        delta_f: f64,
        /// Extra DMRS symbols per slot (0..=3).
        #[arg(long, default_value_t = 1)]
        dmrs_additional: usize,
        #[arg(long, default_value_t = 0.0)]
        boost_db: f64,
    },
    /// Print overhead tables, or one strip overhead with --zak-strip/--period.
    Overhead {
        #[arg(long, requires = "period")]
        zak_strip: Option<f64>,
        #[arg(long, requires = "zak_strip")]
        period: Option<f64>,
    },
    /// Run the built-in oracle checks.
    Selftest,
}

fn spec_defaults(cli: &Cli) -> SweepSpec {
    let spec = SweepSpec::default();
    if cli.paper_scale {
        spec.paper_scale()
    } else {
        spec
    }
}

fn apply_overrides(cli: &Cli, spec: &mut SweepSpec) {
    if let Some(s) = cli.seed {
        spec.seed = s;
    }
    if let Some(f) = cli.frames {
        spec.n_frames = f;
    }
    if let Some(g) = cli.bler_gate {
        spec.bler_gate = g;
    }
    if cli.paper_scale {
        *spec = spec.clone().paper_scale();
    }
}

fn channel_spec(a: &ChannelArgs) -> ChannelSpec {
    let doppler = match a.doppler {
        DopplerArg::Jakes => DopplerModel::Jakes,
        DopplerArg::Extreme => DopplerModel::Extreme,
    };
    ChannelSpec { tau_max: a.tau_max, nu_max: a.nu_max, snr_db: a.snr_db, doppler }
}

fn single_run(cli: &Cli, cfg: LinkConfig, ch: &ChannelSpec) -> Result<()> {
    let spec = {
        let mut s = spec_defaults(cli);
        apply_overrides(cli, &mut s);
        s.validate()?;
        s
    };
    let params = RunParams {
        n_frames: spec.n_frames,
        seed: spec.cell_seed(ch.tau_max, ch.nu_max),
        bler_gate: spec.bler_gate,
        early_stop: false,
    };
    let r = run_link(&cfg, ch, &params)?;
    println!("{}", serde_json::to_string_pretty(&r).map_err(|e| Error::Config(e.to_string()))?);
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Sweep { config, out } => {
            let text = fs::read_to_string(config).map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            let mut spec = SweepSpec::from_toml(&text)?;
            apply_overrides(cli, &mut spec);
            spec.validate()?;
            info!("{} x {} cells, {} frames per candidate", spec.tau_max.len(), spec.nu_max.len(), spec.n_frames);
            let cells = run_sweep(&spec)?;
            let file = fs::File::create(out).map_err(|e| Error::Config(format!("{}: {e}", out.display())))?;
            write_csv(&cells, io::BufWriter::new(file))?;
            Ok(true)
        }
        Command::RunOtfs { channel, nu_p, layout, pdr_db } => {
            let spec = spec_defaults(cli);
            let ch = channel_spec(channel);
            let (grid, _) = DdGrid::snapped(spec.bw_otfs, spec.duration, *nu_p)?;
            let variant = match layout {
                LayoutArg::Narrow => LayoutVariant::Narrow,
                LayoutArg::Medium => LayoutVariant::Medium,
                LayoutArg::Wide => LayoutVariant::Wide,
            };
            let layout = FrameLayout::build(grid, ch.tau_max, variant)?;
            let cfg = LinkConfig::Otfs { config: OtfsConfig::new(layout, *pdr_db), mcs: Mcs::by_id(channel.mcs)? };
            single_run(cli, cfg, &ch)?;
            Ok(true)
        }
        Command::RunOfdm { channel, delta_f, dmrs_additional, boost_db } => {
            let spec = spec_defaults(cli);
            let ch = channel_spec(channel);
            let config = OfdmConfig::nr(spec.bw_ofdm, spec.duration, *delta_f, *dmrs_additional, *boost_db)?;
            let cfg = LinkConfig::Ofdm { config, mcs: Mcs::by_id(channel.mcs)? };
            single_run(cli, cfg, &ch)?;
            Ok(true)
        }
        Command::Overhead { zak_strip, period } => {
            if let (Some(w), Some(p)) = (zak_strip, period) {
                println!("{}", percent(zak_strip_overhead(*w, *p)?));
                return Ok(true);
            }
            println!("Doppler spread at 4.7 us delay spread (Zak-OTFS: nu_p = 5 kHz)");
            print!("{}", format_table(&doppler_table(4.7e-6, &[1e3, 2e3, 3e3, 4e3], 5e3)?));
            println!();
            println!("Delay spread at 1 kHz Doppler spread, 15 kHz spacing (Zak-OTFS: nu_p = 160 kHz)");
            print!("{}", format_table(&delay_table(1e3, &[1.15e-6, 2.3e-6, 3.5e-6, 4.7e-6], 15e3, 160e3)?));
            Ok(true)
        }
        Command::Selftest => {
            let checks = selftest::run_selftest(cli.seed.unwrap_or(1));
            for c in &checks {
                println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
            Ok(checks.iter().all(|c| c.passed))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Parameter(_) | Error::InfeasibleLayout(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
