//! `aeromimo` — batch CLI for the uplink mmWave MU-MIMO Monte Carlo
//! simulator.
//!
//! Subcommands:
//! * `run` — execute a campaign and write `trials.csv`, `summary.csv`, and
//!   `manifest.toml` into an output directory;
//! * `validate` — parse a scenario config and print its normalized form;
//! * `linkbudget` — print the deterministic point-to-point budget for one
//!   link (received power, noise, SNR, rate).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use aeromimo::config::ScenarioConfig;
use aeromimo::montecarlo::PreparedCampaign;
use aeromimo::propagation::{
    friis_received_power, noise_psd, path_loss, AtmosphereConfig, ReceiverNoiseConfig,
    SPEED_OF_LIGHT_M_PER_S,
};
use aeromimo::report;

#[derive(Parser)]
#[command(name = "aeromimo", version, about = "Uplink mmWave MU-MIMO Monte Carlo simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario config file (TOML). Omit to run the built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. --set shell.r_max_km=2.5 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Shorthand for --set master_seed=<u64>.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a campaign and write the output tables.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory for trials.csv, summary.csv, manifest.toml.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads for the trial loop (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Parse and validate a scenario config, printing the normalized form.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Print the link budget of a single deterministic link.
    Linkbudget {
        /// Carrier frequency, Hz (ignored if --wavelength-m is given).
        #[arg(long, default_value_t = 60e9)]
        carrier_hz: f64,
        /// Carrier wavelength, m (overrides --carrier-hz).
        #[arg(long)]
        wavelength_m: Option<f64>,
        /// Link range, m.
        #[arg(long, default_value_t = 1000.0)]
        range_m: f64,
        /// Total atmospheric specific attenuation, dB/km.
        #[arg(long, default_value_t = 14.0)]
        gamma_db_per_km: f64,
        /// Transmit power, W.
        #[arg(long, default_value_t = 10.0)]
        p_tx_w: f64,
        /// System bandwidth, Hz.
        #[arg(long, default_value_t = 2e9)]
        bandwidth_hz: f64,
        /// TX array gain, dBi.
        #[arg(long, default_value_t = 0.0)]
        g_tx_dbi: f64,
        /// RX array gain, dBi.
        #[arg(long, default_value_t = 0.0)]
        g_rx_dbi: f64,
        /// Receiver noise figure, dB.
        #[arg(long, default_value_t = 7.1)]
        noise_figure_db: f64,
        /// Atmospheric mean radiating temperature, K.
        #[arg(long, default_value_t = 276.0)]
        t_mr_k: f64,
    },
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run {
            scenario,
            out,
            threads,
        } => run(scenario, &out, threads),
        Command::Validate { scenario } => {
            let cfg = load_scenario(&scenario)?;
            print!("{}", cfg.to_normalized_toml());
            Ok(())
        }
        Command::Linkbudget {
            carrier_hz,
            wavelength_m,
            range_m,
            gamma_db_per_km,
            p_tx_w,
            bandwidth_hz,
            g_tx_dbi,
            g_rx_dbi,
            noise_figure_db,
            t_mr_k,
        } => linkbudget(
            carrier_hz,
            wavelength_m,
            range_m,
            gamma_db_per_km,
            p_tx_w,
            bandwidth_hz,
            g_tx_dbi,
            g_rx_dbi,
            noise_figure_db,
            t_mr_k,
        ),
    }
}

fn load_scenario(args: &ScenarioArgs) -> anyhow::Result<ScenarioConfig> {
    let text = match &args.config {
        Some(path) => fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?,
        None => String::new(),
    };
    let mut overrides = Vec::with_capacity(args.set.len() + 1);
    for kv in &args.set {
        let (key, value) = kv
            .split_once('=')
            .with_context(|| format!("--set '{kv}' must have the form key=value"))?;
        overrides.push((key.to_string(), value.to_string()));
    }
    if let Some(seed) = args.seed {
        overrides.push(("master_seed".to_string(), seed.to_string()));
    }
    Ok(ScenarioConfig::from_toml_str_with_overrides(
        &text, &overrides,
    )?)
}

fn run(scenario: ScenarioArgs, out: &Path, threads: Option<usize>) -> anyhow::Result<()> {
    let cfg = load_scenario(&scenario)?;
    let campaign = PreparedCampaign::new(&cfg)?;
    let started = Instant::now();
    let result = match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("building thread pool")?;
            pool.install(|| campaign.run())?
        }
        None => campaign.run()?,
    };
    let wall_time_s = started.elapsed().as_secs_f64();
    let bundle = report::build_bundle(
        &cfg,
        &result,
        env!("CARGO_PKG_VERSION"),
        threads,
        wall_time_s,
    );

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let files = [
        ("trials.csv", &bundle.trials_table),
        ("summary.csv", &bundle.summary_table),
        ("manifest.toml", &bundle.run_manifest),
    ];
    let mut written: Vec<PathBuf> = Vec::new();
    for (name, contents) in files {
        let path = out.join(name);
        if let Err(e) = fs::write(&path, contents) {
            // Remove partial output so a failed run leaves nothing behind.
            for prev in &written {
                let _ = fs::remove_file(prev);
            }
            let _ = fs::remove_file(&path);
            return Err(e).with_context(|| format!("writing {}", path.display()));
        }
        written.push(path);
    }

    print!("{}", bundle.summary_table);
    eprintln!(
        "wrote {} trials to {} in {:.1} s",
        result.trials.len(),
        out.display(),
        wall_time_s
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn linkbudget(
    carrier_hz: f64,
    wavelength_m: Option<f64>,
    range_m: f64,
    gamma_db_per_km: f64,
    p_tx_w: f64,
    bandwidth_hz: f64,
    g_tx_dbi: f64,
    g_rx_dbi: f64,
    noise_figure_db: f64,
    t_mr_k: f64,
) -> anyhow::Result<()> {
    let wavelength = match wavelength_m {
        Some(l) if l > 0.0 => l,
        Some(l) => bail!("--wavelength-m ({l}) must be positive"),
        None if carrier_hz > 0.0 => SPEED_OF_LIGHT_M_PER_S / carrier_hz,
        None => bail!("--carrier-hz ({carrier_hz}) must be positive"),
    };
    let atmosphere = AtmosphereConfig::new(gamma_db_per_km, 0.0, 0.0, t_mr_k)?;
    let rx = ReceiverNoiseConfig::new(noise_figure_db)?;
    let loss = path_loss(range_m, gamma_db_per_km)?;
    let g_tx = 10f64.powf(g_tx_dbi / 10.0);
    let g_rx = 10f64.powf(g_rx_dbi / 10.0);
    let p_rx = friis_received_power(p_tx_w, g_tx, g_rx, wavelength, loss)?;
    let n0 = noise_psd(&atmosphere, &rx);
    if bandwidth_hz.is_nan() || bandwidth_hz <= 0.0 {
        bail!("--bandwidth-hz ({bandwidth_hz}) must be positive");
    }
    let noise_w = n0 * bandwidth_hz;
    let snr = p_rx / noise_w;
    let rate = bandwidth_hz * (1.0 + snr).log2();

    println!("wavelength_m     = {wavelength:.6e}");
    println!("path_loss_db     = {:.3}", -10.0 * loss.log10());
    println!("p_rx_w           = {p_rx:.6e}");
    println!("p_rx_dbm         = {:.3}", 10.0 * (p_rx * 1000.0).log10());
    println!("noise_psd_w_hz   = {n0:.6e}");
    println!("noise_power_w    = {noise_w:.6e}");
    println!("snr_db           = {:.3}", 10.0 * snr.log10());
    println!("rate_bps         = {rate:.6e}");
    Ok(())
}
