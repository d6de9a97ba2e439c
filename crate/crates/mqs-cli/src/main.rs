//! Batch front-end: parameter sweeps over lossy macroscopic-superposition
//! families with CSV output, an oracle cross-check suite, and a parameter
//! info dump.

mod config;
mod sweep;
mod validate;

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use config::{Family, RawSweepOptions, SweepConfig};

#[derive(Parser)]
#[command(
    name = "mqs",
    about = "Decoherence sweeps for macroscopic quantum superpositions under photon loss",
    version
)]
struct Cli {
    /// Worker threads (overrides the MQS_THREADS environment variable;
    /// default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a reflectivity sweep and write one CSV row per grid point.
    Sweep(SweepArgs),
    /// Run every oracle cross-check; nonzero exit on any failure.
    Validate(ValidateArgs),
    /// Print mean photon number, slope limit and truncation requirements.
    Info(InfoArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// key = value config file; command-line flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// State family: coherent_mqs | coherent_pointer | noon |
    /// qiopa_equatorial | qiopa_hv | qiopa_ofiltered.
    #[arg(long)]
    family: Option<String>,
    /// Coherent amplitude (coherent families).
    #[arg(long)]
    alpha: Option<f64>,
    /// Branch phase (coherent_mqs) or echoed equatorial angle (qiopa).
    #[arg(long)]
    phi: Option<f64>,
    /// Amplifier gains, comma separated.
    #[arg(long)]
    g: Option<String>,
    /// NOON photon numbers, comma separated.
    #[arg(long)]
    photons: Option<String>,
    /// Filter thresholds, comma separated (qiopa_ofiltered).
    #[arg(long)]
    k: Option<String>,
    /// Reflectivity grid: comma list or start:stop:count.
    #[arg(long)]
    r_grid: Option<String>,
    /// Photon-number cutoff per mode (default: derived from the tail bound).
    #[arg(long)]
    n_max: Option<usize>,
    /// Maximum probability allowed outside the truncated basis.
    #[arg(long)]
    tail_tol: Option<f64>,
    /// Output CSV path.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Photon-number cutoff for the closed-form vs oracle grids.
    #[arg(long, default_value_t = 40)]
    n_max: usize,
    /// Comma-separated subset of check names to run.
    #[arg(long)]
    checks: Option<String>,
}

#[derive(Args)]
struct InfoArgs {
    /// State family to describe.
    #[arg(long)]
    family: String,
    /// Amplifier gain.
    #[arg(long, default_value_t = 0.8)]
    g: f64,
    /// Coherent amplitude.
    #[arg(long, default_value_t = 4.0)]
    alpha: f64,
    /// NOON photon number.
    #[arg(long, default_value_t = 4)]
    photons: usize,
    /// Tail tolerance used for the truncation estimate.
    #[arg(long, default_value_t = 1e-10)]
    tail_tol: f64,
}

fn init_parallelism(flag: Option<usize>) {
    let from_env = std::env::var("MQS_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(n) = flag.or(from_env) {
        let n = n.max(1);
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        faer::set_global_parallelism(faer::Par::rayon(n));
    }
}

fn run_sweep_command(args: SweepArgs) -> anyhow::Result<()> {
    let from_file = match &args.config {
        Some(path) => config::read_config_file(path)?,
        None => RawSweepOptions::default(),
    };
    let flags = RawSweepOptions {
        family: args.family,
        alpha: args.alpha,
        phi: args.phi,
        gains: args.g,
        photons: args.photons,
        thresholds: args.k,
        r_grid: args.r_grid,
        n_max: args.n_max,
        tail_tol: args.tail_tol,
        output: args.output,
    };
    let cfg = SweepConfig::resolve(from_file.overridden_by(flags))?;
    eprintln!(
        "sweep: family={}, {} grid points, writing {}",
        cfg.family.name(),
        cfg.r_grid.len(),
        cfg.output.display()
    );
    let rows = sweep::run_sweep(&cfg);
    let file = File::create(&cfg.output)?;
    sweep::write_csv(BufWriter::new(file), &rows)?;
    eprintln!("sweep: wrote {} rows", rows.len());
    Ok(())
}

fn run_info_command(args: InfoArgs) -> anyhow::Result<()> {
    let family = Family::parse(&args.family)?;
    println!("family: {}", family.name());
    match family {
        Family::CoherentMqs | Family::CoherentPointer => {
            let alpha = Complex64::new(args.alpha, 0.0);
            let n_max = mqs_core::states::coherent_required_n_max(alpha, args.tail_tol);
            println!("alpha = {}", args.alpha);
            println!("mean photon number <n> = {}", args.alpha * args.alpha);
            println!(
                "required n_max (tail {:.1e}) = {} (single-mode dim {})",
                args.tail_tol,
                n_max,
                n_max + 1
            );
        }
        Family::Noon => {
            println!("photons N = {}", args.photons);
            println!("mean photon number <n> = {}", args.photons);
            println!(
                "required n_max = {} (two-mode dim {})",
                args.photons,
                (args.photons + 1) * (args.photons + 1)
            );
        }
        _ => {
            let n_max = mqs_core::states::qiopa_required_n_max(args.g, args.tail_tol)?;
            println!("gain g = {}", args.g);
            println!(
                "mean photon number <n> = {:.6}",
                mqs_core::states::qiopa_mean_photon_number(args.g)
            );
            println!(
                "slope-limit closed form = {:.6}",
                mqs_core::states::qiopa_slope_limit(args.g)
            );
            println!(
                "required n_max (tail {:.1e}) = {} (two-mode dim {})",
                args.tail_tol,
                n_max,
                (n_max + 1) * (n_max + 1)
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_parallelism(cli.threads);
    match cli.command {
        Command::Sweep(args) => match run_sweep_command(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: {err:#}");
                ExitCode::from(2)
            }
        },
        Command::Validate(args) => {
            let failures = validate::run_validation(args.n_max, args.checks.as_deref());
            if failures == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Info(args) => match run_info_command(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: {err:#}");
                ExitCode::from(2)
            }
        },
    }
}
