use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use invlab_core::harness::{self, ExperimentConfig, Preset};
use invlab_core::{Algorithm, DomainMask, Error, FrequencyGrid, Grid};

/// Forward solves and Fourier-domain potential reconstruction for the
/// nonlinear Helmholtz equation on the disk of radius 0.5.
#[derive(Parser, Debug)]
#[command(name = "invlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reconstruct a preset potential and write the run directory.
    Run(RunArgs),
    /// Print the volume-oracle Fourier table of a preset as CSV.
    Oracle(OracleArgs),
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, default_value = "alg1")]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 2)]
    m: u32,
    /// Wavenumber for alg1, alg2 and frechet.
    #[arg(long, conflicts_with_all = ["k1", "kmax"])]
    k: Option<f64>,
    /// First wavenumber of the multik schedule.
    #[arg(long, requires = "kmax")]
    k1: Option<f64>,
    /// Largest wavenumber of the multik schedule.
    #[arg(long, requires = "k1")]
    kmax: Option<f64>,
    #[arg(long, default_value_t = 200)]
    fine: usize,
    #[arg(long, default_value_t = 90)]
    coarse: usize,
    #[arg(long, default_value_t = 60)]
    freq_lengths: usize,
    #[arg(long, default_value_t = 64)]
    freq_angles: usize,
    /// Frequency extent in units of k [default: 3 for alg1, m+1 otherwise].
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "gaussian")]
    preset: Preset,
    #[arg(long, default_value_t = 0.1)]
    amplitude: f64,
    /// Frequencies per batched forward solve.
    #[arg(long, default_value_t = 8)]
    batch: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl RunArgs {
    fn into_config(self) -> ExperimentConfig {
        let k = match (self.k, self.algorithm) {
            (None, Algorithm::Multik) => None,
            (None, _) if self.k1.is_none() => Some(10.0),
            (k, _) => k,
        };
        ExperimentConfig {
            algorithm: self.algorithm,
            m: self.m,
            k,
            k1: self.k1,
            k_max: self.kmax,
            fine: self.fine,
            coarse: self.coarse,
            freq_lengths: self.freq_lengths,
            freq_angles: self.freq_angles,
            l: self.l,
            eps: self.eps,
            noise: self.noise,
            seed: self.seed,
            preset: self.preset,
            amplitude: self.amplitude,
            batch: self.batch,
            out: self.out,
            ..ExperimentConfig::default()
        }
    }
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, default_value = "gaussian")]
    preset: Preset,
    #[arg(long, default_value_t = 0.1)]
    amplitude: f64,
    #[arg(long, default_value_t = 200)]
    fine: usize,
    #[arg(long, default_value_t = 10.0)]
    k: f64,
    #[arg(long = "L", default_value_t = 3.0)]
    l: f64,
    #[arg(long, default_value_t = 60)]
    freq_lengths: usize,
    #[arg(long, default_value_t = 64)]
    freq_angles: usize,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Json(_) => 4,
        Error::NearResonance { .. } | Error::NoConvergence { .. } | Error::NonFinite(_) | Error::EmptyTable => 3,
        _ => 2,
    }
}

fn run(args: RunArgs) -> Result<(), Error> {
    let config = args.into_config();
    let outcome = harness::run_experiment(&config)?;
    let m = &outcome.metrics;
    println!(
        "{} k = {:?}: max_abs_error = {:.6e}, rel_l2_error = {:.6e}, retained = {}, failed = {}",
        config.algorithm,
        outcome.manifest.wavenumbers,
        m.max_abs_error,
        m.rel_l2_error,
        outcome.reconstruction.table.retained_count(),
        outcome.manifest.failed_frequencies
    );
    println!("wrote {}", config.out.display());
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<(), Error> {
    let grid = Grid::new(args.fine, 0.5)?;
    let mask = DomainMask::disk(&grid, 0.5)?;
    let c = harness::preset_potential(args.preset, args.amplitude, &grid, &mask)?;
    let freq = FrequencyGrid::new(args.k, args.l, args.freq_lengths, args.freq_angles)?;
    let table = harness::oracle_table(&c, &freq);
    match args.out {
        Some(path) => std::fs::write(path, table)?,
        None => print!("{table}"),
    }
    Ok(())
}

fn selftest() -> ExitCode {
    let checks = harness::run_selftest();
    for c in &checks {
        println!("{c}");
    }
    if checks.iter().all(|c| c.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Oracle(args) => oracle(args),
        Command::Selftest => return selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
