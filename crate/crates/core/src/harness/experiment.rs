use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::dtn::NoiseSpec;
use crate::error::Result;
use crate::field::ComplexField;
use crate::grid::{BoundaryGeometry, DomainMask, Grid};
use crate::reconstruct::{
    reconstruct_alg1, reconstruct_alg2, reconstruct_frechet, reconstruct_multik, Algorithm, FrequencyGrid,
    Reconstruction, Setup, WavenumberSchedule,
};

use super::config::ExperimentConfig;
use super::metrics::{compute_metrics, frequency_residuals, FrequencyResidual, Metrics};
use super::oracle::VolumeOracle;
use super::output::{fourier_csv, pgm, reconstruction_csv, residual_csv};
use super::presets::preset_potential;

/// Radius of the disk domain; both grids cover `[-R, R]²`.
pub const DOMAIN_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub name: &'static str,
    pub version: &'static str,
    pub config: ExperimentConfig,
    pub l: f64,
    pub wavenumbers: Vec<f64>,
    pub retained_per_k: Vec<usize>,
    pub failed_frequencies: usize,
    pub fine_unknowns: usize,
    pub coarse_interior_nodes: usize,
    pub boundary_samples: usize,
    /// Linear `[min, max]` maps of the heatmaps.
    pub recon_range: [f64; 2],
    pub error_range: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub metrics: Metrics,
    pub reconstruction: Reconstruction,
    pub residuals: Vec<FrequencyResidual>,
    pub manifest: Manifest,
}

/// Reconstruction only, without touching the file system.
pub fn run_reconstruction(config: &ExperimentConfig) -> Result<(Reconstruction, Vec<FrequencyResidual>, Metrics)> {
    config.validate()?;
    let fine = Grid::new(config.fine, DOMAIN_RADIUS)?;
    let mask = DomainMask::disk(&fine, DOMAIN_RADIUS)?;
    let boundary = BoundaryGeometry::for_grid(&fine, DOMAIN_RADIUS)?;
    let coarse = Grid::new(config.coarse, DOMAIN_RADIUS)?;
    let coarse_mask = DomainMask::disk(&coarse, DOMAIN_RADIUS)?;
    let c = preset_potential(config.preset, config.amplitude, &fine, &mask)?;
    let c_true = true_potential(config, &coarse);

    let mut setup = Setup::new(&fine, &mask, &boundary, &c, &coarse);
    setup.picard = config.picard();
    setup.batch = config.batch;
    let noise = NoiseSpec::new(config.noise, config.seed)?;
    let l = config.resolved_l();
    let rec = match config.algorithm {
        Algorithm::Multik => {
            let ks = config.wavenumbers()?;
            let schedule = WavenumberSchedule::from_values(ks, config.m)?;
            let freqs = schedule
                .wavenumbers()
                .iter()
                .map(|&k| FrequencyGrid::new(k, l, config.freq_lengths, config.freq_angles))
                .collect::<Result<Vec<_>>>()?;
            reconstruct_multik(&setup, &schedule, &freqs, noise)?
        }
        alg => {
            let k = config.wavenumbers()?[0];
            let freq = FrequencyGrid::new(k, l, config.freq_lengths, config.freq_angles)?;
            match alg {
                Algorithm::Alg1 => reconstruct_alg1(&setup, k, &freq, noise)?,
                Algorithm::Alg2 => reconstruct_alg2(&setup, k, config.m, &freq, noise)?,
                _ => reconstruct_frechet(&setup, k, config.m, config.eps, &freq, noise)?,
            }
        }
    };
    rec.table.check_truncation(config.m)?;
    let residuals = frequency_residuals(&rec.table, &VolumeOracle::new(&c));
    let metrics = compute_metrics(&rec.field, &c_true, &coarse_mask, &residuals)?;
    Ok((rec, residuals, metrics))
}

/// Preset evaluated analytically on `coarse`.
pub fn true_potential(config: &ExperimentConfig, coarse: &Grid) -> Vec<f64> {
    coarse
        .nodes()
        .map(|(_, x)| config.preset.eval(config.amplitude, x))
        .collect()
}

/// Runs the configured reconstruction and writes `manifest.json`,
/// `fourier_samples.csv`, `reconstruction.csv`, `oracle_residuals.csv`,
/// `recon.pgm`, `error.pgm` and `metrics.json` into `config.out`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let out = config.out.as_path();
    fs::create_dir_all(out)?;
    // a failed run leaves this behind instead of stale results
    write(out, "manifest.json", serde_json::to_string_pretty(config)? + "\n")?;

    let (rec, residuals, metrics) = run_reconstruction(config)?;

    let coarse = Grid::new(config.coarse, DOMAIN_RADIUS)?;
    let coarse_mask = DomainMask::disk(&coarse, DOMAIN_RADIUS)?;
    let c_true = true_potential(config, &coarse);
    let n = coarse.n_per_axis();

    let recon_values = rec.potential();
    let error_values: Vec<f64> = recon_values
        .iter()
        .zip(&c_true)
        .zip(coarse_mask.flags())
        .map(|((r, t), &inside)| if inside { (r - t).abs() } else { 0.0 })
        .collect();
    let (recon_pgm, recon_range) = pgm(n, &recon_values);
    let (error_pgm, error_range) = pgm(n, &error_values);

    let fine = Grid::new(config.fine, DOMAIN_RADIUS)?;
    let manifest = Manifest {
        name: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        l: config.resolved_l(),
        wavenumbers: rec.wavenumbers.clone(),
        retained_per_k: rec
            .wavenumbers
            .iter()
            .map(|&k| rec.table.retained().filter(|r| r.k == k).count())
            .collect(),
        failed_frequencies: rec.failures.len(),
        fine_unknowns: DomainMask::disk(&fine, DOMAIN_RADIUS)?.interior_count(),
        coarse_interior_nodes: coarse_mask.interior_count(),
        boundary_samples: BoundaryGeometry::for_grid(&fine, DOMAIN_RADIUS)?.n_samples(),
        recon_range,
        error_range,
    };

    write(out, "fourier_samples.csv", fourier_csv(&rec.table))?;
    write(
        out,
        "reconstruction.csv",
        reconstruction_csv(&coarse, &coarse_mask, &rec.field, &c_true),
    )?;
    write(out, "oracle_residuals.csv", residual_csv(&residuals))?;
    fs::write(out.join("recon.pgm"), recon_pgm)?;
    fs::write(out.join("error.pgm"), error_pgm)?;
    write(out, "metrics.json", serde_json::to_string_pretty(&metrics)? + "\n")?;
    write(out, "manifest.json", serde_json::to_string_pretty(&manifest)? + "\n")?;

    Ok(RunOutcome {
        metrics,
        reconstruction: rec,
        residuals,
        manifest,
    })
}

fn write(dir: &Path, name: &str, contents: String) -> Result<()> {
    fs::write(dir.join(name), contents)?;
    Ok(())
}

/// Volume-oracle values on a frequency grid, for the `oracle` command.
pub fn oracle_table(c: &ComplexField, freq: &FrequencyGrid) -> String {
    use std::fmt::Write as _;
    let oracle = VolumeOracle::new(c);
    let mut s = String::from("kappa,theta,xi1,xi2,re_hat,im_hat,sigma\n");
    for p in freq.points() {
        let xi = p.xi();
        let v = oracle.eval(xi);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            p.kappa, p.theta, xi[0], xi[1], v.re, v.im, p.sigma
        );
    }
    s
}
