//! Fast invariant checks, runnable from the CLI without any reference data.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dtn::{add_noise, BoundaryTrace, NoiseSpec, TraceKind};
use crate::error::Result;
use crate::field::ComplexField;
use crate::forward::{neumann_trace, HelmholtzOperator};
use crate::grid::{BoundaryGeometry, DomainMask, Grid};
use crate::probes::{frechet_probe, mu_probe, quadratic_probe, ComplexVector2, PlaneWaveSum, ProbeSet};
use crate::reconstruct::{synthesize, Algorithm, FourierRecord, FourierTable, WavenumberSchedule};

use super::oracle::VolumeOracle;
use super::presets::{preset_potential, Preset};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

/// Worst normalized defects `(max |ζ·ζ - k²|/k², max |Σζ - ξ|/(1+|ξ|))` over
/// `draws` random propagating probe sets from every constructor.
pub fn probe_algebra_defects(draws: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (0.0f64, 0.0f64);
    for _ in 0..draws {
        let k: f64 = rng.random_range(1.0..=20.0);
        let m: u32 = rng.random_range(2..=6);
        let angle: f64 = rng.random_range(0.0..2.0 * PI);
        let dir = [angle.cos(), angle.sin()];
        let at = |r: f64| [r * dir[0], r * dir[1]];
        let mf = m as f64;
        let sets = [
            quadratic_probe(k, at(rng.random_range(1e-6..=3.0) * k))?,
            frechet_probe(k, at(rng.random_range(1e-6..=mf + 1.0) * k), m)?,
            mu_probe(k, at(rng.random_range(mf - 1.0..=mf + 1.0) * k), m)?,
        ];
        for set in &sets {
            let (a, b) = defects(set);
            worst = (worst.0.max(a), worst.1.max(b));
        }
    }
    Ok(worst)
}

fn defects(set: &ProbeSet) -> (f64, f64) {
    let k2 = set.k * set.k;
    let norm = set
        .probes
        .iter()
        .map(|p| (p.zeta.self_product() - k2).norm() / k2)
        .fold(0.0, f64::max);
    let sum = set.weighted_sum();
    let xi_norm = set.xi[0].hypot(set.xi[1]);
    let gap = (sum.0[0] - set.xi[0]).norm().max((sum.0[1] - set.xi[1]).norm()) / (1.0 + xi_norm);
    (norm, gap)
}

/// Largest `‖t̃ - t‖∞ / (δ‖t‖∞)` over `seeds` noise realizations of a fixed
/// trace; must not exceed 1.
pub fn noise_bound_ratio(seeds: u64, delta: f64) -> Result<f64> {
    let values: Vec<Complex64> = (0..400)
        .map(|j| Complex64::from_polar(1.0 + (j as f64 * 0.37).sin(), j as f64 * 0.11))
        .collect();
    let trace = BoundaryTrace::new(TraceKind::Neumann, values);
    let mut worst = 0.0f64;
    for seed in 0..seeds {
        let noisy = add_noise(&trace, NoiseSpec::new(delta, seed)?);
        worst = worst.max(noisy.max_abs_diff(&trace) / (delta * trace.sup_norm()));
    }
    Ok(worst)
}

/// Relative interior and trace errors of the `c = 0` forward solve against
/// the exact plane wave with real `ζ`, `|ζ| = k`.
pub fn plane_wave_errors(n: usize, k: f64, angle: f64) -> Result<(f64, f64)> {
    let grid = Grid::new(n, 0.5)?;
    let mask = DomainMask::disk(&grid, 0.5)?;
    let boundary = BoundaryGeometry::for_grid(&grid, 0.5)?;
    let op = HelmholtzOperator::new(&grid, &mask, k)?;
    let zeta = ComplexVector2::real([k * angle.cos(), k * angle.sin()]);
    let wave = PlaneWaveSum::single(zeta);
    let exact = ComplexField::from_fn(grid, |x| wave.eval(x));
    let u = op.solve(&exact, &ComplexField::zeros(grid))?;
    let mut interior = 0.0f64;
    for (i, _) in grid.nodes() {
        if mask.is_interior(i) {
            interior = interior.max((u.values()[i] - exact.values()[i]).norm());
        }
    }
    let trace = neumann_trace(&u, &boundary)?;
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for (j, (b, nu)) in boundary.points().iter().zip(boundary.normals()).enumerate() {
        let d = Complex64::i() * zeta.dot_real(*nu) * wave.eval(*b);
        err = err.max((trace.values()[j] - d).norm());
        scale = scale.max(d.norm());
    }
    Ok((interior / exact.max_abs(), err / scale))
}

/// `max |synth(A ∪ B) - synth(A) - synth(B)|` for two random tables.
pub fn synthesis_linearity_defect(seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = Grid::new(45, 0.5)?;
    let mut table = |count: usize| FourierTable {
        records: (0..count)
            .map(|j| {
                let xi = [rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0)];
                FourierRecord {
                    i: j + 1,
                    s: 1,
                    kappa: f64::hypot(xi[0], xi[1]),
                    theta: f64::atan2(xi[1], xi[0]),
                    xi,
                    estimate: Some(Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
                    sigma: rng.random_range(0.0..0.1),
                    retained: true,
                    algorithm: Algorithm::Alg1,
                    k: 10.0,
                }
            })
            .collect(),
    };
    let a = table(40);
    let b = table(25);
    let mut joint = a.clone();
    joint.extend(b.clone());
    let sum = synthesize(&a, &grid)?.add(&synthesize(&b, &grid)?)?;
    synthesize(&joint, &grid)?.max_abs_diff(&sum)
}

/// Defect of the annulus tiling for the cubic four-wavenumber schedule:
/// largest gap or overlap between consecutive annuli plus the distance of
/// the union's ends from `[2.5, 40)`.
pub fn tiling_defect() -> Result<f64> {
    let s = WavenumberSchedule::geometric(1.25, 10.0, 3)?;
    let annuli = s.annuli();
    let seams = annuli.windows(2).map(|w| (w[0].1 - w[1].0).abs()).fold(0.0, f64::max);
    let ends = (annuli[0].0 - 2.5).abs() + (annuli[annuli.len() - 1].1 - 40.0).abs();
    let count = (s.wavenumbers().len() as f64 - 4.0).abs();
    Ok(seams + ends + count)
}

/// Largest `|oracle(-ξ) - conj oracle(ξ)|` relative to `1 + |oracle(ξ)|`.
pub fn oracle_symmetry_defect() -> Result<f64> {
    let grid = Grid::new(100, 0.5)?;
    let mask = DomainMask::disk(&grid, 0.5)?;
    let c = preset_potential(Preset::Dipole, 0.1, &grid, &mask)?;
    let o = VolumeOracle::new(&c);
    Ok([[4.0, 1.0], [-13.0, 9.0], [0.5, -27.0]]
        .iter()
        .map(|&xi| {
            let a = o.eval(xi);
            (o.eval([-xi[0], -xi[1]]) - a.conj()).norm() / (1.0 + a.norm())
        })
        .fold(0.0, f64::max))
}

pub fn run_selftest() -> Vec<Check> {
    let mut checks = Vec::new();
    let mut record = |name: &'static str, outcome: Result<(bool, String)>| {
        checks.push(match outcome {
            Ok((passed, detail)) => Check::new(name, passed, detail),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        });
    };
    record(
        "probe algebra",
        probe_algebra_defects(1000, 1).map(|(a, b)| {
            (
                a <= 1e-10 && b <= 1e-10,
                format!("max |ζ·ζ-k²|/k² = {a:.2e}, max |Σζ-ξ|/(1+|ξ|) = {b:.2e}"),
            )
        }),
    );
    record(
        "noise bound",
        noise_bound_ratio(1000, 0.1).map(|r| (r <= 1.0, format!("max ‖t̃-t‖∞/(δ‖t‖∞) = {r:.6}"))),
    );
    record(
        "plane wave",
        plane_wave_errors(120, 5.0, 0.3)
            .map(|(a, b)| (a <= 1e-2 && b <= 5e-2, format!("interior {a:.2e}, trace {b:.2e}"))),
    );
    record(
        "synthesis linearity",
        synthesis_linearity_defect(7).map(|d| (d <= 1e-12, format!("defect {d:.2e}"))),
    );
    record(
        "annulus tiling",
        tiling_defect().map(|d| (d == 0.0, format!("defect {d:e}"))),
    );
    record(
        "oracle symmetry",
        oracle_symmetry_defect().map(|d| (d <= 1e-12, format!("defect {d:.2e}"))),
    );
    checks
}
