//! Fourier-domain reconstruction of the potential from boundary data.
//!
//! Each scheme estimates `𝓕[c](ξ) = ∫ c(x) e^{iξ·x} dx` at the nodes
//! `ξ = κ_i ŷ_s` of a polar [`FrequencyGrid`] through a boundary identity:
//!
//! * quadratic (`m = 2`): `½ ∫ (g'_w - g'_u - g'_v) φ dS` with the probe
//!   triple of [`quadratic_probe`], retained for `|ξ| ≤ 3k`;
//! * annulus (any `m ≥ 2`): `∫ g'_u φ dS` with [`mu_probe`], retained on
//!   `[(m-1)k, (m+1)k)`; several wavenumbers tile a wider band;
//! * Fréchet (`m = 2, 3`): `(1/m!) ∫ D^m₀Λ_c(f₁..f_m) f_{m+1} dS` with the
//!   probes of [`frechet_probe`], retained for `|ξ| ≤ (m+1)k`.
//!
//! The retained estimates are summed against `e^{-iξ·x} σ` on the coarse
//! grid, `σ` being the polar Riemann weight `κ Δκ Δθ / (2π)²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dtn::{add_noise, BoundaryTrace, DtnMap, NoiseSpec, TraceKind};
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::forward::{HelmholtzOperator, PicardOptions};
use crate::grid::{BoundaryGeometry, DomainMask, Grid};
use crate::probes::{frechet_probe, mu_probe, quadratic_probe, PlaneWaveSum, ProbeSet};

/// Relative slack for the truncation and tiling comparisons.
const EDGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Alg1,
    Alg2,
    Multik,
    Frechet,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Alg1 => "alg1",
            Algorithm::Alg2 => "alg2",
            Algorithm::Multik => "multik",
            Algorithm::Frechet => "frechet",
        }
    }

    /// Whether a sample of length `kappa` is kept for wavenumber `k`.
    pub fn retains(&self, m: u32, k: f64, kappa: f64) -> bool {
        let mf = m as f64;
        match self {
            Algorithm::Alg1 => kappa <= 3.0 * k * (1.0 + EDGE_TOL),
            Algorithm::Alg2 | Algorithm::Multik => {
                kappa >= (mf - 1.0) * k * (1.0 - EDGE_TOL) && kappa < (mf + 1.0) * k * (1.0 - EDGE_TOL)
            }
            Algorithm::Frechet => kappa <= (mf + 1.0) * k * (1.0 + EDGE_TOL),
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alg1" => Ok(Algorithm::Alg1),
            "alg2" => Ok(Algorithm::Alg2),
            "multik" => Ok(Algorithm::Multik),
            "frechet" => Ok(Algorithm::Frechet),
            other => Err(Error::invalid(format!("unknown algorithm '{other}'"))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One node of the polar frequency grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPoint {
    /// 1-based length and angle indices.
    pub i: usize,
    pub s: usize,
    pub kappa: f64,
    pub theta: f64,
    pub y_hat: [f64; 2],
    pub z_hat: [f64; 2],
    pub sigma: f64,
}

impl FrequencyPoint {
    pub fn xi(&self) -> [f64; 2] {
        [self.kappa * self.y_hat[0], self.kappa * self.y_hat[1]]
    }
}

/// Lengths `κ_i = i L k / I` and angles `θ_s = 2π s / S`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    k_max: f64,
    l: f64,
    lengths: Vec<f64>,
    angles: Vec<f64>,
    d_kappa: f64,
    d_theta: f64,
}

impl FrequencyGrid {
    pub fn new(k_max: f64, l: f64, n_lengths: usize, n_angles: usize) -> Result<Self> {
        if !(k_max > 0.0 && k_max.is_finite()) {
            return Err(Error::invalid(format!("k must be positive, got {k_max}")));
        }
        if !(l >= 3.0 && l.is_finite()) {
            return Err(Error::invalid(format!("L must be >= 3, got {l}")));
        }
        if n_lengths < 1 {
            return Err(Error::invalid("need at least one frequency length"));
        }
        if n_angles < 4 {
            return Err(Error::invalid(format!("need at least 4 angles, got {n_angles}")));
        }
        let d_kappa = l * k_max / n_lengths as f64;
        let d_theta = 2.0 * PI / n_angles as f64;
        Ok(Self {
            k_max,
            l,
            lengths: (1..=n_lengths).map(|i| i as f64 * d_kappa).collect(),
            angles: (1..=n_angles).map(|s| s as f64 * d_theta).collect(),
            d_kappa,
            d_theta,
        })
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.lengths.len() * self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sigma(&self, kappa: f64) -> f64 {
        kappa * self.d_kappa * self.d_theta / (4.0 * PI * PI)
    }

    /// All nodes, lengths outermost, in `(i, s)` order.
    pub fn points(&self) -> impl Iterator<Item = FrequencyPoint> + '_ {
        self.lengths.iter().enumerate().flat_map(move |(ii, &kappa)| {
            self.angles.iter().enumerate().map(move |(si, &theta)| {
                let (sn, cs) = theta.sin_cos();
                FrequencyPoint {
                    i: ii + 1,
                    s: si + 1,
                    kappa,
                    theta,
                    y_hat: [cs, sn],
                    z_hat: [-sn, cs],
                    sigma: self.sigma(kappa),
                }
            })
        })
    }
}

/// Geometric wavenumbers `k_{j+1} = (m+1)/(m-1) k_j` in `(0, K]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavenumberSchedule {
    m: u32,
    ks: Vec<f64>,
}

impl WavenumberSchedule {
    pub fn ratio(m: u32) -> f64 {
        (m as f64 + 1.0) / (m as f64 - 1.0)
    }

    pub fn geometric(k1: f64, k_max: f64, m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid(format!("schedule needs m >= 2, got {m}")));
        }
        if !(k1 > 0.0 && k1.is_finite() && k_max >= k1) {
            return Err(Error::invalid(format!("need 0 < k1 <= K, got k1 = {k1}, K = {k_max}")));
        }
        let r = Self::ratio(m);
        let mut ks = vec![k1];
        loop {
            let next = ks[ks.len() - 1] * r;
            if next > k_max * (1.0 + EDGE_TOL) {
                break;
            }
            ks.push(next);
        }
        Ok(Self { m, ks })
    }

    pub fn from_values(ks: Vec<f64>, m: u32) -> Result<Self> {
        if m < 2 || ks.is_empty() {
            return Err(Error::invalid("schedule needs m >= 2 and at least one wavenumber"));
        }
        let r = Self::ratio(m);
        for w in ks.windows(2) {
            if ((w[1] / w[0]) - r).abs() > 1e-12 * r {
                return Err(Error::invalid(format!(
                    "schedule ratio {} differs from (m+1)/(m-1) = {r}",
                    w[1] / w[0]
                )));
            }
        }
        Ok(Self { m, ks })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.ks
    }

    /// Half-open annuli `[(m-1)k_j, (m+1)k_j)`.
    pub fn annuli(&self) -> Vec<(f64, f64)> {
        let mf = self.m as f64;
        self.ks.iter().map(|k| ((mf - 1.0) * k, (mf + 1.0) * k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierRecord {
    pub i: usize,
    pub s: usize,
    pub kappa: f64,
    pub theta: f64,
    pub xi: [f64; 2],
    /// `None` when the sample was not retained or its solve failed.
    pub estimate: Option<Complex64>,
    pub sigma: f64,
    pub retained: bool,
    pub algorithm: Algorithm,
    pub k: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FourierTable {
    pub records: Vec<FourierRecord>,
}

impl FourierTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn retained(&self) -> impl Iterator<Item = &FourierRecord> {
        self.records.iter().filter(|r| r.retained)
    }

    pub fn retained_count(&self) -> usize {
        self.retained().count()
    }

    pub fn extend(&mut self, other: FourierTable) {
        self.records.extend(other.records);
    }

    /// Checks that every retained record obeys the truncation rule of the
    /// algorithm that produced it.
    pub fn check_truncation(&self, m: u32) -> Result<()> {
        for r in self.retained() {
            if !r.algorithm.retains(m, r.k, r.kappa) || r.estimate.is_none() {
                return Err(Error::invalid(format!(
                    "record (i={}, s={}) with kappa {} violates the {} truncation at k = {}",
                    r.i, r.s, r.kappa, r.algorithm, r.k
                )));
            }
        }
        Ok(())
    }
}

/// `c(x) = Σ_retained 𝓕̂(ξ) e^{-iξ·x} σ` on every node of `coarse`, summed in
/// table order. Take the real part for the potential.
pub fn synthesize(table: &FourierTable, coarse: &Grid) -> Result<ComplexField> {
    let terms: Vec<_> = table
        .retained()
        .filter_map(|r| r.estimate.map(|e| (r.xi, e * r.sigma)))
        .collect();
    if terms.is_empty() {
        return Err(Error::EmptyTable);
    }
    let n = coarse.n_per_axis();
    let axis: Vec<f64> = (0..n).map(|p| coarse.coord(p, 0)[0]).collect();
    let mut values = vec![Complex64::new(0.0, 0.0); coarse.len()];
    let mut ex = vec![Complex64::new(0.0, 0.0); n];
    let mut ey = vec![Complex64::new(0.0, 0.0); n];
    for (xi, weight) in terms {
        // e^{-iξ·x} = e^{-iξ₁x₁} e^{-iξ₂x₂}
        for p in 0..n {
            ex[p] = Complex64::from_polar(1.0, -xi[0] * axis[p]);
            ey[p] = Complex64::from_polar(1.0, -xi[1] * axis[p]) * weight;
        }
        for q in 0..n {
            let row = &mut values[q * n..(q + 1) * n];
            let wy = ey[q];
            for (v, e) in row.iter_mut().zip(&ex) {
                *v += e * wy;
            }
        }
    }
    ComplexField::from_values(*coarse, values)
}

/// Which boundary identity a sample uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    Quadratic,
    Annulus,
    Frechet { eps: f64 },
}

impl Scheme {
    fn probes(&self, k: f64, xi: [f64; 2], m: u32) -> Result<ProbeSet> {
        let xi_norm = xi[0].hypot(xi[1]);
        match self {
            Scheme::Quadratic => {
                if m != 2 {
                    return Err(Error::UnsupportedM(m));
                }
                let set = quadratic_probe(k, xi)?;
                if !set.is_propagating() {
                    return Err(Error::EvanescentSkipped { xi_norm, k });
                }
                Ok(set)
            }
            Scheme::Annulus => {
                let set = mu_probe(k, xi, m)?;
                if !set.is_propagating() {
                    let mf = m as f64;
                    return Err(Error::AnnulusViolation {
                        xi_norm,
                        lo: (mf - 1.0) * k,
                        hi: (mf + 1.0) * k,
                    });
                }
                Ok(set)
            }
            Scheme::Frechet { .. } => {
                if m != 2 && m != 3 {
                    return Err(Error::UnsupportedM(m));
                }
                let set = frechet_probe(k, xi, m)?;
                if !set.is_propagating() {
                    return Err(Error::EvanescentSkipped { xi_norm, k });
                }
                Ok(set)
            }
        }
    }

    /// Measured traces per sample (used to key noise streams).
    fn traces_per_sample(&self) -> u64 {
        match self {
            Scheme::Quadratic => 3,
            Scheme::Annulus | Scheme::Frechet { .. } => 1,
        }
    }
}

/// Estimates `𝓕[c](ξ)` for every `ξ` in one batch of forward solves.
///
/// Each measured trace gets its own noise stream derived from
/// `noise` and `stream_ids[j]`, so a sample's value does not depend on how
/// the work is batched. The outer error is a setup failure; inner errors
/// are per-sample (evanescent probe, annulus violation, solver failure).
pub fn fourier_samples(
    dtn: &DtnMap<'_>,
    scheme: Scheme,
    xis: &[[f64; 2]],
    noise: NoiseSpec,
    stream_ids: &[u64],
) -> Result<Vec<Result<Complex64>>> {
    if stream_ids.len() != xis.len() {
        return Err(Error::invalid("one noise stream id per frequency"));
    }
    let k = dtn.k();
    let m = dtn.m;
    let boundary = dtn.boundary;

    let sets: Vec<Result<ProbeSet>> = xis.iter().map(|&xi| scheme.probes(k, xi, m)).collect();
    let live: Vec<usize> = (0..xis.len()).filter(|&j| sets[j].is_ok()).collect();
    let per = scheme.traces_per_sample();
    let noisy = |trace: &BoundaryTrace, j: usize, role: u64| {
        add_noise(trace, noise.derive(stream_ids[j].wrapping_mul(per).wrapping_add(role)))
    };

    let mut values: Vec<Option<Result<Complex64>>> = sets
        .iter()
        .map(|s| s.as_ref().err().map(|e| Err(reclassify(e))))
        .collect();

    match scheme {
        Scheme::Quadratic => {
            let mut data = Vec::with_capacity(3 * live.len());
            for &j in &live {
                let set = sets[j].as_ref().expect("live");
                let u0 = PlaneWaveSum::single(set.probes[0].zeta);
                let v0 = PlaneWaveSum::single(set.probes[1].zeta);
                let w0 = u0.plus(&v0);
                data.extend([u0, v0, w0]);
            }
            let traces = dtn.linearized_many(&data)?;
            let mut traces = traces.into_iter();
            for &j in &live {
                let set = sets[j].as_ref().expect("live");
                let group: Result<Vec<BoundaryTrace>> = traces.by_ref().take(3).collect();
                values[j] = Some(group.map(|g| {
                    let gu = noisy(&g[0], j, 0);
                    let gv = noisy(&g[1], j, 1);
                    let gw = noisy(&g[2], j, 2);
                    let combined =
                        BoundaryTrace::signed_sum(TraceKind::Neumann, &[(1.0, &gw), (-1.0, &gu), (-1.0, &gv)]);
                    let phi = BoundaryTrace::dirichlet(&PlaneWaveSum::single(set.test().zeta), boundary);
                    0.5 * boundary.pair(combined.values(), phi.values())
                }));
            }
        }
        Scheme::Annulus => {
            let data: Vec<PlaneWaveSum> = live
                .iter()
                .map(|&j| PlaneWaveSum::single(sets[j].as_ref().expect("live").probes[0].zeta))
                .collect();
            let traces = dtn.linearized_many(&data)?;
            for (&j, t) in live.iter().zip(traces) {
                let set = sets[j].as_ref().expect("live");
                values[j] = Some(t.map(|g| {
                    let g = noisy(&g, j, 0);
                    let phi = BoundaryTrace::dirichlet(&PlaneWaveSum::single(set.test().zeta), boundary);
                    boundary.pair(g.values(), phi.values())
                }));
            }
        }
        Scheme::Frechet { eps } => {
            let funcs: Vec<Vec<PlaneWaveSum>> = live
                .iter()
                .map(|&j| {
                    sets[j]
                        .as_ref()
                        .expect("live")
                        .data()
                        .map(|p| PlaneWaveSum::single(p.zeta))
                        .collect()
                })
                .collect();
            let steps = vec![eps; m as usize];
            let tuples: Vec<(&[PlaneWaveSum], &[f64])> =
                funcs.iter().map(|f| (f.as_slice(), steps.as_slice())).collect();
            let traces = dtn.frechet_many(&tuples)?;
            let factorial: f64 = (1..=m).map(f64::from).product();
            for (&j, t) in live.iter().zip(traces) {
                let set = sets[j].as_ref().expect("live");
                values[j] = Some(t.map(|d| {
                    let d = noisy(&d, j, 0);
                    let f_last = BoundaryTrace::dirichlet(&PlaneWaveSum::single(set.test().zeta), boundary);
                    boundary.pair(d.values(), f_last.values()) / factorial
                }));
            }
        }
    }

    Ok(values
        .into_iter()
        .map(|v| v.expect("every sample is either rejected or measured"))
        .collect())
}

/// Owned copy of a probe-construction error (`Error` is not `Clone`).
fn reclassify(e: &Error) -> Error {
    match e {
        Error::EvanescentSkipped { xi_norm, k } => Error::EvanescentSkipped {
            xi_norm: *xi_norm,
            k: *k,
        },
        Error::AnnulusViolation { xi_norm, lo, hi } => Error::AnnulusViolation {
            xi_norm: *xi_norm,
            lo: *lo,
            hi: *hi,
        },
        Error::UnsupportedM(m) => Error::UnsupportedM(*m),
        Error::InvalidParameter(msg) => Error::InvalidParameter(msg.clone()),
        other => Error::InvalidParameter(other.to_string()),
    }
}

/// `½ ∫ (g'_w - g'_u - g'_v) φ dS` at a single frequency (`m = 2`).
pub fn fourier_sample_alg1(dtn: &DtnMap<'_>, xi: [f64; 2]) -> Result<Complex64> {
    single(dtn, Scheme::Quadratic, xi)
}

/// `∫ g'_u φ dS` at a single frequency in the stable annulus.
pub fn fourier_sample_alg2(dtn: &DtnMap<'_>, xi: [f64; 2]) -> Result<Complex64> {
    single(dtn, Scheme::Annulus, xi)
}

/// `(1/m!) ∫ D^m₀Λ_c(f₁..f_m) f_{m+1} dS` with step `eps` in every direction.
pub fn fourier_sample_frechet(dtn: &DtnMap<'_>, xi: [f64; 2], eps: f64) -> Result<Complex64> {
    single(dtn, Scheme::Frechet { eps }, xi)
}

fn single(dtn: &DtnMap<'_>, scheme: Scheme, xi: [f64; 2]) -> Result<Complex64> {
    fourier_samples(dtn, scheme, &[xi], NoiseSpec::NONE, &[0])?
        .pop()
        .expect("one frequency in, one out")
}

/// Everything a reconstruction needs besides the algorithm parameters.
#[derive(Debug, Clone, Copy)]
pub struct Setup<'a> {
    pub fine: &'a Grid,
    pub mask: &'a DomainMask,
    pub boundary: &'a BoundaryGeometry,
    pub c: &'a ComplexField,
    pub coarse: &'a Grid,
    pub picard: PicardOptions,
    /// Frequencies per batched forward solve.
    pub batch: usize,
}

impl<'a> Setup<'a> {
    pub fn new(
        fine: &'a Grid,
        mask: &'a DomainMask,
        boundary: &'a BoundaryGeometry,
        c: &'a ComplexField,
        coarse: &'a Grid,
    ) -> Self {
        Self {
            fine,
            mask,
            boundary,
            c,
            coarse,
            picard: PicardOptions::default(),
            batch: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub table: FourierTable,
    /// Complex synthesis on the coarse grid; the potential is its real part.
    pub field: ComplexField,
    pub wavenumbers: Vec<f64>,
    /// `(record index, message)` for samples dropped after a solver failure.
    pub failures: Vec<(usize, String)>,
}

impl Reconstruction {
    pub fn potential(&self) -> Vec<f64> {
        self.field.real_part()
    }
}

/// Samples every retained node of `freq` at wavenumber `k` and returns the
/// table (including non-retained nodes, flagged) plus the dropped failures.
#[allow(clippy::too_many_arguments)]
fn build_table(
    setup: &Setup<'_>,
    op: &HelmholtzOperator,
    algorithm: Algorithm,
    scheme: Scheme,
    m: u32,
    freq: &FrequencyGrid,
    noise: NoiseSpec,
    stream_offset: u64,
) -> Result<(FourierTable, Vec<(usize, String)>)> {
    let k = op.k();
    let mut records: Vec<FourierRecord> = freq
        .points()
        .map(|p| FourierRecord {
            i: p.i,
            s: p.s,
            kappa: p.kappa,
            theta: p.theta,
            xi: p.xi(),
            estimate: None,
            sigma: p.sigma,
            retained: algorithm.retains(m, k, p.kappa),
            algorithm,
            k,
        })
        .collect();
    let todo: Vec<usize> = (0..records.len()).filter(|&r| records[r].retained).collect();
    log::info!(
        "{} at k = {k}: sampling {} of {} frequencies",
        algorithm,
        todo.len(),
        records.len()
    );

    let mut dtn = DtnMap::new(op, setup.boundary, m, setup.c);
    dtn.picard = setup.picard;
    let batch = setup.batch.max(1);
    let chunks: Vec<&[usize]> = todo.chunks(batch).collect();
    let results: Vec<Result<Vec<Result<Complex64>>>> = chunks
        .par_iter()
        .map(|chunk| {
            let xis: Vec<[f64; 2]> = chunk.iter().map(|&r| records[r].xi).collect();
            let ids: Vec<u64> = chunk.iter().map(|&r| stream_offset + r as u64).collect();
            fourier_samples(&dtn, scheme, &xis, noise, &ids)
        })
        .collect();

    let mut failures = Vec::new();
    for (chunk, res) in chunks.iter().zip(results) {
        for (&r, value) in chunk.iter().zip(res?) {
            match value {
                Ok(v) => records[r].estimate = Some(v),
                Err(e) => {
                    log::warn!(
                        "dropping xi = ({:.4}, {:.4}) at k = {k}: {e}",
                        records[r].xi[0],
                        records[r].xi[1]
                    );
                    records[r].retained = false;
                    failures.push((r, e.to_string()));
                }
            }
        }
    }
    Ok((FourierTable { records }, failures))
}

fn finish(
    setup: &Setup<'_>,
    table: FourierTable,
    wavenumbers: Vec<f64>,
    failures: Vec<(usize, String)>,
) -> Result<Reconstruction> {
    let field = synthesize(&table, setup.coarse)?;
    Ok(Reconstruction {
        table,
        field,
        wavenumbers,
        failures,
    })
}

/// Quadratic-nonlinearity reconstruction at one wavenumber, keeping
/// `κ ≤ 3k`.
pub fn reconstruct_alg1(setup: &Setup<'_>, k: f64, freq: &FrequencyGrid, noise: NoiseSpec) -> Result<Reconstruction> {
    let op = HelmholtzOperator::new(setup.fine, setup.mask, k)?;
    let (table, failures) = build_table(setup, &op, Algorithm::Alg1, Scheme::Quadratic, 2, freq, noise, 0)?;
    finish(setup, table, vec![k], failures)
}

/// Annulus reconstruction at one wavenumber, keeping
/// `κ ∈ [(m-1)k, (m+1)k)`.
pub fn reconstruct_alg2(
    setup: &Setup<'_>,
    k: f64,
    m: u32,
    freq: &FrequencyGrid,
    noise: NoiseSpec,
) -> Result<Reconstruction> {
    let op = HelmholtzOperator::new(setup.fine, setup.mask, k)?;
    let (table, failures) = build_table(setup, &op, Algorithm::Alg2, Scheme::Annulus, m, freq, noise, 0)?;
    finish(setup, table, vec![k], failures)
}

/// Sum of annulus reconstructions over a geometric wavenumber schedule;
/// `freqs[j]` is the frequency grid used at `k_j`.
pub fn reconstruct_multik(
    setup: &Setup<'_>,
    schedule: &WavenumberSchedule,
    freqs: &[FrequencyGrid],
    noise: NoiseSpec,
) -> Result<Reconstruction> {
    let ks = schedule.wavenumbers();
    if freqs.len() != ks.len() {
        return Err(Error::invalid("one frequency grid per wavenumber"));
    }
    let m = schedule.m();
    let mut table = FourierTable::new();
    let mut failures = Vec::new();
    let mut field: Option<ComplexField> = None;
    for (j, (&k, freq)) in ks.iter().zip(freqs).enumerate() {
        let op = HelmholtzOperator::new(setup.fine, setup.mask, k)?;
        let offset = (j as u64) << 32;
        let (part, fails) = build_table(setup, &op, Algorithm::Multik, Scheme::Annulus, m, freq, noise, offset)?;
        let base = table.records.len();
        failures.extend(fails.into_iter().map(|(r, e)| (base + r, e)));
        if part.retained_count() > 0 {
            let partial = synthesize(&part, setup.coarse)?;
            field = Some(match field {
                None => partial,
                Some(acc) => acc.add(&partial)?,
            });
        }
        table.extend(part);
    }
    let field = field.ok_or(Error::EmptyTable)?;
    Ok(Reconstruction {
        table,
        field,
        wavenumbers: ks.to_vec(),
        failures,
    })
}

/// Reconstruction from mixed-difference Fréchet data (`m = 2, 3`), keeping
/// `κ ≤ (m+1)k`.
pub fn reconstruct_frechet(
    setup: &Setup<'_>,
    k: f64,
    m: u32,
    eps: f64,
    freq: &FrequencyGrid,
    noise: NoiseSpec,
) -> Result<Reconstruction> {
    if m != 2 && m != 3 {
        return Err(Error::UnsupportedM(m));
    }
    let op = HelmholtzOperator::new(setup.fine, setup.mask, k)?;
    let (table, failures) = build_table(
        setup,
        &op,
        Algorithm::Frechet,
        Scheme::Frechet { eps },
        m,
        freq,
        noise,
        0,
    )?;
    finish(setup, table, vec![k], failures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn frequency_grid_layout() {
        let f = FrequencyGrid::new(1.0, 3.0, 3, 4).unwrap();
        assert_eq!(f.lengths(), &[1.0, 2.0, 3.0]);
        let expect = [PI / 2.0, PI, 1.5 * PI, 2.0 * PI];
        for (a, b) in f.angles().iter().zip(expect) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        for p in f.points() {
            let d = p.y_hat[0] * p.z_hat[0] + p.y_hat[1] * p.z_hat[1];
            assert!(d.abs() < 1e-12);
            assert_relative_eq!(p.y_hat[0].hypot(p.y_hat[1]), 1.0, epsilon = 1e-15);
        }
        assert_eq!(f.points().count(), 12);
    }

    #[test]
    fn frequency_grid_bounds() {
        assert!(FrequencyGrid::new(1.0, 2.9, 3, 4).is_err());
        assert!(FrequencyGrid::new(1.0, 3.0, 0, 4).is_err());
        assert!(FrequencyGrid::new(1.0, 3.0, 3, 3).is_err());
        assert!(FrequencyGrid::new(0.0, 3.0, 3, 4).is_err());
    }

    #[test]
    fn sigma_sums_to_disk_measure() {
        let f = FrequencyGrid::new(1.0, 3.0, 200, 128).unwrap();
        let total: f64 = f.points().map(|p| p.sigma).sum();
        let exact = PI * 9.0 / (4.0 * PI * PI);
        assert!((total / exact - 1.0).abs() < 0.01, "{total} vs {exact}");
    }

    #[test]
    fn schedule_for_cubic_case() {
        let s = WavenumberSchedule::geometric(1.25, 10.0, 3).unwrap();
        assert_eq!(s.wavenumbers(), &[1.25, 2.5, 5.0, 10.0]);
        let annuli = s.annuli();
        assert_eq!(annuli.first().unwrap().0, 2.5);
        assert_eq!(annuli.last().unwrap().1, 40.0);
        for w in annuli.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
        assert!(WavenumberSchedule::from_values(vec![1.0, 2.5], 3).is_err());
        assert!(WavenumberSchedule::from_values(vec![1.0, 3.0, 9.0], 2).is_ok());
    }

    #[test]
    fn annulus_retention_is_half_open() {
        let a = Algorithm::Multik;
        assert!(a.retains(3, 1.25, 2.5));
        assert!(!a.retains(3, 1.25, 5.0));
        assert!(a.retains(3, 2.5, 5.0));
        assert!(Algorithm::Alg1.retains(2, 5.0, 15.0));
        assert!(!Algorithm::Alg1.retains(2, 5.0, 15.1));
        assert!(Algorithm::Frechet.retains(3, 10.0, 40.0));
    }

    fn one_record(xi: [f64; 2], estimate: Complex64, sigma: f64) -> FourierRecord {
        FourierRecord {
            i: 1,
            s: 1,
            kappa: xi[0].hypot(xi[1]),
            theta: 0.0,
            xi,
            estimate: Some(estimate),
            sigma,
            retained: true,
            algorithm: Algorithm::Alg1,
            k: 10.0,
        }
    }

    #[test]
    fn synthesize_single_term() {
        let g = Grid::new(21, 0.5).unwrap();
        let xi = [0.5, 0.0];
        let table = FourierTable {
            records: vec![one_record(xi, Complex64::new(1.0, 0.0), 0.3)],
        };
        let f = synthesize(&table, &g).unwrap();
        for (idx, x) in g.nodes() {
            assert!((f.values()[idx].re - 0.3 * (xi[0] * x[0]).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn synthesize_zero_and_empty() {
        let g = Grid::new(11, 0.5).unwrap();
        let table = FourierTable {
            records: vec![one_record([1.0, 2.0], Complex64::new(0.0, 0.0), 0.1)],
        };
        assert_eq!(synthesize(&table, &g).unwrap().max_abs(), 0.0);
        assert!(matches!(synthesize(&FourierTable::new(), &g), Err(Error::EmptyTable)));
    }

    #[test]
    fn synthesis_is_linear_in_the_table() {
        let g = Grid::new(31, 0.5).unwrap();
        let a = FourierTable {
            records: (0..20)
                .map(|j| one_record([j as f64, 1.0 - j as f64], Complex64::new(j as f64, 1.0), 0.01))
                .collect(),
        };
        let b = FourierTable {
            records: (0..15)
                .map(|j| one_record([-(j as f64), 2.0], Complex64::new(0.5, -(j as f64)), 0.02))
                .collect(),
        };
        let mut both = a.clone();
        both.extend(b.clone());
        let sum = synthesize(&a, &g).unwrap().add(&synthesize(&b, &g).unwrap()).unwrap();
        let joint = synthesize(&both, &g).unwrap();
        assert!(joint.max_abs_diff(&sum).unwrap() < 1e-12);
    }
}
