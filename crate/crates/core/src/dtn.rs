//! Boundary measurements: the nonlinear DtN map `Λ_c`, the linearized data
//! `∂_ν u - ∂_ν u₀`, mixed finite differences approximating the Fréchet
//! derivatives `D²₀Λ_c`, `D³₀Λ_c`, and bounded measurement noise.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::forward::{neumann_trace, HelmholtzOperator, PicardOptions};
use crate::grid::BoundaryGeometry;
use crate::probes::PlaneWaveSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Dirichlet,
    Neumann,
}

/// Complex samples aligned with the points of a [`BoundaryGeometry`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    kind: TraceKind,
    values: Vec<Complex64>,
}

impl BoundaryTrace {
    pub fn new(kind: TraceKind, values: Vec<Complex64>) -> Self {
        Self { kind, values }
    }

    pub fn zeros(kind: TraceKind, n: usize) -> Self {
        Self::new(kind, vec![Complex64::new(0.0, 0.0); n])
    }

    /// Restriction of an analytic datum to the boundary samples.
    pub fn dirichlet(datum: &PlaneWaveSum, boundary: &BoundaryGeometry) -> Self {
        Self::new(TraceKind::Dirichlet, datum.eval_points(boundary.points()))
    }

    pub fn kind(&self) -> TraceKind {
        self.kind
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `Σ sign_j t_j`, accumulated in the given order.
    pub fn signed_sum(kind: TraceKind, parts: &[(f64, &BoundaryTrace)]) -> Self {
        let n = parts.first().map_or(0, |(_, t)| t.len());
        let mut values = vec![Complex64::new(0.0, 0.0); n];
        for (sign, t) in parts {
            debug_assert_eq!(t.len(), n);
            for (acc, v) in values.iter_mut().zip(&t.values) {
                *acc += v * *sign;
            }
        }
        Self::new(kind, values)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.kind, self.values.iter().map(|z| z * s).collect())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Relative sup-norm noise level `δ` and the generator seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub delta: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub const NONE: NoiseSpec = NoiseSpec { delta: 0.0, seed: 0 };

    pub fn new(delta: f64, seed: u64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::invalid(format!("noise level must be >= 0, got {delta}")));
        }
        Ok(Self { delta, seed })
    }

    pub fn is_zero(&self) -> bool {
        self.delta == 0.0
    }

    /// An independent stream for one measured trace, keyed by `stream`.
    pub fn derive(&self, stream: u64) -> Self {
        Self {
            delta: self.delta,
            seed: splitmix64(self.seed ^ splitmix64(stream)),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Adds independent noise, uniform on the complex disk of radius
/// `δ·‖t‖_∞`, to every sample.
pub fn add_noise(trace: &BoundaryTrace, spec: NoiseSpec) -> BoundaryTrace {
    if spec.is_zero() {
        return trace.clone();
    }
    let radius = spec.delta * trace.sup_norm();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let values = trace
        .values
        .iter()
        .map(|v| {
            let r = radius * rng.random::<f64>().sqrt();
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            v + Complex64::from_polar(r, theta)
        })
        .collect();
    BoundaryTrace::new(trace.kind, values)
}

/// `Λ_c` at a fixed `(k, m, c)`, sharing one factored operator across every
/// evaluation.
#[derive(Debug, Clone, Copy)]
pub struct DtnMap<'a> {
    pub op: &'a HelmholtzOperator,
    pub boundary: &'a BoundaryGeometry,
    pub m: u32,
    pub c: &'a ComplexField,
    pub picard: PicardOptions,
}

impl<'a> DtnMap<'a> {
    pub fn new(op: &'a HelmholtzOperator, boundary: &'a BoundaryGeometry, m: u32, c: &'a ComplexField) -> Self {
        Self {
            op,
            boundary,
            m,
            c,
            picard: PicardOptions::default(),
        }
    }

    pub fn k(&self) -> f64 {
        self.op.k()
    }

    /// Dirichlet values on the exterior nodes (interior entries are unused
    /// by the solver and left at zero).
    pub fn dirichlet_field(&self, datum: &PlaneWaveSum) -> ComplexField {
        let grid = *self.op.grid();
        let mut field = ComplexField::zeros(grid);
        let values = field.values_mut();
        for (idx, x) in grid.nodes() {
            if !self.op.is_interior(idx) {
                values[idx] = datum.eval(x);
            }
        }
        field
    }

    /// `Λ_c g` for each datum. Zero data map to the zero trace without a
    /// solve. The outer `Result` carries setup errors, the inner ones
    /// per-datum solver failures.
    pub fn apply_many(&self, data: &[PlaneWaveSum]) -> Result<Vec<Result<BoundaryTrace>>> {
        self.solve_and_trace(data, false)
    }

    pub fn apply(&self, datum: &PlaneWaveSum) -> Result<BoundaryTrace> {
        self.apply_many(std::slice::from_ref(datum))?.pop().expect("one datum")
    }

    /// `(∂_ν u - ∂_ν u₀)|∂Ω`, with `u₀` the Helmholtz solution for the same
    /// datum; approximates `Λ'_c g` for small `c`.
    pub fn linearized_many(&self, data: &[PlaneWaveSum]) -> Result<Vec<Result<BoundaryTrace>>> {
        self.solve_and_trace(data, true)
    }

    pub fn linearized(&self, datum: &PlaneWaveSum) -> Result<BoundaryTrace> {
        self.linearized_many(std::slice::from_ref(datum))?
            .pop()
            .expect("one datum")
    }

    fn solve_and_trace(&self, data: &[PlaneWaveSum], correction_only: bool) -> Result<Vec<Result<BoundaryTrace>>> {
        let n = self.boundary.n_samples();
        let live: Vec<usize> = (0..data.len()).filter(|&i| !data[i].is_zero()).collect();
        let fields: Vec<ComplexField> = live.iter().map(|&i| self.dirichlet_field(&data[i])).collect();
        let refs: Vec<&ComplexField> = fields.iter().collect();
        let solved = if refs.is_empty() {
            Vec::new()
        } else {
            self.op.solve_nonlinear_split(self.m, self.c, &refs, self.picard)?
        };

        let mut out: Vec<Result<BoundaryTrace>> = (0..data.len())
            .map(|_| Ok(BoundaryTrace::zeros(TraceKind::Neumann, n)))
            .collect();
        for (&i, sol) in live.iter().zip(solved) {
            out[i] = sol.and_then(|s| {
                if correction_only {
                    neumann_trace(&s.correction, self.boundary)
                } else {
                    neumann_trace(&s.total(), self.boundary)
                }
            });
        }
        Ok(out)
    }

    /// Mixed finite difference
    /// `Σ_{S ⊆ {1..m}} (-1)^{m-|S|} Λ_c(Σ_{j∈S} εⱼ fⱼ) / Π εⱼ`
    /// for `m = 2, 3`, approximating `D^m₀Λ_c(f₁, …, f_m)`. The empty set
    /// contributes `Λ_c(0) = 0`. Several independent tuples are evaluated in
    /// one batch.
    pub fn frechet_many(&self, tuples: &[(&[PlaneWaveSum], &[f64])]) -> Result<Vec<Result<BoundaryTrace>>> {
        let mut data = Vec::new();
        let mut plan = Vec::with_capacity(tuples.len());
        for (fs, eps) in tuples {
            let m = fs.len();
            if m != 2 && m != 3 {
                return Err(Error::UnsupportedM(m as u32));
            }
            if eps.len() != m {
                return Err(Error::invalid("one step size per boundary function"));
            }
            if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                return Err(Error::invalid("Fréchet step sizes must be positive"));
            }
            let mut signs = Vec::new();
            for subset in 1u32..(1 << m) {
                let mut datum = PlaneWaveSum::zero();
                for j in 0..m {
                    if subset & (1 << j) != 0 {
                        datum = datum.plus(&fs[j].scaled(eps[j]));
                    }
                }
                let parity = (m as u32 - subset.count_ones()) % 2;
                signs.push(if parity == 0 { 1.0 } else { -1.0 });
                data.push(datum);
            }
            let denom: f64 = eps.iter().product();
            plan.push((signs, denom));
        }

        let mut traces = self.apply_many(&data)?.into_iter();
        Ok(plan
            .into_iter()
            .map(|(signs, denom)| {
                let group: Vec<Result<BoundaryTrace>> = traces.by_ref().take(signs.len()).collect();
                let group = group.into_iter().collect::<Result<Vec<_>>>()?;
                let parts: Vec<(f64, &BoundaryTrace)> = signs.iter().map(|s| s / denom).zip(group.iter()).collect();
                Ok(BoundaryTrace::signed_sum(TraceKind::Neumann, &parts))
            })
            .collect())
    }

    /// Second mixed difference approximating `D²₀Λ_c(f₁, f₂)`.
    pub fn frechet_m2(&self, f1: &PlaneWaveSum, f2: &PlaneWaveSum, eps1: f64, eps2: f64) -> Result<BoundaryTrace> {
        let fs = [f1.clone(), f2.clone()];
        self.frechet_many(&[(&fs, &[eps1, eps2])])?.pop().expect("one tuple")
    }

    /// Third mixed difference approximating `D³₀Λ_c(f₁, f₂, f₃)`.
    #[allow(clippy::too_many_arguments)]
    pub fn frechet_m3(
        &self,
        f1: &PlaneWaveSum,
        f2: &PlaneWaveSum,
        f3: &PlaneWaveSum,
        eps1: f64,
        eps2: f64,
        eps3: f64,
    ) -> Result<BoundaryTrace> {
        let fs = [f1.clone(), f2.clone(), f3.clone()];
        self.frechet_many(&[(&fs, &[eps1, eps2, eps3])])?
            .pop()
            .expect("one tuple")
    }
}
