//! Five-point finite-difference solvers for
//!
//! ```text
//! Δu + k²u = f          (linear Helmholtz)
//! Δu + k²u - c uᵐ = 0   (nonlinear Schrödinger)
//! ```
//!
//! on the nodes of a [`DomainMask`], with Dirichlet values taken from every
//! exterior node. The operator depends only on `(grid, mask, k)`, so it is
//! factored once by [`HelmholtzOperator::new`] and reused for every right-hand
//! side, including all Picard iterates.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dtn::{BoundaryTrace, TraceKind};
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::{BoundaryGeometry, DomainMask, Grid};

const NO_UNKNOWN: usize = usize::MAX;

/// Relative distance below which `k²` counts as a discrete eigenvalue.
const RESONANCE_GAP: f64 = 1e-6;
const PROBE_SEED: u64 = 0x9e37_79b9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// Last successive-iterate max difference divided by `1 + max|u|`.
    pub residual: f64,
    pub converged: bool,
}

/// Solution of the nonlinear problem written as `u = linear + correction`,
/// where `linear` solves the Helmholtz problem with the same Dirichlet data
/// and `correction` vanishes on every exterior node.
#[derive(Debug, Clone)]
pub struct SplitSolution {
    pub linear: ComplexField,
    pub correction: ComplexField,
    pub report: SolveReport,
}

impl SplitSolution {
    pub fn total(&self) -> ComplexField {
        self.linear
            .add(&self.correction)
            .expect("both parts share the operator grid")
    }
}

/// Factored `Δ_h + k²` on the interior nodes of a mask.
pub struct HelmholtzOperator {
    grid: Grid,
    k: f64,
    interior: Vec<bool>,
    /// node index of every unknown
    nodes: Vec<usize>,
    /// unknown index of every node, `NO_UNKNOWN` outside
    unknown_of: Vec<usize>,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
}

impl std::fmt::Debug for HelmholtzOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HelmholtzOperator")
            .field("grid", &self.grid)
            .field("k", &self.k)
            .field("unknowns", &self.nodes.len())
            .finish()
    }
}

impl HelmholtzOperator {
    pub fn new(grid: &Grid, mask: &DomainMask, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid(format!("wavenumber must be positive, got {k}")));
        }
        if mask.flags().len() != grid.len() {
            return Err(Error::GridMismatch("mask and grid sizes differ".into()));
        }
        let n = grid.n_per_axis();
        let mut unknown_of = vec![NO_UNKNOWN; grid.len()];
        let mut nodes = Vec::new();
        for q in 0..n {
            for p in 0..n {
                let idx = grid.index(p, q);
                if mask.is_interior(idx) {
                    // the outer ring of the raster always supplies Dirichlet data
                    if p == 0 || q == 0 || p == n - 1 || q == n - 1 {
                        return Err(Error::invalid("mask touches the edge of the raster"));
                    }
                    unknown_of[idx] = nodes.len();
                    nodes.push(idx);
                }
            }
        }
        if nodes.is_empty() {
            return Err(Error::invalid("mask has no interior nodes"));
        }

        // equations scaled by h²: Σ neighbours - (4 - (kh)²) u = h² f
        let h = grid.spacing();
        let diag = -4.0 + (k * h) * (k * h);
        let mut triplets = Vec::with_capacity(5 * nodes.len());
        for (row, &idx) in nodes.iter().enumerate() {
            triplets.push(Triplet::new(row, row, diag));
            for nb in neighbours(idx, n) {
                let col = unknown_of[nb];
                if col != NO_UNKNOWN {
                    triplets.push(Triplet::new(row, col, 1.0));
                }
            }
        }
        let dim = nodes.len();
        let matrix = SparseColMat::<usize, f64>::try_new_from_triplets(dim, dim, &triplets)
            .map_err(|e| Error::invalid(format!("operator assembly failed: {e:?}")))?;
        let lu = matrix.sp_lu().map_err(|e| Error::NearResonance {
            k,
            detail: format!("factorization failed: {e:?}"),
        })?;

        let op = Self {
            grid: *grid,
            k,
            interior: mask.flags().to_vec(),
            nodes,
            unknown_of,
            lu,
        };
        op.check_conditioning()?;
        Ok(op)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn unknowns(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        self.interior[idx]
    }

    /// Solves against a fixed pseudo-random right-hand side and converts the
    /// amplification into a lower estimate of the distance from `k²` to the
    /// discrete spectrum.
    fn check_conditioning(&self) -> Result<()> {
        let dim = self.nodes.len();
        let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
        let mut rhs = Mat::<f64>::from_fn(dim, 1, |_, _| rng.random_range(-0.5..0.5));
        let b_norm = (0..dim).map(|i| rhs[(i, 0)].abs()).fold(0.0, f64::max);
        self.lu.solve_in_place(rhs.as_mut());
        let x_norm = (0..dim).map(|i| rhs[(i, 0)].abs()).fold(0.0, f64::max);
        if !x_norm.is_finite() {
            return Err(Error::NearResonance {
                k: self.k,
                detail: "solution of the conditioning probe is not finite".into(),
            });
        }
        let h = self.grid.spacing();
        // the factored matrix is h²(Δ_h + k²), so ‖(Δ_h + k²)⁻¹‖ ≥ h²‖x‖/‖b‖
        let gap = b_norm / (h * h * x_norm.max(f64::MIN_POSITIVE));
        let scale = (self.k * self.k).max(1.0);
        if gap < RESONANCE_GAP * scale {
            return Err(Error::NearResonance {
                k: self.k,
                detail: format!("estimated spectral gap {gap:.3e}"),
            });
        }
        Ok(())
    }

    /// Solves `Δ_h u + k² u = source` for several problems at once. Each
    /// problem keeps its own exterior Dirichlet values.
    pub fn solve_many(&self, problems: &[(&ComplexField, &ComplexField)]) -> Result<Vec<ComplexField>> {
        for (g, f) in problems {
            if g.grid() != &self.grid || f.grid() != &self.grid {
                return Err(Error::GridMismatch("field grid differs from operator grid".into()));
            }
            if !g.is_finite() {
                return Err(Error::NonFinite("dirichlet data"));
            }
            if !f.is_finite() {
                return Err(Error::NonFinite("source"));
            }
        }
        let dim = self.nodes.len();
        let n = self.grid.n_per_axis();
        let h2 = self.grid.spacing().powi(2);
        let mut rhs = Mat::<f64>::zeros(dim, 2 * problems.len());
        for (j, (g, f)) in problems.iter().enumerate() {
            let gv = g.values();
            let fv = f.values();
            for (row, &idx) in self.nodes.iter().enumerate() {
                let mut b = fv[idx] * h2;
                for nb in neighbours(idx, n) {
                    if self.unknown_of[nb] == NO_UNKNOWN {
                        b -= gv[nb];
                    }
                }
                rhs[(row, 2 * j)] = b.re;
                rhs[(row, 2 * j + 1)] = b.im;
            }
        }
        self.lu.solve_in_place(rhs.as_mut());

        let mut out = Vec::with_capacity(problems.len());
        for (j, (g, _)) in problems.iter().enumerate() {
            let mut values = g.values().to_vec();
            for (row, &idx) in self.nodes.iter().enumerate() {
                values[idx] = Complex64::new(rhs[(row, 2 * j)], rhs[(row, 2 * j + 1)]);
            }
            let field = ComplexField::from_values(self.grid, values)?;
            if !field.is_finite() {
                return Err(Error::NearResonance {
                    k: self.k,
                    detail: "linear solve produced non-finite values".into(),
                });
            }
            out.push(field);
        }
        Ok(out)
    }

    pub fn solve(&self, dirichlet: &ComplexField, source: &ComplexField) -> Result<ComplexField> {
        Ok(self
            .solve_many(&[(dirichlet, source)])?
            .pop()
            .expect("one problem in, one out"))
    }

    /// Zero-Dirichlet solves for sources given on the unknowns only; the
    /// returned vectors are indexed like the unknowns as well.
    fn solve_interior(&self, sources: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let dim = self.nodes.len();
        let h2 = self.grid.spacing().powi(2);
        let mut rhs = Mat::<f64>::zeros(dim, 2 * sources.len());
        for (j, s) in sources.iter().enumerate() {
            for (row, z) in s.iter().enumerate() {
                rhs[(row, 2 * j)] = z.re * h2;
                rhs[(row, 2 * j + 1)] = z.im * h2;
            }
        }
        self.lu.solve_in_place(rhs.as_mut());
        (0..sources.len())
            .map(|j| {
                (0..dim)
                    .map(|row| Complex64::new(rhs[(row, 2 * j)], rhs[(row, 2 * j + 1)]))
                    .collect()
            })
            .collect()
    }

    /// Picard iteration `u⁽ˡ⁺¹⁾ = solve(g, c (u⁽ˡ⁾)ᵐ)` from `u⁽⁰⁾ = solve(g, 0)`,
    /// run in lockstep for every Dirichlet datum.
    ///
    /// The iteration is carried on the correction `u - u⁽⁰⁾`, which has zero
    /// Dirichlet data, so each step is a single batched back-substitution.
    pub fn solve_nonlinear_many(
        &self,
        m: u32,
        c: &ComplexField,
        dirichlets: &[&ComplexField],
        opts: PicardOptions,
    ) -> Result<Vec<Result<(ComplexField, SolveReport)>>> {
        Ok(self
            .solve_nonlinear_split(m, c, dirichlets, opts)?
            .into_iter()
            .map(|r| r.map(|s| (s.total(), s.report)))
            .collect())
    }

    /// Like [`Self::solve_nonlinear_many`] but keeps the linear part and the
    /// nonlinear correction apart.
    pub fn solve_nonlinear_split(
        &self,
        m: u32,
        c: &ComplexField,
        dirichlets: &[&ComplexField],
        opts: PicardOptions,
    ) -> Result<Vec<Result<SplitSolution>>> {
        if m < 2 {
            return Err(Error::invalid(format!("nonlinearity index must be >= 2, got {m}")));
        }
        if c.grid() != &self.grid {
            return Err(Error::GridMismatch("potential grid differs from operator grid".into()));
        }
        if !c.is_finite() {
            return Err(Error::NonFinite("potential"));
        }
        let zero = ComplexField::zeros(self.grid);
        let problems: Vec<_> = dirichlets.iter().map(|g| (*g, &zero)).collect();
        let base = self.solve_many(&problems)?;

        // unknowns where c does not vanish
        let support: Vec<(usize, Complex64)> = self
            .nodes
            .iter()
            .enumerate()
            .filter_map(|(row, &idx)| {
                let cv = c.values()[idx];
                (cv != Complex64::new(0.0, 0.0)).then_some((row, cv))
            })
            .collect();

        let count = base.len();
        if support.is_empty() {
            let report = SolveReport {
                iterations: 1,
                residual: 0.0,
                converged: true,
            };
            return Ok(base
                .into_iter()
                .map(|u| {
                    Ok(SplitSolution {
                        linear: u,
                        correction: zero.clone(),
                        report,
                    })
                })
                .collect());
        }

        let base_int: Vec<Vec<Complex64>> = base
            .iter()
            .map(|u| self.nodes.iter().map(|&idx| u.values()[idx]).collect())
            .collect();
        let base_max: Vec<f64> = base.iter().map(ComplexField::max_abs).collect();
        let dim = self.nodes.len();
        let mut corr = vec![vec![Complex64::new(0.0, 0.0); dim]; count];
        let mut status: Vec<Option<Result<SolveReport>>> = (0..count).map(|_| None).collect();
        let mut iterations = 0;

        while status.iter().any(Option::is_none) {
            iterations += 1;
            let active: Vec<usize> = (0..count).filter(|&j| status[j].is_none()).collect();
            let sources: Vec<Vec<Complex64>> = active
                .iter()
                .map(|&j| {
                    let mut s = vec![Complex64::new(0.0, 0.0); dim];
                    for &(row, cv) in &support {
                        let u = base_int[j][row] + corr[j][row];
                        s[row] = cv * u.powu(m);
                    }
                    s
                })
                .collect();
            let next = self.solve_interior(&sources);
            for (&j, new) in active.iter().zip(next) {
                let mut diff = 0.0f64;
                let mut umax = base_max[j];
                let mut finite = true;
                for row in 0..dim {
                    finite &= new[row].re.is_finite() && new[row].im.is_finite();
                    diff = diff.max((new[row] - corr[j][row]).norm());
                    umax = umax.max((base_int[j][row] + corr[j][row]).norm());
                }
                // f64::max drops NaN, so overflow has to be caught explicitly
                let rel = if finite { diff / (1.0 + umax) } else { f64::INFINITY };
                corr[j] = new;
                if !rel.is_finite() || rel > 1e100 {
                    status[j] = Some(Err(Error::NoConvergence {
                        iterations,
                        residual: rel,
                    }));
                } else if rel <= opts.tol {
                    status[j] = Some(Ok(SolveReport {
                        iterations,
                        residual: rel,
                        converged: true,
                    }));
                } else if iterations >= opts.max_iter {
                    status[j] = Some(Err(Error::NoConvergence {
                        iterations,
                        residual: rel,
                    }));
                }
            }
        }

        Ok(base
            .into_iter()
            .zip(corr)
            .zip(status)
            .map(|((linear, d), st)| {
                let report = st.expect("loop exits once every problem is settled")?;
                let mut correction = zero.clone();
                let values = correction.values_mut();
                for (row, &idx) in self.nodes.iter().enumerate() {
                    values[idx] = d[row];
                }
                Ok(SplitSolution {
                    linear,
                    correction,
                    report,
                })
            })
            .collect())
    }

    pub fn solve_nonlinear(
        &self,
        m: u32,
        c: &ComplexField,
        dirichlet: &ComplexField,
        opts: PicardOptions,
    ) -> Result<(ComplexField, SolveReport)> {
        self.solve_nonlinear_many(m, c, &[dirichlet], opts)?
            .pop()
            .expect("one problem in, one out")
    }

    /// Max over interior nodes of `|Δ_h u + k² u - f|`, where `f` is given per
    /// node as a function of the node index and the local value of `u`.
    pub fn residual_max(&self, u: &ComplexField, mut source: impl FnMut(usize, Complex64) -> Complex64) -> f64 {
        let n = self.grid.n_per_axis();
        let inv_h2 = 1.0 / self.grid.spacing().powi(2);
        let v = u.values();
        self.nodes
            .iter()
            .map(|&idx| {
                let lap = neighbours(idx, n).iter().map(|&nb| v[nb]).sum::<Complex64>() - 4.0 * v[idx];
                (lap * inv_h2 + self.k * self.k * v[idx] - source(idx, v[idx])).norm()
            })
            .fold(0.0, f64::max)
    }
}

#[inline]
fn neighbours(idx: usize, n: usize) -> [usize; 4] {
    [idx + 1, idx - 1, idx + n, idx - n]
}

/// One-shot linear solve; builds and factors the operator.
pub fn solve_helmholtz(
    grid: &Grid,
    mask: &DomainMask,
    k: f64,
    dirichlet: &ComplexField,
    source: &ComplexField,
) -> Result<ComplexField> {
    HelmholtzOperator::new(grid, mask, k)?.solve(dirichlet, source)
}

/// One-shot nonlinear solve; builds and factors the operator.
#[allow(clippy::too_many_arguments)]
pub fn solve_nonlinear(
    grid: &Grid,
    mask: &DomainMask,
    k: f64,
    m: u32,
    c: &ComplexField,
    dirichlet: &ComplexField,
    tol: f64,
    max_iter: usize,
) -> Result<(ComplexField, SolveReport)> {
    HelmholtzOperator::new(grid, mask, k)?.solve_nonlinear(m, c, dirichlet, PicardOptions { tol, max_iter })
}

/// `∂_ν u` on the boundary samples by the one-sided second-order difference
/// `(3u(b) - 4u(b - hν) + u(b - 2hν)) / 2h`, with off-node values taken from
/// tensor-product cubic interpolation.
pub fn neumann_trace(field: &ComplexField, boundary: &BoundaryGeometry) -> Result<BoundaryTrace> {
    if !field.is_finite() {
        return Err(Error::NonFinite("field"));
    }
    let h = field.grid().spacing();
    let mut values = Vec::with_capacity(boundary.n_samples());
    for (b, nu) in boundary.points().iter().zip(boundary.normals()) {
        let at = |s: f64| {
            let x = [b[0] - s * h * nu[0], b[1] - s * h * nu[1]];
            field
                .interpolate_cubic(x)
                .ok_or(Error::StencilOutsideGrid { x: x[0], y: x[1] })
        };
        let (u0, u1, u2) = (at(0.0)?, at(1.0)?, at(2.0)?);
        values.push((3.0 * u0 - 4.0 * u1 + u2) / (2.0 * h));
    }
    Ok(BoundaryTrace::new(TraceKind::Neumann, values))
}
