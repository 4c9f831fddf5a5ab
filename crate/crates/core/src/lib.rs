//! Finite-difference lab for the nonlinear Helmholtz equation
//! `Δu + k²u - c(x) uᵐ = 0` on a disk and for Fourier-domain recovery of
//! the potential `c` from linearized or differentiated boundary data.
//!
//! The pipeline runs [`forward`] solves on a fine raster, turns them into
//! boundary traces with [`dtn`], probes them with the complex plane waves of
//! [`probes`] and synthesizes the potential with [`reconstruct`]. The
//! [`harness`] wires this into reproducible experiments.

pub mod dtn;
pub mod error;
pub mod field;
pub mod forward;
pub mod grid;
pub mod harness;
pub mod probes;
pub mod reconstruct;

pub use dtn::{add_noise, BoundaryTrace, DtnMap, NoiseSpec, TraceKind};
pub use error::{Error, Result};
pub use field::ComplexField;
pub use forward::{
    neumann_trace, solve_helmholtz, solve_nonlinear, HelmholtzOperator, PicardOptions, SolveReport, SplitSolution,
};
pub use grid::{resample_to, BoundaryGeometry, DomainMask, Grid};
pub use num_complex::Complex64;
pub use probes::{
    even_probe, frechet_probe, mu_probe, odd_probe, plane_wave, quadratic_probe, ComplexVector2, PlaneWaveSum, Probe,
    ProbeKind, ProbeRole, ProbeSet, Regime,
};
pub use reconstruct::{
    fourier_sample_alg1, fourier_sample_alg2, fourier_sample_frechet, fourier_samples, reconstruct_alg1,
    reconstruct_alg2, reconstruct_frechet, reconstruct_multik, synthesize, Algorithm, FourierRecord, FourierTable,
    FrequencyGrid, FrequencyPoint, Reconstruction, Scheme, Setup, WavenumberSchedule,
};
