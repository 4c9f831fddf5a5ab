use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::DomainMask;
use crate::reconstruct::FourierTable;

use super::oracle::VolumeOracle;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub max_abs_error: f64,
    pub rel_l2_error: f64,
    /// Largest `|𝓕̂(ξ) - oracle(ξ)|` over the retained samples.
    pub max_frequency_residual: f64,
}

/// `|𝓕̂(ξ) - oracle(ξ)|` for one retained sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyResidual {
    pub kappa: f64,
    pub theta: f64,
    pub k: f64,
    pub estimate: num_complex::Complex64,
    pub oracle: num_complex::Complex64,
}

impl FrequencyResidual {
    pub fn abs(&self) -> f64 {
        (self.estimate - self.oracle).norm()
    }
}

/// Pointwise errors of the real part of `c_rec` against `c_true` on the
/// interior nodes of `mask`.
pub fn field_errors(c_rec: &ComplexField, c_true: &[f64], mask: &DomainMask) -> Result<(f64, f64)> {
    let n = c_rec.values().len();
    if c_true.len() != n || mask.flags().len() != n {
        return Err(Error::GridMismatch(
            "reconstruction, truth and mask differ in size".into(),
        ));
    }
    let mut max_abs = 0.0f64;
    let mut err2 = 0.0;
    let mut ref2 = 0.0;
    for ((z, &t), &inside) in c_rec.values().iter().zip(c_true).zip(mask.flags()) {
        if !inside {
            continue;
        }
        let e = (z.re - t).abs();
        max_abs = max_abs.max(e);
        err2 += e * e;
        ref2 += t * t;
    }
    let rel = if ref2 > 0.0 { (err2 / ref2).sqrt() } else { err2.sqrt() };
    Ok((max_abs, rel))
}

pub fn frequency_residuals(table: &FourierTable, oracle: &VolumeOracle) -> Vec<FrequencyResidual> {
    table
        .retained()
        .filter_map(|r| {
            r.estimate.map(|estimate| FrequencyResidual {
                kappa: r.kappa,
                theta: r.theta,
                k: r.k,
                estimate,
                oracle: oracle.eval(r.xi),
            })
        })
        .collect()
}

pub fn compute_metrics(
    c_rec: &ComplexField,
    c_true: &[f64],
    mask: &DomainMask,
    residuals: &[FrequencyResidual],
) -> Result<Metrics> {
    let (max_abs_error, rel_l2_error) = field_errors(c_rec, c_true, mask)?;
    Ok(Metrics {
        max_abs_error,
        rel_l2_error,
        max_frequency_residual: residuals.iter().map(FrequencyResidual::abs).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn errors_ignore_exterior_nodes() {
        let g = Grid::new(21, 0.5).unwrap();
        let mask = DomainMask::disk(&g, 0.5).unwrap();
        let truth: Vec<f64> = g.nodes().map(|(_, x)| 1.0 - x[0] * x[0]).collect();
        let mut rec = ComplexField::from_real_fn(g, |x| 1.0 - x[0] * x[0]);
        for (i, v) in rec.values_mut().iter_mut().enumerate() {
            if !mask.is_interior(i) {
                *v += 100.0;
            }
        }
        let (max_abs, rel) = field_errors(&rec, &truth, &mask).unwrap();
        assert_eq!(max_abs, 0.0);
        assert_eq!(rel, 0.0);
    }

    #[test]
    fn relative_error_of_scaled_field() {
        let g = Grid::new(31, 0.5).unwrap();
        let mask = DomainMask::disk(&g, 0.5).unwrap();
        let truth: Vec<f64> = g.nodes().map(|(_, x)| x[0] + 2.0).collect();
        let rec = ComplexField::from_real_fn(g, |x| 1.1 * (x[0] + 2.0));
        let (_, rel) = field_errors(&rec, &truth, &mask).unwrap();
        assert!((rel - 0.1).abs() < 1e-12);
    }
}
