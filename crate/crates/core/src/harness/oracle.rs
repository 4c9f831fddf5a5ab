//! Direct quadrature of `∫ c(x) e^{iξ·x} dx` on the grid carrying `c`.

use num_complex::Complex64;

use crate::field::ComplexField;

/// Trapezoid rule on the full raster; `c` vanishes on the raster edge, so
/// this is the plain nodal sum times `h²`.
pub fn volume_oracle(c: &ComplexField, xi: [f64; 2]) -> Complex64 {
    VolumeOracle::new(c).eval(xi)
}

/// Reusable evaluator that skips the zero nodes of `c`.
#[derive(Debug, Clone)]
pub struct VolumeOracle {
    support: Vec<([f64; 2], Complex64)>,
    h2: f64,
}

impl VolumeOracle {
    pub fn new(c: &ComplexField) -> Self {
        let grid = c.grid();
        let support = grid
            .nodes()
            .filter_map(|(i, x)| {
                let v = c.values()[i];
                (v != Complex64::new(0.0, 0.0)).then_some((x, v))
            })
            .collect();
        Self {
            support,
            h2: grid.spacing().powi(2),
        }
    }

    pub fn eval(&self, xi: [f64; 2]) -> Complex64 {
        let sum: Complex64 = self
            .support
            .iter()
            .map(|(x, v)| v * Complex64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1]))
            .sum();
        sum * self.h2
    }
}
