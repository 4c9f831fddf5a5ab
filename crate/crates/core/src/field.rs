use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Complex samples, one per node of a [`Grid`], stored row-major from node
/// `(0, 0)` (index `q * n + p`).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_values(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 2]) -> Complex64) -> Self {
        let values = grid.nodes().map(|(_, x)| f(x)).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid, mut f: impl FnMut([f64; 2]) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, p: usize, q: usize) -> Complex64 {
        self.values[self.grid.index(p, q)]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }

    /// Bilinear interpolation at an arbitrary point of the grid square.
    pub fn interpolate(&self, x: [f64; 2]) -> Option<Complex64> {
        let ((p, q), (tx, ty)) = self.grid.locate(x)?;
        let v00 = self.at(p, q);
        let v10 = self.at(p + 1, q);
        let v01 = self.at(p, q + 1);
        let v11 = self.at(p + 1, q + 1);
        Some(v00 * ((1.0 - tx) * (1.0 - ty)) + v10 * (tx * (1.0 - ty)) + v01 * ((1.0 - tx) * ty) + v11 * (tx * ty))
    }

    /// Tensor-product cubic Lagrange interpolation on the 4 × 4 nodes around
    /// `x` (shifted inward next to the raster edge). Exact on bicubics.
    pub fn interpolate_cubic(&self, x: [f64; 2]) -> Option<Complex64> {
        let n = self.grid.n_per_axis();
        if n < 4 {
            return self.interpolate(x);
        }
        let ((p, q), (tx, ty)) = self.grid.locate(x)?;
        let (px, wx) = cubic_window(p, tx, n);
        let (py, wy) = cubic_window(q, ty, n);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, wyj) in wy.iter().enumerate() {
            let mut row = Complex64::new(0.0, 0.0);
            for (i, wxi) in wx.iter().enumerate() {
                row += self.at(px + i, py + j) * *wxi;
            }
            acc += row * *wyj;
        }
        Some(acc)
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|z| z * s).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// First node of the 4-point window and the Lagrange weights for local
/// coordinate `t` in cell `c`.
fn cubic_window(c: usize, t: f64, n: usize) -> (usize, [f64; 4]) {
    let start = c.saturating_sub(1).min(n - 4);
    // position of the point in window coordinates (nodes at 0, 1, 2, 3)
    let s = (c - start) as f64 + t;
    let mut w = [0.0; 4];
    for (i, wi) in w.iter_mut().enumerate() {
        let mut v = 1.0;
        for j in 0..4 {
            if j != i {
                v *= (s - j as f64) / (i as f64 - j as f64);
            }
        }
        *wi = v;
    }
    (start, w)
}
