//! Raster of the square `[-a, a]²`, the disk mask inscribed in it, and an
//! analytically sampled boundary circle.
//!
//! The boundary circle is independent of the raster: traces are read off the
//! raster by bilinear interpolation (see [`crate::forward::neumann_trace`]),
//! so the circle can be sampled as densely as the quadrature needs.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;

/// Slack used when deciding whether a point lies inside the grid square.
const EDGE_SLACK: f64 = 1e-12;

/// Equally spaced `n × n` nodes on `[-half_width, half_width]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    half_width: f64,
    h: f64,
}

impl Grid {
    pub fn new(n_per_axis: usize, half_width: f64) -> Result<Self> {
        if n_per_axis < 3 {
            return Err(Error::invalid(format!(
                "grid needs at least 3 nodes per axis, got {n_per_axis}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::invalid(format!("half width must be positive, got {half_width}")));
        }
        Ok(Self {
            n: n_per_axis,
            half_width,
            h: 2.0 * half_width / (n_per_axis - 1) as f64,
        })
    }

    pub fn n_per_axis(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, p: usize, q: usize) -> usize {
        q * self.n + p
    }

    #[inline]
    pub fn coord(&self, p: usize, q: usize) -> [f64; 2] {
        [
            -self.half_width + p as f64 * self.h,
            -self.half_width + q as f64 * self.h,
        ]
    }

    /// Nodes in storage order as `(linear index, coordinates)`.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, [f64; 2])> + '_ {
        (0..self.n).flat_map(move |q| (0..self.n).map(move |p| (self.index(p, q), self.coord(p, q))))
    }

    /// Lower-left cell corner and local coordinates in `[0, 1]²` of `x`.
    pub(crate) fn locate(&self, x: [f64; 2]) -> Option<((usize, usize), (f64, f64))> {
        let mut cell = [0usize; 2];
        let mut frac = [0.0f64; 2];
        for axis in 0..2 {
            let s = (x[axis] + self.half_width) / self.h;
            let top = (self.n - 1) as f64;
            if !(s >= -EDGE_SLACK && s <= top + EDGE_SLACK) {
                return None;
            }
            let s = s.clamp(0.0, top);
            let c = (s.floor() as usize).min(self.n - 2);
            cell[axis] = c;
            frac[axis] = s - c as f64;
        }
        Some(((cell[0], cell[1]), (frac[0], frac[1])))
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        self.locate(x).is_some()
    }
}

/// Interior/exterior flags for the open disk `|x| < radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMask {
    radius: f64,
    interior: Vec<bool>,
}

impl DomainMask {
    pub fn disk(grid: &Grid, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= grid.half_width()) {
            return Err(Error::invalid(format!(
                "disk radius {radius} must lie in (0, {}]",
                grid.half_width()
            )));
        }
        let interior = grid.nodes().map(|(_, [x, y])| x.hypot(y) < radius).collect();
        Ok(Self { radius, interior })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    #[inline]
    pub fn is_interior(&self, index: usize) -> bool {
        self.interior[index]
    }

    pub fn flags(&self) -> &[bool] {
        &self.interior
    }

    pub fn interior_count(&self) -> usize {
        self.interior.iter().filter(|&&b| b).count()
    }
}

/// Equal-angle samples of the circle `|x| = radius` with outward normals and
/// trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGeometry {
    radius: f64,
    points: Vec<[f64; 2]>,
    normals: Vec<[f64; 2]>,
    weight: f64,
}

impl BoundaryGeometry {
    pub fn circle(n_samples: usize, radius: f64) -> Result<Self> {
        if n_samples < 8 {
            return Err(Error::invalid(format!(
                "boundary needs at least 8 samples, got {n_samples}"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid(format!(
                "boundary radius must be positive, got {radius}"
            )));
        }
        let dtheta = 2.0 * PI / n_samples as f64;
        let normals: Vec<[f64; 2]> = (0..n_samples)
            .map(|t| {
                let theta = t as f64 * dtheta;
                [theta.cos(), theta.sin()]
            })
            .collect();
        let points = normals.iter().map(|n| [radius * n[0], radius * n[1]]).collect();
        Ok(Self {
            radius,
            points,
            normals,
            weight: radius * dtheta,
        })
    }

    /// Default density used by the experiments: four samples per grid node
    /// along an axis.
    pub fn for_grid(grid: &Grid, radius: f64) -> Result<Self> {
        Self::circle(4 * grid.n_per_axis(), radius)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn n_samples(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn normals(&self) -> &[[f64; 2]] {
        &self.normals
    }

    /// Arc-length weight of every sample (all equal).
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::repeat_n(self.weight, self.points.len())
    }

    /// Trapezoid rule `Σ_t f_t w_t`.
    pub fn integrate(&self, samples: &[Complex64]) -> Complex64 {
        debug_assert_eq!(samples.len(), self.points.len());
        samples.iter().sum::<Complex64>() * self.weight
    }

    /// `Σ_t a_t b_t w_t`, the unconjugated boundary pairing.
    pub fn pair(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(x, y)| x * y).sum::<Complex64>() * self.weight
    }
}

/// Bilinear resampling of a field on `fine` onto the nodes of `coarse`.
pub fn resample_to(coarse: &Grid, field_on_fine: &ComplexField, fine: &Grid) -> Result<ComplexField> {
    if field_on_fine.grid() != fine {
        return Err(Error::GridMismatch("field does not live on the fine grid".into()));
    }
    let tol = 1e-12 * fine.half_width().max(coarse.half_width());
    if (coarse.half_width() - fine.half_width()).abs() > tol {
        return Err(Error::GridMismatch(format!(
            "half widths differ: coarse {} vs fine {}",
            coarse.half_width(),
            fine.half_width()
        )));
    }
    let mut values = Vec::with_capacity(coarse.len());
    for (_, x) in coarse.nodes() {
        let v = field_on_fine
            .interpolate(x)
            .ok_or(Error::StencilOutsideGrid { x: x[0], y: x[1] })?;
        values.push(v);
    }
    ComplexField::from_values(*coarse, values)
}
