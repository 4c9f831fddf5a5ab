//! Smooth test potentials supported in `|x| < 0.4`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::{DomainMask, Grid};

/// Every preset vanishes for `|x| ≥ SUPPORT_RADIUS`.
pub const SUPPORT_RADIUS: f64 = 0.4;
/// The cutoff starts bending down here.
const PLATEAU_RADIUS: f64 = 0.3;

const BUMP_WIDTH: f64 = 0.08;
const DIPOLE_OFFSET: f64 = 0.15;
const DIPOLE_WIDTH: f64 = 0.07;
const RING_RADIUS: f64 = 0.2;
const RING_WIDTH: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Centered Gaussian bump.
    Gaussian,
    /// Two bumps of opposite sign at `(±0.15, 0)`.
    Dipole,
    /// Radial Gaussian ring around `|x| = 0.2`.
    Ring,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Gaussian, Preset::Dipole, Preset::Ring];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Gaussian => "gaussian",
            Preset::Dipole => "dipole",
            Preset::Ring => "ring",
        }
    }

    /// Value at `x` for unit amplitude.
    pub fn profile(&self, x: [f64; 2]) -> f64 {
        let r = x[0].hypot(x[1]);
        if r >= SUPPORT_RADIUS {
            return 0.0;
        }
        let shape = match self {
            Preset::Gaussian => gauss(r, BUMP_WIDTH),
            Preset::Dipole => {
                let rp = (x[0] - DIPOLE_OFFSET).hypot(x[1]);
                let rm = (x[0] + DIPOLE_OFFSET).hypot(x[1]);
                gauss(rp, DIPOLE_WIDTH) - gauss(rm, DIPOLE_WIDTH)
            }
            Preset::Ring => gauss(r - RING_RADIUS, RING_WIDTH),
        };
        shape * cutoff(r)
    }

    pub fn eval(&self, amplitude: f64, x: [f64; 2]) -> f64 {
        amplitude * self.profile(x)
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "bump" => Ok(Preset::Gaussian),
            "dipole" => Ok(Preset::Dipole),
            "ring" => Ok(Preset::Ring),
            other => Err(Error::invalid(format!("unknown preset '{other}'"))),
        }
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn gauss(r: f64, s: f64) -> f64 {
    (-r * r / (2.0 * s * s)).exp()
}

/// `C^∞` step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
fn smooth_step(t: f64) -> f64 {
    let psi = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let a = psi(t);
    let b = psi(1.0 - t);
    a / (a + b)
}

/// 1 on `r ≤ 0.3`, 0 on `r ≥ 0.4`.
fn cutoff(r: f64) -> f64 {
    1.0 - smooth_step((r - PLATEAU_RADIUS) / (SUPPORT_RADIUS - PLATEAU_RADIUS))
}

/// Samples `preset` at every node of `grid`, zero outside `mask`.
pub fn preset_potential(preset: Preset, amplitude: f64, grid: &Grid, mask: &DomainMask) -> Result<ComplexField> {
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(Error::invalid(format!("amplitude must be positive, got {amplitude}")));
    }
    if mask.flags().len() != grid.len() {
        return Err(Error::GridMismatch("mask does not match grid".into()));
    }
    let mut field = ComplexField::from_real_fn(*grid, |x| preset.eval(amplitude, x));
    for (v, &inside) in field.values_mut().iter_mut().zip(mask.flags()) {
        if !inside {
            *v = 0.0.into();
        }
    }
    Ok(field)
}
