use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::PicardOptions;
use crate::reconstruct::{Algorithm, WavenumberSchedule};

use super::presets::Preset;

/// Everything that determines a run. Output files depend only on these
/// fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub m: u32,
    /// Single wavenumber (alg1, alg2, frechet).
    pub k: Option<f64>,
    /// First and largest wavenumber of the multik schedule.
    pub k1: Option<f64>,
    pub k_max: Option<f64>,
    pub fine: usize,
    pub coarse: usize,
    pub freq_lengths: usize,
    pub freq_angles: usize,
    /// Frequency-grid extent in units of `k`; `None` picks the algorithm's
    /// cutoff (3 for alg1, `m + 1` otherwise).
    pub l: Option<f64>,
    pub eps: f64,
    pub noise: f64,
    pub seed: u64,
    pub preset: Preset,
    pub amplitude: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    /// Frequencies per batched forward solve.
    pub batch: usize,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let picard = PicardOptions::default();
        Self {
            algorithm: Algorithm::Alg1,
            m: 2,
            k: Some(10.0),
            k1: None,
            k_max: None,
            fine: 200,
            coarse: 90,
            freq_lengths: 60,
            freq_angles: 64,
            l: None,
            eps: 0.1,
            noise: 0.0,
            seed: 0,
            preset: Preset::Gaussian,
            amplitude: 0.1,
            picard_tol: picard.tol,
            picard_max_iter: picard.max_iter,
            batch: 8,
            out: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn default_l(algorithm: Algorithm, m: u32) -> f64 {
        match algorithm {
            Algorithm::Alg1 => 3.0,
            _ => m as f64 + 1.0,
        }
    }

    pub fn resolved_l(&self) -> f64 {
        self.l.unwrap_or_else(|| Self::default_l(self.algorithm, self.m))
    }

    pub fn picard(&self) -> PicardOptions {
        PicardOptions {
            tol: self.picard_tol,
            max_iter: self.picard_max_iter,
        }
    }

    /// Wavenumbers the run will use.
    pub fn wavenumbers(&self) -> Result<Vec<f64>> {
        match self.algorithm {
            Algorithm::Multik => {
                let (k1, k_max) = self
                    .k1
                    .zip(self.k_max)
                    .ok_or_else(|| Error::invalid("multik needs k1 and kmax"))?;
                Ok(WavenumberSchedule::geometric(k1, k_max, self.m)?.wavenumbers().to_vec())
            }
            _ => {
                let k = self
                    .k
                    .ok_or_else(|| Error::invalid(format!("{} needs k", self.algorithm)))?;
                Ok(vec![k])
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.algorithm {
            Algorithm::Alg1 if self.m != 2 => {
                return Err(Error::invalid(format!("alg1 requires m = 2, got {}", self.m)))
            }
            Algorithm::Frechet if !(self.m == 2 || self.m == 3) => return Err(Error::UnsupportedM(self.m)),
            _ if self.m < 2 => return Err(Error::invalid(format!("m must be >= 2, got {}", self.m))),
            _ => {}
        }
        for k in self.wavenumbers()? {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::invalid(format!("wavenumber must be positive, got {k}")));
            }
        }
        if self.fine < 3 || self.coarse < 3 {
            return Err(Error::invalid("grids need at least 3 nodes per axis"));
        }
        let l = self.resolved_l();
        if !(l >= 3.0 && l.is_finite()) {
            return Err(Error::invalid(format!("L must be >= 3, got {l}")));
        }
        if self.freq_lengths < 1 || self.freq_angles < 4 {
            return Err(Error::invalid("need freq-lengths >= 1 and freq-angles >= 4"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::invalid(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::invalid(format!("noise level must be >= 0, got {}", self.noise)));
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::invalid(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            )));
        }
        if self.picard_tol.is_nan() || self.picard_tol <= 0.0 || self.picard_max_iter == 0 {
            return Err(Error::invalid("Picard tolerance and iteration cap must be positive"));
        }
        if self.batch == 0 {
            return Err(Error::invalid("batch must be >= 1"));
        }
        Ok(())
    }
}
