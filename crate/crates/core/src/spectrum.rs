//! Real spectra (probability densities over wavelength) on uniform
//! wavelength axes.
//!
//! Amplitudes live on frequency grids; anything a spectrometer would report
//! is resampled onto a uniform wavelength axis covering the same window,
//! with the `|dω/dλ| = 2πc/λ²` Jacobian applied.

use crate::error::{Error, Result};
use crate::grid::{angular_to_wavelength, FrequencyAxis, TWO_PI_C_NM};

#[derive(Clone, Debug, PartialEq)]
pub struct WavelengthAxis {
    start_nm: f64,
    step_nm: f64,
    n_points: usize,
}

impl WavelengthAxis {
    pub fn new(start_nm: f64, step_nm: f64, n_points: usize) -> Result<Self> {
        if n_points == 0 || !(step_nm > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "wavelength axis needs points and a positive step (n = {n_points}, step = {step_nm})"
            )));
        }
        Ok(WavelengthAxis {
            start_nm,
            step_nm,
            n_points,
        })
    }

    /// Uniform wavelength axis with the same number of points spanning the
    /// same window as a frequency axis.
    pub fn covering(axis: &FrequencyAxis) -> Self {
        let start = angular_to_wavelength(axis.max());
        let end = angular_to_wavelength(axis.min());
        WavelengthAxis {
            start_nm: start,
            step_nm: (end - start) / (axis.len() - 1) as f64,
            n_points: axis.len(),
        }
    }

    pub fn start(&self) -> f64 {
        self.start_nm
    }

    pub fn step(&self) -> f64 {
        self.step_nm
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn value(&self, k: usize) -> f64 {
        self.start_nm + k as f64 * self.step_nm
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.value(k)).collect()
    }

    /// Bin edges treating each sample as the centre of a bin of width `step`.
    pub fn edges(&self) -> Vec<f64> {
        (0..=self.n_points)
            .map(|k| self.start_nm + (k as f64 - 0.5) * self.step_nm)
            .collect()
    }

    /// Same length, with start and step equal to within 1e-9 of a step.
    pub(crate) fn ensure_same(&self, other: &WavelengthAxis) -> Result<()> {
        let tol = 1e-9 * self.step_nm.abs();
        if self.n_points == other.n_points
            && (self.start_nm - other.start_nm).abs() <= tol
            && (self.step_nm - other.step_nm).abs() <= tol
        {
            Ok(())
        } else {
            Err(Error::AxisMismatch(format!(
                "spectra on different wavelength axes ({} pts from {} nm vs {} pts from {} nm)",
                self.n_points, self.start_nm, other.n_points, other.start_nm
            )))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub axis: WavelengthAxis,
    pub density: Vec<f64>,
}

impl Spectrum {
    pub fn new(axis: WavelengthAxis, density: Vec<f64>) -> Result<Self> {
        if density.len() != axis.len() {
            return Err(Error::InvalidArgument(format!(
                "spectrum has {} samples, axis has {}",
                density.len(),
                axis.len()
            )));
        }
        Ok(Spectrum { axis, density })
    }

    /// Converts a density over angular frequency into a unit-area density
    /// over wavelength on [`WavelengthAxis::covering`].
    pub fn from_frequency_density(axis: &FrequencyAxis, density: &[f64]) -> Result<Self> {
        if density.len() != axis.len() {
            return Err(Error::InvalidArgument(format!(
                "density has {} samples, axis has {}",
                density.len(),
                axis.len()
            )));
        }
        let wl = WavelengthAxis::covering(axis);
        let last = (axis.len() - 1) as f64;
        let out = (0..wl.len())
            .map(|j| {
                let lambda = wl.value(j);
                let omega = TWO_PI_C_NM / lambda;
                let t = ((omega - axis.min()) / axis.step()).clamp(0.0, last);
                let k = (t.floor() as usize).min(axis.len() - 2);
                let frac = t - k as f64;
                let p = density[k] * (1.0 - frac) + density[k + 1] * frac;
                p * TWO_PI_C_NM / (lambda * lambda)
            })
            .collect();
        Spectrum::new(wl, out)?.normalized()
    }

    pub fn area(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.axis.step()
    }

    pub fn normalized(&self) -> Result<Self> {
        let a = self.area();
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::DegenerateInput(format!(
                "spectrum has non-positive area {a}"
            )));
        }
        Ok(Spectrum {
            axis: self.axis.clone(),
            density: self.density.iter().map(|d| d / a).collect(),
        })
    }

    /// Per-sample probabilities `density·step`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.density.iter().map(|d| d * self.axis.step()).collect()
    }

    pub fn mean(&self) -> f64 {
        let a: f64 = self.density.iter().sum();
        self.density
            .iter()
            .enumerate()
            .map(|(k, d)| d * self.axis.value(k))
            .sum::<f64>()
            / a
    }

    pub fn std_dev(&self) -> f64 {
        let a: f64 = self.density.iter().sum();
        let m = self.mean();
        (self
            .density
            .iter()
            .enumerate()
            .map(|(k, d)| d * (self.axis.value(k) - m).powi(2))
            .sum::<f64>()
            / a)
            .sqrt()
    }

    /// Merges `factor` neighbouring samples into one bin. A trailing partial
    /// group is dropped and the result renormalized.
    pub fn rebin(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidArgument("rebin factor must be ≥ 1".into()));
        }
        if factor == 1 {
            return Ok(self.clone());
        }
        let groups = self.axis.len() / factor;
        if groups == 0 {
            return Err(Error::InvalidArgument(format!(
                "cannot group {} samples in bins of {factor}",
                self.axis.len()
            )));
        }
        let axis = WavelengthAxis::new(
            self.axis.start() + 0.5 * (factor - 1) as f64 * self.axis.step(),
            factor as f64 * self.axis.step(),
            groups,
        )?;
        let density = self
            .density
            .chunks_exact(factor)
            .map(|c| c.iter().sum::<f64>() / factor as f64)
            .collect();
        Spectrum::new(axis, density)?.normalized()
    }

    /// Rebins to the bin width closest to `width_nm`.
    pub fn rebin_to_width(&self, width_nm: f64) -> Result<Self> {
        let factor = (width_nm / self.axis.step()).round().max(1.0) as usize;
        self.rebin(factor)
    }

    /// Indices of local maxima above `rel_threshold` × the global maximum.
    pub fn peaks(&self, rel_threshold: f64) -> Vec<usize> {
        let max = self.density.iter().cloned().fold(0.0, f64::max);
        let d = &self.density;
        (1..d.len().saturating_sub(1))
            .filter(|&k| d[k] > d[k - 1] && d[k] >= d[k + 1] && d[k] > rel_threshold * max)
            .collect()
    }

    /// Spectrum reflected about the axis midpoint.
    pub fn mirrored(&self) -> Self {
        let mut density = self.density.clone();
        density.reverse();
        Spectrum {
            axis: self.axis.clone(),
            density,
        }
    }
}
