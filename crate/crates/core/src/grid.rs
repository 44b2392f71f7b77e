//! Uniform spectral grids and the inner-product algebra on them.
//!
//! Everything inside the crate works in angular frequency (rad/s). Wavelengths
//! (nm) appear only in constructors and when spectra are exported.
//! Integrals are plain Riemann sums over the uniform step.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// 2πc expressed in nm·rad/s, so that ω = TWO_PI_C_NM / λ[nm].
pub const TWO_PI_C_NM: f64 = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT * 1e9;

pub fn wavelength_to_angular(wavelength_nm: f64) -> f64 {
    TWO_PI_C_NM / wavelength_nm
}

pub fn angular_to_wavelength(omega: f64) -> f64 {
    TWO_PI_C_NM / omega
}

/// Converts a small wavelength interval around `reference_nm` into an
/// angular-frequency interval (first-order Jacobian 2πc/λ²).
pub fn bandwidth_to_angular(delta_nm: f64, reference_nm: f64) -> f64 {
    TWO_PI_C_NM * delta_nm / (reference_nm * reference_nm)
}

pub fn bandwidth_to_wavelength(delta_omega: f64, reference_nm: f64) -> f64 {
    delta_omega * reference_nm * reference_nm / TWO_PI_C_NM
}

/// Uniform discretization of one photon's angular-frequency space.
///
/// Samples sit symmetrically about `center`: sample `k` is at
/// `center + (k - (n-1)/2) * step`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyAxis {
    center: f64,
    step: f64,
    n_points: usize,
}

impl FrequencyAxis {
    pub fn new(center: f64, span: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidArgument(format!(
                "axis needs at least 2 points, got {n_points}"
            )));
        }
        if !(span > 0.0) || !span.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "axis span must be positive, got {span}"
            )));
        }
        if !(center > 0.0) || !center.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "axis center must be a positive frequency, got {center}"
            )));
        }
        let step = span / (n_points - 1) as f64;
        Ok(FrequencyAxis {
            center,
            step,
            n_points,
        })
    }

    /// Axis centred on `2πc/center_nm` whose frequency span equals the exact
    /// frequency width of the window `center_nm ± span_nm/2`.
    pub fn from_wavelength_nm(center_nm: f64, span_nm: f64, n_points: usize) -> Result<Self> {
        if !(span_nm > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "wavelength span must be positive, got {span_nm}"
            )));
        }
        if !(center_nm > 0.5 * span_nm) {
            return Err(Error::InvalidArgument(format!(
                "wavelength window {center_nm} ± {} nm reaches zero",
                0.5 * span_nm
            )));
        }
        let lo = center_nm - 0.5 * span_nm;
        let hi = center_nm + 0.5 * span_nm;
        let span = TWO_PI_C_NM / lo - TWO_PI_C_NM / hi;
        FrequencyAxis::new(wavelength_to_angular(center_nm), span, n_points)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn span(&self) -> f64 {
        self.step * (self.n_points - 1) as f64
    }

    /// Detuning of sample `k` from the centre. Exactly antisymmetric in `k`.
    pub fn offset(&self, k: usize) -> f64 {
        (k as f64 - 0.5 * (self.n_points - 1) as f64) * self.step
    }

    pub fn frequency(&self, k: usize) -> f64 {
        self.center + self.offset(k)
    }

    pub fn offsets(&self) -> Array1<f64> {
        Array1::from_iter((0..self.n_points).map(|k| self.offset(k)))
    }

    pub fn frequencies(&self) -> Array1<f64> {
        Array1::from_iter((0..self.n_points).map(|k| self.frequency(k)))
    }

    /// Sample wavelengths in nm (descending, since frequency ascends).
    pub fn wavelengths_nm(&self) -> Array1<f64> {
        self.frequencies().mapv(angular_to_wavelength)
    }

    pub fn min(&self) -> f64 {
        self.frequency(0)
    }

    pub fn max(&self) -> f64 {
        self.frequency(self.n_points - 1)
    }

    pub fn center_wavelength_nm(&self) -> f64 {
        angular_to_wavelength(self.center)
    }

    pub(crate) fn ensure_same(&self, other: &FrequencyAxis, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AxisMismatch(format!(
                "{what}: {} points @ {:e} rad/s vs {} points @ {:e} rad/s",
                self.n_points, self.center, other.n_points, other.center
            )))
        }
    }
}

/// Renormalization to unit L2 norm on the grid.
pub trait Normalize: Sized {
    fn norm_sqr(&self) -> f64;

    fn scaled(&self, factor: f64) -> Self;

    fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::DegenerateInput(format!(
                "cannot normalize: squared norm is {n2}"
            )));
        }
        Ok(self.scaled(1.0 / n2.sqrt()))
    }

    fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

pub fn normalize<T: Normalize>(x: &T) -> Result<T> {
    x.normalized()
}

/// Complex spectral amplitude of one field.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexAmplitude {
    pub axis: FrequencyAxis,
    pub values: Array1<C64>,
}

impl ComplexAmplitude {
    pub fn new(axis: FrequencyAxis, values: Array1<C64>) -> Result<Self> {
        if values.len() != axis.len() {
            return Err(Error::InvalidArgument(format!(
                "amplitude has {} samples, axis has {}",
                values.len(),
                axis.len()
            )));
        }
        Ok(ComplexAmplitude { axis, values })
    }

    /// Samples `f(offset_from_center)` on the axis.
    pub fn from_offsets(axis: &FrequencyAxis, f: impl Fn(f64) -> C64) -> Self {
        let values = Array1::from_iter((0..axis.len()).map(|k| f(axis.offset(k))));
        ComplexAmplitude {
            axis: axis.clone(),
            values,
        }
    }

    pub fn inner_product(&self, other: &ComplexAmplitude) -> Result<C64> {
        inner_product(self, other)
    }

    /// |values|² sampled on the axis (a density in 1/(rad/s) when normalized).
    pub fn intensity(&self) -> Array1<f64> {
        self.values.mapv(|v| v.norm_sqr())
    }

    pub fn phase_rotated(&self, chi: f64) -> Self {
        let p = C64::from_polar(1.0, chi);
        ComplexAmplitude {
            axis: self.axis.clone(),
            values: self.values.mapv(|v| v * p),
        }
    }
}

impl Normalize for ComplexAmplitude {
    fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.axis.step()
    }

    fn scaled(&self, factor: f64) -> Self {
        ComplexAmplitude {
            axis: self.axis.clone(),
            values: self.values.mapv(|v| v * factor),
        }
    }
}

/// Riemann-sum overlap `Σ conj(a)·b·step`.
pub fn inner_product(a: &ComplexAmplitude, b: &ComplexAmplitude) -> Result<C64> {
    a.axis.ensure_same(&b.axis, "inner product")?;
    let s: C64 = a
        .values
        .iter()
        .zip(b.values.iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(s * a.axis.step())
}

/// Discretized joint spectral amplitude; rows index the signal axis, columns
/// the idler axis.
#[derive(Clone, Debug, PartialEq)]
pub struct JointAmplitude {
    pub axis_s: FrequencyAxis,
    pub axis_i: FrequencyAxis,
    pub values: Array2<C64>,
}

impl JointAmplitude {
    pub fn new(axis_s: FrequencyAxis, axis_i: FrequencyAxis, values: Array2<C64>) -> Result<Self> {
        if values.dim() != (axis_s.len(), axis_i.len()) {
            return Err(Error::InvalidArgument(format!(
                "joint amplitude has shape {:?}, axes give ({}, {})",
                values.dim(),
                axis_s.len(),
                axis_i.len()
            )));
        }
        Ok(JointAmplitude {
            axis_s,
            axis_i,
            values,
        })
    }

    /// Samples `f(signal_offset, idler_offset)`.
    pub fn from_offsets(
        axis_s: &FrequencyAxis,
        axis_i: &FrequencyAxis,
        f: impl Fn(f64, f64) -> C64,
    ) -> Self {
        let values = Array2::from_shape_fn((axis_s.len(), axis_i.len()), |(m, n)| {
            f(axis_s.offset(m), axis_i.offset(n))
        });
        JointAmplitude {
            axis_s: axis_s.clone(),
            axis_i: axis_i.clone(),
            values,
        }
    }

    /// Σ_k c_k a_k(ω_s) b_k(ω_i).
    pub fn from_products(terms: &[(C64, &ComplexAmplitude, &ComplexAmplitude)]) -> Result<Self> {
        let (_, a0, b0) = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("no product terms".into()))?;
        let mut values = Array2::<C64>::zeros((a0.axis.len(), b0.axis.len()));
        for (c, a, b) in terms {
            a.axis.ensure_same(&a0.axis, "signal factor")?;
            b.axis.ensure_same(&b0.axis, "idler factor")?;
            for (m, av) in a.values.iter().enumerate() {
                let ca = c * av;
                for (n, bv) in b.values.iter().enumerate() {
                    values[[m, n]] += ca * bv;
                }
            }
        }
        JointAmplitude::new(a0.axis.clone(), b0.axis.clone(), values)
    }

    /// Joint spectral intensity |f|².
    pub fn intensity(&self) -> Array2<f64> {
        self.values.mapv(|v| v.norm_sqr())
    }

    pub fn cell_area(&self) -> f64 {
        self.axis_s.step() * self.axis_i.step()
    }

    pub(crate) fn ensure_normalized(&self, tol: f64) -> Result<()> {
        let n2 = self.norm_sqr();
        if (n2 - 1.0).abs() > tol {
            return Err(Error::InvalidArgument(format!(
                "joint amplitude is not normalized (‖f‖² = {n2})"
            )));
        }
        Ok(())
    }
}

impl Normalize for JointAmplitude {
    fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_area()
    }

    fn scaled(&self, factor: f64) -> Self {
        JointAmplitude {
            axis_s: self.axis_s.clone(),
            axis_i: self.axis_i.clone(),
            values: self.values.mapv(|v| v * factor),
        }
    }
}
