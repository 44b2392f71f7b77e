//! Hermite-Gauss spectral modes and their superpositions.
//!
//! A mode of order `n`, centre `ω0` and width `w` is
//! `H_n(x)·exp(-x²/2)` with `x = (ω-ω0)/w`, normalized on the grid. The
//! width is the amplitude parameter; the intensity standard deviation of the
//! order-0 mode is `w/√2`.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{ComplexAmplitude, FrequencyAxis, Normalize};

/// Highest Hermite-Gauss order accepted by [`HermiteGaussSpec::new`].
pub const MAX_ORDER: usize = 10;

/// Physicists' Hermite polynomial by three-term recurrence.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Continuum-normalized Hermite function
/// `ψ_n(x) = H_n(x) e^{-x²/2} / sqrt(2^n n! √π)`, evaluated with the
/// normalized recurrence so large orders don't overflow.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let g = (-0.5 * x * x).exp() * std::f64::consts::PI.powf(-0.25);
    if n == 0 {
        return g;
    }
    let mut prev = g;
    let mut cur = std::f64::consts::SQRT_2 * x * g;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Shared centre and width of a Hermite-Gauss family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HgBasis {
    pub center: f64,
    pub width: f64,
}

impl HgBasis {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Hermite-Gauss width must be positive, got {width}"
            )));
        }
        Ok(HgBasis { center, width })
    }

    /// Basis whose order-0 intensity standard deviation is `sigma`.
    pub fn from_intensity_sigma(center: f64, sigma: f64) -> Result<Self> {
        HgBasis::new(center, sigma * std::f64::consts::SQRT_2)
    }

    pub fn intensity_sigma(&self) -> f64 {
        self.width / std::f64::consts::SQRT_2
    }

    pub fn mode(&self, order: usize) -> Result<HermiteGaussSpec> {
        HermiteGaussSpec::new(order, self.center, self.width)
    }

    pub fn amplitude(&self, order: usize, axis: &FrequencyAxis) -> Result<ComplexAmplitude> {
        hermite_gauss(&self.mode(order)?, axis)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermiteGaussSpec {
    pub order: usize,
    pub center: f64,
    pub width: f64,
}

impl HermiteGaussSpec {
    pub fn new(order: usize, center: f64, width: f64) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::InvalidArgument(format!(
                "Hermite-Gauss order {order} exceeds maximum {MAX_ORDER}"
            )));
        }
        HgBasis::new(center, width)?;
        Ok(HermiteGaussSpec {
            order,
            center,
            width,
        })
    }

    pub fn basis(&self) -> HgBasis {
        HgBasis {
            center: self.center,
            width: self.width,
        }
    }
}

/// Discretized, grid-normalized Hermite-Gauss mode. Real valued with parity
/// `(-1)^order` about the centre.
pub fn hermite_gauss(spec: &HermiteGaussSpec, axis: &FrequencyAxis) -> Result<ComplexAmplitude> {
    if !(spec.width > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Hermite-Gauss width must be positive, got {}",
            spec.width
        )));
    }
    let reach = 3.0 * spec.width * ((spec.order + 1) as f64).sqrt();
    if spec.center - axis.min() < reach || axis.max() - spec.center < reach {
        log::warn!(
            "HG{} (width {:e}) is not covered by the axis to ±{reach:e} rad/s",
            spec.order,
            spec.width
        );
    }
    let shift = axis.center() - spec.center;
    let n = spec.order;
    let w = spec.width;
    let amp = ComplexAmplitude::from_offsets(axis, |o| {
        let x = (o + shift) / w;
        C64::new(hermite(n, x) * (-0.5 * x * x).exp(), 0.0)
    });
    amp.normalized()
}

/// Normalized linear combination of Hermite-Gauss modes sharing one
/// centre and width.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperpositionSpec {
    terms: Vec<(C64, HermiteGaussSpec)>,
}

impl SuperpositionSpec {
    pub fn new(terms: Vec<(C64, HermiteGaussSpec)>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("superposition has no terms".into()))?
            .1;
        if terms
            .iter()
            .any(|(_, s)| s.center != first.center || s.width != first.width)
        {
            return Err(Error::InvalidArgument(
                "superposition terms must share centre and width".into(),
            ));
        }
        let n2: f64 = terms.iter().map(|(c, _)| c.norm_sqr()).sum();
        if !(n2 > 0.0) {
            return Err(Error::DegenerateInput(
                "superposition coefficients are all zero".into(),
            ));
        }
        let s = 1.0 / n2.sqrt();
        Ok(SuperpositionSpec {
            terms: terms.into_iter().map(|(c, m)| (c * s, m)).collect(),
        })
    }

    pub fn single(mode: HermiteGaussSpec) -> Self {
        SuperpositionSpec {
            terms: vec![(C64::new(1.0, 0.0), mode)],
        }
    }

    /// Builds `Σ c_n |HG_n⟩` from (order, coefficient) pairs.
    pub fn from_orders(basis: HgBasis, coefficients: &[(usize, C64)]) -> Result<Self> {
        let terms = coefficients
            .iter()
            .map(|&(n, c)| Ok((c, basis.mode(n)?)))
            .collect::<Result<Vec<_>>>()?;
        SuperpositionSpec::new(terms)
    }

    pub fn terms(&self) -> &[(C64, HermiteGaussSpec)] {
        &self.terms
    }

    pub fn basis(&self) -> HgBasis {
        self.terms[0].1.basis()
    }

    pub fn max_order(&self) -> usize {
        self.terms.iter().map(|(_, s)| s.order).max().unwrap_or(0)
    }

    /// Coefficient vector over orders `0..dim` (repeated orders add).
    pub fn coefficient_vector(&self, dim: usize) -> Result<Array1<C64>> {
        let mut v = Array1::<C64>::zeros(dim);
        for (c, s) in &self.terms {
            if s.order >= dim {
                return Err(Error::InvalidArgument(format!(
                    "term of order {} outside a {dim}-dimensional basis",
                    s.order
                )));
            }
            v[s.order] += c;
        }
        Ok(v)
    }

    /// Same superposition multiplied by a global phase.
    pub fn phase_rotated(&self, chi: f64) -> Self {
        let p = C64::from_polar(1.0, chi);
        SuperpositionSpec {
            terms: self.terms.iter().map(|&(c, s)| (c * p, s)).collect(),
        }
    }
}

/// Grid amplitude of a superposition, renormalized on the grid.
pub fn superpose(spec: &SuperpositionSpec, axis: &FrequencyAxis) -> Result<ComplexAmplitude> {
    let mut values = Array1::<C64>::zeros(axis.len());
    for (c, mode) in spec.terms() {
        let m = hermite_gauss(mode, axis)?;
        values.scaled_add(*c, &m.values);
    }
    ComplexAmplitude::new(axis.clone(), values)?.normalized()
}

/// `cos θ |HG0⟩ + e^{iφ} sin θ |HG1⟩` in the given basis.
pub fn bloch_projection(theta: f64, phi: f64, basis: HgBasis) -> SuperpositionSpec {
    let (s, c) = theta.sin_cos();
    let terms = vec![
        (C64::new(c, 0.0), HermiteGaussSpec { order: 0, center: basis.center, width: basis.width }),
        (C64::from_polar(s, phi), HermiteGaussSpec { order: 1, center: basis.center, width: basis.width }),
    ];
    SuperpositionSpec { terms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{bandwidth_to_angular, inner_product};
    use std::f64::consts::{FRAC_PI_4, PI};

    fn default_axis() -> FrequencyAxis {
        FrequencyAxis::from_wavelength_nm(1540.7, 12.0, 512).unwrap()
    }

    fn odd_axis() -> FrequencyAxis {
        FrequencyAxis::from_wavelength_nm(1540.7, 12.0, 511).unwrap()
    }

    // Intensity σ of the fundamental idler mode in the State-A setting.
    fn basis(axis: &FrequencyAxis) -> HgBasis {
        HgBasis::from_intensity_sigma(axis.center(), bandwidth_to_angular(0.5, 1540.7)).unwrap()
    }

    #[test]
    fn explicit_polynomials_match_recurrence() {
        let explicit: [fn(f64) -> f64; 7] = [
            |_| 1.0,
            |x| 2.0 * x,
            |x| 4.0 * x * x - 2.0,
            |x| 8.0 * x.powi(3) - 12.0 * x,
            |x| 16.0 * x.powi(4) - 48.0 * x * x + 12.0,
            |x| 32.0 * x.powi(5) - 160.0 * x.powi(3) + 120.0 * x,
            |x| 64.0 * x.powi(6) - 480.0 * x.powi(4) + 720.0 * x * x - 120.0,
        ];
        for (n, h) in explicit.iter().enumerate() {
            for i in 0..=80 {
                let x = -4.0 + 0.1 * i as f64;
                let want = h(x);
                assert!(
                    (hermite(n, x) - want).abs() <= 1e-10 * want.abs().max(1.0),
                    "H_{n}({x})"
                );
            }
        }
    }

    #[test]
    fn hermite_functions_continuum_normalized() {
        let dx = 1e-3;
        for n in 0..=MAX_ORDER {
            let s: f64 = (-12000..=12000)
                .map(|k| hermite_function(n, k as f64 * dx).powi(2))
                .sum::<f64>()
                * dx;
            assert!((s - 1.0).abs() < 1e-9, "order {n}: {s}");
            let x = 0.7;
            let direct = hermite(n, x) * (-0.5 * x * x).exp()
                / ((2f64.powi(n as i32) * (1..=n).product::<usize>() as f64) * PI.sqrt()).sqrt();
            assert!((hermite_function(n, x) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn order_zero_is_positive_gaussian() {
        let axis = odd_axis();
        let m = basis(&axis).amplitude(0, &axis).unwrap();
        let re: Vec<f64> = m.values.iter().map(|v| v.re).collect();
        let imax = re
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(imax, 255);
        assert!(re.iter().all(|&v| v >= 0.0));
        assert!(m.values.iter().all(|v| v.im == 0.0));
    }

    #[test]
    fn order_one_is_odd() {
        let axis = odd_axis();
        let m = basis(&axis).amplitude(1, &axis).unwrap();
        assert_eq!(m.values[255].re, 0.0);
        assert!(m.values[300].re > 0.0);
    }

    #[test]
    fn exact_parity() {
        for axis in [odd_axis(), default_axis()] {
            let n = axis.len();
            for order in 0..=MAX_ORDER {
                let m = basis(&axis).amplitude(order, &axis).unwrap();
                let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                for k in 0..n {
                    assert_eq!(m.values[k].re, sign * m.values[n - 1 - k].re);
                }
            }
        }
    }

    #[test]
    fn gram_matrix_is_identity() {
        let axis = default_axis();
        let b = basis(&axis);
        let modes: Vec<_> = (0..=5).map(|n| b.amplitude(n, &axis).unwrap()).collect();
        for (m, a) in modes.iter().enumerate() {
            for (n, c) in modes.iter().enumerate() {
                let ip = inner_product(a, c).unwrap();
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((ip - C64::new(want, 0.0)).norm() < 1e-8, "<{m}|{n}> = {ip}");
            }
        }
    }

    #[test]
    fn hg0_hg1_orthogonal() {
        let axis = default_axis();
        let b = basis(&axis);
        let ip = inner_product(&b.amplitude(0, &axis).unwrap(), &b.amplitude(1, &axis).unwrap())
            .unwrap();
        assert!(ip.norm() < 1e-9);
    }

    #[test]
    fn width_overlap_against_fine_quadrature() {
        // Oracle: the same two Gaussians integrated on a 10x finer grid with
        // their own continuum normalization.
        let axis = default_axis();
        let w = HgBasis::from_intensity_sigma(axis.center(), bandwidth_to_angular(0.3, 1540.7))
            .unwrap()
            .width;
        let a = HgBasis::new(axis.center(), w).unwrap().amplitude(0, &axis).unwrap();
        let b = HgBasis::new(axis.center(), 2.0 * w).unwrap().amplitude(0, &axis).unwrap();
        let got = inner_product(&a, &b).unwrap();

        let fine_n = 10 * (axis.len() - 1) + 1;
        let h = axis.span() / (fine_n - 1) as f64;
        let x0 = -0.5 * axis.span();
        let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
        for k in 0..fine_n {
            let x = x0 + k as f64 * h;
            let ga = (-0.5 * (x / w).powi(2)).exp();
            let gb = (-0.5 * (x / (2.0 * w)).powi(2)).exp();
            ab += ga * gb;
            aa += ga * ga;
            bb += gb * gb;
        }
        let oracle = ab / (aa * bb).sqrt();
        assert!((got.re - oracle).abs() < 1e-9);
        assert!(got.im.abs() < 1e-15);
        // Closed form for comparison: sqrt(2·1·2/(1+4)).
        assert!((oracle - (4.0f64 / 5.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn overlap_converges_under_refinement() {
        let coarse = default_axis();
        let fine = FrequencyAxis::from_wavelength_nm(1540.7, 12.0, 1024).unwrap();
        let overlap = |axis: &FrequencyAxis| {
            let b = basis(axis);
            let p = bloch_projection(0.3, 0.0, b);
            let a = superpose(&p, axis).unwrap();
            let c = HgBasis::new(b.center, 1.3 * b.width).unwrap().amplitude(1, axis).unwrap();
            inner_product(&a, &c).unwrap()
        };
        assert!((overlap(&coarse) - overlap(&fine)).norm() < 1e-6);
    }

    #[test]
    fn superpose_single_term_matches_mode() {
        let axis = default_axis();
        let mode = basis(&axis).mode(0).unwrap();
        let a = superpose(&SuperpositionSpec::single(mode), &axis).unwrap();
        let b = hermite_gauss(&mode, &axis).unwrap();
        for (x, y) in a.values.iter().zip(b.values.iter()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn equal_superposition_against_fine_oracle() {
        let axis = odd_axis();
        let b = basis(&axis);
        let spec = bloch_projection(FRAC_PI_4, 0.0, b);
        let amp = superpose(&spec, &axis).unwrap();
        assert!((amp.norm() - 1.0).abs() < 1e-9);

        // Oracle: analytic Hermite functions summed on a 10x grid, normalized
        // there, then read back at the coarse sample positions.
        let fine_n = 10 * (axis.len() - 1) + 1;
        let h = axis.span() / (fine_n - 1) as f64;
        let c = FRAC_PI_4.cos();
        let s = FRAC_PI_4.sin();
        let vals: Vec<f64> = (0..fine_n)
            .map(|k| {
                let x = (-0.5 * axis.span() + k as f64 * h) / b.width;
                c * hermite_function(0, x) + s * hermite_function(1, x)
            })
            .collect();
        let norm = (vals.iter().map(|v| v * v).sum::<f64>() * h).sqrt();
        let peak = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())) / norm;
        for k in 0..axis.len() {
            let oracle = vals[10 * k] / norm;
            assert!((amp.values[k].re - oracle).abs() < 1e-8 * peak);
        }
        // Single-sided: heavier on the positive-detuning side.
        let mid = 255;
        assert!(amp.values[mid + 30].re.abs() > 2.0 * amp.values[mid - 30].re.abs());
    }

    #[test]
    fn twelve_point_sweep_is_unit_norm() {
        let axis = default_axis();
        let b = basis(&axis);
        for k in 0..12 {
            let theta = PI * k as f64 / 12.0;
            let a = superpose(&bloch_projection(theta, 0.0, b), &axis).unwrap();
            assert!((a.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn bloch_coefficients() {
        let b = HgBasis::new(1.0e15, 1.0e12).unwrap();
        let v = bloch_projection(0.0, 0.0, b).coefficient_vector(2).unwrap();
        assert_eq!(v[0], C64::new(1.0, 0.0));
        assert_eq!(v[1].norm(), 0.0);
        let v = bloch_projection(PI / 2.0, 0.0, b).coefficient_vector(2).unwrap();
        assert!(v[0].norm() < 1e-16);
        assert!((v[1] - C64::new(1.0, 0.0)).norm() < 1e-16);
        let v = bloch_projection(FRAC_PI_4, 0.0, b).coefficient_vector(2).unwrap();
        let h = 2f64.sqrt() / 2.0;
        assert!((v[0].re - h).abs() < 1e-15 && (v[1].re - h).abs() < 1e-15);
    }

    #[test]
    fn invalid_specs() {
        assert!(HermiteGaussSpec::new(0, 1e15, 0.0).is_err());
        assert!(HermiteGaussSpec::new(0, 1e15, -1.0).is_err());
        assert!(HermiteGaussSpec::new(MAX_ORDER + 1, 1e15, 1e12).is_err());
        assert!(matches!(SuperpositionSpec::new(vec![]), Err(Error::InvalidArgument(_))));
        let a = HermiteGaussSpec::new(0, 1e15, 1e12).unwrap();
        let b = HermiteGaussSpec::new(1, 1e15, 2e12).unwrap();
        assert!(SuperpositionSpec::new(vec![(C64::new(1.0, 0.0), a), (C64::new(1.0, 0.0), b)]).is_err());
    }

    #[test]
    fn superposition_normalizes_coefficients() {
        let b = HgBasis::new(1e15, 1e12).unwrap();
        let s = SuperpositionSpec::from_orders(b, &[(0, C64::new(3.0, 0.0)), (2, C64::new(0.0, 4.0))])
            .unwrap();
        let n2: f64 = s.terms().iter().map(|(c, _)| c.norm_sqr()).sum();
        assert!((n2 - 1.0).abs() < 1e-12);
        assert!(s.coefficient_vector(2).is_err());
    }
}
