//! Mode-selective projection of the idler and the conditional (heralded)
//! signal state.
//!
//! Projecting the idler onto a mode `m` leaves the signal in
//! `ψ_s(ω_s) = ∫ dω_i conj(m(ω_i)) f(ω_s, ω_i)`; its squared norm is the
//! success probability. The projector is ideal (unit selectivity).

use ndarray::Axis;

use crate::error::{Error, Result};
use crate::grid::{ComplexAmplitude, JointAmplitude, Normalize};
use crate::modes::{bloch_projection, superpose, HgBasis, SuperpositionSpec};
use crate::pdc::Photon;
use crate::spectrum::Spectrum;

/// Below this success probability a projection is treated as orthogonal to
/// the state.
pub const NULL_PROBABILITY: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ProjectionResult {
    pub probability: f64,
    /// Unit-norm conditional signal amplitude.
    pub conditional: ComplexAmplitude,
    pub mode: Option<SuperpositionSpec>,
}

/// Unnormalized conditional amplitude `Σ_i conj(m_i) f(·, i) Δω_i`.
pub fn conditional_amplitude(
    jsa: &JointAmplitude,
    mode: &ComplexAmplitude,
) -> Result<ComplexAmplitude> {
    mode.axis.ensure_same(&jsa.axis_i, "projection mode vs idler axis")?;
    let m = mode.values.mapv(|v| v.conj() * jsa.axis_i.step());
    ComplexAmplitude::new(jsa.axis_s.clone(), jsa.values.dot(&m))
}

pub fn project(jsa: &JointAmplitude, mode: &ComplexAmplitude) -> Result<ProjectionResult> {
    let n2 = mode.norm_sqr();
    if (n2 - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "projection mode must have unit norm, got ‖m‖² = {n2}"
        )));
    }
    let psi = conditional_amplitude(jsa, mode)?;
    let probability = psi.norm_sqr();
    if !(probability >= NULL_PROBABILITY) {
        return Err(Error::NullProjection { probability });
    }
    Ok(ProjectionResult {
        probability,
        conditional: psi.scaled(1.0 / probability.sqrt()),
        mode: None,
    })
}

/// Projects onto a Hermite-Gauss superposition sampled on the idler axis.
pub fn project_spec(jsa: &JointAmplitude, spec: &SuperpositionSpec) -> Result<ProjectionResult> {
    let mode = superpose(spec, &jsa.axis_i)?;
    let mut r = project(jsa, &mode)?;
    r.mode = Some(spec.clone());
    Ok(r)
}

/// Unit-area spectrum of the heralded signal photon over wavelength.
pub fn conditional_spectrum(result: &ProjectionResult) -> Result<Spectrum> {
    let c = &result.conditional;
    Spectrum::from_frequency_density(&c.axis, c.intensity().as_slice().unwrap_or(&[]))
}

/// Marginal density of one photon over its frequency axis (unit Riemann
/// area when the JSA is normalized).
pub fn marginal_density(jsa: &JointAmplitude, photon: Photon) -> Vec<f64> {
    let jsi = jsa.intensity();
    match photon {
        Photon::Signal => (jsi.sum_axis(Axis(1)) * jsa.axis_i.step()).to_vec(),
        Photon::Idler => (jsi.sum_axis(Axis(0)) * jsa.axis_s.step()).to_vec(),
    }
}

pub fn marginal_spectrum(jsa: &JointAmplitude, photon: Photon) -> Result<Spectrum> {
    let axis = match photon {
        Photon::Signal => &jsa.axis_s,
        Photon::Idler => &jsa.axis_i,
    };
    Spectrum::from_frequency_density(axis, &marginal_density(jsa, photon))
}

/// Projections onto `cos θ HG0 + e^{iφ} sin θ HG1` for each θ, in input
/// order.
pub fn rsp_sweep(
    jsa: &JointAmplitude,
    thetas: &[f64],
    phi: f64,
    basis: HgBasis,
) -> Result<Vec<ProjectionResult>> {
    if thetas.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one angle".into()));
    }
    thetas
        .iter()
        .map(|&t| project_spec(jsa, &bloch_projection(t, phi, basis)))
        .collect()
}

/// Evenly spaced angles `k·π/n`, `k = 0..n`.
pub fn sweep_angles(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| k as f64 * std::f64::consts::PI / n as f64)
        .collect()
}

/// Overlap modulus `|⟨a|b⟩|` of two conditional amplitudes.
pub fn fidelity(a: &ComplexAmplitude, b: &ComplexAmplitude) -> Result<f64> {
    Ok(a.inner_product(b)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{bandwidth_to_angular, inner_product, FrequencyAxis};
    use crate::pdc::{
        build_jsa, hg_bell_state, schmidt_decompose, PhasematchSpec, PmProfile, PumpSpec,
        RankCutoff,
    };
    use num_complex::Complex64 as C64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn axis() -> FrequencyAxis {
        FrequencyAxis::from_wavelength_nm(1540.7, 12.0, 192).unwrap()
    }

    fn w(sigma_nm: f64) -> f64 {
        bandwidth_to_angular(sigma_nm, 1540.7) * std::f64::consts::SQRT_2
    }

    /// Anti-correlated Gaussian state with a few significant modes.
    fn correlated() -> JointAmplitude {
        let ax = axis();
        let pump = PumpSpec::gaussian(2.0 * ax.center(), w(0.3)).unwrap();
        let pm = PhasematchSpec::new(PmProfile::Gaussian, w(1.6), 45.0, 0.0).unwrap();
        build_jsa(&pump, &pm, &ax, &ax).unwrap()
    }

    fn bell() -> (JointAmplitude, HgBasis) {
        let ax = axis();
        let b = HgBasis::from_intensity_sigma(ax.center(), bandwidth_to_angular(0.6, 1540.7)).unwrap();
        (hg_bell_state(b, b, &ax, &ax).unwrap(), b)
    }

    #[test]
    fn schmidt_mode_projection() {
        let jsa = correlated();
        let s = schmidt_decompose(&jsa, RankCutoff::Rank(4)).unwrap();
        for k in 0..4 {
            let r = project(&jsa, &s.idler_modes[k]).unwrap();
            assert!((r.probability - s.coefficients[k]).abs() < 1e-9, "k={k}");
            let g = inner_product(&s.signal_modes[k], &r.conditional).unwrap();
            assert!((g.norm() - 1.0).abs() < 1e-9);
            assert!((r.conditional.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn completeness_over_schmidt_bank() {
        let jsa = correlated();
        let s = schmidt_decompose(&jsa, RankCutoff::Full).unwrap();
        let total: f64 = s
            .idler_modes
            .iter()
            .map(|h| conditional_amplitude(&jsa, h).unwrap().norm_sqr())
            .sum();
        assert!((total - 1.0).abs() < 1e-9, "{total}");
    }

    #[test]
    fn linearity_with_conjugated_coefficients() {
        let jsa = correlated();
        let s = schmidt_decompose(&jsa, RankCutoff::Rank(1)).unwrap();
        let b = s.fundamental_basis(Photon::Idler).unwrap();
        let m0 = b.amplitude(0, &jsa.axis_i).unwrap();
        let m1 = b.amplitude(1, &jsa.axis_i).unwrap();
        let (a0, a1) = (C64::new(0.6, 0.2), C64::new(-0.3, 0.7));
        let mix = ComplexAmplitude::new(
            jsa.axis_i.clone(),
            &m0.values * a0 + &m1.values * a1,
        )
        .unwrap();
        let lhs = conditional_amplitude(&jsa, &mix).unwrap();
        let c0 = conditional_amplitude(&jsa, &m0).unwrap();
        let c1 = conditional_amplitude(&jsa, &m1).unwrap();
        let rhs = &c0.values * a0.conj() + &c1.values * a1.conj();
        let err = (&lhs.values - &rhs).iter().map(|v| v.norm()).fold(0.0, f64::max);
        let peak = lhs.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(err <= 1e-9 * peak);
    }

    #[test]
    fn bell_state_conjugation_law() {
        let (jsa, b) = bell();
        let g0 = b.amplitude(0, &jsa.axis_s).unwrap();
        let g1 = b.amplitude(1, &jsa.axis_s).unwrap();
        for k in 0..12 {
            let t = k as f64 * PI / 12.0;
            let r = project_spec(&jsa, &bloch_projection(t, 0.0, b)).unwrap();
            let target = ComplexAmplitude::new(
                jsa.axis_s.clone(),
                &g0.values * t.sin() + &g1.values * t.cos(),
            )
            .unwrap();
            let f = fidelity(&target, &r.conditional).unwrap();
            assert!(f > 0.999, "θ={t}: {f}");
            assert!((r.probability - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn orthogonal_mode_is_a_null_projection() {
        let (jsa, b) = bell();
        let m = b.amplitude(3, &jsa.axis_i).unwrap();
        assert!(matches!(project(&jsa, &m), Err(Error::NullProjection { .. })));
    }

    #[test]
    fn rejects_bad_modes() {
        let (jsa, b) = bell();
        let other = FrequencyAxis::from_wavelength_nm(1540.7, 12.0, 191).unwrap();
        let m = b.amplitude(0, &other).unwrap();
        assert!(matches!(project(&jsa, &m), Err(Error::AxisMismatch(_))));
        let m = b.amplitude(0, &jsa.axis_i).unwrap().scaled(2.0);
        assert!(matches!(project(&jsa, &m), Err(Error::InvalidArgument(_))));
        assert!(rsp_sweep(&jsa, &[], 0.0, b).is_err());
    }

    #[test]
    fn theta_and_theta_plus_pi_agree() {
        let (jsa, b) = bell();
        for t in [0.1, 0.9, 2.0] {
            let r = rsp_sweep(&jsa, &[t, t + PI], 0.0, b).unwrap();
            let s0 = conditional_spectrum(&r[0]).unwrap();
            let s1 = conditional_spectrum(&r[1]).unwrap();
            let d = s0.density.iter().zip(&s1.density).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(d < 1e-9 * s0.density.iter().cloned().fold(0.0, f64::max));
        }
    }

    #[test]
    fn marginal_is_mixture_of_schmidt_modes() {
        let jsa = correlated();
        let s = schmidt_decompose(&jsa, RankCutoff::Full).unwrap();
        let marg = marginal_density(&jsa, Photon::Signal);
        let peak = marg.iter().cloned().fold(0.0, f64::max);
        for (k, m) in marg.iter().enumerate() {
            let mix: f64 = s
                .coefficients
                .iter()
                .zip(&s.signal_modes)
                .map(|(l, g)| l * g.values[k].norm_sqr())
                .sum();
            assert!((m - mix).abs() < 1e-9 * peak);
        }
        let area: f64 = marg.iter().sum::<f64>() * jsa.axis_s.step();
        assert!((area - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_marginal_equals_mode() {
        let ax = axis();
        let b = HgBasis::from_intensity_sigma(ax.center(), bandwidth_to_angular(0.5, 1540.7)).unwrap();
        let g = b.amplitude(2, &ax).unwrap();
        let h = b.amplitude(0, &ax).unwrap();
        let jsa = JointAmplitude::from_products(&[(C64::new(1.0, 0.0), &g, &h)]).unwrap();
        let marg = marginal_density(&jsa, Photon::Signal);
        for (m, v) in marg.iter().zip(g.values.iter()) {
            assert!((m - v.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_angle_grid() {
        let a = sweep_angles(12);
        assert_eq!(a.len(), 12);
        assert_eq!(a[0], 0.0);
        assert!((a[11] - 11.0 * PI / 12.0).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn global_phase_is_unobservable(chi in -PI..PI, theta in 0.0..PI, phi in -PI..PI) {
            let jsa = correlated();
            let s = schmidt_decompose(&jsa, RankCutoff::Rank(1)).unwrap();
            let b = s.fundamental_basis(Photon::Idler).unwrap();
            let spec = bloch_projection(theta, phi, b);
            let r0 = project_spec(&jsa, &spec).unwrap();
            let r1 = project_spec(&jsa, &spec.phase_rotated(chi)).unwrap();
            prop_assert!((r0.probability - r1.probability).abs() <= 1e-14 * r0.probability);
            for (a, b) in r0.conditional.intensity().iter().zip(r1.conditional.intensity().iter()) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }
}
