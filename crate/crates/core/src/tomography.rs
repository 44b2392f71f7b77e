//! Modal density matrix of the idler in a truncated Hermite-Gauss basis and
//! its reconstruction from simulated projective measurements.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{JointAmplitude, Normalize};
use crate::instrument::multinomial;
use crate::modes::{superpose, HgBasis, SuperpositionSpec, MAX_ORDER};
use crate::projection::conditional_amplitude;

/// Captured weight below which the truncated basis is flagged.
pub const TRUNCATION_WARNING: f64 = 0.9;

#[derive(Clone, Debug)]
pub struct ModalDensityMatrix {
    /// `ρ_mn = ⟨HG_m|ρ|HG_n⟩`, trace one.
    pub matrix: Array2<C64>,
    pub basis: HgBasis,
    /// Trace of the state inside the basis before renormalization.
    pub captured_weight: f64,
    pub truncation_warning: bool,
}

impl ModalDensityMatrix {
    fn from_unnormalized(matrix: Array2<C64>, basis: HgBasis) -> Result<Self> {
        let tr = trace(&matrix);
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::DegenerateInput(format!(
                "state has weight {tr} inside the modal basis"
            )));
        }
        let warn = tr < TRUNCATION_WARNING;
        if warn {
            log::warn!("modal basis captures only {tr:.3} of the state");
        }
        Ok(ModalDensityMatrix {
            matrix: matrix.mapv(|v| v / tr),
            basis,
            captured_weight: tr,
            truncation_warning: warn,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigenvalues(&self.matrix)
    }
}

fn trace(m: &Array2<C64>) -> f64 {
    m.diag().iter().map(|v| v.re).sum()
}

fn hermitize(m: &Array2<C64>) -> Array2<C64> {
    (m + &m.t().mapv(|v| v.conj())).mapv(|v| v * 0.5)
}

pub fn eigenvalues(m: &Array2<C64>) -> Result<Vec<f64>> {
    let (vals, _) = hermitize(m)
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Numerical(format!("density-matrix eigensolve failed: {e}")))?;
    let mut v = vals.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// Trace distance `½‖a − b‖₁` of two Hermitian matrices.
pub fn trace_distance(a: &Array2<C64>, b: &Array2<C64>) -> Result<f64> {
    Ok(0.5 * eigenvalues(&(a - b))?.iter().map(|v| v.abs()).sum::<f64>())
}

/// Reduced idler state `tr_s |f⟩⟨f|` in the first `dim` Hermite-Gauss modes.
pub fn reduced_density_matrix(
    jsa: &JointAmplitude,
    basis: HgBasis,
    dim: usize,
) -> Result<ModalDensityMatrix> {
    if dim == 0 || dim > MAX_ORDER + 1 {
        return Err(Error::InvalidArgument(format!(
            "modal dimension must lie in 1..={}, got {dim}",
            MAX_ORDER + 1
        )));
    }
    // Row m: conditional signal amplitude for projection onto HG_m.
    let rows = (0..dim)
        .map(|m| {
            let mode = basis.amplitude(m, &jsa.axis_i)?;
            Ok(conditional_amplitude(jsa, &mode)?.values)
        })
        .collect::<Result<Vec<Array1<C64>>>>()?;
    let ds = jsa.axis_s.step();
    let rho = Array2::from_shape_fn((dim, dim), |(m, n)| {
        rows[m]
            .iter()
            .zip(rows[n].iter())
            .map(|(a, b)| a * b.conj())
            .sum::<C64>()
            * ds
    });
    ModalDensityMatrix::from_unnormalized(rho, basis)
}

/// Projections onto each `HG_k`, `k < dim`, and onto
/// `(HG_k + e^{iφ} HG_l)/√2` for every pair `k < l` and
/// `φ ∈ {0, π/2, π, 3π/2}`. For `dim = 2` this is the six-state qubit set.
pub fn default_projection_set(basis: HgBasis, dim: usize) -> Result<Vec<SuperpositionSpec>> {
    if dim == 0 || dim > MAX_ORDER + 1 {
        return Err(Error::InvalidArgument(format!(
            "modal dimension must lie in 1..={}, got {dim}",
            MAX_ORDER + 1
        )));
    }
    let mut out = Vec::new();
    for k in 0..dim {
        out.push(SuperpositionSpec::from_orders(basis, &[(k, C64::new(1.0, 0.0))])?);
    }
    for k in 0..dim {
        for l in (k + 1)..dim {
            for phi in [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2] {
                out.push(SuperpositionSpec::from_orders(
                    basis,
                    &[
                        (k, C64::new(FRAC_1_SQRT_2, 0.0)),
                        (l, C64::from_polar(FRAC_1_SQRT_2, phi)),
                    ],
                )?);
            }
        }
    }
    Ok(out)
}

/// Orthonormal Hermitian operator basis of dimension `d²`.
fn operator_basis(d: usize) -> Vec<Array2<C64>> {
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        let mut b = Array2::zeros((d, d));
        b[[k, k]] = C64::new(1.0, 0.0);
        out.push(b);
    }
    for k in 0..d {
        for l in (k + 1)..d {
            let mut re = Array2::zeros((d, d));
            re[[k, l]] = C64::new(FRAC_1_SQRT_2, 0.0);
            re[[l, k]] = C64::new(FRAC_1_SQRT_2, 0.0);
            out.push(re);
            let mut im = Array2::zeros((d, d));
            im[[k, l]] = C64::new(0.0, -FRAC_1_SQRT_2);
            im[[l, k]] = C64::new(0.0, FRAC_1_SQRT_2);
            out.push(im);
        }
    }
    out
}

/// Least-squares solution of `⟨c_j|ρ|c_j⟩ = p_j` for Hermitian `ρ`. The
/// result is not trace-normalized.
pub fn linear_inversion(settings: &[Array1<C64>], probabilities: &[f64]) -> Result<Array2<C64>> {
    if settings.len() != probabilities.len() {
        return Err(Error::InvalidArgument(format!(
            "{} settings but {} probabilities",
            settings.len(),
            probabilities.len()
        )));
    }
    let d = settings
        .first()
        .map(|c| c.len())
        .ok_or_else(|| Error::InvalidArgument("empty measurement set".into()))?;
    if settings.iter().any(|c| c.len() != d) {
        return Err(Error::InvalidArgument(
            "measurement vectors have different dimensions".into(),
        ));
    }
    let ops = operator_basis(d);
    let n_par = ops.len();
    // A[j, a] = ⟨c_j|B_a|c_j⟩ (real for Hermitian B_a).
    let a = Array2::from_shape_fn((settings.len(), n_par), |(j, k)| {
        let c = &settings[j];
        c.mapv(|v| v.conj()).dot(&ops[k].dot(c)).re
    });
    let gram = a.t().dot(&a);
    let (vals, vecs) = gram
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Numerical(format!("Gram eigensolve failed: {e}")))?;
    let max = vals.iter().cloned().fold(0.0, f64::max);
    let rank = vals.iter().filter(|&&v| v > 1e-10 * max).count();
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if min > 0.0 { (max / min).sqrt() } else { f64::INFINITY };
    if rank < n_par {
        return Err(Error::IllPosed {
            rank,
            required: n_par,
            condition,
        });
    }
    let rhs = a.t().dot(&Array1::from(probabilities.to_vec()));
    // x = V diag(1/λ) Vᵀ rhs
    let proj = vecs.t().dot(&rhs) / &vals;
    let x = vecs.dot(&proj);
    let mut rho = Array2::<C64>::zeros((d, d));
    for (xa, op) in x.iter().zip(&ops) {
        rho = rho + op.mapv(|v| v * *xa);
    }
    Ok(rho)
}

/// Nearest unit-trace positive semidefinite matrix by eigenvalue clipping.
pub fn psd_project(m: &Array2<C64>) -> Result<Array2<C64>> {
    let (vals, vecs) = hermitize(m)
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Numerical(format!("density-matrix eigensolve failed: {e}")))?;
    let clipped: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateInput(
            "estimate has no positive eigenvalue".into(),
        ));
    }
    let d = m.nrows();
    let mut out = Array2::<C64>::zeros((d, d));
    for (k, l) in clipped.iter().enumerate() {
        if *l == 0.0 {
            continue;
        }
        let v = vecs.column(k);
        for r in 0..d {
            for c in 0..d {
                out[[r, c]] += v[r] * v[c].conj() * (l / total);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct TomographyRun {
    /// Positive, unit-trace estimate.
    pub estimate: ModalDensityMatrix,
    /// Trace-normalized linear-inversion result before positivity
    /// enforcement.
    pub linear: Array2<C64>,
    /// Probabilities fed to the inversion, one per setting.
    pub probabilities: Vec<f64>,
}

/// Simulated tomography of the idler. `n_events = None` uses exact
/// projection probabilities; otherwise `n_events × settings` detections are
/// distributed multinomially over the settings and the observed
/// frequencies, scaled to the ideal total rate, are inverted.
pub fn simulate_tomography(
    jsa: &JointAmplitude,
    projections: &[SuperpositionSpec],
    dim: usize,
    n_events: Option<u64>,
    seed: u64,
) -> Result<TomographyRun> {
    let basis = projections
        .first()
        .map(|p| p.basis())
        .ok_or_else(|| Error::InvalidArgument("empty measurement set".into()))?;
    if projections.iter().any(|p| p.basis() != basis) {
        return Err(Error::InvalidArgument(
            "all projections must share one Hermite-Gauss basis".into(),
        ));
    }
    let settings = projections
        .iter()
        .map(|p| p.coefficient_vector(dim))
        .collect::<Result<Vec<_>>>()?;
    let ideal = projections
        .iter()
        .map(|p| {
            let mode = superpose(p, &jsa.axis_i)?;
            Ok(conditional_amplitude(jsa, &mode)?.norm_sqr())
        })
        .collect::<Result<Vec<f64>>>()?;
    let probabilities = match n_events {
        None => ideal,
        Some(0) => return Err(Error::InvalidArgument("need at least one event".into())),
        Some(n) => {
            let total_n = n * projections.len() as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let counts = multinomial(total_n, &ideal, &mut rng)?;
            let rate: f64 = ideal.iter().sum();
            counts
                .iter()
                .map(|&c| c as f64 / total_n as f64 * rate)
                .collect()
        }
    };
    let raw = linear_inversion(&settings, &probabilities)?;
    let tr = trace(&raw);
    let physical = psd_project(&raw)?;
    let mut estimate = ModalDensityMatrix::from_unnormalized(physical, basis)?;
    estimate.captured_weight = tr;
    estimate.truncation_warning = tr < TRUNCATION_WARNING;
    Ok(TomographyRun {
        estimate,
        linear: raw.mapv(|v| v / tr),
        probabilities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{bandwidth_to_angular, FrequencyAxis};
    use crate::pdc::{
        build_jsa, hg_bell_state, schmidt_decompose, separable_pm_width, PhasematchSpec,
        PmProfile, Photon, PumpSpec, RankCutoff,
    };

    fn max_abs(m: &Array2<C64>) -> f64 {
        m.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn axis() -> FrequencyAxis {
        FrequencyAxis::from_wavelength_nm(1540.7, 16.0, 192).unwrap()
    }

    /// Unbalanced two-mode state built from an HG1 pump.
    fn two_mode() -> JointAmplitude {
        let ax = axis();
        let w = bandwidth_to_angular(1.0, 1540.7) * std::f64::consts::SQRT_2;
        let pump = PumpSpec::hermite_gauss(1, 2.0 * ax.center(), w).unwrap();
        let pm = PhasematchSpec::new(
            PmProfile::Gaussian,
            separable_pm_width(w, 45.0, 0.1).unwrap(),
            45.0,
            0.1,
        )
        .unwrap();
        build_jsa(&pump, &pm, &ax, &ax).unwrap()
    }

    /// Multimode Gaussian state.
    fn multimode() -> JointAmplitude {
        let ax = axis();
        let w = |s: f64| bandwidth_to_angular(s, 1540.7) * std::f64::consts::SQRT_2;
        let pump = PumpSpec::gaussian(2.0 * ax.center(), w(0.3)).unwrap();
        let pm = PhasematchSpec::new(PmProfile::Gaussian, w(1.6), 45.0, 0.0).unwrap();
        build_jsa(&pump, &pm, &ax, &ax).unwrap()
    }

    fn check_valid(r: &ModalDensityMatrix) {
        let m = &r.matrix;
        let herm = max_abs(&(m - &m.t().mapv(|v| v.conj())));
        assert!(herm < 1e-10);
        assert!((trace(m) - 1.0).abs() < 1e-9);
        assert!(r.eigenvalues().unwrap().iter().all(|&v| v > -1e-9));
    }

    #[test]
    fn eigenvalues_match_schmidt_weights() {
        for (jsa, dim) in [(two_mode(), 5), (multimode(), 7)] {
            let s = schmidt_decompose(&jsa, RankCutoff::Full).unwrap();
            let basis = s.fundamental_basis(Photon::Idler).unwrap();
            let r = reduced_density_matrix(&jsa, basis, dim).unwrap();
            check_valid(&r);
            let ev = r.eigenvalues().unwrap();
            let missing = 1.0 - r.captured_weight;
            for (k, e) in ev.iter().enumerate() {
                assert!(
                    (e - s.coefficients[k]).abs() < 1e-6 + missing,
                    "k={k}: {e} vs {}",
                    s.coefficients[k]
                );
            }
        }
    }

    #[test]
    fn matched_rank_one_state_is_pure_hg0() {
        let ax = axis();
        let b = HgBasis::from_intensity_sigma(ax.center(), bandwidth_to_angular(0.6, 1540.7)).unwrap();
        let g = b.amplitude(0, &ax).unwrap();
        let jsa = JointAmplitude::from_products(&[(C64::new(1.0, 0.0), &g, &g)]).unwrap();
        let r = reduced_density_matrix(&jsa, b, 3).unwrap();
        assert!((r.matrix[[0, 0]].re - 1.0).abs() < 1e-12);
        assert!(max_abs(&r.matrix) - 1.0 < 1e-12);
        assert!((r.captured_weight - 1.0).abs() < 1e-12);
        assert!(!r.truncation_warning);
    }

    #[test]
    fn truncation_is_flagged() {
        let jsa = multimode();
        let s = schmidt_decompose(&jsa, RankCutoff::Rank(1)).unwrap();
        let r = reduced_density_matrix(&jsa, s.fundamental_basis(Photon::Idler).unwrap(), 1).unwrap();
        assert!(r.captured_weight < 0.9);
        assert!(r.truncation_warning);
        assert!(reduced_density_matrix(&jsa, r.basis, 0).is_err());
        assert!(reduced_density_matrix(&jsa, r.basis, 12).is_err());
    }

    #[test]
    fn noiseless_inversion_is_exact() {
        for dim in [2, 3] {
            let jsa = multimode();
            let s = schmidt_decompose(&jsa, RankCutoff::Rank(1)).unwrap();
            let basis = s.fundamental_basis(Photon::Idler).unwrap();
            let truth = reduced_density_matrix(&jsa, basis, dim).unwrap();
            let set = default_projection_set(basis, dim).unwrap();
            assert_eq!(set.len(), dim + 2 * dim * (dim - 1));
            let run = simulate_tomography(&jsa, &set, dim, None, 0).unwrap();
            assert!(max_abs(&(&run.linear - &truth.matrix)) < 1e-8);
            assert!(max_abs(&(&run.estimate.matrix - &truth.matrix)) < 1e-8);
            assert!((run.estimate.captured_weight - truth.captured_weight).abs() < 1e-8);
            let d_lin = trace_distance(&run.linear, &truth.matrix).unwrap();
            let d_psd = trace_distance(&run.estimate.matrix, &truth.matrix).unwrap();
            assert!(d_psd <= d_lin + 1e-12);
        }
    }

    #[test]
    fn rank_deficient_set_is_ill_posed() {
        let jsa = two_mode();
        let s = schmidt_decompose(&jsa, RankCutoff::Rank(1)).unwrap();
        let basis = s.fundamental_basis(Photon::Idler).unwrap();
        let set = default_projection_set(basis, 2).unwrap();
        // Without the ±π/2 phases the imaginary part is unconstrained.
        let partial = vec![set[0].clone(), set[1].clone(), set[2].clone(), set[4].clone()];
        match simulate_tomography(&jsa, &partial, 2, None, 0) {
            Err(Error::IllPosed { rank, required, .. }) => {
                assert_eq!(required, 4);
                assert_eq!(rank, 3);
            }
            other => panic!("expected ill-posed, got {other:?}"),
        }
    }

    #[test]
    fn rotated_settings_rotate_the_estimate() {
        let jsa = two_mode();
        let s = schmidt_decompose(&jsa, RankCutoff::Rank(1)).unwrap();
        let basis = s.fundamental_basis(Photon::Idler).unwrap();
        let set = default_projection_set(basis, 2).unwrap();
        let vecs: Vec<_> = set.iter().map(|p| p.coefficient_vector(2).unwrap()).collect();
        let run = simulate_tomography(&jsa, &set, 2, Some(5000), 11).unwrap();
        let rho = linear_inversion(&vecs, &run.probabilities).unwrap();

        let (t, ph) = (0.37f64, 1.1f64);
        let u = Array2::from_shape_vec(
            (2, 2),
            vec![
                C64::new(t.cos(), 0.0),
                C64::from_polar(-t.sin(), -ph),
                C64::from_polar(t.sin(), ph),
                C64::new(t.cos(), 0.0),
            ],
        )
        .unwrap();
        let rotated: Vec<_> = vecs.iter().map(|c| u.dot(c)).collect();
        let rho_rot = linear_inversion(&rotated, &run.probabilities).unwrap();
        let expect = u.dot(&rho).dot(&u.t().mapv(|v| v.conj()));
        assert!(max_abs(&(&rho_rot - &expect)) < 1e-6);
    }

    #[test]
    fn noisy_qubit_eigenvalues() {
        let jsa = two_mode();
        let s = schmidt_decompose(&jsa, RankCutoff::Rank(2)).unwrap();
        let basis = s.fundamental_basis(Photon::Idler).unwrap();
        let set = default_projection_set(basis, 2).unwrap();
        let truth = reduced_density_matrix(&jsa, basis, 2).unwrap().eigenvalues().unwrap();
        let a = simulate_tomography(&jsa, &set, 2, Some(5000), 5).unwrap();
        let b = simulate_tomography(&jsa, &set, 2, Some(5000), 5).unwrap();
        assert_eq!(a.probabilities, b.probabilities);
        for seed in 0..20 {
            let run = simulate_tomography(&jsa, &set, 2, Some(5000), seed).unwrap();
            check_valid(&run.estimate);
            let ev = run.estimate.eigenvalues().unwrap();
            for (e, t) in ev.iter().zip(&truth) {
                assert!((e - t).abs() < 0.05);
            }
        }
    }

    #[test]
    fn psd_projection_clips_negative_part() {
        let m = Array2::from_diag(&Array1::from(vec![
            C64::new(1.1, 0.0),
            C64::new(-0.1, 0.0),
        ]));
        let p = psd_project(&m).unwrap();
        assert!((p[[0, 0]].re - 1.0).abs() < 1e-12);
        assert!(p[[1, 1]].norm() < 1e-12);
        assert!(psd_project(&m.mapv(|v| C64::new(-v.norm(), 0.0))).is_err());
    }

    #[test]
    fn bell_state_idler_is_maximally_mixed() {
        let ax = axis();
        let b = HgBasis::from_intensity_sigma(ax.center(), bandwidth_to_angular(0.6, 1540.7)).unwrap();
        let jsa = hg_bell_state(b, b, &ax, &ax).unwrap();
        let r = reduced_density_matrix(&jsa, b, 2).unwrap();
        assert!((r.matrix[[0, 0]].re - 0.5).abs() < 1e-12);
        assert!(r.matrix[[0, 1]].norm() < 1e-12);
    }
}
