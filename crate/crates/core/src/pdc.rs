//! Joint spectral amplitude of a down-converted photon pair and its
//! Schmidt decomposition.
//!
//! The JSA is the product of a pump envelope, which depends only on the sum
//! frequency, and a phasematching function. Both factors are parametrized
//! phenomenologically: widths and ridge orientation rather than material
//! dispersion.
//!
//! The Schmidt decomposition is the SVD of the JSA sampled on the grid. Each
//! mode pair is phase-fixed so that the largest-magnitude sample of the
//! signal mode is real and positive; the compensating phase goes into the
//! idler mode. Exactly degenerate Schmidt weights leave the basis inside the
//! degenerate block arbitrary; such blocks are rotated onto the eigenbasis of
//! the Hermite-Gauss number operator, which orders them by descending HG0
//! content.

use ndarray::{s, Array1, Array2, Axis};
use ndarray_linalg::{Eigh, JobSvd, SVDDC, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{inner_product, ComplexAmplitude, FrequencyAxis, JointAmplitude, Normalize};
use crate::modes::{hermite_function, HermiteGaussSpec, HgBasis, SuperpositionSpec, MAX_ORDER};

/// Half-power point of sinc²: `sinc(x)² = 1/2`.
pub const SINC_HALF_POWER_X: f64 = 1.391_557_378_251_51;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Photon {
    Signal,
    Idler,
}

/// Pump spectral envelope along the sum frequency `ω_s + ω_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PumpSpec {
    pub shape: SuperpositionSpec,
}

impl PumpSpec {
    pub fn new(shape: SuperpositionSpec) -> Self {
        PumpSpec { shape }
    }

    pub fn hermite_gauss(order: usize, center: f64, width: f64) -> Result<Self> {
        Ok(PumpSpec::new(SuperpositionSpec::single(HermiteGaussSpec::new(
            order, center, width,
        )?)))
    }

    pub fn gaussian(center: f64, width: f64) -> Result<Self> {
        PumpSpec::hermite_gauss(0, center, width)
    }

    pub fn center(&self) -> f64 {
        self.shape.basis().center
    }

    pub fn width(&self) -> f64 {
        self.shape.basis().width
    }

    /// Envelope value at a sum-frequency detuning from the pump centre.
    pub fn envelope(&self, detuning: f64) -> C64 {
        let x = detuning / self.width();
        self.shape
            .terms()
            .iter()
            .map(|(c, m)| c * hermite_function(m.order, x))
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmProfile {
    Gaussian,
    Sinc,
}

/// Phenomenological phasematching function.
///
/// The detuning coordinate across the ridge is
/// `ν = √2·(cos θ·(1-ε)·Δω_i − sin θ·(1+ε)·Δω_s)`, with θ the ridge angle and
/// ε the group-velocity asymmetry. At θ = 45°, ε = 0 this is `Δω_i − Δω_s`,
/// on the same scale as the pump's sum coordinate, so equal pump and
/// phasematching widths give a separable Gaussian state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasematchSpec {
    pub profile: PmProfile,
    pub width: f64,
    pub angle_deg: f64,
    pub asymmetry: f64,
}

impl PhasematchSpec {
    pub fn new(profile: PmProfile, width: f64, angle_deg: f64, asymmetry: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "phasematching width must be positive, got {width}"
            )));
        }
        if !(angle_deg > -90.0 && angle_deg <= 90.0) {
            return Err(Error::InvalidArgument(format!(
                "phasematching angle must lie in (-90°, 90°], got {angle_deg}"
            )));
        }
        if !asymmetry.is_finite() || asymmetry.abs() >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "asymmetry must lie in (-1, 1), got {asymmetry}"
            )));
        }
        Ok(PhasematchSpec {
            profile,
            width,
            angle_deg,
            asymmetry,
        })
    }

    pub fn detuning(&self, d_signal: f64, d_idler: f64) -> f64 {
        let (sin, cos) = self.angle_deg.to_radians().sin_cos();
        std::f64::consts::SQRT_2
            * (cos * (1.0 - self.asymmetry) * d_idler - sin * (1.0 + self.asymmetry) * d_signal)
    }

    /// Effective length scaling ν for the sinc profile.
    pub fn sinc_length(&self) -> f64 {
        SINC_HALF_POWER_X / self.width
    }

    pub fn value(&self, d_signal: f64, d_idler: f64) -> C64 {
        let nu = self.detuning(d_signal, d_idler);
        match self.profile {
            PmProfile::Gaussian => C64::new((-0.5 * (nu / self.width).powi(2)).exp(), 0.0),
            PmProfile::Sinc => {
                let x = nu * self.sinc_length();
                let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
                C64::from_polar(sinc, x)
            }
        }
    }
}

/// Phasematching width that makes a Gaussian pump of width `pump_width`
/// times a Gaussian phasematching function exactly separable:
/// `w_pm² = sin 2θ·(1 − ε²)·w_p²`. Needs `0 < θ < 90°`.
pub fn separable_pm_width(pump_width: f64, angle_deg: f64, asymmetry: f64) -> Result<f64> {
    let s2 = (2.0 * angle_deg.to_radians()).sin();
    if !(s2 > 0.0) || !(angle_deg > 0.0 && angle_deg < 90.0) {
        return Err(Error::InvalidArgument(format!(
            "no separable width at phasematching angle {angle_deg}°"
        )));
    }
    if !(pump_width > 0.0) || asymmetry.abs() >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "bad pump width {pump_width} or asymmetry {asymmetry}"
        )));
    }
    Ok(pump_width * (s2 * (1.0 - asymmetry * asymmetry)).sqrt())
}

/// Pump factor `α(ω_s + ω_i)` on the grid (not normalized).
pub fn pump_amplitude(
    pump: &PumpSpec,
    axis_s: &FrequencyAxis,
    axis_i: &FrequencyAxis,
) -> JointAmplitude {
    let shift = axis_s.center() + axis_i.center() - pump.center();
    if shift.abs() > 3.0 * pump.width() {
        log::warn!("pump centre is {shift:e} rad/s away from the sum of the axis centres");
    }
    JointAmplitude::from_offsets(axis_s, axis_i, |ds, di| pump.envelope(ds + di + shift))
}

/// Phasematching factor `Φ(ω_s, ω_i)` on the grid, centred on the axis
/// centres.
pub fn phasematching(
    pm: &PhasematchSpec,
    axis_s: &FrequencyAxis,
    axis_i: &FrequencyAxis,
) -> JointAmplitude {
    JointAmplitude::from_offsets(axis_s, axis_i, |ds, di| pm.value(ds, di))
}

/// Normalized JSA `α(ω_s+ω_i)·Φ(ω_s, ω_i)`.
pub fn build_jsa(
    pump: &PumpSpec,
    pm: &PhasematchSpec,
    axis_s: &FrequencyAxis,
    axis_i: &FrequencyAxis,
) -> Result<JointAmplitude> {
    let a = pump_amplitude(pump, axis_s, axis_i);
    let p = phasematching(pm, axis_s, axis_i);
    let jsa = JointAmplitude::new(axis_s.clone(), axis_i.clone(), a.values * p.values)?;

    let peak = jsa.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let (ns, ni) = jsa.values.dim();
    let edge = (0..ns)
        .flat_map(|m| [(m, 0), (m, ni - 1)])
        .chain((0..ni).flat_map(|n| [(0, n), (ns - 1, n)]))
        .fold(0.0f64, |acc, idx| acc.max(jsa.values[idx].norm()));
    if peak > 0.0 && edge > 1e-4 * peak {
        log::warn!("JSA reaches the grid edge at {:.1e} of its peak", edge / peak);
    }
    jsa.normalized()
        .map_err(|_| Error::DegenerateInput("pump × phasematching vanishes on the grid".into()))
}

/// An ideal two-mode state `(|HG0,HG1⟩ + |HG1,HG0⟩)/√2`.
pub fn hg_bell_state(
    basis_s: HgBasis,
    basis_i: HgBasis,
    axis_s: &FrequencyAxis,
    axis_i: &FrequencyAxis,
) -> Result<JointAmplitude> {
    let s0 = basis_s.amplitude(0, axis_s)?;
    let s1 = basis_s.amplitude(1, axis_s)?;
    let i0 = basis_i.amplitude(0, axis_i)?;
    let i1 = basis_i.amplitude(1, axis_i)?;
    let c = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    JointAmplitude::from_products(&[(c, &s0, &i1), (c, &s1, &i0)])?.normalized()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RankCutoff {
    Full,
    Rank(usize),
    /// Keep modes with weight `λ_k ≥ tol`.
    Tolerance(f64),
}

/// Schmidt weights (descending) with paired, continuum-normalized modes.
#[derive(Clone, Debug)]
pub struct SchmidtData {
    pub coefficients: Vec<f64>,
    pub signal_modes: Vec<ComplexAmplitude>,
    pub idler_modes: Vec<ComplexAmplitude>,
}

impl SchmidtData {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn modes(&self, photon: Photon) -> &[ComplexAmplitude] {
        match photon {
            Photon::Signal => &self.signal_modes,
            Photon::Idler => &self.idler_modes,
        }
    }

    pub fn schmidt_number(&self) -> f64 {
        schmidt_number(self)
    }

    /// `Σ_{k<rank} √λ_k g_k(ω_s) h_k(ω_i)`.
    pub fn reconstruct(&self, rank: usize) -> Result<JointAmplitude> {
        let rank = rank.min(self.len()).max(1);
        let terms: Vec<_> = (0..rank)
            .map(|k| {
                (
                    C64::new(self.coefficients[k].sqrt(), 0.0),
                    &self.signal_modes[k],
                    &self.idler_modes[k],
                )
            })
            .collect();
        JointAmplitude::from_products(&terms)
    }

    /// Hermite-Gauss family matched to the narrowest significant mode of one
    /// photon (weight ≥ 1e-3·λ_0): centre and width from the first two
    /// moments of its intensity, read as an HG0.
    pub fn fundamental_basis(&self, photon: Photon) -> Result<HgBasis> {
        let modes = self.modes(photon);
        let floor = 1e-3 * self.coefficients.first().copied().unwrap_or(0.0);
        let (mean, var) = modes
            .iter()
            .zip(&self.coefficients)
            .filter(|(_, &l)| l >= floor)
            .map(|(m, _)| moments(m))
            .fold(None, |best: Option<(f64, f64)>, mv| match best {
                Some(b) if b.1 <= mv.1 => Some(b),
                _ => Some(mv),
            })
            .ok_or_else(|| Error::DegenerateInput("empty Schmidt decomposition".into()))?;
        let axis = &modes[0].axis;
        HgBasis::new(axis.center() + mean, (2.0 * var).sqrt())
    }
}

/// Mean offset and variance of `|a|²` on its axis.
fn moments(a: &ComplexAmplitude) -> (f64, f64) {
    let w = a.intensity();
    let total: f64 = w.sum();
    let offs = a.axis.offsets();
    let mean = w.iter().zip(offs.iter()).map(|(p, x)| p * x).sum::<f64>() / total;
    let var = w
        .iter()
        .zip(offs.iter())
        .map(|(p, x)| p * (x - mean).powi(2))
        .sum::<f64>()
        / total;
    (mean, var)
}

/// `K = 1 / Σ λ_k²`.
pub fn schmidt_number(s: &SchmidtData) -> f64 {
    1.0 / s.coefficients.iter().map(|l| l * l).sum::<f64>()
}

const DEGENERACY_TOL: f64 = 1e-9;
const DEGENERACY_FLOOR: f64 = 1e-6;

pub fn schmidt_decompose(jsa: &JointAmplitude, cutoff: RankCutoff) -> Result<SchmidtData> {
    jsa.ensure_normalized(1e-9)?;
    let ds = jsa.axis_s.step();
    let di = jsa.axis_i.step();
    let scale = (ds * di).sqrt();
    let m = jsa.values.mapv(|v| v * scale);
    let (ns, ni) = m.dim();

    let (u, sv, vt) = m.svddc(JobSvd::All).map_err(|e| {
        Error::Numerical(format!(
            "SVD failed on a {ns}x{ni} grid (steps {ds:e}, {di:e} rad/s): {e}"
        ))
    })?;
    let (u, vt) = match (u, vt) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(Error::Numerical("SVD returned no singular vectors".into())),
    };
    if sv.iter().any(|s| !s.is_finite()) {
        return Err(Error::Numerical(format!(
            "non-finite singular values on a {ns}x{ni} grid"
        )));
    }

    let rank = sv.len();
    // Columns are modes, continuum normalized.
    let mut g: Array2<C64> = u.slice(s![.., ..rank]).mapv(|v| v / ds.sqrt());
    let mut h: Array2<C64> = vt.slice(s![..rank, ..]).t().mapv(|v| v / di.sqrt());

    let mut start = 0;
    while start < rank {
        let mut end = start + 1;
        while end < rank && sv[end - 1] - sv[end] <= DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 && sv[start] > DEGENERACY_FLOOR {
            rotate_degenerate_block(&mut g, &mut h, start..end, &jsa.axis_s)?;
        }
        start = end;
    }

    for k in 0..rank {
        let mut col = g.column_mut(k);
        let (idx, pivot) = col
            .iter()
            .enumerate()
            .fold((0, C64::new(0.0, 0.0)), |(bi, bv), (i, v)| {
                if v.norm() > bv.norm() {
                    (i, *v)
                } else {
                    (bi, bv)
                }
            });
        if pivot.norm() == 0.0 {
            continue;
        }
        let phase = pivot / pivot.norm();
        col.mapv_inplace(|v| v * phase.conj());
        col[idx] = C64::new(pivot.norm(), 0.0);
        h.column_mut(k).mapv_inplace(|v| v * phase);
    }

    let lambdas: Vec<f64> = sv.iter().map(|s| s * s).collect();
    let keep = match cutoff {
        RankCutoff::Full => rank,
        RankCutoff::Rank(r) => r.min(rank),
        RankCutoff::Tolerance(tol) => lambdas.iter().take_while(|&&l| l >= tol).count().max(1),
    };

    let column = |mat: &Array2<C64>, k: usize, axis: &FrequencyAxis| ComplexAmplitude {
        axis: axis.clone(),
        values: mat.column(k).to_owned(),
    };
    Ok(SchmidtData {
        coefficients: lambdas[..keep].to_vec(),
        signal_modes: (0..keep).map(|k| column(&g, k, &jsa.axis_s)).collect(),
        idler_modes: (0..keep).map(|k| column(&h, k, &jsa.axis_i)).collect(),
    })
}

fn rotate_degenerate_block(
    g: &mut Array2<C64>,
    h: &mut Array2<C64>,
    block: std::ops::Range<usize>,
    axis: &FrequencyAxis,
) -> Result<()> {
    let r = block.len();
    let gb = g.slice(s![.., block.clone()]).to_owned();
    let hb = h.slice(s![.., block.clone()]).to_owned();

    // Reference HG family from the block's mean intensity; for a block
    // spanning HG_0..HG_{r-1}, <x²> = r·w²/2.
    let intensity: Array1<f64> = gb.mapv(|v| v.norm_sqr()).sum_axis(Axis(1));
    let total = intensity.sum();
    let offs = axis.offsets();
    let mean = intensity.iter().zip(offs.iter()).map(|(p, x)| p * x).sum::<f64>() / total;
    let var = intensity
        .iter()
        .zip(offs.iter())
        .map(|(p, x)| p * (x - mean).powi(2))
        .sum::<f64>()
        / total;
    let basis = HgBasis::new(axis.center() + mean, (2.0 * var / r as f64).sqrt())?;

    let columns: Vec<ComplexAmplitude> = (0..r)
        .map(|j| ComplexAmplitude {
            axis: axis.clone(),
            values: gb.column(j).to_owned(),
        })
        .collect();
    let residual_order = (MAX_ORDER + 1) as f64;
    let mut number = Array2::<C64>::from_diag_elem(r, C64::new(residual_order, 0.0));
    for n in 0..=MAX_ORDER {
        let mode = basis.amplitude(n, axis)?;
        let ov: Vec<C64> = columns
            .iter()
            .map(|c| inner_product(&mode, c))
            .collect::<Result<_>>()?;
        for a in 0..r {
            for b in 0..r {
                number[[a, b]] += (n as f64 - residual_order) * ov[a].conj() * ov[b];
            }
        }
    }
    let (_, w) = number
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Numerical(format!("degenerate-block eigensolve failed: {e}")))?;

    g.slice_mut(s![.., block.clone()]).assign(&gb.dot(&w));
    h.slice_mut(s![.., block]).assign(&hb.dot(&w.mapv(|v| v.conj())));
    Ok(())
}
