//! Coherent versus incoherent models of the state and of the measurement,
//! and the spectral similarity used to tell them apart.
//!
//! | case | state              | measurement              |
//! |------|--------------------|--------------------------|
//! | 1    | coherent JSA       | mode projection          |
//! | 2    | Schmidt mixture    | mode projection          |
//! | 3    | coherent JSA       | intensity-only filter    |
//! | 4    | Schmidt mixture    | intensity-only filter    |

use crate::error::{Error, Result};
use crate::grid::{inner_product, ComplexAmplitude, FrequencyAxis, JointAmplitude};
use crate::modes::{bloch_projection, superpose, HgBasis};
use crate::pdc::SchmidtData;
use crate::projection::conditional_amplitude;
use crate::spectrum::Spectrum;

#[derive(Clone, Debug)]
pub enum StateModel {
    Coherent(JointAmplitude),
    /// Incoherent mixture `Σ λ_k |g_k h_k⟩⟨g_k h_k|`.
    Mixed(SchmidtData),
}

impl StateModel {
    pub fn mixed(schmidt: SchmidtData) -> Result<Self> {
        let total: f64 = schmidt.coefficients.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "mixture weights sum to {total}; use the full Schmidt bank"
            )));
        }
        Ok(StateModel::Mixed(schmidt))
    }

    fn axes(&self) -> Result<(&FrequencyAxis, &FrequencyAxis)> {
        match self {
            StateModel::Coherent(j) => Ok((&j.axis_s, &j.axis_i)),
            StateModel::Mixed(s) => match (s.signal_modes.first(), s.idler_modes.first()) {
                (Some(g), Some(h)) => Ok((&g.axis, &h.axis)),
                _ => Err(Error::DegenerateInput("empty Schmidt mixture".into())),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub enum MeasurementModel {
    CoherentProjection(ComplexAmplitude),
    /// Spectral transmission over the idler axis, unit Riemann area.
    IntensityFilter { axis: FrequencyAxis, profile: Vec<f64> },
}

impl MeasurementModel {
    /// Intensity filter with the shape `|mode|²`.
    pub fn filter_like(mode: &ComplexAmplitude) -> Result<Self> {
        MeasurementModel::filter(mode.axis.clone(), mode.intensity().to_vec())
    }

    pub fn filter(axis: FrequencyAxis, profile: Vec<f64>) -> Result<Self> {
        if profile.len() != axis.len() {
            return Err(Error::InvalidArgument(format!(
                "filter has {} samples, axis has {}",
                profile.len(),
                axis.len()
            )));
        }
        if profile.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidDistribution(
                "filter transmission must be finite and non-negative".into(),
            ));
        }
        let area = profile.iter().sum::<f64>() * axis.step();
        if !(area > 0.0) {
            return Err(Error::InvalidDistribution("filter has zero area".into()));
        }
        let profile = profile.iter().map(|v| v / area).collect();
        Ok(MeasurementModel::IntensityFilter { axis, profile })
    }

    fn axis(&self) -> &FrequencyAxis {
        match self {
            MeasurementModel::CoherentProjection(m) => &m.axis,
            MeasurementModel::IntensityFilter { axis, .. } => axis,
        }
    }
}

/// Case number 1..=4 of a (state, measurement) pairing.
pub fn case_number(state: &StateModel, meas: &MeasurementModel) -> u8 {
    match (state, meas) {
        (StateModel::Coherent(_), MeasurementModel::CoherentProjection(_)) => 1,
        (StateModel::Mixed(_), MeasurementModel::CoherentProjection(_)) => 2,
        (StateModel::Coherent(_), MeasurementModel::IntensityFilter { .. }) => 3,
        (StateModel::Mixed(_), MeasurementModel::IntensityFilter { .. }) => 4,
    }
}

/// Conditional signal density over the signal frequency axis, before
/// normalization.
pub fn conditional_density_case(state: &StateModel, meas: &MeasurementModel) -> Result<Vec<f64>> {
    let (_, axis_i) = state.axes()?;
    meas.axis().ensure_same(axis_i, "measurement vs idler axis")?;
    let di = axis_i.step();
    let out = match (state, meas) {
        (StateModel::Coherent(jsa), MeasurementModel::CoherentProjection(m)) => {
            conditional_amplitude(jsa, m)?.intensity().to_vec()
        }
        (StateModel::Mixed(s), MeasurementModel::CoherentProjection(m)) => {
            let weights = s
                .idler_modes
                .iter()
                .map(|h| inner_product(m, h).map(|o| o.norm_sqr()))
                .collect::<Result<Vec<_>>>()?;
            mixture(s, &weights)
        }
        (StateModel::Coherent(jsa), MeasurementModel::IntensityFilter { profile, .. }) => jsa
            .values
            .outer_iter()
            .map(|row| {
                row.iter()
                    .zip(profile)
                    .map(|(f, t)| t * f.norm_sqr())
                    .sum::<f64>()
                    * di
            })
            .collect(),
        (StateModel::Mixed(s), MeasurementModel::IntensityFilter { profile, .. }) => {
            let weights: Vec<f64> = s
                .idler_modes
                .iter()
                .map(|h| {
                    h.values
                        .iter()
                        .zip(profile)
                        .map(|(v, t)| t * v.norm_sqr())
                        .sum::<f64>()
                        * di
                })
                .collect();
            mixture(s, &weights)
        }
    };
    Ok(out)
}

fn mixture(s: &SchmidtData, weights: &[f64]) -> Vec<f64> {
    let n = s.signal_modes[0].axis.len();
    let mut out = vec![0.0; n];
    for ((l, w), g) in s.coefficients.iter().zip(weights).zip(&s.signal_modes) {
        let c = l * w;
        if c == 0.0 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(g.values.iter()) {
            *o += c * v.norm_sqr();
        }
    }
    out
}

/// Unit-area conditional signal spectrum over wavelength for one case.
pub fn conditional_spectrum_case(state: &StateModel, meas: &MeasurementModel) -> Result<Spectrum> {
    let (axis_s, _) = state.axes()?;
    let d = conditional_density_case(state, meas)?;
    Spectrum::from_frequency_density(axis_s, &d).map_err(|_| Error::NullProjection {
        probability: 0.0,
    })
}

/// Bhattacharyya coefficient `Σ √(p q)·Δλ` of two unit-area spectra on a
/// shared axis.
pub fn similarity(p: &Spectrum, q: &Spectrum) -> Result<f64> {
    p.axis.ensure_same(&q.axis)?;
    let clip = |v: f64| -> Result<f64> {
        if v < -1e-12 || !v.is_finite() {
            Err(Error::InvalidDistribution(format!(
                "spectral density value {v} is negative"
            )))
        } else {
            Ok(v.max(0.0))
        }
    };
    let mut s = 0.0;
    for (a, b) in p.density.iter().zip(&q.density) {
        s += (clip(*a)? * clip(*b)?).sqrt();
    }
    Ok((s * p.axis.step()).min(1.0))
}

/// Case spectra for one projection mode, in case order 1..=4.
pub fn case_spectra(
    jsa: &JointAmplitude,
    schmidt: &SchmidtData,
    mode: &ComplexAmplitude,
) -> Result<[Spectrum; 4]> {
    let coherent = StateModel::Coherent(jsa.clone());
    let mixed = StateModel::mixed(schmidt.clone())?;
    let proj = MeasurementModel::CoherentProjection(mode.clone());
    let filt = MeasurementModel::filter_like(mode)?;
    Ok([
        conditional_spectrum_case(&coherent, &proj)?,
        conditional_spectrum_case(&mixed, &proj)?,
        conditional_spectrum_case(&coherent, &filt)?,
        conditional_spectrum_case(&mixed, &filt)?,
    ])
}

/// Similarities of each case spectrum to the case-1 spectrum, one row per θ
/// of the projection `cos θ HG0 + e^{iφ} sin θ HG1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseReport {
    pub thetas: Vec<f64>,
    pub rows: Vec<[f64; 4]>,
}

impl CaseReport {
    /// Index (0-based) of the best-matching case in row `r`, ties resolved
    /// towards the lower case number.
    pub fn best_case(&self, r: usize) -> usize {
        let row = &self.rows[r];
        (0..4).fold(0, |b, k| if row[k] > row[b] { k } else { b })
    }
}

pub fn case_report(
    jsa: &JointAmplitude,
    schmidt: &SchmidtData,
    thetas: &[f64],
    phi: f64,
    basis: HgBasis,
) -> Result<CaseReport> {
    let rows = thetas
        .iter()
        .map(|&t| {
            let mode = superpose(&bloch_projection(t, phi, basis), &jsa.axis_i)?;
            let spectra = case_spectra(jsa, schmidt, &mode)?;
            let mut row = [0.0; 4];
            for (r, s) in row.iter_mut().zip(&spectra) {
                *r = similarity(&spectra[0], s)?;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CaseReport {
        thetas: thetas.to_vec(),
        rows,
    })
}
