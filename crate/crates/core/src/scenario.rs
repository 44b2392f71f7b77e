//! Scenario files: a TOML (or JSON) description of source, grid,
//! measurements and instrument, resolved into concrete specs.
//!
//! ```toml
//! name = "example"
//! seed = 7
//!
//! [grid]
//! center_nm = 1540.7
//! span_nm = 12.0
//! points = 512
//!
//! [pump]
//! sigma_nm = 0.3
//! reference_nm = 1540.7
//! order = 0
//!
//! [phasematching]
//! profile = "gaussian"
//! angle_deg = 45.0
//! calibrate = "phasematching"
//! marginal_sigma_nm = 0.84
//! ```

use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{bandwidth_to_angular, bandwidth_to_wavelength, FrequencyAxis, JointAmplitude};
use crate::instrument::{KernelWidth, SpectrometerSpec};
use crate::modes::{HgBasis, SuperpositionSpec, MAX_ORDER};
use crate::pdc::{
    build_jsa, pump_amplitude, phasematching, separable_pm_width, PhasematchSpec, PmProfile,
    PumpSpec,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub seed: Option<u64>,
    pub grid: GridConfig,
    pub pump: PumpConfig,
    pub phasematching: PhasematchConfig,
    #[serde(default)]
    pub projections: ProjectionConfig,
    #[serde(default)]
    pub instrument: InstrumentConfig,
    #[serde(default)]
    pub cases: CasesConfig,
    #[serde(default)]
    pub tomography: Option<TomographyConfig>,
    /// Subset of `jsi, schmidt, spectra, counts, sweep, cases, tomography`;
    /// everything the config supports when absent.
    #[serde(default)]
    pub outputs: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub center_nm: f64,
    #[serde(default = "default_span")]
    pub span_nm: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_span() -> f64 {
    12.0
}

fn default_points() -> usize {
    512
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeTerm {
    pub order: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    /// Intensity standard deviation, nm, converted at `reference_nm`.
    #[serde(default)]
    pub sigma_nm: Option<f64>,
    /// Defaults to the pump wavelength.
    #[serde(default)]
    pub reference_nm: Option<f64>,
    /// Defaults to half the grid centre wavelength.
    #[serde(default)]
    pub center_nm: Option<f64>,
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub modes: Option<Vec<ModeTerm>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhasematchConfig {
    #[serde(default = "default_profile")]
    pub profile: String,
    #[serde(default = "default_angle")]
    pub angle_deg: f64,
    #[serde(default)]
    pub asymmetry: f64,
    /// Intensity standard deviation along the detuning coordinate, nm at the
    /// grid centre.
    #[serde(default)]
    pub sigma_nm: Option<f64>,
    /// `"phasematching"` solves for the phasematching width, `"matched"`
    /// for a pump width with the separable phasematching width.
    #[serde(default)]
    pub calibrate: Option<String>,
    /// Target idler marginal standard deviation, nm.
    #[serde(default)]
    pub marginal_sigma_nm: Option<f64>,
}

fn default_profile() -> String {
    "gaussian".into()
}

fn default_angle() -> f64 {
    45.0
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionConfig {
    /// Single Hermite-Gauss projections.
    #[serde(default)]
    pub orders: Vec<usize>,
    /// `cos θ HG0 + e^{iφ} sin θ HG1` projections.
    #[serde(default)]
    pub thetas: Vec<f64>,
    #[serde(default)]
    pub phi: f64,
    /// Evenly spaced θ over [0, π) for the sweep table; 0 disables it.
    #[serde(default)]
    pub sweep_points: usize,
    /// Basis width override; otherwise matched to the idler Schmidt modes.
    #[serde(default)]
    pub basis_sigma_nm: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentConfig {
    #[serde(default = "default_dispersion")]
    pub dispersion_ns_per_nm: f64,
    #[serde(default = "default_resolution")]
    pub resolution_nm: f64,
    /// `"sigma"` or `"fwhm"`.
    #[serde(default = "default_kernel")]
    pub kernel: String,
    #[serde(default)]
    pub reference_nm: Option<f64>,
    /// Detection events per projection; 0 disables sampling.
    #[serde(default)]
    pub events: u64,
    #[serde(default = "default_bin")]
    pub bin_nm: f64,
}

fn default_dispersion() -> f64 {
    0.58
}

fn default_resolution() -> f64 {
    0.15
}

fn default_kernel() -> String {
    "sigma".into()
}

fn default_bin() -> f64 {
    0.1
}

impl Default for InstrumentConfig {
    fn default() -> Self {
        InstrumentConfig {
            dispersion_ns_per_nm: default_dispersion(),
            resolution_nm: default_resolution(),
            kernel: default_kernel(),
            reference_nm: None,
            events: 0,
            bin_nm: default_bin(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CasesConfig {
    #[serde(default)]
    pub thetas: Vec<f64>,
    #[serde(default)]
    pub phi: f64,
    #[serde(default = "all_cases")]
    pub enabled: Vec<u8>,
}

fn all_cases() -> Vec<u8> {
    vec![1, 2, 3, 4]
}

impl Default for CasesConfig {
    fn default() -> Self {
        CasesConfig {
            thetas: Vec::new(),
            phi: 0.0,
            enabled: all_cases(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyConfig {
    /// Dimension of the reduced density matrix.
    pub dim: usize,
    /// Dimension of the simulated reconstruction.
    #[serde(default = "default_estimate_dim")]
    pub estimate_dim: usize,
    /// Events per measurement setting; exact probabilities when absent.
    #[serde(default)]
    pub events_per_setting: Option<u64>,
}

fn default_estimate_dim() -> usize {
    2
}

pub const OUTPUTS: [&str; 7] = ["jsi", "schmidt", "spectra", "counts", "sweep", "cases", "tomography"];

/// Command-line adjustments applied on top of a config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid_points: Option<usize>,
    pub projection_thetas: Option<Vec<f64>>,
    pub case_thetas: Option<Vec<f64>>,
    pub cases_enabled: Option<Vec<u8>>,
    pub sweep_points: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, c: &mut ScenarioConfig) {
        if let Some(s) = self.seed {
            c.seed = Some(s);
        }
        if let Some(n) = self.grid_points {
            c.grid.points = n;
        }
        if let Some(t) = &self.projection_thetas {
            c.projections.thetas = t.clone();
            c.projections.orders.clear();
        }
        if let Some(t) = &self.case_thetas {
            c.cases.thetas = t.clone();
        }
        if let Some(e) = &self.cases_enabled {
            c.cases.enabled = e.clone();
        }
        if let Some(n) = self.sweep_points {
            c.projections.sweep_points = n;
        }
    }
}

impl ScenarioConfig {
    /// Parses TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
        } else {
            toml::from_str(text).map_err(|e| Error::config("config", e.message().to_string() + &span_hint(text, e.span())))
        }
    }
}

fn span_hint(text: &str, span: Option<std::ops::Range<usize>>) -> String {
    match span {
        Some(r) => {
            let line = text[..r.start.min(text.len())].matches('\n').count() + 1;
            format!(" (line {line})")
        }
        None => String::new(),
    }
}

/// A validated scenario with calibrated source parameters.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    /// Config text as read, for hashing.
    pub source: String,
    pub axis: FrequencyAxis,
    pub pump: PumpSpec,
    pub phasematching: PhasematchSpec,
    pub instrument: SpectrometerSpec,
}

impl Scenario {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let source = std::fs::read_to_string(path)?;
        Scenario::from_text(&source, overrides)
    }

    pub fn from_text(source: &str, overrides: &Overrides) -> Result<Self> {
        let mut config = ScenarioConfig::parse(source)?;
        overrides.apply(&mut config);
        Scenario::resolve(config, source.to_string())
    }

    pub fn resolve(config: ScenarioConfig, source: String) -> Result<Self> {
        let g = &config.grid;
        if !(g.center_nm > 0.0) {
            return Err(Error::config("grid.center_nm", "must be positive"));
        }
        if !(g.span_nm > 0.0 && g.span_nm < g.center_nm) {
            return Err(Error::config("grid.span_nm", "must be positive and below the centre wavelength"));
        }
        if g.points < 16 {
            return Err(Error::config("grid.points", "need at least 16 points"));
        }
        let axis = FrequencyAxis::from_wavelength_nm(g.center_nm, g.span_nm, g.points)
            .map_err(|e| Error::config("grid", e.to_string()))?;

        let p = &config.pump;
        let pump_center = match p.center_nm {
            Some(c) if c > 0.0 => crate::grid::wavelength_to_angular(c),
            Some(_) => return Err(Error::config("pump.center_nm", "must be positive")),
            None => 2.0 * axis.center(),
        };
        let pump_ref = p.reference_nm.unwrap_or(match p.center_nm {
            Some(c) => c,
            None => 0.5 * g.center_nm,
        });
        if !(pump_ref > 0.0) {
            return Err(Error::config("pump.reference_nm", "must be positive"));
        }
        let terms: Vec<(usize, C64)> = match (&p.order, &p.modes) {
            (Some(_), Some(_)) => {
                return Err(Error::config("pump", "give either `order` or `modes`, not both"))
            }
            (Some(o), None) => vec![(*o, C64::new(1.0, 0.0))],
            (None, Some(m)) if !m.is_empty() => {
                m.iter().map(|t| (t.order, C64::new(t.re, t.im))).collect()
            }
            _ => vec![(0, C64::new(1.0, 0.0))],
        };
        if let Some((o, _)) = terms.iter().find(|(o, _)| *o > MAX_ORDER) {
            return Err(Error::config("pump.order", format!("order {o} exceeds {MAX_ORDER}")));
        }
        let make_pump = |w: f64| -> Result<PumpSpec> {
            let basis = HgBasis::new(pump_center, w)?;
            Ok(PumpSpec::new(SuperpositionSpec::from_orders(basis, &terms)?))
        };

        let m = &config.phasematching;
        let profile = match m.profile.as_str() {
            "gaussian" => PmProfile::Gaussian,
            "sinc" => PmProfile::Sinc,
            other => {
                return Err(Error::config(
                    "phasematching.profile",
                    format!("unknown profile `{other}` (gaussian | sinc)"),
                ))
            }
        };
        if !(m.angle_deg > -90.0 && m.angle_deg <= 90.0) {
            return Err(Error::config("phasematching.angle_deg", "must lie in (-90, 90]"));
        }
        if !(m.asymmetry.abs() < 1.0) {
            return Err(Error::config("phasematching.asymmetry", "must lie in (-1, 1)"));
        }
        let to_width = |sigma_nm: f64, reference: f64| {
            std::f64::consts::SQRT_2 * bandwidth_to_angular(sigma_nm, reference)
        };
        let pm_with = |w: f64| PhasematchSpec::new(profile, w, m.angle_deg, m.asymmetry);
        let positive = |v: Option<f64>, field: &str| -> Result<Option<f64>> {
            match v {
                Some(x) if !(x > 0.0) || !x.is_finite() => {
                    Err(Error::config(field, "must be positive"))
                }
                other => Ok(other),
            }
        };
        let pump_sigma = positive(p.sigma_nm, "pump.sigma_nm")?;
        let pm_sigma = positive(m.sigma_nm, "phasematching.sigma_nm")?;
        let target = positive(m.marginal_sigma_nm, "phasematching.marginal_sigma_nm")?;

        let (pump, pm) = match m.calibrate.as_deref() {
            None => {
                let ps = pump_sigma.ok_or_else(|| Error::config("pump.sigma_nm", "required"))?;
                let ms = pm_sigma.ok_or_else(|| {
                    Error::config("phasematching.sigma_nm", "required unless `calibrate` is set")
                })?;
                (make_pump(to_width(ps, pump_ref))?, pm_with(to_width(ms, g.center_nm))?)
            }
            Some(mode) => {
                if pm_sigma.is_some() {
                    return Err(Error::config(
                        "phasematching.sigma_nm",
                        "cannot be combined with `calibrate`",
                    ));
                }
                let target = target.ok_or_else(|| {
                    Error::config("phasematching.marginal_sigma_nm", "required with `calibrate`")
                })?;
                match mode {
                    "phasematching" => {
                        let ps = pump_sigma.ok_or_else(|| Error::config("pump.sigma_nm", "required"))?;
                        let pump = make_pump(to_width(ps, pump_ref))?;
                        let w = calibrate_width(&axis, target, g.center_nm, |w| {
                            Ok((pump.clone(), pm_with(w)?))
                        })
                        .map_err(|e| Error::config("phasematching.marginal_sigma_nm", e.to_string()))?;
                        (pump, pm_with(w)?)
                    }
                    "matched" => {
                        if pump_sigma.is_some() {
                            return Err(Error::config(
                                "pump.sigma_nm",
                                "set by calibration when `calibrate = \"matched\"`",
                            ));
                        }
                        let sep = |w: f64| separable_pm_width(w, m.angle_deg, m.asymmetry);
                        sep(1.0).map_err(|e| Error::config("phasematching.angle_deg", e.to_string()))?;
                        let w = calibrate_width(&axis, target, g.center_nm, |w| {
                            Ok((make_pump(w)?, pm_with(sep(w)?)?))
                        })
                        .map_err(|e| Error::config("phasematching.marginal_sigma_nm", e.to_string()))?;
                        (make_pump(w)?, pm_with(sep(w)?)?)
                    }
                    other => {
                        return Err(Error::config(
                            "phasematching.calibrate",
                            format!("unknown mode `{other}` (phasematching | matched)"),
                        ))
                    }
                }
            }
        };

        let ins = &config.instrument;
        let kernel = match ins.kernel.as_str() {
            "sigma" => KernelWidth::Sigma,
            "fwhm" => KernelWidth::Fwhm,
            other => {
                return Err(Error::config(
                    "instrument.kernel",
                    format!("unknown kernel width `{other}` (sigma | fwhm)"),
                ))
            }
        };
        let instrument = SpectrometerSpec::new(
            ins.dispersion_ns_per_nm,
            ins.resolution_nm,
            kernel,
            ins.reference_nm.unwrap_or(g.center_nm),
        )
        .map_err(|e| Error::config("instrument", e.to_string()))?;
        if !(ins.bin_nm > 0.0) {
            return Err(Error::config("instrument.bin_nm", "must be positive"));
        }

        let pr = &config.projections;
        if let Some(o) = pr.orders.iter().find(|&&o| o > MAX_ORDER) {
            return Err(Error::config("projections.orders", format!("order {o} exceeds {MAX_ORDER}")));
        }
        if pr.thetas.iter().chain(&config.cases.thetas).any(|t| !t.is_finite()) {
            return Err(Error::config("projections.thetas", "angles must be finite"));
        }
        positive(pr.basis_sigma_nm, "projections.basis_sigma_nm")?;
        if let Some(c) = config.cases.enabled.iter().find(|&&c| !(1..=4).contains(&c)) {
            return Err(Error::config("cases.enabled", format!("unknown case {c} (1..4)")));
        }
        if let Some(t) = &config.tomography {
            if t.dim == 0 || t.dim > MAX_ORDER + 1 {
                return Err(Error::config("tomography.dim", format!("must lie in 1..={}", MAX_ORDER + 1)));
            }
            if t.estimate_dim < 2 || t.estimate_dim > MAX_ORDER + 1 {
                return Err(Error::config(
                    "tomography.estimate_dim",
                    format!("must lie in 2..={}", MAX_ORDER + 1),
                ));
            }
            if t.events_per_setting == Some(0) {
                return Err(Error::config("tomography.events_per_setting", "must be positive"));
            }
        }
        if let Some(outs) = &config.outputs {
            if let Some(o) = outs.iter().find(|o| !OUTPUTS.contains(&o.as_str())) {
                return Err(Error::config("outputs", format!("unknown output `{o}`")));
            }
        }
        let scenario = Scenario {
            config,
            source,
            axis,
            pump,
            phasematching: pm,
            instrument,
        };
        if scenario.wants("counts") && scenario.config.seed.is_none() {
            return Err(Error::config("seed", "required when event sampling is requested"));
        }
        if scenario.needs_tomography_seed() && scenario.config.seed.is_none() {
            return Err(Error::config("seed", "required for noisy tomography"));
        }
        Ok(scenario)
    }

    pub fn name(&self) -> &str {
        &self.config.name
    }

    pub fn seed(&self) -> u64 {
        self.config.seed.unwrap_or(0)
    }

    pub fn jsa(&self) -> Result<JointAmplitude> {
        build_jsa(&self.pump, &self.phasematching, &self.axis, &self.axis)
    }

    /// Pump and phasematching intensity widths in nm at the grid centre.
    pub fn widths_nm(&self) -> (f64, f64) {
        let c = self.config.grid.center_nm;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        (
            bandwidth_to_wavelength(self.pump.width() * s, c),
            bandwidth_to_wavelength(self.phasematching.width * s, c),
        )
    }

    /// Whether an output is requested and the config can produce it.
    pub fn wants(&self, output: &str) -> bool {
        let c = &self.config;
        let supported = match output {
            "jsi" | "schmidt" => true,
            "spectra" => !c.projections.orders.is_empty() || !c.projections.thetas.is_empty(),
            "counts" => {
                c.instrument.events > 0
                    && (!c.projections.orders.is_empty() || !c.projections.thetas.is_empty())
            }
            "sweep" => c.projections.sweep_points > 0,
            "cases" => !c.cases.thetas.is_empty() && !c.cases.enabled.is_empty(),
            "tomography" => c.tomography.is_some(),
            _ => false,
        };
        supported
            && c
                .outputs
                .as_ref()
                .is_none_or(|o| o.iter().any(|x| x == output))
    }

    fn needs_tomography_seed(&self) -> bool {
        self.wants("tomography")
            && self
                .config
                .tomography
                .as_ref()
                .is_some_and(|t| t.events_per_setting.is_some())
    }
}

/// Idler marginal standard deviation (nm at `center_nm`) of a pump ×
/// phasematching product, without normalizing or edge checks.
pub fn idler_marginal_sigma_nm(
    pump: &PumpSpec,
    pm: &PhasematchSpec,
    axis: &FrequencyAxis,
    center_nm: f64,
) -> f64 {
    let a = pump_amplitude(pump, axis, axis);
    let b = phasematching(pm, axis, axis);
    let jsi = (a.values * b.values).mapv(|v| v.norm_sqr());
    let marg = jsi.sum_axis(ndarray::Axis(0));
    let offs = axis.offsets();
    let total = marg.sum();
    let mean = marg.iter().zip(offs.iter()).map(|(p, x)| p * x).sum::<f64>() / total;
    let var = marg
        .iter()
        .zip(offs.iter())
        .map(|(p, x)| p * (x - mean).powi(2))
        .sum::<f64>()
        / total;
    bandwidth_to_wavelength(var.sqrt(), center_nm)
}

/// Log-space bisection for the width at which the idler marginal reaches
/// `target_nm`. The marginal must grow with the width.
fn calibrate_width(
    axis: &FrequencyAxis,
    target_nm: f64,
    center_nm: f64,
    make: impl Fn(f64) -> Result<(PumpSpec, PhasematchSpec)>,
) -> Result<f64> {
    let sigma = |w: f64| -> Result<f64> {
        let (p, m) = make(w)?;
        Ok(idler_marginal_sigma_nm(&p, &m, axis, center_nm))
    };
    let mut lo = 2.0 * axis.step();
    let mut hi = axis.span();
    let (s_lo, s_hi) = (sigma(lo)?, sigma(hi)?);
    if !(s_lo <= target_nm && target_nm <= s_hi) {
        return Err(Error::InvalidArgument(format!(
            "target {target_nm} nm outside the reachable range {s_lo:.4}..{s_hi:.4} nm on this grid"
        )));
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if sigma(mid)? < target_nm {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-13 {
            break;
        }
    }
    Ok((lo * hi).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
name = "t"
seed = 1
[grid]
center_nm = 1540.7
span_nm = 12.0
points = 128
[pump]
sigma_nm = 0.3
reference_nm = 1540.7
[phasematching]
calibrate = "phasematching"
marginal_sigma_nm = 0.84
"#;

    fn field_of(text: &str) -> String {
        match Scenario::from_text(text, &Overrides::default()) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn calibrates_marginal_width() {
        let s = Scenario::from_text(BASE, &Overrides::default()).unwrap();
        let got = idler_marginal_sigma_nm(&s.pump, &s.phasematching, &s.axis, 1540.7);
        assert!((got - 0.84).abs() < 1e-9);
        // Gaussian closed form: 4σ_i² = σ_p² + σ_pm².
        let (p, m) = s.widths_nm();
        assert!((p - 0.3).abs() < 1e-12);
        assert!((((p * p + m * m) / 4.0).sqrt() - 0.84).abs() < 1e-3);
    }

    #[test]
    fn matched_calibration_is_separable() {
        let text = r#"
name = "b"
[grid]
center_nm = 1540.7
span_nm = 16.0
points = 128
[pump]
order = 1
[phasematching]
asymmetry = 0.1
calibrate = "matched"
marginal_sigma_nm = 1.43
"#;
        let s = Scenario::from_text(text, &Overrides::default()).unwrap();
        let expect = separable_pm_width(s.pump.width(), 45.0, 0.1).unwrap();
        assert!((s.phasematching.width - expect).abs() < 1e-6 * expect);
        let got = idler_marginal_sigma_nm(&s.pump, &s.phasematching, &s.axis, 1540.7);
        assert!((got - 1.43).abs() < 1e-9);
    }

    #[test]
    fn json_is_accepted() {
        let toml_cfg = ScenarioConfig::parse(BASE).unwrap();
        let json = serde_json::to_string(&toml_cfg).unwrap();
        assert_eq!(ScenarioConfig::parse(&json).unwrap(), toml_cfg);
    }

    #[test]
    fn field_level_errors() {
        assert_eq!(field_of(&BASE.replace("points = 128", "points = 4")), "grid.points");
        assert_eq!(
            field_of(&BASE.replace("[phasematching]", "[phasematching]\nprofile = \"lorentz\"")),
            "phasematching.profile"
        );
        assert_eq!(
            field_of(&BASE.replace("marginal_sigma_nm = 0.84", "marginal_sigma_nm = 40.0")),
            "phasematching.marginal_sigma_nm"
        );
        assert_eq!(field_of(&BASE.replace("sigma_nm = 0.3", "sigma_nm = -1.0")), "pump.sigma_nm");
        assert_eq!(field_of(&format!("{BASE}\n[cases]\nenabled = [5]\n")), "cases.enabled");
        assert_eq!(field_of(&format!("outputs = [\"movie\"]\n{BASE}")), "outputs");
        assert_eq!(field_of(&BASE.replace("seed = 1", "bogus = 1")), "config");
        let no_seed = format!("{}\n[instrument]\nevents = 10\n[projections]\norders = [0]\n", BASE.replace("seed = 1", ""));
        assert_eq!(field_of(&no_seed), "seed");
    }

    #[test]
    fn overrides_replace_fields() {
        let o = Overrides {
            seed: Some(9),
            grid_points: Some(64),
            projection_thetas: Some(vec![0.5]),
            sweep_points: Some(12),
            ..Default::default()
        };
        let s = Scenario::from_text(BASE, &o).unwrap();
        assert_eq!(s.seed(), 9);
        assert_eq!(s.axis.len(), 64);
        assert_eq!(s.config.projections.thetas, vec![0.5]);
        assert!(s.wants("spectra") && s.wants("sweep") && !s.wants("cases"));
    }

    #[test]
    fn empty_projection_list_limits_outputs() {
        let s = Scenario::from_text(BASE, &Overrides::default()).unwrap();
        let wanted: Vec<_> = OUTPUTS.iter().filter(|o| s.wants(o)).collect();
        assert_eq!(wanted, vec![&"jsi", &"schmidt"]);
    }
}
