//! Time-of-flight spectrometer: dispersion mapping, finite resolution and
//! photon-counting statistics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::spectrum::{Spectrum, WavelengthAxis};

/// How the configured resolution figure is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelWidth {
    /// Standard deviation of the Gaussian response.
    Sigma,
    /// Full width at half maximum.
    Fwhm,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrometerSpec {
    /// Arrival-time delay per nm of wavelength shift.
    pub dispersion_ns_per_nm: f64,
    pub resolution_nm: f64,
    pub kernel: KernelWidth,
    /// Wavelength arriving at zero delay.
    pub reference_nm: f64,
}

impl Default for SpectrometerSpec {
    fn default() -> Self {
        SpectrometerSpec {
            dispersion_ns_per_nm: 0.58,
            resolution_nm: 0.15,
            kernel: KernelWidth::Sigma,
            reference_nm: 1540.7,
        }
    }
}

impl SpectrometerSpec {
    pub fn new(
        dispersion_ns_per_nm: f64,
        resolution_nm: f64,
        kernel: KernelWidth,
        reference_nm: f64,
    ) -> Result<Self> {
        if !(dispersion_ns_per_nm > 0.0) || !dispersion_ns_per_nm.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "dispersion must be positive, got {dispersion_ns_per_nm}"
            )));
        }
        if !(resolution_nm >= 0.0) || !resolution_nm.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "resolution must be non-negative, got {resolution_nm}"
            )));
        }
        Ok(SpectrometerSpec {
            dispersion_ns_per_nm,
            resolution_nm,
            kernel,
            reference_nm,
        })
    }

    /// Standard deviation of the response kernel in nm.
    pub fn kernel_sigma_nm(&self) -> f64 {
        match self.kernel {
            KernelWidth::Sigma => self.resolution_nm,
            KernelWidth::Fwhm => self.resolution_nm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt()),
        }
    }
}

/// Arrival delay (ns) of a wavelength shift (nm).
pub fn tof_map(delta_nm: f64, spec: &SpectrometerSpec) -> f64 {
    spec.dispersion_ns_per_nm * delta_nm
}

/// Wavelength shift (nm) for an arrival delay (ns).
pub fn tof_inverse(delay_ns: f64, spec: &SpectrometerSpec) -> f64 {
    delay_ns / spec.dispersion_ns_per_nm
}

/// Arrival delays of the samples of a wavelength axis.
pub fn arrival_times(axis: &WavelengthAxis, spec: &SpectrometerSpec) -> Vec<f64> {
    axis.values()
        .iter()
        .map(|l| tof_map(l - spec.reference_nm, spec))
        .collect()
}

/// Convolves a spectrum with the Gaussian instrument response. The kernel is
/// truncated at 6σ and normalized on the grid; the output is renormalized to
/// unit area.
pub fn apply_resolution(spectrum: &Spectrum, spec: &SpectrometerSpec) -> Result<Spectrum> {
    let sigma = spec.kernel_sigma_nm();
    if sigma == 0.0 {
        return spectrum.normalized();
    }
    let step = spectrum.axis.step();
    if step > sigma / 3.0 {
        log::warn!("spectral step {step} nm is coarse for a {sigma} nm resolution kernel");
    }
    let half = (6.0 * sigma / step).ceil() as isize;
    let mut kernel: Vec<f64> = (-half..=half)
        .map(|j| (-0.5 * (j as f64 * step / sigma).powi(2)).exp())
        .collect();
    let ksum: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= ksum);

    let n = spectrum.density.len() as isize;
    let src = &spectrum.density;
    let out: Vec<f64> = (0..n)
        .map(|k| {
            let mut acc = 0.0;
            for (j, w) in (-half..=half).zip(&kernel) {
                let m = k - j;
                if (0..n).contains(&m) {
                    acc += w * src[m as usize];
                }
            }
            acc.max(0.0)
        })
        .collect();
    Spectrum::new(spectrum.axis.clone(), out)?.normalized()
}

/// Histogram of detected events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountRecord {
    /// Bin edges in nm (one more than `counts`), stored as raw bits so the
    /// record compares exactly.
    bin_edges: Vec<u64>,
    pub counts: Vec<u64>,
    pub total_events: u64,
    pub seed: u64,
}

impl CountRecord {
    pub fn bin_edges_nm(&self) -> Vec<f64> {
        self.bin_edges.iter().map(|b| f64::from_bits(*b)).collect()
    }

    /// Empirical unit-area density on the bin centres.
    pub fn to_spectrum(&self) -> Result<Spectrum> {
        let edges = self.bin_edges_nm();
        let width = edges[1] - edges[0];
        let axis = WavelengthAxis::new(edges[0] + 0.5 * width, width, self.counts.len())?;
        let n = self.total_events as f64;
        Spectrum::new(
            axis,
            self.counts.iter().map(|&c| c as f64 / (n * width)).collect(),
        )
    }
}

/// Multinomial draw of `n` events over categories with the given
/// probabilities, as a chain of conditional binomials.
pub(crate) fn multinomial(n: u64, probs: &[f64], rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    if probs.iter().any(|p| *p < 0.0 || !p.is_finite()) {
        return Err(Error::InvalidDistribution(
            "probabilities must be finite and non-negative".into(),
        ));
    }
    let mut rest_p: f64 = probs.iter().sum();
    if !(rest_p > 0.0) {
        return Err(Error::InvalidDistribution("probabilities sum to zero".into()));
    }
    let mut rest_n = n;
    let mut out = vec![0u64; probs.len()];
    for (k, p) in probs.iter().enumerate() {
        if rest_n == 0 {
            break;
        }
        if k == probs.len() - 1 {
            out[k] = rest_n;
            break;
        }
        let q = (p / rest_p).clamp(0.0, 1.0);
        let draw = Binomial::new(rest_n, q)
            .map_err(|e| Error::Numerical(format!("binomial({rest_n}, {q}): {e}")))?
            .sample(rng);
        out[k] = draw;
        rest_n -= draw;
        rest_p -= p;
        if rest_p <= 0.0 {
            // Remaining categories carry no weight; hand leftovers to this one.
            out[k] += rest_n;
            rest_n = 0;
        }
    }
    Ok(out)
}

/// Draws `n_events` detections from a spectrum, one bin per spectral sample.
pub fn sample_counts(spectrum: &Spectrum, n_events: u64, seed: u64) -> Result<CountRecord> {
    if n_events == 0 {
        return Err(Error::InvalidArgument("need at least one event".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = multinomial(n_events, &spectrum.probabilities(), &mut rng)?;
    Ok(CountRecord {
        bin_edges: spectrum.axis.edges().iter().map(|e| e.to_bits()).collect(),
        counts,
        total_events: n_events,
        seed,
    })
}

/// Resolution blur, rebinning to about `bin_nm`, then event sampling.
pub fn simulate_measurement(
    spectrum: &Spectrum,
    spec: &SpectrometerSpec,
    bin_nm: f64,
    n_events: u64,
    seed: u64,
) -> Result<(Spectrum, CountRecord)> {
    let blurred = apply_resolution(spectrum, spec)?.rebin_to_width(bin_nm)?;
    let record = sample_counts(&blurred, n_events, seed)?;
    Ok((blurred, record))
}
