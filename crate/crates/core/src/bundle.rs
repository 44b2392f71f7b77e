//! Tabular outputs of a scenario run and the on-disk bundle.
//!
//! Every table is CSV with `#`-prefixed metadata lines followed by one
//! header row naming columns and units. Wavelength columns ascend. Floats
//! are written with `{:.9e}` so identical inputs give identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::coherence::{case_spectra, similarity};
use crate::error::{Error, Result};
use crate::grid::{angular_to_wavelength, bandwidth_to_angular, JointAmplitude};
use crate::instrument::{apply_resolution, arrival_times, simulate_measurement, tof_map};
use crate::modes::{bloch_projection, superpose, HgBasis, SuperpositionSpec};
use crate::pdc::{schmidt_decompose, Photon, RankCutoff, SchmidtData};
use crate::projection::{
    conditional_spectrum, marginal_spectrum, project_spec, rsp_sweep, sweep_angles,
};
use crate::scenario::{Overrides, Scenario, OUTPUTS};
use crate::tomography::{default_projection_set, reduced_density_matrix, simulate_tomography};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn num(x: f64) -> String {
    format!("{x:.9e}")
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// A scenario together with its JSA, full Schmidt decomposition and the
/// idler Hermite-Gauss basis used for projections.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub scenario: Scenario,
    pub jsa: JointAmplitude,
    pub schmidt: SchmidtData,
    pub basis: HgBasis,
}

impl Pipeline {
    pub fn new(scenario: Scenario) -> Result<Self> {
        let jsa = scenario.jsa()?;
        let schmidt = schmidt_decompose(&jsa, RankCutoff::Full)?;
        let basis = match scenario.config.projections.basis_sigma_nm {
            Some(s) => HgBasis::from_intensity_sigma(
                scenario.axis.center(),
                bandwidth_to_angular(s, scenario.config.grid.center_nm),
            )?,
            None => schmidt.fundamental_basis(Photon::Idler)?,
        };
        Ok(Pipeline {
            scenario,
            jsa,
            schmidt,
            basis,
        })
    }

    fn header(&self, title: &str) -> String {
        let s = &self.scenario;
        let g = &s.config.grid;
        let (wp, wm) = s.widths_nm();
        let mut h = String::new();
        let _ = writeln!(h, "# tmshape {VERSION}: {title}");
        let _ = writeln!(h, "# scenario: {}", s.name());
        let _ = writeln!(
            h,
            "# grid: center_nm={} span_nm={} points={}",
            num(g.center_nm),
            num(g.span_nm),
            g.points
        );
        let _ = writeln!(h, "# pump_sigma_nm={} pm_sigma_nm={}", num(wp), num(wm));
        h
    }

    /// Labelled projection modes: single orders, then Bloch angles.
    pub fn projections(&self) -> Result<Vec<(String, SuperpositionSpec)>> {
        let p = &self.scenario.config.projections;
        let mut out = Vec::new();
        for &o in &p.orders {
            out.push((
                format!("hg{o}"),
                SuperpositionSpec::from_orders(self.basis, &[(o, num_complex::Complex64::new(1.0, 0.0))])?,
            ));
        }
        for &t in &p.thetas {
            out.push((format!("theta{t:.4}"), bloch_projection(t, p.phi, self.basis)));
        }
        Ok(out)
    }

    /// Joint spectral intensity, peak-normalized; first row holds idler
    /// wavelengths, first column signal wavelengths.
    pub fn jsi_table(&self) -> String {
        let mut out = self.header("joint spectral intensity |f|^2 / max");
        let _ = writeln!(out, "# rows: signal wavelength (nm); columns: idler wavelength (nm)");
        let jsi = self.jsa.intensity();
        let peak = jsi.iter().cloned().fold(0.0, f64::max);
        let (ns, ni) = jsi.dim();
        let wl_s: Vec<f64> = self.jsa.axis_s.wavelengths_nm().to_vec();
        let wl_i: Vec<f64> = self.jsa.axis_i.wavelengths_nm().to_vec();
        out.push_str("lambda_s_nm\\lambda_i_nm");
        for n in (0..ni).rev() {
            let _ = write!(out, ",{}", num(wl_i[n]));
        }
        out.push('\n');
        for m in (0..ns).rev() {
            out.push_str(&num(wl_s[m]));
            for n in (0..ni).rev() {
                let _ = write!(out, ",{}", num(jsi[[m, n]] / peak));
            }
            out.push('\n');
        }
        out
    }

    pub fn schmidt_table(&self, top: usize) -> String {
        let mut out = self.header("Schmidt coefficients");
        let _ = writeln!(out, "# schmidt_number={}", num(self.schmidt.schmidt_number()));
        let b = self.basis;
        let c = self.scenario.config.grid.center_nm;
        let _ = writeln!(
            out,
            "# idler_basis: center_nm={} sigma_nm={}",
            num(angular_to_wavelength(b.center)),
            num(crate::grid::bandwidth_to_wavelength(b.intensity_sigma(), c))
        );
        out.push_str("k,lambda,cumulative\n");
        let mut cum = 0.0;
        for (k, l) in self.schmidt.coefficients.iter().take(top).enumerate() {
            cum += l;
            let _ = writeln!(out, "{k},{},{}", num(*l), num(cum));
        }
        out
    }

    /// Ideal and resolution-blurred conditional spectra on the full
    /// wavelength grid, with the signal marginal.
    pub fn spectra_table(&self) -> Result<String> {
        let projections = self.projections()?;
        let marginal = marginal_spectrum(&self.jsa, Photon::Signal)?;
        let mut cols = vec![("marginal_per_nm".to_string(), marginal.density.clone())];
        let mut meta = String::new();
        for (label, spec) in &projections {
            let r = project_spec(&self.jsa, spec)?;
            let ideal = conditional_spectrum(&r)?;
            let blurred = apply_resolution(&ideal, &self.scenario.instrument)?;
            let _ = writeln!(meta, "# probability_{label}={}", num(r.probability));
            cols.push((format!("ideal_{label}_per_nm"), ideal.density));
            cols.push((format!("blurred_{label}_per_nm"), blurred.density));
        }
        let mut out = self.header("conditional signal spectra (unit area)");
        out.push_str(&meta);
        let _ = writeln!(
            out,
            "# resolution_nm={} kernel={:?}",
            num(self.scenario.instrument.resolution_nm),
            self.scenario.instrument.kernel
        );
        out.push_str("wavelength_nm,tof_ns");
        for (name, _) in &cols {
            let _ = write!(out, ",{name}");
        }
        out.push('\n');
        let times = arrival_times(&marginal.axis, &self.scenario.instrument);
        for (k, l) in marginal.axis.values().iter().enumerate() {
            let _ = write!(out, "{},{}", num(*l), num(times[k]));
            for (_, c) in &cols {
                let _ = write!(out, ",{}", num(c[k]));
            }
            out.push('\n');
        }
        Ok(out)
    }

    /// Sampled event histograms (seed + index per projection) alongside the
    /// expected counts.
    pub fn counts_table(&self) -> Result<String> {
        let ins = &self.scenario.config.instrument;
        let seed = self.scenario.seed();
        let mut cols: Vec<(String, Vec<String>)> = Vec::new();
        let mut edges = Vec::new();
        let mut meta = String::new();
        for (j, (label, spec)) in self.projections()?.iter().enumerate() {
            let r = project_spec(&self.jsa, spec)?;
            let ideal = conditional_spectrum(&r)?;
            let s = seed.wrapping_add(j as u64);
            let (binned, rec) =
                simulate_measurement(&ideal, &self.scenario.instrument, ins.bin_nm, ins.events, s)?;
            let _ = writeln!(meta, "# seed_{label}={s}");
            edges = rec.bin_edges_nm();
            let n = ins.events as f64;
            cols.push((
                format!("expected_{label}"),
                binned.probabilities().iter().map(|p| num(p * n)).collect(),
            ));
            cols.push((
                format!("counts_{label}"),
                rec.counts.iter().map(|c| c.to_string()).collect(),
            ));
        }
        let mut out = self.header("sampled detection events per bin");
        let _ = writeln!(out, "# events={} bin_nm={}", ins.events, num(ins.bin_nm));
        out.push_str(&meta);
        out.push_str("bin_lo_nm,bin_hi_nm,tof_lo_ns,tof_hi_ns");
        for (name, _) in &cols {
            let _ = write!(out, ",{name}");
        }
        out.push('\n');
        let spec = &self.scenario.instrument;
        for k in 0..edges.len().saturating_sub(1) {
            let _ = write!(
                out,
                "{},{},{},{}",
                num(edges[k]),
                num(edges[k + 1]),
                num(tof_map(edges[k] - spec.reference_nm, spec)),
                num(tof_map(edges[k + 1] - spec.reference_nm, spec))
            );
            for (_, c) in &cols {
                let _ = write!(out, ",{}", c[k]);
            }
            out.push('\n');
        }
        Ok(out)
    }

    /// Conditional spectra for `points` angles in [0, π), rebinned to the
    /// instrument bin width: one row per angle.
    pub fn sweep_table(&self, points: usize) -> Result<String> {
        let p = &self.scenario.config.projections;
        let thetas = sweep_angles(points);
        let results = rsp_sweep(&self.jsa, &thetas, p.phi, self.basis)?;
        let bin = self.scenario.config.instrument.bin_nm;
        let spectra = results
            .iter()
            .map(|r| conditional_spectrum(r)?.rebin_to_width(bin))
            .collect::<Result<Vec<_>>>()?;
        let mut out = self.header("conditional spectrum versus projection angle");
        let _ = writeln!(out, "# projection: cos(theta) HG0 + exp(i phi) sin(theta) HG1, phi={}", num(p.phi));
        out.push_str("theta_rad,probability,centroid_nm");
        for l in spectra[0].axis.values() {
            let _ = write!(out, ",{}", num(l));
        }
        out.push('\n');
        for ((t, r), s) in thetas.iter().zip(&results).zip(&spectra) {
            let _ = write!(out, "{},{},{}", num(*t), num(r.probability), num(s.mean()));
            for d in &s.density {
                let _ = write!(out, ",{}", num(*d));
            }
            out.push('\n');
        }
        Ok(out)
    }

    /// Similarity of each enabled case to case 1 per angle, and the case
    /// spectra themselves.
    pub fn cases_tables(&self) -> Result<(String, String)> {
        let c = &self.scenario.config.cases;
        let enabled: Vec<usize> = c.enabled.iter().map(|&n| n as usize).collect();
        let mut sim = self.header("similarity of case spectra to case 1 (coherent state, coherent projection)");
        let _ = writeln!(sim, "# case 1: coherent state, coherent projection; 2: mixed state, coherent projection");
        let _ = writeln!(sim, "# case 3: coherent state, intensity filter; 4: mixed state, intensity filter");
        sim.push_str("theta_rad,case,similarity,best\n");
        let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
        let mut axis = None;
        for &t in &c.thetas {
            let mode = superpose(&bloch_projection(t, c.phi, self.basis), &self.jsa.axis_i)?;
            let spectra = case_spectra(&self.jsa, &self.schmidt, &mode)?;
            let rows = enabled
                .iter()
                .map(|&n| Ok((n, similarity(&spectra[0], &spectra[n - 1])?)))
                .collect::<Result<Vec<_>>>()?;
            let best = rows
                .iter()
                .fold((0, f64::NEG_INFINITY), |b, &(n, v)| if v > b.1 { (n, v) } else { b })
                .0;
            for (n, v) in rows {
                let _ = writeln!(sim, "{},{n},{},{}", num(t), num(v), u8::from(n == best));
                columns.push((format!("case{n}_theta{t:.4}_per_nm"), spectra[n - 1].density.clone()));
            }
            axis = Some(spectra[0].axis.clone());
        }
        let mut spec = self.header("conditional signal spectra per coherence case (unit area)");
        spec.push_str("wavelength_nm");
        for (name, _) in &columns {
            let _ = write!(spec, ",{name}");
        }
        spec.push('\n');
        if let Some(a) = axis {
            for (k, l) in a.values().iter().enumerate() {
                spec.push_str(&num(*l));
                for (_, col) in &columns {
                    let _ = write!(spec, ",{}", num(col[k]));
                }
                spec.push('\n');
            }
        }
        Ok((sim, spec))
    }

    /// Modal density matrices (exact and simulated reconstruction) and their
    /// eigenvalues next to the Schmidt weights.
    pub fn tomography_tables(&self) -> Result<(String, String)> {
        let t = self
            .scenario
            .config
            .tomography
            .as_ref()
            .ok_or_else(|| Error::config("tomography", "section missing"))?;
        let exact = reduced_density_matrix(&self.jsa, self.basis, t.dim)?;
        let set = default_projection_set(self.basis, t.estimate_dim)?;
        let run = simulate_tomography(
            &self.jsa,
            &set,
            t.estimate_dim,
            t.events_per_setting,
            self.scenario.seed(),
        )?;
        let mut mat = self.header("idler modal density matrix in the Hermite-Gauss basis");
        let _ = writeln!(
            mat,
            "# exact: dim={} captured_weight={} truncation_warning={}",
            t.dim,
            num(exact.captured_weight),
            exact.truncation_warning
        );
        let _ = writeln!(
            mat,
            "# estimate: dim={} settings={} events_per_setting={} seed={}",
            t.estimate_dim,
            set.len(),
            t.events_per_setting.map_or("exact".to_string(), |n| n.to_string()),
            self.scenario.seed()
        );
        mat.push_str("source,m,n,re,im\n");
        for (name, m) in [("exact", &exact.matrix), ("estimate", &run.estimate.matrix)] {
            for ((r, c), v) in m.indexed_iter() {
                let _ = writeln!(mat, "{name},{r},{c},{},{}", num(v.re), num(v.im));
            }
        }
        let ev_exact = exact.eigenvalues()?;
        let ev_est = run.estimate.eigenvalues()?;
        let mut eig = self.header("density-matrix eigenvalues and Schmidt weights");
        eig.push_str("k,schmidt_lambda,exact_eigenvalue,estimate_eigenvalue\n");
        for k in 0..t.dim.max(t.estimate_dim) {
            let cell = |v: Option<&f64>| v.map_or(String::new(), |x| num(*x));
            let _ = writeln!(
                eig,
                "{k},{},{},{}",
                cell(self.schmidt.coefficients.get(k)),
                cell(ev_exact.get(k)),
                cell(ev_est.get(k))
            );
        }
        Ok((mat, eig))
    }
}

/// Loads a scenario, writes every requested table into `out_dir` plus a
/// `manifest.txt`, and returns the written paths.
pub fn run_scenario(path: &Path, out_dir: &Path, overrides: &Overrides) -> Result<Vec<PathBuf>> {
    let scenario = Scenario::load(path, overrides)?;
    write_bundle(Pipeline::new(scenario)?, out_dir)
}

pub fn write_bundle(p: Pipeline, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut files: Vec<(String, String)> = Vec::new();
    let s = &p.scenario;
    for o in OUTPUTS {
        if !s.wants(o) {
            continue;
        }
        match o {
            "jsi" => files.push(("jsi.csv".into(), p.jsi_table())),
            "schmidt" => files.push(("schmidt.csv".into(), p.schmidt_table(20))),
            "spectra" => files.push(("spectra.csv".into(), p.spectra_table()?)),
            "counts" => files.push(("counts.csv".into(), p.counts_table()?)),
            "sweep" => files.push((
                "sweep.csv".into(),
                p.sweep_table(s.config.projections.sweep_points)?,
            )),
            "cases" => {
                let (a, b) = p.cases_tables()?;
                files.push(("cases.csv".into(), a));
                files.push(("case_spectra.csv".into(), b));
            }
            "tomography" => {
                let (a, b) = p.tomography_tables()?;
                files.push(("tomography.csv".into(), a));
                files.push(("tomography_eigen.csv".into(), b));
            }
            _ => {}
        }
    }
    let mut manifest = String::new();
    let g = &s.config.grid;
    let (wp, wm) = s.widths_nm();
    let _ = writeln!(manifest, "tool = tmshape {VERSION}");
    let _ = writeln!(manifest, "scenario = {}", s.name());
    let _ = writeln!(manifest, "config_sha256 = {}", sha256_hex(s.source.as_bytes()));
    let _ = writeln!(manifest, "seed = {}", s.config.seed.map_or("none".into(), |v| v.to_string()));
    let _ = writeln!(manifest, "grid = center_nm {} span_nm {} points {}", num(g.center_nm), num(g.span_nm), g.points);
    let _ = writeln!(manifest, "pump_sigma_nm = {}", num(wp));
    let _ = writeln!(manifest, "pm_sigma_nm = {}", num(wm));
    let _ = writeln!(manifest, "schmidt_number = {}", num(p.schmidt.schmidt_number()));
    let _ = writeln!(
        manifest,
        "resolved_config = {}",
        serde_json::to_string(&s.config).map_err(|e| Error::Numerical(e.to_string()))?
    );
    let mut written = Vec::new();
    for (name, body) in &files {
        let path = out_dir.join(name);
        std::fs::write(&path, body)?;
        let _ = writeln!(manifest, "file {name} sha256 {}", sha256_hex(body.as_bytes()));
        written.push(path);
    }
    let path = out_dir.join("manifest.txt");
    std::fs::write(&path, manifest)?;
    written.push(path);
    Ok(written)
}
