use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use tmshape::bundle::{run_scenario, write_bundle};
use tmshape::{Error, Overrides, Pipeline, Result, Scenario};

const STATE_A: &str = include_str!("../../../scenarios/state_a.cfg");
const STATE_B: &str = include_str!("../../../scenarios/state_b.cfg");

/// Two-photon spectral mode simulator: JSA, Schmidt modes, mode-selective
/// projection, instrument response and modal tomography.
#[derive(Parser, Debug)]
#[command(name = "tmshape", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a full scenario and write the CSV bundle plus manifest.
    Run(Common),
    /// Joint spectral intensity matrix.
    Jsa(Common),
    /// Schmidt coefficients.
    Schmidt {
        #[command(flatten)]
        common: Common,
        /// Number of coefficients to list.
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Conditional signal spectra (ideal and blurred); sampled counts with --out.
    Project {
        #[command(flatten)]
        common: Common,
        /// Superposition angle; replaces the configured projections. Repeatable.
        #[arg(long, allow_hyphen_values = true)]
        theta: Vec<f64>,
    },
    /// Conditional spectra over evenly spaced angles in [0, π).
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Similarity of the four coherence cases to the coherent reference.
    Cases {
        #[command(flatten)]
        common: Common,
        /// Repeatable.
        #[arg(long, allow_hyphen_values = true)]
        theta: Vec<f64>,
        /// Restrict to these cases. Repeatable.
        #[arg(long = "case", value_parser = clap::value_parser!(u8).range(1..=4))]
        cases: Vec<u8>,
    },
    /// Reduced density matrix in the Hermite-Gauss basis and a simulated
    /// reconstruction.
    Tomo(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Scenario file, or `state_a` / `state_b` for the bundled ones.
    #[arg(long, default_value = "state_b")]
    scenario: String,
    /// Output directory; tables go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid points per axis.
    #[arg(long)]
    grid: Option<usize>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            grid_points: self.grid,
            ..Overrides::default()
        }
    }
}

fn bundled(name: &str) -> Option<&'static str> {
    match name.trim_end_matches(".cfg") {
        "state_a" => Some(STATE_A),
        "state_b" => Some(STATE_B),
        _ => None,
    }
}

fn load(common: &Common, overrides: &Overrides) -> Result<Scenario> {
    let path = Path::new(&common.scenario);
    if path.exists() {
        Scenario::load(path, overrides)
    } else if let Some(text) = bundled(&common.scenario) {
        info!("using bundled scenario {}", common.scenario);
        Scenario::from_text(text, overrides)
    } else {
        Err(Error::Config {
            field: "scenario".into(),
            message: format!("no such file `{}`", common.scenario),
        })
    }
}

fn emit(out: &Option<PathBuf>, tables: &[(&str, String)]) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for (name, body) in tables {
                let path = dir.join(name);
                std::fs::write(&path, body)?;
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for (_, body) in tables {
                stdout.write_all(body.as_bytes())?;
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Command::Run(c) => {
            let out = c.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let path = Path::new(&c.scenario);
            let files = if path.exists() {
                run_scenario(path, &out, &c.overrides())?
            } else {
                write_bundle(Pipeline::new(load(&c, &c.overrides())?)?, &out)?
            };
            for f in files {
                println!("{}", f.display());
            }
        }
        Command::Jsa(c) => {
            let p = Pipeline::new(load(&c, &c.overrides())?)?;
            emit(&c.out, &[("jsi.csv", p.jsi_table())])?;
        }
        Command::Schmidt { common: c, top } => {
            let p = Pipeline::new(load(&c, &c.overrides())?)?;
            emit(&c.out, &[("schmidt.csv", p.schmidt_table(top))])?;
        }
        Command::Project { common: c, theta } => {
            let mut o = c.overrides();
            if !theta.is_empty() {
                o.projection_thetas = Some(theta);
            }
            let p = Pipeline::new(load(&c, &o)?)?;
            let mut tables = vec![("spectra.csv", p.spectra_table()?)];
            if c.out.is_some() && p.scenario.wants("counts") {
                tables.push(("counts.csv", p.counts_table()?));
            }
            emit(&c.out, &tables)?;
        }
        Command::Sweep { common: c, points } => {
            let p = Pipeline::new(load(&c, &c.overrides())?)?;
            let n = points.unwrap_or(p.scenario.config.projections.sweep_points);
            if n == 0 {
                return Err(Error::Config {
                    field: "points".into(),
                    message: "give --points or set projections.sweep_points".into(),
                });
            }
            emit(&c.out, &[("sweep.csv", p.sweep_table(n)?)])?;
        }
        Command::Cases {
            common: c,
            theta,
            cases,
        } => {
            let mut o = c.overrides();
            if !theta.is_empty() {
                o.case_thetas = Some(theta);
            }
            if !cases.is_empty() {
                o.cases_enabled = Some(cases);
            }
            let p = Pipeline::new(load(&c, &o)?)?;
            if p.scenario.config.cases.thetas.is_empty() {
                return Err(Error::Config {
                    field: "theta".into(),
                    message: "give --theta or set cases.thetas".into(),
                });
            }
            let (sim, spectra) = p.cases_tables()?;
            let mut tables = vec![("cases.csv", sim)];
            if c.out.is_some() {
                tables.push(("case_spectra.csv", spectra));
            }
            emit(&c.out, &tables)?;
        }
        Command::Tomo(c) => {
            let p = Pipeline::new(load(&c, &c.overrides())?)?;
            let (mat, eig) = p.tomography_tables()?;
            emit(&c.out, &[("tomography.csv", mat), ("tomography_eigen.csv", eig)])?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            warn!("{e:?}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
