//! Simulation of engineered two-photon time-frequency entanglement,
//! mode-selective projection of one photon and remote shaping of its
//! partner's spectrum.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod coherence;
pub mod error;
pub mod grid;
pub mod instrument;
pub mod modes;
pub mod pdc;
pub mod projection;
pub mod scenario;
pub mod spectrum;
pub mod tomography;

pub use bundle::{run_scenario, Pipeline};
pub use coherence::{MeasurementModel, StateModel};
pub use error::{Error, Result};
pub use grid::{ComplexAmplitude, FrequencyAxis, JointAmplitude, Normalize};
pub use instrument::{CountRecord, KernelWidth, SpectrometerSpec};
pub use modes::{HermiteGaussSpec, HgBasis, SuperpositionSpec};
pub use pdc::{PhasematchSpec, Photon, PmProfile, PumpSpec, RankCutoff, SchmidtData};
pub use projection::ProjectionResult;
pub use scenario::{Overrides, Scenario, ScenarioConfig};
pub use spectrum::{Spectrum, WavelengthAxis};
pub use tomography::ModalDensityMatrix;
