//! End-to-end experiment presets. Every report is plain serializable data
//! with a schema tag and the seed it was run with, and carries no timings,
//! so reruns with the same inputs serialize identically.

mod frobenius;
mod identity;
mod split;
mod witness;


use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::setalg::{DescriptorJson, SetDescriptor, SetError};
use crate::spectral::SpectralError;
use crate::sunit::{OracleParams, SUnitError};
use crate::torusdyn::{return_set, ReturnSetReport, ScanOptions, System, SystemFile, TorusError};

pub use frobenius::{
    frobenius_p_set_system, run_frobenius_p_set, run_frobenius_twist_equality, twist_preset, PSetReport, TwistReport,
};
pub use identity::{run_coefficient_refutation, IdentityReport, IDENTITY_DEGREE_CAP};
pub use split::{
    classify_split_case, run_split_experiment, split_preset, SplitCase, SplitInput, SplitVerdict, TwoSpeedReport,
};
pub use witness::{elimination_polynomial, run_quadratic_witness, unipotent_six, WitnessCheck, WitnessReport};

pub const REPORT_SCHEMA: &str = "pdml.report/1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    SUnit(#[from] SUnitError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("system is not isotrivial: {0}")]
    NotIsotrivial(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("z-degree {needed} exceeds the cap {cap}; use a smaller c")]
    DegreeCap { needed: u64, cap: u64 },
    #[error("experiment spec: {0}")]
    Spec(String),
}

/// A return-set run described by files on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentSpec {
    pub name: String,
    pub prime: u64,
    /// System file, relative to the spec's directory.
    pub system: PathBuf,
    pub window: u64,
    #[serde(default)]
    pub oracle: OracleParams,
    /// Descriptor file the computed return set should match.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct ResolvedSpec {
    pub spec: ExperimentSpec,
    pub system: System,
    pub expected: Option<SetDescriptor>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ExperimentError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| ExperimentError::Spec(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ExperimentError::Spec(format!("{}: {e}", path.display())))
}

impl ExperimentSpec {
    /// Loads the referenced files; `base` is the directory relative paths start from.
    pub fn resolve(&self, base: &Path) -> Result<ResolvedSpec, ExperimentError> {
        let file: SystemFile = read_json(&base.join(&self.system))?;
        if file.p != self.prime {
            return Err(ExperimentError::Spec(format!(
                "spec prime {} does not match the system file's {}",
                self.prime, file.p
            )));
        }
        let system = file.decode()?;
        let expected = match &self.expected {
            Some(path) => {
                let d: DescriptorJson = read_json(&base.join(path))?;
                Some(d.to_descriptor()?)
            }
            None => None,
        };
        Ok(ResolvedSpec { spec: self.clone(), system, expected })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpecReport {
    pub schema: String,
    pub kind: String,
    pub name: String,
    pub seed: u64,
    pub return_set: ReturnSetReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expected: Option<DescriptorJson>,
    /// Indices where the computed set and the expected window differ.
    pub mismatches: Vec<u64>,
    pub pass: bool,
}

pub fn run_spec(resolved: &ResolvedSpec) -> Result<SpecReport, ExperimentError> {
    let opts = ScanOptions { oracle: resolved.spec.oracle, ..ScanOptions::default() };
    let sys = &resolved.system;
    let report = return_set(&sys.map, &sys.start, &sys.equations, resolved.spec.window, &opts)?;
    let mismatches = match &resolved.expected {
        Some(d) => window_mismatches(&report.members(), d, resolved.spec.window),
        None => vec![],
    };
    Ok(SpecReport {
        schema: REPORT_SCHEMA.into(),
        kind: "spec".into(),
        name: resolved.spec.name.clone(),
        seed: resolved.spec.oracle.seed,
        pass: mismatches.is_empty(),
        return_set: report,
        expected: resolved.expected.as_ref().map(DescriptorJson::from_descriptor),
        mismatches,
    })
}

/// Symmetric difference of the computed members and the descriptor's window,
/// with undecided window elements counted as mismatches.
pub fn window_mismatches(members: &[u64], d: &SetDescriptor, n_max: u64) -> Vec<u64> {
    use num_traits::ToPrimitive;
    let w = d.window(n_max);
    let expected: BTreeSet<u64> = w.members.iter().filter_map(|x| x.to_u64()).collect();
    let unknown: BTreeSet<u64> = w.unknown.iter().filter_map(|x| x.to_u64()).collect();
    let got: BTreeSet<u64> = members.iter().copied().collect();
    let mut out: BTreeSet<u64> = expected.symmetric_difference(&got).copied().collect();
    out.extend(unknown);
    out.into_iter().collect()
}
