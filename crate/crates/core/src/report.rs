//! JSON document written by `verify`.

use std::path::Path;

use serde::Serialize;

use crate::closedform::FormulaVariant;
use crate::error::{Error, Result};
use crate::format::{serialize_sig, write_atomic};
use crate::identities::{
    CheckName, ConstantEntry, NonInvariance, Profile, Source, VariantSelection, VerificationReport,
};

/// Bumped whenever a field is added, removed or renamed.
pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: CheckName,
    pub source: Source,
    pub points: usize,
    pub tolerance: f64,
    #[serde(serialize_with = "serialize_sig")]
    pub max_residual: f64,
    pub passed: bool,
}

/// Echo of the inputs that shaped the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratedInputs {
    pub profile: Profile,
    pub formula: Option<FormulaVariant>,
    pub grid_points: usize,
    pub r_max: f64,
    pub constants_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema_version: &'static str,
    pub constants_provenance: String,
    pub formula_variant: FormulaVariant,
    pub variant_selection: VariantSelection,
    pub checks: Vec<CheckSummary>,
    pub constants: Vec<ConstantEntry>,
    pub non_invariance: NonInvariance,
    pub overall_pass: bool,
    pub generated_inputs: GeneratedInputs,
}

impl ReportDocument {
    pub fn new(report: &VerificationReport, constants_provenance: &str, generated_inputs: GeneratedInputs) -> Self {
        let checks = report
            .checks
            .iter()
            .map(|c| CheckSummary {
                name: c.name,
                source: c.source,
                points: c.x_values.len(),
                tolerance: c.tolerance,
                max_residual: c.max_residual(),
                passed: c.passed,
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            constants_provenance: constants_provenance.to_string(),
            formula_variant: report.formula_variant,
            variant_selection: report.variant_selection.clone(),
            checks,
            constants: report.constants.clone(),
            non_invariance: report.non_invariance.clone(),
            overall_pass: report.overall_pass,
            generated_inputs,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }
}
