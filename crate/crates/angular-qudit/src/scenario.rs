//! Scenario files: one JSON document describing a mask, a pathway state, a
//! source spectrum and what to compute from them.

use std::path::Path;

use angular_qudit_core::{
    asymmetric_mixed_state, normalization_constant, pure_qudit_state, AngularMask, DensityMatrix, MaskCheck,
    PathwayStateParams, PhaseConvention, RateNormalization, SpiralSpectrum,
};
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest |l| accepted anywhere in a scan.
pub const MAX_ABS_L: i64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub mask: MaskSpec,
    pub state: StateSpec,
    #[serde(default)]
    pub spectrum: SpectrumSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSpec>,
    #[serde(default)]
    pub outputs: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskSpec {
    /// Signal slit count `N`.
    pub slits: usize,
    /// Idler slit count `M`; defaults to `N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idler_slits: Option<usize>,
    pub alpha: Angle,
    pub beta: Angle,
    #[serde(default)]
    pub check: CheckSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckSpec {
    #[default]
    Budget,
    NonOverlapping,
    Unchecked,
}

impl CheckSpec {
    fn to_core(self) -> MaskCheck {
        match self {
            CheckSpec::Budget => MaskCheck::Budget,
            CheckSpec::NonOverlapping => MaskCheck::NonOverlapping,
            CheckSpec::Unchecked => MaskCheck::Unchecked,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    #[serde(default)]
    pub model: StateModel,
    pub visibility: f64,
    #[serde(default = "zero_angle")]
    pub phase: Angle,
    /// Populations of the symmetric model; uniform if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub convention: ConventionSpec,
}

fn zero_angle() -> Angle {
    Angle::pi_fraction(0, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateModel {
    /// `|s,n>|i,n>` pathways with coherence `V`.
    #[default]
    Symmetric,
    /// Werner-like state over all `N x M` pathways.
    Mixed,
}

impl StateModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            StateModel::Symmetric => "symmetric",
            StateModel::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionSpec {
    #[default]
    Ladder,
    Uniform,
}

impl ConventionSpec {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConventionSpec::Ladder => "ladder",
            ConventionSpec::Uniform => "uniform",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub kind: SpectrumKind,
    pub truncation: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl Default for SpectrumSpec {
    fn default() -> Self {
        SpectrumSpec {
            kind: SpectrumKind::Uniform,
            truncation: 10,
            sigma: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    Uniform,
    Gaussian,
}

impl SpectrumKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpectrumKind::Uniform => "uniform",
            SpectrumKind::Gaussian => "gaussian",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub l_i: Vec<i64>,
    /// Inclusive `[min, max]`.
    pub l_s: [i64; 2],
    #[serde(default)]
    pub normalization: NormalizationSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationSpec {
    #[default]
    Peak,
    Raw,
}

impl NormalizationSpec {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormalizationSpec::Peak => "peak",
            NormalizationSpec::Raw => "raw",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<Angle>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    Beta,
    Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessSpec {
    #[serde(default = "default_l_max")]
    pub l_max: i64,
    #[serde(default)]
    pub embedding: Embedding,
    #[serde(default)]
    pub measurements: MeasurementKind,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    /// Operator count for `random` measurements.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_verify_tolerance")]
    pub verify_tolerance: f64,
    /// Largest total dimension `d_s d_i` allowed.
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
}

fn default_l_max() -> i64 {
    1
}
fn default_top_k() -> usize {
    4
}
fn default_tolerance() -> f64 {
    1e-8
}
fn default_max_iterations() -> usize {
    120
}
fn default_verify_tolerance() -> f64 {
    1e-8
}
fn default_max_dim() -> usize {
    49
}

impl Default for WitnessSpec {
    fn default() -> Self {
        WitnessSpec {
            l_max: default_l_max(),
            embedding: Embedding::default(),
            measurements: MeasurementKind::default(),
            top_k: default_top_k(),
            count: None,
            tolerance: default_tolerance(),
            max_iterations: default_max_iterations(),
            verify_tolerance: default_verify_tolerance(),
            max_dim: default_max_dim(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Embedding {
    /// Slit `n` becomes OAM mode `l_s = n - N/2`, `l_i = -(m - M/2)`.
    #[default]
    Direct,
    /// Full expansion through the slit diffraction amplitudes.
    Diffraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementKind {
    /// Local tomography basis on both sides.
    Complete,
    /// Joint OAM projectors only.
    Diagonal,
    /// OAM projectors plus superpositions of the most populated cells.
    #[default]
    Adaptive,
    /// Random local rank-one projectors drawn from `--seed`.
    Random,
}

impl MeasurementKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeasurementKind::Complete => "complete",
            MeasurementKind::Diagonal => "diagonal",
            MeasurementKind::Adaptive => "adaptive",
            MeasurementKind::Random => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// File name stem; defaults to the scenario name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<FileFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FileFormat {
    Csv,
    Json,
}

/// One fully validated evaluation point of a scenario.
#[derive(Debug, Clone)]
pub struct Case {
    /// Appended to the output stem; empty without a sweep.
    pub suffix: String,
    pub beta: Angle,
    pub phase: Angle,
    pub mask_s: AngularMask,
    pub mask_i: AngularMask,
    pub state: DensityMatrix,
    pub spectrum: SpiralSpectrum,
    /// Rate normalization resolved for this case, if the scenario scans.
    pub normalization: Option<RateNormalization>,
}

fn invalid(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::validation(format!("`{field}`: {reason}"))
}

fn core_invalid(field: &str) -> impl Fn(angular_qudit_core::Error) -> CliError + '_ {
    move |e| match e {
        angular_qudit_core::Error::NumericalInconsistency { .. } => CliError::from(e),
        _ => invalid(field, e),
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let scenario: Scenario = serde_json::from_str(text)
            .map_err(|e| CliError::validation(format!("scenario does not parse: {e}")))?;
        scenario.check_header()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn stem(&self) -> &str {
        self.outputs.stem.as_deref().unwrap_or(&self.name)
    }

    pub fn idler_slits(&self) -> usize {
        self.mask.idler_slits.unwrap_or(self.mask.slits)
    }

    fn check_header(&self) -> CliResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        check_file_stem("name", &self.name)?;
        if let Some(stem) = &self.outputs.stem {
            check_file_stem("outputs.stem", stem)?;
        }
        Ok(())
    }

    /// Checks every parameter and builds all cases before anything is
    /// computed.
    pub fn cases(&self) -> CliResult<Vec<Case>> {
        self.check_header()?;
        let spectrum = self.spectrum()?;
        if let Some(scan) = &self.scan {
            check_scan(scan)?;
        }
        if let Some(w) = &self.witness {
            check_witness(w)?;
        }
        let points: Vec<(String, Angle, Angle)> = match &self.sweep {
            None => vec![(String::new(), self.mask.beta.clone(), self.state.phase.clone())],
            Some(sweep) => {
                if sweep.values.is_empty() {
                    return Err(invalid("sweep.values", "need at least one value"));
                }
                let mut seen = Vec::new();
                let mut points = Vec::new();
                for v in &sweep.values {
                    let (key, beta, phase) = match sweep.parameter {
                        SweepParameter::Beta => ("beta", v.clone(), self.state.phase.clone()),
                        SweepParameter::Phase => ("theta", self.mask.beta.clone(), v.clone()),
                    };
                    let suffix = format!("_{key}-{}", v.slug());
                    if seen.contains(&suffix) {
                        return Err(invalid("sweep.values", format!("duplicate value {v}")));
                    }
                    seen.push(suffix.clone());
                    points.push((suffix, beta, phase));
                }
                points
            }
        };
        points
            .into_iter()
            .map(|(suffix, beta, phase)| self.case(suffix, beta, phase, &spectrum))
            .collect()
    }

    fn spectrum(&self) -> CliResult<SpiralSpectrum> {
        let s = &self.spectrum;
        match (s.kind, s.sigma) {
            (SpectrumKind::Uniform, None) => {
                SpiralSpectrum::uniform(s.truncation).map_err(core_invalid("spectrum.truncation"))
            }
            (SpectrumKind::Uniform, Some(_)) => Err(invalid(
                "spectrum.sigma",
                "only a gaussian spectrum takes a width",
            )),
            (SpectrumKind::Gaussian, None) => {
                Err(invalid("spectrum.sigma", "a gaussian spectrum needs a width"))
            }
            (SpectrumKind::Gaussian, Some(sigma)) => {
                SpiralSpectrum::gaussian(s.truncation, sigma).map_err(core_invalid("spectrum"))
            }
        }
    }

    fn case(&self, suffix: String, beta: Angle, phase: Angle, spectrum: &SpiralSpectrum) -> CliResult<Case> {
        let m = &self.mask;
        let check = m.check.to_core();
        let mask_s = AngularMask::with_check(m.slits, m.alpha.value(), beta.value(), check)
            .map_err(core_invalid("mask"))?;
        let mask_i = AngularMask::with_check(self.idler_slits(), m.alpha.value(), beta.value(), check)
            .map_err(core_invalid("mask.idler_slits"))?;
        let st = &self.state;
        let state = match st.model {
            StateModel::Symmetric => {
                if self.idler_slits() != m.slits {
                    return Err(invalid(
                        "mask.idler_slits",
                        "the symmetric state needs equal slit counts; use the mixed model",
                    ));
                }
                let mut params = PathwayStateParams::uniform(m.slits, st.visibility, phase.value());
                if let Some(w) = &st.weights {
                    if w.len() != m.slits {
                        return Err(invalid(
                            "state.weights",
                            format!("expected {} populations, got {}", m.slits, w.len()),
                        ));
                    }
                    params.weights = w.clone();
                }
                params.convention = match st.convention {
                    ConventionSpec::Ladder => PhaseConvention::Ladder,
                    ConventionSpec::Uniform => PhaseConvention::Uniform,
                };
                pure_qudit_state(&params).map_err(core_invalid("state"))?
            }
            StateModel::Mixed => {
                if st.weights.is_some() {
                    return Err(invalid(
                        "state.weights",
                        "the mixed model has uniform populations",
                    ));
                }
                if st.convention != ConventionSpec::Ladder {
                    return Err(invalid(
                        "state.convention",
                        "the mixed model has a single phase ladder",
                    ));
                }
                asymmetric_mixed_state(m.slits, self.idler_slits(), st.visibility, phase.value())
                    .map_err(core_invalid("state"))?
            }
        };
        let normalization = match &self.scan {
            None => None,
            Some(scan) => Some(match scan.normalization {
                NormalizationSpec::Peak => RateNormalization::PeakNormalized,
                NormalizationSpec::Raw => RateNormalization::Raw {
                    normalization_constant: normalization_constant(&state, &mask_s, &mask_i, spectrum)
                        .map_err(core_invalid("scan.normalization"))?,
                },
            }),
        };
        Ok(Case {
            suffix,
            beta,
            phase,
            mask_s,
            mask_i,
            state,
            spectrum: spectrum.clone(),
            normalization,
        })
    }
}

fn check_file_stem(field: &str, s: &str) -> CliResult<()> {
    if s.is_empty() || s.len() > 100 {
        return Err(invalid(field, "must be 1 to 100 characters"));
    }
    if !s
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
    {
        return Err(invalid(
            field,
            format!("{s:?} may only contain letters, digits, '-' and '_'"),
        ));
    }
    Ok(())
}

fn check_scan(scan: &ScanSpec) -> CliResult<()> {
    if scan.l_i.is_empty() {
        return Err(invalid("scan.l_i", "need at least one idler OAM value"));
    }
    let [lo, hi] = scan.l_s;
    if lo > hi {
        return Err(invalid(
            "scan.l_s",
            format!("lower bound {lo} exceeds upper bound {hi}"),
        ));
    }
    if lo.abs() > MAX_ABS_L || hi.abs() > MAX_ABS_L {
        return Err(invalid("scan.l_s", format!("|l_s| must not exceed {MAX_ABS_L}")));
    }
    if let Some(l) = scan.l_i.iter().find(|l| l.abs() > MAX_ABS_L) {
        return Err(invalid("scan.l_i", format!("|{l}| exceeds {MAX_ABS_L}")));
    }
    let mut sorted = scan.l_i.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != scan.l_i.len() {
        return Err(invalid("scan.l_i", "values must be distinct"));
    }
    Ok(())
}

fn check_witness(w: &WitnessSpec) -> CliResult<()> {
    if w.l_max < 0 || w.l_max > 50 {
        return Err(invalid(
            "witness.l_max",
            format!("must lie in [0, 50], got {}", w.l_max),
        ));
    }
    let side = (2 * w.l_max + 1) as usize;
    if side * side > w.max_dim {
        return Err(invalid(
            "witness.l_max",
            format!(
                "dimension {} exceeds witness.max_dim = {}",
                side * side,
                w.max_dim
            ),
        ));
    }
    if w.top_k < 2 && w.measurements == MeasurementKind::Adaptive {
        return Err(invalid("witness.top_k", "need at least two cells to superpose"));
    }
    match (w.measurements, w.count) {
        (MeasurementKind::Random, None) => {
            return Err(invalid(
                "witness.count",
                "random measurements need an operator count",
            ))
        }
        (MeasurementKind::Random, Some(0)) => return Err(invalid("witness.count", "must be positive")),
        (MeasurementKind::Random, Some(_)) => {}
        (_, Some(_)) => return Err(invalid("witness.count", "only random measurements take a count")),
        (_, None) => {}
    }
    if !(w.tolerance > 0.0 && w.tolerance < 1.0) {
        return Err(invalid("witness.tolerance", "must lie in (0, 1)"));
    }
    if !(w.verify_tolerance > 0.0 && w.verify_tolerance < 1.0) {
        return Err(invalid("witness.verify_tolerance", "must lie in (0, 1)"));
    }
    if w.max_iterations == 0 {
        return Err(invalid("witness.max_iterations", "must be positive"));
    }
    Ok(())
}
