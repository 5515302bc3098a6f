//! Run configuration: one scenario per JSON file.

use std::collections::BTreeSet;
use std::ops::Range;
use std::path::{Path, PathBuf};

use branchwise_core::conservation::{Tolerances, Verdict};
use branchwise_core::scenario::{BeamsplitterSpec, BoxExpansionSpec, EquivalenceSpec, PhotonCountingSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "BRANCHWISE_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Box,
    Photon,
    Beamsplitter,
    Equivalence,
    Fuzz,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Box => "box",
            ScenarioKind::Photon => "photon",
            ScenarioKind::Beamsplitter => "beamsplitter",
            ScenarioKind::Equivalence => "equivalence",
            ScenarioKind::Fuzz => "fuzz",
        }
    }
}

/// Unitary family drawn by a fuzz campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Haar blocks on the eigenspaces of a random degenerate `Q`.
    Conserving,
    /// Eigenspace-swapping unitaries that keep `⟨Q⟩` for the drawn state.
    AverageOnly,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Conserving => "conserving",
            Family::AverageOnly => "average-only",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzCampaign {
    pub dims: Range<usize>,
    pub seeds: Range<u64>,
    pub family: Family,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Box(BoxExpansionSpec),
    Photon(PhotonCountingSpec),
    Beamsplitter(BeamsplitterSpec),
    Equivalence(EquivalenceSpec),
    Fuzz(FuzzCampaign),
}

impl Scenario {
    pub fn kind(&self) -> ScenarioKind {
        match self {
            Scenario::Box(_) => ScenarioKind::Box,
            Scenario::Photon(_) => ScenarioKind::Photon,
            Scenario::Beamsplitter(_) => ScenarioKind::Beamsplitter,
            Scenario::Equivalence(_) => ScenarioKind::Equivalence,
            Scenario::Fuzz(_) => ScenarioKind::Fuzz,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub exact_tol: Option<f64>,
    pub avg_tol: Option<f64>,
    pub cluster_tol: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, base: Tolerances<f64>) -> Result<Tolerances<f64>, CliError> {
        let pick = |name: &str, v: Option<f64>, default: f64| match v {
            None => Ok(default),
            Some(x) if x.is_finite() && x > 0.0 => Ok(x),
            Some(x) => Err(CliError::Config(format!("tolerances.{name}: must be positive and finite, got {x}"))),
        };
        Ok(Tolerances {
            exact: pick("exact_tol", self.exact_tol, base.exact)?,
            average: pick("avg_tol", self.avg_tol, base.average)?,
            cluster: pick("cluster_tol", self.cluster_tol, base.cluster)?,
            weight_floor: base.weight_floor,
        })
    }
}

/// Output locations; relative paths resolve against the output directory.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub report: Option<PathBuf>,
    pub results: Option<PathBuf>,
    pub data: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub tolerances: Tolerances<f64>,
    pub seed: u64,
    pub output: OutputPaths,
    /// Verdict every conservation check must reach.
    pub expect: Option<Verdict>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: ScenarioKind,
    parameters: Value,
    #[serde(default)]
    tolerances: ToleranceOverrides,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    output: OutputPaths,
    #[serde(default, rename = "assert")]
    expect: Option<Verdict>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFuzz {
    dims: String,
    seeds: String,
    family: Family,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let located = |field: &str, reason: &dyn std::fmt::Display| {
            let at = line_of_key(text, field).map(|l| format!("line {l}: ")).unwrap_or_default();
            CliError::Config(format!("{at}parameters.{field}: {reason}"))
        };
        let spec_error = |e: branchwise_core::Error| match e {
            branchwise_core::Error::InvalidParameter { field, reason } => located(&field, &reason),
            other => CliError::Config(format!("parameters: {other}")),
        };

        let scenario = match raw.scenario {
            ScenarioKind::Box => {
                let spec: BoxExpansionSpec = parse_parameters(&raw.parameters, text)?;
                spec.validate().map_err(spec_error)?;
                Scenario::Box(spec)
            }
            ScenarioKind::Photon => {
                let spec: PhotonCountingSpec = parse_parameters(&raw.parameters, text)?;
                spec.validate().map_err(spec_error)?;
                Scenario::Photon(spec)
            }
            ScenarioKind::Beamsplitter => {
                let spec: BeamsplitterSpec = parse_parameters(&raw.parameters, text)?;
                spec.validate().map_err(spec_error)?;
                Scenario::Beamsplitter(spec)
            }
            ScenarioKind::Equivalence => {
                let spec: EquivalenceSpec = parse_parameters(&raw.parameters, text)?;
                spec.validate().map_err(spec_error)?;
                Scenario::Equivalence(spec)
            }
            ScenarioKind::Fuzz => {
                let fz: RawFuzz = serde_json::from_value(raw.parameters)
                    .map_err(|e| CliError::Config(format!("parameters: {e}")))?;
                Scenario::Fuzz(FuzzCampaign {
                    dims: parse_dims(&fz.dims).map_err(|r| located("dims", &r))?,
                    seeds: parse_range(&fz.seeds).map_err(|r| located("seeds", &r))?,
                    family: fz.family,
                })
            }
        };
        let cfg = RunConfig {
            tolerances: raw.tolerances.apply(Tolerances::default())?,
            seed: raw.seed,
            output: raw.output,
            expect: raw.expect,
            scenario,
        };
        cfg.check_assertion()?;
        Ok(cfg)
    }

    pub fn check_assertion(&self) -> Result<(), CliError> {
        if self.expect.is_some() && matches!(self.scenario, Scenario::Box(_)) {
            return Err(CliError::Config("assert: the box scenario produces no conservation verdict".into()));
        }
        Ok(())
    }
}

/// Deserializes scenario parameters, rejecting keys the spec type does not know.
fn parse_parameters<S: DeserializeOwned + Serialize>(params: &Value, text: &str) -> Result<S, CliError> {
    let spec: S = serde_json::from_value(params.clone()).map_err(|e| {
        let msg = e.to_string();
        let at = backticked(&msg).and_then(|f| line_of_key(text, f)).map(|l| format!("line {l}: ")).unwrap_or_default();
        CliError::Config(format!("{at}parameters: {msg}"))
    })?;
    if let (Value::Object(given), Value::Object(known)) = (params, serde_json::to_value(&spec).expect("serializable")) {
        let known: BTreeSet<&String> = known.keys().collect();
        if let Some(extra) = given.keys().find(|k| !known.contains(k)) {
            let at = line_of_key(text, extra).map(|l| format!("line {l}: ")).unwrap_or_default();
            return Err(CliError::Config(format!("{at}parameters.{extra}: unknown field")));
        }
    }
    Ok(spec)
}

fn backticked(msg: &str) -> Option<&str> {
    let start = msg.find('`')? + 1;
    let len = msg[start..].find('`')?;
    Some(&msg[start..start + len])
}

/// 1-based line of the first `"key":` in the source.
fn line_of_key(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    let pos = text.find(&needle)?;
    Some(text[..pos].matches('\n').count() + 1)
}

/// `A..B` (half-open) or `A..=B` (inclusive); must be nonempty.
pub fn parse_range(s: &str) -> Result<Range<u64>, String> {
    let bad = || format!("expected A..B or A..=B, got `{s}`");
    let (a, b, inclusive) = if let Some((a, b)) = s.split_once("..=") {
        (a, b, true)
    } else if let Some((a, b)) = s.split_once("..") {
        (a, b, false)
    } else {
        return Err(bad());
    };
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    let end = if inclusive { b.checked_add(1).ok_or_else(bad)? } else { b };
    if end <= a {
        return Err(format!("range `{s}` is empty"));
    }
    Ok(a..end)
}

pub fn parse_dims(s: &str) -> Result<Range<usize>, String> {
    let r = parse_range(s)?;
    if r.start < 2 {
        return Err(format!("dimensions must be at least 2, got `{s}`"));
    }
    if r.end > 257 {
        return Err(format!("dimensions above 256 are not supported, got `{s}`"));
    }
    Ok(r.start as usize..r.end as usize)
}

pub fn format_range<T: std::fmt::Display>(r: &Range<T>) -> String {
    format!("{}..{}", r.start, r.end)
}

/// Output directory from the environment, else the working directory.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}
