//! Run configuration: defaults, config files, `--set` overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CliError;
use crate::analysis::Geometry;
use crate::bodies::{BodyShape, Quantity, UnitSystem};
use crate::dynamics::OrbitalForcing;
use crate::kepler::Orbit;
use crate::potential::{StokesSource, SystemParams};
use crate::solver::{IntegratorConfig, Multistart};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Orbit,
    Lambdas,
    Periodic,
    Floquet,
    Conditions,
    Scan,
    Stokes,
    FullModel,
    ConvertUnits,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Orbit => "orbit",
            Command::Lambdas => "lambdas",
            Command::Periodic => "periodic",
            Command::Floquet => "floquet",
            Command::Conditions => "conditions",
            Command::Scan => "scan",
            Command::Stokes => "stokes",
            Command::FullModel => "full-model",
            Command::ConvertUnits => "convert-units",
        }
    }

    pub fn allows(&self, format: Format) -> bool {
        match format {
            Format::Json | Format::Csv => true,
            Format::Svg => matches!(self, Command::Scan | Command::Periodic),
        }
    }

    fn needs_system(&self) -> bool {
        matches!(
            self,
            Command::Orbit | Command::Lambdas | Command::Periodic | Command::Floquet | Command::Conditions
        )
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Svg,
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

/// A system given inline or as a path to a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSource {
    Path(PathBuf),
    Inline(Value),
}

impl SystemSource {
    /// Relative paths are taken from `base`, the directory of the config file.
    pub fn load(&self, base: Option<&Path>) -> Result<SystemParams, CliError> {
        let value = match self {
            SystemSource::Inline(v) => v.clone(),
            SystemSource::Path(p) => {
                let full = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p.clone(),
                };
                read_json(&full)?
            }
        };
        SystemParams::try_from(value).map_err(|e| CliError::Config(format!("system: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitSection {
    pub samples: usize,
}

impl Default for OrbitSection {
    fn default() -> Self {
        OrbitSection { samples: 129 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeriodicSection {
    pub samples: usize,
    pub multistart: Multistart,
    pub guess: Option<[f64; 2]>,
    /// Dissipation rates; nonzero values continue the conservative solution.
    pub delta: [f64; 2],
}

impl Default for PeriodicSection {
    fn default() -> Self {
        PeriodicSection {
            samples: 129,
            multistart: Multistart::Auto,
            guess: None,
            delta: [0.0; 2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FloquetSection {
    pub delta: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    pub n_e: usize,
    pub e_max: f64,
    pub n_lambda: usize,
    pub lambda_max: f64,
    pub qhat: f64,
    pub geometry: Geometry,
    /// Explicit axes; they replace the uniform grids when present.
    pub e_axis: Option<Vec<f64>>,
    pub lambda_axis: Option<Vec<f64>>,
}

impl Default for ScanSection {
    fn default() -> Self {
        ScanSection {
            n_e: 91,
            e_max: 0.9,
            n_lambda: 100,
            lambda_max: 0.5,
            qhat: 0.0,
            geometry: Geometry::EqualBodies,
            e_axis: None,
            lambda_axis: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StokesSection {
    /// Defaults to both bodies of the system when it carries them.
    pub body: Option<BodyShape>,
    pub l_max: i64,
    pub source: StokesSource,
}

impl Default for StokesSection {
    fn default() -> Self {
        StokesSection {
            body: None,
            l_max: 4,
            source: StokesSource::ClosedForm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FullModelSection {
    pub body1: Option<BodyShape>,
    pub body2: Option<BodyShape>,
    pub orbit: Option<Orbit>,
    pub periods: f64,
    pub samples: usize,
    pub forcing: OrbitalForcing,
    /// Initial spin angles; rates start synchronous with the orbit.
    pub theta: [f64; 2],
    pub theta_dot: Option<[f64; 2]>,
}

impl Default for FullModelSection {
    fn default() -> Self {
        FullModelSection {
            body1: None,
            body2: None,
            orbit: None,
            periods: 10.0,
            samples: 101,
            forcing: OrbitalForcing::Full,
            theta: [0.0; 2],
            theta_dot: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    ToModel,
    FromModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvertSection {
    pub units: Option<UnitSystem>,
    pub quantity: Quantity,
    pub value: f64,
    pub direction: Direction,
}

impl Default for ConvertSection {
    fn default() -> Self {
        ConvertSection {
            units: None,
            quantity: Quantity::Time,
            value: 1.0,
            direction: Direction::ToModel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub system: Option<SystemSource>,
    pub output: OutputConfig,
    pub solver: IntegratorConfig,
    pub threads: Option<usize>,
    pub orbit: OrbitSection,
    pub periodic: PeriodicSection,
    pub floquet: FloquetSection,
    pub scan: ScanSection,
    pub stokes: StokesSection,
    pub full_model: FullModelSection,
    pub convert_units: ConvertSection,
    /// Directory of the config file, for resolving relative paths.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<Command, CliError> {
        let cmd = self
            .command
            .ok_or_else(|| CliError::Config("no command given".into()))?;
        if !cmd.allows(self.output.format) {
            return Err(CliError::Config(format!(
                "format {} is not available for {cmd}",
                self.output.format.as_str()
            )));
        }
        if cmd.needs_system() && self.system.is_none() {
            return Err(CliError::Config(format!("{cmd} needs a system")));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        self.solver
            .validate()
            .map_err(|e| CliError::Config(format!("solver: {e}")))?;
        Ok(cmd)
    }

    pub fn system(&self) -> Result<Option<SystemParams>, CliError> {
        self.system
            .as_ref()
            .map(|s| s.load(self.base_dir.as_deref()))
            .transpose()
    }
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Recursive merge: objects merge key by key, anything else is replaced.
pub fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Applies `a.b.c=value`. The value is parsed as JSON when it can be and
/// taken as a string otherwise.
pub fn apply_set(root: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set expects key=value, got {assignment:?}")))?;
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("bad key {key:?}")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    for p in &parts[..parts.len() - 1] {
        if !node.is_object() {
            *node = Value::Object(Default::default());
        }
        node = node
            .as_object_mut()
            .expect("just made an object")
            .entry(p.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    if !node.is_object() {
        *node = Value::Object(Default::default());
    }
    node.as_object_mut()
        .expect("just made an object")
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// Defaults, then the file, then the `--set` list, in that order.
pub fn layered(file: Option<&Path>, sets: &[String]) -> Result<RunConfig, CliError> {
    let mut v = serde_json::to_value(RunConfig::default()).expect("defaults serialize");
    let base_dir = match file {
        Some(p) => {
            merge(&mut v, read_json(p)?);
            p.parent().map(Path::to_path_buf)
        }
        None => None,
    };
    for s in sets {
        apply_set(&mut v, s)?;
    }
    let mut cfg: RunConfig = serde_json::from_value(v).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.base_dir = base_dir;
    Ok(cfg)
}
