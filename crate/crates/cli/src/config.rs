//! Experiment configuration: TOML on disk, overrides applied on the parsed
//! tree, then typed and validated.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    BornEquivalence,
    GleasonFit,
    SupportImplication,
    OperatorId,
    CoarseGrain,
    Overlap,
    KsColor,
    Dilation,
    Triviality,
    Macroreal,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::BornEquivalence => "born-equivalence",
            ExperimentKind::GleasonFit => "gleason-fit",
            ExperimentKind::SupportImplication => "support-implication",
            ExperimentKind::OperatorId => "operator-id",
            ExperimentKind::CoarseGrain => "coarse-grain",
            ExperimentKind::Overlap => "overlap",
            ExperimentKind::KsColor => "ks-color",
            ExperimentKind::Dilation => "dilation",
            ExperimentKind::Triviality => "triviality",
            ExperimentKind::Macroreal => "macroreal",
        }
    }
}

/// A vector component: a real number or `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Component {
    Real(f64),
    Complex([f64; 2]),
}

/// A list of kets: drawn at random, given explicitly, or given as Bloch
/// vectors (qubits only).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateBattery {
    Random { random: usize },
    Explicit { explicit: Vec<Vec<Component>> },
    Bloch { bloch: Vec<[f64; 3]> },
    File { file: PathBuf },
}

/// A list of complete projective measurements: random bases, explicit
/// bases, or qubit measurement axes `{c, −c}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasurementBattery {
    Random { random: usize },
    Bases { bases: Vec<Vec<Vec<Component>>> },
    Axes { axes: Vec<[f64; 3]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MethodSpec {
    /// `"quadrature"` (order 64×128) or `"exact"`, a synonym.
    Named(String),
    Quadrature {
        quadrature: [usize; 2],
    },
    MonteCarlo {
        monte_carlo: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// `bb`, `ks`, `toy`, `extended-bb`, `extended-dup` or `macrorealist`.
    pub name: String,
    pub dim: Option<usize>,
    /// Toy model: its rays.
    pub rays: Option<StateBattery>,
    /// Toy model: copies per ray.
    pub copies: Option<usize>,
    /// Toy model: weights over the copies for each preparation context.
    pub contexts: Option<BTreeMap<String, Vec<f64>>>,
    /// Macrorealist device: the two pointer kets.
    pub pointers: Option<Vec<Vec<Component>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: Option<String>,
    pub kind: ExperimentKind,
    pub model: Option<ModelSpec>,
    pub states: Option<StateBattery>,
    pub measurements: Option<MeasurementBattery>,
    pub method: Option<MethodSpec>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    /// Ontic samples per preparation for sampled checks.
    pub samples: Option<usize>,
    /// Random projector budget for fits and scans.
    pub projectors: Option<usize>,
    /// Preparation contexts; defaults to the model's declared ones.
    pub contexts: Option<Vec<String>>,
    /// `ks-color`: vector-set file; the bundled set when absent.
    pub vector_set: Option<PathBuf>,
    /// `dilation`: random dilation instances.
    pub instances: Option<usize>,
    /// `macroreal`: branch amplitudes.
    pub amplitudes: Option<[f64; 2]>,
    /// `macroreal`: the two pointer kets; computational qubit states by default.
    pub pointers: Option<Vec<Vec<Component>>>,
    /// Expected outcome where the experiment has one: `sat`/`unsat`,
    /// `trivial`/`non-trivial`, `contradiction`/`feasible`,
    /// `trace-form`/`not-trace-form`.
    pub expect: Option<String>,
    /// `macroreal`: expected violating value.
    pub expected_value: Option<f64>,
}

impl ExperimentConfig {
    pub fn label(&self, index: usize) -> String {
        self.id
            .clone()
            .unwrap_or_else(|| format!("{:02}-{}", index, self.kind.as_str()))
    }

    /// Whether any part of the experiment draws random numbers.
    pub fn randomized(&self) -> Option<&'static str> {
        let random_states =
            |b: &Option<StateBattery>| matches!(b, Some(StateBattery::Random { .. }));
        if random_states(&self.states) {
            return Some("the state battery is random");
        }
        if matches!(self.measurements, Some(MeasurementBattery::Random { .. })) {
            return Some("the measurement battery is random");
        }
        if matches!(self.method, Some(MethodSpec::MonteCarlo { .. })) {
            return Some("the method is Monte Carlo");
        }
        if self.model.as_ref().is_some_and(|m| random_states(&m.rays)) {
            return Some("the model's rays are random");
        }
        match self.kind {
            ExperimentKind::GleasonFit
            | ExperimentKind::SupportImplication
            | ExperimentKind::OperatorId
            | ExperimentKind::CoarseGrain
            | ExperimentKind::Dilation
            | ExperimentKind::Triviality => {
                Some("the experiment samples ontic states or projectors")
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    #[serde(default)]
    experiment: Vec<Value>,
}

/// A parsed, overridden and validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub output_dir: Option<PathBuf>,
    pub experiments: Vec<ExperimentConfig>,
    /// Directory relative paths in the config are resolved against.
    pub base_dir: PathBuf,
    /// Canonical JSON of the effective configuration, hashed into the manifest.
    pub canonical: String,
}

pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse(&text, overrides, base)
}

pub fn parse(
    text: &str,
    overrides: &[(String, String)],
    base_dir: PathBuf,
) -> Result<Config, CliError> {
    let tree: toml::Value = toml::from_str(text)
        .map_err(|e| CliError::Config(format!("config does not parse: {e}")))?;
    let mut value = serde_json::to_value(tree).map_err(|e| CliError::Config(e.to_string()))?;
    for (key, raw) in overrides {
        apply_override(&mut value, key, parse_literal(raw))?;
    }
    from_value(value, base_dir)
}

/// Builds a configuration from an already-assembled JSON tree.
pub fn from_value(value: Value, base_dir: PathBuf) -> Result<Config, CliError> {
    let canonical = serde_json::to_string(&value).expect("json serializes");
    let raw: RawConfig =
        serde_json::from_value(value).map_err(|e| CliError::Config(format!("config: {e}")))?;
    if raw.experiment.is_empty() {
        return Err(CliError::Config("config declares no [[experiment]]".into()));
    }
    let mut experiments = Vec::with_capacity(raw.experiment.len());
    for (i, v) in raw.experiment.into_iter().enumerate() {
        let mut e: ExperimentConfig = serde_json::from_value(v)
            .map_err(|err| CliError::Config(format!("experiment[{i}]: {err}")))?;
        if e.seed.is_none() {
            e.seed = raw.seed;
        }
        validate(&e, i)?;
        experiments.push(e);
    }
    Ok(Config {
        output_dir: raw.output_dir,
        experiments,
        base_dir,
        canonical,
    })
}

fn validate(e: &ExperimentConfig, i: usize) -> Result<(), CliError> {
    let at = format!("experiment[{i}] ({})", e.label(i));
    if let Some(reason) = e.randomized() {
        if e.seed.is_none() {
            return Err(CliError::Config(format!(
                "{at}: missing field `seed`, required because {reason}"
            )));
        }
    }
    if let Some(t) = e.tolerance {
        if t.is_nan() || t <= 0.0 {
            return Err(CliError::Config(format!(
                "{at}: `tolerance` must be positive, got {t}"
            )));
        }
    }
    if let Some(MethodSpec::Named(n)) = &e.method {
        if n != "quadrature" && n != "exact" {
            return Err(CliError::Config(format!("{at}: unknown method `{n}`")));
        }
    }
    let needs_model = !matches!(
        e.kind,
        ExperimentKind::KsColor | ExperimentKind::Dilation | ExperimentKind::Macroreal
    );
    if needs_model && e.model.is_none() {
        return Err(CliError::Config(format!("{at}: missing field `model`")));
    }
    Ok(())
}

/// Override values are read as TOML literals (`3`, `1e-9`, `"x"`, `[1, 2]`),
/// falling back to a bare string.
pub fn parse_literal(raw: &str) -> Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .and_then(|v| serde_json::to_value(v).ok())
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Sets `key_path` (dot-separated; numeric parts index arrays) to `value`,
/// creating intermediate tables.
pub fn apply_override(root: &mut Value, key_path: &str, value: Value) -> Result<(), CliError> {
    let parts: Vec<&str> = key_path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("bad override key `{key_path}`")));
    }
    let mut target = root;
    for (n, part) in parts.iter().enumerate() {
        let last = n + 1 == parts.len();
        target = match target {
            Value::Array(items) => {
                let idx: usize = part.parse().map_err(|_| {
                    CliError::Config(format!("override `{key_path}`: `{part}` is not an index"))
                })?;
                let len = items.len();
                let slot = items.get_mut(idx).ok_or_else(|| {
                    CliError::Config(format!("override `{key_path}`: index {idx} of {len}"))
                })?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.entry(part.to_string())
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            _ => {
                return Err(CliError::Config(format!(
                    "override `{key_path}`: `{part}` is not a table"
                )))
            }
        };
    }
    unreachable!("loop returns on the last part")
}
