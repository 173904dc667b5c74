//! Scenario files: TOML with one table per section.
//!
//! ```toml
//! [pipe]
//! L = 1.0
//! a = 2.0
//! theta = 0.1
//!
//! [feedback]
//! k = 4.0
//!
//! [stationary]
//! u0 = 0.02
//!
//! [disturbance]
//! family = "decaying_burst"   # zero | decaying_burst | compact_burst
//! A = 1e-4
//! f = 1.0
//! gamma = 0.6
//! nu = 1.0
//! C_nu = 2e-8
//! T_period = 1.0
//! seed = 7
//! phase = 0.0                 # optional, radians
//!
//! [initial]
//! family = "bump"             # zero | bump
//! amplitude = 1e-4
//! center = 0.5
//! width = 0.25
//!
//! [solver]
//! nx = 400
//! cfl = 0.45                  # optional
//! t_end = 20.0
//! snapshot_dt = 0.1
//!
//! [certificate]
//! lambda = 0.6
//!
//! [output]
//! csv_path = "run.csv"
//! report_path = "run.txt"
//! ```
//!
//! Relative output paths are resolved against the directory of the scenario
//! file. Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use pipestab::{
    DisturbanceFamily, DisturbanceSpec, InitialData, PipeParams, Scenario, SolverConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub pipe: PipeSection,
    pub feedback: FeedbackSection,
    pub stationary: StationarySection,
    pub disturbance: DisturbanceSection,
    pub initial: InitialSection,
    pub solver: SolverSection,
    pub certificate: CertificateSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipeSection {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "a")]
    pub sound_speed: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackSection {
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationarySection {
    pub u0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceSection {
    pub family: DisturbanceFamily,
    #[serde(rename = "A", default)]
    pub amplitude: f64,
    #[serde(rename = "f", default)]
    pub frequency: f64,
    #[serde(default)]
    pub gamma: f64,
    pub nu: f64,
    #[serde(rename = "C_nu")]
    pub c_nu: f64,
    #[serde(rename = "T_period")]
    pub t_period: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialFamily {
    Zero,
    Bump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub family: InitialFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub nx: usize,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub t_end: f64,
    pub snapshot_dt: f64,
    /// Abort when `max |u|` exceeds this value; defaults to the sound speed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<f64>,
}

fn default_cfl() -> f64 {
    SolverConfig::DEFAULT_CFL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateSection {
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub csv_path: PathBuf,
    pub report_path: PathBuf,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_value(value: toml::Value) -> anyhow::Result<Self> {
        Ok(value.try_into()?)
    }

    pub fn to_toml_string(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Builds the validated scenario. Errors name the offending key.
    pub fn to_scenario(&self) -> anyhow::Result<Scenario> {
        let params = PipeParams::new(
            self.pipe.length,
            self.pipe.sound_speed,
            self.pipe.theta,
            self.feedback.k,
        )?;
        let d = &self.disturbance;
        let disturbance = DisturbanceSpec {
            family: d.family,
            amplitude: d.amplitude,
            frequency: d.frequency,
            decay: d.gamma,
            phase: d.phase,
            nu: d.nu,
            c_nu: d.c_nu,
            t_period: d.t_period,
            horizon: self.solver.t_end,
            seed: d.seed,
        };
        let initial = match self.initial.family {
            InitialFamily::Zero => InitialData::Zero,
            InitialFamily::Bump => {
                let need = |v: Option<f64>, key: &str| {
                    v.ok_or_else(|| {
                        anyhow!("missing `initial.{key}`: required for the bump family")
                    })
                };
                InitialData::Bump {
                    amplitude: need(self.initial.amplitude, "amplitude")?,
                    center: need(self.initial.center, "center")?,
                    width: need(self.initial.width, "width")?,
                }
            }
        };
        let scenario = Scenario {
            params,
            u0: self.stationary.u0,
            disturbance,
            initial,
            solver: SolverConfig {
                nx: self.solver.nx,
                cfl: self.solver.cfl,
                t_end: self.solver.t_end,
                snapshot_dt: self.solver.snapshot_dt,
                guard: self.solver.guard,
            },
            lambda: self.certificate.lambda,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Output paths with relative entries anchored at `base`.
    pub fn resolve_outputs(&self, base: &Path) -> OutputPaths {
        let anchor = |p: &Path| {
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        let csv = anchor(&self.output.csv_path);
        let report = anchor(&self.output.report_path);
        let summary = summary_path(&report);
        OutputPaths {
            csv,
            report,
            summary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub report: PathBuf,
    /// Machine-readable copy of the report, next to it.
    pub summary: PathBuf,
}

impl OutputPaths {
    /// Per-run variants used by sweeps: `run.csv` becomes `run.0003.csv`.
    pub fn for_run(&self, id: usize) -> OutputPaths {
        let csv = with_tag(&self.csv, &format!("{id:04}"));
        let report = with_tag(&self.report, &format!("{id:04}"));
        let summary = summary_path(&report);
        OutputPaths {
            csv,
            report,
            summary,
        }
    }
}

fn summary_path(report: &Path) -> PathBuf {
    if report.extension().is_some_and(|e| e == "json") {
        with_tag(report, "summary")
    } else {
        report.with_extension("json")
    }
}

fn with_tag(path: &Path, tag: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

/// Reads a scenario file as a raw TOML document plus its directory.
pub fn read_document(path: &Path) -> anyhow::Result<(toml::Value, PathBuf)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: toml::Value =
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((value, base))
}

pub fn load(path: &Path) -> anyhow::Result<(ScenarioConfig, PathBuf)> {
    let (value, base) = read_document(path)?;
    let config = ScenarioConfig::from_value(value)
        .with_context(|| format!("invalid scenario {}", path.display()))?;
    Ok((config, base))
}

/// Sets the dotted `key` in `doc` from its textual form. An existing entry
/// keeps its TOML type; a new entry is typed from the text itself.
pub fn set_dotted(doc: &mut toml::Value, key: &str, raw: &str) -> anyhow::Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let Some(leaf) = parts.pop() else {
        bail!("empty override key");
    };
    if leaf.is_empty() || parts.iter().any(|p| p.is_empty()) {
        bail!("malformed override key `{key}`");
    }
    let mut table = doc
        .as_table_mut()
        .ok_or_else(|| anyhow!("scenario document is not a table"))?;
    for section in parts {
        table = table
            .get_mut(section)
            .and_then(toml::Value::as_table_mut)
            .ok_or_else(|| anyhow!("override `{key}`: no section `{section}`"))?;
    }
    let parsed = match table.get(leaf) {
        Some(existing) => {
            typed_like(existing, raw).with_context(|| format!("override `{key}` = `{raw}`"))?
        }
        None => infer(raw),
    };
    table.insert(leaf.to_string(), parsed);
    Ok(())
}

fn typed_like(existing: &toml::Value, raw: &str) -> anyhow::Result<toml::Value> {
    use toml::Value;
    Ok(match existing {
        Value::Integer(_) => Value::Integer(raw.parse().context("expected an integer")?),
        Value::Float(_) => Value::Float(raw.parse().context("expected a number")?),
        Value::Boolean(_) => Value::Boolean(raw.parse().context("expected true or false")?),
        Value::String(_) => Value::String(raw.to_string()),
        _ => bail!("only scalar entries can be overridden"),
    })
}

fn infer(raw: &str) -> toml::Value {
    use toml::Value;
    if let Ok(i) = raw.parse::<i64>() {
        Value::Integer(i)
    } else if let Ok(x) = raw.parse::<f64>() {
        Value::Float(x)
    } else if let Ok(b) = raw.parse::<bool>() {
        Value::Boolean(b)
    } else {
        Value::String(raw.to_string())
    }
}
