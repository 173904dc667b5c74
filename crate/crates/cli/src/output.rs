//! Run artifacts: the snapshot CSV, the text report and its JSON twin.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;

use pipestab::certificate::{DecayBounds, Flag, TheoremConstants, Verdict};
use pipestab::disturbance::NoiseReport;
use pipestab::lyapunov::DecayFit;
use pipestab::{RunOutput, StationaryProfile};

use crate::config::{OutputPaths, ScenarioConfig};

pub const CSV_HEADER: [&str; 14] = [
    "t",
    "E1",
    "E",
    "H",
    "E_classic",
    "grad_norm",
    "max_u",
    "u_0",
    "ut_0",
    "ux_0",
    "u_L",
    "b",
    "b_t",
    "hyp_ok",
];

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// One row per snapshot. Windowed columns are empty before the first full
/// window.
pub fn write_run_csv(out: &RunOutput, writer: impl Write) -> anyhow::Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(CSV_HEADER)?;
    let tr = &out.lyapunov;
    let step_ok = &out.report.hypotheses.step_ok;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    for &i in &out.trajectory.snapshot_steps {
        let bt = &out.trajectory.boundary_trace[i];
        let row = [
            num(tr.times[i]),
            num(tr.e1[i]),
            opt(tr.e[i]),
            opt(tr.h[i]),
            num(tr.e_classic[i]),
            num(tr.grad_norm[i]),
            num(out.trajectory.norms[i].max_abs_u),
            num(bt.u_0),
            num(bt.ut_0),
            num(bt.ux_0),
            num(bt.u_l),
            num(bt.b),
            num(bt.b_t),
            u8::from(step_ok[i]).to_string(),
        ];
        csv.write_record(&row)?;
    }
    csv.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisSummary {
    pub all_ok: bool,
    pub gain: Flag,
    pub required_gain: f64,
    pub stationary: Flag,
    pub perturbation: Flag,
    pub noise: Flag,
    pub m1_positive: Flag,
    pub rate_gap: Flag,
    pub u_cap: f64,
    pub worst_jet_ratio: f64,
    pub worst_u_ratio: f64,
}

/// Everything the report states, in the order it is printed.
#[derive(Debug, Clone, Serialize)]
pub struct ReportSummary {
    pub verdict: Verdict,
    pub half_time: f64,
    pub constants: TheoremConstants,
    pub hypotheses: HypothesisSummary,
    pub bounds: DecayBounds,
    pub noise: NoiseReport,
    pub fitted_rate: Option<DecayFit>,
    pub scenario: ScenarioConfig,
}

impl ReportSummary {
    pub fn new(config: &ScenarioConfig, out: &RunOutput) -> Self {
        let r = &out.report;
        let h = &r.hypotheses;
        ReportSummary {
            verdict: r.verdict,
            half_time: r.half_time,
            constants: r.constants,
            hypotheses: HypothesisSummary {
                all_ok: h.all_ok(),
                gain: h.gain,
                required_gain: h.required_gain,
                stationary: h.stationary,
                perturbation: h.perturbation,
                noise: h.noise,
                m1_positive: h.m1_positive,
                rate_gap: h.rate_gap,
                u_cap: h.u_cap,
                worst_jet_ratio: h.worst_jet_ratio,
                worst_u_ratio: h.worst_u_ratio,
            },
            bounds: r.bounds,
            noise: out.noise.clone(),
            fitted_rate: out.fitted,
            scenario: config.clone(),
        }
    }

    pub fn to_json(&self) -> anyhow::Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    /// Human-readable rendering of the same fields as [`Self::to_json`].
    pub fn to_text(&self) -> anyhow::Result<String> {
        let value = serde_json::to_value(self)?;
        let mut text = String::from("pipestab certificate report\n");
        let Value::Object(fields) = value else {
            unreachable!("summary serializes to an object")
        };
        for (name, field) in fields {
            match field {
                Value::Object(_) => {
                    writeln!(text, "\n[{name}]")?;
                    render_flat(&mut text, "", &field)?;
                }
                scalar => writeln!(text, "{name} = {}", scalar_text(&scalar))?,
            }
        }
        Ok(text)
    }
}

/// `key = value` lines for every leaf of `value`, nested keys dotted.
pub fn render_flat(text: &mut String, prefix: &str, value: &Value) -> std::fmt::Result {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                render_flat(text, &key, v)?;
            }
            Ok(())
        }
        leaf => writeln!(text, "{prefix} = {}", scalar_text(leaf)),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => "none".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn ensure_parent(path: &Path) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

pub fn write_text(path: &Path, contents: &str) -> anyhow::Result<()> {
    ensure_parent(path)?;
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Writes the CSV, the text report and the JSON summary of one run.
pub fn write_artifacts(
    paths: &OutputPaths,
    config: &ScenarioConfig,
    out: &RunOutput,
) -> anyhow::Result<ReportSummary> {
    ensure_parent(&paths.csv)?;
    let file =
        fs::File::create(&paths.csv).with_context(|| format!("writing {}", paths.csv.display()))?;
    write_run_csv(out, std::io::BufWriter::new(file))?;
    let summary = ReportSummary::new(config, out);
    write_text(&paths.report, &summary.to_text()?)?;
    write_text(&paths.summary, &summary.to_json()?)?;
    Ok(summary)
}

pub fn constants_text(constants: &TheoremConstants) -> anyhow::Result<String> {
    let mut text = String::new();
    render_flat(&mut text, "", &serde_json::to_value(constants)?)?;
    Ok(text)
}

pub fn profile_table(profile: &StationaryProfile) -> String {
    let mut text = format!(
        "# u0 = {}, c1 = {}, L_crit = {}\nx,ubar,ubar_x\n",
        num(profile.u0),
        num(profile.c1),
        num(profile.critical_length)
    );
    for ((&x, &u), &d) in profile.xs.iter().zip(&profile.ubar).zip(&profile.ubar_x) {
        let _ = writeln!(text, "{},{},{}", num(x), num(u), num(d));
    }
    text
}
