//! Cartesian parameter sweeps over a base scenario.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context};
use rayon::prelude::*;

use pipestab::certificate::Verdict;
use pipestab::execute;

use crate::config::{set_dotted, ScenarioConfig};
use crate::output::{num, write_artifacts};

/// One `--set key=v1,v2,...` argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    pub key: String,
    pub values: Vec<String>,
}

impl std::str::FromStr for Axis {
    type Err = anyhow::Error;

    fn from_str(spec: &str) -> anyhow::Result<Self> {
        let Some((key, list)) = spec.split_once('=') else {
            bail!("override `{spec}` is not of the form key=v1,v2,...");
        };
        let key = key.trim();
        if key.is_empty() {
            bail!("override `{spec}` has an empty key");
        }
        let values: Vec<String> = list
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(String::from)
            .collect();
        Ok(Axis {
            key: key.to_string(),
            values,
        })
    }
}

/// All combinations, the last axis varying fastest.
pub fn grid(axes: &[Axis]) -> anyhow::Result<Vec<Vec<String>>> {
    if axes.is_empty() {
        bail!("empty override grid: pass at least one --set key=v1,v2,...");
    }
    if let Some(a) = axes.iter().find(|a| a.values.is_empty()) {
        bail!("empty override grid: `{}` has no values", a.key);
    }
    let mut points = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |v| {
                    let mut next = p.clone();
                    next.push(v.clone());
                    next
                })
            })
            .collect();
    }
    Ok(points)
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub run_id: usize,
    pub values: Vec<String>,
    pub outcome: Result<RunDigest, String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunDigest {
    pub fitted_rate: Option<f64>,
    pub mu: f64,
    pub verdict: Verdict,
}

fn run_point(
    doc: &toml::Value,
    base: &Path,
    axes: &[Axis],
    values: &[String],
    run_id: usize,
) -> anyhow::Result<RunDigest> {
    let mut doc = doc.clone();
    for (axis, value) in axes.iter().zip(values) {
        set_dotted(&mut doc, &axis.key, value)?;
    }
    let config = ScenarioConfig::from_value(doc)?;
    let scenario = config.to_scenario()?;
    let out = execute(&scenario)?;
    let paths = config.resolve_outputs(base).for_run(run_id);
    write_artifacts(&paths, &config, &out)?;
    Ok(RunDigest {
        fitted_rate: out.fitted.map(|f| f.rate),
        mu: out.report.constants.mu,
        verdict: out.report.verdict,
    })
}

/// Runs every grid point in parallel. Rows come back in grid order and
/// each run writes only its own files.
pub fn run_sweep(doc: &toml::Value, base: &Path, axes: &[Axis]) -> anyhow::Result<Vec<SweepRow>> {
    let points = grid(axes)?;
    Ok(points
        .into_par_iter()
        .enumerate()
        .map(|(run_id, values)| {
            let outcome = run_point(doc, base, axes, &values, run_id).map_err(|e| format!("{e:#}"));
            SweepRow {
                run_id,
                values,
                outcome,
            }
        })
        .collect())
}

/// `run_id,<keys>...,fitted_rate,mu,verdict`; failed runs carry the error
/// in the verdict column.
pub fn write_summary(axes: &[Axis], rows: &[SweepRow], writer: impl Write) -> anyhow::Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let mut header = vec!["run_id".to_string()];
    header.extend(axes.iter().map(|a| a.key.clone()));
    header.extend(["fitted_rate", "mu", "verdict"].map(String::from));
    csv.write_record(&header)?;
    for row in rows {
        let mut record = vec![row.run_id.to_string()];
        record.extend(row.values.iter().cloned());
        match &row.outcome {
            Ok(d) => {
                record.push(d.fitted_rate.map(num).unwrap_or_default());
                record.push(num(d.mu));
                record.push(d.verdict.as_str().to_string());
            }
            Err(e) => {
                record.extend([String::new(), String::new(), format!("error: {e}")]);
            }
        }
        csv.write_record(&record)?;
    }
    csv.flush().context("writing sweep summary")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(s: &str) -> Axis {
        s.parse().unwrap()
    }

    #[test]
    fn grid_order_is_row_major() {
        let g = grid(&[axis("a=1,2"), axis("b=x,y,z")]).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], ["1", "x"]);
        assert_eq!(g[1], ["1", "y"]);
        assert_eq!(g[5], ["2", "z"]);
    }

    #[test]
    fn empty_grids_are_errors() {
        assert!(grid(&[]).is_err());
        assert!(grid(&[axis("feedback.k=")]).is_err());
        assert!("novalues".parse::<Axis>().is_err());
        assert!("=1,2".parse::<Axis>().is_err());
    }
}
