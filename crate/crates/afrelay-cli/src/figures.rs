//! Figure reproduction from the shipped defaults table.

use std::io::{self, Write};

use afrelay::montecarlo::{run_sweep, SweepPoint};
use serde::Deserialize;
use toml::{Table, Value};

use crate::config::{ConfigError, Experiment, SystemConfig};
use crate::report::{self, comment_block, header, notes, write_rows};

pub const DEFAULTS_TOML: &str = include_str!("../figures.toml");

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefaultsTable {
    pub version: u32,
    pub figure: Vec<FigureSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSpec {
    pub id: u32,
    pub title: String,
    pub metric: String,
    pub base: Table,
    pub curves: Vec<Table>,
}

pub fn defaults() -> DefaultsTable {
    toml::from_str(DEFAULTS_TOML).expect("shipped figure table parses")
}

/// A figure's curves as checked experiments, with `overrides` applied to the
/// shared base.
pub fn curves(id: u32, overrides: &[(String, Value)]) -> Result<(u32, FigureSpec, Vec<(String, Experiment)>), ConfigError> {
    let table = defaults();
    let Some(spec) = table.figure.iter().find(|f| f.id == id).cloned() else {
        let known: Vec<String> = table.figure.iter().map(|f| f.id.to_string()).collect();
        return Err(ConfigError::field(
            "figure",
            format!("unknown figure {id}; known: {}", known.join(", ")),
        ));
    };
    let mut base = spec.base.clone();
    for (k, v) in overrides {
        if spec.curves.iter().any(|c| c.contains_key(k)) {
            return Err(ConfigError::Parse(format!(
                "--set {k}: figure {id} varies `{k}` across its curves"
            )));
        }
        base.insert(k.clone(), v.clone());
    }
    let mut out = Vec::with_capacity(spec.curves.len());
    for c in &spec.curves {
        let mut merged = base.clone();
        let mut label = None;
        for (k, v) in c {
            if k == "label" {
                label = v.as_str().map(str::to_string);
            } else {
                merged.insert(k.clone(), v.clone());
            }
        }
        let label = label.ok_or_else(|| ConfigError::Parse(format!("figure {id}: curve without label")))?;
        let cfg: SystemConfig = Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(format!("figure {id}, curve {label}: {e}")))?;
        out.push((label, cfg.resolve()?));
    }
    Ok((table.version, spec, out))
}

/// Parses `key=value`, reading the value as TOML and falling back to a bare
/// string.
pub fn parse_override(s: &str) -> Result<(String, Value), ConfigError> {
    let Some((k, v)) = s.split_once('=') else {
        return Err(ConfigError::Parse(format!("--set expects key=value, got {s:?}")));
    };
    let (k, v) = (k.trim(), v.trim());
    let value = toml::from_str::<Table>(&format!("v = {v}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(v.to_string()));
    Ok((k.to_string(), value))
}

pub fn write_figure<W: Write>(
    mut out: W,
    version: u32,
    spec: &FigureSpec,
    curves: &[(String, Experiment)],
    results: &[Vec<SweepPoint>],
) -> io::Result<()> {
    let seed = curves.first().map_or(0, |(_, e)| e.mc.seed);
    header(&mut out, &format!("figure {}", spec.id), seed)?;
    writeln!(out, "# title: {}", spec.title)?;
    writeln!(out, "# mc_ci columns: 95% confidence half-widths")?;
    writeln!(out, "# metric: {}", spec.metric)?;
    writeln!(out, "# defaults table version: {version} (calibration inputs, not published values)")?;
    for (label, exp) in curves {
        writeln!(out, "# curve {label}:")?;
        comment_block(&mut out, &exp.config.echo())?;
    }
    let all: Vec<&SweepPoint> = results.iter().flatten().collect();
    writeln!(out, "# provenance: curve=input {}", report::provenance(&all))?;
    for ((label, _), pts) in curves.iter().zip(results) {
        notes(&mut out, Some(label), pts)?;
    }
    let groups: Vec<(Option<&str>, &[SweepPoint])> = curves
        .iter()
        .zip(results)
        .map(|((l, _), r)| (Some(l.as_str()), r.as_slice()))
        .collect();
    write_rows(out, Some("curve"), &groups)
}

pub fn run(curves: &[(String, Experiment)]) -> afrelay::Result<Vec<Vec<SweepPoint>>> {
    curves
        .iter()
        .map(|(_, e)| run_sweep(&e.link, &e.mc, &e.snr_db, e.gamma_th))
        .collect()
}
