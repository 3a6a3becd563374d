//! CSV output: a `#` preamble (version, seed, config echo, provenance of
//! every column, per-point notes) followed by the data rows.

use std::io::{self, Write};

use afrelay::metrics::{PerformancePoint, Tagged};
use afrelay::montecarlo::SweepPoint;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SWEEP_COLUMNS: [&str; 12] = [
    "snr_db",
    "outage_analytic",
    "outage_asymptotic",
    "outage_mc",
    "outage_mc_ci",
    "ber_analytic",
    "ber_mc",
    "ber_mc_ci",
    "capacity_analytic",
    "capacity_mc",
    "capacity_mc_ci",
    "capacity_ceiling",
];

/// Shortest round-trip decimal; empty when the value is missing.
pub fn num(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_infinite() && x > 0.0 => "inf".into(),
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

fn value(t: Option<Tagged>) -> Option<f64> {
    t.map(|t| t.value)
}

pub fn row(p: &SweepPoint) -> Vec<String> {
    let a = p.analytic.as_ref();
    let pick = |f: fn(&PerformancePoint) -> Option<Tagged>| a.and_then(|a| value(f(a)));
    vec![
        num(Some(p.snr_db)),
        num(pick(|a| a.outage)),
        num(pick(|a| a.outage_asymptotic)),
        num(Some(p.mc.outage.mean)),
        num(Some(p.mc.outage.half_width_95)),
        num(pick(|a| a.ber)),
        num(Some(p.mc.ber.mean)),
        num(Some(p.mc.ber.half_width_95)),
        num(pick(|a| a.capacity)),
        num(Some(p.mc.capacity.mean)),
        num(Some(p.mc.capacity.half_width_95)),
        num(Some(p.capacity_ceiling)),
    ]
}

/// `column=method` for every column, collecting every method seen over the
/// rows so a column can never silently mix engines.
pub fn provenance(points: &[&SweepPoint]) -> String {
    let mut seen: [Vec<&'static str>; 4] = Default::default();
    for p in points {
        if let Some(a) = &p.analytic {
            for (slot, t) in seen.iter_mut().zip([a.outage, a.outage_asymptotic, a.ber, a.capacity]) {
                if let Some(t) = t {
                    let name = t.provenance.name();
                    if !slot.contains(&name) {
                        slot.push(name);
                    }
                }
            }
        }
    }
    let tag = |i: usize| {
        if seen[i].is_empty() {
            "none".to_string()
        } else {
            seen[i].join("|")
        }
    };
    let cols = [
        ("snr_db", "input".to_string()),
        ("outage_analytic", tag(0)),
        ("outage_asymptotic", tag(1)),
        ("outage_mc", "mc".into()),
        ("outage_mc_ci", "mc".into()),
        ("ber_analytic", tag(2)),
        ("ber_mc", "mc".into()),
        ("ber_mc_ci", "mc".into()),
        ("capacity_analytic", tag(3)),
        ("capacity_mc", "mc".into()),
        ("capacity_mc_ci", "mc".into()),
        ("capacity_ceiling", "closed-form".into()),
    ];
    cols.iter()
        .map(|(c, p)| format!("{c}={p}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn comment_block<W: Write>(out: &mut W, text: &str) -> io::Result<()> {
    for line in text.lines() {
        if line.is_empty() {
            writeln!(out, "#")?;
        } else {
            writeln!(out, "# {line}")?;
        }
    }
    Ok(())
}

pub fn header<W: Write>(out: &mut W, command: &str, seed: u64) -> io::Result<()> {
    writeln!(out, "# afrelay {VERSION} {command}")?;
    writeln!(out, "# seed: {seed}")?;
    Ok(())
}

pub fn notes<W: Write>(out: &mut W, label: Option<&str>, points: &[SweepPoint]) -> io::Result<()> {
    for p in points {
        for n in &p.notes {
            match label {
                Some(l) => writeln!(out, "# note: curve={l} snr_db={}: {n}", num(Some(p.snr_db)))?,
                None => writeln!(out, "# note: snr_db={}: {n}", num(Some(p.snr_db)))?,
            }
        }
    }
    Ok(())
}

pub fn write_rows<W: Write>(out: W, leading: Option<&str>, groups: &[(Option<&str>, &[SweepPoint])]) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(out);
    let mut head: Vec<&str> = leading.into_iter().collect();
    head.extend(SWEEP_COLUMNS);
    w.write_record(&head)?;
    for (label, points) in groups {
        for p in points.iter() {
            let mut r: Vec<String> = label.iter().map(|s| s.to_string()).collect();
            r.extend(row(p));
            w.write_record(&r)?;
        }
    }
    w.flush()
}

/// The `sweep` command's output.
pub fn write_sweep<W: Write>(mut out: W, config_echo: &str, seed: u64, points: &[SweepPoint]) -> io::Result<()> {
    header(&mut out, "sweep", seed)?;
    writeln!(out, "# mc_ci columns: 95% confidence half-widths")?;
    writeln!(out, "# config:")?;
    comment_block(&mut out, config_echo)?;
    let refs: Vec<&SweepPoint> = points.iter().collect();
    writeln!(out, "# provenance: {}", provenance(&refs))?;
    notes(&mut out, None, points)?;
    write_rows(out, None, &[(None, points)])
}
