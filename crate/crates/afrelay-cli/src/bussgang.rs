//! δ, σ_τ², ζ and the capacity ceiling against input back-off.

use std::io::{self, Write};

use afrelay::hpa::{bussgang, ibo_to_asat, AmplifierOperatingPoint, HpaModel};
use afrelay::metrics::capacity_ceiling;

use crate::config::Experiment;
use crate::report::{comment_block, header, num};

pub const COLUMNS: [&str; 6] = ["ibo_db", "a_sat", "delta", "sigma_tau_sq", "zeta", "capacity_ceiling"];

/// `closed-form` where [`bussgang`] has one for the model, else `quadrature`.
pub fn provenance(model: &HpaModel) -> &'static str {
    match *model {
        HpaModel::Sspa { smoothness, .. } if smoothness != 1.0 => "quadrature",
        HpaModel::Twta { phi0, .. } if phi0 != 0.0 => "quadrature",
        _ => "closed-form",
    }
}

pub fn rows(exp: &Experiment, ibo_db: &[f64], snr_db: f64) -> afrelay::Result<Vec<[f64; 6]>> {
    let mut link = exp.link;
    let stats = link.stats(snr_db)?;
    ibo_db
        .iter()
        .map(|&ibo| {
            let a = ibo_to_asat(&AmplifierOperatingPoint {
                mean_output_power: link.sigma_sq,
                ibo_db: ibo,
            })?;
            link.hpa = exp.link.hpa.with_a_sat(a);
            let bp = bussgang(&link.hpa, link.sigma_sq)?;
            let zeta = link.zeta(&stats)?;
            Ok([ibo, a, bp.delta, bp.sigma_tau_sq, zeta, capacity_ceiling(&bp, link.sigma_sq)])
        })
        .collect()
}

pub fn write_table<W: Write>(mut out: W, exp: &Experiment, snr_db: f64, rows: &[[f64; 6]]) -> io::Result<()> {
    header(&mut out, "bussgang", exp.mc.seed)?;
    writeln!(out, "# zeta evaluated at snr_db = {}", num(Some(snr_db)))?;
    writeln!(out, "# config:")?;
    comment_block(&mut out, &exp.config.echo())?;
    let p = provenance(&exp.link.hpa);
    writeln!(
        out,
        "# provenance: ibo_db=input a_sat=closed-form delta={p} sigma_tau_sq={p} zeta={p} capacity_ceiling={p}"
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record(r.iter().map(|&x| num(Some(x))))?;
    }
    w.flush()
}
