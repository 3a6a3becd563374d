//! Cross-engine checks for one configuration, one report line each.

use std::fmt;
use std::io::{self, Write};

use afrelay::channel::{hop1_moment, ordered_pdf_hop1, HopStatistics};
use afrelay::metrics::{
    ber, ber_quadrature, capacity, outage, outage_asymptotic, VGI_RHO_LIMIT,
};
use afrelay::montecarlo::simulate;
use afrelay::relaying::RelayScheme;
use afrelay::specfun::{integrate, QuadratureSpec};

use crate::config::Experiment;
use crate::report::num;

/// Deliberate corruption used to prove the checks can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Scales the first hop-1 coefficient by 1.01.
    Coefficient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub snr_db: f64,
    pub passed: bool,
    pub value: Option<f64>,
    pub reference: Option<f64>,
    pub tolerance: String,
    pub error: Option<String>,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "check={} snr_db={} status={} value={} reference={} tolerance={}",
            self.name,
            num(Some(self.snr_db)),
            if self.passed { "PASS" } else { "FAIL" },
            num(self.value),
            num(self.reference),
            self.tolerance,
        )?;
        if let Some(e) = &self.error {
            write!(f, " error=\"{}\"", e.replace('"', "'"))?;
        }
        Ok(())
    }
}

struct Recorder {
    checks: Vec<Check>,
    snr_db: f64,
}

impl Recorder {
    fn rel(&mut self, name: &'static str, got: afrelay::Result<f64>, want: afrelay::Result<f64>, tol: f64) {
        let label = format!("rel:{tol:e}");
        self.compare(name, got, want, label, |g, w| (g - w).abs() <= tol * w.abs());
    }

    fn compare(
        &mut self,
        name: &'static str,
        got: afrelay::Result<f64>,
        want: afrelay::Result<f64>,
        tolerance: String,
        ok: impl Fn(f64, f64) -> bool,
    ) {
        let (passed, value, reference, error) = match (got, want) {
            (Ok(g), Ok(w)) => (ok(g, w), Some(g), Some(w), None),
            (Err(e), w) => (false, None, w.ok(), Some(e.to_string())),
            (g, Err(e)) => (false, g.ok(), None, Some(e.to_string())),
        };
        self.checks.push(Check {
            name,
            snr_db: self.snr_db,
            passed,
            value,
            reference,
            tolerance,
            error,
        });
    }
}

fn tight() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_subdivisions: 1000,
    }
}

fn corrupt(stats: &mut HopStatistics, fault: Option<Fault>) {
    if let Some(Fault::Coefficient) = fault {
        stats.p[0] *= 1.01;
    }
}

/// Runs every check at every SNR point of the experiment.
pub fn run(exp: &Experiment, fault: Option<Fault>) -> afrelay::Result<Vec<Check>> {
    let link = &exp.link;
    let scheme = link.scheme;
    let sims = simulate(link, &exp.mc, &exp.snr_db, exp.gamma_th)?;
    let ceiling = link.ceiling()?;
    let n = exp.mc.samples as f64;
    let mut rec = Recorder {
        checks: Vec::new(),
        snr_db: 0.0,
    };
    for (&db, sim) in exp.snr_db.iter().zip(&sims) {
        rec.snr_db = db;
        let mut stats = link.stats(db)?;
        corrupt(&mut stats, fault);
        let st = &stats;
        let zeta = link.zeta(st)?;

        let pdf = |x: f64| ordered_pdf_hop1(x, st).unwrap_or(f64::NAN);
        rec.compare(
            "pdf_mass",
            integrate(pdf, 0.0, f64::INFINITY, &tight()),
            Ok(1.0),
            "abs:1e-6".into(),
            |g, w| (g - w).abs() <= 1e-6,
        );
        rec.rel(
            "pdf_mean",
            integrate(|x| x * pdf(x), 0.0, f64::INFINITY, &tight()),
            hop1_moment(1, st),
            1e-6,
        );

        let closed = ber(scheme, &link.modulation, st, zeta);
        let quad = ber_quadrature(scheme, &link.modulation, st, zeta);
        let tol = if scheme == RelayScheme::Fg { 1e-3 } else { 0.05 };
        rec.rel("ber_identity", closed, quad, tol);

        let p = outage(scheme, exp.gamma_th, st, zeta);
        let mc = sim.outage.mean;
        let vgi = scheme == RelayScheme::Vgi && link.rho1 <= VGI_RHO_LIMIT;
        if vgi {
            rec.rel("outage_mc", Ok(mc), p.clone(), 0.10);
        } else {
            rec.compare("outage_mc", Ok(mc), p.clone(), "binomial_sd:3".into(), |g, w| {
                (g - w).abs() <= 3.0 * (w * (1.0 - w) / n).sqrt()
            });
        }

        if db >= 40.0 && zeta == 1.0 && !vgi {
            let a = outage_asymptotic(scheme, exp.gamma_th, st, zeta);
            let ratio = a.and_then(|a| p.map(|p| a / p));
            rec.compare("asymptote_ratio", ratio, Ok(1.0), "range:[0.95,1.05]".into(), |g, _| {
                (0.95..=1.05).contains(&g)
            });
        }

        let cap = capacity(scheme, st, zeta);
        let ce = sim.capacity;
        let sd = ce.half_width_95 / 1.96;
        rec.compare("capacity_mc", Ok(ce.mean), cap, "max(3sd,rel:1e-2)".into(), |g, w| {
            (g - w).abs() <= (3.0 * sd).max(0.01 * w)
        });
        rec.compare("capacity_ceiling", Ok(ce.mean), Ok(ceiling), "upper_bound+ci".into(), |g, w| {
            g <= w + ce.half_width_95
        });
    }
    Ok(rec.checks)
}

pub fn write_report<W: Write>(mut out: W, checks: &[Check]) -> io::Result<bool> {
    for c in checks {
        writeln!(out, "{c}")?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(out, "summary checks={} failed={failed}", checks.len())?;
    Ok(failed == 0)
}
