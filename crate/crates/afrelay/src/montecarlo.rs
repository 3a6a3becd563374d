//! Deterministic parallel Monte Carlo of the relay link.
//!
//! Trials are grouped in fixed blocks; block `b` draws from ChaCha8 stream `b`
//! of the configured seed and block sums are reduced in block order, so the
//! result does not depend on the number of worker threads. One set of channel
//! draws serves every SNR point of a sweep.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{hop1_moment, sample_csi_pair};
use crate::error::{Error, Result};
use crate::hpa::{bussgang, bussgang_closed_form, BussgangParams, HpaModel};
use crate::link::{analyze, LinkConfig};
use crate::metrics::PerformancePoint;
use crate::relaying::{select_by_rank, sndr, LinkSample, RelayScheme};
use crate::specfun::gauss_q;

pub const BLOCK: u64 = 4096;
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fidelity {
    /// Paper SNDR formulas with one constant ζ per SNR point.
    BussgangSurrogate,
    /// Per-trial amplifier drive power and the Bussgang split at that power.
    FullNonlinearity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub fidelity: Fidelity,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 1_000_000,
            seed: 1,
            workers: 1,
            fidelity: Fidelity::BussgangSurrogate,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.workers == 0 {
            return Err(Error::domain("McConfig", "samples and workers must be at least 1"));
        }
        Ok(())
    }
}

/// Sample mean with a 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub half_width_95: f64,
    pub samples_used: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    below: u64,
    ber: f64,
    ber_sq: f64,
    cap: f64,
    cap_sq: f64,
}

impl Acc {
    fn merge(&mut self, o: &Acc) {
        self.below += o.below;
        self.ber += o.ber;
        self.ber_sq += o.ber_sq;
        self.cap += o.cap;
        self.cap_sq += o.cap_sq;
    }
}

/// Hop channel powers (unit mean) of the selected relay.
#[derive(Debug, Clone, Copy)]
struct Gains {
    x1_out: f64,
    x1_cur: f64,
    x2_out: f64,
    x2_cur: f64,
}

fn draw_selected(rng: &mut ChaCha8Rng, link: &LinkConfig, hop2_ratio: f64, buf: &mut Vec<Gains>) -> Gains {
    buf.clear();
    for _ in 0..link.n_relays {
        let a = sample_csi_pair(rng, 1.0, link.rho1);
        let b = sample_csi_pair(rng, 1.0, link.rho2);
        buf.push(Gains {
            x1_out: a.outdated.norm_sqr(),
            x1_cur: a.current.norm_sqr(),
            x2_out: b.outdated.norm_sqr(),
            x2_cur: b.current.norm_sqr(),
        });
    }
    let i = select_by_rank(buf.len(), link.rank as usize, |i| {
        buf[i].x1_out.min(hop2_ratio * buf[i].x2_out)
    });
    buf[i]
}

/// Per-SNR constants of the trial loop.
#[derive(Debug, Clone, Copy)]
struct PointSetup {
    g1: f64,
    g2: f64,
    mean_g1: f64,
    zeta: f64,
}

// Bussgang parameters as a function of amplifier drive power.
enum DriveModel {
    Ideal,
    Closed(HpaModel),
    // ln p grid with (δ, σ_τ²/p) samples for models without a closed form.
    Table { lo: f64, step: f64, delta: Vec<f64>, tau: Vec<f64> },
}

impl DriveModel {
    fn new(model: &HpaModel) -> Result<Self> {
        match *model {
            HpaModel::Ideal => Ok(DriveModel::Ideal),
            HpaModel::Sspa { smoothness, .. } if smoothness != 1.0 => Self::table(model),
            HpaModel::Twta { phi0, .. } if phi0 != 0.0 => Self::table(model),
            m => Ok(DriveModel::Closed(m)),
        }
    }

    fn table(model: &HpaModel) -> Result<Self> {
        let (lo, hi, step) = (-25.0f64, 25.0f64, 0.05f64);
        let n = ((hi - lo) / step).round() as usize + 1;
        let mut delta = Vec::with_capacity(n);
        let mut tau = Vec::with_capacity(n);
        for i in 0..n {
            let p = (lo + step * i as f64).exp();
            let bp = bussgang(model, p)?;
            delta.push(bp.delta);
            tau.push(bp.sigma_tau_sq / p);
        }
        Ok(DriveModel::Table { lo, step, delta, tau })
    }

    fn at(&self, p: f64) -> BussgangParams {
        match self {
            DriveModel::Ideal => BussgangParams::IDEAL,
            DriveModel::Closed(m) => {
                bussgang_closed_form(m, p.max(1e-300)).unwrap_or(BussgangParams::IDEAL)
            }
            DriveModel::Table { lo, step, delta, tau } => {
                let x = ((p.max(1e-300).ln() - lo) / step).clamp(0.0, (delta.len() - 1) as f64);
                let i = (x.floor() as usize).min(delta.len() - 2);
                let f = x - i as f64;
                let d = delta[i] + f * (delta[i + 1] - delta[i]);
                let t = tau[i] + f * (tau[i + 1] - tau[i]);
                BussgangParams {
                    delta: d,
                    sigma_tau_sq: t * p,
                }
            }
        }
    }
}

fn trial_sndr(
    link: &LinkConfig,
    fid: Fidelity,
    drive: &DriveModel,
    pt: &PointSetup,
    x: &Gains,
) -> f64 {
    let s = LinkSample {
        gamma1_outdated: pt.g1 * x.x1_out,
        gamma1_current: pt.g1 * x.x1_cur,
        gamma2_outdated: pt.g2 * x.x2_out,
        gamma2_current: pt.g2 * x.x2_cur,
    };
    match fid {
        Fidelity::BussgangSurrogate => sndr(link.scheme, &s, pt.zeta, pt.mean_g1),
        Fidelity::FullNonlinearity => {
            let sigma_sq = link.sigma_sq;
            let gain = match link.scheme {
                RelayScheme::Fg => sigma_sq / (pt.mean_g1 + 1.0),
                RelayScheme::Vgi => sigma_sq / (s.gamma1_outdated + 1.0),
                RelayScheme::Vgii => sigma_sq / (s.gamma1_current + 1.0),
            };
            let bp = drive.at(gain * (s.gamma1_current + 1.0));
            let d2g = bp.delta * bp.delta * gain;
            let g2 = s.gamma2_current;
            d2g * s.gamma1_current * g2 / (g2 * (d2g + bp.sigma_tau_sq) + sigma_sq)
        }
    }
}

struct Member<'a> {
    link: &'a LinkConfig,
    drive: DriveModel,
    points: Vec<PointSetup>,
}

// Links that share one set of channel draws.
struct Batch<'a> {
    members: Vec<Member<'a>>,
    mc: &'a McConfig,
    gamma_th: f64,
    outage_only: bool,
}

fn same_channel(a: &LinkConfig, b: &LinkConfig) -> bool {
    a.n_relays == b.n_relays
        && a.rank == b.rank
        && a.rho1 == b.rho1
        && a.rho2 == b.rho2
        && a.hop2_offset_db == b.hop2_offset_db
}

impl<'a> Batch<'a> {
    fn new(
        links: &'a [LinkConfig],
        mc: &'a McConfig,
        snr_db: &[f64],
        gamma_th: f64,
        outage_only: bool,
    ) -> Result<Self> {
        mc.validate()?;
        let first = links
            .first()
            .ok_or_else(|| Error::domain("simulate", "no links given"))?;
        let mut members = Vec::with_capacity(links.len());
        for link in links {
            link.validate()?;
            if !same_channel(first, link) {
                return Err(Error::domain(
                    "simulate",
                    "links sharing a batch must have equal relays, rank, correlations and hop-2 offset",
                ));
            }
            let mut points = Vec::with_capacity(snr_db.len());
            for &db in snr_db {
                let stats = link.stats(db)?;
                let (g1, g2) = link.gamma_bars(db);
                points.push(PointSetup {
                    g1,
                    g2,
                    mean_g1: hop1_moment(1, &stats)?,
                    zeta: link.zeta(&stats)?,
                });
            }
            let drive = match mc.fidelity {
                Fidelity::BussgangSurrogate => DriveModel::Ideal,
                Fidelity::FullNonlinearity => DriveModel::new(&link.hpa)?,
            };
            members.push(Member { link, drive, points });
        }
        Ok(Batch {
            members,
            mc,
            gamma_th,
            outage_only,
        })
    }

    fn slots(&self) -> usize {
        self.members.iter().map(|m| m.points.len()).sum()
    }

    fn run_block(&self, block: u64) -> Vec<Acc> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.mc.seed);
        rng.set_stream(block);
        let start = block * BLOCK;
        let n = BLOCK.min(self.mc.samples - start);
        let mut acc = vec![Acc::default(); self.slots()];
        let chan = self.members[0].link;
        let mut buf = Vec::with_capacity(chan.n_relays as usize);
        let ratio = crate::link::db_to_linear(chan.hop2_offset_db);
        for _ in 0..n {
            let x = draw_selected(&mut rng, chan, ratio, &mut buf);
            let mut slot = acc.iter_mut();
            for m in &self.members {
                let md = &m.link.modulation;
                for (pt, a) in m.points.iter().zip(&mut slot) {
                    let g = trial_sndr(m.link, self.mc.fidelity, &m.drive, pt, &x);
                    if g < self.gamma_th {
                        a.below += 1;
                    }
                    if self.outage_only {
                        continue;
                    }
                    let b = md.alpha * gauss_q((2.0 * md.beta * g).sqrt());
                    a.ber += b;
                    a.ber_sq += b * b;
                    let c = 0.5 * g.ln_1p() / std::f64::consts::LN_2;
                    a.cap += c;
                    a.cap_sq += c * c;
                }
            }
        }
        acc
    }

    fn run(&self) -> Result<Vec<Acc>> {
        let blocks = self.mc.samples.div_ceil(BLOCK);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.mc.workers)
            .build()
            .map_err(|e| Error::domain("montecarlo", format!("thread pool: {e}")))?;
        let per_block: Vec<Vec<Acc>> =
            pool.install(|| (0..blocks).into_par_iter().map(|b| self.run_block(b)).collect());
        let mut total = vec![Acc::default(); self.slots()];
        for block in &per_block {
            for (t, a) in total.iter_mut().zip(block) {
                t.merge(a);
            }
        }
        Ok(total)
    }
}

fn proportion(k: u64, n: u64) -> Estimate {
    let p = k as f64 / n as f64;
    Estimate {
        mean: p,
        half_width_95: Z95 * (p * (1.0 - p) / n as f64).sqrt(),
        samples_used: n,
    }
}

fn sample_mean(sum: f64, sum_sq: f64, n: u64) -> Estimate {
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 {
        ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Estimate {
        mean,
        half_width_95: Z95 * (var / nf).sqrt(),
        samples_used: n,
    }
}

/// MC estimates at one SNR point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McPoint {
    pub outage: Estimate,
    pub ber: Estimate,
    pub capacity: Estimate,
}

/// Runs one batch of trials and returns outage, BER and capacity estimates at
/// every SNR in `snr_db`.
pub fn simulate(link: &LinkConfig, mc: &McConfig, snr_db: &[f64], gamma_th: f64) -> Result<Vec<McPoint>> {
    Ok(simulate_links(std::slice::from_ref(link), mc, snr_db, gamma_th)?
        .pop()
        .unwrap_or_default())
}

/// [`simulate`] for several links driven by the same channel draws. The
/// links may differ in scheme, amplifier and modulation but must agree on
/// relay count, rank, correlations and hop-2 offset. Each link gets the
/// same estimates it would get from [`simulate`] alone.
pub fn simulate_links(
    links: &[LinkConfig],
    mc: &McConfig,
    snr_db: &[f64],
    gamma_th: f64,
) -> Result<Vec<Vec<McPoint>>> {
    let n = mc.samples;
    let all: Vec<McPoint> = run_batch(links, mc, snr_db, gamma_th, false)?
        .iter()
        .map(|a| McPoint {
            outage: proportion(a.below, n),
            ber: sample_mean(a.ber, a.ber_sq, n),
            capacity: sample_mean(a.cap, a.cap_sq, n),
        })
        .collect();
    Ok(all.chunks(snr_db.len().max(1)).map(|c| c.to_vec()).collect())
}

fn run_batch(
    links: &[LinkConfig],
    mc: &McConfig,
    snr_db: &[f64],
    gamma_th: f64,
    outage_only: bool,
) -> Result<Vec<Acc>> {
    if !(gamma_th >= 0.0) {
        return Err(Error::domain("simulate", format!("threshold must be ≥ 0, got {gamma_th}")));
    }
    Batch::new(links, mc, snr_db, gamma_th, outage_only)?.run()
}

/// Outage-only [`simulate_links`]: the same draws and the same outage
/// estimates, without the per-trial BER and capacity terms.
pub fn simulate_outage_links(
    links: &[LinkConfig],
    mc: &McConfig,
    snr_db: &[f64],
    gamma_th: f64,
) -> Result<Vec<Vec<Estimate>>> {
    let all: Vec<Estimate> = run_batch(links, mc, snr_db, gamma_th, true)?
        .iter()
        .map(|a| proportion(a.below, mc.samples))
        .collect();
    Ok(all.chunks(snr_db.len().max(1)).map(|c| c.to_vec()).collect())
}

fn single(link: &LinkConfig, mc: &McConfig, snr_db: f64, gamma_th: f64) -> Result<McPoint> {
    Ok(simulate(link, mc, &[snr_db], gamma_th)?[0])
}

/// Fraction of trials whose SNDR falls below `gamma_th`.
pub fn estimate_outage(link: &LinkConfig, mc: &McConfig, snr_db: f64, gamma_th: f64) -> Result<Estimate> {
    Ok(simulate_outage_links(std::slice::from_ref(link), mc, &[snr_db], gamma_th)?[0][0])
}

/// Mean of `α Q(√(2βγ))` over trials.
pub fn estimate_ber(link: &LinkConfig, mc: &McConfig, snr_db: f64) -> Result<Estimate> {
    Ok(single(link, mc, snr_db, 0.0)?.ber)
}

/// Mean of `½ log₂(1 + γ)` over trials.
pub fn estimate_capacity(link: &LinkConfig, mc: &McConfig, snr_db: f64) -> Result<Estimate> {
    Ok(single(link, mc, snr_db, 0.0)?.capacity)
}

/// Analytic and simulated metrics at one point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub analytic: Option<PerformancePoint>,
    pub mc: McPoint,
    pub capacity_ceiling: f64,
    /// Per-point evaluation failures; the sweep carries on past them.
    pub notes: Vec<String>,
}

/// Simulates and evaluates the closed forms over an SNR grid.
pub fn run_sweep(
    link: &LinkConfig,
    mc: &McConfig,
    snr_db: &[f64],
    gamma_th: f64,
) -> Result<Vec<SweepPoint>> {
    if snr_db.is_empty() {
        return Err(Error::domain("run_sweep", "empty SNR grid"));
    }
    let sims = simulate(link, mc, snr_db, gamma_th)?;
    let ceiling = link.ceiling()?;
    let mut out = Vec::with_capacity(snr_db.len());
    for (&db, sim) in snr_db.iter().zip(sims) {
        let (analytic, notes) = match analyze(link, db, gamma_th) {
            Ok((p, notes)) => (Some(p), notes),
            Err(e) => (None, vec![e.to_string()]),
        };
        out.push(SweepPoint {
            snr_db: db,
            analytic,
            mc: sim,
            capacity_ceiling: ceiling,
            notes,
        });
    }
    Ok(out)
}
