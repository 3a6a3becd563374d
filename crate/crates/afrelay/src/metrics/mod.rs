//! Outage probability, average BER and ergodic capacity of the selected
//! relay link, in closed form, as high-SNR asymptotes and by quadrature.
//!
//! Every evaluator takes the precomputed [`HopStatistics`] and a constant
//! impairment factor `zeta` (ζ = 1 for ideal hardware).

mod ber;
mod capacity;
mod outage;

use std::fmt;

pub use ber::{ber, ber_asymptotic, ber_quadrature, ber_vgii_closed};
pub use capacity::{capacity, capacity_ceiling, capacity_vgi_closed};
pub use outage::{
    ccdf, outage, outage_asymptotic, outage_fg, outage_fg_asymptotic, outage_vgi, outage_vgii,
    outage_vgii_asymptotic, VGI_RHO_LIMIT,
};

use crate::channel::{hop1_moment, HopStatistics};
use crate::error::{Error, Result};
use crate::hpa::{zeta, BussgangParams};

/// BER model `P_e = α E[Q(√(2βγ))]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationParams {
    pub alpha: f64,
    pub beta: f64,
}

impl ModulationParams {
    pub const BPSK: ModulationParams = ModulationParams {
        alpha: 1.0,
        beta: 1.0,
    };

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !(beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::domain(
                "ModulationParams",
                format!("alpha and beta must be positive, got {alpha}, {beta}"),
            ));
        }
        Ok(ModulationParams { alpha, beta })
    }
}

/// Where a number came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    ClosedForm,
    Asymptote,
    Quadrature,
    MonteCarlo,
}

impl Provenance {
    pub fn name(&self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::Asymptote => "asymptote",
            Provenance::Quadrature => "quadrature",
            Provenance::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A metric value tagged with the method that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tagged {
    pub value: f64,
    pub provenance: Provenance,
}

/// Analytic performance at one SNR point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformancePoint {
    pub snr_db: f64,
    pub outage: Option<Tagged>,
    pub outage_asymptotic: Option<Tagged>,
    pub ber: Option<Tagged>,
    pub capacity: Option<Tagged>,
}

/// Accepts values within 1e-9 of [0, 1] (clamping the rounding slack) and
/// rejects anything further out.
pub(crate) fn probability(what: &'static str, v: f64) -> Result<f64> {
    if !(v >= -1e-9 && v <= 1.0 + 1e-9) {
        return Err(Error::OutOfRange { what, value: v });
    }
    Ok(v.clamp(0.0, 1.0))
}

pub(crate) fn check_threshold(what: &'static str, t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(what, format!("threshold must be positive, got {t}")));
    }
    Ok(())
}

pub(crate) fn check_zeta(what: &'static str, z: f64) -> Result<()> {
    if !(z >= 1.0) || !z.is_finite() {
        return Err(Error::domain(what, format!("zeta must be ≥ 1, got {z}")));
    }
    Ok(())
}

/// ζ for a link whose relay gain normalizes the average hop-1 power, with
/// σ₀² = 1: `1 + σ_τ² (E[γ₁] + 1) / (δ² σ²)`.
pub fn link_zeta(bp: &BussgangParams, stats: &HopStatistics, sigma_sq: f64) -> Result<f64> {
    let mean_g1 = hop1_moment(1, stats)?;
    zeta(bp, sigma_sq / (mean_g1 + 1.0), 1.0)
}

/// `−10 ×` the least-squares slope of `log10(outage)` against SNR in dB.
pub fn diversity_gain(curve: &[(f64, f64)]) -> Result<f64> {
    if curve.len() < 3 {
        return Err(Error::domain("diversity_gain", "need at least 3 points"));
    }
    if let Some(&(s, p)) = curve.iter().find(|(_, p)| !(*p > 0.0)) {
        return Err(Error::domain(
            "diversity_gain",
            format!("outage must be positive, got {p} at {s} dB"),
        ));
    }
    let n = curve.len() as f64;
    let mx = curve.iter().map(|(s, _)| s).sum::<f64>() / n;
    let my = curve.iter().map(|(_, p)| p.log10()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(s, p) in curve {
        sxy += (s - mx) * (p.log10() - my);
        sxx += (s - mx) * (s - mx);
    }
    if sxx == 0.0 {
        return Err(Error::domain("diversity_gain", "SNR points must differ"));
    }
    Ok(-10.0 * sxy / sxx)
}
