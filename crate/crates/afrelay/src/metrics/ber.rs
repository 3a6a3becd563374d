use std::f64::consts::PI;

use super::outage::{ccdf, fg_leading, vgi_parts, vgii_leading, VGI_RHO_LIMIT};
use super::{check_zeta, probability, ModulationParams};
use crate::channel::{hop1_moment, HopStatistics};
use crate::error::{Error, Result};
use crate::relaying::RelayScheme;
use crate::specfun::{digamma, gamma, hyp2f1, hyperu, integrate, QuadratureSpec};

fn ber_fg(m: &ModulationParams, stats: &HopStatistics, zeta: f64) -> Result<f64> {
    let g1 = stats.cfg.gamma1_bar;
    let c = hop1_moment(1, stats)? + zeta;
    let a2 = stats.scale * stats.scale;
    let mut sum = 0.0;
    for term in stats.cross_terms() {
        let (u, r) = (term.u, term.r);
        let p = (m.beta * g1 + r * zeta) / g1;
        let x = u * r * c / (g1 * g1 * p);
        // e^{x/2} W_{−1/2,1/2}(x) = x U(3/2, 2, x), without the overflowing pair.
        sum += term.w / (r * p.sqrt()) * x * hyperu(1.5, 2.0, x)?;
    }
    Ok(0.5 * m.alpha
        - 0.5 * m.alpha * a2 * (m.beta / PI).sqrt() * gamma(0.5) * gamma(1.5) * sum)
}

/// VGII BER in closed form. It integrates the CDF with `γ(1+γ)` replaced
/// by `γ²` inside the Bessel argument, so it runs a few percent below
/// [`ber_quadrature`] at 20 dB and more at low SNR; [`ber`] uses the
/// quadrature for VGII.
pub fn ber_vgii_closed(m: &ModulationParams, stats: &HopStatistics, zeta: f64) -> Result<f64> {
    check_zeta("ber_vgii_closed", zeta)?;
    probability("ber_vgii_closed", ber_vgii(m, stats, zeta)?)
}

fn ber_vgii(m: &ModulationParams, stats: &HopStatistics, zeta: f64) -> Result<f64> {
    let g1 = stats.cfg.gamma1_bar;
    let a2 = stats.scale * stats.scale;
    let mut sum = 0.0;
    for term in stats.cross_terms() {
        let (u, r) = (term.u, term.r);
        let omega = m.beta + (r * zeta + u) / g1;
        let varrho = 2.0 * (u * r * zeta).sqrt() / g1;
        let f = hyp2f1(2.5, 1.5, 2.0, (omega - varrho) / (omega + varrho))?;
        sum += term.w * (u * zeta / r).sqrt() * varrho / (omega + varrho).powf(2.5) * f;
    }
    Ok(0.5 * m.alpha - 2.0 * m.alpha * m.beta.sqrt() * a2 / g1 * gamma(0.5) * gamma(2.5) * sum)
}

fn ber_vgi(m: &ModulationParams, stats: &HopStatistics, zeta: f64) -> Result<f64> {
    let mut sum = 0.0;
    for part in vgi_parts(stats, zeta)? {
        let p = m.beta + part.k;
        if !(p > 0.0) {
            return Err(Error::domain("ber_vgi", format!("non-integrable term, beta + K = {p}")));
        }
        let i1 = gamma(0.5) / p.sqrt();
        let i2 = part.z * gamma(1.5) / (1.5 * p.powf(1.5))
            * hyp2f1(1.0, 1.5, 2.5, (p - part.z) / p)?;
        sum += part.w * (i1 - i2);
    }
    Ok(m.alpha * m.beta.sqrt() / (2.0 * PI.sqrt()) * (gamma(0.5) / m.beta.sqrt() - sum))
}

/// Average BER of record: closed form for FG and VGI, quadrature for VGII
/// (see [`ber_vgii_closed`]). VGI with ρ₁ above [`VGI_RHO_LIMIT`] is
/// evaluated as VGII.
pub fn ber(
    scheme: RelayScheme,
    modulation: &ModulationParams,
    stats: &HopStatistics,
    zeta: f64,
) -> Result<f64> {
    check_zeta("ber", zeta)?;
    let v = match scheme {
        RelayScheme::Fg => ber_fg(modulation, stats, zeta)?,
        RelayScheme::Vgi if stats.cfg.rho1 <= VGI_RHO_LIMIT => ber_vgi(modulation, stats, zeta)?,
        RelayScheme::Vgi | RelayScheme::Vgii => {
            return ber_quadrature(RelayScheme::Vgii, modulation, stats, zeta)
        }
    };
    probability("ber", v)
}

/// Average BER from `(α√β/(2√π)) ∫ e^{−βγ} γ^{−1/2} F(γ) dγ` with the
/// scheme's outage CDF, by adaptive quadrature.
pub fn ber_quadrature(
    scheme: RelayScheme,
    modulation: &ModulationParams,
    stats: &HopStatistics,
    zeta: f64,
) -> Result<f64> {
    check_zeta("ber_quadrature", zeta)?;
    let spec = QuadratureSpec {
        abs_tol: 1e-15,
        rel_tol: 1e-10,
        max_subdivisions: 2000,
    };
    let beta = modulation.beta;
    // Evaluating 1 − ccdf inside keeps a failure inside ccdf visible.
    let failed = std::cell::Cell::new(None);
    let f = |t: f64| match ccdf(scheme, t, stats, zeta) {
        Ok(s) => (-beta * t).exp() / t.sqrt() * (1.0 - s),
        Err(e) => {
            failed.set(Some(e));
            0.0
        }
    };
    let v = integrate(&f, 0.0, 1.0, &spec)? + integrate(&f, 1.0, f64::INFINITY, &spec)?;
    if let Some(e) = failed.take() {
        return Err(e);
    }
    probability(
        "ber_quadrature",
        modulation.alpha * beta.sqrt() / (2.0 * PI.sqrt()) * v,
    )
}

/// `∫₀^∞ e^{−βt} t^{n−1/2} dt` and the same with an extra `ln t` factor.
fn gamma_moments(n: i32, beta: f64) -> (f64, f64) {
    let s = n as f64 + 0.5;
    let base = gamma(s) * beta.powf(-s);
    (base, base * (digamma(s) - beta.ln()))
}

/// High-SNR BER from the leading outage terms (FG and VGII only).
pub fn ber_asymptotic(
    scheme: RelayScheme,
    modulation: &ModulationParams,
    stats: &HopStatistics,
    zeta: f64,
) -> Result<f64> {
    check_zeta("ber_asymptotic", zeta)?;
    let (alpha, beta) = (modulation.alpha, modulation.beta);
    let pre = alpha * beta.sqrt() / (2.0 * PI.sqrt());
    match scheme {
        RelayScheme::Fg => {
            // P∞(t) = (C + D ln(t/γ̄₁)) (t/γ̄₁)ⁿ
            let g1 = stats.cfg.gamma1_bar;
            let (n, c, d) = fg_leading(stats, zeta)?;
            let (i0, ilog) = gamma_moments(n, beta);
            Ok(pre * g1.powi(-n) * ((c - d * g1.ln()) * i0 + d * ilog))
        }
        RelayScheme::Vgi if stats.cfg.rho1 <= VGI_RHO_LIMIT => {
            Err(Error::Unsupported("no high-SNR BER asymptote for VGI".into()))
        }
        RelayScheme::Vgi | RelayScheme::Vgii => {
            let (j1, a1, j2, a2) = vgii_leading(stats)?;
            let (i1, _) = gamma_moments(j1, beta);
            let (i2, _) = gamma_moments(j2, beta);
            Ok(pre * (a1 * zeta.powi(j1) * i1 + a2 * i2))
        }
    }
}
