use std::f64::consts::LN_2;

use super::check_zeta;
use super::outage::{ccdf, vgi_parts};
use crate::channel::HopStatistics;
use crate::error::{Error, Result};
use crate::hpa::BussgangParams;
use crate::relaying::RelayScheme;
use crate::specfun::{expint_e1_scaled, integrate, QuadratureSpec, EULER_GAMMA};

/// Ergodic capacity `(1/(2 ln 2)) ∫₀^∞ (1 − F(γ))/(1 + γ) dγ` in bits/s/Hz,
/// the factor ½ accounting for the two time slots.
pub fn capacity(scheme: RelayScheme, stats: &HopStatistics, zeta: f64) -> Result<f64> {
    check_zeta("capacity", zeta)?;
    let spec = QuadratureSpec {
        abs_tol: 1e-12,
        rel_tol: 1e-9,
        max_subdivisions: 2000,
    };
    let failed = std::cell::Cell::new(None);
    let tail = |t: f64| match ccdf(scheme, t, stats, zeta) {
        Ok(s) => s,
        Err(e) => {
            failed.set(Some(e));
            0.0
        }
    };
    let head = integrate(|t| tail(t) / (1.0 + t), 0.0, 1.0, &spec)?;
    // t = e^u spreads the slowly decaying tail over a short range.
    let body = integrate(
        |u: f64| {
            let t = u.exp();
            // Every CCDF decays exponentially; past ~700 e-folds t overflows.
            if u > 700.0 {
                return 0.0;
            }
            tail(t) * t / (1.0 + t)
        },
        0.0,
        f64::INFINITY,
        &spec,
    )?;
    if let Some(e) = failed.take() {
        return Err(e);
    }
    let c = (head + body) / (2.0 * LN_2);
    if c < -1e-9 {
        return Err(Error::OutOfRange {
            what: "capacity",
            value: c,
        });
    }
    Ok(c.max(0.0))
}

/// VGI capacity with the E₁ factor `1 − zγ e^{zγ} E₁(zγ) ≈ 1 + zγ(ln(zγ₀) + γₑ)`
/// of each CCDF term, the log frozen at the term's mean `γ₀ = 1/K`. The
/// linear bracket integrates in closed form against `e^{−Kγ}/(1+γ)`.
pub fn capacity_vgi_closed(stats: &HopStatistics, zeta: f64) -> Result<f64> {
    check_zeta("capacity_vgi_closed", zeta)?;
    let mut sum = 0.0;
    for p in vgi_parts(stats, zeta)? {
        if !(p.k > 0.0) {
            return Err(Error::domain(
                "capacity_vgi_closed",
                format!("non-integrable term, K = {}", p.k),
            ));
        }
        let nu = p.z * ((p.z / p.k).ln() + EULER_GAMMA);
        sum += p.w * (nu / p.k + (1.0 - nu) * expint_e1_scaled(p.k)?);
    }
    Ok(sum / (2.0 * LN_2))
}

/// High-SNR capacity limit `½ log₂(1 + δ²σ²/σ_τ²)`; infinite for ideal
/// hardware.
pub fn capacity_ceiling(bp: &BussgangParams, sigma_sq: f64) -> f64 {
    if bp.sigma_tau_sq <= 0.0 {
        return f64::INFINITY;
    }
    0.5 * (1.0 + bp.delta * bp.delta * sigma_sq / bp.sigma_tau_sq).log2()
}
