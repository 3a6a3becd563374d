use super::{check_threshold, check_zeta, probability};
use crate::channel::{hop1_moment, HopStatistics};
use crate::error::{Error, Result};
use crate::relaying::RelayScheme;
use crate::specfun::{digamma, expint_e1_scaled, k1};

/// Above this hop-1 correlation the VGI expressions are numerically
/// degenerate; VGI and VGII coincide at ρ₁ = 1.
pub const VGI_RHO_LIMIT: f64 = 0.999;

// Cancellation threshold when searching for the leading nonvanishing order.
const LEADING_TOL: f64 = 1e-10;
const MAX_ORDER: usize = 24;

fn fg_ccdf(t: f64, stats: &HopStatistics, zeta: f64) -> Result<f64> {
    let g1 = stats.cfg.gamma1_bar;
    let c = hop1_moment(1, stats)? + zeta;
    let a2 = stats.scale * stats.scale;
    let mut sum = 0.0;
    for term in stats.cross_terms() {
        let (u, r) = (term.u, term.r);
        let e = (-r * zeta * t / g1).exp();
        if e == 0.0 {
            continue;
        }
        let x = 2.0 / g1 * (u * r * c * t).sqrt();
        sum += term.w * (u * c * t / r).sqrt() * e * k1(x);
    }
    Ok(2.0 * a2 / g1 * sum)
}

fn vgii_ccdf(t: f64, stats: &HopStatistics, zeta: f64) -> Result<f64> {
    let g1 = stats.cfg.gamma1_bar;
    let a2 = stats.scale * stats.scale;
    let tt = t * (1.0 + t);
    let mut sum = 0.0;
    for term in stats.cross_terms() {
        let (u, r) = (term.u, term.r);
        let e = (-t / g1 * (u + zeta * r)).exp();
        if e == 0.0 {
            continue;
        }
        let x = 2.0 / g1 * (u * r * zeta * tt).sqrt();
        sum += term.w * (u * zeta * tt / r).sqrt() * e * k1(x);
    }
    Ok(2.0 * a2 / g1 * sum)
}

/// One exponential-times-E1 term of the VGI CCDF,
/// `w e^{−k t} (1 − z t e^{z t} E₁(z t))`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct VgiPart {
    pub w: f64,
    pub k: f64,
    pub z: f64,
}

pub(crate) fn vgi_parts(stats: &HopStatistics, zeta: f64) -> Result<Vec<VgiPart>> {
    let rho = stats.cfg.rho1;
    if rho > VGI_RHO_LIMIT {
        return Err(Error::domain(
            "outage_vgi",
            format!("rho1 = {rho} > {VGI_RHO_LIMIT}: VGI coincides with VGII here, use outage_vgii"),
        ));
    }
    let g1 = stats.cfg.gamma1_bar;
    let one_m = 1.0 - rho;
    let hop2 = stats.hop2_components();
    let mut out = Vec::new();
    for c1 in stats.hop1_selection_components() {
        let a = g1 / c1.mean + rho / one_m;
        for c2 in &hop2 {
            let b = g1 / c2.mean;
            let m = zeta + rho * (b - a * zeta) / (one_m * a * a);
            out.push(VgiPart {
                w: c1.weight * c2.weight,
                k: m / (one_m * g1),
                z: b / (one_m * c1.mean * a * a),
            });
        }
    }
    Ok(out)
}

fn vgi_ccdf(t: f64, stats: &HopStatistics, zeta: f64) -> Result<f64> {
    let mut sum = 0.0;
    for p in vgi_parts(stats, zeta)? {
        let e = (-p.k * t).exp();
        if e == 0.0 {
            continue;
        }
        let zt = p.z * t;
        let bracket = if zt == 0.0 {
            1.0
        } else {
            1.0 - zt * expint_e1_scaled(zt)?
        };
        sum += p.w * e * bracket;
    }
    Ok(sum)
}

/// Complementary CDF `P[γ ≥ t]` of the end-to-end SNDR, unclamped. VGI with
/// ρ₁ above [`VGI_RHO_LIMIT`] is evaluated as VGII.
pub fn ccdf(scheme: RelayScheme, t: f64, stats: &HopStatistics, zeta: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(1.0);
    }
    match scheme {
        RelayScheme::Fg => fg_ccdf(t, stats, zeta),
        RelayScheme::Vgi if stats.cfg.rho1 > VGI_RHO_LIMIT => vgii_ccdf(t, stats, zeta),
        RelayScheme::Vgi => vgi_ccdf(t, stats, zeta),
        RelayScheme::Vgii => vgii_ccdf(t, stats, zeta),
    }
}

/// Fixed-gain outage probability (exact under independent hops).
pub fn outage_fg(gamma_th: f64, stats: &HopStatistics, zeta: f64) -> Result<f64> {
    check_threshold("outage_fg", gamma_th)?;
    check_zeta("outage_fg", zeta)?;
    probability("outage_fg", 1.0 - fg_ccdf(gamma_th, stats, zeta)?)
}

/// VGII outage probability; the SNDR's `+ζ` term is kept through the
/// `γ(1+γ)` substitution, which is exact up to that constant.
pub fn outage_vgii(gamma_th: f64, stats: &HopStatistics, zeta: f64) -> Result<f64> {
    check_threshold("outage_vgii", gamma_th)?;
    check_zeta("outage_vgii", zeta)?;
    probability("outage_vgii", 1.0 - vgii_ccdf(gamma_th, stats, zeta)?)
}

/// VGI outage approximation. Requires ρ₁ ≤ [`VGI_RHO_LIMIT`].
pub fn outage_vgi(gamma_th: f64, stats: &HopStatistics, zeta: f64) -> Result<f64> {
    check_threshold("outage_vgi", gamma_th)?;
    check_zeta("outage_vgi", zeta)?;
    probability("outage_vgi", 1.0 - vgi_ccdf(gamma_th, stats, zeta)?)
}

/// Outage of `scheme`; VGI above [`VGI_RHO_LIMIT`] is redirected to VGII.
pub fn outage(scheme: RelayScheme, gamma_th: f64, stats: &HopStatistics, zeta: f64) -> Result<f64> {
    match scheme {
        RelayScheme::Fg => outage_fg(gamma_th, stats, zeta),
        RelayScheme::Vgi if stats.cfg.rho1 > VGI_RHO_LIMIT => outage_vgii(gamma_th, stats, zeta),
        RelayScheme::Vgi => outage_vgi(gamma_th, stats, zeta),
        RelayScheme::Vgii => outage_vgii(gamma_th, stats, zeta),
    }
}

/// Leading small-threshold term of the fixed-gain outage, `(C + D ln ε) εⁿ`
/// with `ε = t/γ̄₁`. Returned as `(n, C, D)`.
pub(crate) fn fg_leading(stats: &HopStatistics, zeta: f64) -> Result<(i32, f64, f64)> {
    let g1 = stats.cfg.gamma1_bar;
    let c = hop1_moment(1, stats)? + zeta;
    let a2 = stats.scale * stats.scale;
    let terms = stats.cross_terms();
    for n in 1..=MAX_ORDER {
        let (mut cn, mut dn, mut cabs, mut dabs) = (0.0, 0.0, 0.0, 0.0);
        for term in &terms {
            let (u, r) = (term.u, term.r);
            let beta = u * r * c / g1;
            let lnb = beta.ln();
            let pre = -a2 * term.w / r;
            // e^{−Rζε} coefficients and the ε-series of x K₁(x), x² = 4βε.
            let e = |p: usize| (-r * zeta).powi(p as i32) / factorial(p);
            let h = |j: usize| beta.powi(j as i32) / (factorial(j - 1) * factorial(j));
            let mut ct = e(n);
            let mut dt = 0.0;
            for j in 1..=n {
                let hj = h(j);
                let ej = e(n - j);
                ct += ej * hj * (lnb - digamma(j as f64) - digamma(j as f64 + 1.0));
                dt += ej * hj;
            }
            cn += pre * ct;
            dn += pre * dt;
            cabs += (pre * ct).abs();
            dabs += (pre * dt).abs();
        }
        if cn.abs() > LEADING_TOL * cabs || dn.abs() > LEADING_TOL * dabs {
            return Ok((n as i32, cn, dn));
        }
    }
    Err(Error::no_convergence(
        "outage_fg_asymptotic",
        format!("all expansion orders up to {MAX_ORDER} cancel"),
    ))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// High-SNR fixed-gain outage: the leading nonvanishing term of the
/// small-`t/γ̄₁` expansion of [`outage_fg`]. At ρ < 1 this is first order in
/// `t/γ̄₁` with a logarithmic correction; at ρ = 1 the first orders cancel and
/// the term decays with the full diversity order.
pub fn outage_fg_asymptotic(gamma_th: f64, stats: &HopStatistics, zeta: f64) -> Result<f64> {
    check_threshold("outage_fg_asymptotic", gamma_th)?;
    check_zeta("outage_fg_asymptotic", zeta)?;
    let (n, c, d) = fg_leading(stats, zeta)?;
    let eps = gamma_th / stats.cfg.gamma1_bar;
    Ok((c + d * eps.ln()) * eps.powi(n))
}

/// Leading Taylor term `a x^j` of `1 − Σ wᵢ e^{−x/mᵢ}` at the origin.
pub(crate) fn leading_taylor(weights_means: &[(f64, f64)]) -> Result<(i32, f64)> {
    let mut fact = 1.0;
    for j in 1..=MAX_ORDER {
        fact *= j as f64;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let (mut s, mut sabs) = (0.0, 0.0);
        for &(w, m) in weights_means {
            let v = w / m.powi(j as i32);
            s += v;
            sabs += v.abs();
        }
        if s.abs() > LEADING_TOL * sabs {
            return Ok((j as i32, sign * s / fact));
        }
    }
    Err(Error::no_convergence("leading_taylor", "all orders cancel"))
}

/// `(j₁, a₁, j₂, a₂)` with `P∞(t) = a₁ (ζt)^{j₁} + a₂ t^{j₂}`.
pub(crate) fn vgii_leading(stats: &HopStatistics) -> Result<(i32, f64, i32, f64)> {
    let h1: Vec<_> = stats.hop1_components().iter().map(|c| (c.weight, c.mean)).collect();
    let h2: Vec<_> = stats.hop2_components().iter().map(|c| (c.weight, c.mean)).collect();
    let (j1, a1) = leading_taylor(&h1)?;
    let (j2, a2) = leading_taylor(&h2)?;
    Ok((j1, a1, j2, a2))
}

/// High-SNR VGII outage `F₁(ζt) + F₂(t)` with each hop CDF replaced by its
/// leading Taylor term. At ρ < 1 this equals
/// `k²C(N,k)² (t/γ̄₁) Σ w (ζ + U/R)`.
pub fn outage_vgii_asymptotic(gamma_th: f64, stats: &HopStatistics, zeta: f64) -> Result<f64> {
    check_threshold("outage_vgii_asymptotic", gamma_th)?;
    check_zeta("outage_vgii_asymptotic", zeta)?;
    let (j1, a1, j2, a2) = vgii_leading(stats)?;
    Ok(a1 * (zeta * gamma_th).powi(j1) + a2 * gamma_th.powi(j2))
}

/// High-SNR outage of `scheme`. VGI has no asymptote and is rejected unless
/// ρ₁ is above [`VGI_RHO_LIMIT`], where it is evaluated as VGII.
pub fn outage_asymptotic(
    scheme: RelayScheme,
    gamma_th: f64,
    stats: &HopStatistics,
    zeta: f64,
) -> Result<f64> {
    match scheme {
        RelayScheme::Fg => outage_fg_asymptotic(gamma_th, stats, zeta),
        RelayScheme::Vgi if stats.cfg.rho1 > VGI_RHO_LIMIT => {
            outage_vgii_asymptotic(gamma_th, stats, zeta)
        }
        RelayScheme::Vgi => Err(Error::Unsupported("no high-SNR asymptote for VGI".into())),
        RelayScheme::Vgii => outage_vgii_asymptotic(gamma_th, stats, zeta),
    }
}
