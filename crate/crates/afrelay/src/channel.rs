//! Rayleigh fading with outdated CSI and the statistics of the relay picked by
//! opportunistic selection.
//!
//! Per-hop SNRs are exponential with means `gamma1_bar`, `gamma2_bar`. The
//! selected relay's hop-1 SNR has a density that is a signed mixture of
//! exponentials; [`HopStatistics`] holds its coefficient tables.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::specfun::{bessel_j0, binomial};

/// Relay count, selection rank and per-hop average SNRs / CSI correlations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingConfig {
    pub n_relays: u32,
    /// Rank of the selected relay; `rank == n_relays` picks the best one.
    pub rank: u32,
    pub gamma1_bar: f64,
    pub gamma2_bar: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl FadingConfig {
    pub fn new(
        n_relays: u32,
        rank: u32,
        gamma1_bar: f64,
        gamma2_bar: f64,
        rho1: f64,
        rho2: f64,
    ) -> Result<Self> {
        let cfg = FadingConfig {
            n_relays,
            rank,
            gamma1_bar,
            gamma2_bar,
            rho1,
            rho2,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_relays == 0 || self.rank == 0 || self.rank > self.n_relays {
            return Err(Error::domain(
                "FadingConfig",
                format!(
                    "rank k must satisfy 1 ≤ k ≤ N (got k = {}, N = {})",
                    self.rank, self.n_relays
                ),
            ));
        }
        for (name, g) in [("gamma1_bar", self.gamma1_bar), ("gamma2_bar", self.gamma2_bar)] {
            if !(g > 0.0) || !g.is_finite() {
                return Err(Error::domain("FadingConfig", format!("{name} must be positive, got {g}")));
            }
        }
        for (name, r) in [("rho1", self.rho1), ("rho2", self.rho2)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::domain("FadingConfig", format!("{name} must lie in [0, 1], got {r}")));
            }
        }
        Ok(())
    }

    /// Same fading with both average SNRs replaced.
    pub fn with_snr(&self, gamma1_bar: f64, gamma2_bar: f64) -> Self {
        FadingConfig {
            gamma1_bar,
            gamma2_bar,
            ..*self
        }
    }
}

/// Correlation between outdated and current channel under the Jakes model,
/// `J0(2π f_d T_d)`.
pub fn jakes_rho(doppler_hz: f64, delay_s: f64) -> Result<f64> {
    if !(doppler_hz >= 0.0) || !(delay_s >= 0.0) {
        return Err(Error::domain(
            "jakes_rho",
            format!("doppler and delay must be non-negative, got {doppler_hz}, {delay_s}"),
        ));
    }
    bessel_j0(2.0 * PI * doppler_hz * delay_s)
}

/// A channel coefficient and the delayed estimate used for selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsiPair {
    pub current: Complex64,
    pub outdated: Complex64,
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, mean_power: f64) -> Complex64 {
    let s = (0.5 * mean_power).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Draws `h ~ CN(0, mean_power)` and `h̃ = √ρ h + √(1−ρ) w` with `w` an
/// independent copy of `h`.
pub fn sample_csi_pair<R: Rng + ?Sized>(rng: &mut R, mean_power: f64, rho: f64) -> CsiPair {
    let current = complex_gaussian(rng, mean_power);
    if rho >= 1.0 {
        return CsiPair {
            current,
            outdated: current,
        };
    }
    let w = complex_gaussian(rng, mean_power);
    CsiPair {
        current,
        outdated: current * rho.sqrt() + w * (1.0 - rho).sqrt(),
    }
}

/// Coefficient tables of the selected relay's hop SNR distributions.
///
/// Row `n` (or `m`) runs over `0..rank`; column 0/1 is the `j` (or `i`) index.
/// Hop 1 density: `(A/γ̄₁) Σ P_n Q_{n,j} exp(−R_{n,j} x/γ̄₁)`;
/// hop 2 CDF: `1 − A Σ S_m T_{m,i} exp(−U_{m,i} x/γ̄₁)`, with `A = k·C(N,k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HopStatistics {
    pub cfg: FadingConfig,
    pub p: Vec<f64>,
    pub s: Vec<f64>,
    pub q: Vec<[f64; 2]>,
    pub r: Vec<[f64; 2]>,
    pub t: Vec<[f64; 2]>,
    pub u: Vec<[f64; 2]>,
    pub gamma_bar: f64,
    /// `k·C(N,k)`
    pub scale: f64,
}

/// One term of the product of the two hop expansions, `w = S_m P_n T_{m,i} Q_{n,j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossTerm {
    pub w: f64,
    pub r: f64,
    pub u: f64,
}

/// Exponential component of a hop SNR law: probability weight and mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub mean: f64,
}

pub fn hop_statistics(cfg: &FadingConfig) -> Result<HopStatistics> {
    cfg.validate()?;
    let (nr, k) = (cfg.n_relays, cfg.rank);
    let (g1, g2) = (cfg.gamma1_bar, cfg.gamma2_bar);
    let gb = g1 * g2 / (g1 + g2);
    let mut st = HopStatistics {
        cfg: *cfg,
        p: Vec::with_capacity(k as usize),
        s: Vec::with_capacity(k as usize),
        q: Vec::with_capacity(k as usize),
        r: Vec::with_capacity(k as usize),
        t: Vec::with_capacity(k as usize),
        u: Vec::with_capacity(k as usize),
        gamma_bar: gb,
        scale: k as f64 * binomial(nr, k),
    };
    for n in 0..k {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let c = sign * binomial(k - 1, n);
        let l = (nr - k + n + 1) as f64;
        st.p.push(c / (1.0 + g2 / gb * (l - 1.0)));
        st.s.push(c / (1.0 + g1 / gb * (l - 1.0)));

        let (q2, r2) = if cfg.rho1 >= 1.0 {
            ((l - 1.0) * g2 / gb, l * g1 / gb)
        } else {
            let d1 = cfg.rho1 * gb + (1.0 - cfg.rho1) * l * g1;
            ((l - 1.0) * g2 / d1, l * g1 / d1)
        };
        st.q.push([1.0, q2]);
        st.r.push([1.0, r2]);

        let d2 = if cfg.rho2 >= 1.0 {
            gb
        } else {
            cfg.rho2 * gb + (1.0 - cfg.rho2) * l * g2
        };
        st.t.push([1.0, (l - 1.0) * g1 / (l * g2)]);
        st.u.push([g1 / g2, l * g1 / d2]);
    }
    Ok(st)
}

impl HopStatistics {
    pub fn rank(&self) -> usize {
        self.p.len()
    }

    /// All `4k²` terms of the double expansion used by the outage, BER and
    /// capacity closed forms. Zero-weight terms are dropped.
    pub fn cross_terms(&self) -> Vec<CrossTerm> {
        let k = self.rank();
        let mut out = Vec::with_capacity(4 * k * k);
        for m in 0..k {
            for n in 0..k {
                for i in 0..2 {
                    for j in 0..2 {
                        let w = self.s[m] * self.p[n] * self.t[m][i] * self.q[n][j];
                        if w != 0.0 {
                            out.push(CrossTerm {
                                w,
                                r: self.r[n][j],
                                u: self.u[m][i],
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Exponential components of the realized hop-1 SNR of the selected relay.
    pub fn hop1_components(&self) -> Vec<Component> {
        let g1 = self.cfg.gamma1_bar;
        let mut out = Vec::new();
        for n in 0..self.rank() {
            for j in 0..2 {
                let weight = self.scale * self.p[n] * self.q[n][j] / self.r[n][j];
                if weight != 0.0 {
                    out.push(Component {
                        weight,
                        mean: g1 / self.r[n][j],
                    });
                }
            }
        }
        out
    }

    /// Exponential components of the hop-1 SNR seen at selection time (the
    /// outdated estimate). Same law as the realized SNR with `ρ₁ = 1`.
    pub fn hop1_selection_components(&self) -> Vec<Component> {
        let (nr, k) = (self.cfg.n_relays, self.cfg.rank);
        let g1 = self.cfg.gamma1_bar;
        let g2 = self.cfg.gamma2_bar;
        let mut out = Vec::new();
        for n in 0..self.rank() {
            let l = (nr - k) as f64 + n as f64 + 1.0;
            out.push(Component {
                weight: self.scale * self.p[n],
                mean: g1,
            });
            if l > 1.0 {
                out.push(Component {
                    weight: self.scale * self.p[n] * (l - 1.0) * g2 / (l * g1),
                    mean: self.gamma_bar / l,
                });
            }
        }
        out
    }

    /// Exponential components of the realized hop-2 SNR of the selected relay.
    pub fn hop2_components(&self) -> Vec<Component> {
        let g1 = self.cfg.gamma1_bar;
        let mut out = Vec::new();
        for m in 0..self.rank() {
            for i in 0..2 {
                let weight = self.scale * self.s[m] * self.t[m][i];
                if weight != 0.0 {
                    out.push(Component {
                        weight,
                        mean: g1 / self.u[m][i],
                    });
                }
            }
        }
        out
    }
}

fn check_x(what: &'static str, x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return Err(Error::domain(what, format!("requires x ≥ 0, got {x}")));
    }
    Ok(())
}

/// Density of the realized hop-1 SNR of the selected relay.
pub fn ordered_pdf_hop1(x: f64, stats: &HopStatistics) -> Result<f64> {
    check_x("ordered_pdf_hop1", x)?;
    let g1 = stats.cfg.gamma1_bar;
    let mut sum = 0.0;
    for n in 0..stats.rank() {
        for j in 0..2 {
            sum += stats.p[n] * stats.q[n][j] * (-stats.r[n][j] * x / g1).exp();
        }
    }
    Ok(stats.scale / g1 * sum)
}

/// CDF of the realized hop-1 SNR of the selected relay.
pub fn ordered_cdf_hop1(x: f64, stats: &HopStatistics) -> Result<f64> {
    check_x("ordered_cdf_hop1", x)?;
    let tail: f64 = stats
        .hop1_components()
        .iter()
        .map(|c| c.weight * (-x / c.mean).exp())
        .sum();
    Ok(1.0 - tail)
}

/// CDF of the realized hop-2 SNR of the selected relay.
pub fn ordered_cdf_hop2(x: f64, stats: &HopStatistics) -> Result<f64> {
    check_x("ordered_cdf_hop2", x)?;
    let g1 = stats.cfg.gamma1_bar;
    let mut sum = 0.0;
    for m in 0..stats.rank() {
        for i in 0..2 {
            sum += stats.s[m] * stats.t[m][i] * (-stats.u[m][i] * x / g1).exp();
        }
    }
    Ok(1.0 - stats.scale * sum)
}

/// `E[γ₁ʳ]` of the realized hop-1 SNR of the selected relay, in closed form.
pub fn hop1_moment(order: u32, stats: &HopStatistics) -> Result<f64> {
    if order == 0 {
        return Err(Error::domain("hop1_moment", "order must be at least 1"));
    }
    let cfg = &stats.cfg;
    let (g1, g2, rho) = (cfg.gamma1_bar, cfg.gamma2_bar, cfg.rho1);
    let r = order as i32;
    let fact: f64 = (1..=order).map(f64::from).product();
    let mut sum = 0.0;
    for n in 0..stats.rank() {
        let l = (cfg.n_relays - cfg.rank) as f64 + n as f64 + 1.0;
        let d1 = rho * stats.gamma_bar + (1.0 - rho) * l * g1;
        sum += stats.p[n] * (g1.powi(r + 1) + (l - 1.0) / l * g2 * (d1 / l).powi(r));
    }
    Ok(stats.scale / g1 * fact * sum)
}
