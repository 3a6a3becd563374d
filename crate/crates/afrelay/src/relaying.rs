//! Relay selection and end-to-end SNDR of the three amplify-and-forward
//! gain policies.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelayScheme {
    /// Fixed gain from the average hop-1 power.
    Fg,
    /// Variable gain from the outdated hop-1 estimate taken at selection time.
    Vgi,
    /// Variable gain from the current hop-1 channel.
    Vgii,
}

impl RelayScheme {
    pub const ALL: [RelayScheme; 3] = [RelayScheme::Fg, RelayScheme::Vgi, RelayScheme::Vgii];

    pub fn name(&self) -> &'static str {
        match self {
            RelayScheme::Fg => "fg",
            RelayScheme::Vgi => "vgi",
            RelayScheme::Vgii => "vgii",
        }
    }
}

impl fmt::Display for RelayScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Hop SNRs of the selected relay: the estimates used for selection and the
/// values the transmission actually sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSample {
    pub gamma1_outdated: f64,
    pub gamma1_current: f64,
    pub gamma2_outdated: f64,
    pub gamma2_current: f64,
}

/// Index of the relay whose bottleneck `min(γ₁, γ₂)` has rank `rank` in
/// ascending order, so `rank == len` is the best relay. Among equal
/// bottlenecks the later index ranks higher.
pub fn ors_select(samples: &[(f64, f64)], rank: usize) -> Result<usize> {
    if samples.is_empty() {
        return Err(Error::domain("ors_select", "no relays to select from"));
    }
    if rank == 0 || rank > samples.len() {
        return Err(Error::domain(
            "ors_select",
            format!("rank {rank} outside 1..={}", samples.len()),
        ));
    }
    Ok(select_by_rank(samples.len(), rank, |i| samples[i].0.min(samples[i].1)))
}

/// Allocation-free core of [`ors_select`] over an indexed bottleneck.
pub(crate) fn select_by_rank<F: Fn(usize) -> f64>(n: usize, rank: usize, bottleneck: F) -> usize {
    if rank == n {
        let mut best = 0;
        let mut best_v = bottleneck(0);
        for i in 1..n {
            let v = bottleneck(i);
            if v >= best_v {
                best = i;
                best_v = v;
            }
        }
        return best;
    }
    for i in 0..n {
        let bi = bottleneck(i);
        let mut pos = 0;
        for j in 0..n {
            let bj = bottleneck(j);
            if bj < bi || (bj == bi && j < i) {
                pos += 1;
            }
        }
        if pos == rank - 1 {
            return i;
        }
    }
    unreachable!("ranks are a permutation of 0..n")
}

/// Fixed-gain SNDR, `γ₁γ₂ / (ζγ₂ + E[γ₁] + ζ)`.
pub fn sndr_fg(g1: f64, g2: f64, zeta: f64, mean_g1: f64) -> f64 {
    g1 * g2 / (zeta * g2 + mean_g1 + zeta)
}

/// SNDR when the gain is computed from `gain_g1` (the selection-time hop-1
/// estimate) while the signal experiences `g1`, `g2`.
pub fn sndr_vgi(g1: f64, g2: f64, gain_g1: f64, zeta: f64) -> f64 {
    g1 * g2 / (zeta * g2 + gain_g1 + zeta)
}

/// SNDR when the gain tracks the current hop-1 channel.
pub fn sndr_vgii(g1: f64, g2: f64, zeta: f64) -> f64 {
    g1 * g2 / (zeta * g2 + g1 + zeta)
}

/// Realized SNDR of `scheme` on one link sample.
pub fn sndr(scheme: RelayScheme, s: &LinkSample, zeta: f64, mean_g1: f64) -> f64 {
    match scheme {
        RelayScheme::Fg => sndr_fg(s.gamma1_current, s.gamma2_current, zeta, mean_g1),
        RelayScheme::Vgi => sndr_vgi(s.gamma1_current, s.gamma2_current, s.gamma1_outdated, zeta),
        RelayScheme::Vgii => sndr_vgii(s.gamma1_current, s.gamma2_current, zeta),
    }
}

/// Power gain that brings the amplifier input to mean power `sigma_sq`.
///
/// Hop-1 channel powers are recovered from the sample SNRs as
/// `|h|² = γ σ₀² / P₁`; `mean_h1_sq` is used by the fixed-gain scheme.
pub fn relay_gain(
    scheme: RelayScheme,
    sample: &LinkSample,
    sigma_sq: f64,
    p1: f64,
    noise_var: f64,
    mean_h1_sq: f64,
) -> Result<f64> {
    if !(sigma_sq > 0.0) || !(p1 > 0.0) || !(noise_var > 0.0) || !(mean_h1_sq >= 0.0) {
        return Err(Error::domain("relay_gain", "powers must be positive"));
    }
    let received = match scheme {
        RelayScheme::Fg => mean_h1_sq * p1,
        RelayScheme::Vgi => sample.gamma1_outdated * noise_var,
        RelayScheme::Vgii => sample.gamma1_current * noise_var,
    };
    Ok(sigma_sq / (received + noise_var))
}
