//! A complete link description and its analytic evaluation at one SNR.

use crate::channel::{hop_statistics, FadingConfig, HopStatistics};
use crate::error::{Error, Result};
use crate::hpa::{bussgang, BussgangParams, HpaModel};
use crate::metrics::{
    ber, capacity, capacity_ceiling, link_zeta, outage, outage_asymptotic, ModulationParams,
    PerformancePoint, Provenance, Tagged, VGI_RHO_LIMIT,
};
use crate::relaying::RelayScheme;

/// Everything but the SNR axis: relays, CSI quality, gain policy, amplifier.
///
/// Both hops share the swept average SNR unless `hop2_offset_db` is set, in
/// which case `γ̄₂ = γ̄₁ · 10^{offset/10}`. Noise variance is 1 and the
/// amplifier input is normalized to mean power `sigma_sq`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    pub n_relays: u32,
    pub rank: u32,
    pub rho1: f64,
    pub rho2: f64,
    pub scheme: RelayScheme,
    pub hpa: HpaModel,
    pub modulation: ModulationParams,
    pub sigma_sq: f64,
    pub hop2_offset_db: f64,
}

impl LinkConfig {
    pub fn new(n_relays: u32, rank: u32, rho: f64, scheme: RelayScheme, hpa: HpaModel) -> Self {
        LinkConfig {
            n_relays,
            rank,
            rho1: rho,
            rho2: rho,
            scheme,
            hpa,
            modulation: ModulationParams::BPSK,
            sigma_sq: 1.0,
            hop2_offset_db: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.fading(0.0)?;
        self.hpa.validate()?;
        ModulationParams::new(self.modulation.alpha, self.modulation.beta)?;
        if !(self.sigma_sq > 0.0) {
            return Err(Error::domain("LinkConfig", "sigma_sq must be positive"));
        }
        Ok(())
    }

    pub fn gamma_bars(&self, snr_db: f64) -> (f64, f64) {
        let g1 = db_to_linear(snr_db);
        (g1, g1 * db_to_linear(self.hop2_offset_db))
    }

    pub fn fading(&self, snr_db: f64) -> Result<FadingConfig> {
        let (g1, g2) = self.gamma_bars(snr_db);
        FadingConfig::new(self.n_relays, self.rank, g1, g2, self.rho1, self.rho2)
    }

    pub fn stats(&self, snr_db: f64) -> Result<HopStatistics> {
        hop_statistics(&self.fading(snr_db)?)
    }

    /// Bussgang parameters at the nominal amplifier input power.
    pub fn bussgang(&self) -> Result<BussgangParams> {
        bussgang(&self.hpa, self.sigma_sq)
    }

    pub fn zeta(&self, stats: &HopStatistics) -> Result<f64> {
        link_zeta(&self.bussgang()?, stats, self.sigma_sq)
    }

    pub fn ceiling(&self) -> Result<f64> {
        Ok(capacity_ceiling(&self.bussgang()?, self.sigma_sq))
    }
}

/// The single dB-to-linear conversion used throughout.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Analytic outage, its asymptote, BER and capacity at one SNR. Metrics that
/// fail are left empty and their errors returned alongside.
pub fn analyze(
    link: &LinkConfig,
    snr_db: f64,
    gamma_th: f64,
) -> Result<(PerformancePoint, Vec<String>)> {
    let stats = link.stats(snr_db)?;
    let zeta = link.zeta(&stats)?;
    let mut notes = Vec::new();
    let mut keep = |what: &str, r: Result<f64>, provenance: Provenance| match r {
        Ok(value) => Some(Tagged { value, provenance }),
        Err(e) => {
            notes.push(format!("{what}: {e}"));
            None
        }
    };
    let scheme = link.scheme;
    let point = PerformancePoint {
        snr_db,
        outage: keep("outage", outage(scheme, gamma_th, &stats, zeta), Provenance::ClosedForm),
        outage_asymptotic: if scheme == RelayScheme::Vgi && link.rho1 <= VGI_RHO_LIMIT
        {
            None
        } else {
            keep(
                "outage_asymptotic",
                outage_asymptotic(scheme, gamma_th, &stats, zeta),
                Provenance::Asymptote,
            )
        },
        ber: keep(
            "ber",
            ber(scheme, &link.modulation, &stats, zeta),
            if scheme == RelayScheme::Fg || (scheme == RelayScheme::Vgi && link.rho1 <= VGI_RHO_LIMIT) {
                Provenance::ClosedForm
            } else {
                Provenance::Quadrature
            },
        ),
        capacity: keep("capacity", capacity(scheme, &stats, zeta), Provenance::Quadrature),
    };
    if scheme == RelayScheme::Vgi && link.rho1 > VGI_RHO_LIMIT {
        notes.push(format!(
            "rho1 = {} > {}: VGI evaluated with the VGII expressions",
            link.rho1,
            VGI_RHO_LIMIT
        ));
    }
    Ok((point, notes))
}
