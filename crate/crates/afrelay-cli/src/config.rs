//! The experiment file: one TOML document, exact key names, every field
//! checked before anything runs.

use std::fmt;
use std::path::Path;

use afrelay::channel::jakes_rho;
use afrelay::hpa::{ibo_to_asat, AmplifierOperatingPoint, HpaModel};
use afrelay::link::{db_to_linear, LinkConfig};
use afrelay::metrics::ModulationParams;
use afrelay::montecarlo::{Fidelity, McConfig};
use afrelay::relaying::RelayScheme;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKey {
    Fg,
    Vgi,
    Vgii,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HpaKey {
    Ideal,
    Sel,
    Sspa,
    Twta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulationKey {
    Bpsk,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FidelityKey {
    Surrogate,
    Full,
}

/// `[0, 5, 10]` or `"0:5:40"` (inclusive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SnrGrid {
    List(Vec<f64>),
    Range(String),
}

impl SnrGrid {
    pub fn points(&self) -> Result<Vec<f64>, ConfigError> {
        let pts = match self {
            SnrGrid::List(v) => v.clone(),
            SnrGrid::Range(s) => parse_range(s)?,
        };
        if pts.is_empty() {
            return Err(ConfigError::field("snr_db", "grid is empty"));
        }
        if let Some(x) = pts.iter().find(|x| !x.is_finite()) {
            return Err(ConfigError::field("snr_db", format!("non-finite point {x}")));
        }
        Ok(pts)
    }
}

fn parse_range(s: &str) -> Result<Vec<f64>, ConfigError> {
    let bad = || ConfigError::field("snr_db", format!("expected \"start:step:stop\", got {s:?}"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [start, step, stop] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(ConfigError::field(
            "snr_db",
            format!("range needs step > 0 and stop ≥ start, got {s:?}"),
        ));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 100_000 {
        return Err(ConfigError::field("snr_db", format!("range {s:?} has too many points")));
    }
    // Index times step, so the points do not accumulate rounding.
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

/// The file as written, with defaults filled in by serde.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n_relays: u32,
    pub rank: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doppler_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay_s: Option<f64>,
    #[serde(default = "default_scheme")]
    pub scheme: SchemeKey,
    #[serde(default = "default_hpa")]
    pub hpa: HpaKey,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ibo_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulation: Option<ModulationKey>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub snr_db: SnrGrid,
    #[serde(default)]
    pub gamma_th_db: f64,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Never echoed: results do not depend on it.
    #[serde(default, skip_serializing)]
    pub workers: Option<usize>,
    #[serde(default = "default_fidelity")]
    pub fidelity: FidelityKey,
}

fn default_scheme() -> SchemeKey {
    SchemeKey::Fg
}
fn default_hpa() -> HpaKey {
    HpaKey::Ideal
}
fn default_samples() -> u64 {
    1_000_000
}
fn default_seed() -> u64 {
    1
}
fn default_fidelity() -> FidelityKey {
    FidelityKey::Surrogate
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// TOML syntax, unknown key or wrong type; the message carries the line.
    Parse(String),
    /// A value that parsed but breaks a model constraint.
    Field { field: &'static str, detail: String },
    Io(String),
}

impl ConfigError {
    pub fn field(field: &'static str, detail: impl Into<String>) -> Self {
        ConfigError::Field {
            field,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse(m) => write!(f, "{m}"),
            ConfigError::Field { field, detail } => write!(f, "field `{field}`: {detail}"),
            ConfigError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Everything a command needs, built from a checked [`SystemConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub config: SystemConfig,
    pub link: LinkConfig,
    pub mc: McConfig,
    pub snr_db: Vec<f64>,
    pub gamma_th: f64,
}

pub fn parse_config(path: &Path) -> Result<Experiment, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    parse_str(&text)
}

pub fn parse_str(text: &str) -> Result<Experiment, ConfigError> {
    let cfg: SystemConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    cfg.resolve()
}

fn unit_interval(field: &'static str, v: f64) -> Result<f64, ConfigError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(ConfigError::field(field, format!("must lie in [0, 1], got {v}")));
    }
    Ok(v)
}

fn finite(field: &'static str, v: f64) -> Result<f64, ConfigError> {
    if !v.is_finite() {
        return Err(ConfigError::field(field, format!("must be finite, got {v}")));
    }
    Ok(v)
}

impl SystemConfig {
    /// Checks every constraint and builds the engine inputs.
    pub fn resolve(self) -> Result<Experiment, ConfigError> {
        if self.n_relays == 0 {
            return Err(ConfigError::field("n_relays", "need at least one relay"));
        }
        if self.rank < 1 || self.rank > self.n_relays {
            return Err(ConfigError::field(
                "rank",
                format!(
                    "rank k must satisfy 1 ≤ k ≤ N (got k = {}, N = {})",
                    self.rank, self.n_relays
                ),
            ));
        }
        let (rho1, rho2) = self.correlations()?;
        let hpa = self.amplifier()?;
        let modulation = self.modulation_params()?;
        let snr_db = self.snr_db.points()?;
        let gamma_th = db_to_linear(finite("gamma_th_db", self.gamma_th_db)?);
        if self.samples == 0 {
            return Err(ConfigError::field("samples", "must be at least 1"));
        }
        let workers = match self.workers {
            Some(0) => return Err(ConfigError::field("workers", "must be at least 1")),
            Some(w) => w,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        let scheme = match self.scheme {
            SchemeKey::Fg => RelayScheme::Fg,
            SchemeKey::Vgi => RelayScheme::Vgi,
            SchemeKey::Vgii => RelayScheme::Vgii,
        };
        let mut link = LinkConfig::new(self.n_relays, self.rank, rho1, scheme, hpa);
        link.rho2 = rho2;
        link.modulation = modulation;
        link.validate()
            .map_err(|e| ConfigError::field("hpa", e.to_string()))?;
        let mc = McConfig {
            samples: self.samples,
            seed: self.seed,
            workers,
            fidelity: match self.fidelity {
                FidelityKey::Surrogate => Fidelity::BussgangSurrogate,
                FidelityKey::Full => Fidelity::FullNonlinearity,
            },
        };
        Ok(Experiment {
            config: self,
            link,
            mc,
            snr_db,
            gamma_th,
        })
    }

    fn correlations(&self) -> Result<(f64, f64), ConfigError> {
        let direct = self.rho1.is_some() || self.rho2.is_some();
        let doppler = self.doppler_hz.is_some() || self.delay_s.is_some();
        match (direct, doppler) {
            (true, true) => Err(ConfigError::field(
                "rho1",
                "give either rho1/rho2 or doppler_hz + delay_s, not both",
            )),
            (false, true) => {
                let (Some(f), Some(t)) = (self.doppler_hz, self.delay_s) else {
                    return Err(ConfigError::field(
                        "doppler_hz",
                        "doppler_hz and delay_s must be given together",
                    ));
                };
                let rho = jakes_rho(f, t).map_err(|e| ConfigError::field("doppler_hz", e.to_string()))?;
                if rho < 0.0 {
                    return Err(ConfigError::field(
                        "doppler_hz",
                        format!("J0(2π f_d T_d) = {rho} is negative; the CSI model needs ρ ∈ [0, 1]"),
                    ));
                }
                Ok((rho, rho))
            }
            (_, false) => {
                let rho1 = unit_interval("rho1", self.rho1.unwrap_or(1.0))?;
                let rho2 = unit_interval("rho2", self.rho2.unwrap_or(rho1))?;
                Ok((rho1, rho2))
            }
        }
    }

    fn amplifier(&self) -> Result<HpaModel, ConfigError> {
        if self.smoothness.is_some() && self.hpa != HpaKey::Sspa {
            return Err(ConfigError::field("smoothness", "only applies to hpa = \"sspa\""));
        }
        if self.phi0.is_some() && self.hpa != HpaKey::Twta {
            return Err(ConfigError::field("phi0", "only applies to hpa = \"twta\""));
        }
        if self.hpa == HpaKey::Ideal {
            if self.ibo_db.is_some() {
                return Err(ConfigError::field("ibo_db", "does not apply to hpa = \"ideal\""));
            }
            return Ok(HpaModel::Ideal);
        }
        let Some(ibo) = self.ibo_db else {
            return Err(ConfigError::field("ibo_db", "required for a nonlinear hpa"));
        };
        let a_sat = ibo_to_asat(&AmplifierOperatingPoint {
            mean_output_power: 1.0,
            ibo_db: finite("ibo_db", ibo)?,
        })
        .map_err(|e| ConfigError::field("ibo_db", e.to_string()))?;
        let model = match self.hpa {
            HpaKey::Sel => HpaModel::Sel { a_sat },
            HpaKey::Sspa => HpaModel::Sspa {
                a_sat,
                smoothness: self.smoothness.unwrap_or(1.0),
            },
            HpaKey::Twta => HpaModel::Twta {
                a_sat,
                phi0: self.phi0.unwrap_or(0.0),
            },
            HpaKey::Ideal => unreachable!(),
        };
        let field = match self.hpa {
            HpaKey::Sspa => "smoothness",
            HpaKey::Twta => "phi0",
            _ => "ibo_db",
        };
        model.validate().map_err(|e| ConfigError::field(field, e.to_string()))?;
        Ok(model)
    }

    fn modulation_params(&self) -> Result<ModulationParams, ConfigError> {
        let raw = self.alpha.is_some() || self.beta.is_some();
        match (self.modulation, raw) {
            (Some(ModulationKey::Bpsk), true) => Err(ConfigError::field(
                "alpha",
                "alpha/beta conflict with modulation = \"bpsk\"; use modulation = \"custom\"",
            )),
            (None | Some(ModulationKey::Bpsk), false) => Ok(ModulationParams::BPSK),
            (Some(ModulationKey::Custom), false) => Err(ConfigError::field(
                "modulation",
                "\"custom\" needs alpha and beta",
            )),
            (_, true) => {
                let (Some(a), Some(b)) = (self.alpha, self.beta) else {
                    return Err(ConfigError::field("alpha", "alpha and beta must be given together"));
                };
                ModulationParams::new(a, b).map_err(|e| ConfigError::field("alpha", e.to_string()))
            }
        }
    }

    /// The configuration with defaults applied, as TOML.
    pub fn echo(&self) -> String {
        let mut c = self.clone();
        if c.modulation.is_none() {
            c.modulation = Some(if c.alpha.is_some() {
                ModulationKey::Custom
            } else {
                ModulationKey::Bpsk
            });
        }
        if c.doppler_hz.is_none() {
            c.rho1 = Some(c.rho1.unwrap_or(1.0));
            c.rho2 = Some(c.rho2.or(c.rho1).unwrap_or(1.0));
        }
        match c.hpa {
            HpaKey::Sspa => c.smoothness = Some(c.smoothness.unwrap_or(1.0)),
            HpaKey::Twta => c.phi0 = Some(c.phi0.unwrap_or(0.0)),
            _ => {}
        }
        toml::to_string(&c).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "n_relays = 1\nrank = 1\nsnr_db = [0, 10]\n";

    fn field_of(text: &str) -> &'static str {
        match parse_str(text).unwrap_err() {
            ConfigError::Field { field, .. } => field,
            other => panic!("expected a field error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_file_gets_defaults() {
        let e = parse_str(MINIMAL).unwrap();
        assert_eq!(e.snr_db, vec![0.0, 10.0]);
        assert_eq!((e.link.rho1, e.link.rho2), (1.0, 1.0));
        assert_eq!(e.link.hpa, HpaModel::Ideal);
        assert_eq!(e.link.modulation, ModulationParams::BPSK);
        assert_eq!(e.gamma_th, 1.0);
        let echo = e.config.echo();
        for key in ["scheme = \"fg\"", "hpa = \"ideal\"", "modulation = \"bpsk\"", "rho1 = 1.0", "seed = 1"] {
            assert!(echo.contains(key), "{key} missing from\n{echo}");
        }
        assert!(!echo.contains("workers"));
    }

    #[test]
    fn rank_above_relay_count() {
        let err = parse_str("n_relays = 3\nrank = 4\nsnr_db = [0]\n").unwrap_err();
        assert!(err.to_string().contains("rank k must satisfy 1 ≤ k ≤ N"), "{err}");
    }

    #[test]
    fn one_correlation_path_only() {
        let both = format!("{MINIMAL}rho1 = 0.9\ndoppler_hz = 10.0\ndelay_s = 0.001\n");
        assert_eq!(field_of(&both), "rho1");
        let half = format!("{MINIMAL}doppler_hz = 10.0\n");
        assert_eq!(field_of(&half), "doppler_hz");
        let far = format!("{MINIMAL}doppler_hz = 100.0\ndelay_s = 0.005\n");
        assert_eq!(field_of(&far), "doppler_hz");

        let e = parse_str(&format!("{MINIMAL}doppler_hz = 10.0\ndelay_s = 0.01\n")).unwrap();
        assert!((e.link.rho1 - 0.9037126420924663).abs() < 1e-12);
        assert_eq!(e.link.rho1, e.link.rho2);
    }

    #[test]
    fn unknown_and_mistyped_keys() {
        let err = parse_str(&format!("{MINIMAL}rho_1 = 0.9\n")).unwrap_err();
        assert!(matches!(err, ConfigError::Parse(ref m) if m.contains("rho_1")), "{err}");
        let err = parse_str("n_relays = 1\nrank = 1\nsnr_db = [0]\nscheme = \"af\"\n").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
    }

    #[test]
    fn amplifier_fields() {
        assert_eq!(field_of(&format!("{MINIMAL}hpa = \"sel\"\n")), "ibo_db");
        assert_eq!(field_of(&format!("{MINIMAL}ibo_db = 3.0\n")), "ibo_db");
        assert_eq!(field_of(&format!("{MINIMAL}hpa = \"sel\"\nibo_db = 3.0\nphi0 = 0.1\n")), "phi0");
        assert_eq!(
            field_of(&format!("{MINIMAL}hpa = \"sspa\"\nibo_db = 3.0\nsmoothness = 0.5\n")),
            "smoothness"
        );
        let e = parse_str(&format!("{MINIMAL}hpa = \"twta\"\nibo_db = 6.0\n")).unwrap();
        let HpaModel::Twta { a_sat, phi0 } = e.link.hpa else { panic!() };
        assert!((a_sat - 10f64.powf(0.3)).abs() < 1e-12 && phi0 == 0.0);
    }

    #[test]
    fn modulation_paths() {
        assert_eq!(field_of(&format!("{MINIMAL}alpha = 2.0\n")), "alpha");
        assert_eq!(field_of(&format!("{MINIMAL}modulation = \"custom\"\n")), "modulation");
        assert_eq!(field_of(&format!("{MINIMAL}modulation = \"bpsk\"\nalpha = 1.0\nbeta = 1.0\n")), "alpha");
        let e = parse_str(&format!("{MINIMAL}alpha = 2.0\nbeta = 0.5\n")).unwrap();
        assert_eq!(e.link.modulation, ModulationParams::new(2.0, 0.5).unwrap());
        assert!(e.config.echo().contains("modulation = \"custom\""));
    }

    #[test]
    fn snr_ranges() {
        let g = |s: &str| SnrGrid::Range(s.into()).points();
        assert_eq!(g("0:5:20").unwrap(), vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(g("0:0.1:0.3").unwrap().len(), 4);
        assert_eq!(g("0:7:20").unwrap(), vec![0.0, 7.0, 14.0]);
        assert!(g("0:0:10").is_err());
        assert!(g("10:1:0").is_err());
        assert!(g("1:2").is_err());
        assert!(SnrGrid::List(vec![]).points().is_err());
        assert_eq!(field_of("n_relays = 1\nrank = 1\nsnr_db = \"a:b:c\"\n"), "snr_db");
    }

    #[test]
    fn rho_bounds() {
        assert_eq!(field_of(&format!("{MINIMAL}rho1 = 1.5\n")), "rho1");
        assert_eq!(field_of(&format!("{MINIMAL}rho1 = 0.5\nrho2 = -0.1\n")), "rho2");
    }
}
