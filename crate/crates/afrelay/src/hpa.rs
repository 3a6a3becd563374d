//! Memoryless power amplifier models and their Bussgang linearization.
//!
//! An amplifier maps `φ` to `ψ = F_a(|φ|) exp(j(arg φ + F_p(|φ|)))`. For a
//! circular Gaussian input of power σ² the output splits as `ψ = δφ + τ` with
//! `τ` uncorrelated with `φ` and of power σ_τ².

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{erfc, erfcx, expint_e1_scaled, integrate, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HpaModel {
    Ideal,
    /// Soft envelope limiter (ideal clipper).
    Sel { a_sat: f64 },
    /// Rapp model.
    Sspa { a_sat: f64, smoothness: f64 },
    /// Saleh model with AM/PM amplitude `phi0`.
    Twta { a_sat: f64, phi0: f64 },
}

impl HpaModel {
    pub fn validate(&self) -> Result<()> {
        let a = match *self {
            HpaModel::Ideal => return Ok(()),
            HpaModel::Sel { a_sat } => a_sat,
            HpaModel::Sspa { a_sat, smoothness } => {
                if !(smoothness >= 1.0) || !smoothness.is_finite() {
                    return Err(Error::domain(
                        "HpaModel",
                        format!("SSPA smoothness must be finite and ≥ 1, got {smoothness}"),
                    ));
                }
                a_sat
            }
            HpaModel::Twta { a_sat, phi0 } => {
                if !phi0.is_finite() {
                    return Err(Error::domain("HpaModel", "TWTA phi0 must be finite"));
                }
                a_sat
            }
        };
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain("HpaModel", format!("a_sat must be positive, got {a}")));
        }
        Ok(())
    }

    pub fn a_sat(&self) -> Option<f64> {
        match *self {
            HpaModel::Ideal => None,
            HpaModel::Sel { a_sat } | HpaModel::Sspa { a_sat, .. } | HpaModel::Twta { a_sat, .. } => {
                Some(a_sat)
            }
        }
    }

    /// The same model with its saturation amplitude replaced.
    pub fn with_a_sat(&self, a: f64) -> HpaModel {
        match *self {
            HpaModel::Ideal => HpaModel::Ideal,
            HpaModel::Sel { .. } => HpaModel::Sel { a_sat: a },
            HpaModel::Sspa { smoothness, .. } => HpaModel::Sspa { a_sat: a, smoothness },
            HpaModel::Twta { phi0, .. } => HpaModel::Twta { a_sat: a, phi0 },
        }
    }
}

/// Linear gain δ and distortion power σ_τ² of the Bussgang decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BussgangParams {
    pub delta: f64,
    pub sigma_tau_sq: f64,
}

impl BussgangParams {
    pub const IDEAL: BussgangParams = BussgangParams {
        delta: 1.0,
        sigma_tau_sq: 0.0,
    };

    /// Distortion-to-signal ratio σ_τ²/(δ²σ²).
    pub fn kappa(&self, sigma_sq: f64) -> f64 {
        self.sigma_tau_sq / (self.delta * self.delta * sigma_sq)
    }
}

/// Mean amplifier input power and input back-off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifierOperatingPoint {
    pub mean_output_power: f64,
    pub ibo_db: f64,
}

impl Default for AmplifierOperatingPoint {
    fn default() -> Self {
        AmplifierOperatingPoint {
            mean_output_power: 1.0,
            ibo_db: 0.0,
        }
    }
}

pub fn ibo_to_asat(op: &AmplifierOperatingPoint) -> Result<f64> {
    if !(op.mean_output_power > 0.0) || !op.ibo_db.is_finite() {
        return Err(Error::domain(
            "ibo_to_asat",
            format!("invalid operating point {op:?}"),
        ));
    }
    Ok(op.mean_output_power.sqrt() * 10f64.powf(op.ibo_db / 20.0))
}

fn check_modulus(r: f64) -> Result<()> {
    if !(r >= 0.0) {
        return Err(Error::domain("hpa", format!("input modulus must be ≥ 0, got {r}")));
    }
    Ok(())
}

fn fa(model: &HpaModel, r: f64) -> f64 {
    match *model {
        HpaModel::Ideal => r,
        HpaModel::Sel { a_sat } => r.min(a_sat),
        HpaModel::Sspa { a_sat, smoothness } => {
            let v2 = 2.0 * smoothness;
            // (1 + x^{2ν})^{−1/(2ν)} written to stay finite for huge x.
            let x = r / a_sat;
            if x > 1.0 {
                a_sat * (1.0 + x.powf(-v2)).powf(-1.0 / v2)
            } else {
                r * (1.0 + x.powf(v2)).powf(-1.0 / v2)
            }
        }
        HpaModel::Twta { a_sat, .. } => a_sat * a_sat * r / (r * r + a_sat * a_sat),
    }
}

// fa(r) − r without cancellation where the model allows it.
fn fa_dev(model: &HpaModel, r: f64) -> f64 {
    match *model {
        HpaModel::Sel { a_sat } => (a_sat - r).min(0.0),
        HpaModel::Twta { a_sat, .. } => -r * r * r / (r * r + a_sat * a_sat),
        _ => fa(model, r) - r,
    }
}

fn fp(model: &HpaModel, r: f64) -> f64 {
    match *model {
        HpaModel::Twta { a_sat, phi0 } => phi0 * r * r / (r * r + a_sat * a_sat),
        _ => 0.0,
    }
}

/// AM/AM characteristic.
pub fn am_am(model: &HpaModel, input_modulus: f64) -> Result<f64> {
    check_modulus(input_modulus)?;
    Ok(fa(model, input_modulus))
}

/// AM/PM characteristic in radians.
pub fn am_pm(model: &HpaModel, input_modulus: f64) -> Result<f64> {
    check_modulus(input_modulus)?;
    Ok(fp(model, input_modulus))
}

/// Passes one complex baseband sample through the amplifier.
pub fn apply_nonlinearity(model: &HpaModel, input: Complex64) -> Complex64 {
    let r = input.norm();
    match *model {
        HpaModel::Ideal => input,
        _ if r == 0.0 => Complex64::new(0.0, 0.0),
        HpaModel::Twta { .. } => {
            let rot = Complex64::from_polar(1.0, fp(model, r));
            input * (fa(model, r) / r) * rot
        }
        _ => input * (fa(model, r) / r),
    }
}

fn check_sigma(sigma_sq: f64) -> Result<()> {
    if !(sigma_sq > 0.0) || !sigma_sq.is_finite() {
        return Err(Error::domain("bussgang", format!("sigma_sq must be positive, got {sigma_sq}")));
    }
    Ok(())
}

/// Closed-form Bussgang parameters for SEL, SSPA with ν = 1 and TWTA
/// (AM/PM ignored). Expressions are arranged so that no large terms cancel
/// at high back-off.
pub fn bussgang_closed_form(model: &HpaModel, sigma_sq: f64) -> Result<BussgangParams> {
    check_sigma(sigma_sq)?;
    model.validate()?;
    let a_sat = match model.a_sat() {
        None => return Ok(BussgangParams::IDEAL),
        Some(a) => a,
    };
    let s = a_sat / sigma_sq.sqrt();
    let a = s * s;
    let sqrt_pi = PI.sqrt();
    let (delta, tau) = match *model {
        HpaModel::Ideal => unreachable!(),
        HpaModel::Sel { .. } => {
            // δ = 1 − e^{−a} + (√π s/2) erfc(s) = 1 − ε
            let g = 1.0 - sqrt_pi * s * erfcx(s);
            let eps = (-a).exp() * (1.0 - 0.5 * sqrt_pi * s * erfcx(s));
            let delta = if a < 1.0 {
                1.0 - (-a).exp() + 0.5 * sqrt_pi * s * erfc(s)
            } else {
                1.0 - eps
            };
            // σ_τ²/σ² = 1 − e^{−a} − δ² = e^{−a}(1 − √π s erfcx(s)) − ε²
            let tau = if a < 1.0 {
                1.0 - (-a).exp() - delta * delta
            } else {
                (-a).exp() * g - eps * eps
            };
            (delta, tau)
        }
        HpaModel::Sspa { smoothness, .. } => {
            if smoothness != 1.0 {
                return Err(Error::Unsupported(format!(
                    "no closed-form Bussgang parameters for SSPA with smoothness {smoothness}; \
                     use bussgang_numeric"
                )));
            }
            let delta = 0.5 * s * (2.0 * s - sqrt_pi * erfcx(s) * (2.0 * a - 1.0));
            let e = expint_e1_scaled(a)?;
            (delta, a * (1.0 - a * e) - delta * delta)
        }
        HpaModel::Twta { .. } => {
            let e = expint_e1_scaled(a)?;
            let delta = a * (1.0 - a * e);
            (delta, a * a * ((1.0 + a) * e - 1.0) - delta * delta)
        }
    };
    Ok(BussgangParams {
        delta,
        sigma_tau_sq: sigma_sq * tau.max(0.0),
    })
}

fn radial_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-300,
        rel_tol: 1e-12,
        max_subdivisions: 2000,
    }
}

// Below this absolute error (unit input power) a quadrature that stalls on
// rounding noise is accepted.
const RADIAL_ABS_FLOOR: f64 = 1e-15;

// ∫₀^∞ g(r) 2r e^{−r²} dr with unit input power, split at the saturation knee.
fn rayleigh_mean<F: Fn(f64) -> f64>(g: F, knee: f64) -> Result<f64> {
    let spec = radial_spec();
    let f = |r: f64| g(r) * 2.0 * r * (-r * r).exp();
    let part = |lo: f64, hi: f64| match integrate(&f, lo, hi, &spec) {
        Err(Error::Quadrature {
            estimate, error, ..
        }) if error < RADIAL_ABS_FLOOR => Ok(estimate),
        r => r,
    };
    Ok(part(0.0, knee)? + part(knee, f64::INFINITY)?)
}

/// Bussgang parameters from their defining expectations,
/// `δ = E[φ*ψ]/E[|φ|²]` and `σ_τ² = E[|ψ − δφ|²]`, reduced to radial
/// integrals over the Rayleigh input modulus. Works for every model; the
/// returned δ is the modulus of the (complex, under AM/PM) linear gain.
pub fn bussgang_numeric(model: &HpaModel, sigma_sq: f64) -> Result<BussgangParams> {
    check_sigma(sigma_sq)?;
    model.validate()?;
    let a_sat = match model.a_sat() {
        None => return Ok(BussgangParams::IDEAL),
        Some(a) => a,
    };
    let sigma = sigma_sq.sqrt();
    // Work in the normalized modulus u = r/σ.
    let m = model.with_a_sat(a_sat / sigma);
    let knee = a_sat / sigma;
    // The deviation F(u) − u is integrated directly so that 1 − δ and σ_τ²
    // keep their relative accuracy at high back-off.
    let dev = |u: f64| match fp(&m, u) {
        0.0 => Complex64::new(fa_dev(&m, u), 0.0),
        p => Complex64::from_polar(fa(&m, u), p) - u,
    };
    let re = rayleigh_mean(|u| u * dev(u).re, knee)?;
    let im = rayleigh_mean(|u| u * dev(u).im, knee)?;
    let d = Complex64::new(1.0 + re, im);
    let shift = Complex64::new(re, im);
    let tau = rayleigh_mean(|u| (dev(u) - shift * u).norm_sqr(), knee)?;
    Ok(BussgangParams {
        delta: d.norm(),
        sigma_tau_sq: sigma_sq * tau,
    })
}

/// Bussgang parameters: closed form where one exists, numeric otherwise.
pub fn bussgang(model: &HpaModel, sigma_sq: f64) -> Result<BussgangParams> {
    match *model {
        HpaModel::Sspa { smoothness, .. } if smoothness != 1.0 => bussgang_numeric(model, sigma_sq),
        HpaModel::Twta { phi0, .. } if phi0 != 0.0 => bussgang_numeric(model, sigma_sq),
        _ => bussgang_closed_form(model, sigma_sq),
    }
}

/// Impairment factor `ζ = 1 + σ_τ²/(δ² G σ₀²)` with `G` a power gain.
pub fn zeta(bp: &BussgangParams, gain_power: f64, noise_var: f64) -> Result<f64> {
    if !(gain_power > 0.0) || !(noise_var > 0.0) {
        return Err(Error::domain(
            "zeta",
            format!("gain and noise variance must be positive, got {gain_power}, {noise_var}"),
        ));
    }
    if bp.sigma_tau_sq == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 + bp.sigma_tau_sq / (bp.delta * bp.delta * gain_power * noise_var))
}
