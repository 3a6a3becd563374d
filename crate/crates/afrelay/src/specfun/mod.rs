//! Special functions and adaptive quadrature, all real-argument and f64.

mod bessel;
mod erf;
mod expint;
mod gamma;
mod hyper;
mod quad;

pub use bessel::{bessel_j0, bessel_k0, bessel_k1};
pub(crate) use bessel::k1;
pub use erf::{erf, erfc, erfcx, gauss_q};
pub use expint::{expint_e1, expint_e1_scaled, expint_ei};
pub use gamma::{binomial, digamma, gamma, ln_gamma, pochhammer};
pub use hyper::{hyp2f1, hyperu, whittaker_w};
pub use quad::{integrate, QuadratureSpec};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_60;
