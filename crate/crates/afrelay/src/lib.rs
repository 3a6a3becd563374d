//! Performance analysis of dual-hop amplify-and-forward relaying with
//! opportunistic relay selection, outdated CSI and nonlinear power amplifiers.
//!
//! The analytic side ([`metrics`]) evaluates outage, BER and capacity from the
//! selected relay's hop statistics ([`channel`]) and a Bussgang impairment
//! factor ([`hpa`]). The simulation side ([`montecarlo`]) draws the channels,
//! runs the selection and measures the same quantities directly.

pub mod channel;
pub mod error;
pub mod hpa;
pub mod link;
pub mod metrics;
pub mod montecarlo;
pub mod relaying;
pub mod specfun;

pub use error::{Error, Result};
pub use link::LinkConfig;
