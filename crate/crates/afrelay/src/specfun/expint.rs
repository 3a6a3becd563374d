use super::EULER_GAMMA;
use crate::error::{Error, Result};

// Series region for E1: x ≤ 1. Above that the continued fraction converges fast.
const E1_SERIES_MAX: f64 = 1.0;

fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -x / kf;
        let add = term / kf;
        sum += add;
        if add.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

// e^x E1(x) by the Legendre continued fraction, x > 1.
fn e1_scaled_cf(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Exponential integral E1(x) = ∫ₓ^∞ e^{-t}/t dt for x > 0.
pub fn expint_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("expint_e1", format!("requires x > 0, got {x}")));
    }
    Ok(if x <= E1_SERIES_MAX {
        e1_series(x)
    } else {
        (-x).exp() * e1_scaled_cf(x)
    })
}

/// e^x E1(x), finite for large x where E1 alone underflows.
pub fn expint_e1_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("expint_e1_scaled", format!("requires x > 0, got {x}")));
    }
    Ok(if x <= E1_SERIES_MAX {
        x.exp() * e1_series(x)
    } else {
        e1_scaled_cf(x)
    })
}

/// Exponential integral Ei(x) (principal value); Ei(x) = −E1(−x) for x < 0.
pub fn expint_ei(x: f64) -> Result<f64> {
    if x == 0.0 || x.is_nan() {
        return Err(Error::domain("expint_ei", "logarithmic singularity at x = 0"));
    }
    if x < 0.0 {
        return expint_e1(-x).map(|v| -v);
    }
    if x <= 40.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..500 {
            let kf = k as f64;
            term *= x / kf;
            let add = term / kf;
            sum += add;
            if add < 1e-17 * sum {
                break;
            }
        }
        Ok(EULER_GAMMA + x.ln() + sum)
    } else {
        let mut sum = 1.0;
        let mut term = 1.0;
        for k in 1..40 {
            let next = term * k as f64 / x;
            if next > term {
                break;
            }
            term = next;
            sum += term;
        }
        Ok(x.exp() / x * sum)
    }
}
