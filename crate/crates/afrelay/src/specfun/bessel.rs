use std::f64::consts::{FRAC_PI_4, PI};

use super::{digamma, EULER_GAMMA};
use crate::error::{Error, Result};

// Trapezoid nodes for J0 on one period; aliasing error is O(J_M(x)).
const J0_NODES: usize = 128;
const J0_TRAPEZOID_MAX: f64 = 25.0;
const K_SERIES_MAX: f64 = 2.0;

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("bessel_j0", format!("non-finite argument {x}")));
    }
    let x = x.abs();
    if x <= J0_TRAPEZOID_MAX {
        // J0(x) = (1/2π) ∫ cos(x sin θ) dθ over a full period.
        let step = 2.0 * PI / J0_NODES as f64;
        let sum: f64 = (0..J0_NODES)
            .map(|j| (x * (step * j as f64).sin()).cos())
            .sum();
        Ok(sum / J0_NODES as f64)
    } else {
        Ok(j0_hankel(x))
    }
}

fn j0_hankel(x: f64) -> f64 {
    // a_k = Π_{j≤k} (−(2j−1)²) / (k! 8^k)
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut xp = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..200 {
        if k > 0 {
            let kf = k as f64;
            a *= -((2.0 * kf - 1.0).powi(2)) / (8.0 * kf);
            xp /= x;
        }
        let term = a * xp;
        if term.abs() > last || term.abs() < 1e-17 {
            break;
        }
        last = term.abs();
        // P collects even k, Q odd k, both with alternating sign (−1)^{⌊k/2⌋}.
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

// I0, I1 and K0, K1 by power series for small x.
fn k01_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let lnh = (0.5 * x).ln();
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut t = 1.0; // y^k / (k!)^2
    let mut harmonic = 0.0;
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            t *= y / (kf * kf);
            harmonic += 1.0 / kf;
        }
        i0 += t;
        let t1 = t / (kf + 1.0); // y^k/(k!(k+1)!)
        i1 += t1;
        s0 += harmonic * t;
        s1 += (digamma(kf + 1.0) + digamma(kf + 2.0)) * t1;
        if t1 < 1e-18 * i1 {
            break;
        }
    }
    let i1 = 0.5 * x * i1;
    let k0 = -(lnh + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + lnh * i1 - 0.25 * x * s1;
    (k0, k1)
}

// Steed's continued fraction (Temme's CF2 for ν = 0), returning e^x K0, e^x K1.
fn k01_scaled_cf(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-16 {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

pub(crate) fn k1(x: f64) -> f64 {
    if x <= K_SERIES_MAX {
        k01_series(x).1
    } else if x > 705.0 {
        0.0
    } else {
        (-x).exp() * k01_scaled_cf(x).1
    }
}

/// Modified Bessel function of the second kind, order one.
pub fn bessel_k1(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(Error::domain("bessel_k1", format!("requires finite x > 0, got {x}")));
    }
    Ok(k1(x))
}

/// Modified Bessel function of the second kind, order zero.
pub fn bessel_k0(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(Error::domain("bessel_k0", format!("requires finite x > 0, got {x}")));
    }
    Ok(if x <= K_SERIES_MAX {
        k01_series(x).0
    } else if x > 705.0 {
        0.0
    } else {
        (-x).exp() * k01_scaled_cf(x).0
    })
}
