use super::{digamma, gamma, integrate, QuadratureSpec};
use crate::error::{Error, Result};

const SERIES_MAX_Z: f64 = 0.6;
const MAX_TERMS: usize = 20_000;

fn is_nonpositive_int(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn rgamma(x: f64) -> f64 {
    if is_nonpositive_int(x) {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term == 0.0 || term.abs() < 1e-17 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::no_convergence(
        "hyp2f1",
        format!("series for ({a}, {b}; {c}; {z}) did not converge"),
    ))
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for real z ≤ 1.
///
/// The power series is used near the origin. Negative z goes through the
/// Pfaff transformation and z near 1 through the 1−z connection formulas,
/// including the logarithmic cases where c−a−b is an integer.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if [a, b, c, z].iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("hyp2f1", "non-finite argument"));
    }
    if is_nonpositive_int(c) {
        return Err(Error::domain("hyp2f1", format!("c = {c} is a pole")));
    }
    if z > 1.0 {
        return Err(Error::domain("hyp2f1", format!("z = {z} beyond the branch point")));
    }
    if z == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    // Terminating series: a polynomial, valid for every z.
    if is_nonpositive_int(a) || is_nonpositive_int(b) {
        if z.abs() <= 1.0 {
            return series(a, b, c, z);
        }
    }
    if z == 1.0 {
        let s = c - a - b;
        if s <= 0.0 {
            return Err(Error::no_convergence(
                "hyp2f1",
                format!("divergent at z = 1 with c-a-b = {s}"),
            ));
        }
        return Ok(gamma(c) * gamma(s) * rgamma(c - a) * rgamma(c - b));
    }
    if z < 0.0 {
        // Pfaff: (1−z)^{−a} ₂F₁(a, c−b; c; z/(z−1)), argument lands in (0, 1).
        let w = z / (z - 1.0);
        return Ok((1.0 - z).powf(-a) * hyp2f1_unit(a, c - b, c, w)?);
    }
    hyp2f1_unit(a, b, c, z)
}

// 0 ≤ z < 1
fn hyp2f1_unit(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if z <= SERIES_MAX_Z || is_nonpositive_int(a) || is_nonpositive_int(b) {
        return series(a, b, c, z);
    }
    let s = c - a - b;
    let m = s.round();
    if (s - m).abs() > 1e-9 {
        let w = 1.0 - z;
        let t1 = gamma(c) * gamma(s) * rgamma(c - a) * rgamma(c - b) * series(a, b, 1.0 - s, w)?;
        let t2 = w.powf(s)
            * gamma(c)
            * gamma(-s)
            * rgamma(a)
            * rgamma(b)
            * series(c - a, c - b, s + 1.0, w)?;
        return Ok(t1 + t2);
    }
    if m < 0.0 {
        // Euler: (1−z)^{c−a−b} ₂F₁(c−a, c−b; c; z) turns c−a−b into −m > 0.
        let f = hyp2f1_integer_gap(c - a, c - b, -m as u32, z)?;
        return Ok((1.0 - z).powf(m) * f);
    }
    hyp2f1_integer_gap(a, b, m as u32, z)
}

// ₂F₁(a, b; a+b+m; z) with integer m ≥ 0 and 1−z small.
fn hyp2f1_integer_gap(a: f64, b: f64, m: u32, z: f64) -> Result<f64> {
    let w = 1.0 - z;
    let lnw = w.ln();
    let mf = m as f64;
    let c = a + b + mf;

    // Finite part, present only for m ≥ 1.
    let mut finite = 0.0;
    if m > 0 {
        let pre = gamma(mf) * gamma(c) * rgamma(a + mf) * rgamma(b + mf);
        let mut term = 1.0;
        for n in 0..m {
            let nf = n as f64;
            if n > 0 {
                term *= (a + nf - 1.0) * (b + nf - 1.0) / (nf * (nf - mf)) * w;
            }
            finite += term;
        }
        finite *= pre;
    }

    let pre = gamma(c) * rgamma(a) * rgamma(b);
    if pre == 0.0 {
        return Ok(finite);
    }
    let mut fact_m = 1.0;
    for j in 1..=m {
        fact_m *= j as f64;
    }
    // term_n = (a+m)_n (b+m)_n / (n! (n+m)!) w^n
    let mut term = 1.0 / fact_m;
    let mut sum = 0.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        if n > 0 {
            term *= (a + mf + nf - 1.0) * (b + mf + nf - 1.0) / (nf * (nf + mf)) * w;
        }
        let bracket = lnw - digamma(nf + 1.0) - digamma(nf + mf + 1.0)
            + digamma(a + nf + mf)
            + digamma(b + nf + mf);
        let add = term * bracket;
        sum += add;
        if n > 2 && add.abs() < 1e-17 * sum.abs() {
            // (z−1)^m = (−w)^m
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            return Ok(finite - pre * sign * w.powi(m as i32) * sum);
        }
    }
    Err(Error::no_convergence(
        "hyp2f1",
        format!("logarithmic connection series for ({a}, {b}; m={m}; {z})"),
    ))
}

fn hyperu_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-300,
        rel_tol: 1e-12,
        max_subdivisions: 2000,
    }
}

/// Confluent hypergeometric function of the second kind U(a, b, x), x > 0.
///
/// Evaluated from U = Γ(a)⁻¹ ∫₀^∞ e^{−xs} s^{a−1} (1+s)^{b−a−1} ds when a > 0,
/// otherwise through Kummer's relation U(a, b, x) = x^{1−b} U(a−b+1, 2−b, x).
pub fn hyperu(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("hyperu", format!("requires finite x > 0, got {x}")));
    }
    if a == 0.0 {
        return Ok(1.0);
    }
    if a < 0.0 {
        let a2 = a - b + 1.0;
        if a2 > 0.0 {
            return Ok(x.powf(1.0 - b) * hyperu(a2, 2.0 - b, x)?);
        }
        return Err(Error::Unsupported(format!(
            "hyperu({a}, {b}, x): both a and a-b+1 are non-positive"
        )));
    }
    // Substituting s = u/x keeps the exponential at unit rate.
    let e = b - a - 1.0;
    let f = |u: f64| (-u).exp() * u.powf(a - 1.0) * (1.0 + u / x).powf(e);
    let v = integrate(f, 0.0, f64::INFINITY, &hyperu_spec()).map_err(|err| {
        Error::no_convergence("hyperu", format!("U({a}, {b}, {x}): {err}"))
    })?;
    Ok(v * x.powf(-a) / gamma(a))
}

/// Whittaker function W_{p,q}(x) = e^{−x/2} x^{q+1/2} U(q−p+1/2, 1+2q, x).
pub fn whittaker_w(p: f64, q: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("whittaker_w", format!("requires x > 0, got {x}")));
    }
    Ok((-0.5 * x).exp() * x.powf(q + 0.5) * hyperu(q - p + 0.5, 1.0 + 2.0 * q, x)?)
}
