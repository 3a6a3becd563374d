use std::f64::consts::PI;

use afrelay::hpa::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const IBO_GRID: [f64; 5] = [0.0, 3.0, 6.0, 10.0, 20.0];

fn at_ibo(model: HpaModel, ibo_db: f64) -> HpaModel {
    let a = ibo_to_asat(&AmplifierOperatingPoint {
        mean_output_power: 1.0,
        ibo_db,
    })
    .unwrap();
    model.with_a_sat(a)
}

fn closed_models() -> [HpaModel; 3] {
    [
        HpaModel::Sel { a_sat: 1.0 },
        HpaModel::Sspa { a_sat: 1.0, smoothness: 1.0 },
        HpaModel::Twta { a_sat: 1.0, phi0: 0.0 },
    ]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn ibo_conversion() {
    let op = |p, ibo| AmplifierOperatingPoint {
        mean_output_power: p,
        ibo_db: ibo,
    };
    assert_eq!(ibo_to_asat(&op(1.0, 0.0)).unwrap(), 1.0);
    assert!((ibo_to_asat(&op(1.0, 6.0206)).unwrap() - 2.0).abs() < 1e-5);
    assert!((ibo_to_asat(&op(4.0, 10.0)).unwrap() - 2.0 * 10f64.sqrt()).abs() < 1e-14);
    assert!(ibo_to_asat(&op(0.0, 3.0)).is_err());
}

#[test]
fn characteristic_anchor_points() {
    let a = 1.7;
    let sel = HpaModel::Sel { a_sat: a };
    let twta = HpaModel::Twta { a_sat: a, phi0: PI / 6.0 };
    assert_eq!(am_am(&sel, a / 2.0).unwrap(), a / 2.0);
    assert!((am_am(&twta, a).unwrap() - a / 2.0).abs() < 1e-15);
    assert_eq!(am_pm(&sel, 3.0).unwrap(), 0.0);
    assert!((am_pm(&twta, a).unwrap() - PI / 12.0).abs() < 1e-15);
    assert!((am_pm(&twta, 1e9).unwrap() - PI / 6.0).abs() < 1e-12);
    assert!(am_am(&sel, -1.0).is_err());

    let z = Complex64::from_polar(2.0 * a, 0.4);
    let out = apply_nonlinearity(&sel, z);
    assert!((out.norm() - a).abs() < 1e-14 && (out.arg() - 0.4).abs() < 1e-14);
    let out = apply_nonlinearity(&twta, Complex64::new(a, 0.0));
    assert!((out.norm() - a / 2.0).abs() < 1e-14);
    assert!((out.arg() - PI / 12.0).abs() < 1e-14);
    let w = Complex64::new(-0.3, 1.25);
    assert_eq!(apply_nonlinearity(&HpaModel::Ideal, w), w);
}

#[test]
fn sharp_sspa_approaches_limiter() {
    let sspa = HpaModel::Sspa { a_sat: 1.0, smoothness: 100.0 };
    let sel = HpaModel::Sel { a_sat: 1.0 };
    let worst = (0..=300)
        .map(|i| i as f64 / 100.0)
        .map(|r| (am_am(&sspa, r).unwrap() - am_am(&sel, r).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(worst < 0.01, "{worst}");
}

#[test]
fn closed_forms_match_numeric_oracle() {
    for m in closed_models() {
        for ibo in IBO_GRID {
            let m = at_ibo(m, ibo);
            let c = bussgang_closed_form(&m, 1.0).unwrap();
            let n = bussgang_numeric(&m, 1.0).unwrap();
            assert!(rel(c.delta, n.delta) < 1e-6, "{m:?}: δ {c:?} vs {n:?}");
            assert!(rel(c.sigma_tau_sq, n.sigma_tau_sq) < 1e-6, "{m:?}: σ_τ² {c:?} vs {n:?}");
        }
    }
}

#[test]
fn closed_form_scales_with_input_power() {
    let m = HpaModel::Twta { a_sat: 2.0 * 10f64.powf(0.4), phi0: 0.0 };
    let c = bussgang_closed_form(&m, 4.0).unwrap();
    let n = bussgang_numeric(&m, 4.0).unwrap();
    assert!(rel(c.delta, n.delta) < 1e-6 && rel(c.sigma_tau_sq, n.sigma_tau_sq) < 1e-6);
}

#[test]
fn ideal_and_unclipped_limits() {
    assert_eq!(bussgang_closed_form(&HpaModel::Ideal, 1.0).unwrap(), BussgangParams::IDEAL);
    let n = bussgang_numeric(&HpaModel::Ideal, 1.0).unwrap();
    assert!((n.delta - 1.0).abs() < 1e-12 && n.sigma_tau_sq.abs() < 1e-12);
    let c = bussgang_closed_form(&at_ibo(HpaModel::Sel { a_sat: 1.0 }, 40.0), 1.0).unwrap();
    assert!(c.delta > 1.0 - 1e-6 && c.sigma_tau_sq < 1e-6);
}

#[test]
fn smoother_sspa_lies_between() {
    let ibo = 6.0;
    let d = |m| bussgang(&at_ibo(m, ibo), 1.0).unwrap().delta;
    let d1 = d(HpaModel::Sspa { a_sat: 1.0, smoothness: 1.0 });
    let d3 = d(HpaModel::Sspa { a_sat: 1.0, smoothness: 3.0 });
    let dsel = d(HpaModel::Sel { a_sat: 1.0 });
    assert!(d1 < d3 && d3 < dsel, "{d1} {d3} {dsel}");
}

#[test]
fn monotone_in_backoff() {
    // (model, IBO from which σ_τ² must be nonincreasing)
    let models = [
        (HpaModel::Sel { a_sat: 1.0 }, 0.0),
        (HpaModel::Sspa { a_sat: 1.0, smoothness: 1.0 }, 0.0),
        (HpaModel::Sspa { a_sat: 1.0, smoothness: 2.5 }, 0.0),
        // Deep in compression the Saleh output shrinks faster than its
        // distortion share grows; σ_τ² peaks near 1 dB.
        (HpaModel::Twta { a_sat: 1.0, phi0: 0.0 }, 1.5),
        (HpaModel::Twta { a_sat: 1.0, phi0: PI / 6.0 }, 1.5),
    ];
    for (m, tau_from) in models {
        let mut prev: Option<(f64, BussgangParams)> = None;
        for i in 0..=40 {
            let ibo = 0.5 * i as f64;
            let bp = bussgang(&at_ibo(m, ibo), 1.0).unwrap();
            if let Some((_, p)) = prev {
                assert!(bp.delta >= p.delta, "{m:?} δ at {ibo} dB");
                if ibo > tau_from {
                    assert!(bp.sigma_tau_sq <= p.sigma_tau_sq, "{m:?} σ_τ² at {ibo} dB");
                }
            }
            prev = Some((ibo, bp));
        }
    }
    let twta = |ibo| bussgang(&at_ibo(HpaModel::Twta { a_sat: 1.0, phi0: 0.0 }, ibo), 1.0).unwrap();
    assert!(twta(1.0).sigma_tau_sq > twta(0.0).sigma_tau_sq);
}

#[test]
fn zeta_examples() {
    assert_eq!(zeta(&BussgangParams::IDEAL, 0.7, 1.0).unwrap(), 1.0);
    let bp = BussgangParams { delta: 0.8, sigma_tau_sq: 0.64 * 0.5 * 2.0 };
    assert!((zeta(&bp, 0.5, 2.0).unwrap() - 2.0).abs() < 1e-15);
    assert!(zeta(&bp, 0.0, 1.0).is_err());
}

// Sample moments of the decomposition over 10⁷ circular Gaussian inputs.
fn sample_decomposition(m: &HpaModel, sigma_sq: f64) -> (f64, f64, f64) {
    let bp = bussgang(m, sigma_sq).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = (sigma_sq / 2.0).sqrt();
    let n = 10_000_000;
    let (mut corr, mut phi2, mut tau2, mut psi2) = (Complex64::new(0.0, 0.0), 0.0, 0.0, 0.0);
    for _ in 0..n {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        let phi = Complex64::new(s * re, s * im);
        let psi = apply_nonlinearity(m, phi);
        let tau = psi - bp.delta * phi;
        corr += phi.conj() * tau;
        phi2 += phi.norm_sqr();
        tau2 += tau.norm_sqr();
        psi2 += psi.norm_sqr();
    }
    let nf = n as f64;
    let rho = corr.norm() / (phi2 * tau2).sqrt();
    (rho, psi2 / nf, bp.delta * bp.delta * sigma_sq + bp.sigma_tau_sq)
}

#[test]
fn distortion_is_uncorrelated_and_powers_add() {
    for m in [
        at_ibo(HpaModel::Sel { a_sat: 1.0 }, 3.0),
        at_ibo(HpaModel::Twta { a_sat: 1.0, phi0: 0.0 }, 4.0),
    ] {
        let (rho, power, predicted) = sample_decomposition(&m, 1.0);
        assert!(rho < 0.002, "{m:?}: correlation {rho}");
        // 3 standard errors of the sample output power (|ψ|² ≤ A_sat²).
        let se = m.a_sat().unwrap().powi(2) / (10_000_000f64).sqrt();
        assert!((power - predicted).abs() < 3.0 * se, "{m:?}: {power} vs {predicted}");
    }
}

proptest! {
    #[test]
    fn am_am_shape(a in 0.1f64..10.0, nu in 1.0f64..20.0, r1 in 0.0f64..30.0, r2 in 0.0f64..30.0) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        for m in [HpaModel::Sel { a_sat: a }, HpaModel::Sspa { a_sat: a, smoothness: nu }] {
            prop_assert!(am_am(&m, lo).unwrap() <= am_am(&m, hi).unwrap() + 1e-12);
            prop_assert!(am_am(&m, hi).unwrap() <= a * (1.0 + 1e-12));
        }
        // Saleh AM/AM rises to A_sat/2 at |φ| = A_sat and falls after.
        let t = HpaModel::Twta { a_sat: a, phi0: 0.0 };
        let peak = am_am(&t, a).unwrap();
        prop_assert!(am_am(&t, hi).unwrap() <= peak + 1e-12);
        if hi <= a {
            prop_assert!(am_am(&t, lo).unwrap() <= am_am(&t, hi).unwrap() + 1e-12);
        } else if lo >= a {
            prop_assert!(am_am(&t, lo).unwrap() + 1e-12 >= am_am(&t, hi).unwrap());
        }
    }

    #[test]
    fn phase_only_rotated_by_am_pm(a in 0.1f64..5.0, phi0 in -1.0f64..1.0, r in 0.01f64..10.0, th in -3.0f64..3.0) {
        let m = HpaModel::Twta { a_sat: a, phi0 };
        let z = Complex64::from_polar(r, th);
        let out = apply_nonlinearity(&m, z);
        let d = (out / z).arg();
        prop_assert!((d - am_pm(&m, r).unwrap()).abs() < 1e-12);
        prop_assert!((out.norm() - am_am(&m, r).unwrap()).abs() < 1e-12 * r.max(1.0));
        let sel = apply_nonlinearity(&HpaModel::Sel { a_sat: a }, z);
        prop_assert!((sel / z).arg().abs() < 1e-12);
    }
}
