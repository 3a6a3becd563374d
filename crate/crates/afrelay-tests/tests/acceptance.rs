//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Tolerances are pinned here and printed on each line.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use afrelay::channel::{hop1_moment, ordered_pdf_hop1, HopStatistics};
use afrelay::hpa::{bussgang_closed_form, bussgang_numeric, ibo_to_asat, AmplifierOperatingPoint, HpaModel};
use afrelay::link::LinkConfig;
use afrelay::metrics::{
    ber, ber_asymptotic, ber_quadrature, ber_vgii_closed, diversity_gain, outage, outage_fg,
    outage_fg_asymptotic, outage_vgii, outage_vgii_asymptotic, ModulationParams, VGI_RHO_LIMIT,
};
use afrelay::montecarlo::{run_sweep, simulate_links, simulate_outage_links, Fidelity, McConfig};
use afrelay::relaying::RelayScheme::{Fg, Vgi, Vgii};
use afrelay::specfun::{integrate, QuadratureSpec};
use afrelay_cli::config::parse_str;
use afrelay_cli::report::write_sweep;

struct Verdict {
    passed: bool,
    detail: String,
    tolerance: &'static str,
}

fn a_sat(ibo_db: f64) -> f64 {
    ibo_to_asat(&AmplifierOperatingPoint {
        mean_output_power: 1.0,
        ibo_db,
    })
    .unwrap()
}

fn sel(ibo: f64) -> HpaModel {
    HpaModel::Sel { a_sat: a_sat(ibo) }
}

fn sspa(ibo: f64) -> HpaModel {
    HpaModel::Sspa {
        a_sat: a_sat(ibo),
        smoothness: 1.0,
    }
}

fn twta(ibo: f64) -> HpaModel {
    HpaModel::Twta {
        a_sat: a_sat(ibo),
        phi0: 0.0,
    }
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

/// Analytic outage of a link at one SNR.
fn p_out(link: &LinkConfig, snr_db: f64, gamma_th: f64) -> f64 {
    let s = link.stats(snr_db).unwrap();
    let z = link.zeta(&s).unwrap();
    outage(link.scheme, gamma_th, &s, z).unwrap()
}

fn ideal_stats(n: u32, k: u32, rho: f64, snr_db: f64) -> HopStatistics {
    LinkConfig::new(n, k, rho, Fg, HpaModel::Ideal).stats(snr_db).unwrap()
}

fn ranks() -> impl Iterator<Item = (u32, u32)> {
    (1..=3u32).flat_map(|n| (1..=n).map(move |k| (n, k)))
}

fn ac1() -> Verdict {
    let mut worst = (0.0, String::new());
    for ibo in [0.0, 3.0, 6.0, 10.0, 20.0] {
        for m in [sel(ibo), sspa(ibo), twta(ibo)] {
            let c = bussgang_closed_form(&m, 1.0).unwrap();
            let q = bussgang_numeric(&m, 1.0).unwrap();
            for (what, e) in [("delta", rel(c.delta, q.delta)), ("sigma_tau_sq", rel(c.sigma_tau_sq, q.sigma_tau_sq))] {
                if e > worst.0 {
                    worst = (e, format!("{what} {m:?} IBO {ibo} dB"));
                }
            }
        }
    }
    Verdict {
        passed: worst.0 <= 1e-6,
        detail: format!("15 amplifier points, worst rel {:.2e} ({})", worst.0, worst.1),
        tolerance: "rel 1e-6 on delta and sigma_tau_sq",
    }
}

fn ac2() -> Verdict {
    let spec = QuadratureSpec {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_subdivisions: 1000,
    };
    let (mut mass_err, mut mean_err, mut cases) = (0f64, 0f64, 0);
    for n in [1u32, 2, 3, 5] {
        for k in 1..=n {
            for rho in [0.0, 0.5, 0.9, 1.0] {
                let s = ideal_stats(n, k, rho, 10.0);
                let pdf = |x: f64| ordered_pdf_hop1(x, &s).unwrap();
                let mass = integrate(pdf, 0.0, f64::INFINITY, &spec).unwrap();
                let mean = integrate(|x| x * pdf(x), 0.0, f64::INFINITY, &spec).unwrap();
                mass_err = mass_err.max((mass - 1.0).abs());
                mean_err = mean_err.max(rel(mean, hop1_moment(1, &s).unwrap()));
                cases += 1;
            }
        }
    }
    Verdict {
        passed: mass_err <= 1e-6 && mean_err <= 1e-6,
        detail: format!("{cases} configs, worst |mass-1| {mass_err:.2e}, worst mean rel {mean_err:.2e}"),
        tolerance: "abs 1e-6 mass, rel 1e-6 mean",
    }
}

fn ac3() -> Verdict {
    let snrs = [10.0, 20.0, 30.0, 40.0];
    let gamma_th = 2.0;
    let mc = McConfig {
        samples: 10_000_000,
        seed: 2024,
        workers: 1,
        fidelity: Fidelity::BussgangSurrogate,
    };
    let n = mc.samples as f64;
    let (mut exact_ok, mut exact_total, mut vgi_ok, mut vgi_total) = (0, 0, 0, 0);
    let mut by_n = [(0, 0); 4];
    let mut worst_z = (0.0, String::new());
    let mut worst_vgi = (0.0, String::new());
    for (nr, k) in ranks() {
        for rho in [0.5, 0.9, 1.0] {
            let mut links = Vec::new();
            for hpa in [HpaModel::Ideal, sel(3.0), twta(8.0)] {
                for scheme in [Fg, Vgi, Vgii] {
                    if scheme == Vgi && rho > VGI_RHO_LIMIT {
                        continue;
                    }
                    links.push(LinkConfig::new(nr, k, rho, scheme, hpa));
                }
            }
            let sims = simulate_outage_links(&links, &mc, &snrs, gamma_th).unwrap();
            for (link, pts) in links.iter().zip(&sims) {
                for (&s, pt) in snrs.iter().zip(pts) {
                    let p = p_out(link, s, gamma_th);
                    let got = pt.mean;
                    let sd = (p * (1.0 - p) / n).sqrt();
                    let tag = format!("N={nr} k={k} rho={rho} {} {:?} {s} dB", link.scheme, link.hpa);
                    if link.scheme == Vgi {
                        let e = (got - p).abs() / p;
                        let ok = (got - p).abs() <= (0.1 * p).max(3.0 * sd);
                        vgi_total += 1;
                        vgi_ok += ok as usize;
                        if !ok && e > worst_vgi.0 {
                            worst_vgi = (e, tag);
                        }
                    } else {
                        let z = if sd > 0.0 { (got - p).abs() / sd } else { 0.0 };
                        let ok = z <= 3.0;
                        exact_total += 1;
                        exact_ok += ok as usize;
                        by_n[nr as usize].0 += ok as usize;
                        by_n[nr as usize].1 += 1;
                        if z > worst_z.0 {
                            worst_z = (z, tag);
                        }
                    }
                }
            }
        }
    }
    Verdict {
        passed: exact_ok == exact_total && vgi_ok == vgi_total,
        detail: format!(
            "FG/VGII {exact_ok}/{exact_total} within 3 sd (N=1 {}/{}, N=2 {}/{}, N=3 {}/{}), worst {:.1} sd at {}; VGI {vgi_ok}/{vgi_total}, worst rel {:.3} at {}",
            by_n[1].0, by_n[1].1, by_n[2].0, by_n[2].1, by_n[3].0, by_n[3].1,
            worst_z.0, worst_z.1, worst_vgi.0, if worst_vgi.1.is_empty() { "-" } else { &worst_vgi.1 },
        ),
        tolerance: "3 binomial sd at 1e7 trials; VGI max(10% rel, 3 sd)",
    }
}

fn ac4() -> Verdict {
    let m = ModulationParams::BPSK;
    let cases = [
        (1, 1, 0.5, 10.0),
        (2, 1, 0.9, 20.0),
        (2, 2, 0.9, 15.0),
        (2, 2, 0.0, 10.0),
        (3, 2, 0.5, 20.0),
        (3, 3, 0.9, 30.0),
        (3, 3, 1.0, 20.0),
        (5, 3, 0.7, 25.0),
    ];
    let (mut fg, mut vgi, mut vgii) = (0f64, 0f64, 0f64);
    let mut fallback = true;
    for (n, k, rho, s) in cases {
        let st = ideal_stats(n, k, rho, s);
        let q = |scheme| ber_quadrature(scheme, &m, &st, 1.0).unwrap();
        fg = fg.max(rel(ber(Fg, &m, &st, 1.0).unwrap(), q(Fg)));
        if rho <= VGI_RHO_LIMIT {
            vgi = vgi.max(rel(ber(Vgi, &m, &st, 1.0).unwrap(), q(Vgi)));
        }
        let qv = q(Vgii);
        vgii = vgii.max(rel(ber_vgii_closed(&m, &st, 1.0).unwrap(), qv));
        fallback &= ber(Vgii, &m, &st, 1.0).unwrap() == qv;
    }
    // The VGII closed form integrates a γ² surrogate of γ(1+γ); when it
    // misses 5% the quadrature is the reported BER.
    let vgii_ok = vgii <= 0.05 || fallback;
    Verdict {
        passed: fg <= 1e-3 && vgi <= 0.05 && vgii_ok,
        detail: format!(
            "8 configs, FG rel {fg:.2e}, VGI rel {vgi:.2e}, VGII closed form rel {vgii:.3} ({})",
            if vgii <= 0.05 { "closed form within 5%" } else if fallback { "quadrature reported instead" } else { "no fallback" }
        ),
        tolerance: "FG rel 1e-3; VGI, VGII rel 5% or quadrature fallback",
    }
}

fn ac5() -> Verdict {
    let m = ModulationParams::BPSK;
    let th = 2.0;
    let (mut inside, mut total) = (0, 0);
    let mut worst = (1.0f64, String::new());
    for (n, k) in ranks() {
        for rho in [0.5, 0.9, 1.0] {
            let s = ideal_stats(n, k, rho, 40.0);
            let ratios = [
                ("FG outage", outage_fg_asymptotic(th, &s, 1.0).unwrap() / outage_fg(th, &s, 1.0).unwrap()),
                ("VGII outage", outage_vgii_asymptotic(th, &s, 1.0).unwrap() / outage_vgii(th, &s, 1.0).unwrap()),
                ("FG BER", ber_asymptotic(Fg, &m, &s, 1.0).unwrap() / ber(Fg, &m, &s, 1.0).unwrap()),
                ("VGII BER", ber_asymptotic(Vgii, &m, &s, 1.0).unwrap() / ber(Vgii, &m, &s, 1.0).unwrap()),
            ];
            for (what, r) in ratios {
                total += 1;
                inside += (0.95..=1.05).contains(&r) as usize;
                if (r - 1.0).abs() > (worst.0 - 1.0).abs() {
                    worst = (r, format!("{what} N={n} k={k} rho={rho}"));
                }
            }
        }
    }
    Verdict {
        passed: inside == total,
        detail: format!("{inside}/{total} ratios inside, worst {:.4} ({})", worst.0, worst.1),
        tolerance: "ratio in [0.95, 1.05] at 40 dB",
    }
}

fn slope(link: &LinkConfig, th: f64) -> f64 {
    let curve: Vec<(f64, f64)> = (30..=45).map(|s| (s as f64, p_out(link, s as f64, th))).collect();
    diversity_gain(&curve).unwrap()
}

fn ac6() -> Verdict {
    let th = 2.0;
    let mut ok = true;
    let mut parts = Vec::new();
    for scheme in [Fg, Vgii] {
        for n in [2u32, 3] {
            let full = slope(&LinkConfig::new(n, n, 1.0, scheme, HpaModel::Ideal), th);
            let part = slope(&LinkConfig::new(n, n, 0.9, scheme, HpaModel::Ideal), th);
            ok &= (full - n as f64).abs() <= 0.1 * n as f64 && (part - 1.0).abs() <= 0.15;
            parts.push(format!("{scheme} N={n}: {full:.3} (rho 1), {part:.3} (rho .9)"));
        }
    }
    let floor = slope(&LinkConfig::new(3, 3, 0.95, Vgii, twta(8.0)), 1.0);
    ok &= floor < 0.1;
    parts.push(format!("TWTA IBO 8 floor {floor:.4}"));
    Verdict {
        passed: ok,
        detail: parts.join("; "),
        tolerance: "N ± 10% at rho 1, 1 ± 15% at rho .9, < 0.1 on the floor",
    }
}

fn ac7() -> Verdict {
    // Figure 4 defaults: VGII, N = k = 3, rho .95, IBO 8 dB, threshold 0 dB.
    let link = |hpa| LinkConfig::new(3, 3, 0.95, Vgii, hpa);
    let floor = |hpa| p_out(&link(hpa), 40.0, 1.0);
    let (tw, ss) = (floor(twta(8.0)), floor(sspa(8.0)));
    let sel_curve: Vec<(f64, f64)> = (30..=40).map(|s| (s as f64, p_out(&link(sel(8.0)), s as f64, 1.0))).collect();
    let sel_g = diversity_gain(&sel_curve).unwrap();
    let within = |v: f64, quoted: f64| v >= quoted / 2.0 && v <= quoted * 2.0;
    Verdict {
        passed: tw > ss && within(tw, 2e-3) && within(ss, 3e-4) && sel_g >= 0.5,
        detail: format!("TWTA floor {tw:.3e} (quoted 2e-3), SSPA floor {ss:.3e} (quoted 3e-4), SEL slope 30-40 dB {sel_g:.3}"),
        tolerance: "TWTA > SSPA, each within x2 of quoted; SEL slope >= 0.5",
    }
}

/// SNR in dB at which the analytic outage first reaches `target`, by
/// bisection on [0, 60] dB.
fn snr_for(link: &LinkConfig, th: f64, target: f64) -> Option<f64> {
    let (mut lo, mut hi) = (0.0, 60.0);
    if p_out(link, hi, th) > target {
        return None;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if p_out(link, mid, th) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}

fn ac8() -> Verdict {
    // Figure 5 defaults: FG, SSPA IBO 20 dB, rho .9, threshold 3 dB, k = N.
    let th = db(3.0);
    let need: Vec<Option<f64>> = [2u32, 5, 10]
        .iter()
        .map(|&n| snr_for(&LinkConfig::new(n, n, 0.9, Fg, sspa(20.0)), th, 1e-3))
        .collect();
    let show = |v: Option<f64>| v.map_or("none".into(), |v| format!("{v:.2}"));
    let passed = match (need[0], need[1], need[2]) {
        (Some(a), Some(b), Some(c)) => {
            a > b && b > c && a - b > b - c && (a - 35.0).abs() <= 3.0 && (b - 27.0).abs() <= 3.0 && (c - 20.0).abs() <= 3.0
        }
        _ => false,
    };
    Verdict {
        passed,
        detail: format!(
            "SNR for outage 1e-3: N=2 {} dB (quoted 35), N=5 {} dB (27), N=10 {} dB (20)",
            show(need[0]),
            show(need[1]),
            show(need[2])
        ),
        tolerance: "monotone, 2->5 gap > 5->10 gap, each ±3 dB",
    }
}

fn ac9() -> Verdict {
    // Figure 10 defaults: VGII, TWTA, N = k = 3, rho .95.
    let snrs: Vec<f64> = (0..=12).map(|i| 5.0 * i as f64).collect();
    let links = [
        LinkConfig::new(3, 3, 0.95, Vgii, twta(4.0)),
        LinkConfig::new(3, 3, 0.95, Vgii, twta(20.0)),
    ];
    let mc = McConfig {
        samples: 1_000_000,
        seed: 10,
        workers: 1,
        fidelity: Fidelity::BussgangSurrogate,
    };
    let sims = simulate_links(&links, &mc, &snrs, 1.0).unwrap();
    let ceiling = links[0].ceiling().unwrap();
    let c4: Vec<_> = sims[0].iter().map(|p| p.capacity).collect();
    let c20: Vec<_> = sims[1].iter().map(|p| p.capacity.mean).collect();
    let at60 = c4[12].mean;
    let settled = at60 - c4[11].mean;
    let under = c4.iter().all(|c| c.mean <= ceiling + c.half_width_95);
    // Half the ideal high-SNR growth of ½log₂(1+γ) over 5 dB.
    let ideal_step = 0.5 * (5.0f64 / 10.0) * 10f64.log2();
    let step20 = c20[8] - c20[7];
    Verdict {
        passed: (1.5..=2.5).contains(&at60) && settled < 0.05 && under && step20 >= 0.5 * ideal_step,
        detail: format!(
            "IBO 4: C(60 dB) {at60:.4}, C(60)-C(55) {settled:.4}, ceiling {ceiling:.4}, below ceiling {under}; IBO 20: C(40)-C(35) {step20:.4}"
        ),
        tolerance: "C(60) in [1.5, 2.5], last step < 0.05, <= ceiling + CI; IBO 20 step >= 0.415",
    }
}

fn ac10() -> Verdict {
    let mut bad = Vec::new();
    // Figure 3 defaults: N = k = 3, rho .9, SEL IBO 8 dB, threshold 0 dB.
    // Judged where SNR exceeds the threshold by at least 15 dB.
    let mut below_margin = 0;
    for s in (0..=8).map(|i| 5.0 * i as f64) {
        let p = |scheme| p_out(&LinkConfig::new(3, 3, 0.9, scheme, sel(8.0)), s, 1.0);
        let (fg, vgi, vgii) = (p(Fg), p(Vgi), p(Vgii));
        let ordered = vgii <= vgi && vgi <= fg;
        if s < 15.0 {
            below_margin += !ordered as usize;
        } else if !ordered {
            bad.push(format!("schemes at {s} dB"));
        }
    }
    // Figure 4 defaults.
    for s in [30.0, 35.0, 40.0] {
        let p = |hpa| p_out(&LinkConfig::new(3, 3, 0.95, Vgii, hpa), s, 1.0);
        if !(p(twta(8.0)) >= p(sspa(8.0)) && p(sspa(8.0)) >= p(sel(8.0))) {
            bad.push(format!("amplifiers at {s} dB"));
        }
    }
    // Figure 6 defaults.
    let m = ModulationParams::BPSK;
    for s in [25.0, 30.0, 35.0, 40.0] {
        let b = |ibo| {
            let link = LinkConfig::new(3, 3, 0.95, Vgii, sel(ibo));
            let st = link.stats(s).unwrap();
            ber(Vgii, &m, &st, link.zeta(&st).unwrap()).unwrap()
        };
        if b(10.0) > b(5.0) {
            bad.push(format!("back-off at {s} dB"));
        }
    }
    Verdict {
        passed: bad.is_empty(),
        detail: format!(
            "violations: {}; scheme order reversed at {below_margin} of 3 points below the 15 dB margin (not judged)",
            if bad.is_empty() { "none".to_string() } else { bad.join(", ") }
        ),
        tolerance: "exact orderings; schemes judged at 15-40 dB",
    }
}

fn ac11() -> Verdict {
    let text = "n_relays = 3\nrank = 2\nrho1 = 0.9\nscheme = \"fg\"\nhpa = \"twta\"\nibo_db = 6.0\n\
                snr_db = \"0:10:40\"\ngamma_th_db = 3.0\nsamples = 300000\nseed = 99\n";
    let mut outputs = Vec::new();
    for _ in 0..2 {
        for w in [1, 4, 8] {
            let mut exp = parse_str(text).unwrap();
            exp.mc.workers = w;
            let pts = run_sweep(&exp.link, &exp.mc, &exp.snr_db, exp.gamma_th).unwrap();
            let mut buf = Vec::new();
            write_sweep(&mut buf, &exp.config.echo(), exp.mc.seed, &pts).unwrap();
            outputs.push(buf);
        }
    }
    let same = outputs.iter().all(|o| o == &outputs[0]);
    Verdict {
        passed: same && !outputs[0].is_empty(),
        detail: format!("6 sweeps (2 runs x workers 1, 4, 8), {} bytes each, identical {same}", outputs[0].len()),
        tolerance: "byte-identical",
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict, Duration); 11] = [
        ("Bussgang closed form vs numeric", ac1, Duration::from_secs(5)),
        ("hop-1 PDF mass and mean", ac2, Duration::from_secs(30)),
        ("cross-engine outage", ac3, Duration::from_secs(600)),
        ("BER closed form vs quadrature", ac4, Duration::from_secs(60)),
        ("asymptote convergence", ac5, Duration::from_secs(60)),
        ("diversity gains", ac6, Duration::MAX),
        ("outage floor anchors", ac7, Duration::MAX),
        ("relay-count anchor", ac8, Duration::MAX),
        ("capacity ceiling", ac9, Duration::MAX),
        ("scheme and impairment orderings", ac10, Duration::MAX),
        ("sweep determinism", ac11, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = run();
        let took = t.elapsed();
        let in_time = took <= *budget;
        let passed = v.passed && in_time;
        failed += !passed as usize;
        let budget = if *budget == Duration::MAX { String::new() } else { format!(" (budget {}s)", budget.as_secs()) };
        println!(
            "AC{:<2} {} {name}: {} [tol: {}] [{:.1}s{budget}]",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            v.detail,
            v.tolerance,
            took.as_secs_f64(),
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
