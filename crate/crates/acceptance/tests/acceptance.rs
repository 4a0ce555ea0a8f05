//! Acceptance criteria. Each test writes one `PASS`/`FAIL` line straight to
//! stdout, so the lines show up even when the harness captures output.

use std::f64::consts::LN_2;
use std::io::Write;
use std::time::Instant;

use ergocap::asymptotics::{
    gap_awgn_ci, gap_oa_ci, low_snr_slope_numeric, low_snr_slopes, multiuser_gap_asymptotic, prelog_numeric,
    space_diversity_gaps, tci_low_snr_slope,
};
use ergocap::distributions::{
    make_frechet, make_gamma_diversity, make_max_exponential, make_miso_multiuser, quadrature_moments,
    FadingDistribution,
};
use ergocap::mc::{mc_capacity, resolve_policy, DEFAULT_SEED};
use ergocap::numerics::digamma;
use ergocap::schemes::{
    awgn_capacity, ci_capacity, ctci_capacity, oa_capacity, ra_capacity, tci_capacity, tci_optimize, Scheme, SchemeSpec,
};

const REFERENCE_GAP_OA_CI_BITS: f64 = 0.24928;
const REFERENCE_GAP_AWGN_CI_BITS: f64 = 0.45943;

fn report(id: u32, title: &str, pass: bool, detail: &str) {
    let line = format!(
        "acceptance {id:>2} {} {title}: {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {id} ({title}) failed: {detail}");
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

fn cap(r: ergocap::Result<ergocap::schemes::CapacityResult>) -> f64 {
    r.unwrap().capacity_nats
}

#[test]
fn criterion_01_gap_reproduction() {
    let start = Instant::now();
    let m = make_miso_multiuser(2, 2).unwrap();
    let oa_ci = gap_oa_ci(&m) / LN_2;
    let awgn_ci = gap_awgn_ci(&m) / LN_2;
    let elapsed = start.elapsed().as_secs_f64();
    let pass = (oa_ci - REFERENCE_GAP_OA_CI_BITS).abs() <= 5e-4
        && (awgn_ci - REFERENCE_GAP_AWGN_CI_BITS).abs() <= 5e-4
        && elapsed < 1.0;
    report(
        1,
        "gap reproduction miso(2,2)",
        pass,
        &format!("oa-ci {oa_ci:.6} bits, awgn-ci {awgn_ci:.6} bits, {elapsed:.3} s"),
    );
}

#[test]
fn criterion_02_finite_snr_convergence() {
    let start = Instant::now();
    let m = make_miso_multiuser(2, 2).unwrap();
    let mut worst = 0.0f64;
    for x in 10..=40 {
        let s = db(f64::from(x));
        let diff = (cap(oa_capacity(&m, s)) - cap(ci_capacity(&m, s))) / LN_2;
        worst = worst.max((diff - REFERENCE_GAP_OA_CI_BITS).abs());
    }
    let awgn_ci = |x: f64| (cap(awgn_capacity(&m, db(x))) - cap(ci_capacity(&m, db(x)))) / LN_2;
    let dev40 = (awgn_ci(40.0) - REFERENCE_GAP_AWGN_CI_BITS).abs();
    let dev10 = (awgn_ci(10.0) - REFERENCE_GAP_AWGN_CI_BITS).abs();
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= 0.002 && dev40 <= 0.005 && dev10 > 0.005 && elapsed < 30.0;
    report(
        2,
        "finite-SNR convergence miso(2,2)",
        pass,
        &format!(
            "max |oa-ci - 0.24928| over 10..40 dB = {worst:.2e} bits; awgn-ci deviation {dev40:.2e} at 40 dB, {dev10:.2e} at 10 dB; {elapsed:.2} s"
        ),
    );
}

#[test]
fn criterion_03_space_diversity_law() {
    let ns = [2u32, 4, 8, 16, 32, 64];
    let mut worst_closed = 0.0f64;
    let mut gaps = Vec::new();
    for &n in &ns {
        let d = make_gamma_diversity(n).unwrap();
        let q = quadrature_moments(&d, 1e-13).unwrap();
        let generic = q.log_mean + q.inverse_mean.ln();
        let closed = digamma(f64::from(n)).unwrap() - f64::from(n - 1).ln();
        worst_closed = worst_closed.max((generic - closed).abs());
        gaps.push((n, space_diversity_gaps(n).unwrap()));
    }
    let tail: Vec<(f64, f64)> = gaps
        .iter()
        .filter(|(n, _)| *n >= 16)
        .map(|(n, g)| (f64::from(n - 1).ln(), g.gap_oa_ci.ln()))
        .collect();
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / tail.len() as f64;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / tail.len() as f64;
    let slope = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / tail.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let g64 = gaps.last().unwrap().1;
    let ratio = g64.gap_oa_ci / g64.gap_awgn_ci;
    let pass = worst_closed <= 1e-10 && (-1.05..=-0.95).contains(&slope) && (0.45..=0.55).contains(&ratio);
    report(
        3,
        "space-diversity law",
        pass,
        &format!("max |generic - closed| {worst_closed:.1e}; log-log slope {slope:.4}; ratio at N=64 {ratio:.4}"),
    );
}

#[test]
fn criterion_04_multiuser_law() {
    let ks: Vec<u32> = (1..=10).map(|i| 1u32 << i).collect();
    let mut exact = Vec::new();
    let mut deviation = Vec::new();
    for &k in &ks {
        let g = gap_awgn_ci(&make_max_exponential(k).unwrap());
        let a = multiuser_gap_asymptotic(k).unwrap();
        exact.push(g);
        deviation.push((a - g).abs() / g);
    }
    let gap_decreasing = exact.windows(2).all(|w| w[1] < w[0]);
    let dev_decreasing = deviation.windows(2).all(|w| w[1] < w[0]);
    let dev_last = *deviation.last().unwrap();
    let pass = gap_decreasing && dev_decreasing && dev_last < 0.05;
    let table: Vec<String> = ks
        .iter()
        .zip(&exact)
        .zip(&deviation)
        .map(|((k, g), d)| format!("K={k}: {g:.5} ({:.0}%)", 100.0 * d))
        .collect();
    report(
        4,
        "multi-user law",
        pass,
        &format!(
            "gap decreasing {gap_decreasing}; deviation decreasing {dev_decreasing}; deviation at K=1024 {:.1}%; {}",
            100.0 * dev_last,
            table.join(", ")
        ),
    );
}

#[test]
fn criterion_05_frechet_k_independence() {
    let ks = [1u32, 4, 16, 64];
    let gaps: Vec<(f64, f64)> = ks
        .iter()
        .map(|&k| {
            let d = make_frechet(2.0, k).unwrap();
            (gap_oa_ci(&d), gap_awgn_ci(&d))
        })
        .collect();
    let mut spread = 0.0f64;
    for a in &gaps {
        for b in &gaps {
            spread = spread.max((a.0 - b.0).abs()).max((a.1 - b.1).abs());
        }
    }
    let target = (std::f64::consts::PI / 2.0).ln();
    let off = gaps.iter().map(|g| (g.1 - target).abs()).fold(0.0, f64::max);
    let pass = spread <= 1e-8 && off <= 1e-8;
    report(
        5,
        "Frechet K-independence",
        pass,
        &format!("pairwise spread {spread:.1e}; max |awgn-ci - log(pi/2)| {off:.1e}"),
    );
}

fn ordering_dists() -> Vec<Box<dyn FadingDistribution>> {
    vec![
        Box::new(make_gamma_diversity(2).unwrap()),
        Box::new(make_max_exponential(4).unwrap()),
        Box::new(make_miso_multiuser(2, 2).unwrap()),
    ]
}

const CTCI_THRESHOLDS: [f64; 3] = [0.5, 1.0, 2.0];

#[test]
fn criterion_06_ordering_chain() {
    let mut worst = f64::INFINITY;
    let mut where_ = String::new();
    for d in ordering_dists() {
        for i in 0..61 {
            let x = -20.0 + f64::from(i);
            let s = db(x);
            let ci = cap(ci_capacity(&d, s));
            let ra = cap(ra_capacity(&d, s));
            let oa = cap(oa_capacity(&d, s));
            let awgn = cap(awgn_capacity(&d, s));
            let mut margins = vec![oa - ra, awgn - ra];
            for z in CTCI_THRESHOLDS {
                let ctci = cap(ctci_capacity(&d, s, z));
                margins.push(ctci - ci);
                margins.push(ra - ctci);
            }
            let m = margins.into_iter().fold(f64::INFINITY, f64::min);
            if m < worst {
                worst = m;
                where_ = format!("{} at {x} dB", d.label());
            }
        }
    }
    report(
        6,
        "ordering chain ci <= ctci <= ra <= oa, ra <= awgn",
        worst >= -1e-9,
        &format!("smallest margin {worst:.2e} ({where_}), 3 laws x 61 SNRs x ctci z_t in {{0.5,1,2}}"),
    );
}

#[test]
fn criterion_07_prelog_constants() {
    let g2 = make_gamma_diversity(2).unwrap();
    let s = 1e6;
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    let mut check = |name: String, got: f64, want: f64| {
        worst = worst.max((got - want).abs());
        lines.push(format!("{name} {got:.4}/{want:.4}"));
    };
    check(
        "ra".into(),
        prelog_numeric(|x| Ok(ra_capacity(&g2, x)?.capacity_nats), s).unwrap(),
        1.0,
    );
    check(
        "ci".into(),
        prelog_numeric(|x| Ok(ci_capacity(&g2, x)?.capacity_nats), s).unwrap(),
        1.0,
    );
    for z in [0.5, 1.0, 2.0] {
        let p = prelog_numeric(|x| Ok(ctci_capacity(&g2, x, z)?.capacity_nats), s).unwrap();
        check(format!("ctci({z})"), p, 1.0);
        let p = prelog_numeric(|x| Ok(tci_capacity(&g2, x, z)?.capacity_nats), s).unwrap();
        check(format!("tci({z})"), p, g2.sf(z));
    }
    report(
        7,
        "pre-log constants gamma(2) at S=1e6",
        worst <= 0.02,
        &format!("max deviation {worst:.2e}; {}", lines.join(", ")),
    );
}

#[test]
fn criterion_08_low_snr_suite() {
    let s_lo = 1e-6;
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    let thresholds = [0.5, 1.0, 2.0];
    let laws: Vec<Box<dyn FadingDistribution>> = vec![
        Box::new(make_gamma_diversity(2).unwrap()),
        Box::new(make_miso_multiuser(2, 2).unwrap()),
    ];
    for d in &laws {
        for r in low_snr_slopes(d, &thresholds).unwrap() {
            if r.scheme == Scheme::Oa {
                continue;
            }
            let numeric = match (r.scheme, r.z_t) {
                (Scheme::Awgn, _) => low_snr_slope_numeric(|x| Ok(awgn_capacity(d, x)?.capacity_nats), s_lo),
                (Scheme::Ra, _) => low_snr_slope_numeric(|x| Ok(ra_capacity(d, x)?.capacity_nats), s_lo),
                (Scheme::Ci, _) => low_snr_slope_numeric(|x| Ok(ci_capacity(d, x)?.capacity_nats), s_lo),
                (Scheme::Tci, Some(z)) => low_snr_slope_numeric(|x| Ok(tci_capacity(d, x, z)?.capacity_nats), s_lo),
                (Scheme::Ctci, Some(z)) => low_snr_slope_numeric(|x| Ok(ctci_capacity(d, x, z)?.capacity_nats), s_lo),
                _ => unreachable!(),
            }
            .unwrap();
            let rel = (numeric / r.slope - 1.0).abs();
            if rel > worst {
                worst = rel;
                worst_at = format!(
                    "{} {}{}",
                    d.label(),
                    r.scheme,
                    r.z_t.map(|z| format!("({z})")).unwrap_or_default()
                );
            }
        }
    }

    let m = make_miso_multiuser(2, 2).unwrap();
    let s = db(-30.0);
    let awgn = cap(awgn_capacity(&m, s));
    let oa = cap(oa_capacity(&m, s));
    let tci = cap(tci_capacity(&m, s, m.mean()));
    let slopes: Vec<f64> = [0.25, 0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&z| tci_low_snr_slope(&m, z).unwrap())
        .collect();
    let increasing = slopes.windows(2).all(|w| w[1] > w[0]);
    let pass = worst <= 0.01 && oa > awgn && tci > awgn && increasing;
    report(
        8,
        "low-SNR slopes",
        pass,
        &format!(
            "max relative slope error {worst:.2e} ({worst_at}); at -30 dB oa/awgn {:.4}, tci(E[z])/awgn {:.4}; tci slope increasing {increasing}",
            oa / awgn,
            tci / awgn
        ),
    );
}

#[test]
fn criterion_09_tci_optimization() {
    let mut ok = true;
    let mut details = Vec::new();
    for (n, k) in [(1u32, 4u32), (2, 2)] {
        let d = make_miso_multiuser(n, k).unwrap();
        let mut zs = Vec::new();
        for x in [0.0, 10.0, 20.0, 30.0] {
            zs.push(tci_optimize(&d, db(x)).unwrap().0.z_t);
        }
        let nonincreasing = zs.windows(2).all(|w| w[1] <= w[0]);
        let s = db(30.0);
        let excess = (tci_optimize(&d, s).unwrap().1.capacity_nats - cap(ci_capacity(&d, s))) / LN_2;
        ok &= nonincreasing && excess < 0.02;
        details.push(format!(
            "miso({n},{k}) z_t* {:?}, tci*-ci at 30 dB {excess:.4} bits",
            zs.iter().map(|z| (z * 1000.0).round() / 1000.0).collect::<Vec<_>>()
        ));
    }
    report(9, "TCI optimization", ok, &details.join("; "));
}

#[test]
fn criterion_10_monte_carlo() {
    let start = Instant::now();
    let laws: Vec<Box<dyn FadingDistribution>> = vec![
        Box::new(make_gamma_diversity(2).unwrap()),
        Box::new(make_max_exponential(4).unwrap()),
        Box::new(make_frechet(3.0, 2).unwrap()),
        Box::new(make_miso_multiuser(2, 2).unwrap()),
    ];
    let schemes = ["oa", "ra", "ci", "tci:1", "ctci:1"];
    let n = 1_000_000;
    let (mut cells, mut agree, mut power_cells, mut power_ok) = (0, 0, 0, 0);
    let mut misses = Vec::new();
    for d in &laws {
        for spec in schemes {
            let spec: SchemeSpec = spec.parse().unwrap();
            for s in [0.1, 1.0, 10.0, 100.0] {
                let quad = spec.evaluate(d, s).unwrap().capacity_nats;
                let policy = resolve_policy(d, &spec, s).unwrap();
                let est = mc_capacity(d, &policy, s, n, DEFAULT_SEED).unwrap();
                cells += 1;
                if (est.mean_nats - quad).abs() <= 3.0 * est.std_error {
                    agree += 1;
                } else {
                    misses.push(format!("{} {spec} S={s}", d.label()));
                }
                if matches!(spec.scheme, Scheme::Oa | Scheme::Tci | Scheme::Ctci) {
                    power_cells += 1;
                    if (est.power_mean - 1.0).abs() <= 3.0 * est.power_std_error {
                        power_ok += 1;
                    } else {
                        misses.push(format!("power {} {spec} S={s}", d.label()));
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = agree as f64 >= 0.95 * cells as f64 && power_ok == power_cells && elapsed < 300.0;
    report(
        10,
        "Monte-Carlo cross-validation",
        pass,
        &format!(
            "{agree}/{cells} cells within 3 se, power within 3 se in {power_ok}/{power_cells}, {elapsed:.1} s{}",
            if misses.is_empty() {
                String::new()
            } else {
                format!("; outside: {}", misses.join(", "))
            }
        ),
    );
}

#[test]
fn criterion_11_power_residuals() {
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut note = |r: ergocap::schemes::CapacityResult| {
        let res = r
            .power_constraint_residual
            .expect("thresholded scheme records a residual");
        worst = worst.max(res.abs());
        count += 1;
    };
    for d in ordering_dists() {
        for i in 0..61 {
            let s = db(-20.0 + f64::from(i));
            note(oa_capacity(&d, s).unwrap());
            for z in CTCI_THRESHOLDS {
                note(ctci_capacity(&d, s, z).unwrap());
            }
        }
    }
    let g2 = make_gamma_diversity(2).unwrap();
    for z in [0.5, 1.0, 2.0] {
        note(tci_capacity(&g2, 1e6, z).unwrap());
        note(ctci_capacity(&g2, 1e6, z).unwrap());
    }
    let m = make_miso_multiuser(2, 2).unwrap();
    note(oa_capacity(&m, db(-30.0)).unwrap());
    note(tci_capacity(&m, db(-30.0), m.mean()).unwrap());
    for z in [0.25, 0.5, 1.0, 2.0, 4.0] {
        note(tci_capacity(&m, 1e-6, z).unwrap());
    }
    for (n, k) in [(1u32, 4u32), (2, 2)] {
        let d = make_miso_multiuser(n, k).unwrap();
        for x in [0.0, 10.0, 20.0, 30.0] {
            note(tci_optimize(&d, db(x)).unwrap().1);
        }
    }
    report(
        11,
        "power-constraint residuals",
        worst <= 1e-8,
        &format!("max |E[D] - 1| {worst:.2e} over {count} solved thresholds"),
    );
}
