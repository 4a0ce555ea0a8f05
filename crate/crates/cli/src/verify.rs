//! Invariant checks run by `ergocap verify`.

use serde::Serialize;
use serde_json::{json, Value};

use ergocap::asymptotics::{gap_report, low_snr_slope_numeric, low_snr_slopes, prelog_analytic, prelog_numeric};
use ergocap::distributions::{quadrature_moments, upper_quantile, FadingDistribution};
use ergocap::mc::{mc_capacity, resolve_policy};
use ergocap::schemes::{
    awgn_capacity, ci_capacity, ctci_capacity, oa_capacity, ra_capacity, tci_capacity, Scheme, SchemeSpec,
    POWER_RESIDUAL_TOL,
};
use ergocap::Result;

use crate::Level;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, outcome: Result<(bool, String)>) -> Check {
    match outcome {
        Ok((pass, detail)) => Check { name, pass, detail },
        Err(e) => Check {
            name,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

fn snr_grid(level: Level) -> Vec<f64> {
    let step = if level == Level::Full { 1 } else { 10 };
    (0..=60).step_by(step).map(|i| -20.0 + f64::from(i)).collect()
}

fn linear(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

/// Lower quartile, median and upper quartile of the law.
fn quartiles(law: &dyn FadingDistribution) -> Result<Vec<f64>> {
    [0.75, 0.5, 0.25].iter().map(|&t| upper_quantile(law, t)).collect()
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(1e-300)
    }
}

fn moments(law: &dyn FadingDistribution) -> Result<(bool, String)> {
    let q = quadrature_moments(law, 1e-10)?;
    let pairs = [
        ("mean", q.mean, law.mean()),
        ("inverse_mean", q.inverse_mean, law.inverse_mean()),
        ("log_mean", q.log_mean, law.log_mean()),
    ];
    let mut pass = (q.mass - 1.0).abs() <= 1e-8;
    let mut detail = format!("mass {:.3e}", q.mass - 1.0);
    for (name, quad, closed) in pairs {
        let err = relative_gap(quad, closed);
        pass &= err <= 1e-6;
        detail.push_str(&format!(", {name} rel err {err:.1e}"));
    }
    Ok((pass, detail))
}

fn ordering(law: &dyn FadingDistribution, grid: &[f64], thresholds: &[f64]) -> Result<(bool, String)> {
    let mut worst = f64::INFINITY;
    for &x in grid {
        let s = linear(x);
        let ci = ci_capacity(law, s)?.capacity_nats;
        let ra = ra_capacity(law, s)?.capacity_nats;
        let oa = oa_capacity(law, s)?.capacity_nats;
        let awgn = awgn_capacity(law, s)?.capacity_nats;
        worst = worst.min(oa - ra).min(awgn - ra);
        for &z in thresholds {
            let ctci = ctci_capacity(law, s, z)?.capacity_nats;
            worst = worst.min(ctci - ci).min(ra - ctci);
        }
    }
    Ok((
        worst >= -1e-9,
        format!("smallest margin {worst:.2e} over {} SNRs", grid.len()),
    ))
}

fn residuals(law: &dyn FadingDistribution, grid: &[f64], thresholds: &[f64]) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for &x in grid {
        let s = linear(x);
        let mut results = vec![oa_capacity(law, s)?];
        for &z in thresholds {
            results.push(tci_capacity(law, s, z)?);
            results.push(ctci_capacity(law, s, z)?);
        }
        for r in results {
            worst = worst.max(r.power_constraint_residual.unwrap_or(0.0).abs());
        }
    }
    Ok((worst <= POWER_RESIDUAL_TOL, format!("max |E[D] - 1| {worst:.2e}")))
}

fn prelog(law: &dyn FadingDistribution, thresholds: &[f64]) -> Result<(bool, String)> {
    let s = 1e6;
    let mut worst = 0.0f64;
    let mut track = |got: f64, want: f64| worst = worst.max((got - want).abs());
    track(prelog_numeric(|x| Ok(ra_capacity(law, x)?.capacity_nats), s)?, 1.0);
    if law.satisfies_a2() {
        track(prelog_numeric(|x| Ok(ci_capacity(law, x)?.capacity_nats), s)?, 1.0);
    }
    for &z in thresholds {
        track(prelog_numeric(|x| Ok(ctci_capacity(law, x, z)?.capacity_nats), s)?, 1.0);
        let want = prelog_analytic(law.cdf(z))?;
        track(prelog_numeric(|x| Ok(tci_capacity(law, x, z)?.capacity_nats), s)?, want);
    }
    Ok((worst <= 0.02, format!("max deviation {worst:.2e} at S=1e6")))
}

fn slopes(law: &dyn FadingDistribution, thresholds: &[f64]) -> Result<(bool, String)> {
    let s = 1e-6;
    let mut worst = 0.0f64;
    for r in low_snr_slopes(law, thresholds)? {
        if !r.slope.is_finite() {
            continue;
        }
        let numeric = match (r.scheme, r.z_t) {
            (Scheme::Awgn, _) => low_snr_slope_numeric(|x| Ok(awgn_capacity(law, x)?.capacity_nats), s)?,
            (Scheme::Ra, _) => low_snr_slope_numeric(|x| Ok(ra_capacity(law, x)?.capacity_nats), s)?,
            (Scheme::Ci, _) if law.satisfies_a2() => {
                low_snr_slope_numeric(|x| Ok(ci_capacity(law, x)?.capacity_nats), s)?
            }
            (Scheme::Tci, Some(z)) => low_snr_slope_numeric(|x| Ok(tci_capacity(law, x, z)?.capacity_nats), s)?,
            (Scheme::Ctci, Some(z)) => low_snr_slope_numeric(|x| Ok(ctci_capacity(law, x, z)?.capacity_nats), s)?,
            _ => continue,
        };
        worst = worst.max((numeric / r.slope - 1.0).abs());
    }
    Ok((worst <= 0.01, format!("max relative slope error {worst:.2e} at S=1e-6")))
}

fn gaps(law: &dyn FadingDistribution) -> Result<(bool, String)> {
    let g = gap_report(law);
    let finite = g.gap_awgn_ci.is_finite() && g.gap_awgn_oa.is_finite() && g.gap_oa_ci.is_finite();
    let additive = !finite || (g.gap_awgn_oa + g.gap_oa_ci - g.gap_awgn_ci).abs() <= 1e-10;
    let nonneg = g.gap_awgn_oa >= -1e-12 && g.gap_oa_ci >= -1e-12;
    Ok((
        additive && nonneg,
        format!(
            "awgn-oa {:.6}, oa-ci {:.6}, awgn-ci {:.6} nats",
            g.gap_awgn_oa, g.gap_oa_ci, g.gap_awgn_ci
        ),
    ))
}

fn monte_carlo(law: &dyn FadingDistribution, median: f64, seed: u64, samples: u64) -> Result<(bool, String)> {
    let schemes = [
        SchemeSpec::new(Scheme::Oa),
        SchemeSpec::new(Scheme::Ra),
        SchemeSpec::new(Scheme::Ci),
        SchemeSpec::with_threshold(Scheme::Tci, median),
        SchemeSpec::with_threshold(Scheme::Ctci, median),
    ];
    let (mut cells, mut agree, mut power_cells, mut power_ok) = (0, 0, 0, 0);
    for spec in schemes {
        for s in [0.1, 1.0, 10.0, 100.0] {
            let quad = spec.evaluate(law, s)?.capacity_nats;
            let est = mc_capacity(law, &resolve_policy(law, &spec, s)?, s, samples, seed)?;
            cells += 1;
            if (est.mean_nats - quad).abs() <= 3.0 * est.std_error {
                agree += 1;
            }
            if matches!(spec.scheme, Scheme::Oa | Scheme::Tci | Scheme::Ctci) {
                power_cells += 1;
                if (est.power_mean - 1.0).abs() <= 3.0 * est.power_std_error {
                    power_ok += 1;
                }
            }
        }
    }
    let pass = agree as f64 >= 0.95 * cells as f64 && power_ok as f64 >= 0.95 * power_cells as f64;
    Ok((
        pass,
        format!("{agree}/{cells} capacities and {power_ok}/{power_cells} power audits within 3 se, {samples} samples"),
    ))
}

pub fn run(law: &dyn FadingDistribution, level: Level, seed: u64, samples: u64) -> Vec<Check> {
    let thresholds = match quartiles(law) {
        Ok(t) => t,
        Err(e) => {
            return vec![Check {
                name: "quartiles",
                pass: false,
                detail: format!("error: {e}"),
            }]
        }
    };
    let grid = snr_grid(level);
    let mut checks = vec![
        check("moments", moments(law)),
        check("ordering_chain", ordering(law, &grid, &thresholds)),
        check("power_residuals", residuals(law, &grid, &thresholds)),
        check("prelog", prelog(law, &thresholds)),
        check("low_snr_slopes", slopes(law, &thresholds)),
        check("gaps", gaps(law)),
    ];
    if level == Level::Full {
        checks.push(check("monte_carlo", monte_carlo(law, thresholds[1], seed, samples)));
    }
    checks
}

pub fn to_json(label: &str, level: Level, checks: &[Check]) -> Value {
    json!({
        "dist": label,
        "level": if level == Level::Full { "full" } else { "fast" },
        "pass": checks.iter().all(|c| c.pass),
        "checks": checks,
    })
}
