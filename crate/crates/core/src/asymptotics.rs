//! High-SNR gaps, pre-log constants and low-SNR slopes.
//!
//! Gaps come straight from the moments of the effective channel gain. The
//! finite-difference helpers exist to check those limits against the
//! capacity functions themselves.

use serde::{Serialize, Serializer};

use crate::distributions::FadingDistribution;
use crate::error::{Error, Result};
use crate::numerics::{digamma, log_gamma, EULER_MASCHERONI};
use crate::schemes::Scheme;

/// Relative step of the two-sided finite differences.
pub const FD_STEP: f64 = 1e-3;

fn finite_or_inf<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_infinite() && *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*x)
    }
}

/// Limits of the capacity differences as `S → ∞`, in nats. Gaps that do not
/// exist are `+∞` and serialize as `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    pub gap_oa_ra: f64,
    #[serde(serialize_with = "finite_or_inf")]
    pub gap_awgn_oa: f64,
    #[serde(serialize_with = "finite_or_inf")]
    pub gap_oa_ci: f64,
    #[serde(serialize_with = "finite_or_inf")]
    pub gap_awgn_ci: f64,
}

impl GapReport {
    /// The same report with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> GapReport {
        GapReport {
            gap_oa_ra: self.gap_oa_ra * factor,
            gap_awgn_oa: self.gap_awgn_oa * factor,
            gap_oa_ci: self.gap_oa_ci * factor,
            gap_awgn_ci: self.gap_awgn_ci * factor,
        }
    }
}

/// `log E[z] - E[log z]`; `+∞` without a finite mean.
pub fn gap_awgn_oa(dist: &dyn FadingDistribution) -> f64 {
    if !dist.has_finite_mean() {
        return f64::INFINITY;
    }
    (dist.mean().ln() - dist.log_mean()).max(0.0)
}

/// `E[log z] + log E[1/z]`; `+∞` when A2 fails.
pub fn gap_oa_ci(dist: &dyn FadingDistribution) -> f64 {
    if !dist.satisfies_a2() {
        return f64::INFINITY;
    }
    (dist.log_mean() + dist.inverse_mean().ln()).max(0.0)
}

/// `log(E[z] E[1/z])`.
pub fn gap_awgn_ci(dist: &dyn FadingDistribution) -> f64 {
    if !dist.satisfies_a2() || !dist.has_finite_mean() {
        return f64::INFINITY;
    }
    (dist.mean().ln() + dist.inverse_mean().ln()).max(0.0)
}

pub fn gap_report(dist: &dyn FadingDistribution) -> GapReport {
    GapReport {
        gap_oa_ra: 0.0,
        gap_awgn_oa: gap_awgn_oa(dist),
        gap_oa_ci: gap_oa_ci(dist),
        gap_awgn_ci: gap_awgn_ci(dist),
    }
}

/// Exact gaps of N-antenna beamforming over Rayleigh fading with their
/// leading-order expansions in `1/(N-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpaceDiversityGaps {
    pub n: u32,
    pub gap_oa_ci: f64,
    pub gap_awgn_ci: f64,
    pub expansion_oa_ci: f64,
    pub expansion_awgn_ci: f64,
}

pub fn space_diversity_gaps(n: u32) -> Result<SpaceDiversityGaps> {
    if n < 2 {
        return Err(Error::Domain(format!("space diversity gaps need N >= 2, got {n}")));
    }
    let m = f64::from(n - 1);
    Ok(SpaceDiversityGaps {
        n,
        gap_oa_ci: digamma(f64::from(n))? - m.ln(),
        gap_awgn_ci: (1.0 / m).ln_1p(),
        expansion_oa_ci: 0.5 / m,
        expansion_awgn_ci: 1.0 / m,
    })
}

/// Closed-form gaps of the Fréchet law `exp(-K z^{-α})`, which do not
/// depend on `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrechetGaps {
    pub alpha: f64,
    pub gap_oa_ci: f64,
    #[serde(serialize_with = "finite_or_inf")]
    pub gap_awgn_ci: f64,
}

pub fn frechet_gaps(alpha: f64) -> Result<FrechetGaps> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be > 0, got {alpha}")));
    }
    let lg_plus = log_gamma(1.0 + 1.0 / alpha)?;
    let gap_awgn_ci = if alpha > 1.0 {
        log_gamma(1.0 - 1.0 / alpha)? + lg_plus
    } else {
        f64::INFINITY
    };
    Ok(FrechetGaps {
        alpha,
        gap_oa_ci: EULER_MASCHERONI / alpha + lg_plus,
        gap_awgn_ci,
    })
}

/// `log(1 + γ_em / log K)`, the large-K estimate of the AWGN-CI gap under
/// selection among K Rayleigh users. Compare with
/// `gap_awgn_ci(&make_max_exponential(K)?)`.
pub fn multiuser_gap_asymptotic(k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("user count must be >= 2, got {k}")));
    }
    Ok((EULER_MASCHERONI / f64::from(k).ln()).ln_1p())
}

/// A heuristic value that has not been derived rigorously.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub approximate: bool,
    pub note: &'static str,
}

/// Conjectured decay `γ_em / (log K (1 + log K))` of the OA-CI gap under
/// K-user selection. Approximate only.
pub fn multiuser_oa_ci_conjecture(k: u32) -> Result<Estimate> {
    if k < 2 {
        return Err(Error::Domain(format!("user count must be >= 2, got {k}")));
    }
    let l = f64::from(k).ln();
    Ok(Estimate {
        value: EULER_MASCHERONI / (l * (1.0 + l)),
        approximate: true,
        note: "conjectured rate, not a verified formula",
    })
}

/// `dC / d(log S)` at `s_hi` by a central difference in `log S`.
pub fn prelog_numeric<F>(capacity: F, s_hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(s_hi > 0.0 && s_hi.is_finite()) {
        return Err(Error::Domain(format!("S must be positive, got {s_hi}")));
    }
    let up = capacity(s_hi * FD_STEP.exp())?;
    let down = capacity(s_hi * (-FD_STEP).exp())?;
    Ok((up - down) / (2.0 * FD_STEP))
}

/// `1 - Pr(outage)`.
pub fn prelog_analytic(outage_probability: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&outage_probability) {
        return Err(Error::Domain(format!(
            "outage probability must lie in [0, 1], got {outage_probability}"
        )));
    }
    Ok(1.0 - outage_probability)
}

/// `dC / dS` at `s_lo` by a central difference with relative step
/// [`FD_STEP`].
pub fn low_snr_slope_numeric<F>(capacity: F, s_lo: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(s_lo > 0.0 && s_lo.is_finite()) {
        return Err(Error::Domain(format!("S must be positive, got {s_lo}")));
    }
    let h = FD_STEP * s_lo;
    Ok((capacity(s_lo + h)? - capacity(s_lo - h)?) / (2.0 * h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeReport {
    pub scheme: Scheme,
    pub z_t: Option<f64>,
    #[serde(serialize_with = "finite_or_inf")]
    pub slope: f64,
    pub analytic: bool,
}

/// `lim dC/dS` as `S → 0` for TCI at threshold `z_t`.
pub fn tci_low_snr_slope(dist: &dyn FadingDistribution, z_t: f64) -> Result<f64> {
    Ok(dist.sf(z_t) / dist.tail_inverse_integral(z_t)?)
}

/// `lim dC/dS` as `S → 0` for CTCI at threshold `z_t`.
pub fn ctci_low_snr_slope(dist: &dyn FadingDistribution, z_t: f64) -> Result<f64> {
    if z_t == 0.0 {
        return Ok(ci_low_snr_slope(dist));
    }
    let num = dist.head_mean(z_t)? + z_t * dist.sf(z_t);
    let den = dist.cdf(z_t) + z_t * dist.tail_inverse_integral(z_t)?;
    Ok(num / den)
}

/// `1 / E[1/z]`, zero when A2 fails.
pub fn ci_low_snr_slope(dist: &dyn FadingDistribution) -> f64 {
    if dist.satisfies_a2() {
        1.0 / dist.inverse_mean()
    } else {
        0.0
    }
}

/// Analytic low-SNR slopes of every scheme, with TCI and CTCI entries for
/// each threshold in `thresholds`. The OA slope is the end of the support
/// and may be infinite.
pub fn low_snr_slopes(dist: &dyn FadingDistribution, thresholds: &[f64]) -> Result<Vec<SlopeReport>> {
    let plain = |scheme, slope| SlopeReport {
        scheme,
        z_t: None,
        slope,
        analytic: true,
    };
    let mut out = vec![
        plain(Scheme::Ci, ci_low_snr_slope(dist)),
        plain(Scheme::Ra, dist.mean()),
        plain(Scheme::Awgn, dist.mean()),
        plain(Scheme::Oa, dist.support_sup()),
    ];
    for &z_t in thresholds {
        out.push(SlopeReport {
            z_t: Some(z_t),
            ..plain(Scheme::Tci, tci_low_snr_slope(dist, z_t)?)
        });
    }
    for &z_t in thresholds {
        out.push(SlopeReport {
            z_t: Some(z_t),
            ..plain(Scheme::Ctci, ctci_low_snr_slope(dist, z_t)?)
        });
    }
    Ok(out)
}
