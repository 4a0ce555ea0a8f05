//! Ergodic capacities of the adaptive transmission schemes.
//!
//! Noise power is normalized to one, so the average SNR equals the average
//! power `S`. Thresholds are given in effective-gain units `z_t = γ_t / S`.
//! All capacities are in nats per channel use.

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::{upper_quantile, FadingDistribution};
use crate::error::{Error, Result};
use crate::numerics::{find_root_monotone, maximize_unimodal, Bracket};

/// Residual bound every solved power constraint must meet.
pub const POWER_RESIDUAL_TOL: f64 = 1e-8;

const OA_ROOT_TOL: f64 = 1e-13;
const OA_LOWER_GUARD: f64 = 1e-300;
/// Golden-section tolerance in `log z_t`.
const TCI_SEARCH_TOL: f64 = 1e-7;
/// Search range for the optimal TCI threshold: from the `1e-12` upper
/// quantile down by this many decades.
const TCI_SEARCH_DECADES: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Awgn,
    Oa,
    Ra,
    Ci,
    Tci,
    Ctci,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Awgn => "awgn",
            Scheme::Oa => "oa",
            Scheme::Ra => "ra",
            Scheme::Ci => "ci",
            Scheme::Tci => "tci",
            Scheme::Ctci => "ctci",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "awgn" => Ok(Scheme::Awgn),
            "oa" => Ok(Scheme::Oa),
            "ra" => Ok(Scheme::Ra),
            "ci" => Ok(Scheme::Ci),
            "tci" => Ok(Scheme::Tci),
            "ctci" => Ok(Scheme::Ctci),
            other => Err(Error::Format(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityResult {
    pub scheme: Scheme,
    pub avg_power: f64,
    pub capacity_nats: f64,
    pub threshold_z_t: Option<f64>,
    pub d_max: Option<f64>,
    pub power_constraint_residual: Option<f64>,
    /// Set when the scheme cannot transmit at all (CI without A2).
    pub degenerate: bool,
}

impl CapacityResult {
    fn plain(scheme: Scheme, avg_power: f64, capacity_nats: f64) -> Self {
        CapacityResult {
            scheme,
            avg_power,
            capacity_nats,
            threshold_z_t: None,
            d_max: None,
            power_constraint_residual: None,
            degenerate: false,
        }
    }

    pub fn capacity_bits(&self) -> f64 {
        self.capacity_nats / std::f64::consts::LN_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdSolution {
    pub z_t: f64,
    /// Mismatch of the defining power constraint at `z_t`.
    pub residual: f64,
    pub iterations: usize,
}

/// Instantaneous power ratio `D` as a function of the effective gain `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerPolicy {
    Constant,
    WaterFilling {
        avg_power: f64,
        z_t: f64,
    },
    /// Full inversion to the constant received SNR `S / E[1/z]`; `None`
    /// when A2 fails and nothing can be sent.
    Inversion {
        inverse_mean: Option<f64>,
    },
    Truncated {
        z_t: f64,
        d_max: f64,
    },
    ContinuousTruncated {
        z_t: f64,
        d_max: f64,
    },
}

impl PowerPolicy {
    pub fn power_ratio(&self, z: f64) -> f64 {
        match *self {
            PowerPolicy::Constant => 1.0,
            PowerPolicy::WaterFilling { avg_power, z_t } => {
                if z > z_t {
                    (1.0 / z_t - 1.0 / z) / avg_power
                } else {
                    0.0
                }
            }
            PowerPolicy::Inversion { inverse_mean } => match inverse_mean {
                Some(m) => 1.0 / (m * z),
                None => 0.0,
            },
            PowerPolicy::Truncated { z_t, d_max } => {
                if z < z_t {
                    0.0
                } else {
                    d_max * z_t / z
                }
            }
            PowerPolicy::ContinuousTruncated { z_t, d_max } => {
                if z < z_t {
                    d_max
                } else {
                    d_max * z_t / z
                }
            }
        }
    }

    /// Instantaneous rate `log(1 + S·D(z)·z)` in nats.
    pub fn rate(&self, avg_power: f64, z: f64) -> f64 {
        match *self {
            // log(z / z_t) above the cutoff, written to avoid cancellation.
            PowerPolicy::WaterFilling { z_t, .. } => {
                if z > z_t {
                    (z / z_t).ln()
                } else {
                    0.0
                }
            }
            PowerPolicy::Inversion { inverse_mean: Some(m) } => (avg_power / m).ln_1p(),
            PowerPolicy::Truncated { z_t, d_max } if z >= z_t => (avg_power * d_max * z_t).ln_1p(),
            PowerPolicy::ContinuousTruncated { z_t, d_max } if z >= z_t => (avg_power * d_max * z_t).ln_1p(),
            _ => (avg_power * self.power_ratio(z) * z).ln_1p(),
        }
    }

    fn threshold(&self) -> Option<f64> {
        match *self {
            PowerPolicy::WaterFilling { z_t, .. }
            | PowerPolicy::Truncated { z_t, .. }
            | PowerPolicy::ContinuousTruncated { z_t, .. } => Some(z_t),
            _ => None,
        }
    }
}

/// `E[D(z)]` by quadrature of the policy itself, split at its threshold.
pub fn power_usage(dist: &dyn FadingDistribution, policy: &PowerPolicy) -> Result<f64> {
    let d = |z: f64| policy.power_ratio(z);
    match *policy {
        PowerPolicy::Constant => Ok(1.0),
        PowerPolicy::Inversion { inverse_mean: None } => Ok(0.0),
        PowerPolicy::Inversion { inverse_mean: Some(_) } => dist.expectation(&d, 0.0, f64::INFINITY),
        _ => {
            let z_t = policy.threshold().expect("thresholded policy");
            let below = if z_t > 0.0 {
                dist.expectation(&d, 0.0, z_t)?
            } else {
                0.0
            };
            Ok(below + dist.expectation(&d, z_t, f64::INFINITY)?)
        }
    }
}

/// Ergodic capacity `∫ log(1 + S·D(z)·z) f(z) dz` of an arbitrary policy by
/// direct quadrature. The per-scheme functions below use closed-form
/// reductions of the same integral.
pub fn policy_capacity(dist: &dyn FadingDistribution, policy: &PowerPolicy, avg_power: f64) -> Result<f64> {
    let r = |z: f64| policy.rate(avg_power, z);
    match policy.threshold() {
        Some(z_t) if z_t > 0.0 => Ok(dist.expectation(&r, 0.0, z_t)? + dist.expectation(&r, z_t, f64::INFINITY)?),
        _ => dist.expectation(&r, 0.0, f64::INFINITY),
    }
}

fn check_power(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "average power must be positive and finite, got {s}"
        )))
    }
}

/// `log(1 + S·E[z])`.
pub fn awgn_capacity(dist: &dyn FadingDistribution, s: f64) -> Result<CapacityResult> {
    check_power(s)?;
    Ok(CapacityResult::plain(Scheme::Awgn, s, (s * dist.mean()).ln_1p()))
}

/// Left-hand side of the water-filling power constraint,
/// `(1/S) ∫_{z_t}^∞ (1/z_t - 1/z) f(z) dz`.
fn oa_power(dist: &dyn FadingDistribution, s: f64, z_t: f64) -> Result<f64> {
    Ok(dist.expectation(&|z| 1.0 / z_t - 1.0 / z, z_t, f64::INFINITY)? / s)
}

/// Solves the water-filling cutoff. The constraint is decreasing in `z_t`
/// and the root lies below `min(1/S, sup z)`, so Brent's method runs on
/// `log z_t` over that bracket.
pub fn oa_threshold(dist: &dyn FadingDistribution, s: f64) -> Result<ThresholdSolution> {
    check_power(s)?;
    let upper = (1.0 / s).min(dist.support_sup());
    let g = |u: f64| Ok(oa_power(dist, s, u.exp())? - 1.0);

    // With z_t <= 1/S the constraint gives z_t >= (1 - F(1/S)) / (S + E[1/z]).
    let mut lower = OA_LOWER_GUARD;
    let candidate = 0.5 * dist.sf(upper) / (s + dist.inverse_mean());
    if candidate.is_finite() && candidate > OA_LOWER_GUARD && candidate < upper && g(candidate.ln())? > 0.0 {
        lower = candidate;
    }

    let root = find_root_monotone(g, Bracket::new(lower.ln(), upper.ln())?, OA_ROOT_TOL)?;
    Ok(ThresholdSolution {
        z_t: root.x.exp(),
        residual: root.residual,
        iterations: root.iterations,
    })
}

/// `∫_{z_t}^∞ log(z / z_t) f(z) dz` at the solved cutoff.
pub fn oa_capacity(dist: &dyn FadingDistribution, s: f64) -> Result<CapacityResult> {
    let th = oa_threshold(dist, s)?;
    let z_t = th.z_t;
    let capacity = dist.expectation(&|z| (z / z_t).ln(), z_t, f64::INFINITY)?;
    let used = power_usage(dist, &PowerPolicy::WaterFilling { avg_power: s, z_t })?;
    Ok(CapacityResult {
        threshold_z_t: Some(z_t),
        power_constraint_residual: Some(used - 1.0),
        ..CapacityResult::plain(Scheme::Oa, s, capacity.max(0.0))
    })
}

/// `∫ log(1 + S z) f(z) dz`.
pub fn ra_capacity(dist: &dyn FadingDistribution, s: f64) -> Result<CapacityResult> {
    check_power(s)?;
    let capacity = dist.expectation(&|z| (s * z).ln_1p(), 0.0, f64::INFINITY)?;
    Ok(CapacityResult::plain(Scheme::Ra, s, capacity))
}

/// `log(1 + S / E[1/z])`; zero and flagged degenerate when A2 fails.
pub fn ci_capacity(dist: &dyn FadingDistribution, s: f64) -> Result<CapacityResult> {
    check_power(s)?;
    if !dist.satisfies_a2() {
        return Ok(CapacityResult {
            degenerate: true,
            ..CapacityResult::plain(Scheme::Ci, s, 0.0)
        });
    }
    Ok(CapacityResult::plain(Scheme::Ci, s, (s / dist.inverse_mean()).ln_1p()))
}

fn check_threshold(dist: &dyn FadingDistribution, z_t: f64) -> Result<()> {
    if !(z_t > 0.0) || z_t >= dist.support_sup() {
        return Err(Error::Domain(format!(
            "threshold must lie in (0, {}), got {z_t}",
            dist.support_sup()
        )));
    }
    Ok(())
}

/// `D_max(z_t) = [∫_{z_t}^∞ (z_t / z) f(z) dz]^{-1}`; independent of `S`.
pub fn tci_dmax(dist: &dyn FadingDistribution, z_t: f64) -> Result<f64> {
    check_threshold(dist, z_t)?;
    Ok(1.0 / (z_t * dist.tail_inverse_integral(z_t)?))
}

fn tci_value(dist: &dyn FadingDistribution, s: f64, z_t: f64) -> Result<f64> {
    let tail = dist.tail_inverse_integral(z_t)?;
    Ok(dist.sf(z_t) * (s / tail).ln_1p())
}

/// `[1 - F(z_t)] log(1 + S·D_max·z_t)`. A zero threshold is the CI limit.
pub fn tci_capacity(dist: &dyn FadingDistribution, s: f64, z_t: f64) -> Result<CapacityResult> {
    check_power(s)?;
    if z_t == 0.0 {
        let ci = ci_capacity(dist, s)?;
        return Ok(CapacityResult {
            scheme: Scheme::Tci,
            threshold_z_t: Some(0.0),
            ..ci
        });
    }
    let d_max = tci_dmax(dist, z_t)?;
    let capacity = dist.sf(z_t) * (s * d_max * z_t).ln_1p();
    let used = power_usage(dist, &PowerPolicy::Truncated { z_t, d_max })?;
    Ok(CapacityResult {
        threshold_z_t: Some(z_t),
        d_max: Some(d_max),
        power_constraint_residual: Some(used - 1.0),
        ..CapacityResult::plain(Scheme::Tci, s, capacity)
    })
}

/// Maximizes the TCI capacity over the threshold.
///
/// The search runs on `log z_t` from the `1e-12` upper quantile down six
/// decades: a 64-point grid scan and then golden-section refinement. On a
/// plateau the smallest near-optimal grid threshold is kept.
pub fn tci_optimize(dist: &dyn FadingDistribution, s: f64) -> Result<(ThresholdSolution, CapacityResult)> {
    check_power(s)?;
    let mut z_hi = upper_quantile(dist, 1e-12)?;
    let sup = dist.support_sup();
    if sup.is_finite() {
        z_hi = z_hi.min(sup * (1.0 - 1e-9));
    }
    let z_lo = z_hi * 10f64.powf(-TCI_SEARCH_DECADES);
    let evaluations = Cell::new(0usize);
    let objective = |u: f64| {
        evaluations.set(evaluations.get() + 1);
        tci_value(dist, s, u.exp())
    };
    let best = maximize_unimodal(objective, Bracket::new(z_lo.ln(), z_hi.ln())?, TCI_SEARCH_TOL)?;
    let z_t = best.argmax.exp();
    let result = tci_capacity(dist, s, z_t)?;
    let solution = ThresholdSolution {
        z_t,
        residual: result.power_constraint_residual.unwrap_or(0.0),
        iterations: evaluations.get(),
    };
    Ok((solution, result))
}

/// `D_max(z_t) = [F(z_t) + ∫_{z_t}^∞ (z_t / z) f(z) dz]^{-1}`.
///
/// Infinite at `z_t = 0` (the CI limit, where only `D_max·z_t` is finite)
/// and one at `z_t = ∞` (RA).
pub fn ctci_dmax(dist: &dyn FadingDistribution, z_t: f64) -> Result<f64> {
    if z_t.is_nan() || z_t < 0.0 {
        return Err(Error::Domain(format!("threshold must be >= 0, got {z_t}")));
    }
    if z_t == 0.0 {
        return Ok(f64::INFINITY);
    }
    if z_t >= dist.support_sup() {
        return Ok(1.0);
    }
    Ok(1.0 / (dist.cdf(z_t) + z_t * dist.tail_inverse_integral(z_t)?))
}

/// `∫_0^{z_t} log(1 + S·D_max·z) f dz + [1 - F(z_t)] log(1 + S·D_max·z_t)`.
pub fn ctci_capacity(dist: &dyn FadingDistribution, s: f64, z_t: f64) -> Result<CapacityResult> {
    check_power(s)?;
    if z_t == 0.0 {
        let ci = ci_capacity(dist, s)?;
        return Ok(CapacityResult {
            scheme: Scheme::Ctci,
            threshold_z_t: Some(0.0),
            d_max: Some(f64::INFINITY),
            power_constraint_residual: Some(0.0),
            ..ci
        });
    }
    let d_max = ctci_dmax(dist, z_t)?;
    if z_t >= dist.support_sup() {
        let ra = ra_capacity(dist, s)?;
        return Ok(CapacityResult {
            scheme: Scheme::Ctci,
            threshold_z_t: Some(z_t),
            d_max: Some(1.0),
            power_constraint_residual: Some(0.0),
            ..ra
        });
    }
    let head = dist.expectation(&|z| (s * d_max * z).ln_1p(), 0.0, z_t)?;
    let capacity = head + dist.sf(z_t) * (s * d_max * z_t).ln_1p();
    let used = power_usage(dist, &PowerPolicy::ContinuousTruncated { z_t, d_max })?;
    Ok(CapacityResult {
        threshold_z_t: Some(z_t),
        d_max: Some(d_max),
        power_constraint_residual: Some(used - 1.0),
        ..CapacityResult::plain(Scheme::Ctci, s, capacity)
    })
}

/// Threshold choice for the truncated schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Fixed(f64),
    Optimal,
}

/// A scheme together with its threshold parameter, written `oa`, `ci`,
/// `tci:1.5`, `tci:opt` or `ctci:0.5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeSpec {
    pub scheme: Scheme,
    pub threshold: Option<Threshold>,
}

impl SchemeSpec {
    pub fn new(scheme: Scheme) -> Self {
        SchemeSpec {
            scheme,
            threshold: None,
        }
    }

    pub fn with_threshold(scheme: Scheme, z_t: f64) -> Self {
        SchemeSpec {
            scheme,
            threshold: Some(Threshold::Fixed(z_t)),
        }
    }

    /// Fills in a missing threshold for TCI/CTCI.
    pub fn or_threshold(self, z_t: Option<f64>) -> Self {
        match (self.threshold, z_t) {
            (None, Some(z)) if matches!(self.scheme, Scheme::Tci | Scheme::Ctci) => {
                SchemeSpec::with_threshold(self.scheme, z)
            }
            _ => self,
        }
    }

    pub fn evaluate(&self, dist: &dyn FadingDistribution, s: f64) -> Result<CapacityResult> {
        let need = || Error::Parameter(format!("scheme {} needs a threshold", self.scheme));
        match (self.scheme, self.threshold) {
            (Scheme::Awgn, _) => awgn_capacity(dist, s),
            (Scheme::Oa, _) => oa_capacity(dist, s),
            (Scheme::Ra, _) => ra_capacity(dist, s),
            (Scheme::Ci, _) => ci_capacity(dist, s),
            (Scheme::Tci, Some(Threshold::Fixed(z))) => tci_capacity(dist, s, z),
            (Scheme::Tci, Some(Threshold::Optimal)) => Ok(tci_optimize(dist, s)?.1),
            (Scheme::Ctci, Some(Threshold::Fixed(z))) => ctci_capacity(dist, s, z),
            (Scheme::Ctci, Some(Threshold::Optimal)) => Err(Error::Parameter(
                "ctci capacity increases with the threshold; use ra instead of ctci:opt".into(),
            )),
            (Scheme::Tci | Scheme::Ctci, None) => Err(need()),
        }
    }
}

impl FromStr for SchemeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let scheme: Scheme = name.parse()?;
        let threshold = match param {
            None => None,
            Some(p) if !matches!(scheme, Scheme::Tci | Scheme::Ctci) => {
                return Err(Error::Format(format!("scheme {scheme} takes no parameter, got {p:?}")))
            }
            Some("opt") => Some(Threshold::Optimal),
            Some(p) => {
                let z: f64 = p
                    .parse()
                    .map_err(|_| Error::Format(format!("threshold must be a number or 'opt', got {p:?}")))?;
                if !(z >= 0.0) {
                    return Err(Error::Format(format!("threshold must be >= 0, got {z}")));
                }
                Some(Threshold::Fixed(z))
            }
        };
        Ok(SchemeSpec { scheme, threshold })
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.threshold {
            None => write!(f, "{}", self.scheme),
            Some(Threshold::Optimal) => write!(f, "{}:opt", self.scheme),
            Some(Threshold::Fixed(z)) => write!(f, "{}:{z}", self.scheme),
        }
    }
}
