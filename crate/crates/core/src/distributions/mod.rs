//! Laws of the effective channel gain `z = γ / S`.
//!
//! A [`FadingDistribution`] exposes the density, the distribution function
//! and the handful of moments every capacity formula needs. The law does not
//! depend on the average power `S`, which enters the schemes only through the
//! product `S·z`.

mod frechet;
mod gamma;
mod max_exp;
mod miso;
mod scaled;
mod spec;
mod tabulated;

use std::fmt;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::numerics::{self, integrate_finite, integrate_semi_infinite, Bracket, DEFAULT_REL_TOL};

pub use frechet::{make_frechet, Frechet};
pub use gamma::{make_gamma_diversity, GammaDiversity};
pub use max_exp::{make_max_exponential, MaxExponential};
pub use miso::{make_miso_multiuser, MisoMultiuser};
pub use scaled::{scaled, Scaled};
pub use spec::{DistributionKind, DistributionSpec};
pub use tabulated::{load_tabulated_csv, make_tabulated, parse_tabulated_csv, Tabulated};

pub trait FadingDistribution: Send + Sync + fmt::Debug {
    /// Short human-readable name, e.g. `gamma(N=2)`.
    fn label(&self) -> String;

    fn pdf(&self, z: f64) -> f64;

    fn cdf(&self, z: f64) -> f64;

    /// Survival function `1 - F(z)`; implementations override this where
    /// the subtraction would lose the upper tail.
    fn sf(&self, z: f64) -> f64 {
        1.0 - self.cdf(z)
    }

    /// `E[z]`; `+∞` when the law has no finite mean.
    fn mean(&self) -> f64;

    /// `E[1/z]`; `+∞` when assumption A2 fails.
    fn inverse_mean(&self) -> f64;

    /// `E[log z]` in nats.
    fn log_mean(&self) -> f64;

    /// `sup{z : F(z) < 1}`, possibly `+∞`.
    fn support_sup(&self) -> f64 {
        f64::INFINITY
    }

    /// Exponent `d` of the regular variation `F(z) ~ z^d l(z)` at zero.
    fn diversity_order(&self) -> f64;

    /// One draw of `z`. Callers own the random state.
    fn sample(&self, rng: &mut dyn RngCore) -> f64;

    /// Points where the density is not smooth; integrals are split there.
    fn knots(&self) -> Vec<f64> {
        Vec::new()
    }

    /// `∫_lo^hi g(z) f(z) dz`, with `hi` possibly infinite.
    fn expectation(&self, g: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
        expectation_with_tol(self, g, lo, hi, DEFAULT_REL_TOL)
    }

    /// `∫_t^∞ z^{-1} f(z) dz`.
    fn tail_inverse_integral(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(self.inverse_mean());
        }
        self.expectation(&|z| 1.0 / z, t, f64::INFINITY)
    }

    /// `∫_0^t z f(z) dz`.
    fn head_mean(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        if t.is_infinite() {
            return Ok(self.mean());
        }
        self.expectation(&|z| z, 0.0, t)
    }

    /// Assumption A2: `0 < E[1/z] < ∞`.
    fn satisfies_a2(&self) -> bool {
        let m = self.inverse_mean();
        m.is_finite() && m > 0.0
    }

    fn has_finite_mean(&self) -> bool {
        self.mean().is_finite()
    }
}

impl FadingDistribution for Box<dyn FadingDistribution> {
    fn label(&self) -> String {
        (**self).label()
    }
    fn pdf(&self, z: f64) -> f64 {
        (**self).pdf(z)
    }
    fn cdf(&self, z: f64) -> f64 {
        (**self).cdf(z)
    }
    fn sf(&self, z: f64) -> f64 {
        (**self).sf(z)
    }
    fn mean(&self) -> f64 {
        (**self).mean()
    }
    fn inverse_mean(&self) -> f64 {
        (**self).inverse_mean()
    }
    fn log_mean(&self) -> f64 {
        (**self).log_mean()
    }
    fn support_sup(&self) -> f64 {
        (**self).support_sup()
    }
    fn diversity_order(&self) -> f64 {
        (**self).diversity_order()
    }
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        (**self).sample(rng)
    }
    fn knots(&self) -> Vec<f64> {
        (**self).knots()
    }
    fn expectation(&self, g: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
        (**self).expectation(g, lo, hi)
    }
    fn tail_inverse_integral(&self, t: f64) -> Result<f64> {
        (**self).tail_inverse_integral(t)
    }
    fn head_mean(&self, t: f64) -> Result<f64> {
        (**self).head_mean(t)
    }
}

/// Quadrature of `g·f` over `[lo, hi]`, split at the law's knots and at the
/// end of its support.
pub fn expectation_with_tol<D: FadingDistribution + ?Sized>(
    dist: &D,
    g: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<f64> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::Domain(format!("expectation over [{lo}, {hi}]")));
    }
    let lo = lo.max(0.0);
    let hi = hi.min(dist.support_sup());
    if lo >= hi {
        return Ok(0.0);
    }
    let integrand = |z: f64| {
        let p = dist.pdf(z);
        if p == 0.0 {
            0.0
        } else {
            g(z) * p
        }
    };

    let mut cuts = vec![lo];
    cuts.extend(dist.knots().into_iter().filter(|&k| k > lo && k < hi));
    let mut total = 0.0;
    let last = *cuts.last().expect("non-empty");
    for w in cuts.windows(2) {
        total += integrate_finite(integrand, w[0], w[1], rel_tol)?.value;
    }
    total += if hi.is_infinite() {
        integrate_semi_infinite(integrand, last, rel_tol)?.value
    } else {
        integrate_finite(integrand, last, hi, rel_tol)?.value
    };
    Ok(total)
}

/// Moments recomputed from the density alone, independent of any closed form
/// a distribution carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub mass: f64,
    pub mean: f64,
    pub inverse_mean: f64,
    pub log_mean: f64,
}

pub fn quadrature_moments<D: FadingDistribution + ?Sized>(dist: &D, rel_tol: f64) -> Result<QuadratureMoments> {
    let e = |g: &dyn Fn(f64) -> f64| expectation_with_tol(dist, g, 0.0, f64::INFINITY, rel_tol);
    let inverse_mean = if dist.satisfies_a2() {
        e(&|z| 1.0 / z)?
    } else {
        f64::INFINITY
    };
    let mean = if dist.has_finite_mean() {
        e(&|z| z)?
    } else {
        f64::INFINITY
    };
    Ok(QuadratureMoments {
        mass: e(&|_| 1.0)?,
        mean,
        inverse_mean,
        log_mean: e(&f64::ln)?,
    })
}

/// Checks that the density integrates to one within `1e-9`.
pub(crate) fn check_normalization<D: FadingDistribution + ?Sized>(dist: &D) -> Result<()> {
    let mass = expectation_with_tol(dist, &|_| 1.0, 0.0, f64::INFINITY, 1e-12)?;
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::Check(format!("{}: density integrates to {mass}", dist.label())));
    }
    Ok(())
}

/// Flags for the model assumptions of the effective channel gain.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Assumptions {
    /// `F(0) = 0`, a consequence of A1.
    pub cdf_vanishes_at_zero: bool,
    /// `E[|log z|] < ∞`, also implied by A1.
    pub finite_log_mean: bool,
    pub a2: bool,
    pub finite_mean: bool,
}

pub fn assumptions<D: FadingDistribution + ?Sized>(dist: &D) -> Assumptions {
    Assumptions {
        cdf_vanishes_at_zero: dist.cdf(0.0) == 0.0,
        finite_log_mean: dist.log_mean().is_finite(),
        a2: dist.satisfies_a2(),
        finite_mean: dist.has_finite_mean(),
    }
}

/// Smallest `z` with `1 - F(z) <= tail`, located on a log scale.
pub fn upper_quantile<D: FadingDistribution + ?Sized>(dist: &D, tail: f64) -> Result<f64> {
    if !(tail > 0.0 && tail < 1.0) {
        return Err(Error::Domain(format!(
            "tail probability must lie in (0, 1), got {tail}"
        )));
    }
    let sup = dist.support_sup();
    let hi = if sup.is_finite() {
        sup
    } else {
        let mut hi = dist.mean().max(1.0);
        if !hi.is_finite() {
            hi = 1.0;
        }
        while dist.sf(hi) > tail {
            hi *= 4.0;
            if hi > 1e300 {
                return Err(Error::Domain(format!("{}: tail {tail} not reached", dist.label())));
            }
        }
        hi
    };
    let mut lo = hi.min(1.0);
    while dist.sf(lo) <= tail {
        lo *= 0.25;
        if lo < 1e-300 {
            return Ok(0.0);
        }
    }
    if dist.sf(hi) > tail {
        return Ok(hi);
    }
    let g = |u: f64| Ok(dist.sf(u.exp()) - tail);
    let root = numerics::find_root_monotone(g, Bracket::new(lo.ln(), hi.ln())?, 1e-12)?;
    Ok(root.x.exp())
}

/// Uniform draw on the open interval `(0, 1)`.
pub(crate) fn open_unit(rng: &mut dyn RngCore) -> f64 {
    let bits: u64 = rng.random::<u64>() >> 11;
    (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard exponential draw.
pub(crate) fn exponential(rng: &mut dyn RngCore) -> f64 {
    -open_unit(rng).ln()
}
