use rand::RngCore;

use super::{check_normalization, open_unit, FadingDistribution};
use crate::error::{Error, Result};
use crate::numerics::{gamma_fn, log_gamma, EULER_MASCHERONI};

/// Maximum of `K` i.i.d. Fréchet gains with `F(z) = exp(-z^{-α})`, i.e. a
/// single Fréchet law `exp(-K z^{-α})`.
///
/// The lower tail vanishes faster than any power, so the diversity order is
/// reported as `+∞`. For `α <= 1` the mean is infinite and the law is
/// flagged through [`FadingDistribution::has_finite_mean`].
#[derive(Debug, Clone)]
pub struct Frechet {
    alpha: f64,
    k: u32,
    mean: f64,
    inverse_mean: f64,
    log_mean: f64,
}

pub fn make_frechet(alpha: f64, k: u32) -> Result<Frechet> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!(
            "Frechet shape alpha must be > 0, got {alpha}"
        )));
    }
    if k < 1 {
        return Err(Error::Parameter(format!("user count K must be >= 1, got {k}")));
    }
    let kf = f64::from(k);
    let scale = kf.powf(1.0 / alpha);
    let mean = if alpha > 1.0 {
        scale * gamma_fn(1.0 - 1.0 / alpha)?
    } else {
        f64::INFINITY
    };
    let d = Frechet {
        alpha,
        k,
        mean,
        inverse_mean: gamma_fn(1.0 + 1.0 / alpha)? / scale,
        log_mean: (kf.ln() + EULER_MASCHERONI) / alpha,
    };
    check_normalization(&d)?;
    Ok(d)
}

impl Frechet {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn users(&self) -> u32 {
        self.k
    }

    /// `log Γ(1 + 1/α)`, shared by the closed-form gap expressions.
    pub fn log_gamma_one_plus_inv_alpha(&self) -> f64 {
        log_gamma(1.0 + 1.0 / self.alpha).unwrap_or(f64::NAN)
    }
}

impl FadingDistribution for Frechet {
    fn label(&self) -> String {
        format!("frechet(alpha={}, K={})", self.alpha, self.k)
    }

    fn pdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        let kf = f64::from(self.k);
        let lz = z.ln();
        let log_pdf = (kf * self.alpha).ln() - (self.alpha + 1.0) * lz - kf * (-self.alpha * lz).exp();
        log_pdf.exp()
    }

    fn cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        (-f64::from(self.k) * z.powf(-self.alpha)).exp()
    }

    fn sf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 1.0;
        }
        -(-f64::from(self.k) * z.powf(-self.alpha)).exp_m1()
    }

    fn mean(&self) -> f64 {
        self.mean
    }

    fn inverse_mean(&self) -> f64 {
        self.inverse_mean
    }

    fn log_mean(&self) -> f64 {
        self.log_mean
    }

    fn diversity_order(&self) -> f64 {
        f64::INFINITY
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let u = open_unit(rng);
        (-u.ln() / f64::from(self.k)).powf(-1.0 / self.alpha)
    }
}
