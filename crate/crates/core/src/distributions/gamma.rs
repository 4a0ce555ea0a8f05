use rand::RngCore;

use super::{check_normalization, exponential, FadingDistribution};
use crate::error::{Error, Result};
use crate::numerics::{digamma, log_gamma, reg_lower_inc_gamma, reg_upper_inc_gamma};

/// Sum of `N` unit-mean exponentials: the beamforming gain of `N` i.i.d.
/// Rayleigh branches, with density `z^{N-1} e^{-z} / Γ(N)`.
#[derive(Debug, Clone)]
pub struct GammaDiversity {
    n: u32,
    log_norm: f64,
    log_mean: f64,
}

pub fn make_gamma_diversity(n: u32) -> Result<GammaDiversity> {
    if n < 1 {
        return Err(Error::Parameter(format!(
            "gamma diversity order N must be >= 1, got {n}"
        )));
    }
    let nf = f64::from(n);
    let d = GammaDiversity {
        n,
        log_norm: log_gamma(nf)?,
        log_mean: digamma(nf)?,
    };
    check_normalization(&d)?;
    Ok(d)
}

impl GammaDiversity {
    pub fn order(&self) -> u32 {
        self.n
    }
}

impl FadingDistribution for GammaDiversity {
    fn label(&self) -> String {
        format!("gamma(N={})", self.n)
    }

    fn pdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return if z == 0.0 && self.n == 1 { 1.0 } else { 0.0 };
        }
        let nm1 = f64::from(self.n - 1);
        (nm1 * z.ln() - z - self.log_norm).exp()
    }

    fn cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        reg_lower_inc_gamma(f64::from(self.n), z).unwrap_or(1.0)
    }

    fn sf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 1.0;
        }
        reg_upper_inc_gamma(f64::from(self.n), z).unwrap_or(0.0)
    }

    fn mean(&self) -> f64 {
        f64::from(self.n)
    }

    fn inverse_mean(&self) -> f64 {
        if self.n == 1 {
            f64::INFINITY
        } else {
            1.0 / f64::from(self.n - 1)
        }
    }

    fn log_mean(&self) -> f64 {
        self.log_mean
    }

    fn diversity_order(&self) -> f64 {
        f64::from(self.n)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        (0..self.n).map(|_| exponential(rng)).sum()
    }

    fn tail_inverse_integral(&self, t: f64) -> Result<f64> {
        if self.n == 1 {
            if t <= 0.0 {
                return Ok(f64::INFINITY);
            }
            // E1(t) has no elementary form; fall back to quadrature.
            return self.expectation(&|z| 1.0 / z, t, f64::INFINITY);
        }
        let nm1 = f64::from(self.n - 1);
        Ok(reg_upper_inc_gamma(nm1, t.max(0.0))? / nm1)
    }

    fn head_mean(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        let n = f64::from(self.n);
        Ok(n * reg_lower_inc_gamma(n + 1.0, t)?)
    }
}
