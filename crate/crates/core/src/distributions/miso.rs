use rand::RngCore;

use super::{check_normalization, expectation_with_tol, exponential, FadingDistribution};
use crate::error::{Error, Result};
use crate::numerics::{log_gamma, reg_lower_inc_gamma, reg_upper_inc_gamma};

const MOMENT_REL_TOL: f64 = 1e-12;

/// Best user's beamforming gain in an `N`-antenna, `K`-user MISO downlink
/// with i.i.d. Rayleigh coefficients:
/// `f(z) = K Γ(N)^{-K} γ(N, z)^{K-1} z^{N-1} e^{-z}`.
///
/// Moments come from quadrature at construction.
#[derive(Debug, Clone)]
pub struct MisoMultiuser {
    n: u32,
    k: u32,
    log_norm: f64,
    mean: f64,
    inverse_mean: f64,
    log_mean: f64,
}

pub fn make_miso_multiuser(n: u32, k: u32) -> Result<MisoMultiuser> {
    if n < 1 || k < 1 {
        return Err(Error::Parameter(format!(
            "antenna count N and user count K must be >= 1, got N={n}, K={k}"
        )));
    }
    let mut d = MisoMultiuser {
        n,
        k,
        log_norm: log_gamma(f64::from(n))?,
        mean: f64::NAN,
        inverse_mean: f64::NAN,
        log_mean: f64::NAN,
    };
    d.mean = expectation_with_tol(&d, &|z| z, 0.0, f64::INFINITY, MOMENT_REL_TOL)?;
    // A2 holds iff at least one kind of diversity is present.
    d.inverse_mean = if n.max(k) >= 2 {
        expectation_with_tol(&d, &|z| 1.0 / z, 0.0, f64::INFINITY, MOMENT_REL_TOL)?
    } else {
        f64::INFINITY
    };
    d.log_mean = expectation_with_tol(&d, &f64::ln, 0.0, f64::INFINITY, MOMENT_REL_TOL)?;
    check_normalization(&d)?;
    Ok(d)
}

impl MisoMultiuser {
    pub fn antennas(&self) -> u32 {
        self.n
    }

    pub fn users(&self) -> u32 {
        self.k
    }
}

impl FadingDistribution for MisoMultiuser {
    fn label(&self) -> String {
        format!("miso(N={}, K={})", self.n, self.k)
    }

    fn pdf(&self, z: f64) -> f64 {
        if z < 0.0 {
            return 0.0;
        }
        if z == 0.0 {
            return if self.n == 1 && self.k == 1 { 1.0 } else { 0.0 };
        }
        let nf = f64::from(self.n);
        let kf = f64::from(self.k);
        let mut log_pdf = kf.ln() + (nf - 1.0) * z.ln() - z - self.log_norm;
        if self.k > 1 {
            let p = reg_lower_inc_gamma(nf, z).unwrap_or(1.0);
            if p == 0.0 {
                return 0.0;
            }
            log_pdf += (kf - 1.0) * p.ln();
        }
        log_pdf.exp()
    }

    fn cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        reg_lower_inc_gamma(f64::from(self.n), z)
            .unwrap_or(1.0)
            .powi(self.k as i32)
    }

    fn sf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 1.0;
        }
        let q = reg_upper_inc_gamma(f64::from(self.n), z).unwrap_or(0.0);
        -(f64::from(self.k) * (-q).ln_1p()).exp_m1()
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
        f64::from(self.n * self.k)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let mut best = 0.0f64;
        for _ in 0..self.k {
            let gain: f64 = (0..self.n).map(|_| exponential(rng)).sum();
            best = best.max(gain);
        }
        best
    }
}
