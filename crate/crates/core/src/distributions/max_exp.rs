use rand::RngCore;

use super::{check_normalization, expectation_with_tol, open_unit, FadingDistribution};
use crate::error::{Error, Result};
use crate::numerics::EULER_MASCHERONI;

/// Alternating binomial sums lose about `log10(C(K-1, K/2))` digits; beyond
/// this user count the moments come from quadrature instead.
const CLOSED_FORM_MAX_USERS: u32 = 12;

/// Best of `K` i.i.d. unit-mean exponential gains (selection among `K`
/// Rayleigh users): `F(z) = (1 - e^{-z})^K`.
#[derive(Debug, Clone)]
pub struct MaxExponential {
    k: u32,
    mean: f64,
    inverse_mean: f64,
    log_mean: f64,
}

pub fn make_max_exponential(k: u32) -> Result<MaxExponential> {
    if k < 1 {
        return Err(Error::Parameter(format!("user count K must be >= 1, got {k}")));
    }
    let mean = (1..=k).map(|j| 1.0 / f64::from(j)).sum();
    let mut d = MaxExponential {
        k,
        mean,
        inverse_mean: f64::NAN,
        log_mean: f64::NAN,
    };
    if k <= CLOSED_FORM_MAX_USERS {
        d.inverse_mean = inverse_mean_closed_form(k);
        d.log_mean = log_mean_closed_form(k);
    } else {
        d.inverse_mean = expectation_with_tol(&d, &|z| 1.0 / z, 0.0, f64::INFINITY, 1e-12)?;
        d.log_mean = expectation_with_tol(&d, &f64::ln, 0.0, f64::INFINITY, 1e-12)?;
    }
    check_normalization(&d)?;
    Ok(d)
}

fn binomial(n: u32, r: u32) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `E[1/z] = K Σ_{j=1}^{K-1} C(K-1, j) (-1)^{j+1} log(j+1)`, from pairing
/// each exponential term against `e^{-z}` in a Frullani integral.
pub(crate) fn inverse_mean_closed_form(k: u32) -> f64 {
    if k == 1 {
        return f64::INFINITY;
    }
    let kf = f64::from(k);
    let sum: f64 = (1..k)
        .map(|j| {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            sign * binomial(k - 1, j) * f64::from(j + 1).ln()
        })
        .sum();
    kf * sum
}

/// `E[log z] = K Σ_{j=0}^{K-1} C(K-1, j) (-1)^j (-γ - log(j+1)) / (j+1)`.
pub(crate) fn log_mean_closed_form(k: u32) -> f64 {
    let kf = f64::from(k);
    let sum: f64 = (0..k)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let jp1 = f64::from(j + 1);
            sign * binomial(k - 1, j) * (-EULER_MASCHERONI - jp1.ln()) / jp1
        })
        .sum();
    kf * sum
}

impl MaxExponential {
    pub fn users(&self) -> u32 {
        self.k
    }

    fn log_cdf(&self, z: f64) -> f64 {
        f64::from(self.k) * (-(-z).exp_m1()).ln()
    }
}

impl FadingDistribution for MaxExponential {
    fn label(&self) -> String {
        format!("maxexp(K={})", self.k)
    }

    fn pdf(&self, z: f64) -> f64 {
        if z < 0.0 {
            return 0.0;
        }
        if self.k == 1 {
            return (-z).exp();
        }
        if z == 0.0 {
            return 0.0;
        }
        let kf = f64::from(self.k);
        let log_pdf = kf.ln() - z + (kf - 1.0) * (-(-z).exp_m1()).ln();
        log_pdf.exp()
    }

    fn cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        self.log_cdf(z).exp()
    }

    fn sf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 1.0;
        }
        -(f64::from(self.k) * (-(-z).exp()).ln_1p()).exp_m1()
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
        f64::from(self.k)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let u = open_unit(rng);
        -(-u.powf(1.0 / f64::from(self.k))).ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::quadrature_moments;

    #[test]
    fn two_users() {
        let d = make_max_exponential(2).unwrap();
        assert_eq!(d.mean(), 1.5);
        assert!((d.inverse_mean() - 2.0 * std::f64::consts::LN_2).abs() < 1e-14);
        assert_eq!(d.diversity_order(), 2.0);
    }

    #[test]
    fn single_user_violates_a2() {
        let d = make_max_exponential(1).unwrap();
        assert!(!d.satisfies_a2());
    }

    // Reference moments from 40-digit quadrature.
    #[test]
    fn reference_moments() {
        let cases = [
            (2, 1.386_294_361_119_890_618_8, 0.115_931_515_658_412_448_81),
            (4, 0.679_596_147_181_589_891_6, 0.573_512_624_905_590_849_15),
            (16, 0.336_283_344_821_211_819_02, 1.153_701_759_990_608_194),
        ];
        for (k, inv, log) in cases {
            let d = make_max_exponential(k).unwrap();
            assert!(
                (d.inverse_mean() / inv - 1.0).abs() < 1e-9,
                "K={k}: {}",
                d.inverse_mean()
            );
            assert!((d.log_mean() / log - 1.0).abs() < 1e-9, "K={k}: {}", d.log_mean());
        }
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for k in 2..=CLOSED_FORM_MAX_USERS {
            let d = make_max_exponential(k).unwrap();
            let q = quadrature_moments(&d, 1e-12).unwrap();
            assert!((q.mean / d.mean() - 1.0).abs() < 1e-8, "K={k}");
            assert!((q.inverse_mean / d.inverse_mean() - 1.0).abs() < 1e-8, "K={k}");
            assert!((q.log_mean / d.log_mean() - 1.0).abs() < 1e-8, "K={k}");
        }
    }

    #[test]
    fn survival_keeps_upper_tail() {
        let d = make_max_exponential(3).unwrap();
        let z: f64 = 40.0;
        let want = 3.0 * (-z).exp();
        assert!((d.sf(z) / want - 1.0).abs() < 1e-10);
    }
}
