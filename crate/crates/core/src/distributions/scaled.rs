use rand::RngCore;

use super::FadingDistribution;
use crate::error::{Error, Result};

/// The law of `c·z` for a base law of `z`.
#[derive(Debug)]
pub struct Scaled<D> {
    inner: D,
    c: f64,
}

pub fn scaled<D: FadingDistribution>(inner: D, c: f64) -> Result<Scaled<D>> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Parameter(format!("scale must be > 0, got {c}")));
    }
    Ok(Scaled { inner, c })
}

impl<D> Scaled<D> {
    pub fn inner(&self) -> &D {
        &self.inner
    }

    pub fn factor(&self) -> f64 {
        self.c
    }
}

impl<D: FadingDistribution> FadingDistribution for Scaled<D> {
    fn label(&self) -> String {
        format!("{} x {}", self.c, self.inner.label())
    }

    fn pdf(&self, z: f64) -> f64 {
        self.inner.pdf(z / self.c) / self.c
    }

    fn cdf(&self, z: f64) -> f64 {
        self.inner.cdf(z / self.c)
    }

    fn sf(&self, z: f64) -> f64 {
        self.inner.sf(z / self.c)
    }

    fn mean(&self) -> f64 {
        self.c * self.inner.mean()
    }

    fn inverse_mean(&self) -> f64 {
        self.inner.inverse_mean() / self.c
    }

    fn log_mean(&self) -> f64 {
        self.inner.log_mean() + self.c.ln()
    }

    fn support_sup(&self) -> f64 {
        self.c * self.inner.support_sup()
    }

    fn diversity_order(&self) -> f64 {
        self.inner.diversity_order()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.c * self.inner.sample(rng)
    }

    fn knots(&self) -> Vec<f64> {
        self.inner.knots().into_iter().map(|k| k * self.c).collect()
    }

    fn expectation(&self, g: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
        let c = self.c;
        self.inner.expectation(&|x| g(c * x), lo / c, hi / c)
    }

    fn tail_inverse_integral(&self, t: f64) -> Result<f64> {
        Ok(self.inner.tail_inverse_integral(t / self.c)? / self.c)
    }

    fn head_mean(&self, t: f64) -> Result<f64> {
        Ok(self.c * self.inner.head_mean(t / self.c)?)
    }
}
