//! Monte-Carlo estimates of `E[log(1 + S·D(z)·z)]` by direct sampling.
//!
//! Draws are split into fixed-size shards. Shard `i` uses a ChaCha8 stream
//! seeded from the user seed with stream number `i`, so the estimate is the
//! same for any number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::FadingDistribution;
use crate::error::{Error, Result};
use crate::schemes::{ctci_dmax, oa_threshold, tci_dmax, tci_optimize, PowerPolicy, Scheme, SchemeSpec, Threshold};

pub const SHARD_SIZE: u64 = 1 << 16;
pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean_nats: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
    /// Empirical `E[D]` and its standard error.
    pub power_mean: f64,
    pub power_std_error: f64,
    pub degenerate: bool,
}

/// Streaming mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Moments {
            n,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.n as f64 * w,
        }
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let var = (self.m2 / (self.n - 1) as f64).max(0.0);
        (var / self.n as f64).sqrt()
    }
}

/// Estimates the ergodic capacity of `policy` at average power `s`.
pub fn mc_capacity(
    dist: &dyn FadingDistribution,
    policy: &PowerPolicy,
    s: f64,
    n_samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!(
            "average power must be positive and finite, got {s}"
        )));
    }
    if n_samples == 0 {
        return Err(Error::Parameter("sample count must be positive".into()));
    }
    if let PowerPolicy::Inversion { inverse_mean: None } = policy {
        return Ok(McEstimate {
            mean_nats: 0.0,
            std_error: 0.0,
            n_samples,
            seed,
            power_mean: 0.0,
            power_std_error: 0.0,
            degenerate: true,
        });
    }

    let shards = n_samples.div_ceil(SHARD_SIZE);
    let parts: Vec<(Moments, Moments)> = (0..shards)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let count = SHARD_SIZE.min(n_samples - i * SHARD_SIZE);
            let (mut rate, mut power) = (Moments::default(), Moments::default());
            for _ in 0..count {
                let z = dist.sample(&mut rng);
                rate.push(policy.rate(s, z));
                power.push(policy.power_ratio(z));
            }
            (rate, power)
        })
        .collect();
    let (rate, power) = parts
        .into_iter()
        .fold((Moments::default(), Moments::default()), |(r, p), (r2, p2)| {
            (r.merge(r2), p.merge(p2))
        });

    Ok(McEstimate {
        mean_nats: rate.mean,
        std_error: rate.std_error(),
        n_samples,
        seed,
        power_mean: power.mean,
        power_std_error: power.std_error(),
        degenerate: false,
    })
}

/// Builds the power policy of a scheme at average power `s`, solving for
/// thresholds and `D_max` with the quadrature routines.
pub fn resolve_policy(dist: &dyn FadingDistribution, spec: &SchemeSpec, s: f64) -> Result<PowerPolicy> {
    let fixed = |t: Option<Threshold>| -> Result<f64> {
        match t {
            Some(Threshold::Fixed(z)) => Ok(z),
            Some(Threshold::Optimal) if spec.scheme == Scheme::Tci => Ok(tci_optimize(dist, s)?.0.z_t),
            _ => Err(Error::Parameter(format!(
                "scheme {} needs a fixed threshold",
                spec.scheme
            ))),
        }
    };
    Ok(match spec.scheme {
        Scheme::Awgn => {
            return Err(Error::Parameter("awgn has no fading process to sample".into()));
        }
        Scheme::Ra => PowerPolicy::Constant,
        Scheme::Oa => PowerPolicy::WaterFilling {
            avg_power: s,
            z_t: oa_threshold(dist, s)?.z_t,
        },
        Scheme::Ci => PowerPolicy::Inversion {
            inverse_mean: dist.satisfies_a2().then(|| dist.inverse_mean()),
        },
        Scheme::Tci => {
            let z_t = fixed(spec.threshold)?;
            if z_t == 0.0 {
                PowerPolicy::Inversion {
                    inverse_mean: dist.satisfies_a2().then(|| dist.inverse_mean()),
                }
            } else {
                PowerPolicy::Truncated {
                    z_t,
                    d_max: tci_dmax(dist, z_t)?,
                }
            }
        }
        Scheme::Ctci => {
            let z_t = fixed(spec.threshold)?;
            if z_t == 0.0 {
                PowerPolicy::Inversion {
                    inverse_mean: dist.satisfies_a2().then(|| dist.inverse_mean()),
                }
            } else {
                PowerPolicy::ContinuousTruncated {
                    z_t,
                    d_max: ctci_dmax(dist, z_t)?,
                }
            }
        }
    })
}

/// [`resolve_policy`] followed by [`mc_capacity`].
pub fn mc_scheme(
    dist: &dyn FadingDistribution,
    spec: &SchemeSpec,
    s: f64,
    n_samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    let policy = resolve_policy(dist, spec, s)?;
    mc_capacity(dist, &policy, s, n_samples, seed)
}
