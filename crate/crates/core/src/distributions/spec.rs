use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    load_tabulated_csv, make_frechet, make_gamma_diversity, make_max_exponential, make_miso_multiuser, make_tabulated,
    scaled, FadingDistribution,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    GammaDiversity,
    MaxExponential,
    Frechet,
    MisoMultiuser,
    Tabulated,
}

impl DistributionKind {
    fn keyword(self) -> &'static str {
        match self {
            DistributionKind::GammaDiversity => "gamma",
            DistributionKind::MaxExponential => "maxexp",
            DistributionKind::Frechet => "frechet",
            DistributionKind::MisoMultiuser => "miso",
            DistributionKind::Tabulated => "tab",
        }
    }

    fn allowed_keys(self) -> &'static [&'static str] {
        match self {
            DistributionKind::GammaDiversity => &["N", "scale"],
            DistributionKind::MaxExponential => &["K", "scale"],
            DistributionKind::Frechet => &["alpha", "K", "scale"],
            DistributionKind::MisoMultiuser => &["N", "K", "scale"],
            DistributionKind::Tabulated => &["path", "scale"],
        }
    }
}

impl FromStr for DistributionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma" | "gamma_diversity" => Ok(DistributionKind::GammaDiversity),
            "maxexp" | "max_exponential" => Ok(DistributionKind::MaxExponential),
            "frechet" => Ok(DistributionKind::Frechet),
            "miso" | "miso_multiuser" => Ok(DistributionKind::MisoMultiuser),
            "tab" | "tabulated" => Ok(DistributionKind::Tabulated),
            other => Err(Error::Format(format!("unknown distribution kind {other:?}"))),
        }
    }
}

/// Declarative description of a fading law, written on the command line as
/// `kind:key=val,...`, e.g. `miso:N=2,K=2`, `frechet:alpha=2,K=4` or
/// `tab:path=gains.csv`. Every kind also accepts `scale=c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub kind: DistributionKind,
    pub parameters: BTreeMap<String, f64>,
    /// Inline `(z, pdf)` grid for tabulated laws.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<(f64, f64)>>,
    /// CSV file for tabulated laws, loaded by [`DistributionSpec::build`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

impl DistributionSpec {
    pub fn gamma(n: u32) -> Self {
        Self::with(DistributionKind::GammaDiversity, &[("N", f64::from(n))])
    }

    pub fn max_exponential(k: u32) -> Self {
        Self::with(DistributionKind::MaxExponential, &[("K", f64::from(k))])
    }

    pub fn frechet(alpha: f64, k: u32) -> Self {
        Self::with(DistributionKind::Frechet, &[("alpha", alpha), ("K", f64::from(k))])
    }

    pub fn miso(n: u32, k: u32) -> Self {
        Self::with(
            DistributionKind::MisoMultiuser,
            &[("N", f64::from(n)), ("K", f64::from(k))],
        )
    }

    pub fn tabulated(grid: Vec<(f64, f64)>) -> Self {
        DistributionSpec {
            kind: DistributionKind::Tabulated,
            parameters: BTreeMap::new(),
            grid: Some(grid),
            path: None,
        }
    }

    fn with(kind: DistributionKind, params: &[(&str, f64)]) -> Self {
        DistributionSpec {
            kind,
            parameters: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            grid: None,
            path: None,
        }
    }

    fn count(&self, key: &str, default: Option<u32>) -> Result<u32> {
        match (self.parameters.get(key), default) {
            (Some(&v), _) => {
                if v >= 1.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX) {
                    Ok(v as u32)
                } else {
                    Err(Error::Parameter(format!("{key} must be an integer >= 1, got {v}")))
                }
            }
            (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::Parameter(format!(
                "{} requires parameter {key}",
                self.kind.keyword()
            ))),
        }
    }

    pub fn build(&self) -> Result<Box<dyn FadingDistribution>> {
        let base: Box<dyn FadingDistribution> = match self.kind {
            DistributionKind::GammaDiversity => Box::new(make_gamma_diversity(self.count("N", None)?)?),
            DistributionKind::MaxExponential => Box::new(make_max_exponential(self.count("K", None)?)?),
            DistributionKind::Frechet => {
                let alpha = *self
                    .parameters
                    .get("alpha")
                    .ok_or_else(|| Error::Parameter("frechet requires parameter alpha".into()))?;
                Box::new(make_frechet(alpha, self.count("K", Some(1))?)?)
            }
            DistributionKind::MisoMultiuser => {
                Box::new(make_miso_multiuser(self.count("N", None)?, self.count("K", None)?)?)
            }
            DistributionKind::Tabulated => match (&self.grid, &self.path) {
                (Some(grid), _) => Box::new(make_tabulated(grid)?),
                (None, Some(path)) => Box::new(load_tabulated_csv(path)?),
                (None, None) => return Err(Error::Format("tabulated law needs a grid or path".into())),
            },
        };
        match self.parameters.get("scale") {
            Some(&c) => Ok(Box::new(scaled(base, c)?)),
            None => Ok(base),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), r.trim()),
            None => (s.trim(), ""),
        };
        let kind: DistributionKind = kind.parse()?;
        let mut spec = DistributionSpec {
            kind,
            parameters: BTreeMap::new(),
            grid: None,
            path: None,
        };
        for item in rest.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (key, val) = item
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("expected key=value, got {item:?}")))?;
            let (key, val) = (key.trim(), val.trim());
            if !kind.allowed_keys().contains(&key) {
                return Err(Error::Format(format!(
                    "{} does not take parameter {key:?}",
                    kind.keyword()
                )));
            }
            if key == "path" {
                spec.path = Some(val.to_string());
                continue;
            }
            let v: f64 = val
                .parse()
                .map_err(|_| Error::Format(format!("{key}: not a number: {val:?}")))?;
            spec.parameters.insert(key.to_string(), v);
        }
        Ok(spec)
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.keyword())?;
        let mut items: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        if let Some(p) = &self.path {
            items.insert(0, format!("path={p}"));
        }
        if !items.is_empty() {
            write!(f, ":{}", items.join(","))?;
        }
        Ok(())
    }
}
