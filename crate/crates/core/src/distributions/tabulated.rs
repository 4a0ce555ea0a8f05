use std::path::Path;

use rand::RngCore;

use super::{open_unit, FadingDistribution};
use crate::error::{Error, Result};

const MIN_POINTS: usize = 4;
/// Grid points used for the log-log diversity-order fit.
const DIVERSITY_FIT_POINTS: usize = 5;

/// Piecewise-linear density through user-supplied `(z, pdf)` samples,
/// renormalized to unit mass and zero outside the grid.
///
/// Moments are exact for the interpolated density.
#[derive(Debug, Clone)]
pub struct Tabulated {
    z: Vec<f64>,
    p: Vec<f64>,
    /// `F` at each grid point.
    cum: Vec<f64>,
    /// `1 - F` at each grid point, accumulated from the right.
    tail: Vec<f64>,
    mean: f64,
    inverse_mean: f64,
    log_mean: f64,
    support_sup: f64,
    diversity_order: f64,
}

pub fn make_tabulated(points: &[(f64, f64)]) -> Result<Tabulated> {
    if points.len() < MIN_POINTS {
        return Err(Error::Format(format!(
            "tabulated density needs at least {MIN_POINTS} points, got {}",
            points.len()
        )));
    }
    for (i, &(z, p)) in points.iter().enumerate() {
        if !(z.is_finite() && p.is_finite()) || z < 0.0 || p < 0.0 {
            return Err(Error::Format(format!("row {i}: invalid entry ({z}, {p})")));
        }
        if i > 0 && z <= points[i - 1].0 {
            return Err(Error::Format(format!("row {i}: z values must be strictly increasing")));
        }
    }
    let z: Vec<f64> = points.iter().map(|x| x.0).collect();
    let raw: Vec<f64> = points.iter().map(|x| x.1).collect();
    let mass: f64 = z
        .windows(2)
        .zip(raw.windows(2))
        .map(|(zz, pp)| 0.5 * (zz[1] - zz[0]) * (pp[0] + pp[1]))
        .sum();
    if !(mass > 0.0) {
        return Err(Error::Format("tabulated density has zero mass".into()));
    }
    let p: Vec<f64> = raw.iter().map(|v| v / mass).collect();
    let n = z.len();

    let seg_mass = |i: usize| 0.5 * (z[i + 1] - z[i]) * (p[i] + p[i + 1]);
    let mut cum = vec![0.0; n];
    for i in 0..n - 1 {
        cum[i + 1] = cum[i] + seg_mass(i);
    }
    let mut tail = vec![0.0; n];
    for i in (0..n - 1).rev() {
        tail[i] = tail[i + 1] + seg_mass(i);
    }

    let mut mean = 0.0;
    let mut inverse_mean = 0.0;
    let mut log_mean = 0.0;
    for i in 0..n - 1 {
        let (z0, z1, p0, p1) = (z[i], z[i + 1], p[i], p[i + 1]);
        let h = z1 - z0;
        let slope = (p1 - p0) / h;
        let intercept = p0 - slope * z0;
        // Simpson is exact for the quadratic z·f(z).
        let zm = 0.5 * (z0 + z1);
        let pm = 0.5 * (p0 + p1);
        mean += h / 6.0 * (z0 * p0 + 4.0 * zm * pm + z1 * p1);

        if z0 == 0.0 {
            if p0 > 0.0 {
                inverse_mean = f64::INFINITY;
            } else {
                inverse_mean += slope * h;
            }
        } else {
            inverse_mean += intercept * (z1 / z0).ln() + slope * h;
        }

        let anti = |x: f64| {
            if x == 0.0 {
                0.0
            } else {
                let lx = x.ln();
                intercept * (x * lx - x) + slope * (0.5 * x * x * lx - 0.25 * x * x)
            }
        };
        log_mean += anti(z1) - anti(z0);
    }

    let last_positive = (0..n).rev().find(|&i| p[i] > 0.0).unwrap_or(0);
    let support_sup = z[(last_positive + 1).min(n - 1)];

    Ok(Tabulated {
        diversity_order: fit_diversity_order(&z, &cum),
        z,
        p,
        cum,
        tail,
        mean,
        inverse_mean,
        log_mean,
        support_sup,
    })
}

/// Least-squares slope of `log F` against `log z` over the smallest grid
/// points where both are defined.
fn fit_diversity_order(z: &[f64], cum: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = z
        .iter()
        .zip(cum)
        .filter(|(&zi, &ci)| zi > 0.0 && ci > 0.0)
        .take(DIVERSITY_FIT_POINTS)
        .map(|(zi, ci)| (zi.ln(), ci.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (m * sxy - sx * sy) / (m * sxx - sx * sx)
}

/// Parses two-column `z,pdf` CSV text. A non-numeric first row is treated as
/// a header.
pub fn parse_tabulated_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format(format!("csv: {e}")))?;
        if record.len() != 2 {
            return Err(Error::Format(format!(
                "line {}: expected 2 columns, found {}",
                i + 1,
                record.len()
            )));
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(z), Ok(p)) => out.push((z, p)),
            _ if i == 0 => continue,
            _ => {
                return Err(Error::Format(format!(
                    "line {}: non-numeric entry {:?}",
                    i + 1,
                    record.iter().collect::<Vec<_>>()
                )))
            }
        }
    }
    Ok(out)
}

pub fn load_tabulated_csv<P: AsRef<Path>>(path: P) -> Result<Tabulated> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    make_tabulated(&parse_tabulated_csv(&text)?)
}

impl Tabulated {
    pub fn grid(&self) -> &[f64] {
        &self.z
    }

    fn segment(&self, z: f64) -> Option<usize> {
        if z < self.z[0] || z >= self.z[self.z.len() - 1] {
            return None;
        }
        Some(self.z.partition_point(|&g| g <= z) - 1)
    }

    /// Mass of segment `i` between its left end and `z`.
    fn partial_mass(&self, i: usize, z: f64) -> f64 {
        let h = self.z[i + 1] - self.z[i];
        let slope = (self.p[i + 1] - self.p[i]) / h;
        let t = z - self.z[i];
        self.p[i] * t + 0.5 * slope * t * t
    }
}

impl FadingDistribution for Tabulated {
    fn label(&self) -> String {
        format!("tabulated({} points)", self.z.len())
    }

    fn pdf(&self, z: f64) -> f64 {
        let n = self.z.len();
        if z == self.z[n - 1] {
            return self.p[n - 1];
        }
        match self.segment(z) {
            Some(i) => {
                let w = (z - self.z[i]) / (self.z[i + 1] - self.z[i]);
                self.p[i] + w * (self.p[i + 1] - self.p[i])
            }
            None => 0.0,
        }
    }

    fn cdf(&self, z: f64) -> f64 {
        if z < self.z[0] {
            return 0.0;
        }
        match self.segment(z) {
            Some(i) => (self.cum[i] + self.partial_mass(i, z)).min(1.0),
            None => 1.0,
        }
    }

    fn sf(&self, z: f64) -> f64 {
        if z < self.z[0] {
            return 1.0;
        }
        match self.segment(z) {
            Some(i) => (self.tail[i] - self.partial_mass(i, z)).max(0.0),
            None => 0.0,
        }
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

    fn support_sup(&self) -> f64 {
        self.support_sup
    }

    fn diversity_order(&self) -> f64 {
        self.diversity_order
    }

    fn knots(&self) -> Vec<f64> {
        self.z.clone()
    }

    /// Inverse-CDF draw; the quadratic within each segment is solved exactly.
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let u = open_unit(rng) * self.cum[self.cum.len() - 1];
        let i = (self.cum.partition_point(|&c| c <= u).max(1) - 1).min(self.z.len() - 2);
        let r = u - self.cum[i];
        let h = self.z[i + 1] - self.z[i];
        let slope = (self.p[i + 1] - self.p[i]) / h;
        let p0 = self.p[i];
        // Root of p0 t + slope t²/2 = r in the cancellation-free form.
        let disc = (p0 * p0 + 2.0 * slope * r).max(0.0);
        let denom = p0 + disc.sqrt();
        let t = if denom > 0.0 { 2.0 * r / denom } else { 0.0 };
        self.z[i] + t.clamp(0.0, h)
    }
}
