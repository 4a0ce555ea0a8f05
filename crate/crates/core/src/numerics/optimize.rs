use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    lo: f64,
    hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Bracket { lo, hi })
        } else {
            Err(Error::InvalidBracket { lo, hi })
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// `g(x)` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub argmax: f64,
    pub max: f64,
}

const MAX_ROOT_ITERATIONS: usize = 400;

/// Brent's method on a sign-changing bracket.
///
/// Every step keeps a bracket around the root and falls back to bisection
/// whenever the interpolation step does not shrink it fast enough, so the
/// iteration terminates for any continuous `g`.
pub fn find_root_monotone<G>(g: G, bracket: Bracket, tol: f64) -> Result<Root>
where
    G: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let mut fa = g(a)?;
    let mut fb = g(b)?;
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            lo: a,
            hi: b,
            g_lo: fa,
            g_hi: fb,
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=MAX_ROOT_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(Root {
                x: b,
                residual: fb,
                iterations: iter,
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b)?;
    }
    Ok(Root {
        x: b,
        residual: fb,
        iterations: MAX_ROOT_ITERATIONS,
    })
}

const GRID_POINTS: usize = 64;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `h` on `bracket`.
///
/// A 64-point uniform pre-scan locates the best grid cell and golden-section
/// search refines inside its two neighbouring cells. Among grid points whose
/// value ties the best one (to a relative `1e-12`), the smallest abscissa
/// wins. The returned value is never below `h` at either bracket end.
pub fn maximize_unimodal<H>(h: H, bracket: Bracket, tol: f64) -> Result<Maximum>
where
    H: Fn(f64) -> Result<f64>,
{
    let step = bracket.width() / (GRID_POINTS - 1) as f64;
    let xs: Vec<f64> = (0..GRID_POINTS)
        .map(|i| {
            if i == GRID_POINTS - 1 {
                bracket.hi
            } else {
                bracket.lo + step * i as f64
            }
        })
        .collect();
    let mut values = Vec::with_capacity(GRID_POINTS);
    for &x in &xs {
        values.push(h(x)?);
    }
    let best_val = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-12 * best_val.abs();
    let best = values.iter().position(|&v| v >= best_val - slack).unwrap_or(0);

    let mut lo = xs[best.saturating_sub(1)];
    let mut hi = xs[(best + 1).min(GRID_POINTS - 1)];
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = h(x1)?;
    let mut f2 = h(x2)?;
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = h(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = h(x2)?;
        }
    }

    let mut out = if f1 >= f2 {
        Maximum { argmax: x1, max: f1 }
    } else {
        Maximum { argmax: x2, max: f2 }
    };
    if values[best] >= out.max {
        out = Maximum {
            argmax: xs[best],
            max: values[best],
        };
    }
    Ok(out)
}
