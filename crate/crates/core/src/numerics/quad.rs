use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Relative tolerance used for every capacity integral unless a caller asks
/// for something else.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Absolute error below which an integral is accepted regardless of its
/// relative accuracy.
pub const ABS_ERROR_FLOOR: f64 = 1e-14;

pub const MAX_SUBDIVISIONS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Nonnegative estimate of `|value - true integral|`.
    pub abs_error_estimate: f64,
    /// Number of integrand evaluations.
    pub evaluations: usize,
}

// 21-point Kronrod abscissae; odd indices are the embedded 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_734_855_015,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    if !kronrod.is_finite() {
        return Err(Error::Domain(format!("integrand is not finite on [{a}, {b}]")));
    }
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Globally adaptive Gauss–Kronrod (G10/K21) integration on `[a, b]`.
fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<QuadResult> {
    let first = gauss_kronrod_21(f, a, b)?;
    let mut evaluations = 21;
    let mut value = first.value;
    let mut error = first.error;
    // Segments too narrow to split are frozen; their error is final.
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 0;

    while error > (rel_tol * value.abs()).max(ABS_ERROR_FLOOR) {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e-15 * worst.a.abs().max(worst.b.abs()) {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        if subdivisions >= MAX_SUBDIVISIONS {
            heap.push(worst);
            let (v, e) = totals(&heap, frozen_value, frozen_error);
            return Err(Error::Quadrature {
                partial: v,
                abs_error: e,
                subdivisions,
            });
        }
        let halves = gauss_kronrod_21(f, worst.a, mid).and_then(|l| gauss_kronrod_21(f, mid, worst.b).map(|r| (l, r)));
        let Ok((left, right)) = halves else {
            // The integrand blew up while resolving a singularity.
            heap.push(worst);
            let (v, e) = totals(&heap, frozen_value, frozen_error);
            return Err(Error::Quadrature {
                partial: v,
                abs_error: e,
                subdivisions,
            });
        };
        evaluations += 42;
        subdivisions += 1;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);

        // Periodically resynchronize the running sums against drift.
        if subdivisions % 64 == 0 {
            let (v, e) = totals(&heap, frozen_value, frozen_error);
            value = v;
            error = e;
        }
    }

    let (value, abs_error_estimate) = totals(&heap, frozen_value, frozen_error);
    Ok(QuadResult {
        value,
        abs_error_estimate,
        evaluations,
    })
}

fn totals(heap: &BinaryHeap<Segment>, frozen_value: f64, frozen_error: f64) -> (f64, f64) {
    // Sum from the smallest contributions up to limit rounding.
    let mut segs: Vec<&Segment> = heap.iter().collect();
    segs.sort_by(|x, y| x.value.abs().total_cmp(&y.value.abs()));
    let value = segs.iter().fold(frozen_value, |s, seg| s + seg.value);
    let error = heap.iter().fold(frozen_error, |s, seg| s + seg.error);
    (value, error)
}

fn check_tol(rel_tol: f64) -> Result<()> {
    if rel_tol > 0.0 && rel_tol < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("rel_tol must lie in (0, 1), got {rel_tol}")))
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
///
/// Endpoints are never evaluated, so integrable endpoint singularities such
/// as `log z` at zero are handled by subdivision alone.
pub fn integrate_finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadResult> {
    check_tol(rel_tol)?;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Domain(format!(
            "finite interval requires a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 1,
        });
    }
    adaptive(&f, a, b, rel_tol)
}

/// Integrates `f` over `[a, ∞)` via the substitution `z = a + t/(1 - t)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, a: f64, rel_tol: f64) -> Result<QuadResult> {
    check_tol(rel_tol)?;
    if !a.is_finite() {
        return Err(Error::Domain(format!("lower limit must be finite, got {a}")));
    }
    let mapped = |t: f64| {
        let s = 1.0 - t;
        let z = a + t / s;
        if !z.is_finite() {
            return 0.0;
        }
        let v = f(z);
        if v == 0.0 {
            0.0
        } else {
            v / (s * s)
        }
    };
    adaptive(&mapped, 0.0, 1.0, rel_tol)
}
