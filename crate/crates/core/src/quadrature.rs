//! Adaptive Gauss–Kronrod quadrature plus the fixed rules used for radial
//! and angular integration.
//!
//! Everything here is deterministic: interval bisection is ordered by error
//! estimate with ties broken by position, so identical inputs always produce
//! bit-identical results.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec3;

/// Tolerances and work limits for adaptive quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_subdivisions: 4000,
        }
    }
}

impl QuadSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Self {
        QuadSpec {
            abs_tol,
            rel_tol,
            max_subdivisions,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One 21-point Kronrod panel; returns (value, error estimate) with the
/// QUADPACK error heuristic.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut res_abs = kronrod.abs();
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        fv1[j] = f(center - dx);
        fv2[j] = f(center + dx);
        let pair = fv1[j] + fv2[j];
        kronrod += WGK[j] * pair;
        res_abs += WGK[j] * (fv1[j].abs() + fv2[j].abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<Estimate> {
    integrate_with_breaks(&f, &[a, b], spec)
}

/// Adaptive integration over `[points[0], points[last]]` with the interior
/// points as forced panel boundaries (use them at known singularities).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: &F,
    points: &[f64],
    spec: &QuadSpec,
) -> Result<Estimate> {
    if points.len() < 2 {
        return Err(Error::domain("integrate", "need at least two points"));
    }
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in points.windows(2) {
        let (value, error) = gk21(f, w[0], w[1]);
        total += value;
        total_err += error;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }
    let mut subdivisions = 0;
    while total_err > spec.target(total) {
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: total,
                achieved_error: total_err,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution; accept what we have
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk21(f, worst.a, mid);
        let (v2, e2) = gk21(f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        subdivisions += 1;
    }
    // re-sum to shed accumulated rounding from the running update
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum();
    let error = panels.iter().map(|p| p.error).sum();
    Ok(Estimate {
        value,
        error,
        subdivisions,
    })
}

/// Adaptive integration over `[a, ∞)` via `x = a + t/(1-t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, spec: &QuadSpec) -> Result<Estimate> {
    let mapped = |t: f64| {
        let s = 1.0 - t;
        let v = f(a + t / s);
        if v == 0.0 {
            0.0
        } else {
            v / (s * s)
        }
    };
    integrate_with_breaks(&mapped, &[0.0, 0.5, 1.0], spec)
}

/// `∫_a^∞ f` where the range is split at a finite breakpoint first: the
/// finite piece `[a, split]` is integrated directly, the tail is mapped.
pub fn integrate_split_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    split: f64,
    spec: &QuadSpec,
) -> Result<Estimate> {
    let head = integrate(&f, a, split, spec)?;
    let tail = integrate_to_infinity(&f, split, spec)?;
    Ok(Estimate {
        value: head.value + tail.value,
        error: head.error + tail.error,
        subdivisions: head.subdivisions + tail.subdivisions,
    })
}

/// `∫_0^∞ ∫_0^∞ f(x, y) dy dx` by nested adaptive quadrature.
///
/// The inner integral runs at the outer tolerances tightened by 10 so its
/// error does not masquerade as roughness of the outer integrand.
pub fn integrate_quadrant<F: Fn(f64, f64) -> f64>(f: F, spec: &QuadSpec) -> Result<Estimate> {
    let inner_spec = QuadSpec {
        abs_tol: 0.1 * spec.abs_tol,
        rel_tol: 0.1 * spec.rel_tol,
        ..*spec
    };
    let failure = RefCell::new(None);
    let outer = integrate_to_infinity(
        |x| match integrate_to_infinity(|y| f(x, y), 0.0, &inner_spec) {
            Ok(e) => e.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        0.0,
        spec,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(outer),
    }
}

/// `∫_0^∞ h(p) sin(ω p) dp` for slowly decaying `h`, summed over half periods
/// and accelerated with Wynn's epsilon algorithm.
pub fn integrate_sine_transform<F: Fn(f64) -> f64>(
    h: F,
    omega: f64,
    spec: &QuadSpec,
) -> Result<Estimate> {
    if omega <= 0.0 {
        return Err(Error::domain("integrate_sine_transform", "omega must be positive"));
    }
    let period = std::f64::consts::PI / omega;
    let integrand = |p: f64| h(p) * (omega * p).sin();
    let mut partial = 0.0;
    let mut err = 0.0;
    let mut sums = Vec::new();
    let mut subdivisions = 0;
    let mut last = f64::NAN;
    for k in 0..400 {
        let a = k as f64 * period;
        let piece = integrate(integrand, a, a + period, spec)?;
        partial += piece.value;
        err += piece.error;
        subdivisions += piece.subdivisions;
        sums.push(partial);
        if sums.len() >= 8 {
            let accelerated = wynn_epsilon(&sums);
            if (accelerated - last).abs() <= spec.target(accelerated) {
                return Ok(Estimate {
                    value: accelerated,
                    error: err + (accelerated - last).abs(),
                    subdivisions,
                });
            }
            last = accelerated;
        }
    }
    Err(Error::Quadrature {
        estimate: last,
        achieved_error: f64::NAN,
        subdivisions,
    })
}

/// Wynn's epsilon extrapolation of a sequence of partial sums; returns the
/// highest even-column entry.
pub fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = *sums.last().unwrap_or(&0.0);
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff == 0.0 {
                return cur[i + 1];
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        prev = cur;
        cur = next;
        col += 1;
        if col % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
    }
    best
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = if n <= 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Product rule for averages over the unit sphere: Gauss–Legendre in
/// `cos ϑ` times the trapezoid rule in `φ`. Weights sum to one.
#[derive(Clone, Debug)]
pub struct SphereRule {
    directions: Vec<Vec3>,
    weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(n_polar: usize, n_azimuth: usize) -> Self {
        let (u, wu) = gauss_legendre(n_polar);
        let mut directions = Vec::with_capacity(n_polar * n_azimuth);
        let mut weights = Vec::with_capacity(n_polar * n_azimuth);
        for (&cz, &w) in u.iter().zip(&wu) {
            let sz = (1.0 - cz * cz).max(0.0).sqrt();
            for k in 0..n_azimuth {
                let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n_azimuth as f64;
                directions.push(Vec3::new(sz * phi.cos(), sz * phi.sin(), cz));
                weights.push(0.5 * w / n_azimuth as f64);
            }
        }
        SphereRule {
            directions,
            weights,
        }
    }

    /// Mean of `f` over the unit sphere.
    pub fn average<F: Fn(&Vec3) -> f64>(&self, f: F) -> f64 {
        self.directions
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| w * f(d))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

impl Default for SphereRule {
    fn default() -> Self {
        SphereRule::new(24, 48)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let est = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, &QuadSpec::default()).unwrap();
        assert!((est.value - (64.0 / 6.0 - 1.0 / 6.0 - 9.0)).abs() < 1e-13);
    }

    #[test]
    fn log_endpoint_singularity() {
        // ∫_0^1 ln x dx = -1
        let est = integrate(|x: f64| x.ln(), 0.0, 1.0, &QuadSpec::default()).unwrap();
        assert!((est.value + 1.0).abs() < 1e-10, "{}", est.value);
    }

    #[test]
    fn semi_infinite_gaussian() {
        let est = integrate_to_infinity(|x: f64| (-x * x).exp(), 0.0, &QuadSpec::default()).unwrap();
        assert!((est.value - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sine_transform_dirichlet() {
        // ∫_0^∞ x/(1+x²) sin x dx = π/(2e)
        let est = integrate_sine_transform(|x| x / (1.0 + x * x), 1.0, &QuadSpec::default()).unwrap();
        let exact = std::f64::consts::PI / (2.0 * std::f64::consts::E);
        assert!((est.value - exact).abs() < 1e-9, "{} vs {}", est.value, exact);
    }

    #[test]
    fn exhausted_budget_reports_error() {
        let spec = QuadSpec::new(1e-15, 1e-15, 2);
        let err = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &spec).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn gauss_legendre_weights() {
        for n in [1, 2, 7, 24] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // exact for degree 2n-1
            let deg = 2 * n - 2;
            let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((integral - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn sphere_rule_moments() {
        let rule = SphereRule::default();
        assert!((rule.average(|_| 1.0) - 1.0).abs() < 1e-14);
        assert!(rule.average(|d| d.x).abs() < 1e-14);
        assert!((rule.average(|d| d.z * d.z) - 1.0 / 3.0).abs() < 1e-14);
        assert!((rule.average(|d| d.x * d.x * d.y * d.y) - 1.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn quadrant_gaussian_moment() {
        // ∫∫ x² y² e^{-(x²+y²)} = (√π/4)²
        let spec = QuadSpec::new(1e-14, 1e-11, 4000);
        let v = integrate_quadrant(|x, y| x * x * y * y * (-(x * x + y * y)).exp(), &spec).unwrap();
        let expected = std::f64::consts::PI / 16.0;
        assert!((v.value - expected).abs() < 1e-10 * expected);
    }
}
