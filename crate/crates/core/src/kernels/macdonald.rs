//! Macdonald functions `K_ν(z)` (modified Bessel functions of the second
//! kind) for real order `ν ≥ 0` and real argument `z > 0`.
//!
//! Half-integer orders run the closed forms for `K_{1/2}`, `K_{3/2}` through
//! the upward recurrence. General orders use Temme's series (`z < 2`) or
//! Steed's continued fraction (`z ≥ 2`) for the reduced order
//! `μ ∈ (-1/2, 1/2]`, followed by the same recurrence. The recurrence is
//! carried in a rescaled mantissa/log pair, so overflow and underflow are
//! detected from the logarithm instead of by producing `inf`/`0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order of a Macdonald function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacdonaldOrder {
    nu: f64,
    half_integer: bool,
}

impl MacdonaldOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::domain("MacdonaldOrder::new", format!("order {nu} must be finite and nonnegative")));
        }
        let twice = 2.0 * nu;
        let half_integer = twice.fract() == 0.0 && (twice as u64) % 2 == 1;
        Ok(MacdonaldOrder { nu, half_integer })
    }

    /// Order `n + 1/2`.
    pub fn half_odd(n: u32) -> Self {
        MacdonaldOrder {
            nu: n as f64 + 0.5,
            half_integer: true,
        }
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// True iff `2ν` is an odd integer.
    pub fn is_half_integer(&self) -> bool {
        self.half_integer
    }
}

/// `ln K_ν(z)` as a `(mantissa, log_scale)` pair: `K = mantissa · e^{log_scale}`.
#[derive(Clone, Copy, Debug)]
struct Scaled {
    mantissa: f64,
    log_scale: f64,
}

impl Scaled {
    fn ln(&self) -> f64 {
        self.mantissa.ln() + self.log_scale
    }
}

const RESCALE: f64 = 1e200;

/// Upward recurrence `K_{μ+k+1} = K_{μ+k-1} + 2(μ+k)/z · K_{μ+k}`, `steps` times,
/// starting from `(K_μ, K_{μ+1})` and returning `K_{μ+steps}`.
fn recur_up(mu: f64, z: f64, k_mu: f64, k_mu1: f64, steps: usize, log_scale: f64) -> Scaled {
    let (mut lo, mut hi) = (k_mu, k_mu1);
    let mut scale = log_scale;
    for i in 1..=steps {
        let next = 2.0 * (mu + i as f64) / z * hi + lo;
        lo = hi;
        hi = next;
        if hi > RESCALE {
            lo /= RESCALE;
            hi /= RESCALE;
            scale += RESCALE.ln();
        }
    }
    Scaled {
        mantissa: lo,
        log_scale: scale,
    }
}

/// Half-integer path: closed forms for orders 1/2 and 3/2, then recurrence.
fn half_integer_scaled(n: usize, z: f64) -> Scaled {
    // e^{z} K_{1/2}(z), e^{z} K_{3/2}(z)
    let k_half = (PI / (2.0 * z)).sqrt();
    let k_three_halves = k_half * (1.0 + 1.0 / z);
    recur_up(0.5, z, k_half, k_three_halves, n, -z)
}

/// Taylor coefficients of `1/Γ(1+x)` about 0.
#[allow(clippy::excessive_precision)]
const RECIP_GAMMA: [f64; 27] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
];

/// Temme's auxiliary functions for `|μ| ≤ 1/2`:
/// `(γ₁, γ₂, 1/Γ(1+μ), 1/Γ(1-μ))`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mu2 = mu * mu;
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    let mut pow = 1.0;
    // even index → γ₂, odd index → -γ₁
    for k in 0..RECIP_GAMMA.len() / 2 + 1 {
        if 2 * k < RECIP_GAMMA.len() {
            gam2 += RECIP_GAMMA[2 * k] * pow;
        }
        if 2 * k + 1 < RECIP_GAMMA.len() {
            gam1 -= RECIP_GAMMA[2 * k + 1] * pow;
        }
        pow *= mu2;
    }
    let gampl = gam2 - mu * gam1;
    let gammi = gam2 + mu * gam1;
    (gam1, gam2, gampl, gammi)
}

/// `(K_μ(z), K_{μ+1}(z))` by Temme's series, valid for `z < 2`, `|μ| ≤ 1/2`.
fn temme_series(mu: f64, z: f64) -> (f64, f64) {
    let x2 = 0.5 * z;
    let pimu = PI * mu;
    let fact = if pimu.abs() < f64::EPSILON { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < f64::EPSILON { 1.0 } else { e.sinh() / e };
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    let mu2 = mu * mu;
    for i in 1..10_000 {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        let del1 = c * (p - fi * ff);
        sum1 += del1;
        if del.abs() < sum.abs() * f64::EPSILON {
            break;
        }
    }
    (sum, sum1 * 2.0 / z)
}

/// `(e^z K_μ(z), e^z K_{μ+1}(z))` by Steed's continued fraction, `z ≥ 2`.
fn steed_scaled(mu: f64, z: f64) -> (f64, f64) {
    let mu2 = mu * mu;
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu2;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..100_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            break;
        }
    }
    let h = a1 * h;
    let k_mu = (PI / (2.0 * z)).sqrt() / s;
    let k_mu1 = k_mu * (mu + z + 0.5 - h) / z;
    (k_mu, k_mu1)
}

/// General-order path (Temme / Steed plus recurrence).
fn general_scaled(nu: f64, z: f64) -> Scaled {
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let steps = nl as usize;
    if z < 2.0 {
        let (k_mu, k_mu1) = temme_series(mu, z);
        recur_up(mu, z, k_mu, k_mu1, steps, 0.0)
    } else {
        let (k_mu, k_mu1) = steed_scaled(mu, z);
        recur_up(mu, z, k_mu, k_mu1, steps, -z)
    }
}

fn check_argument(op: &'static str, z: f64) -> Result<()> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain(op, format!("argument z = {z} must be positive and finite")));
    }
    Ok(())
}

fn scaled_value(order: &MacdonaldOrder, z: f64) -> Scaled {
    if order.half_integer {
        half_integer_scaled(order.nu.floor() as usize, z)
    } else {
        general_scaled(order.nu, z)
    }
}

/// `ln K_ν(z)`; finite for every admissible input.
pub fn ln_macdonald_k(order: &MacdonaldOrder, z: f64) -> Result<f64> {
    check_argument("ln_macdonald_k", z)?;
    Ok(scaled_value(order, z).ln())
}

/// `K_ν(z)`.
///
/// Returns [`Error::Overflow`] / [`Error::Underflow`] when the value is not
/// representable as a normal `f64`; these are distinct from the domain error
/// raised for `z ≤ 0`.
pub fn macdonald_k(order: &MacdonaldOrder, z: f64) -> Result<f64> {
    check_argument("macdonald_k", z)?;
    let ln = scaled_value(order, z).ln();
    if ln > f64::MAX.ln() {
        return Err(Error::Overflow {
            op: "macdonald_k",
            log_value: ln,
        });
    }
    if ln < f64::MIN_POSITIVE.ln() {
        return Err(Error::Underflow {
            op: "macdonald_k",
            log_value: ln,
        });
    }
    Ok(ln.exp())
}

/// General-order evaluation even for half-integer `ν`; used to cross-check
/// the two paths.
pub fn macdonald_k_general_path(nu: f64, z: f64) -> Result<f64> {
    check_argument("macdonald_k_general_path", z)?;
    MacdonaldOrder::new(nu)?;
    Ok(general_scaled(nu, z).ln().exp())
}
