use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::macdonald::{ln_macdonald_k, MacdonaldOrder};
use super::theta::ThetaProfile;
use crate::error::{Error, Result};
use crate::Vec3;

/// Light/heavy mass bookkeeping. `eta = m/M`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassModel {
    #[serde(default = "half")]
    pub m_light: f64,
    pub eta: f64,
}

fn half() -> f64 {
    0.5
}

impl MassModel {
    /// `m = 1/2` (so the light kinetic energy is `-Δ`) and the given ratio.
    pub fn new(eta: f64) -> Result<Self> {
        Self::with_mass(0.5, eta)
    }

    pub fn with_mass(m_light: f64, eta: f64) -> Result<Self> {
        if !(m_light > 0.0 && m_light.is_finite()) {
            return Err(Error::domain("MassModel", format!("m_light = {m_light} must be positive")));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::domain("MassModel", format!("eta = {eta} must be positive")));
        }
        Ok(MassModel { m_light, eta })
    }
}

fn check_lambda(op: &'static str, lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(op, format!("lambda = {lambda} must be positive")));
    }
    Ok(())
}

/// `g^λ(r) = e^{-√λ r}/r`.
pub fn g_lambda(r: f64, lambda: f64) -> Result<f64> {
    check_lambda("g_lambda", lambda)?;
    if !(r > 0.0) {
        return Err(Error::domain("g_lambda", format!("r = {r}: the kernel is singular at r = 0")));
    }
    Ok((-lambda.sqrt() * r).exp() / r)
}

/// `δ_{λ,θ}(r) = (θ(r) - e^{-√λ r})/r`.
pub fn delta_lambda_theta(profile: &ThetaProfile, r: f64, lambda: f64) -> Result<f64> {
    check_lambda("delta_lambda_theta", lambda)?;
    if !(r > 0.0) {
        return Err(Error::domain("delta_lambda_theta", format!("r = {r} must be positive")));
    }
    Ok(delta_sqrt(profile, r, lambda.sqrt()))
}

/// `δ` in terms of `s = √λ ≥ 0`; `s = 0` is the threshold value. Written as
/// `(θ-1)/r + (1-e^{-sr})/r` so that both pieces stay accurate as `r → 0`.
pub(crate) fn delta_sqrt(profile: &ThetaProfile, r: f64, s: f64) -> f64 {
    profile.deficit_over_r(r) - (-s * r).exp_m1() / r
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn check_configuration(op: &'static str, x: &[f64], y: &[f64]) -> Result<usize> {
    if x.len() != y.len() || x.is_empty() || !x.len().is_multiple_of(3) {
        return Err(Error::domain(op, "points must share a dimension 3N with N ≥ 1"));
    }
    Ok(x.len() / 3)
}

fn finite_exp(op: &'static str, ln: f64) -> Result<f64> {
    if ln > f64::MAX.ln() {
        return Err(Error::Overflow { op, log_value: ln });
    }
    if ln < f64::MIN_POSITIVE.ln() {
        return Err(Error::Underflow { op, log_value: ln });
    }
    Ok(ln.exp())
}

/// Kernel of `(-Δ + λ)^{-1}` in `ℝ^{3N}`:
/// `(2π)^{-3N/2} (√λ/d)^{3N/2-1} K_{3N/2-1}(√λ d)`.
pub fn green_free_kernel(x: &[f64], y: &[f64], lambda: f64) -> Result<f64> {
    let n = check_configuration("green_free_kernel", x, y)?;
    check_lambda("green_free_kernel", lambda)?;
    let d = distance(x, y);
    if d == 0.0 {
        return Err(Error::domain("green_free_kernel", "coincident points"));
    }
    let dim_half = 1.5 * n as f64;
    let nu = dim_half - 1.0;
    let s = lambda.sqrt();
    let order = MacdonaldOrder::new(nu)?;
    let ln = -dim_half * (2.0 * PI).ln() + nu * (s / d).ln() + ln_macdonald_k(&order, s * d)?;
    finite_exp("green_free_kernel", ln)
}

/// Kernel of `(H₀ + λ)^{-1}` for one light particle of mass `m` at `x` and
/// `N` heavy particles at `X`, with the mass-weighted distance
/// `|x-y|² + η|X-Y|²` and Macdonald order `(3N+1)/2`.
pub fn green_mass_kernel(
    x: &Vec3,
    heavy_x: &[f64],
    y: &Vec3,
    heavy_y: &[f64],
    model: &MassModel,
    lambda: f64,
) -> Result<f64> {
    if heavy_x.len() != heavy_y.len() || !heavy_x.len().is_multiple_of(3) {
        return Err(Error::domain("green_mass_kernel", "heavy coordinates must share a dimension 3N"));
    }
    check_lambda("green_mass_kernel", lambda)?;
    let n = (heavy_x.len() / 3) as f64;
    let light = (x - y).norm_squared();
    let heavy = heavy_x.iter().zip(heavy_y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let d2 = light + model.eta * heavy;
    if d2 == 0.0 {
        return Err(Error::domain("green_mass_kernel", "coincident configurations"));
    }
    let k2 = 2.0 * model.m_light * lambda;
    let order = MacdonaldOrder::new(0.5 * (3.0 * n + 1.0))?;
    let ln = -1.5 * n * model.eta.ln() - 1.5 * (n + 1.0) * (2.0 * PI).ln()
        + 0.25 * (3.0 * n + 1.0) * (k2 / d2).ln()
        + ln_macdonald_k(&order, (k2 * d2).sqrt())?;
    finite_exp("green_mass_kernel", ln)
}
