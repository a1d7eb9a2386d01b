//! Closed-form critical couplings and the Dirichlet-form parameter map.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::ThetaProfile;

/// Critical three-body coupling for `N` identical bosons:
/// `γ_c = 2 - 8√3/(π(N-2)(8 + √3(N-3)))`.
pub fn gamma_c_bosons(n: u64) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain("gamma_c_bosons", format!("N = {n} must be at least 3")));
    }
    let r3 = 3f64.sqrt();
    let n = n as f64;
    Ok(2.0 - 8.0 * r3 / (PI * (n - 2.0) * (8.0 + r3 * (n - 3.0))))
}

/// Critical coupling for `N` heavy particles and one light particle at mass
/// ratio `η`:
/// `γ̂_c = (2(η+1)/π) arcsin(1/(η+1)) - 2√(η(η+2))/(π(N-1)(η+1))`.
pub fn gamma_hat_c(n: u64, eta: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("gamma_hat_c", format!("N = {n} must be at least 2")));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::domain("gamma_hat_c", format!("eta = {eta} must be positive")));
    }
    let e1 = eta + 1.0;
    Ok(2.0 * e1 / PI * (1.0 / e1).asin() - 2.0 * (eta * (eta + 2.0)).sqrt() / (PI * (n - 1) as f64 * e1))
}

/// End points of the mass-ratio axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaLimit {
    /// `η → 0⁺`: infinitely heavy centers.
    Zero,
    /// `η → ∞`.
    Infinity,
}

/// `γ̂_c` at an end of the `η` axis, evaluated analytically:
/// `1` as `η → 0⁺` and `(2/π)(N-2)/(N-1)` as `η → ∞`.
pub fn gamma_hat_c_limit(n: u64, limit: EtaLimit) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("gamma_hat_c_limit", format!("N = {n} must be at least 2")));
    }
    Ok(match limit {
        EtaLimit::Zero => 1.0,
        EtaLimit::Infinity => 2.0 / PI * (n - 2) as f64 / (n - 1) as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaHatExtrema {
    pub inf_est: f64,
    pub sup_est: f64,
    pub inf_at: f64,
    pub sup_at: f64,
    /// Limits extrapolated from the two grid points nearest each end, using
    /// `γ̂_c ≈ 1 - c√η` near 0 and `γ̂_c ≈ L + c/η` at infinity. Cross-check
    /// only; the grid extrema are the estimates.
    pub inf_extrapolated: f64,
    pub sup_extrapolated: f64,
}

/// Minimum and maximum of `γ̂_c(N, ·)` over a grid spanning at least 12
/// decades.
pub fn gamma_hat_extrema(n: u64, eta_grid: &[f64]) -> Result<GammaHatExtrema> {
    if eta_grid.len() < 2 || eta_grid.iter().any(|&e| !(e > 0.0 && e.is_finite())) || eta_grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::domain("gamma_hat_extrema", "eta grid must be positive and strictly increasing"));
    }
    let (lo, hi) = (eta_grid[0], eta_grid[eta_grid.len() - 1]);
    if (hi / lo).log10() < 12.0 - 1e-9 {
        return Err(Error::domain("gamma_hat_extrema", "eta grid must span at least 12 decades"));
    }
    let values = eta_grid.iter().map(|&e| gamma_hat_c(n, e)).collect::<Result<Vec<_>>>()?;
    let mut ext = GammaHatExtrema {
        inf_est: f64::INFINITY,
        sup_est: f64::NEG_INFINITY,
        inf_at: f64::NAN,
        sup_at: f64::NAN,
        inf_extrapolated: f64::NAN,
        sup_extrapolated: f64::NAN,
    };
    for (&e, &v) in eta_grid.iter().zip(&values) {
        if v < ext.inf_est {
            ext.inf_est = v;
            ext.inf_at = e;
        }
        if v > ext.sup_est {
            ext.sup_est = v;
            ext.sup_at = e;
        }
    }
    let m = eta_grid.len();
    let (x1, x2) = (eta_grid[0].sqrt(), eta_grid[1].sqrt());
    ext.sup_extrapolated = (values[0] * x2 - values[1] * x1) / (x2 - x1);
    let (y1, y2) = (1.0 / eta_grid[m - 1], 1.0 / eta_grid[m - 2]);
    ext.inf_extrapolated = (values[m - 1] * y2 - values[m - 2] * y1) / (y2 - y1);
    Ok(ext)
}

/// Geometric grid of `points` values from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|k| match k {
            0 => lo,
            _ if k + 1 == points => hi,
            _ => (a + (b - a) * k as f64 / (points - 1) as f64).exp(),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DirichletParameters {
    pub alpha: f64,
    pub gamma: f64,
    pub profile: ThetaProfile,
}

/// Parameters for which the many-boson operator coincides with the
/// generator `-Δ_m` of the Dirichlet form with weight
/// `φ = (1/4π) Σ e^{-m|xᵢ-xⱼ|}/|xᵢ-xⱼ|`: `α = -m`, `γ = 2`,
/// `θ(r) = e^{-mr}`.
///
/// At `m = 0` the profile is the exponential with infinite range, `θ ≡ 1`.
pub fn dirichlet_special_case(m_d: f64) -> Result<DirichletParameters> {
    if !(m_d >= 0.0 && m_d.is_finite()) {
        return Err(Error::domain("dirichlet_special_case", format!("m = {m_d} must be nonnegative")));
    }
    let profile = if m_d == 0.0 {
        ThetaProfile::constant_one()
    } else {
        ThetaProfile::exponential(1.0 / m_d)?
    };
    Ok(DirichletParameters {
        alpha: -m_d,
        gamma: 2.0,
        profile,
    })
}
