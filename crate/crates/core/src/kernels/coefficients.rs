//! Pointwise coefficient functions of the many-body boundary conditions.

use std::f64::consts::PI;

use super::theta::ThetaProfile;
use crate::error::{Error, Result};
use crate::Vec3;

fn theta_over_r(op: &'static str, profile: &ThetaProfile, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Err(Error::domain(op, "coincident positions"));
    }
    Ok(profile.value(r) / r)
}

/// Position-dependent strength of the pair boundary condition at a
/// coincidence point `z` with spectators `y₁ … y_{N-2}`:
///
/// `α + γ Σ_k θ(|y_k - z|)/|y_k - z| + (γ/2) Σ_{k<ℓ} θ(|y_k - y_ℓ|)/|y_k - y_ℓ|`.
pub fn a_function(z: &Vec3, spectators: &[Vec3], alpha: f64, gamma: f64, profile: &ThetaProfile) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::domain("a_function", format!("gamma = {gamma} must be positive")));
    }
    let mut three_body = 0.0;
    for y in spectators {
        three_body += theta_over_r("a_function", profile, (y - z).norm())?;
    }
    let mut four_body = 0.0;
    for (k, yk) in spectators.iter().enumerate() {
        for yl in &spectators[k + 1..] {
            four_body += theta_over_r("a_function", profile, (yk - yl).norm())?;
        }
    }
    Ok(alpha + gamma * three_body + 0.5 * gamma * four_body)
}

/// Component `i` of the impurity-gas coefficient operator applied to charge
/// values already evaluated at a common point:
///
/// `αᵢ ξᵢ + γ Σ_{k≠i} θ(|x_k - z|)/|x_k - z| · ξ_k`.
///
/// `centers` holds all `N` heavy positions; entry `i` is not used. Which
/// argument slot each `ξ_k` was evaluated at is the caller's choice: the
/// coefficient itself only needs the values.
pub fn b_apply_point(
    i: usize,
    xi_values: &[f64],
    z: &Vec3,
    centers: &[Vec3],
    alphas: &[f64],
    gamma: f64,
    profile: &ThetaProfile,
) -> Result<f64> {
    let n = xi_values.len();
    if centers.len() != n || alphas.len() != n || i >= n {
        return Err(Error::domain("b_apply_point", "one charge value, center and strength per index"));
    }
    let mut coupled = 0.0;
    for k in (0..n).filter(|&k| k != i) {
        coupled += theta_over_r("b_apply_point", profile, (centers[k] - z).norm())? * xi_values[k];
    }
    Ok(alphas[i] * xi_values[i] + gamma * coupled)
}

/// Ground-state weight of the Dirichlet-form construction:
/// `(1/4π) Σ_{i<j} e^{-m|xᵢ-xⱼ|}/|xᵢ-xⱼ|`.
pub fn phi_weight(config: &[Vec3], m_d: f64) -> Result<f64> {
    if !(m_d >= 0.0) {
        return Err(Error::domain("phi_weight", format!("m = {m_d} must be nonnegative")));
    }
    let mut sum = 0.0;
    for (i, xi) in config.iter().enumerate() {
        for xj in &config[i + 1..] {
            let r = (xi - xj).norm();
            if r == 0.0 {
                return Err(Error::domain("phi_weight", "coincident points"));
            }
            sum += (-m_d * r).exp() / r;
        }
    }
    Ok(sum / (4.0 * PI))
}
