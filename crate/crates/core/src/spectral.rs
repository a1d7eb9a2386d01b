//! Bound states, eigencurves and the spectral lower bound of the
//! fixed-center operator.
//!
//! The point spectrum sits where `M(λ)` is singular. Writing `s = √λ`,
//! `dM/ds` is the matrix `e^{-s|xᵢ-xⱼ|}`, which is positive definite, so
//! every ordered eigenvalue `μₖ(s)` of `M` is strictly increasing. Each
//! curve that starts negative at threshold crosses zero exactly once and
//! contributes one bound state; bisection on `s` gives certified brackets.

use nalgebra::{DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pointop::{boundary_matrix_sqrt, CenterConfig};

/// Relative tolerance on `λ*` for every root.
pub const ROOT_TOLERANCE: f64 = 1e-10;
/// Largest `√λ` the bracket expansion may reach.
const MAX_SQRT_LAMBDA: f64 = 1e9;
/// Roots closer than this (relative) are treated as one degenerate level.
const DEGENERACY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralResult {
    /// Bound-state energies `E = -λ*`, ascending, repeated by multiplicity.
    pub energies: Vec<f64>,
    /// Unit null vectors of `M(λ*)`, one per energy; orthonormal within a
    /// degenerate level.
    pub charge_vectors: Vec<Vec<f64>>,
    /// `λ₀ = max λ*`, or 0 for an empty point spectrum.
    pub lambda0: f64,
}

impl SpectralResult {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Lowest energy, if any.
    pub fn ground_energy(&self) -> Option<f64> {
        self.energies.first().copied()
    }
}

fn sorted_eigen_sqrt(config: &CenterConfig, s: f64) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(boundary_matrix_sqrt(config, s))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn curve_value(config: &CenterConfig, k: usize, s: f64) -> f64 {
    sorted_eigen_sqrt(config, s)[k]
}

/// The `k`-th smallest eigenvalue of `M(λ)` along `lambda_grid`.
///
/// Curves are labelled by order, which keeps each one continuous and
/// nondecreasing in `λ`; at a crossing of two analytic branches the labels
/// swap branches.
pub fn eigencurve(config: &CenterConfig, k: usize, lambda_grid: &[f64]) -> Result<Vec<f64>> {
    check_grid(lambda_grid)?;
    if k >= config.len() {
        return Err(Error::domain("eigencurve", format!("curve index {k} out of range")));
    }
    Ok(lambda_grid.iter().map(|&l| curve_value(config, k, l.sqrt())).collect())
}

/// All eigencurves at once: `curves[k][g]` is `μₖ(lambda_grid[g])`.
pub fn eigencurves(config: &CenterConfig, lambda_grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_grid(lambda_grid)?;
    let mut curves = vec![Vec::with_capacity(lambda_grid.len()); config.len()];
    for &l in lambda_grid {
        for (curve, mu) in curves.iter_mut().zip(sorted_eigen_sqrt(config, l.sqrt())) {
            curve.push(mu);
        }
    }
    Ok(curves)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|&l| !(l > 0.0 && l.is_finite())) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("eigencurve", "lambda grid must be positive and strictly increasing"));
    }
    Ok(())
}

/// Root of the `k`-th curve in `s`, given `μₖ(0) < 0`.
fn curve_root(config: &CenterConfig, k: usize, s_start: f64) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = s_start;
    while curve_value(config, k, hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > MAX_SQRT_LAMBDA {
            return Err(Error::MaxExpansionExceeded { lambda: lo * lo });
        }
    }
    // λ = s², so a relative width ε in s is 2ε in λ
    while hi - lo > 1e-3 * ROOT_TOLERANCE * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if curve_value(config, k, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn canonical_sign(v: &mut [f64]) {
    let pivot = v
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(bi, bv), (i, x)| if x.abs() > bv.abs() + 1e-12 { (i, *x) } else { (bi, bv) });
    if pivot.1 < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// All bound states with `λ* ∈ (0, lambda_max]`, expanding `lambda_max`
/// automatically while some curve is still negative there.
pub fn bound_states(config: &CenterConfig, lambda_max: f64) -> Result<SpectralResult> {
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::domain("bound_states", "lambda_max must be positive"));
    }
    let threshold = sorted_eigen_sqrt(config, 0.0);
    let negative = threshold.iter().take_while(|&&mu| mu < 0.0).count();
    // curve k = 0 crosses last, so roots come out in decreasing s
    let roots = (0..negative)
        .map(|k| curve_root(config, k, lambda_max.sqrt()))
        .collect::<Result<Vec<f64>>>()?;

    let mut energies = Vec::with_capacity(negative);
    let mut charge_vectors = Vec::with_capacity(negative);
    let mut k = 0;
    while k < roots.len() {
        let mut end = k + 1;
        while end < roots.len() && (roots[k] - roots[end]).abs() <= DEGENERACY_TOLERANCE * roots[k] {
            end += 1;
        }
        let s = roots[k..end].iter().sum::<f64>() / (end - k) as f64;
        let eig = SymmetricEigen::new(boundary_matrix_sqrt(config, s));
        let mut order: Vec<usize> = (0..config.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        for &idx in &order[k..end] {
            let column: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
            let mut v: Vec<f64> = column.normalize().iter().copied().collect();
            canonical_sign(&mut v);
            energies.push(-s * s);
            charge_vectors.push(v);
        }
        k = end;
    }
    let lambda0 = roots.first().map_or(0.0, |s| s * s);
    Ok(SpectralResult {
        energies,
        charge_vectors,
        lambda0,
    })
}

/// `λ₀` such that the operator is bounded below by `-λ₀`: the deepest
/// bound-state depth, or 0 when `M(λ)` is positive definite for every
/// `λ > 0`.
///
/// This is the Krein-theory reading: below the deepest root all eigencurves
/// are positive, so `M(λ)` is invertible and the resolvent formula holds.
pub fn lower_bound(config: &CenterConfig) -> Result<f64> {
    Ok(bound_states(config, 1.0)?.lambda0)
}

/// Scattering length `a = -1/α` on the extended real line.
///
/// `α = 0` (the unitary limit) maps to an infinity whose sign follows the
/// sign of zero: `+∞` for `-0.0`, `-∞` for `+0.0`. Infinite `α` maps to 0.
pub fn scattering_length(alpha: f64) -> f64 {
    -1.0 / alpha
}
