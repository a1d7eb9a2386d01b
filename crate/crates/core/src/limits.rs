//! Merging two centers, the local (`θ ≡ 0`) pathology, and the integral
//! identities behind the small-mass-ratio limit.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{ThetaKind, ThetaProfile};
use crate::pointop::{resolvent_apply, yukawa_spherical_mean, CenterConfig, GaussianSource, Source};
use crate::quadrature::{
    integrate, integrate_quadrant, integrate_sine_transform, integrate_to_infinity, integrate_with_breaks, QuadSpec,
};
use crate::spectral::bound_states;
use crate::Vec3;

/// Outcome of merging two centers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "alpha", rename_all = "snake_case")]
pub enum MergeOutcome {
    /// A single point interaction of this strength.
    Alpha(f64),
    /// The interaction disappears.
    FreeLimit,
    /// `α₁ + α₂ = 2θ′(0) ≠ 0`; no limiting strength is defined.
    DegenerateMerge,
}

/// Strength of the point interaction obtained when two centers merge.
///
/// `α = (α₁α₂ - θ′(0)²)/(α₁ + α₂ - 2θ′(0))`; for `θ′(0) = 0` this is the
/// harmonic rule `1/α = 1/α₁ + 1/α₂`.
pub fn effective_alpha_merge(alpha1: f64, alpha2: f64, theta_prime0: f64) -> MergeOutcome {
    let den = alpha1 + alpha2 - 2.0 * theta_prime0;
    if den != 0.0 {
        MergeOutcome::Alpha((alpha1 * alpha2 - theta_prime0 * theta_prime0) / den)
    } else if theta_prime0 == 0.0 {
        MergeOutcome::FreeLimit
    } else {
        MergeOutcome::DegenerateMerge
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MergeScanResult {
    pub radii: Vec<f64>,
    /// Lowest energy at each separation, `None` without bound states.
    pub ground_energies: Vec<Option<f64>>,
    /// Shallowest bound state at each separation: the level that survives
    /// the merge. For `α₁ + α₂ < 0` the ground state is an antisymmetric
    /// level diving like `(α₁ + α₂)/R` instead.
    pub limit_energies: Vec<Option<f64>>,
    pub bound_state_counts: Vec<usize>,
    /// `q₁ + q₂` at `lambda_probe`.
    pub charge_sums: Vec<f64>,
    /// `[(h₀+λ)⁻¹f](x₁)/(α+√λ)` for the merged strength `α`.
    pub reference_charge_sum: Option<f64>,
    pub predicted_alpha: MergeOutcome,
    /// `-α²` when the merged interaction binds.
    pub predicted_energy: Option<f64>,
    pub lambda_probe: f64,
}

/// Source used by [`merge_scan`]: a unit Gaussian centered at `(1/2, 0, 0)`.
pub fn merge_probe_source() -> GaussianSource {
    GaussianSource::unit(Vec3::new(0.5, 0.0, 0.0))
}

/// Two centers at separations `radii` (first center at the origin):
/// spectrum and `q₁ + q₂` for [`merge_probe_source`] at `lambda_probe`.
///
/// The prediction follows [`effective_alpha_merge`] with the profile's
/// `θ′(0)`, except for `θ ≡ 0`, where the interaction disappears.
pub fn merge_scan(
    alpha1: f64,
    alpha2: f64,
    profile: ThetaProfile,
    radii: &[f64],
    lambda_probe: f64,
) -> Result<MergeScanResult> {
    merge_scan_with(alpha1, alpha2, profile, radii, lambda_probe, &merge_probe_source(), &QuadSpec::default())
}

pub fn merge_scan_with(
    alpha1: f64,
    alpha2: f64,
    profile: ThetaProfile,
    radii: &[f64],
    lambda_probe: f64,
    f: &dyn Source,
    quad: &QuadSpec,
) -> Result<MergeScanResult> {
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) || radii.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::domain("merge_scan", "radii must be positive and strictly decreasing"));
    }
    if !(lambda_probe > 0.0) {
        return Err(Error::domain("merge_scan", "lambda_probe must be positive"));
    }
    let rows = radii
        .par_iter()
        .map(|&r| {
            let config = CenterConfig::pair(alpha1, alpha2, r, profile)?;
            let spectrum = bound_states(&config, 1.0)?;
            let out = resolvent_apply(&config, lambda_probe, f, quad)?;
            Ok((
                spectrum.ground_energy(),
                spectrum.energies.last().copied(),
                spectrum.len(),
                out.charges.iter().sum::<f64>(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let predicted_alpha = match profile.kind {
        ThetaKind::LocalZero => MergeOutcome::FreeLimit,
        _ => effective_alpha_merge(alpha1, alpha2, profile.derivative_at_zero()),
    };
    let s = lambda_probe.sqrt();
    let reference_charge_sum = match predicted_alpha {
        MergeOutcome::Alpha(a) if a + s != 0.0 => {
            let w = crate::pointop::free_resolvent_apply(f, lambda_probe, &Vec3::zeros(), quad)?;
            Some(w / (a + s))
        }
        MergeOutcome::FreeLimit => Some(0.0),
        _ => None,
    };
    let predicted_energy = match predicted_alpha {
        MergeOutcome::Alpha(a) if a < 0.0 => Some(-a * a),
        _ => None,
    };
    Ok(MergeScanResult {
        radii: radii.to_vec(),
        ground_energies: rows.iter().map(|r| r.0).collect(),
        limit_energies: rows.iter().map(|r| r.1).collect(),
        bound_state_counts: rows.iter().map(|r| r.2).collect(),
        charge_sums: rows.iter().map(|r| r.3).collect(),
        reference_charge_sum,
        predicted_alpha,
        predicted_energy,
        lambda_probe,
    })
}

/// Charges of the local two-center model at one separation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayPoint {
    pub radius: f64,
    /// Spectral parameter actually used; raised from the requested value
    /// only when it hit the point spectrum.
    pub lambda: f64,
    pub charges: [f64; 2],
    pub charge_norm: f64,
}

/// Charges for `θ ≡ 0` as the two centers merge; they vanish like `R`.
///
/// Whenever `-λ` lands on an eigenvalue (or close enough to make the charge
/// system ill conditioned) `λ` is multiplied by 4 until the solve succeeds.
pub fn local_decay_scan(
    alphas: (f64, f64),
    radii: &[f64],
    lambda: f64,
    f: &dyn Source,
    quad: &QuadSpec,
) -> Result<Vec<DecayPoint>> {
    radii
        .par_iter()
        .map(|&r| {
            let config = CenterConfig::pair(alphas.0, alphas.1, r, ThetaProfile::local_zero())?;
            let mut l = lambda;
            for _ in 0..40 {
                match resolvent_apply(&config, l, f, quad) {
                    Ok(out) => {
                        let q = [out.charges[0], out.charges[1]];
                        return Ok(DecayPoint {
                            radius: r,
                            lambda: l,
                            charges: q,
                            charge_norm: q[0].hypot(q[1]),
                        });
                    }
                    Err(Error::SingularBoundaryMatrix { .. } | Error::IllConditioned { .. }) => l *= 4.0,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::SingularBoundaryMatrix { lambda: l })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `√λ*·R` for the deepest level of the local two-center model. As `R → 0`
/// it tends to the root `t*` of `t = e^{-t}`: the level falls to `-∞` like
/// `-(t*/R)²`.
pub fn local_deep_state_scaling(alphas: (f64, f64), radius: f64) -> Result<f64> {
    let config = CenterConfig::pair(alphas.0, alphas.1, radius, ThetaProfile::local_zero())?;
    let spectrum = bound_states(&config, 1.0 / (radius * radius))?;
    let ground = spectrum
        .ground_energy()
        .ok_or_else(|| Error::domain("local_deep_state_scaling", "no bound state"))?;
    Ok((-ground).sqrt() * radius)
}

/// `‖g^λ(· - x₂) - g^λ(· - x₁)‖²` for `|x₁ - x₂| = R`, in closed form
/// `(4π/√λ)(1 - e^{-√λR})`.
pub fn g_shift_norm(r: f64, lambda: f64) -> Result<f64> {
    check_positive("g_shift_norm", r, lambda)?;
    let s = lambda.sqrt();
    Ok(-4.0 * PI / s * (-s * r).exp_m1())
}

/// [`g_shift_norm`] from its momentum representation
/// `16 ∫_0^∞ p²/(p²+λ)² (1 - sin(pR)/(pR)) dp`.
pub fn g_shift_norm_momentum(r: f64, lambda: f64, quad: &QuadSpec) -> Result<f64> {
    check_positive("g_shift_norm_momentum", r, lambda)?;
    let s = lambda.sqrt();
    let smooth = |p: f64| {
        let d = p * p + lambda;
        p * p / (d * d)
    };
    let whole = integrate_with_breaks(&smooth, &[0.0, s], quad)?.value + integrate_to_infinity(smooth, s, quad)?.value;
    let oscillating = integrate_sine_transform(
        |p| {
            let d = p * p + lambda;
            p / (d * d * r)
        },
        r,
        quad,
    )?
    .value;
    Ok(16.0 * (whole - oscillating))
}

/// [`g_shift_norm`] in position space: `2‖g‖² - 2⟨g, g(· - x)⟩`, the overlap
/// done in shells about `x₁` with the exact spherical mean of the shifted
/// kernel.
pub fn g_shift_norm_position(r: f64, lambda: f64, quad: &QuadSpec) -> Result<f64> {
    check_positive("g_shift_norm_position", r, lambda)?;
    let s = lambda.sqrt();
    let self_overlap = |t: f64| 4.0 * PI * (-2.0 * s * t).exp();
    let cross = |t: f64| 4.0 * PI * t * (-s * t).exp() * yukawa_spherical_mean(s, r, t);
    let norm = integrate_to_infinity(self_overlap, 0.0, quad)?.value;
    let overlap = integrate(cross, 0.0, r, quad)?.value + integrate_to_infinity(cross, r, quad)?.value;
    Ok(2.0 * (norm - overlap))
}

fn check_positive(op: &'static str, r: f64, lambda: f64) -> Result<()> {
    if !(r > 0.0 && lambda > 0.0 && r.is_finite() && lambda.is_finite()) {
        return Err(Error::domain(op, "R and lambda must be positive"));
    }
    Ok(())
}

/// Integral identities used in the small-mass-ratio analysis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Identity {
    /// `∫ d³p |p-k|⁻²|p-k′|⁻² = π³/|k-k′|`.
    MomentumDouble { k: [f64; 3], k_prime: [f64; 3] },
    /// `∫_0^∞ p⁻¹ ln((p+a)/|p-a|) dp = π²/2` for every `a > 0`.
    LogIntegral { a: f64 },
    /// `‖(√(ηp²/(1+η)² + ηP²/(1+η) + λ/(1+η)) - √λ) ξ̂‖ ≤ √η‖ξ‖_{H¹} + η√λ‖ξ‖`
    /// for the unit Gaussian `ξ̂(p, P) = e^{-(p²+P²)/2}` on ℝ³×ℝ³.
    EtaSqrtBound { eta: f64, lambda: f64 },
}

impl Identity {
    pub fn name(&self) -> &'static str {
        match self {
            Identity::MomentumDouble { .. } => "MomentumDouble",
            Identity::LogIntegral { .. } => "LogIntegral",
            Identity::EtaSqrtBound { .. } => "EtaSqrtBound",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub identity: Identity,
    pub reference: f64,
    pub computed: f64,
    pub rel_error: f64,
    /// `computed ≤ reference` is the claim rather than equality.
    pub upper_bound: bool,
}

impl IdentityCheck {
    /// Equalities hold to `tol` relative; bounds hold outright.
    pub fn holds(&self, tol: f64) -> bool {
        if self.upper_bound {
            self.computed <= self.reference
        } else {
            self.rel_error <= tol
        }
    }
}

/// Evaluates one identity numerically against its reference value.
pub fn verify_identity(identity: &Identity, quad: &QuadSpec) -> Result<IdentityCheck> {
    let (reference, computed, upper_bound) = match *identity {
        Identity::MomentumDouble { k, k_prime } => {
            let d = (Vec3::from(k) - Vec3::from(k_prime)).norm();
            if !(d > 0.0) {
                return Err(Error::domain("verify_identity", "k and k' must differ"));
            }
            (PI.powi(3) / d, momentum_double(d, quad)?, false)
        }
        Identity::LogIntegral { a } => {
            if !(a > 0.0) {
                return Err(Error::domain("verify_identity", "a must be positive"));
            }
            (PI * PI / 2.0, log_integral(a, quad)?, false)
        }
        Identity::EtaSqrtBound { eta, lambda } => {
            if !(eta > 0.0 && lambda > 0.0) {
                return Err(Error::domain("verify_identity", "eta and lambda must be positive"));
            }
            let (lhs, rhs) = eta_sqrt_bound(eta, lambda, quad)?;
            (rhs, lhs, true)
        }
    };
    Ok(IdentityCheck {
        identity: *identity,
        reference,
        computed,
        rel_error: (computed - reference).abs() / reference.abs(),
        upper_bound,
    })
}

/// `∫ d³p /(|p|²|p-d|²)` in spherical coordinates about `d`:
/// `2π ∫_0^∞ dq ∫_{-1}^{1} du /(q² + d² - 2qdu)`, both integrals numerical.
///
/// The nested rule cannot beat the inner rounding noise, so the outer
/// tolerance is floored at `1e-9` relative.
fn momentum_double(d: f64, quad: &QuadSpec) -> Result<f64> {
    let quad = &QuadSpec {
        abs_tol: quad.abs_tol.max(1e-12),
        rel_tol: quad.rel_tol.max(1e-9),
        ..*quad
    };
    let inner_spec = QuadSpec {
        abs_tol: 1e-2 * quad.abs_tol,
        rel_tol: 1e-2 * quad.rel_tol,
        ..*quad
    };
    let failure = std::cell::RefCell::new(None);
    // in t = 1 - u the integrand peaks at t = 0 with width (q-d)²/(2qd);
    // geometric breaks resolve the peak
    let angular = |q: f64| {
        let gap2 = (q - d) * (q - d);
        let width = gap2 / (2.0 * q * d);
        let mut breaks = vec![2.0, 1.0];
        let mut t = 1.0;
        while t > width && t > 1e-300 {
            t *= 0.1;
            breaks.push(t);
        }
        breaks.push(0.0);
        breaks.reverse();
        integrate_with_breaks(&|t: f64| 1.0 / (gap2 + 2.0 * q * d * t), &breaks, &inner_spec)
    };
    let angular = |q: f64| match angular(q) {
        Ok(e) => e.value,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    // logarithmic singularity of the angular integral at q = d
    let head = integrate_with_breaks(&angular, &[0.0, d, 2.0 * d], quad)?.value;
    let tail = integrate_to_infinity(angular, 2.0 * d, quad)?.value;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(2.0 * PI * (head + tail))
}

fn log_integral(a: f64, quad: &QuadSpec) -> Result<f64> {
    let f = |p: f64| {
        if p < a {
            (2.0 * p / (a - p)).ln_1p() / p
        } else {
            (2.0 * a / (p - a)).ln_1p() / p
        }
    };
    let head = integrate_with_breaks(&f, &[0.0, a, 2.0 * a], quad)?.value;
    Ok(head + integrate_to_infinity(f, 2.0 * a, quad)?.value)
}

/// Returns `(lhs, majorant)`.
fn eta_sqrt_bound(eta: f64, lambda: f64, quad: &QuadSpec) -> Result<(f64, f64)> {
    let s = lambda.sqrt();
    let shell = 16.0 * PI * PI;
    let lhs2 = integrate_quadrant(
        |p, big| {
            let a = eta * p * p / ((1.0 + eta) * (1.0 + eta)) + eta * big * big / (1.0 + eta);
            let c = lambda / (1.0 + eta);
            // √(a + c) - √λ without cancellation
            let diff = (a - lambda * eta / (1.0 + eta)) / ((a + c).sqrt() + s);
            shell * p * p * big * big * diff * diff * (-(p * p + big * big)).exp()
        },
        quad,
    )?
    .value;
    let pi3 = PI.powi(3);
    let norm = pi3.sqrt();
    let h1 = (4.0 * pi3).sqrt();
    Ok((lhs2.sqrt(), eta.sqrt() * h1 + eta * s * norm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_rules() {
        assert_eq!(effective_alpha_merge(-1.0, -1.0, 0.0), MergeOutcome::Alpha(-0.5));
        assert_eq!(effective_alpha_merge(2.0, 2.0, 1.0), MergeOutcome::Alpha(1.5));
        assert_eq!(effective_alpha_merge(1.0, -1.0, 0.0), MergeOutcome::FreeLimit);
        assert_eq!(effective_alpha_merge(1.0, 1.0, 1.0), MergeOutcome::DegenerateMerge);
    }

    #[test]
    fn shift_norm_examples() {
        let v = g_shift_norm(1.0, 1.0).unwrap();
        assert!((v - 4.0 * PI * (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        let far = g_shift_norm(1e3, 1.0).unwrap();
        assert!((far - 4.0 * PI).abs() < 1e-12);
        assert!(g_shift_norm(0.0, 1.0).is_err());
    }

    #[test]
    fn shift_norm_oracles() {
        let q = QuadSpec::default();
        for (r, l) in [(1.0, 1.0), (0.1, 2.0), (3.0, 0.5)] {
            let exact = g_shift_norm(r, l).unwrap();
            let m = g_shift_norm_momentum(r, l, &q).unwrap();
            let p = g_shift_norm_position(r, l, &q).unwrap();
            assert!((m - exact).abs() < 1e-8 * exact, "{r} {l}: {m} vs {exact}");
            assert!((p - exact).abs() < 1e-8 * exact, "{r} {l}: {p} vs {exact}");
        }
    }

    #[test]
    fn log_integral_value() {
        let c = verify_identity(&Identity::LogIntegral { a: 1.0 }, &QuadSpec::default()).unwrap();
        assert!(c.rel_error < 1e-9, "{c:?}");
        let c = verify_identity(&Identity::LogIntegral { a: 3.7 }, &QuadSpec::default()).unwrap();
        assert!(c.rel_error < 1e-9, "{c:?}");
    }

    #[test]
    fn slope_of_power_law() {
        let x = [1e-3, 1e-2, 1e-1];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.5)).collect();
        assert!((log_log_slope(&x, &y) - 1.5).abs() < 1e-12);
    }
}
