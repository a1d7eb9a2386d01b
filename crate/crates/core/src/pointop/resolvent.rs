use std::cell::RefCell;

use nalgebra::{DMatrix, DVector};

use super::boundary::{boundary_matrix, solve_charges};
use super::config::CenterConfig;
use super::source::Source;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breaks, integrate_to_infinity, QuadSpec, SphereRule};
use crate::Vec3;

fn check_lambda(op: &'static str, lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(op, format!("lambda = {lambda} must be positive")));
    }
    Ok(())
}

/// Radial integral `∫_0^∞ h(r) dr` split at `breaks`, tail mapped to a
/// finite interval.
fn radial_integral<F: Fn(f64) -> f64>(h: F, breaks: &[f64], quad: &QuadSpec) -> Result<f64> {
    let head = if breaks.len() >= 2 {
        integrate_with_breaks(&h, breaks, quad)?.value
    } else {
        0.0
    };
    let start = *breaks.last().unwrap_or(&0.0);
    let tail = integrate_to_infinity(&h, start, quad)?.value;
    Ok(head + tail)
}

/// `[(h₀ + λ)^{-1} f](x) = (1/4π) ∫ e^{-√λ|x-y|}/|x-y| f(y) dy`.
///
/// Integrated in spherical shells about `x`, which turns the `1/r` kernel
/// singularity into the smooth radial weight `r e^{-√λ r}` times the
/// spherical mean of `f`.
pub fn free_resolvent_apply(f: &dyn Source, lambda: f64, x: &Vec3, quad: &QuadSpec) -> Result<f64> {
    check_lambda("free_resolvent_apply", lambda)?;
    let s = lambda.sqrt();
    let breaks = f.radial_breaks(x);
    radial_integral(|r| r * (-s * r).exp() * f.spherical_mean(x, r), &breaks, quad)
}

/// Mean of `e^{-s|y-p|}/|y-p|` over the sphere `|y - c| = r` where `|c - p| = a`.
pub(crate) fn yukawa_spherical_mean(s: f64, a: f64, r: f64) -> f64 {
    let (near, far) = if r < a { (r, a) } else { (a, r) };
    if near == 0.0 {
        return (-s * far).exp() / far;
    }
    // e^{-s·far}/far · sinh(s·near)/(s·near)
    let t = s * near;
    let shape = if t < 1e-8 { 1.0 } else { -(-2.0 * t).exp_m1() / (2.0 * t) };
    (-s * (far - near)).exp() * shape / far
}

/// Output of the Krein-type resolvent: `ψ = w_λ + Σᵢ g^λ(· - xᵢ) qᵢ` with
/// `w_λ = (h₀ + λ)^{-1} f`.
pub struct ResolventOutput<'a> {
    pub charges: Vec<f64>,
    pub lambda: f64,
    /// `w_λ(xᵢ)`, the right-hand side of the charge system.
    pub rhs: Vec<f64>,
    centers: Vec<Vec3>,
    source: &'a dyn Source,
    quad: QuadSpec,
}

impl<'a> ResolventOutput<'a> {
    /// Assembles an output from explicit charges; mostly useful for probing
    /// synthetic fields.
    pub fn from_parts(centers: Vec<Vec3>, charges: Vec<f64>, lambda: f64, source: &'a dyn Source, quad: QuadSpec) -> Self {
        let rhs = vec![f64::NAN; centers.len()];
        ResolventOutput {
            charges,
            lambda,
            rhs,
            centers,
            source,
            quad,
        }
    }

    pub fn centers(&self) -> &[Vec3] {
        &self.centers
    }

    /// `w_λ(x)`.
    pub fn smooth_part(&self, x: &Vec3) -> Result<f64> {
        free_resolvent_apply(self.source, self.lambda, x, &self.quad)
    }

    /// `Σᵢ g^λ(x - xᵢ) qᵢ`.
    pub fn singular_part(&self, x: &Vec3) -> Result<f64> {
        let s = self.lambda.sqrt();
        let mut sum = 0.0;
        for (c, q) in self.centers.iter().zip(&self.charges) {
            let r = (x - c).norm();
            if r == 0.0 {
                return Err(Error::domain("ResolventOutput::field", "evaluation point is a center"));
            }
            sum += (-s * r).exp() / r * q;
        }
        Ok(sum)
    }

    /// `ψ(x)` for `x` away from the centers.
    pub fn field(&self, x: &Vec3) -> Result<f64> {
        Ok(self.smooth_part(x)? + self.singular_part(x)?)
    }

    /// Mean of `ψ` over the sphere of radius `rho` about `center`.
    pub fn spherical_mean(&self, center: &Vec3, rho: f64, rule: &SphereRule) -> Result<f64> {
        let first_err = RefCell::new(None);
        let mean = rule.average(|d| match self.field(&(center + rho * d)) {
            Ok(v) => v,
            Err(e) => {
                first_err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        });
        match first_err.into_inner() {
            Some(e) => Err(e),
            None => Ok(mean),
        }
    }
}

/// `(h_{α,θ} + λ)^{-1} f` via the Krein-type formula.
///
/// Valid whenever `-λ` is not an eigenvalue; the solve reports
/// [`Error::SingularBoundaryMatrix`] otherwise. Staying above the spectral
/// lower bound is the caller's business.
pub fn resolvent_apply<'a>(
    config: &CenterConfig,
    lambda: f64,
    f: &'a dyn Source,
    quad: &QuadSpec,
) -> Result<ResolventOutput<'a>> {
    check_lambda("resolvent_apply", lambda)?;
    let rhs = config
        .centers()
        .iter()
        .map(|c| free_resolvent_apply(f, lambda, c, quad))
        .collect::<Result<Vec<_>>>()?;
    let charges = if config.is_empty() {
        Vec::new()
    } else {
        solve_charges(&boundary_matrix(config, lambda)?, &rhs)?
    };
    Ok(ResolventOutput {
        charges,
        lambda,
        rhs,
        centers: config.centers().to_vec(),
        source: f,
        quad: *quad,
    })
}

/// Fitted local behavior `c₋₁/ρ + c₀ + c₁ρ` of the spherically averaged field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryFit {
    /// Estimate of the charge `qᵢ`.
    pub singular: f64,
    /// Estimate of `αᵢqᵢ + Σ_{j≠i} θ(|xᵢ-xⱼ|)/|xᵢ-xⱼ| qⱼ`.
    pub regular: f64,
    /// Nuisance linear coefficient absorbing the `O(ρ)` remainder.
    pub linear: f64,
    /// Max relative misfit over the probe radii.
    pub residual: f64,
}

const FIT_TOLERANCE: f64 = 1e-7;

/// Geometric probe radii below a quarter of the nearest-neighbour distance.
pub fn default_probe_radii(config: &CenterConfig) -> Vec<f64> {
    let top = config.min_separation().map_or(1e-2, |d| (0.25 * d).min(1e-2));
    (0..6).map(|k| top * 0.5f64.powi(k)).collect()
}

/// Recovers `(qᵢ, regular part)` at center `i` from spherical averages of
/// the field at the given radii. Averaging removes every `ℓ ≥ 1` angular
/// component, leaving `qᵢ/ρ + c₀ + O(ρ)`.
pub fn boundary_probe(out: &ResolventOutput<'_>, config: &CenterConfig, i: usize, radii: &[f64]) -> Result<BoundaryFit> {
    if i >= config.len() {
        return Err(Error::domain("boundary_probe", "center index out of range"));
    }
    if radii.len() < 3 {
        return Err(Error::domain("boundary_probe", "need at least three radii"));
    }
    let limit = config.min_separation().map_or(f64::INFINITY, |d| 0.5 * d);
    if radii.iter().any(|&r| !(r > 0.0 && r < limit)) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain(
            "boundary_probe",
            "radii must be positive, decreasing and below half the minimal separation",
        ));
    }
    let rule = SphereRule::default();
    let center = config.centers()[i];
    let means = radii
        .iter()
        .map(|&rho| out.spherical_mean(&center, rho, &rule))
        .collect::<Result<Vec<_>>>()?;
    let scale = radii[0];
    let design = DMatrix::from_fn(radii.len(), 3, |row, col| {
        let x = radii[row] / scale;
        match col {
            0 => 1.0 / x,
            1 => 1.0,
            _ => x,
        }
    });
    let b = DVector::from_column_slice(&means);
    let svd = design.clone().svd(true, true);
    let coeffs = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::domain("boundary_probe", e.to_string()))?;
    let fitted = &design * &coeffs;
    let magnitude = means.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let residual = (fitted - b).amax() / magnitude;
    if residual > FIT_TOLERANCE {
        return Err(Error::FitResidual {
            residual,
            tolerance: FIT_TOLERANCE,
        });
    }
    Ok(BoundaryFit {
        singular: coeffs[0] * scale,
        regular: coeffs[1],
        linear: coeffs[2] / scale,
        residual,
    })
}

/// One probe point of the first resolvent identity
/// `R(λ) - R(λ') = (λ' - λ) R(λ) R(λ')`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentitySample {
    pub point: Vec3,
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentitySample {
    pub fn relative_error(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.lhs.abs().max(self.rhs.abs()).max(f64::MIN_POSITIVE)
    }
}

/// Samples both sides of the first resolvent identity on `f` at `probes`.
///
/// `R(λ)R(λ')f` is evaluated as `R(λ)` applied to `ψ' = w_{λ'} + Σⱼ g^{λ'}_j q'ⱼ`.
/// Its free part at the centers uses the free resolvent identity for
/// `w_{λ'}` and a radial shell quadrature for each `g^{λ'}_j`; its charges
/// come from a fresh solve of the boundary system at `λ`.
pub fn resolvent_identity_samples(
    config: &CenterConfig,
    lambda: f64,
    lambda_prime: f64,
    f: &dyn Source,
    probes: &[Vec3],
    quad: &QuadSpec,
) -> Result<Vec<IdentitySample>> {
    if lambda == lambda_prime {
        return Err(Error::domain("resolvent_identity_samples", "need two distinct spectral parameters"));
    }
    let out = resolvent_apply(config, lambda, f, quad)?;
    let out_p = resolvent_apply(config, lambda_prime, f, quad)?;
    let (s, sp) = (lambda.sqrt(), lambda_prime.sqrt());
    let gap = lambda_prime - lambda;
    let n = config.len();

    // [R₀(λ) g^{λ'}(· - xⱼ)](p) by shells about p
    let free_of_yukawa = |p: &Vec3, xj: &Vec3| -> Result<f64> {
        let a = (p - xj).norm();
        let breaks: Vec<f64> = if a > 0.0 { vec![0.0, a, a + 10.0] } else { vec![0.0, 10.0] };
        radial_integral(|r| r * (-s * r).exp() * yukawa_spherical_mean(sp, a, r), &breaks, quad)
    };

    let mut inner_rhs = Vec::with_capacity(n);
    for i in 0..n {
        let xi = config.centers()[i];
        let mut v = (out.rhs[i] - out_p.rhs[i]) / gap;
        for j in 0..n {
            v += out_p.charges[j] * free_of_yukawa(&xi, &config.centers()[j])?;
        }
        inner_rhs.push(v);
    }
    let inner_charges = if n == 0 {
        Vec::new()
    } else {
        solve_charges(&boundary_matrix(config, lambda)?, &inner_rhs)?
    };

    probes
        .iter()
        .map(|p| {
            let w = out.smooth_part(p)?;
            let wp = out_p.smooth_part(p)?;
            let lhs = (w + out.singular_part(p)?) - (wp + out_p.singular_part(p)?);
            let mut composite = (w - wp) / gap;
            for ((xj, qp), qi) in config.centers().iter().zip(&out_p.charges).zip(&inner_charges) {
                let r = (p - xj).norm();
                composite += qp * free_of_yukawa(p, xj)?;
                composite += qi * (-s * r).exp() / r;
            }
            Ok(IdentitySample {
                point: *p,
                lhs,
                rhs: gap * composite,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::ThetaProfile;
    use crate::pointop::{GaussianSource, ZeroSource};

    fn quad() -> QuadSpec {
        QuadSpec::default()
    }

    fn pair() -> CenterConfig {
        CenterConfig::pair(-1.0, -0.5, 1.0, ThetaProfile::indicator(2.0).unwrap()).unwrap()
    }

    #[test]
    fn field_solves_the_free_equation_off_the_centers() {
        let f = GaussianSource::unit(Vec3::new(0.2, 0.1, 0.0));
        let config = pair();
        let lambda = 2.0;
        let out = resolvent_apply(&config, lambda, &f, &quad()).unwrap();
        let h = 1e-2;
        for p in [Vec3::new(0.5, 0.6, -0.3), Vec3::new(-0.8, 0.2, 0.4), Vec3::new(1.7, -0.5, 0.2)] {
            let centre = out.field(&p).unwrap();
            let mut lap = -6.0 * centre;
            for axis in 0..3 {
                let mut e = Vec3::zeros();
                e[axis] = h;
                lap += out.field(&(p + e)).unwrap() + out.field(&(p - e)).unwrap();
            }
            let lhs = -lap / (h * h) + lambda * centre;
            let rhs = f.eval(&p);
            assert!((lhs - rhs).abs() < 1e-3 * (rhs.abs() + lambda * centre.abs()), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn empty_configuration_is_free_resolvent() {
        let f = GaussianSource::unit(Vec3::zeros());
        let config = CenterConfig::new(Vec::new(), Vec::new(), ThetaProfile::local_zero()).unwrap();
        let out = resolvent_apply(&config, 1.0, &f, &quad()).unwrap();
        assert!(out.charges.is_empty());
        let x = Vec3::new(0.3, 0.0, 0.0);
        assert_eq!(out.field(&x).unwrap(), free_resolvent_apply(&f, 1.0, &x, &quad()).unwrap());
    }

    #[test]
    fn free_resolvent_at_zero_energy_limit() {
        // ∫ r e^{-r²/2} dr = 1 at the Gaussian's center
        let f = GaussianSource::unit(Vec3::zeros());
        let v = free_resolvent_apply(&f, 1e-16, &Vec3::zeros(), &quad()).unwrap();
        assert!((v - 1.0).abs() < 1e-7);
    }

    #[test]
    fn large_lambda_is_multiplication_by_inverse() {
        let f = GaussianSource::unit(Vec3::zeros());
        let x = Vec3::new(0.4, 0.0, 0.0);
        let w = free_resolvent_apply(&f, 100.0, &x, &quad()).unwrap();
        let leading = f.eval(&x) / 100.0;
        assert!((w - leading).abs() < 0.05 * leading);
    }

    #[test]
    fn single_center_charge_closed_form() {
        let f = GaussianSource::unit(Vec3::new(0.5, 0.0, 0.0));
        let config = CenterConfig::single(0.7, ThetaProfile::local_zero());
        let out = resolvent_apply(&config, 3.0, &f, &quad()).unwrap();
        let expected = out.rhs[0] / (0.7 + 3f64.sqrt());
        assert!((out.charges[0] - expected).abs() < 1e-14);
        assert!(out.singular_part(&Vec3::zeros()).is_err());
    }

    #[test]
    fn probe_recovers_synthetic_charge() {
        let zero = ZeroSource;
        let config = CenterConfig::single(0.0, ThetaProfile::local_zero());
        let out = ResolventOutput::from_parts(vec![Vec3::zeros()], vec![0.8], 1.0, &zero, quad());
        let fit = boundary_probe(&out, &config, 0, &default_probe_radii(&config)).unwrap();
        assert!((fit.singular - 0.8).abs() < 1e-8);
        // q e^{-r}/r = q/r - q + ...
        assert!((fit.regular + 0.8).abs() < 1e-4);
    }

    #[test]
    fn probe_rejects_bad_radii() {
        let zero = ZeroSource;
        let config = pair();
        let out = ResolventOutput::from_parts(config.centers().to_vec(), vec![1.0, 1.0], 1.0, &zero, quad());
        assert!(boundary_probe(&out, &config, 0, &[0.6, 0.1, 0.01]).is_err());
        assert!(boundary_probe(&out, &config, 0, &[0.01, 0.02, 0.03]).is_err());
        assert!(boundary_probe(&out, &config, 2, &[0.03, 0.02, 0.01]).is_err());
    }

    #[test]
    fn resolvent_identity_on_two_centers() {
        let f = GaussianSource::unit(Vec3::new(0.3, -0.2, 0.1));
        let probes = [Vec3::new(0.4, 0.5, 0.0), Vec3::new(-1.0, 0.3, 0.7)];
        let samples = resolvent_identity_samples(&pair(), 2.0, 3.5, &f, &probes, &quad()).unwrap();
        for s in samples {
            assert!(s.relative_error() < 1e-8, "{s:?}");
        }
    }
}
