//! Sampling the boundary form `⟨ξ, (B + Ξ^λ)ξ⟩` for two heavy centers and
//! one light particle with separable Gaussian charges.
//!
//! Each charge lives on a coincidence plane and depends on two points of
//! ℝ³: the slot `z` where the light particle meets its heavy partner and the
//! slot `y` of the other heavy particle, with momenta `p` and `P`.

use std::f64::consts::PI;

use nalgebra::{Cholesky, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{MassModel, ThetaProfile};
use crate::quadrature::{integrate_quadrant, integrate_to_infinity, integrate_with_breaks, QuadSpec};

/// `ξ̂(p, P) = a · exp(-p²/(2σ_p²)) · exp(-P²/(2σ_P²))`, centered in both
/// slots. In position space (unitary Fourier transform)
/// `ξ(z, y) = a σ_p³ σ_P³ exp(-σ_p² z²/2) exp(-σ_P² y²/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianCharge {
    pub amplitude: f64,
    pub width_p: f64,
    pub width_big_p: f64,
}

impl GaussianCharge {
    pub fn new(amplitude: f64, width_p: f64, width_big_p: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::domain("GaussianCharge", "amplitude must be finite"));
        }
        if !(width_p > 0.0 && width_big_p > 0.0 && width_p.is_finite() && width_big_p.is_finite()) {
            return Err(Error::domain("GaussianCharge", "widths must be positive"));
        }
        Ok(GaussianCharge {
            amplitude,
            width_p,
            width_big_p,
        })
    }

    /// Unit amplitude and unit widths.
    pub fn unit() -> Self {
        GaussianCharge {
            amplitude: 1.0,
            width_p: 1.0,
            width_big_p: 1.0,
        }
    }

    pub fn momentum(&self, p2: f64, big_p2: f64) -> f64 {
        let (sp, sbp) = (self.width_p, self.width_big_p);
        self.amplitude * (-0.5 * p2 / (sp * sp) - 0.5 * big_p2 / (sbp * sbp)).exp()
    }

    /// `ξ(z, y)` as a function of `|z|²` and `|y|²`.
    pub fn position(&self, z2: f64, y2: f64) -> f64 {
        let (sp, sbp) = (self.width_p, self.width_big_p);
        self.position_prefactor() * (-0.5 * sp * sp * z2 - 0.5 * sbp * sbp * y2).exp()
    }

    fn position_prefactor(&self) -> f64 {
        self.amplitude * (self.width_p * self.width_big_p).powi(3)
    }

    /// `‖ξ̂‖² = a² π³ σ_p³ σ_P³`.
    pub fn norm_sq_momentum(&self) -> f64 {
        self.amplitude * self.amplitude * PI.powi(3) * (self.width_p * self.width_big_p).powi(3)
    }

    /// `‖ξ‖²` from the position-space Gaussian integrals.
    pub fn norm_sq_position(&self) -> f64 {
        let c = self.position_prefactor();
        let (sp, sbp) = (self.width_p, self.width_big_p);
        c * c * (PI / (sp * sp)).powf(1.5) * (PI / (sbp * sbp)).powf(1.5)
    }
}

/// `⟨ξ, (B + Ξ^λ)ξ⟩` with its four pieces; `value` is their sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FormEstimate {
    pub value: f64,
    pub stderr: f64,
    pub sample_count: u64,
    pub diagonal: f64,
    pub offdiagonal: f64,
    pub b_alpha: f64,
    pub b_theta: f64,
}

/// `∫ √(ηp²/(1+η)² + ηP²/(1+η) + 2mλ/(1+η)) |ξ̂(p, P)|² dp dP`.
pub fn xi_diagonal_term(charge: &GaussianCharge, model: &MassModel, lambda: f64, quad: &QuadSpec) -> Result<f64> {
    check_lambda("xi_diagonal_term", lambda)?;
    let eta = model.eta;
    let (sp, sbp) = (charge.width_p, charge.width_big_p);
    let a2 = charge.amplitude * charge.amplitude;
    let shell = 16.0 * PI * PI;
    // p = σ_p u, P = σ_P v
    let jac = (sp * sbp).powi(3);
    let est = integrate_quadrant(
        |u, v| {
            let (p2, bp2) = (sp * sp * u * u, sbp * sbp * v * v);
            let sym = (eta * p2 / ((1.0 + eta) * (1.0 + eta)) + eta * bp2 / (1.0 + eta)
                + 2.0 * model.m_light * lambda / (1.0 + eta))
                .sqrt();
            shell * u * u * v * v * sym * (-(u * u + v * v)).exp()
        },
        quad,
    )?;
    Ok(a2 * jac * est.value)
}

/// Exact 9-dimensional Gaussian `exp(-vᵀ(Q₃⊗I₃)v/2)` formed by
/// `ξ̂ᵢ(p, p₂) ξ̂ⱼ(p - p₁ + p₂, p₁)` in `v = (p, p₁, p₂)`.
fn pair_precision(ci: &GaussianCharge, cj: &GaussianCharge) -> Matrix3<f64> {
    let a = 1.0 / (ci.width_p * ci.width_p);
    let b = 1.0 / (ci.width_big_p * ci.width_big_p);
    let c = 1.0 / (cj.width_p * cj.width_p);
    let d = 1.0 / (cj.width_big_p * cj.width_big_p);
    Matrix3::new(a + c, -c, c, -c, c + d, -c, c, -c, b + c)
}

const MC_BATCHES: u64 = 64;

/// Monte Carlo estimate of the off-diagonal summand
/// `-((1+η)/2π²) ∫ ξ̂ᵢ(p, p₂) ξ̂ⱼ(p - p₁ + p₂, p₁) / (|p₁ - p|² + η(p₁² + p₂²) + 2mλ) dp dp₁ dp₂`.
///
/// Points are drawn from the normalized product of the two Gaussian
/// factors, so the weight is the bounded kernel alone. Samples are split
/// into 64 batches; batch `k` uses ChaCha20 seeded from `seed` on stream
/// `stream_offset + k`, batches run in parallel, and the batch means are
/// combined by pairwise summation in batch order. Returns
/// `(value, stderr)` with the standard error from the spread of batch means.
pub fn xi_offdiagonal_mc(
    charge_i: &GaussianCharge,
    charge_j: &GaussianCharge,
    model: &MassModel,
    lambda: f64,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    offdiagonal_streams(charge_i, charge_j, model, lambda, samples, seed, 0)
}

fn offdiagonal_streams(
    charge_i: &GaussianCharge,
    charge_j: &GaussianCharge,
    model: &MassModel,
    lambda: f64,
    samples: u64,
    seed: u64,
    stream_offset: u64,
) -> Result<(f64, f64)> {
    check_lambda("xi_offdiagonal_mc", lambda)?;
    if samples < MC_BATCHES * 2 {
        return Err(Error::domain("xi_offdiagonal_mc", "too few samples"));
    }
    let q = pair_precision(charge_i, charge_j);
    let det = q.determinant();
    let cov = q
        .try_inverse()
        .ok_or_else(|| Error::domain("xi_offdiagonal_mc", "degenerate Gaussian"))?;
    let l = Cholesky::new(cov)
        .ok_or_else(|| Error::domain("xi_offdiagonal_mc", "degenerate Gaussian"))?
        .l();
    let eta = model.eta;
    let shift = 2.0 * model.m_light * lambda;
    let mass = (2.0 * PI).powf(4.5) / det.powf(1.5);
    let prefactor = -(1.0 + eta) / (2.0 * PI * PI) * charge_i.amplitude * charge_j.amplitude * mass;

    let base = samples / MC_BATCHES;
    let extra = samples % MC_BATCHES;
    let means: Vec<f64> = (0..MC_BATCHES)
        .into_par_iter()
        .map(|k| {
            let n = base + u64::from(k < extra);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(stream_offset + k);
            let mut acc = Vec::with_capacity(n as usize);
            for _ in 0..n {
                let mut d2 = 0.0;
                let mut h2 = 0.0;
                for _axis in 0..3 {
                    let z = nalgebra::Vector3::new(
                        rng.sample::<f64, _>(StandardNormal),
                        rng.sample::<f64, _>(StandardNormal),
                        rng.sample::<f64, _>(StandardNormal),
                    );
                    let v = l * z;
                    let (p, p1, p2) = (v[0], v[1], v[2]);
                    d2 += (p1 - p) * (p1 - p);
                    h2 += p1 * p1 + p2 * p2;
                }
                acc.push(1.0 / (d2 + eta * h2 + shift));
            }
            pairwise_sum(&acc) / n as f64
        })
        .collect();
    let nb = means.len() as f64;
    let mean = pairwise_sum(&means) / nb;
    let var = pairwise_sum(&means.iter().map(|m| (m - mean) * (m - mean)).collect::<Vec<_>>()) / (nb - 1.0);
    Ok((prefactor * mean, prefactor.abs() * (var / nb).sqrt()))
}

/// Summation by recursive halving; the result depends only on the order
/// of `values`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// `Σᵢ αᵢ‖ξᵢ‖² + γ Σᵢ ∫ ξᵢ(z, y) θ(|y - z|)/|y - z| ξⱼ(z, y) dz dy`, with the
/// partner charge read in the same slots.
///
/// Returns `(α part, θ part)`. The Gaussian integral over `z` at fixed
/// `u = y - z` is done in closed form, leaving one radial integral in `u`.
pub fn b_form_term(
    charge_i: &GaussianCharge,
    charge_j: &GaussianCharge,
    alphas: (f64, f64),
    gamma: f64,
    profile: &ThetaProfile,
    quad: &QuadSpec,
) -> Result<(f64, f64)> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::domain("b_form_term", "gamma must be nonnegative"));
    }
    let alpha_part = alphas.0 * charge_i.norm_sq_momentum() + alphas.1 * charge_j.norm_sq_momentum();
    if gamma == 0.0 {
        return Ok((alpha_part, 0.0));
    }
    // ξᵢξⱼ = c exp(-z²/(2a)) exp(-y²/(2b))
    let a = 1.0 / (charge_i.width_p.powi(2) + charge_j.width_p.powi(2));
    let b = 1.0 / (charge_i.width_big_p.powi(2) + charge_j.width_big_p.powi(2));
    let c = charge_i.position_prefactor() * charge_j.position_prefactor();
    let marginal = (2.0 * PI * a * b / (a + b)).powf(1.5);
    let spread = 2.0 * (a + b);
    let radial = |u: f64| 4.0 * PI * u * profile.value(u) * (-u * u / spread).exp();
    let reach = spread.sqrt() * 9.0;
    let overlap = match profile.support_radius() {
        Some(s) if s <= 0.0 => 0.0,
        Some(s) if s < reach => integrate_with_breaks(&radial, &[0.0, s], quad)?.value,
        _ => {
            integrate_with_breaks(&radial, &[0.0, reach], quad)?.value + integrate_to_infinity(radial, reach, quad)?.value
        }
    };
    // both i = 1 and i = 2 contribute the same pairing
    Ok((alpha_part, 2.0 * gamma * c * marginal * overlap))
}

/// All four pieces of the form for the charge pair.
#[allow(clippy::too_many_arguments)]
pub fn phi_form_estimate(
    charges: (&GaussianCharge, &GaussianCharge),
    alphas: (f64, f64),
    gamma: f64,
    profile: &ThetaProfile,
    model: &MassModel,
    lambda: f64,
    samples: u64,
    seed: u64,
    quad: &QuadSpec,
) -> Result<FormEstimate> {
    let (c1, c2) = charges;
    let diagonal = xi_diagonal_term(c1, model, lambda, quad)? + xi_diagonal_term(c2, model, lambda, quad)?;
    let (o12, e12) = offdiagonal_streams(c1, c2, model, lambda, samples, seed, 0)?;
    let (o21, e21) = offdiagonal_streams(c2, c1, model, lambda, samples, seed, MC_BATCHES)?;
    let (b_alpha, b_theta) = b_form_term(c1, c2, alphas, gamma, profile, quad)?;
    let offdiagonal = o12 + o21;
    Ok(FormEstimate {
        value: diagonal + offdiagonal + b_alpha + b_theta,
        stderr: e12.hypot(e21),
        sample_count: 2 * samples,
        diagonal,
        offdiagonal,
        b_alpha,
        b_theta,
    })
}

/// Random charge: amplitude of either sign with modulus in `[0.5, 1.5)`,
/// widths in `[0.5, 2)`.
pub fn random_charge<R: Rng>(rng: &mut R) -> GaussianCharge {
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    GaussianCharge {
        amplitude: sign * rng.random_range(0.5..1.5),
        width_p: rng.random_range(0.5..2.0),
        width_big_p: rng.random_range(0.5..2.0),
    }
}

fn check_lambda(op: &'static str, lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(op, format!("lambda = {lambda} must be positive")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_quadrant;

    fn quad() -> QuadSpec {
        QuadSpec::default()
    }

    #[test]
    fn plancherel() {
        let c = GaussianCharge::new(0.7, 1.3, 0.6).unwrap();
        let closed = c.norm_sq_momentum();
        assert!((c.norm_sq_position() - closed).abs() < 1e-12 * closed);
        let numeric = integrate_quadrant(
            |z, y| 16.0 * PI * PI * z * z * y * y * c.position(z * z, y * y).powi(2),
            &quad(),
        )
        .unwrap()
        .value;
        assert!((numeric - closed).abs() < 1e-10 * closed);
    }

    #[test]
    fn diagonal_bounds_and_scaling() {
        let c = GaussianCharge::unit();
        let model = MassModel::new(1.0).unwrap();
        let d = xi_diagonal_term(&c, &model, 4.0, &quad()).unwrap();
        let floor = (2.0 * 0.5 * 4.0 / 2.0f64).sqrt() * c.norm_sq_momentum();
        assert!(d >= floor);
        let big = GaussianCharge { amplitude: 2.0, ..c };
        let d2 = xi_diagonal_term(&big, &model, 4.0, &quad()).unwrap();
        assert!((d2 - 4.0 * d).abs() < 1e-12 * d2);
        let frozen = MassModel::new(1e-14).unwrap();
        let d0 = xi_diagonal_term(&c, &frozen, 4.0, &quad()).unwrap();
        assert!((d0 - 2.0 * c.norm_sq_momentum()).abs() < 1e-6 * d0);
    }

    #[test]
    fn offdiagonal_is_deterministic_and_negative() {
        let c = GaussianCharge::unit();
        let model = MassModel::new(1.0).unwrap();
        let a = xi_offdiagonal_mc(&c, &c, &model, 1.0, 20_000, 7).unwrap();
        let b = xi_offdiagonal_mc(&c, &c, &model, 1.0, 20_000, 7).unwrap();
        assert_eq!(a.0.to_bits(), b.0.to_bits());
        assert_eq!(a.1.to_bits(), b.1.to_bits());
        assert!(a.0 < 0.0 && a.1 > 0.0);
        let far = xi_offdiagonal_mc(&c, &c, &model, 100.0, 20_000, 7).unwrap();
        assert!(far.0.abs() < a.0.abs());
    }

    #[test]
    fn b_term_pieces() {
        let c1 = GaussianCharge::new(1.0, 1.0, 0.8).unwrap();
        let c2 = GaussianCharge::new(0.5, 1.2, 1.0).unwrap();
        let ind = ThetaProfile::indicator(1.0).unwrap();
        let (a, t) = b_form_term(&c1, &c2, (2.0, -1.0), 0.0, &ind, &quad()).unwrap();
        assert_eq!(a, 2.0 * c1.norm_sq_momentum() - c2.norm_sq_momentum());
        assert_eq!(t, 0.0);
        let (_, t1) = b_form_term(&c1, &c2, (0.0, 0.0), 1.0, &ind, &quad()).unwrap();
        let (_, t2) = b_form_term(&c1, &c2, (0.0, 0.0), 2.0, &ind, &quad()).unwrap();
        assert!(t1 > 0.0);
        assert_eq!(t2, 2.0 * t1);
        let tiny = ThetaProfile::indicator(1e-4).unwrap();
        let (_, t0) = b_form_term(&c1, &c2, (0.0, 0.0), 1.0, &tiny, &quad()).unwrap();
        assert!(t0 < 1e-6 * t1);
    }

    #[test]
    fn offdiagonal_swap_symmetry_and_error_scaling() {
        let c1 = GaussianCharge::new(1.0, 0.8, 1.4).unwrap();
        let c2 = GaussianCharge::new(-0.6, 1.5, 0.7).unwrap();
        let model = MassModel::new(0.5).unwrap();
        let (a, ea) = xi_offdiagonal_mc(&c1, &c2, &model, 2.0, 200_000, 3).unwrap();
        let (b, eb) = xi_offdiagonal_mc(&c2, &c1, &model, 2.0, 200_000, 4).unwrap();
        assert!((a - b).abs() <= 3.0 * ea.hypot(eb), "{a} vs {b}");
        let (_, small) = xi_offdiagonal_mc(&c1, &c2, &model, 2.0, 12_800, 3).unwrap();
        let ratio = small / ea;
        // 16x the samples should shrink the error about 4x
        assert!((2.5..6.5).contains(&ratio), "{ratio}");
    }
}
