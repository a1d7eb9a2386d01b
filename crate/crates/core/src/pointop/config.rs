use crate::error::{Error, Result};
use crate::kernels::ThetaProfile;
use crate::Vec3;

/// Fixed centers `xᵢ ∈ ℝ³` with strengths `αᵢ` (inverse length) and the
/// regularizing profile θ. Units: `ħ = 1`, light kinetic energy `-Δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CenterConfig {
    centers: Vec<Vec3>,
    strengths: Vec<f64>,
    profile: ThetaProfile,
}

impl CenterConfig {
    /// An empty center list is accepted and describes the free operator.
    pub fn new(centers: Vec<Vec3>, strengths: Vec<f64>, profile: ThetaProfile) -> Result<Self> {
        if centers.len() != strengths.len() {
            return Err(Error::domain("CenterConfig::new", "one strength per center"));
        }
        if strengths.iter().any(|a| !a.is_finite()) || centers.iter().any(|c| !c.iter().all(|v| v.is_finite())) {
            return Err(Error::domain("CenterConfig::new", "non-finite input"));
        }
        for (i, ci) in centers.iter().enumerate() {
            for (j, cj) in centers.iter().enumerate().skip(i + 1) {
                if (ci - cj).norm() == 0.0 {
                    return Err(Error::domain("CenterConfig::new", format!("centers {i} and {j} coincide")));
                }
            }
        }
        Ok(CenterConfig {
            centers,
            strengths,
            profile,
        })
    }

    /// Two centers on the x axis, the first at the origin.
    pub fn pair(alpha1: f64, alpha2: f64, separation: f64, profile: ThetaProfile) -> Result<Self> {
        Self::new(
            vec![Vec3::zeros(), Vec3::new(separation, 0.0, 0.0)],
            vec![alpha1, alpha2],
            profile,
        )
    }

    pub fn single(alpha: f64, profile: ThetaProfile) -> Self {
        CenterConfig {
            centers: vec![Vec3::zeros()],
            strengths: vec![alpha],
            profile,
        }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[Vec3] {
        &self.centers
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strengths
    }

    pub fn profile(&self) -> &ThetaProfile {
        &self.profile
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        (self.centers[i] - self.centers[j]).norm()
    }

    pub fn min_separation(&self) -> Option<f64> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.distance(i, j))
            .min_by(f64::total_cmp)
    }

    /// Applies `x ↦ R x + t` to every center.
    pub fn transformed(&self, rotation: &nalgebra::Rotation3<f64>, shift: &Vec3) -> Self {
        CenterConfig {
            centers: self.centers.iter().map(|c| rotation * c + shift).collect(),
            strengths: self.strengths.clone(),
            profile: self.profile,
        }
    }
}
