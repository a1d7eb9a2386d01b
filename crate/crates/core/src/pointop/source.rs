use crate::quadrature::SphereRule;
use crate::Vec3;

/// A deterministic real source `f` on ℝ³ for the resolvent.
///
/// Implementors supply pointwise values; the spherical mean has a numerical
/// default and may be overridden with a closed form.
pub trait Source: Sync {
    fn eval(&self, x: &Vec3) -> f64;

    /// Mean of `f` over the sphere of radius `r` about `center`.
    fn spherical_mean(&self, center: &Vec3, r: f64) -> f64 {
        if r == 0.0 {
            return self.eval(center);
        }
        SHARED_RULE.with(|rule| rule.average(|d| self.eval(&(center + r * d))))
    }

    /// Radial breakpoints (distances from `x`) where the radial integrand of
    /// the free resolvent at `x` changes character; the last one is where
    /// the semi-infinite tail starts.
    fn radial_breaks(&self, x: &Vec3) -> Vec<f64> {
        let _ = x;
        vec![0.0, 1.0, 8.0]
    }

    /// `sup |f|`, when known.
    fn sup_norm(&self) -> Option<f64> {
        None
    }
}

thread_local! {
    static SHARED_RULE: SphereRule = SphereRule::default();
}

/// `f ≡ 0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroSource;

impl Source for ZeroSource {
    fn eval(&self, _: &Vec3) -> f64 {
        0.0
    }

    fn spherical_mean(&self, _: &Vec3, _: f64) -> f64 {
        0.0
    }

    fn sup_norm(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// `f(y) = A exp(-|y - c|²/(2σ²))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianSource {
    pub amplitude: f64,
    pub center: Vec3,
    pub width: f64,
}

impl GaussianSource {
    pub fn new(amplitude: f64, center: Vec3, width: f64) -> Self {
        GaussianSource {
            amplitude,
            center,
            width,
        }
    }

    /// Unit-amplitude, unit-width Gaussian at `center`.
    pub fn unit(center: Vec3) -> Self {
        Self::new(1.0, center, 1.0)
    }
}

impl Source for GaussianSource {
    fn eval(&self, x: &Vec3) -> f64 {
        let s2 = self.width * self.width;
        self.amplitude * (-(x - self.center).norm_squared() / (2.0 * s2)).exp()
    }

    // Closed-form angular average:
    // A e^{-(r-d)²/2σ²} (1 - e^{-2rd/σ²}) / (2rd/σ²).
    fn spherical_mean(&self, center: &Vec3, r: f64) -> f64 {
        let s2 = self.width * self.width;
        let d = (center - self.center).norm();
        let t = 2.0 * r * d / s2;
        let shape = if t < 1e-8 { 1.0 - 0.5 * t } else { -(-t).exp_m1() / t };
        self.amplitude * (-(r - d) * (r - d) / (2.0 * s2)).exp() * shape
    }

    fn radial_breaks(&self, x: &Vec3) -> Vec<f64> {
        let d = (x - self.center).norm();
        let w = self.width;
        let mut breaks = vec![0.0];
        if d > 4.0 * w {
            breaks.push(d - 4.0 * w);
        }
        if d > 0.0 {
            breaks.push(d);
        }
        breaks.push(d + 9.0 * w);
        breaks
    }

    fn sup_norm(&self) -> Option<f64> {
        Some(self.amplitude.abs())
    }
}

/// Wraps a closure as a [`Source`] with the numerical spherical mean.
pub struct FnSource<F>(pub F);

impl<F: Fn(&Vec3) -> f64 + Sync> Source for FnSource<F> {
    fn eval(&self, x: &Vec3) -> f64 {
        (self.0)(x)
    }
}
