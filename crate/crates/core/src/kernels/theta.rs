use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the regularizing function θ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaKind {
    /// `θ(r) = e^{-r/b}`.
    Exponential,
    /// `θ(r) = 1` for `r < b`, else `0`.
    Indicator,
    /// `θ(r) = exp(-s²/(1-s²))` with `s = r/(2b)`, zero for `r ≥ 2b`.
    ///
    /// C^∞, `θ = 1 - r²/(4b²) + O(r⁴)` at the origin so `θ'(0) = 0`. The
    /// support is `[0, 2b]` rather than `[0, b]`: a flat bump vanishing at
    /// `b` would drop below `1 - r/b` near the edge of its support.
    SmoothBump,
    /// `θ ≡ 0`: the classical local point interaction.
    LocalZero,
}

/// Regularizing function θ on `(0, ∞)` with its range parameter `b`.
///
/// Every kind except [`ThetaKind::LocalZero`] satisfies
/// `1 - r/b ≤ θ(r) ≤ 1 + r/b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaProfile {
    pub kind: ThetaKind,
    #[serde(default = "unit_range")]
    pub b: f64,
}

fn unit_range() -> f64 {
    1.0
}

impl ThetaProfile {
    pub fn new(kind: ThetaKind, b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::domain("ThetaProfile::new", format!("range b = {b} must be positive")));
        }
        Ok(ThetaProfile { kind, b })
    }

    pub fn exponential(b: f64) -> Result<Self> {
        Self::new(ThetaKind::Exponential, b)
    }

    pub fn indicator(b: f64) -> Result<Self> {
        Self::new(ThetaKind::Indicator, b)
    }

    pub fn smooth_bump(b: f64) -> Result<Self> {
        Self::new(ThetaKind::SmoothBump, b)
    }

    pub fn local_zero() -> Self {
        ThetaProfile {
            kind: ThetaKind::LocalZero,
            b: 1.0,
        }
    }

    /// `θ ≡ 1`: the exponential with infinite range.
    pub fn constant_one() -> Self {
        ThetaProfile {
            kind: ThetaKind::Exponential,
            b: f64::INFINITY,
        }
    }

    /// θ′(0⁺) in inverse length units.
    pub fn derivative_at_zero(&self) -> f64 {
        match self.kind {
            ThetaKind::Exponential => -1.0 / self.b,
            ThetaKind::Indicator | ThetaKind::SmoothBump | ThetaKind::LocalZero => 0.0,
        }
    }

    /// Radius beyond which θ vanishes, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match self.kind {
            ThetaKind::Exponential => None,
            ThetaKind::Indicator => Some(self.b),
            ThetaKind::SmoothBump => Some(2.0 * self.b),
            ThetaKind::LocalZero => Some(0.0),
        }
    }

    /// θ(r) for `r > 0`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain("theta_eval", format!("r = {r} must be positive")));
        }
        Ok(self.value(r))
    }

    /// Unchecked θ(r); callers guarantee `r > 0`.
    pub(crate) fn value(&self, r: f64) -> f64 {
        match self.kind {
            ThetaKind::Exponential => (-r / self.b).exp(),
            ThetaKind::Indicator => {
                if r < self.b {
                    1.0
                } else {
                    0.0
                }
            }
            ThetaKind::SmoothBump => {
                let s = r / (2.0 * self.b);
                if s >= 1.0 {
                    0.0
                } else {
                    let s2 = s * s;
                    (-s2 / (1.0 - s2)).exp()
                }
            }
            ThetaKind::LocalZero => 0.0,
        }
    }

    /// `(θ(r) - 1)/r`, evaluated without cancellation for small `r`.
    pub(crate) fn deficit_over_r(&self, r: f64) -> f64 {
        match self.kind {
            ThetaKind::Exponential => (-r / self.b).exp_m1() / r,
            ThetaKind::SmoothBump => {
                let s = r / (2.0 * self.b);
                if s >= 1.0 {
                    -1.0 / r
                } else {
                    let s2 = s * s;
                    (-s2 / (1.0 - s2)).exp_m1() / r
                }
            }
            _ => (self.value(r) - 1.0) / r,
        }
    }
}

/// θ(r) with the domain check; free-function form of [`ThetaProfile::eval`].
pub fn theta_eval(profile: &ThetaProfile, r: f64) -> Result<f64> {
    profile.eval(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(b: f64) -> impl Iterator<Item = f64> {
        // 10³ points on (0, 3b]
        (1..=1000).map(move |k| 3.0 * b * k as f64 / 1000.0)
    }

    #[test]
    fn examples() {
        assert_eq!(ThetaProfile::indicator(2.0).unwrap().eval(1.0).unwrap(), 1.0);
        let e = ThetaProfile::exponential(1.0).unwrap().eval(1.0).unwrap();
        assert!((e - 0.3678794).abs() < 5e-8);
        assert_eq!(ThetaProfile::local_zero().eval(0.3).unwrap(), 0.0);
    }

    #[test]
    fn admissibility_bounds_on_grid() {
        for kind in [ThetaKind::Exponential, ThetaKind::Indicator, ThetaKind::SmoothBump] {
            for b in [0.1, 1.0, 7.5] {
                let p = ThetaProfile::new(kind, b).unwrap();
                for r in grid(b) {
                    let t = p.eval(r).unwrap();
                    let slack = 1e-12 * (1.0 + r / b);
                    assert!(t >= 1.0 - r / b - slack, "{kind:?} b={b} r={r} θ={t}");
                    assert!(t <= 1.0 + r / b + slack, "{kind:?} b={b} r={r} θ={t}");
                }
            }
        }
    }

    #[test]
    fn smooth_bump_shape() {
        let p = ThetaProfile::smooth_bump(1.0).unwrap();
        for r in (1..1000).map(|k| k as f64 / 1000.0) {
            let t = p.eval(r).unwrap();
            assert!(t >= 1.0 - r && t <= 1.0 + r);
        }
        assert_eq!(p.eval(2.0).unwrap(), 0.0);
        assert_eq!(p.eval(5.0).unwrap(), 0.0);
        // 1 + O(r²) at the origin
        let r = 1e-3;
        assert!(((1.0 - p.eval(r).unwrap()) / (r * r) - 0.25).abs() < 1e-3);
        assert_eq!(p.derivative_at_zero(), 0.0);
        assert!((p.deficit_over_r(r) + r / 4.0).abs() < 1e-9);
    }

    #[test]
    fn tends_to_one_at_origin() {
        for kind in [ThetaKind::Exponential, ThetaKind::Indicator, ThetaKind::SmoothBump] {
            let p = ThetaProfile::new(kind, 0.5).unwrap();
            assert!((p.eval(1e-9).unwrap() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_nonpositive_radius() {
        let p = ThetaProfile::indicator(1.0).unwrap();
        assert!(p.eval(0.0).is_err());
        assert!(p.eval(-1.0).is_err());
        assert!(ThetaProfile::indicator(0.0).is_err());
    }
}
