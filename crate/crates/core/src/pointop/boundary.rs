use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::config::CenterConfig;
use crate::error::{Error, Result};
use crate::kernels::delta_sqrt;

/// Condition numbers above this are reported as [`Error::IllConditioned`].
pub const CONDITION_CAP: f64 = 1e12;

/// `M(λ)` with `Mᵢᵢ = αᵢ + √λ` and `Mᵢⱼ = δ_{λ,θ}(|xᵢ - xⱼ|)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMatrix {
    pub lambda: f64,
    pub entries: DMatrix<f64>,
}

impl BoundaryMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.entries.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Boundary matrix at `√λ = s ≥ 0`; `s = 0` is the threshold limit.
pub(crate) fn boundary_matrix_sqrt(config: &CenterConfig, s: f64) -> DMatrix<f64> {
    let n = config.len();
    let profile = config.profile();
    let alphas = config.strengths();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = alphas[i] + s;
        for j in i + 1..n {
            let d = delta_sqrt(profile, config.distance(i, j), s);
            m[(i, j)] = d;
            m[(j, i)] = d;
        }
    }
    m
}

pub fn boundary_matrix(config: &CenterConfig, lambda: f64) -> Result<BoundaryMatrix> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain("boundary_matrix", format!("lambda = {lambda} must be positive")));
    }
    Ok(BoundaryMatrix {
        lambda,
        entries: boundary_matrix_sqrt(config, lambda.sqrt()),
    })
}

/// Solves `M q = rhs`.
///
/// A (numerically) zero eigenvalue of `M` means `-λ` is a bound-state
/// energy and is reported as [`Error::SingularBoundaryMatrix`]; a condition
/// number above [`CONDITION_CAP`] is reported, not regularized.
pub fn solve_charges(matrix: &BoundaryMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = matrix.dim();
    if rhs.len() != n {
        return Err(Error::domain("solve_charges", "rhs length must match the matrix"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let eig = SymmetricEigen::new(matrix.entries.clone());
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e.abs()), hi.max(e.abs())));
    if lo <= hi * 1e3 * f64::EPSILON || hi == 0.0 {
        return Err(Error::SingularBoundaryMatrix { lambda: matrix.lambda });
    }
    let condition = hi / lo;
    if condition > CONDITION_CAP {
        return Err(Error::IllConditioned {
            lambda: matrix.lambda,
            condition,
        });
    }
    let b = DVector::from_column_slice(rhs);
    let lu = matrix.entries.clone().lu();
    let mut q = lu
        .solve(&b)
        .ok_or(Error::SingularBoundaryMatrix { lambda: matrix.lambda })?;
    // one step of iterative refinement
    let residual = &b - &matrix.entries * &q;
    if let Some(correction) = lu.solve(&residual) {
        q += correction;
    }
    Ok(q.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::ThetaProfile;
    use crate::Vec3;

    #[test]
    fn single_center() {
        let c = CenterConfig::single(-1.0, ThetaProfile::indicator(1.0).unwrap());
        let m = boundary_matrix(&c, 4.0).unwrap();
        assert_eq!(m.entries[(0, 0)], 1.0);
        let q = solve_charges(&m, &[0.3]).unwrap();
        assert!((q[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn two_center_entries() {
        let c = CenterConfig::pair(-1.0, -1.0, 1.0, ThetaProfile::indicator(2.0).unwrap()).unwrap();
        let m = boundary_matrix(&c, 4.0).unwrap();
        assert_eq!(m.entries[(0, 0)], 1.0);
        assert_eq!(m.entries[(1, 1)], 1.0);
        assert!((m.entries[(0, 1)] - 0.8646647).abs() < 5e-8);
        assert_eq!(m.entries, m.entries.transpose());
    }

    #[test]
    fn singular_at_bound_state() {
        let c = CenterConfig::single(-2.0, ThetaProfile::indicator(1.0).unwrap());
        let m = boundary_matrix(&c, 4.0).unwrap();
        assert!(matches!(solve_charges(&m, &[1.0]), Err(Error::SingularBoundaryMatrix { .. })));
    }

    #[test]
    fn ill_conditioned_reported() {
        let c = CenterConfig::new(
            vec![Vec3::zeros(), Vec3::new(30.0, 0.0, 0.0)],
            vec![-2.0 + 1e-13, 5.0],
            ThetaProfile::indicator(0.5).unwrap(),
        )
        .unwrap();
        let m = boundary_matrix(&c, 4.0).unwrap();
        assert!(matches!(
            solve_charges(&m, &[1.0, 1.0]),
            Err(Error::IllConditioned { .. }) | Err(Error::SingularBoundaryMatrix { .. })
        ));
    }

    #[test]
    fn local_zero_off_diagonal() {
        let c = CenterConfig::pair(0.5, 0.2, 0.8, ThetaProfile::local_zero()).unwrap();
        let m = boundary_matrix(&c, 2.0).unwrap();
        let want = -(-(2.0f64).sqrt() * 0.8).exp() / 0.8;
        assert!((m.entries[(0, 1)] - want).abs() < 1e-15);
    }
}
