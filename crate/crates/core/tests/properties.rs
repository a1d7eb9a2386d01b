use std::f64::consts::PI;

use nalgebra::Rotation3;
use proptest::prelude::*;
use zerorange::criticality::{gamma_c_bosons, gamma_hat_c};
use zerorange::kernels::{
    a_function, b_apply_point, g_lambda, green_free_kernel, green_mass_kernel, macdonald_k, MacdonaldOrder, MassModel,
    ThetaKind, ThetaProfile,
};
use zerorange::limits::{effective_alpha_merge, MergeOutcome};
use zerorange::pointop::{boundary_matrix, solve_charges, CenterConfig};
use zerorange::spectral::bound_states;
use zerorange::Vec3;

fn profile() -> impl Strategy<Value = ThetaProfile> {
    (0..3usize, 0.1..10.0f64).prop_map(|(k, b)| {
        let kind = [ThetaKind::Exponential, ThetaKind::Indicator, ThetaKind::SmoothBump][k];
        ThetaProfile::new(kind, b).unwrap()
    })
}

fn point() -> impl Strategy<Value = Vec3> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn separated(points: Vec<Vec3>, min: f64) -> bool {
    points
        .iter()
        .enumerate()
        .all(|(i, p)| points[i + 1..].iter().all(|q| (p - q).norm() > min))
}

fn config() -> impl Strategy<Value = CenterConfig> {
    (1..=4usize)
        .prop_flat_map(|n| (prop::collection::vec(point(), n), prop::collection::vec(-2.0..2.0f64, n), profile()))
        .prop_filter("centers too close", |(c, _, _)| separated(c.clone(), 0.3))
        .prop_map(|(c, a, p)| CenterConfig::new(c, a, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_stays_in_linear_envelope(p in profile(), r in 1e-6..50.0f64) {
        let v = p.eval(r).unwrap();
        prop_assert!(v >= 1.0 - r / p.b - 1e-12);
        prop_assert!(v <= 1.0 + r / p.b + 1e-12);
        prop_assert!(v >= 0.0);
    }

    #[test]
    fn scaled_macdonald_decreases(nu in 0.0..6.0f64, z in 1e-3..50.0f64, dz in 1e-3..5.0f64) {
        let order = MacdonaldOrder::new(nu).unwrap();
        let f = |x: f64| x.powf(nu) * macdonald_k(&order, x).unwrap();
        prop_assert!(f(z + dz) < f(z));
    }

    #[test]
    fn one_body_green_is_yukawa(x in point(), y in point(), lambda in 0.01..20.0f64) {
        prop_assume!((x - y).norm() > 1e-3);
        let g = green_free_kernel(x.as_slice(), y.as_slice(), lambda).unwrap();
        let yukawa = g_lambda((x - y).norm(), lambda).unwrap() / (4.0 * PI);
        prop_assert!((g - yukawa).abs() <= 1e-12 * yukawa);
    }

    #[test]
    fn equal_mass_kernel_is_free_kernel(
        x in point(), y in point(), hx in prop::collection::vec(-2.0..2.0f64, 6),
        hy in prop::collection::vec(-2.0..2.0f64, 6), lambda in 0.1..10.0f64,
    ) {
        let model = MassModel::new(1.0).unwrap();
        let m = green_mass_kernel(&x, &hx, &y, &hy, &model, lambda).unwrap();
        let full_x: Vec<f64> = x.iter().chain(&hx).copied().collect();
        let full_y: Vec<f64> = y.iter().chain(&hy).copied().collect();
        let f = green_free_kernel(&full_x, &full_y, lambda).unwrap();
        prop_assert!((m - f).abs() <= 1e-10 * f);
    }

    #[test]
    fn a_function_is_affine_in_alpha(z in point(), ys in prop::collection::vec(point(), 0..4), a in -3.0..3.0f64, p in profile()) {
        prop_assume!(ys.iter().all(|y| (y - z).norm() > 1e-3) && separated(ys.clone(), 1e-3));
        let base = a_function(&z, &ys, 0.0, 1.0, &p).unwrap();
        let shifted = a_function(&z, &ys, a, 1.0, &p).unwrap();
        prop_assert!((shifted - base - a).abs() <= 1e-12 * (1.0 + base.abs()));
        let doubled = a_function(&z, &ys, 0.0, 2.0, &p).unwrap();
        prop_assert!((doubled - 2.0 * base).abs() <= 1e-12 * (1.0 + base.abs()));
    }

    #[test]
    fn b_apply_is_linear(
        z in point(), centers in prop::collection::vec(point(), 3), u in prop::collection::vec(-2.0..2.0f64, 3),
        v in prop::collection::vec(-2.0..2.0f64, 3), c in -3.0..3.0f64, p in profile(),
    ) {
        prop_assume!(centers.iter().all(|x| (x - z).norm() > 1e-3));
        let alphas = [0.3, -1.0, 2.0];
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + c * b).collect();
        for i in 0..3 {
            let bu = b_apply_point(i, &u, &z, &centers, &alphas, 0.7, &p).unwrap();
            let bv = b_apply_point(i, &v, &z, &centers, &alphas, 0.7, &p).unwrap();
            let bw = b_apply_point(i, &w, &z, &centers, &alphas, 0.7, &p).unwrap();
            prop_assert!((bw - bu - c * bv).abs() <= 1e-9 * (1.0 + bu.abs() + (c * bv).abs()));
        }
    }

    #[test]
    fn boundary_matrix_symmetric_and_charges_solve(cfg in config(), lambda in 0.1..10.0f64) {
        let m = match boundary_matrix(&cfg, lambda) {
            Ok(m) => m,
            Err(_) => return Ok(()),
        };
        let n = m.dim();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(m.entries[(i, j)], m.entries[(j, i)]);
            }
        }
        let rhs: Vec<f64> = (0..n).map(|k| 1.0 + k as f64).collect();
        if let Ok(q) = solve_charges(&m, &rhs) {
            let residual = &m.entries * nalgebra::DVector::from_vec(q.clone()) - nalgebra::DVector::from_vec(rhs.clone());
            let scale = m.entries.norm() * q.iter().map(|v| v.abs()).fold(0.0, f64::max) + 1.0;
            prop_assert!(residual.amax() <= 1e-10 * scale);
        }
    }

    #[test]
    fn spectrum_is_rigid_motion_invariant(
        cfg in config(), axis in point(), angle in 0.0..std::f64::consts::TAU, shift in point(),
    ) {
        prop_assume!(axis.norm() > 1e-2);
        let rot = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
        let moved = cfg.transformed(&rot, &shift);
        let (a, b) = (bound_states(&cfg, 1.0).unwrap(), bound_states(&moved, 1.0).unwrap());
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.energies.iter().zip(&b.energies) {
            prop_assert!((x - y).abs() <= 1e-8 * x.abs().max(1.0));
        }
    }

    #[test]
    fn merge_rule_symmetric_and_homogeneous(a in -5.0..5.0f64, b in -5.0..5.0f64, t in -2.0..2.0f64, c in 0.1..10.0f64) {
        let ab = effective_alpha_merge(a, b, t);
        prop_assert_eq!(ab, effective_alpha_merge(b, a, t));
        match (ab, effective_alpha_merge(c * a, c * b, c * t)) {
            (MergeOutcome::Alpha(x), MergeOutcome::Alpha(y)) => prop_assert!((y - c * x).abs() <= 1e-9 * (1.0 + (c * x).abs())),
            (x, y) => prop_assert_eq!(x, y),
        }
    }

    #[test]
    fn critical_couplings_monotone(n in 2u64..60, eta in 1e-6..1e6f64) {
        if n >= 3 {
            prop_assert!(gamma_c_bosons(n + 1).unwrap() > gamma_c_bosons(n).unwrap());
        }
        prop_assert!(gamma_hat_c(n + 1, eta).unwrap() >= gamma_hat_c(n, eta).unwrap());
    }
}
