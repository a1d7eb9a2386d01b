//! Monte Carlo estimate of the impurity-gas quadratic form on Gaussian
//! charges; reproducible for a fixed seed regardless of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zerorange::kernels::{MassModel, ThetaProfile};
use zerorange::manybody::{phi_form_estimate, random_charge, GaussianCharge};
use zerorange::quadrature::QuadSpec;

fn main() -> zerorange::Result<()> {
    let quad = QuadSpec::default();
    let profile = ThetaProfile::indicator(1.0)?;
    let unit = GaussianCharge::unit();
    println!("unit charges, alpha = (-1, -1), gamma = 1:");
    for eta in [0.1, 1.0, 10.0] {
        let model = MassModel::new(eta)?;
        for lambda in [10.0, 100.0, 1000.0] {
            let e = phi_form_estimate((&unit, &unit), (-1.0, -1.0), 1.0, &profile, &model, lambda, 200_000, 1, &quad)?;
            println!(
                "  eta = {eta:>4}, lambda = {lambda:>5}: {:>12.5} +- {:.1e} (diag {:.4}, offdiag {:.4}, B {:.4})",
                e.value,
                e.stderr,
                e.diagonal,
                e.offdiagonal,
                e.b_alpha + e.b_theta
            );
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let model = MassModel::new(1.0)?;
    println!("\nrandom charges at lambda = 100:");
    for _ in 0..3 {
        let (c1, c2) = (random_charge(&mut rng), random_charge(&mut rng));
        let e = phi_form_estimate((&c1, &c2), (0.5, -0.5), 1.0, &profile, &model, 100.0, 200_000, 7, &quad)?;
        println!("  {c1:?}\n  {c2:?}\n    form = {:.5} +- {:.1e}", e.value, e.stderr);
    }
    Ok(())
}
