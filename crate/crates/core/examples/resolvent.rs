//! The resolvent applied to a Gaussian source: charges, the field along a
//! line, and the first resolvent identity as a consistency check.

use zerorange::kernels::ThetaProfile;
use zerorange::pointop::{resolvent_apply, resolvent_identity_samples, CenterConfig, GaussianSource};
use zerorange::quadrature::QuadSpec;
use zerorange::spectral::lower_bound;
use zerorange::Vec3;

fn main() -> zerorange::Result<()> {
    let config = CenterConfig::pair(-1.0, -0.5, 1.0, ThetaProfile::smooth_bump(1.0)?)?;
    let f = GaussianSource::new(1.0, Vec3::new(0.5, 0.5, 0.0), 0.7);
    let quad = QuadSpec::default();
    let lambda0 = lower_bound(&config)?;
    let lambda = lambda0 + 1.0;
    println!("lambda_0 = {lambda0:.8}; solving at lambda = {lambda:.8}");

    let out = resolvent_apply(&config, lambda, &f, &quad)?;
    println!("charges q = {:?}\n", out.charges);
    println!("{:>6} {:>14} {:>14} {:>14}", "x", "smooth", "singular", "psi");
    for k in -6..=10 {
        let p = Vec3::new(0.25 * k as f64 + 0.125, 0.0, 0.0);
        println!(
            "{:>6.3} {:>14.8} {:>14.8} {:>14.8}",
            p.x,
            out.smooth_part(&p)?,
            out.singular_part(&p)?,
            out.field(&p)?
        );
    }

    let probes = [Vec3::new(0.3, 0.4, 0.0), Vec3::new(2.0, -1.0, 0.5), Vec3::new(-0.7, 0.0, 1.1)];
    println!("\nR(l) - R(l') vs (l' - l) R(l) R(l'):");
    for s in resolvent_identity_samples(&config, lambda, lambda + 1.5, &f, &probes, &quad)? {
        println!("  {:?}: {:+.12e} vs {:+.12e} (rel {:.1e})", s.point.as_slice(), s.lhs, s.rhs, s.relative_error());
    }
    Ok(())
}
