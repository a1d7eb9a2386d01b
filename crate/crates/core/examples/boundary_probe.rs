//! Recovers the boundary condition `ψ ~ q/ρ + (αq + Σ θ(R)/R q')` at each
//! center from spherical averages of the computed field.

use zerorange::kernels::ThetaProfile;
use zerorange::pointop::{boundary_probe, default_probe_radii, resolvent_apply, CenterConfig, GaussianSource};
use zerorange::quadrature::QuadSpec;
use zerorange::Vec3;

fn main() -> zerorange::Result<()> {
    let separation = 1.0;
    let profile = ThetaProfile::indicator(2.0)?;
    let config = CenterConfig::pair(-1.0, -0.5, separation, profile)?;
    let f = GaussianSource::unit(Vec3::zeros());
    let out = resolvent_apply(&config, 2.0, &f, &QuadSpec::default())?;
    let radii = default_probe_radii(&config);
    println!("probe radii {:?}", radii.iter().map(|r| format!("{r:.3e}")).collect::<Vec<_>>());
    for i in 0..2 {
        let fit = boundary_probe(&out, &config, i, &radii)?;
        let q = out.charges[i];
        let expected = config.strengths()[i] * q + profile.eval(separation)? / separation * out.charges[1 - i];
        println!("center {i}:");
        println!("  singular {:+.10} vs charge {q:+.10}", fit.singular);
        println!("  regular  {:+.10} vs predicted {expected:+.10}", fit.regular);
        println!("  fit residual {:.2e}", fit.residual);
    }
    Ok(())
}
