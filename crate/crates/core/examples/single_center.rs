//! One center: bound state, scattering length and the eigencurve of `M(λ)`.

use zerorange::kernels::ThetaProfile;
use zerorange::pointop::CenterConfig;
use zerorange::spectral::{bound_states, eigencurve, scattering_length};

fn main() -> zerorange::Result<()> {
    let profile = ThetaProfile::indicator(1.0)?;
    for alpha in [-2.0, -0.5, 0.0, 1.0] {
        let config = CenterConfig::single(alpha, profile);
        let sp = bound_states(&config, 1.0)?;
        let energy = sp.ground_energy().map_or("none".to_string(), |e| format!("{e:.12}"));
        println!(
            "alpha = {alpha:>5}: bound state {energy:>16}, scattering length {:>8.4}",
            scattering_length(alpha)
        );
    }

    let config = CenterConfig::single(-2.0, profile);
    let grid: Vec<f64> = (1..=8).map(|k| k as f64).collect();
    let curve = eigencurve(&config, 0, &grid)?;
    println!("\nmu_0(lambda) = alpha + sqrt(lambda) for alpha = -2:");
    for (l, mu) in grid.iter().zip(&curve) {
        println!("  lambda = {l:3}  mu = {mu:+.6}");
    }
    Ok(())
}
