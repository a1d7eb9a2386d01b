//! Bound states of two and three centers as their geometry changes.

use zerorange::kernels::ThetaProfile;
use zerorange::pointop::CenterConfig;
use zerorange::spectral::{bound_states, eigencurves, lower_bound};
use zerorange::Vec3;

fn main() -> zerorange::Result<()> {
    let profile = ThetaProfile::exponential(2.0)?;
    println!("two centers, alpha = (-1, -1), theta = exp(-r/2)");
    println!("{:>8} {:>6} {:>14} {:>14}", "R", "count", "E_0", "E_1");
    for r in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let sp = bound_states(&CenterConfig::pair(-1.0, -1.0, r, profile)?, 1.0)?;
        let e = |k: usize| sp.energies.get(k).map_or("-".to_string(), |v| format!("{v:.8}"));
        println!("{r:>8} {:>6} {:>14} {:>14}", sp.len(), e(0), e(1));
    }

    let side = 1.5;
    let triangle = CenterConfig::new(
        vec![
            Vec3::zeros(),
            Vec3::new(side, 0.0, 0.0),
            Vec3::new(0.5 * side, 0.5 * 3f64.sqrt() * side, 0.0),
        ],
        vec![-1.2; 3],
        ThetaProfile::local_zero(),
    )?;
    let sp = bound_states(&triangle, 1.0)?;
    println!("\nequilateral triangle (local): energies {:?}", sp.energies);
    println!("spectral lower bound lambda_0 = {:.10}", lower_bound(&triangle)?);

    let grid = [0.01, 0.1, 0.5, 1.0, 2.0];
    for (k, curve) in eigencurves(&triangle, &grid)?.iter().enumerate() {
        let cells: Vec<String> = curve.iter().map(|v| format!("{v:+.4}")).collect();
        println!("  mu_{k}: {}", cells.join("  "));
    }
    Ok(())
}
