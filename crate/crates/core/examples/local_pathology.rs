//! θ ≡ 0: merging centers decouple (charges vanish like R) while a deep
//! bound state falls like -(t*/R)² with t* e^{t*} = 1.

use zerorange::limits::{local_decay_scan, local_deep_state_scaling, log_log_slope, merge_probe_source};
use zerorange::quadrature::QuadSpec;

fn main() -> zerorange::Result<()> {
    let radii = [0.1, 0.03, 0.01, 0.003, 0.001];
    let f = merge_probe_source();
    let points = local_decay_scan((-1.0, -1.0), &radii, 1.0, &f, &QuadSpec::default())?;
    println!("{:>8} {:>8} {:>14} {:>14}", "R", "lambda", "q1", "q2");
    for p in &points {
        println!("{:>8} {:>8} {:>14.6e} {:>14.6e}", p.radius, p.lambda, p.charges[0], p.charges[1]);
    }
    let norms: Vec<f64> = points.iter().map(|p| p.charge_norm).collect();
    println!("slope of |q| against R: {:.4}\n", log_log_slope(&radii, &norms));

    for r in [1e-1, 1e-2, 1e-3, 1e-4] {
        println!("R = {r:e}: sqrt(lambda*) R = {:.6}", local_deep_state_scaling((-1.0, -1.0), r)?);
    }
    Ok(())
}
