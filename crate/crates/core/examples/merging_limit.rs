//! Two centers merging: a smooth θ with θ'(0) = 0 converges to a single
//! center of strength α₁α₂/(α₁+α₂); θ'(0) ≠ 0 shifts the merged strength.

use zerorange::kernels::ThetaProfile;
use zerorange::limits::{effective_alpha_merge, log_log_slope, merge_scan};

fn main() -> zerorange::Result<()> {
    let radii = [0.1, 0.03, 0.01, 0.003, 0.001];

    let scan = merge_scan(-1.0, -1.0, ThetaProfile::smooth_bump(1.0)?, &radii, 1.0)?;
    println!("smooth bump, alpha = (-1, -1): predicted {:?}, E = {:?}", scan.predicted_alpha, scan.predicted_energy);
    println!("{:>8} {:>16} {:>16} {:>10} {:>10}", "R", "surviving E", "lowest E", "q1+q2", "reference");
    let mut errors = Vec::new();
    for (k, r) in radii.iter().enumerate() {
        let limit = scan.limit_energies[k].unwrap_or(f64::NAN);
        errors.push((limit + 0.25).abs());
        println!(
            "{:>8} {:>16.10} {:>16.6} {:>10.6} {:>10.6}",
            r,
            limit,
            scan.ground_energies[k].unwrap_or(f64::NAN),
            scan.charge_sums[k],
            scan.reference_charge_sum.unwrap_or(f64::NAN)
        );
    }
    println!("convergence order of the surviving level: {:.3}\n", log_log_slope(&radii, &errors));

    for (a1, a2, t) in [(2.0, 2.0, 0.0), (2.0, 2.0, 1.0), (1.0, 1.0, 1.0), (-1.0, 3.0, -0.5)] {
        println!("merge({a1}, {a2}; theta'(0) = {t}) = {:?}", effective_alpha_merge(a1, a2, t));
    }

    let scan = merge_scan(2.0, 2.0, ThetaProfile::exponential(1.0)?, &radii, 1.0)?;
    println!(
        "\nexp(-r), alpha = (2, 2): predicted {:?}, bound states per R {:?}",
        scan.predicted_alpha, scan.bound_state_counts
    );
    Ok(())
}
