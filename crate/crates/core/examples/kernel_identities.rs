//! Integral identities behind the small-mass-ratio bounds and the norm of
//! the shifted Yukawa kernel, each checked by independent quadrature.

use zerorange::limits::{g_shift_norm, g_shift_norm_momentum, g_shift_norm_position, verify_identity, Identity};
use zerorange::quadrature::QuadSpec;

fn main() -> zerorange::Result<()> {
    let quad = QuadSpec::default();
    let identities = [
        Identity::MomentumDouble { k: [0.0; 3], k_prime: [1.0, 0.0, 0.0] },
        Identity::MomentumDouble { k: [0.3, -0.2, 0.0], k_prime: [0.3, 1.8, 0.0] },
        Identity::LogIntegral { a: 1.0 },
        Identity::LogIntegral { a: 7.5 },
        Identity::EtaSqrtBound { eta: 1.0, lambda: 1.0 },
        Identity::EtaSqrtBound { eta: 1e-3, lambda: 4.0 },
    ];
    for id in identities {
        let c = verify_identity(&id, &quad)?;
        let relation = if c.upper_bound { "<=" } else { "==" };
        println!(
            "{:<15} {:>16.10} {relation} {:>16.10}  (rel {:.1e}, holds: {})",
            id.name(),
            c.computed,
            c.reference,
            c.rel_error,
            c.holds(1e-6)
        );
    }

    println!("\n||g(. - R) - g||^2 at lambda = 1:");
    println!("{:>8} {:>16} {:>16} {:>16}", "R", "closed form", "momentum", "position");
    for r in [1.0, 0.1, 0.01, 0.001] {
        println!(
            "{r:>8} {:>16.12} {:>16.12} {:>16.12}",
            g_shift_norm(r, 1.0)?,
            g_shift_norm_momentum(r, 1.0, &quad)?,
            g_shift_norm_position(r, 1.0, &quad)?
        );
    }
    Ok(())
}
