//! Critical three-body couplings: bosons in the unitary limit and the
//! mass-ratio dependent coupling of the impurity gas.

use zerorange::criticality::{
    dirichlet_special_case, gamma_c_bosons, gamma_hat_c, gamma_hat_c_limit, gamma_hat_extrema, geometric_grid, EtaLimit,
};

fn main() -> zerorange::Result<()> {
    for n in [3, 4, 5, 10, 100] {
        println!("gamma_c({n}) = {:.10}", gamma_c_bosons(n)?);
    }

    println!("\n{:>10} {:>12} {:>12} {:>12}", "eta", "N = 2", "N = 3", "N = 5");
    for eta in geometric_grid(1e-4, 1e4, 9) {
        println!(
            "{eta:>10.1e} {:>12.8} {:>12.8} {:>12.8}",
            gamma_hat_c(2, eta)?,
            gamma_hat_c(3, eta)?,
            gamma_hat_c(5, eta)?
        );
    }

    let grid = geometric_grid(1e-8, 1e8, 161);
    for n in [2, 3, 5] {
        let ext = gamma_hat_extrema(n, &grid)?;
        println!(
            "N = {n}: inf {:.8} (limit {:.8}), sup {:.8} (limit {:.1}, extrapolated {:.8})",
            ext.inf_est,
            gamma_hat_c_limit(n, EtaLimit::Infinity)?,
            ext.sup_est,
            gamma_hat_c_limit(n, EtaLimit::Zero)?,
            ext.sup_extrapolated
        );
    }

    for m in [0.0, 0.5, 2.0] {
        println!("Dirichlet construction with m = {m}: {:?}", dirichlet_special_case(m)?);
    }
    Ok(())
}
