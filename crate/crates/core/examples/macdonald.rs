//! Macdonald functions and the free Green kernels built from them.

use zerorange::kernels::{
    green_free_kernel, green_mass_kernel, ln_macdonald_k, macdonald_k, macdonald_k_general_path, MacdonaldOrder, MassModel,
};
use zerorange::Vec3;

fn main() -> zerorange::Result<()> {
    println!("{:>6} {:>22} {:>22} {:>22}", "z", "K_1/2", "K_5/2", "K_1");
    for z in [1e-3, 0.1, 1.0, 2.0, 10.0, 100.0] {
        println!(
            "{z:>6} {:>22.15e} {:>22.15e} {:>22.15e}",
            macdonald_k(&MacdonaldOrder::half_odd(0), z)?,
            macdonald_k(&MacdonaldOrder::half_odd(2), z)?,
            macdonald_k(&MacdonaldOrder::new(1.0)?, z)?
        );
    }
    let z = 2.0;
    println!(
        "\nK_3/2(2): closed form {:.15e}, general path {:.15e}",
        macdonald_k(&MacdonaldOrder::half_odd(1), z)?,
        macdonald_k_general_path(1.5, z)?
    );
    println!("ln K_10(1e4) = {:.10} (K itself underflows)", ln_macdonald_k(&MacdonaldOrder::new(10.0)?, 1e4)?);

    let x = [0.0, 0.0, 0.0];
    let y = [1.0, 0.0, 0.0];
    println!("\nG_1(|x-y| = 1, lambda = 1) = {:.15}", green_free_kernel(&x, &y, 1.0)?);
    let heavy = [0.0, 0.5, 0.0, 0.0, 0.0, 0.5];
    for eta in [0.01, 1.0, 100.0] {
        let v = green_mass_kernel(&Vec3::zeros(), &[0.0; 6], &Vec3::new(1.0, 0.0, 0.0), &heavy, &MassModel::new(eta)?, 1.0)?;
        println!("mass-weighted kernel, N = 2, eta = {eta:>6}: {v:.10e}");
    }
    Ok(())
}
