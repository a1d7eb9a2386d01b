//! Special functions, Green's kernels, θ profiles and the pointwise
//! coefficient functions of the many-body boundary conditions.

mod coefficients;
mod green;
mod macdonald;
mod theta;

pub use coefficients::{a_function, b_apply_point, phi_weight};
pub(crate) use green::delta_sqrt;
pub use green::{delta_lambda_theta, g_lambda, green_free_kernel, green_mass_kernel, MassModel};
pub use macdonald::{ln_macdonald_k, macdonald_k, macdonald_k_general_path, MacdonaldOrder};
pub use theta::{theta_eval, ThetaKind, ThetaProfile};
