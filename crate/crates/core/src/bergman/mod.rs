//! Discretized Bergman projection, comparison kernels, maximal operators
//! and operator-norm estimates on polar grids.

mod grid;
mod kernels;
mod maximal;
mod operator;
mod stolz;

pub use grid::{AreaRule, GridFunction, PolarGrid};
pub use kernels::{bergman_kernel, bergman_kernel_modulus, kernel_d, kernel_h, kernel_hn, kernel_htilde, GridKernel};
pub use maximal::{bilinear_bound_sides, fefferman_stein_ratio, hl_maximal, maximal_r, ray_maximal, RayMesh};
pub use operator::{
    apply_tm, bergman_cell_average, duality_pairing, duality_pairing_analytic, operator_norm_estimate, project, project_grid,
    project_rule, GridOperator, Identity, KernelOperator, Measure, NormTrial, OperatorNormEstimate,
    ScaledIdentity,
};
pub use stolz::{stolz_lemma_check, StolzCheck};
