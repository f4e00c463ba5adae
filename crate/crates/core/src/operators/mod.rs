//! Spatial operators of the model on a periodic grid.

mod apply;
mod coeffs;
mod depth;
mod qweights;
mod solver;

pub(crate) use apply::traces_from_gradients;
pub use apply::{
    apply_l, apply_l_column, apply_l_matrix, apply_p, apply_script_l, lift, surface_combination,
    velocity_traces, Traces,
};
pub use coeffs::{guarded_ratio, Coefficients};
pub use depth::DepthField;
pub use qweights::{bordered_depth_matrix, q_weights, q_weights_with_block, QWeights};
pub use solver::{solve_p, solve_script_l, ModePreconditioner, SolveReport, SolverOptions};
