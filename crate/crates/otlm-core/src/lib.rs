//! Solver library for entropy-regularized optimal transport linear models:
//! non-negative weights over a dictionary basis are fit jointly with a
//! transport plan by Sinkhorn-like scaling iterations, with the weight
//! update carried out as a single majorization-minimization step per pass.
//!
//! The crate splits into the pieces of that loop: sparse cost and Gibbs
//! kernel construction ([`cost`], [`kernel`]), the datafit proximal
//! operators ([`prox`]), the penalized column-span projection step
//! ([`mm`]), the outer loop ([`solver`]), synthetic problem generators
//! ([`synth`]), and independent numeric oracles used by the test and
//! acceptance suites ([`oracle`]).

pub mod config;
pub mod cost;
pub mod dictionary;
pub mod error;
pub mod kernel;
pub mod lambertw;
pub mod mm;
pub mod oracle;
pub mod prox;
pub mod solver;
pub mod sparse;
pub mod state;
pub mod synth;

pub use config::OtlmConfig;
pub use cost::{build_cost, ConnectivityMask, CostKind, CostSpec, SparseCostMatrix};
pub use dictionary::{Dictionary, Target};
pub use error::{OtlmError, Result};
pub use kernel::{build_kernel, GibbsKernel};
pub use lambertw::{lambert_w0, lambert_w0_of_log};
pub use mm::{
    build_normalized_weights, mm_majorant, mm_objective, mm_step, MMWorkspace, PenaltyKind,
};
pub use oracle::{
    baseline_nn_regression, dense_objective, mm_coordinate_minimizer, prox_oracle_1d,
    sinkhorn_reference, BaselineLoss, OracleConfig,
};
pub use prox::{prox_datafit, prox_equality, prox_kl, prox_l2, prox_poisson, prox_tv, DatafitKind};
pub use solver::{solve, solve_balanced};
pub use sparse::CsrMatrix;
pub use state::{
    materialize_plan, plan_col_marginal, plan_row_marginal, IterationRecord, ScalingState, Solution,
};
pub use synth::{
    gen_demo_problem, gen_scaling_problem, skew_gaussian_pdf, DemoSpec, SkewDirection,
    SkewGaussianParams, SynthProblem, SynthSpec,
};

/// Caps the global thread pool used by the parallel kernel products.
/// Call once at startup; later calls fail once the pool exists.
pub fn init_threads(n: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| OtlmError::InvalidValue(format!("thread pool: {e}")))
}
