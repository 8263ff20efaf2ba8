//! Numerical laboratory for the singular semilinear Grushin problem
//! `-Δ_λ u = f/u^ν` with homogeneous Dirichlet data on rectangles that may
//! straddle the degeneracy plane `x = 0`.
//!
//! The crate discretizes `-Δ_λ u = -(u_xx + |x|^{2λ} u_yy)` with the 5-point
//! stencil, solves the truncated problems
//! `-Δ_λ u_n = min{f, n}/(u_n + 1/n)^ν` by damped Picard iteration over a
//! Jacobi-preconditioned conjugate-gradient core, and verifies the structure
//! of the approximation at desk scale: monotonicity in the truncation level,
//! interior positivity, energy bounds, scale equivariance, integrability
//! exponents, and the level-set threshold driving boundedness estimates.
//!
//! The `grushin-lab` binary runs config-driven experiments and emits CSV or
//! JSON reports; see the repository README.

// parameter guards use `!(x > 0.0)` instead of `x <= 0.0`: NaN must fail too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod experiment;
pub mod geometry;
pub mod linsolve;
pub mod operator;
pub mod report;
pub mod semilinear;

pub use analysis::{
    check_bounds, critical_exponent, energy, holder_conjugate, homogeneous_dimension,
    integral, interior_min, level_set_measure, lp_norm, regularity_exponent,
    stampacchia_threshold, AnalysisError, BoundCheck, Exponents, RegularityCase, SolveReport,
};
pub use config::{parse_config, ConfigError, ExperimentConfig, ExperimentKind};
pub use experiment::{run_experiment, ExperimentError, ExperimentReport};
pub use geometry::{Domain, GeometryError, Grid};
pub use linsolve::{default_maxiter, solve_spd, LinSolveError, LinearSolveStats};
pub use operator::{assemble_grushin, grushin_weight, Field, OperatorError, SparseOperator};
pub use report::{emit_csv, emit_json, emit_report, OutputFormat};
pub use semilinear::{
    limit_estimate, picard_solve, scaling_check, solve_sequence, truncate_source,
    uniqueness_probe, ApproxSolution, Exponent, ProblemSpec, SemilinearError, SequenceStudy,
};
