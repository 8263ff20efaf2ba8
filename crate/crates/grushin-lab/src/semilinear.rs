//! The truncation-and-iteration scheme for the singular problem
//! `-Δ_λ u = f/u^ν`, `u > 0` inside, `u = 0` on the boundary.
//!
//! Each truncated problem `-Δ_λ u_n = f_n/(u_n + 1/n)^ν`, `f_n = min{f, n}`,
//! is solved by damped Picard iteration: evaluate the reaction term at the
//! current iterate, solve the linear Grushin system, and relax. Solutions
//! increase with the truncation level `n`, which makes the previous level's
//! solution the natural warm start for the next.

use thiserror::Error;

use crate::analysis::{basic_report, AnalysisError, SolveReport};
use crate::geometry::{Domain, Grid};
use crate::linsolve::{default_maxiter, solve_spd, LinSolveError};
use crate::operator::{assemble_grushin, Field, OperatorError, SparseOperator};

#[derive(Debug, Error, PartialEq)]
pub enum SemilinearError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Linear(#[from] LinSolveError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("source field must be nonnegative, found value {0}")]
    NegativeSource(f64),
    #[error("source field is identically zero")]
    SourceIdenticallyZero,
    #[error("singular exponent must be positive everywhere, found {0}")]
    NonPositiveExponent(f64),
    #[error("truncation level must be >= 1")]
    BadTruncationLevel,
    #[error("relaxation must lie in (0, 1], got {0}")]
    BadRelaxation(f64),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("problem fields live on a different grid than the solve grid")]
    GridMismatch,
    #[error("initial guess must be a nonnegative Dirichlet field")]
    BadInit,
    #[error("Picard iteration for n = {n} did not converge after {iterations} iterations (last relative increment {last_increment:.3e})")]
    PicardNotConverged { n: u64, iterations: usize, last_increment: f64 },
    #[error("n_list must be nonempty and strictly increasing")]
    BadTruncationList,
    #[error("need at least two solutions with increasing n, got {0}")]
    TooFewSolutions(usize),
    #[error("window contains no grid node")]
    EmptyWindow,
    #[error("scaling check needs a constant exponent")]
    ScalingNeedsConstantExponent,
    #[error("scaled truncation level t*n = {0} is not a positive integer")]
    ScaledLevelNotIntegral(f64),
    #[error("scaling factor must be positive and finite, got {0}")]
    BadScalingFactor(f64),
}

/// Singular exponent: a constant `ν > 0` or a positive node field `ν(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Exponent {
    Constant(f64),
    Variable(Field),
}

impl Exponent {
    fn validate(&self) -> Result<(), SemilinearError> {
        match self {
            Exponent::Constant(nu) => {
                if !(*nu > 0.0) || !nu.is_finite() {
                    return Err(SemilinearError::NonPositiveExponent(*nu));
                }
            }
            Exponent::Variable(field) => {
                for &v in field.as_slice() {
                    if !(v > 0.0) || !v.is_finite() {
                        return Err(SemilinearError::NonPositiveExponent(v));
                    }
                }
            }
        }
        Ok(())
    }

    fn max_value(&self) -> f64 {
        match self {
            Exponent::Constant(nu) => *nu,
            Exponent::Variable(field) => field.max_value(),
        }
    }
}

/// Full description of one singular problem instance.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub lambda: f64,
    pub exponent: Exponent,
    pub source: Field,
    /// Truncation level `n >= 1`.
    pub n: u64,
    pub picard_tol: f64,
    pub picard_maxiter: usize,
    /// Relaxation weight `ω in (0, 1]` of the Picard update.
    pub relaxation: f64,
    pub linear_tol: f64,
}

impl ProblemSpec {
    /// Build a spec with default iteration controls: `picard_tol = 1e-9`,
    /// `picard_maxiter = 2000`, `linear_tol = 1e-12` and relaxation
    /// `ω = 2/(2 + max ν)`, which damps the order-reversing Picard map for
    /// every exponent (see [`default_relaxation`]).
    pub fn new(
        lambda: f64,
        exponent: Exponent,
        source: Field,
        n: u64,
    ) -> Result<Self, SemilinearError> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(OperatorError::NegativeLambda(lambda).into());
        }
        exponent.validate()?;
        validate_source(&source)?;
        if n < 1 {
            return Err(SemilinearError::BadTruncationLevel);
        }
        if let Exponent::Variable(field) = &exponent {
            if field.grid() != source.grid() {
                return Err(SemilinearError::GridMismatch);
            }
        }
        let relaxation = default_relaxation(exponent.max_value());
        Ok(Self {
            lambda,
            exponent,
            source,
            n,
            picard_tol: 1e-9,
            picard_maxiter: 2000,
            relaxation,
            linear_tol: 1e-12,
        })
    }

    pub fn with_truncation(mut self, n: u64) -> Result<Self, SemilinearError> {
        if n < 1 {
            return Err(SemilinearError::BadTruncationLevel);
        }
        self.n = n;
        Ok(self)
    }

    pub fn with_picard_tol(mut self, tol: f64) -> Result<Self, SemilinearError> {
        if !(tol > 0.0) {
            return Err(SemilinearError::BadTolerance(tol));
        }
        self.picard_tol = tol;
        Ok(self)
    }

    pub fn with_linear_tol(mut self, tol: f64) -> Result<Self, SemilinearError> {
        if !(tol > 0.0) {
            return Err(SemilinearError::BadTolerance(tol));
        }
        self.linear_tol = tol;
        Ok(self)
    }

    pub fn with_picard_maxiter(mut self, maxiter: usize) -> Self {
        self.picard_maxiter = maxiter;
        self
    }

    pub fn with_relaxation(mut self, omega: f64) -> Result<Self, SemilinearError> {
        if !(omega > 0.0 && omega <= 1.0) {
            return Err(SemilinearError::BadRelaxation(omega));
        }
        self.relaxation = omega;
        Ok(self)
    }
}

/// Default Picard relaxation `ω = 2/(2 + ν_max)`.
///
/// The Picard map `w -> solve(f_n/(w + 1/n)^ν)` is order-reversing; its
/// linearization at the fixed point has spectrum in `[-ν, 0)`, with the
/// extreme mode along the solution itself approaching `-ν` as `n` grows
/// (substituting `c·u` scales the solve by `c^{-ν}`). The damped update
/// `ω·solve + (1-ω)·id` then has spectrum in `[1 - ω(1 + ν), 1 - ω]`;
/// `ω = 2/(2 + ν)` balances the endpoints and contracts at rate
/// `ν/(2 + ν)` uniformly in `n`.
pub fn default_relaxation(nu_max: f64) -> f64 {
    2.0 / (2.0 + nu_max)
}

fn validate_source(f: &Field) -> Result<(), SemilinearError> {
    let mut all_zero = true;
    for &v in f.as_slice() {
        if !(v >= 0.0) {
            return Err(SemilinearError::NegativeSource(v));
        }
        if v != 0.0 {
            all_zero = false;
        }
    }
    if all_zero {
        return Err(SemilinearError::SourceIdenticallyZero);
    }
    Ok(())
}

/// Solution of one truncated problem.
#[derive(Debug, Clone)]
pub struct ApproxSolution {
    /// Converged nonnegative Dirichlet field.
    pub u: Field,
    pub n: u64,
    pub picard_iterations: usize,
    /// `sup |u - solve(rhs(u))|`, measured after convergence.
    pub nonlinear_residual: f64,
    pub report: SolveReport,
}

/// `f_n = min{f, n}` nodewise.
pub fn truncate_source(f: &Field, n: u64) -> Result<Field, SemilinearError> {
    if n < 1 {
        return Err(SemilinearError::BadTruncationLevel);
    }
    for &v in f.as_slice() {
        if !(v >= 0.0) {
            return Err(SemilinearError::NegativeSource(v));
        }
    }
    let cap = n as f64;
    Ok(f.map(|v| v.min(cap)))
}

/// Reaction term `f_n / (max(u, 0) + 1/n)^ν` on interior nodes, zero on the
/// boundary.
fn reaction_rhs(f_n: &Field, u: &Field, exponent: &Exponent, inv_n: f64) -> Field {
    let grid = *u.grid();
    let mut out = Field::zeros(&grid);
    for j in 1..grid.ny - 1 {
        for i in 1..grid.nx - 1 {
            let nu = match exponent {
                Exponent::Constant(nu) => *nu,
                Exponent::Variable(field) => field.get(i, j),
            };
            let denom = (u.get(i, j).max(0.0) + inv_n).powf(nu);
            out.set(i, j, f_n.get(i, j) / denom);
        }
    }
    out
}

fn relax(tilde: &Field, u: &Field, omega: f64) -> Field {
    let grid = *u.grid();
    let mut out = Field::zeros(&grid);
    for (o, (&a, &b)) in out
        .as_mut_slice()
        .iter_mut()
        .zip(tilde.as_slice().iter().zip(u.as_slice()))
    {
        *o = omega * a + (1.0 - omega) * b;
    }
    out
}

/// Signed minimum of `a - b` over all nodes.
fn min_signed_diff(a: &Field, b: &Field) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&x, &y)| x - y)
        .fold(f64::INFINITY, f64::min)
}

fn check_spec_grid(spec: &ProblemSpec, grid: &Grid) -> Result<(), SemilinearError> {
    if spec.source.grid() != grid {
        return Err(SemilinearError::GridMismatch);
    }
    if let Exponent::Variable(field) = &spec.exponent {
        if field.grid() != grid {
            return Err(SemilinearError::GridMismatch);
        }
    }
    Ok(())
}

fn check_init(init: &Field, grid: &Grid) -> Result<(), SemilinearError> {
    if init.grid() != grid {
        return Err(SemilinearError::GridMismatch);
    }
    if !init.is_dirichlet() || init.min_value() < 0.0 {
        return Err(SemilinearError::BadInit);
    }
    Ok(())
}

/// Solve the truncated problem at `spec.n` by damped Picard iteration.
///
/// Iterates `u^{k+1} = ω·solve(f_n/(max(u^k,0) + 1/n)^ν) + (1-ω)·u^k`,
/// stopping when the relative increment `sup|u^{k+1} - u^k|/(1 + sup u^{k+1})`
/// falls below `picard_tol` and the nonlinear residual (normalized the same
/// way) confirms the fixed point.
pub fn picard_solve(
    spec: &ProblemSpec,
    grid: &Grid,
    init: Option<&Field>,
) -> Result<ApproxSolution, SemilinearError> {
    check_spec_grid(spec, grid)?;
    let op = assemble_grushin(grid, spec.lambda)?;
    picard_with_operator(&op, spec, init)
}

pub(crate) fn picard_with_operator(
    op: &SparseOperator,
    spec: &ProblemSpec,
    init: Option<&Field>,
) -> Result<ApproxSolution, SemilinearError> {
    let grid = op.grid();
    check_spec_grid(spec, grid)?;
    spec.exponent.validate()?;
    validate_source(&spec.source)?;
    if !(spec.picard_tol > 0.0) {
        return Err(SemilinearError::BadTolerance(spec.picard_tol));
    }
    if !(spec.relaxation > 0.0 && spec.relaxation <= 1.0) {
        return Err(SemilinearError::BadRelaxation(spec.relaxation));
    }

    let f_n = truncate_source(&spec.source, spec.n)?;
    let inv_n = 1.0 / spec.n as f64;
    let omega = spec.relaxation;
    let lin_maxiter = default_maxiter(op.dim());

    let mut u = match init {
        Some(f) => {
            check_init(f, grid)?;
            f.clone()
        }
        None => Field::zeros(grid),
    };

    let mut iterations = 0usize;
    let mut last_rel_increment = f64::INFINITY;

    while iterations < spec.picard_maxiter {
        let r = reaction_rhs(&f_n, &u, &spec.exponent, inv_n);
        let (tilde, _) = solve_spd(op, &r, spec.linear_tol, lin_maxiter, Some(&u))?;
        iterations += 1;
        let next = relax(&tilde, &u, omega);
        debug_assert!(next.min_value() >= -1e-12, "Picard iterate lost nonnegativity");
        let increment = Field::sup_diff(&next, &u)?;
        let denom = 1.0 + next.max_value();
        last_rel_increment = increment / denom;
        u = next;

        if last_rel_increment <= spec.picard_tol {
            // candidate fixed point: confirm with the nonlinear residual,
            // reusing the confirmation solve as the next iterate on failure
            let r2 = reaction_rhs(&f_n, &u, &spec.exponent, inv_n);
            let (tilde2, _) = solve_spd(op, &r2, spec.linear_tol, lin_maxiter, Some(&u))?;
            let residual = Field::sup_diff(&u, &tilde2)?;
            if residual <= spec.picard_tol * (1.0 + u.max_value()) {
                let clamped = u.map(|v| v.max(0.0));
                debug_assert!(
                    Field::sup_diff(&clamped, &u)? <= 1e-12,
                    "clamping was not a no-op at convergence"
                );
                let report = basic_report(&clamped, spec.lambda)?;
                return Ok(ApproxSolution {
                    u: clamped,
                    n: spec.n,
                    picard_iterations: iterations,
                    nonlinear_residual: residual,
                    report,
                });
            }
            iterations += 1;
            u = relax(&tilde2, &u, omega);
        }
    }

    Err(SemilinearError::PicardNotConverged {
        n: spec.n,
        iterations,
        last_increment: last_rel_increment,
    })
}

/// Monotone family of truncated solutions with warm starts, plus the
/// per-pair monotonicity defects and the interior minima over `window`.
#[derive(Debug, Clone)]
pub struct SequenceStudy {
    pub solutions: Vec<ApproxSolution>,
    /// `min over nodes of (u_{n_{k+1}} - u_{n_k})`, one entry per
    /// consecutive pair.
    pub monotonicity_defects: Vec<f64>,
    /// `min over window nodes of u_{n_k}`, one entry per solution.
    pub interior_minima: Vec<f64>,
}

/// Solve the truncated problems for every level in the strictly increasing
/// `n_list`, warm-starting each solve from the previous solution.
pub fn solve_sequence(
    spec_base: &ProblemSpec,
    grid: &Grid,
    n_list: &[u64],
    window: &Domain,
) -> Result<SequenceStudy, SemilinearError> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SemilinearError::BadTruncationList);
    }
    check_spec_grid(spec_base, grid)?;
    let op = assemble_grushin(grid, spec_base.lambda)?;

    let mut solutions: Vec<ApproxSolution> = Vec::with_capacity(n_list.len());
    let mut defects = Vec::new();
    let mut minima = Vec::new();

    for &n in n_list {
        let spec_n = spec_base.clone().with_truncation(n)?;
        let init = solutions.last().map(|s| &s.u);
        let mut sol = picard_with_operator(&op, &spec_n, init)?;
        let min = crate::analysis::interior_min(&sol.u, window)
            .ok_or(SemilinearError::EmptyWindow)?;
        sol.report.interior_min = Some(min);
        minima.push(min);
        if let Some(prev) = solutions.last() {
            defects.push(min_signed_diff(&sol.u, &prev.u));
        }
        solutions.push(sol);
    }

    Ok(SequenceStudy { solutions, monotonicity_defects: defects, interior_minima: minima })
}

/// Limit proxy for an increasing family: the last field together with the
/// Cauchy gap `sup |u_last - u_prev|`.
pub fn limit_estimate(solutions: &[ApproxSolution]) -> Result<(Field, f64), SemilinearError> {
    if solutions.len() < 2 {
        return Err(SemilinearError::TooFewSolutions(solutions.len()));
    }
    if solutions.windows(2).any(|w| w[0].n >= w[1].n) {
        return Err(SemilinearError::BadTruncationList);
    }
    let last = &solutions[solutions.len() - 1];
    let prev = &solutions[solutions.len() - 2];
    let gap = Field::sup_diff(&last.u, &prev.u)?;
    Ok((last.u.clone(), gap))
}

/// Solve the same truncated problem from two initializations and return the
/// sup-norm gap between the two converged solutions.
pub fn uniqueness_probe(
    spec: &ProblemSpec,
    grid: &Grid,
    init_a: &Field,
    init_b: &Field,
) -> Result<f64, SemilinearError> {
    check_spec_grid(spec, grid)?;
    check_init(init_a, grid)?;
    check_init(init_b, grid)?;
    let op = assemble_grushin(grid, spec.lambda)?;
    let sol_a = picard_with_operator(&op, spec, Some(init_a))?;
    let sol_b = picard_with_operator(&op, spec, Some(init_b))?;
    Ok(Field::sup_diff(&sol_a.u, &sol_b.u)?)
}

fn dyadic_ladder(n: u64) -> Vec<u64> {
    let mut ladder = Vec::new();
    let mut level = 1u64;
    while level < n {
        ladder.push(level);
        level = level.saturating_mul(2);
    }
    ladder.push(n);
    ladder
}

/// Scale equivariance probe: if `u` solves the problem with source `f`,
/// then `t^{1/(1+ν)}·u` solves it with source `t·f` (up to the truncation
/// shift). Solves with `(f, n)` and `(t·f, t·n)` and returns
/// `sup|u_tf - t^{1/(1+ν)} u_f| / sup|t^{1/(1+ν)} u_f|`.
pub fn scaling_check(spec: &ProblemSpec, grid: &Grid, t: f64) -> Result<f64, SemilinearError> {
    let nu = match spec.exponent {
        Exponent::Constant(nu) => nu,
        Exponent::Variable(_) => return Err(SemilinearError::ScalingNeedsConstantExponent),
    };
    if !(t > 0.0) || !t.is_finite() {
        return Err(SemilinearError::BadScalingFactor(t));
    }
    check_spec_grid(spec, grid)?;
    let scaled_level = t * spec.n as f64;
    if (scaled_level - scaled_level.round()).abs() > 1e-9 || scaled_level.round() < 1.0 {
        return Err(SemilinearError::ScaledLevelNotIntegral(scaled_level));
    }
    let scaled_n = scaled_level.round() as u64;

    let op = assemble_grushin(grid, spec.lambda)?;
    let solve_ladder = |source: Field, n: u64| -> Result<Field, SemilinearError> {
        let mut prev: Option<ApproxSolution> = None;
        for level in dyadic_ladder(n) {
            let spec_level = ProblemSpec {
                source: source.clone(),
                exponent: spec.exponent.clone(),
                ..spec.clone()
            }
            .with_truncation(level)?;
            let sol = picard_with_operator(&op, &spec_level, prev.as_ref().map(|s| &s.u))?;
            prev = Some(sol);
        }
        Ok(prev.expect("ladder is nonempty").u)
    };

    let u_f = solve_ladder(spec.source.clone(), spec.n)?;
    let u_tf = solve_ladder(spec.source.map(|v| t * v), scaled_n)?;

    let factor = t.powf(1.0 / (1.0 + nu));
    let predicted = u_f.map(|v| factor * v);
    let denom = predicted.sup_norm();
    let dev = Field::sup_diff(&u_tf, &predicted)?;
    Ok(dev / denom)
}
