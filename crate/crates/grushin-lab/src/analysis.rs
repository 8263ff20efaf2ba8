//! Discrete norms, the weighted energy, level-set measures and their decay
//! threshold, the exponent calculators, and the a-priori-bound verdicts.
//!
//! Quadrature is composite trapezoid with node weights `hx*hy` (interior),
//! `hx*hy/2` (edge) and `hx*hy/4` (corner). The energy is a sum of weighted
//! squared difference quotients chosen so that
//! `energy(u) = hx*hy*<apply(op, u), u>` holds exactly up to reassociation
//! for Dirichlet fields.

use thiserror::Error;

use crate::geometry::{Domain, Grid};
use crate::operator::{grushin_weight, Field};
use crate::semilinear::{ApproxSolution, Exponent, ProblemSpec};

/// Multiplicative slack for bound verdicts: pass means `lhs <= rhs*(1+1e-8)`.
pub const BOUND_SLACK: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("lp_norm needs p >= 1 (or infinity), got {0}")]
    PBelowOne(f64),
    #[error("homogeneous dimension must exceed 2 for the critical exponent, got Q = {0}")]
    QNotAboveTwo(f64),
    #[error("Holder conjugate needs r >= 1, got {0}")]
    ConjugateBelowOne(f64),
    #[error("exponent formulas need r >= 1, got r = {0}")]
    RBelowOne(f64),
    #[error("r = {r} is below the admissible threshold {min_r} for this regime")]
    RBelowThreshold { r: f64, min_r: f64 },
    #[error("r = {r} is at or above the admissible bound {max_r} for this regime")]
    RAboveRange { r: f64, max_r: f64 },
    #[error("r = {r} >= Q/2 = {half_q}: the solution is bounded, no finite integrability exponent applies")]
    LInftyRegime { r: f64, half_q: f64 },
    #[error("exponent case {case} does not apply to nu = {nu}")]
    CaseMismatch { case: &'static str, nu: f64 },
    #[error("{name} must be {requirement}, got {value}")]
    BadParameter { name: &'static str, requirement: &'static str, value: f64 },
    #[error("field is not a Dirichlet field")]
    NotDirichlet,
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("this bound check needs a constant exponent")]
    VariableExponent,
}

/// Homogeneous dimension `Q = (m + 1) + lambda * m` of the Grushin geometry
/// with one non-degenerate direction and `m` degenerate ones.
pub fn homogeneous_dimension(m: u32, lambda: f64) -> f64 {
    (m as f64 + 1.0) + lambda * m as f64
}

/// Critical Sobolev exponent `2Q/(Q - 2)`; requires `Q > 2`.
pub fn critical_exponent(q: f64) -> Result<f64, AnalysisError> {
    if !(q > 2.0) {
        return Err(AnalysisError::QNotAboveTwo(q));
    }
    Ok(2.0 * q / (q - 2.0))
}

/// Holder conjugate `r/(r - 1)`; `r = 1` maps to infinity.
pub fn holder_conjugate(r: f64) -> Result<f64, AnalysisError> {
    if !(r >= 1.0) {
        return Err(AnalysisError::ConjugateBelowOne(r));
    }
    if r == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(r / (r - 1.0))
}

/// Derived exponents of a Grushin geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    pub m: u32,
    pub lambda: f64,
    /// Homogeneous dimension `(m + 1) + lambda * m`.
    pub q: f64,
    /// Critical Sobolev exponent `2Q/(Q - 2)`, defined only for `Q > 2`.
    pub two_star: Option<f64>,
}

impl Exponents {
    pub fn new(m: u32, lambda: f64) -> Result<Self, AnalysisError> {
        if m < 1 {
            return Err(AnalysisError::BadParameter {
                name: "m",
                requirement: ">= 1",
                value: m as f64,
            });
        }
        if !(lambda >= 0.0) {
            return Err(AnalysisError::BadParameter {
                name: "lambda",
                requirement: ">= 0",
                value: lambda,
            });
        }
        let q = homogeneous_dimension(m, lambda);
        let two_star = if q > 2.0 { Some(critical_exponent(q)?) } else { None };
        Ok(Self { m, lambda, q, two_star })
    }
}

/// Which integrability statement an exponent is requested for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularityCase {
    /// `nu = 1`: `s = 2Qr/(Q - 2r)`.
    NuEqOne,
    /// `nu > 1`: `s = Qr(nu + 1)/(Q - 2r)`.
    NuGtOne,
    /// `nu < 1` with `r >= (2*_lambda/(1 - nu))'`: `s = Qr(nu + 1)/(Q - 2r)`.
    NuLtOne,
    /// `nu < 1`, low summability: Sobolev exponent
    /// `q = Qr(nu + 1)/(Q - r(1 - nu))`.
    SobolevQ,
}

impl RegularityCase {
    pub fn name(self) -> &'static str {
        match self {
            RegularityCase::NuEqOne => "nu_eq_1",
            RegularityCase::NuGtOne => "nu_gt_1",
            RegularityCase::NuLtOne => "nu_lt_1",
            RegularityCase::SobolevQ => "sobolev_q",
        }
    }
}

impl std::str::FromStr for RegularityCase {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "nu_eq_1" => Ok(RegularityCase::NuEqOne),
            "nu_gt_1" => Ok(RegularityCase::NuGtOne),
            "nu_lt_1" => Ok(RegularityCase::NuLtOne),
            "sobolev_q" => Ok(RegularityCase::SobolevQ),
            other => Err(format!(
                "unknown case '{other}' (expected nu_eq_1, nu_gt_1, nu_lt_1 or sobolev_q)"
            )),
        }
    }
}

/// Integrability exponent for the requested regime. For the `s`-cases,
/// `r >= Q/2` is signaled as the distinct [`AnalysisError::LInftyRegime`]
/// outcome rather than a finite exponent.
pub fn regularity_exponent(
    case: RegularityCase,
    nu: f64,
    r: f64,
    q_dim: f64,
) -> Result<f64, AnalysisError> {
    if !(r >= 1.0) {
        return Err(AnalysisError::RBelowOne(r));
    }
    let half_q = q_dim / 2.0;
    match case {
        RegularityCase::NuEqOne => {
            if nu != 1.0 {
                return Err(AnalysisError::CaseMismatch { case: "nu_eq_1", nu });
            }
            if r >= half_q {
                return Err(AnalysisError::LInftyRegime { r, half_q });
            }
            Ok(2.0 * q_dim * r / (q_dim - 2.0 * r))
        }
        RegularityCase::NuGtOne => {
            if !(nu > 1.0) {
                return Err(AnalysisError::CaseMismatch { case: "nu_gt_1", nu });
            }
            if r >= half_q {
                return Err(AnalysisError::LInftyRegime { r, half_q });
            }
            Ok(q_dim * r * (nu + 1.0) / (q_dim - 2.0 * r))
        }
        RegularityCase::NuLtOne => {
            if !(nu > 0.0 && nu < 1.0) {
                return Err(AnalysisError::CaseMismatch { case: "nu_lt_1", nu });
            }
            let two_star = critical_exponent(q_dim)?;
            let min_r = holder_conjugate(two_star / (1.0 - nu))?;
            if r >= half_q {
                return Err(AnalysisError::LInftyRegime { r, half_q });
            }
            if r < min_r {
                return Err(AnalysisError::RBelowThreshold { r, min_r });
            }
            Ok(q_dim * r * (nu + 1.0) / (q_dim - 2.0 * r))
        }
        RegularityCase::SobolevQ => {
            if !(nu > 0.0 && nu < 1.0) {
                return Err(AnalysisError::CaseMismatch { case: "sobolev_q", nu });
            }
            if !(q_dim > 2.0) {
                return Err(AnalysisError::QNotAboveTwo(q_dim));
            }
            let max_r = 2.0 * q_dim / ((q_dim + 2.0) + nu * (q_dim - 2.0));
            if r >= max_r {
                return Err(AnalysisError::RAboveRange { r, max_r });
            }
            Ok(q_dim * r * (nu + 1.0) / (q_dim - r * (1.0 - nu)))
        }
    }
}

/// Trapezoid weight of node `(i, j)`.
#[inline]
fn node_weight(grid: &Grid, i: usize, j: usize) -> f64 {
    let wx = if i == 0 || i == grid.nx - 1 { grid.hx / 2.0 } else { grid.hx };
    let wy = if j == 0 || j == grid.ny - 1 { grid.hy / 2.0 } else { grid.hy };
    wx * wy
}

/// Signed trapezoid integral of a field.
pub fn integral(u: &Field) -> f64 {
    let g = u.grid();
    let mut acc = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            acc += node_weight(g, i, j) * u.get(i, j);
        }
    }
    acc
}

/// Trapezoid `L^p` norm; `p = infinity` returns `max |u|`.
pub fn lp_norm(u: &Field, p: f64) -> Result<f64, AnalysisError> {
    if p == f64::INFINITY {
        return Ok(u.sup_norm());
    }
    if !(p >= 1.0) {
        return Err(AnalysisError::PBelowOne(p));
    }
    let g = u.grid();
    let mut acc = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            acc += node_weight(g, i, j) * u.get(i, j).abs().powf(p);
        }
    }
    Ok(acc.powf(1.0 / p))
}

/// Discrete weighted Dirichlet energy
/// `hx*hy * (sum of x-difference quotients squared + |x_i|^{2λ}-weighted
/// y-difference quotients squared)`, equal to `hx*hy*<apply(op,u), u>` up to
/// reassociation.
pub fn energy(u: &Field, lambda: f64) -> Result<f64, AnalysisError> {
    if !u.is_dirichlet() {
        return Err(AnalysisError::NotDirichlet);
    }
    let g = u.grid();
    let mut acc = 0.0;
    for j in 1..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let d = (u.get(i + 1, j) - u.get(i, j)) / g.hx;
            acc += d * d;
        }
    }
    for i in 1..g.nx - 1 {
        let w = grushin_weight(g.x(i), lambda);
        if w != 0.0 {
            for j in 0..g.ny - 1 {
                let d = (u.get(i, j + 1) - u.get(i, j)) / g.hy;
                acc += w * d * d;
            }
        }
    }
    Ok(acc * g.hx * g.hy)
}

/// Quadrature measure of the super-level set `{u >= k}`.
pub fn level_set_measure(u: &Field, k: f64) -> f64 {
    let g = u.grid();
    let mut acc = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            if u.get(i, j) >= k {
                acc += node_weight(g, i, j);
            }
        }
    }
    acc
}

/// Level beyond which the level-set measure vanishes:
/// `k0 + d` with `d^alpha = C * 2^{alpha*beta/(beta-1)} * phi_k0^(beta-1)`.
pub fn stampacchia_threshold(
    c: f64,
    alpha: f64,
    beta: f64,
    k0: f64,
    phi_k0: f64,
) -> Result<f64, AnalysisError> {
    if !(c > 0.0) {
        return Err(AnalysisError::BadParameter { name: "C", requirement: "> 0", value: c });
    }
    if !(alpha > 0.0) {
        return Err(AnalysisError::BadParameter {
            name: "alpha",
            requirement: "> 0",
            value: alpha,
        });
    }
    if !(beta > 1.0) {
        return Err(AnalysisError::BadParameter {
            name: "beta",
            requirement: "> 1",
            value: beta,
        });
    }
    if !(phi_k0 >= 0.0) {
        return Err(AnalysisError::BadParameter {
            name: "phi_k0",
            requirement: ">= 0",
            value: phi_k0,
        });
    }
    let d = (c * 2f64.powf(alpha * beta / (beta - 1.0)) * phi_k0.powf(beta - 1.0)).powf(1.0 / alpha);
    Ok(k0 + d)
}

/// Minimum of `u` over grid nodes inside the closed window; `None` when the
/// window contains no node.
pub fn interior_min(u: &Field, window: &Domain) -> Option<f64> {
    let g = u.grid();
    let mut min: Option<f64> = None;
    for j in 0..g.ny {
        for i in 0..g.nx {
            if window.contains(g.x(i), g.y(j)) {
                let v = u.get(i, j);
                min = Some(match min {
                    Some(m) => m.min(v),
                    None => v,
                });
            }
        }
    }
    min
}

/// One named inequality verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let pass = lhs <= rhs * (1.0 + BOUND_SLACK);
        Self { name: name.into(), lhs, rhs, pass }
    }
}

/// Raw two-sided data behind the constant-free chain check for `nu < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainData {
    /// `r = (2*_lambda/(1 - nu))'`.
    pub r: f64,
    pub f_norm_r: f64,
    pub u_norm_two_star: f64,
}

/// Norms, energy, level sets and bound verdicts for one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// `(p, ||u||_p)` pairs, ascending in `p`.
    pub lp_norms: Vec<(f64, f64)>,
    pub energy: f64,
    pub sup_norm: f64,
    pub interior_min: Option<f64>,
    /// `(k, measure of {u >= k})` pairs, ascending in `k`.
    pub level_sets: Vec<(f64, f64)>,
    pub bound_checks: Vec<BoundCheck>,
    pub chain_data: Option<ChainData>,
}

/// Norms/energy/level sets of a field with no bound verdicts attached.
pub fn basic_report(u: &Field, lambda: f64) -> Result<SolveReport, AnalysisError> {
    let sup = u.sup_norm();
    let mut level_sets = Vec::new();
    if sup > 0.0 {
        for i in 1..=8 {
            let k = sup * i as f64 / 8.0;
            level_sets.push((k, level_set_measure(u, k)));
        }
    }
    Ok(SolveReport {
        lp_norms: vec![(1.0, lp_norm(u, 1.0)?), (2.0, lp_norm(u, 2.0)?)],
        energy: energy(u, lambda)?,
        sup_norm: sup,
        interior_min: None,
        level_sets,
        bound_checks: Vec::new(),
        chain_data: None,
    })
}

/// Energy bound for `nu = 1`: `energy(u) <= integral(f)`.
pub fn energy_bound_check(u: &Field, f: &Field, nu: f64, lambda: f64) -> Result<BoundCheck, AnalysisError> {
    if nu != 1.0 {
        return Err(AnalysisError::CaseMismatch { case: "energy bound (nu = 1)", nu });
    }
    if u.grid() != f.grid() {
        return Err(AnalysisError::GridMismatch);
    }
    Ok(BoundCheck::new("energy_le_int_f", energy(u, lambda)?, integral(f)))
}

/// Power-energy bound for `nu > 1`:
/// `energy(u^{(nu+1)/2}) <= (nu+1)^2/(4 nu) * integral(f)`.
pub fn power_energy_bound_check(u: &Field, f: &Field, nu: f64, lambda: f64) -> Result<BoundCheck, AnalysisError> {
    if !(nu > 1.0) {
        return Err(AnalysisError::CaseMismatch { case: "power-energy bound (nu > 1)", nu });
    }
    if u.grid() != f.grid() {
        return Err(AnalysisError::GridMismatch);
    }
    let p = (nu + 1.0) / 2.0;
    let up = u.map(|v| v.max(0.0).powf(p));
    let factor = (nu + 1.0) * (nu + 1.0) / (4.0 * nu);
    Ok(BoundCheck::new("power_energy_le_factor_int_f", energy(&up, lambda)?, factor * integral(f)))
}

/// Constant-free chain for `nu < 1`:
/// `energy(u) <= ||f||_r * (integral u^{2*})^{(1-nu)/2*}` with
/// `r = (2*/(1-nu))'`.
pub fn holder_chain_check(
    u: &Field,
    f: &Field,
    nu: f64,
    lambda: f64,
    exps: &Exponents,
) -> Result<(BoundCheck, ChainData), AnalysisError> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(AnalysisError::CaseMismatch { case: "holder chain (0 < nu < 1)", nu });
    }
    if u.grid() != f.grid() {
        return Err(AnalysisError::GridMismatch);
    }
    let two_star = exps.two_star.ok_or(AnalysisError::QNotAboveTwo(exps.q))?;
    let r = holder_conjugate(two_star / (1.0 - nu))?;
    let f_norm_r = lp_norm(f, r)?;
    let u_norm_two_star = lp_norm(u, two_star)?;
    let rhs = f_norm_r * u_norm_two_star.powf(1.0 - nu);
    let check = BoundCheck::new("holder_chain", energy(u, lambda)?, rhs);
    Ok((check, ChainData { r, f_norm_r, u_norm_two_star }))
}

/// Full report for a converged approximate solution: norms, energy, level
/// sets, interior minimum over `window` when given, and the bound verdict
/// for the exponent regime (none for variable exponents).
pub fn check_bounds(
    sol: &ApproxSolution,
    f: &Field,
    spec: &ProblemSpec,
    exps: &Exponents,
    window: Option<&Domain>,
) -> Result<SolveReport, AnalysisError> {
    let u = &sol.u;
    if u.grid() != f.grid() {
        return Err(AnalysisError::GridMismatch);
    }
    let mut report = basic_report(u, spec.lambda)?;
    if let Some(ts) = exps.two_star {
        report.lp_norms.push((ts, lp_norm(u, ts)?));
        report.lp_norms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite p"));
    }
    report.interior_min = window.and_then(|w| interior_min(u, w));
    match &spec.exponent {
        Exponent::Constant(nu) if *nu == 1.0 => {
            report.bound_checks.push(energy_bound_check(u, f, *nu, spec.lambda)?);
        }
        Exponent::Constant(nu) if *nu > 1.0 => {
            report.bound_checks.push(power_energy_bound_check(u, f, *nu, spec.lambda)?);
        }
        Exponent::Constant(nu) => {
            if exps.two_star.is_some() {
                let (check, data) = holder_chain_check(u, f, *nu, spec.lambda, exps)?;
                report.bound_checks.push(check);
                report.chain_data = Some(data);
            }
        }
        Exponent::Variable(_) => {}
    }
    Ok(report)
}
