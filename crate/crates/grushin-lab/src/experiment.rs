//! Experiment orchestration: build the problem from a config, drive the
//! solver modules, and collect deterministic tables and verdicts.

use thiserror::Error;

use crate::analysis::{check_bounds, AnalysisError, BoundCheck, Exponents, SolveReport};
use crate::config::{ExperimentConfig, ExperimentKind, NuSpec};
use crate::geometry::{GeometryError, Grid};
use crate::linsolve::{default_maxiter, solve_spd, LinSolveError};
use crate::operator::{assemble_grushin, Field, OperatorError};
use crate::semilinear::{
    scaling_check, solve_sequence, uniqueness_probe, ProblemSpec, SemilinearError,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("grid {nx}x{ny}: {source}")]
    AtGrid {
        nx: usize,
        ny: usize,
        #[source]
        source: Box<ExperimentError>,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Linear(#[from] LinSolveError),
    #[error(transparent)]
    Semilinear(#[from] SemilinearError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("config is incomplete for kind {0}: missing {1}")]
    MissingField(&'static str, &'static str),
}

/// One table cell; `Empty` renders as an empty CSV field / JSON null.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// Deterministic result of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub config_echo: Vec<(String, String)>,
    pub tables: Vec<Table>,
    pub checks: Vec<BoundCheck>,
    pub pass: bool,
}

fn at_grid<T>(nx: usize, ny: usize, r: Result<T, ExperimentError>) -> Result<T, ExperimentError> {
    r.map_err(|e| ExperimentError::AtGrid { nx, ny, source: Box::new(e) })
}

fn build_problem_spec(
    config: &ExperimentConfig,
    grid: &Grid,
    n: u64,
) -> Result<ProblemSpec, ExperimentError> {
    let nu = config
        .nu
        .as_ref()
        .ok_or(ExperimentError::MissingField("solver experiment", "nu"))?;
    let source = config
        .source
        .as_ref()
        .ok_or(ExperimentError::MissingField("solver experiment", "source"))?;
    let mut spec = ProblemSpec::new(config.lambda, nu.exponent(grid), source.field(grid), n)?
        .with_picard_tol(config.picard_tol)?
        .with_linear_tol(config.linear_tol)?
        .with_picard_maxiter(config.picard_maxiter);
    if let Some(omega) = config.relaxation {
        spec = spec.with_relaxation(omega)?;
    }
    Ok(spec)
}

/// Run one experiment to completion. Solver failures are propagated with the
/// grid (and truncation level) they occurred at, never swallowed.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let mut tables = Vec::new();
    let mut checks: Vec<BoundCheck> = Vec::new();

    match config.kind {
        ExperimentKind::Manufactured => {
            run_manufactured(config, &mut tables, &mut checks)?;
        }
        ExperimentKind::SequenceStudy => {
            run_sequence(config, &mut tables, &mut checks, false)?;
        }
        ExperimentKind::VariableExponent => {
            run_sequence(config, &mut tables, &mut checks, true)?;
        }
        ExperimentKind::RegularitySweep => {
            run_regularity_sweep(config, &mut tables, &mut checks)?;
        }
        ExperimentKind::ScalingCheck => {
            run_scaling(config, &mut tables, &mut checks)?;
        }
        ExperimentKind::UniquenessProbe => {
            run_uniqueness(config, &mut tables, &mut checks)?;
        }
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(ExperimentReport {
        kind: config.kind,
        config_echo: config.echo(),
        tables,
        checks,
        pass,
    })
}

/// Manufactured pair on the configured rectangle:
/// `u*(x, y) = (bx - x)(x - ax) sin(pi (y - ay)/Ly)` vanishes on the whole
/// boundary and has
/// `-Δ_λ u* = 2 sin(pi (y - ay)/Ly) + |x|^{2λ} (pi/Ly)^2 (bx - x)(x - ax) sin(pi (y - ay)/Ly)`.
fn run_manufactured(
    config: &ExperimentConfig,
    tables: &mut Vec<Table>,
    checks: &mut Vec<BoundCheck>,
) -> Result<(), ExperimentError> {
    let d = config.domain;
    let lambda = config.lambda;
    let pi_ly = std::f64::consts::PI / d.height();
    let exact_fn = move |x: f64, y: f64| (d.bx - x) * (x - d.ax) * (pi_ly * (y - d.ay)).sin();
    let rhs_fn = move |x: f64, y: f64| {
        let s = (pi_ly * (y - d.ay)).sin();
        2.0 * s + crate::operator::grushin_weight(x, lambda) * pi_ly * pi_ly * (d.bx - x) * (x - d.ax) * s
    };

    let mut rows = Vec::new();
    let mut prev_err: Option<(usize, f64)> = None;
    for &(nx, ny) in &config.grids {
        let grid = Grid::new(d, nx, ny)?;
        let op = assemble_grushin(&grid, lambda)?;
        let rhs = Field::from_fn(&grid, rhs_fn);
        let exact = Field::dirichlet_from_fn(&grid, exact_fn);
        let (u, _stats) = at_grid(
            nx,
            ny,
            solve_spd(&op, &rhs, config.linear_tol, default_maxiter(op.dim()), None)
                .map_err(ExperimentError::from),
        )?;
        let err = Field::sup_diff(&u, &exact)?;
        let ratio = prev_err.map(|(_, e)| e / err);
        rows.push(vec![
            Cell::Int(nx as i64),
            Cell::Int(ny as i64),
            Cell::Float(grid.hx),
            Cell::Float(grid.hy),
            Cell::Float(err),
            ratio.map_or(Cell::Empty, Cell::Float),
        ]);
        if let Some(r) = ratio {
            checks.push(BoundCheck::new(format!("ratio_lower_nx{nx}"), 3.0, r));
            checks.push(BoundCheck::new(format!("ratio_upper_nx{nx}"), r, 5.0));
        }
        prev_err = Some((nx, err));
    }
    tables.push(Table {
        name: "convergence".to_string(),
        columns: vec!["nx", "ny", "hx", "hy", "max_error", "ratio"],
        rows,
    });
    Ok(())
}

fn run_sequence(
    config: &ExperimentConfig,
    tables: &mut Vec<Table>,
    checks: &mut Vec<BoundCheck>,
    variable: bool,
) -> Result<(), ExperimentError> {
    let (nx, ny) = config.grids[0];
    let grid = Grid::new(config.domain, nx, ny)?;
    let n_list = config
        .n_list
        .as_ref()
        .ok_or(ExperimentError::MissingField("sequence study", "n_list"))?;
    let window = config
        .window
        .ok_or(ExperimentError::MissingField("sequence study", "window"))?;
    let spec = build_problem_spec(config, &grid, n_list[0])?;
    let study = at_grid(
        nx,
        ny,
        solve_sequence(&spec, &grid, n_list, &window).map_err(ExperimentError::from),
    )?;
    let exps = Exponents::new(1, config.lambda)?;
    let f = spec.source.clone();

    let mut rows = Vec::new();
    for (idx, sol) in study.solutions.iter().enumerate() {
        let report: SolveReport = check_bounds(sol, &f, &spec, &exps, Some(&window))?;
        let defect = if idx == 0 {
            Cell::Empty
        } else {
            Cell::Float(study.monotonicity_defects[idx - 1])
        };
        rows.push(vec![
            Cell::Int(sol.n as i64),
            Cell::Float(report.sup_norm),
            Cell::Float(report.energy),
            Cell::Float(study.interior_minima[idx]),
            defect,
            Cell::Int(sol.picard_iterations as i64),
        ]);
        for check in &report.bound_checks {
            checks.push(BoundCheck::new(
                format!("{}_n{}", check.name, sol.n),
                check.lhs,
                check.rhs,
            ));
        }
        if variable {
            checks.push(BoundCheck::new(
                format!("energy_finite_n{}", sol.n),
                report.energy,
                f64::MAX,
            ));
        }
        checks.push(BoundCheck::new(
            format!("interior_min_positive_n{}", sol.n),
            1e-12,
            study.interior_minima[idx],
        ));
        if idx > 0 {
            checks.push(BoundCheck::new(
                format!("monotonicity_defect_n{}", sol.n),
                -study.monotonicity_defects[idx - 1],
                1e-10,
            ));
            checks.push(BoundCheck::new(
                format!("interior_min_nondecreasing_n{}", sol.n),
                study.interior_minima[idx - 1] - study.interior_minima[idx],
                1e-10,
            ));
        }
    }
    tables.push(Table {
        name: "sequence".to_string(),
        columns: vec![
            "n",
            "sup_norm",
            "energy",
            "interior_min",
            "monotonicity_defect",
            "picard_iterations",
        ],
        rows,
    });
    Ok(())
}

fn run_regularity_sweep(
    config: &ExperimentConfig,
    tables: &mut Vec<Table>,
    checks: &mut Vec<BoundCheck>,
) -> Result<(), ExperimentError> {
    let n = config.n.ok_or(ExperimentError::MissingField("regularity sweep", "n"))?;
    let ladder: Vec<u64> = {
        let mut l = Vec::new();
        let mut level = 1u64;
        while level < n {
            l.push(level);
            level *= 2;
        }
        l.push(n);
        l
    };

    let mut rows = Vec::new();
    let mut prev_sup: Option<f64> = None;
    for &(nx, ny) in &config.grids {
        let grid = Grid::new(config.domain, nx, ny)?;
        let spec = build_problem_spec(config, &grid, ladder[0])?;
        // warm the solve through the truncation ladder on each grid
        let solutions = at_grid(nx, ny, {
            let window = grid.domain; // whole domain: minimum is just reported
            solve_sequence(&spec, &grid, &ladder, &window).map_err(ExperimentError::from)
        })?;
        let sup = solutions.solutions.last().expect("ladder nonempty").u.sup_norm();
        let rel_change = prev_sup.map(|p| (sup - p).abs() / p);
        rows.push(vec![
            Cell::Int(nx as i64),
            Cell::Int(ny as i64),
            Cell::Float(sup),
            rel_change.map_or(Cell::Empty, Cell::Float),
        ]);
        if let Some(rc) = rel_change {
            checks.push(BoundCheck::new(format!("sup_norm_stabilizes_nx{nx}"), rc, 0.05));
        }
        prev_sup = Some(sup);
    }
    tables.push(Table {
        name: "regularity_sweep".to_string(),
        columns: vec!["nx", "ny", "sup_norm", "rel_change"],
        rows,
    });
    Ok(())
}

fn run_scaling(
    config: &ExperimentConfig,
    tables: &mut Vec<Table>,
    checks: &mut Vec<BoundCheck>,
) -> Result<(), ExperimentError> {
    let (nx, ny) = config.grids[0];
    let grid = Grid::new(config.domain, nx, ny)?;
    let t = config.t.ok_or(ExperimentError::MissingField("scaling check", "t"))?;
    let levels: Vec<u64> = match (&config.n_list, config.n) {
        (Some(list), _) => list.clone(),
        (None, Some(n)) => vec![n],
        (None, None) => return Err(ExperimentError::MissingField("scaling check", "n")),
    };
    let nu = match config.nu {
        Some(NuSpec::Constant(nu)) => nu,
        _ => return Err(ExperimentError::MissingField("scaling check", "nu")),
    };
    let factor = t.powf(1.0 / (1.0 + nu));

    let mut rows = Vec::new();
    let mut prev_dev: Option<(u64, f64)> = None;
    for &n in &levels {
        let spec = build_problem_spec(config, &grid, n)?;
        let dev =
            at_grid(nx, ny, scaling_check(&spec, &grid, t).map_err(ExperimentError::from))?;
        rows.push(vec![
            Cell::Int(n as i64),
            Cell::Float(t),
            Cell::Float(factor),
            Cell::Float(dev),
        ]);
        checks.push(BoundCheck::new(format!("scaling_dev_n{n}"), dev, config.scaling_tol));
        if let Some((pn, pd)) = prev_dev {
            checks.push(BoundCheck::new(
                format!("scaling_dev_decreasing_n{pn}_to_n{n}"),
                dev,
                pd,
            ));
        }
        prev_dev = Some((n, dev));
    }
    tables.push(Table {
        name: "scaling".to_string(),
        columns: vec!["n", "t", "predicted_factor", "deviation"],
        rows,
    });
    Ok(())
}

fn run_uniqueness(
    config: &ExperimentConfig,
    tables: &mut Vec<Table>,
    checks: &mut Vec<BoundCheck>,
) -> Result<(), ExperimentError> {
    let (nx, ny) = config.grids[0];
    let grid = Grid::new(config.domain, nx, ny)?;
    let n = config.n.ok_or(ExperimentError::MissingField("uniqueness probe", "n"))?;
    let spec = build_problem_spec(config, &grid, n)?;
    let init_a = Field::zeros(&grid);
    let init_b = Field::dirichlet_from_fn(&grid, |_, _| 1.0);
    let gap = at_grid(
        nx,
        ny,
        uniqueness_probe(&spec, &grid, &init_a, &init_b).map_err(ExperimentError::from),
    )?;
    let threshold = 10.0 * spec.picard_tol;
    let check = BoundCheck::new("uniqueness_gap", gap, threshold);
    let nu = match config.nu {
        Some(NuSpec::Constant(nu)) => nu,
        _ => return Err(ExperimentError::MissingField("uniqueness probe", "nu")),
    };
    tables.push(Table {
        name: "uniqueness".to_string(),
        columns: vec!["nu", "n", "gap", "threshold", "pass"],
        rows: vec![vec![
            Cell::Float(nu),
            Cell::Int(n as i64),
            Cell::Float(gap),
            Cell::Float(threshold),
            Cell::Bool(check.pass),
        ]],
    });
    checks.push(check);
    Ok(())
}
