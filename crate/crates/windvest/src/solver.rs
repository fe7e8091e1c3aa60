//! Backend-neutral solving contract. Exactly one backend (HiGHS) is
//! bundled; everything above this module is backend-agnostic.
//!
//! `WINDVEST_SOLVER` selects the backend by name (only `highs` exists),
//! `WINDVEST_SOLVER_THREADS` caps solver threads. LP-file export/import is
//! provided for cross-solver debugging.

mod lpfile;

pub use lpfile::{parse_lp_file, write_lp_file};

use highs::{HighsModelStatus, RowProblem, Sense as HighsSense};
use thiserror::Error;

use crate::mpec::linprog::Lp;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("unknown solver backend `{0}` (available: highs)")]
    UnknownBackend(String),
    #[error("backend failure: {0}")]
    Backend(String),
    #[error("duals were requested but the model has no feasible incumbent")]
    NoIncumbent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Stopped on a time/gap/iteration limit or with numerical trouble;
    /// primal values are the incumbent if one exists.
    Limit,
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub need_duals: bool,
    pub time_limit: Option<f64>,
    /// Relative MIP gap tolerance; ignored for pure LPs.
    pub gap_tol: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub primal: Vec<f64>,
    /// One dual per solver row, when requested. For mixed-integer programs
    /// these come from a fix-and-resolve: integers pinned at the incumbent,
    /// the remaining LP re-solved.
    pub row_duals: Option<Vec<f64>>,
    /// Reduced costs, when requested.
    pub col_duals: Option<Vec<f64>>,
    pub objective: f64,
    /// Relative MIP gap at termination (0 for LPs).
    pub gap: f64,
    pub has_incumbent: bool,
}

fn backend_from_env() -> Result<(), SolveError> {
    match std::env::var("WINDVEST_SOLVER") {
        Ok(name) if !name.is_empty() && name != "highs" => {
            Err(SolveError::UnknownBackend(name))
        }
        _ => Ok(()),
    }
}

fn threads_from_env() -> i32 {
    std::env::var("WINDVEST_SOLVER_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1)
}

fn run_highs(lp: &Lp, integers: bool, opts: &SolveOptions) -> Result<RawSolve, SolveError> {
    let mut pb = RowProblem::default();
    for col in &lp.cols {
        if integers && col.integer {
            pb.add_integer_column(col.cost, col.lower..=col.upper);
        } else {
            pb.add_column(col.cost, col.lower..=col.upper);
        }
    }
    for row in &lp.rows {
        let coeffs: Vec<(highs::Col, f64)> = row
            .coeffs
            .iter()
            .map(|&(j, a)| (highs::Col::from(j), a))
            .collect();
        pb.add_row(row.lower..=row.upper, &coeffs);
    }
    let mut model = pb.optimise(if lp.maximize {
        HighsSense::Maximise
    } else {
        HighsSense::Minimise
    });
    model.set_option("output_flag", false);
    model.set_option("threads", threads_from_env());
    if let Some(t) = opts.time_limit {
        model.set_option("time_limit", t);
    }
    if let Some(g) = opts.gap_tol {
        model.set_option("mip_rel_gap", g);
    }
    let solved = model.try_solve().map_err(|e| {
        SolveError::Backend(format!("HiGHS returned status {e:?}"))
    })?;
    let status = match solved.status() {
        HighsModelStatus::Optimal => SolveStatus::Optimal,
        HighsModelStatus::Infeasible => SolveStatus::Infeasible,
        HighsModelStatus::Unbounded | HighsModelStatus::UnboundedOrInfeasible => {
            SolveStatus::Unbounded
        }
        _ => SolveStatus::Limit,
    };
    let has_solution = matches!(
        solved.primal_solution_status(),
        highs::HighsSolutionStatus::Feasible
    );
    let (primal, row_duals, col_duals) = if has_solution {
        let sol = solved.get_solution();
        (
            sol.columns().to_vec(),
            sol.dual_rows().to_vec(),
            sol.dual_columns().to_vec(),
        )
    } else {
        (Vec::new(), Vec::new(), Vec::new())
    };
    let objective = if has_solution {
        lp.objective_of(&primal)
    } else {
        f64::NAN
    };
    let gap = if integers && lp.n_integer() > 0 && has_solution {
        // HiGHS reports NaN gap for some limit exits
        let g = solved.mip_gap();
        if g.is_finite() {
            g
        } else {
            f64::INFINITY
        }
    } else {
        0.0
    };
    Ok(RawSolve {
        status,
        primal,
        row_duals,
        col_duals,
        objective,
        gap,
        has_solution,
    })
}

struct RawSolve {
    status: SolveStatus,
    primal: Vec<f64>,
    row_duals: Vec<f64>,
    col_duals: Vec<f64>,
    objective: f64,
    gap: f64,
    has_solution: bool,
}

/// Solves `lp` under the options contract. Re-solving an identical request
/// returns an identical status and objective.
pub fn solve(lp: &Lp, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    backend_from_env()?;
    let is_mip = lp.n_integer() > 0;
    let raw = run_highs(lp, true, opts)?;

    if !opts.need_duals {
        return Ok(SolveResult {
            status: raw.status,
            primal: raw.primal,
            row_duals: None,
            col_duals: None,
            objective: raw.objective,
            gap: raw.gap,
            has_incumbent: raw.has_solution,
        });
    }

    if !is_mip {
        return Ok(SolveResult {
            status: raw.status,
            row_duals: Some(raw.row_duals),
            col_duals: Some(raw.col_duals),
            primal: raw.primal,
            objective: raw.objective,
            gap: 0.0,
            has_incumbent: raw.has_solution,
        });
    }

    // fix-and-resolve: pin integers at the incumbent, read LP duals
    if !raw.has_solution {
        return Err(SolveError::NoIncumbent);
    }
    let mut fixed = lp.clone();
    for (j, col) in fixed.cols.iter_mut().enumerate() {
        if col.integer {
            let v = raw.primal[j].round();
            col.lower = v;
            col.upper = v;
            col.integer = false;
        }
    }
    let re = run_highs(&fixed, false, &SolveOptions::default())?;
    Ok(SolveResult {
        status: raw.status,
        primal: re.primal,
        row_duals: Some(re.row_duals),
        col_duals: Some(re.col_duals),
        objective: re.objective,
        gap: raw.gap,
        has_incumbent: true,
    })
}
