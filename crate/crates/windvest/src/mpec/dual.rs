//! Mechanical LP dualization.
//!
//! For a minimization LP with all structure expressed as rows (variables
//! free), the dual system appends one signed dual variable per row, one
//! dual-feasibility equality per primal variable and the strong-duality
//! equality `c(u)'x = b(u)'y`. Any point satisfying the combined system is
//! primal- and dual-optimal, so an embedded LP can be replaced by the
//! system wherever its optimality (rather than its objective) is the
//! constraint. Placement-affine coefficients pass through untouched: a
//! coefficient `a(u)` on variable `x` in row `i` shows up as `a(u)` on
//! dual `y_i` in the dual-feasibility row of `x`.

use super::linprog::{Affine, LpError, PRow, PVar, ParamLp, Sense};

#[derive(Debug)]
pub struct Dualized {
    /// Primal rows (same indices as the input), then dual-feasibility
    /// rows, sign rows and the strong-duality row. Objective is empty.
    pub lp: ParamLp,
    /// Dual variable attached to each input row.
    pub duals: Vec<PVar>,
    /// Index of the strong-duality row within `lp.rows`.
    pub sd_row: usize,
}

/// Dual sign for a minimization primal: `>=` rows get nonnegative duals,
/// `<=` rows nonpositive, equalities free.
fn sign_sense(primal: Sense) -> Option<Sense> {
    match primal {
        Sense::Ge => Some(Sense::Ge),
        Sense::Le => Some(Sense::Le),
        Sense::Eq => None,
    }
}

pub fn dualize(p: &ParamLp) -> Result<Dualized, LpError> {
    // a variable with a cost that appears in no row makes the LP unbounded
    let mut appears = vec![false; p.vars.len()];
    for row in &p.rows {
        for (v, _) in &row.terms {
            appears[v.0 as usize] = true;
        }
    }
    for (v, c) in &p.objective {
        if (c.k != 0.0 || !c.u.is_empty()) && !appears[v.0 as usize] {
            return Err(LpError::UnboundedFreeVariable(
                p.vars[v.0 as usize].name.clone(),
            ));
        }
    }

    let mut out = p.clone();
    out.objective.clear();
    out.obj_offset = Affine::default();

    let duals: Vec<PVar> = p
        .rows
        .iter()
        .map(|row| out.add_var(format!("d.{}", row.name)))
        .collect();

    // transpose scatter: coefficients of x_j across rows
    let mut df_terms: Vec<Vec<(PVar, Affine)>> = vec![Vec::new(); p.vars.len()];
    for (i, row) in p.rows.iter().enumerate() {
        for (v, a) in &row.terms {
            df_terms[v.0 as usize].push((duals[i], a.clone()));
        }
    }
    let mut costs: Vec<Affine> = vec![Affine::default(); p.vars.len()];
    for (v, c) in &p.objective {
        let slot = &mut costs[v.0 as usize];
        slot.k += c.k;
        for &(m, coef) in &c.u {
            slot.add_u(m, coef);
        }
    }
    for j in 0..p.vars.len() {
        let name = format!("df.{}", p.vars[j].name);
        out.add_row(
            name,
            std::mem::take(&mut df_terms[j]),
            Sense::Eq,
            costs[j].clone(),
        );
    }

    for (i, row) in p.rows.iter().enumerate() {
        if let Some(sense) = sign_sense(row.sense) {
            out.add_row(
                format!("sg.{}", row.name),
                vec![(duals[i], Affine::constant(1.0))],
                sense,
                0.0,
            );
        }
    }

    // strong duality: c(u)'x - b(u)'y = 0
    let mut sd_terms: Vec<(PVar, Affine)> = Vec::new();
    for (j, c) in costs.into_iter().enumerate() {
        if c.k != 0.0 || !c.u.is_empty() {
            sd_terms.push((PVar(j as u32), c));
        }
    }
    for (i, row) in p.rows.iter().enumerate() {
        let b = &row.rhs;
        if b.k != 0.0 || !b.u.is_empty() {
            sd_terms.push((duals[i], b.scaled(-1.0)));
        }
    }
    let sd_row = out.add_row("sd", sd_terms, Sense::Eq, 0.0);

    Ok(Dualized {
        lp: out,
        duals,
        sd_row,
    })
}

/// Strong-duality residual of a dualized system at a candidate point,
/// evaluated on the original (pre-dualization) LP: primal objective minus
/// dual objective, both under placement values `u`.
pub fn duality_gap(p: &ParamLp, duals_of_rows: &[(usize, f64)], x: &[f64], u: &[f64]) -> f64 {
    let primal: f64 = p
        .objective
        .iter()
        .map(|(v, c)| c.eval(u) * x[v.0 as usize])
        .sum();
    let dual: f64 = duals_of_rows
        .iter()
        .map(|&(i, y)| p.rows[i].rhs.eval(u) * y)
        .sum();
    primal - dual
}
