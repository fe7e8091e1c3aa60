//! Lowering of a placement-parametric constraint system to a concrete
//! mixed-integer program.
//!
//! Placement parameters become binary columns. A product `u * x` of a
//! binary and a continuous variable with bounds `[L, U]` is replaced by a
//! new variable `z` and four envelope rows, exact for binary `u`:
//!
//! ```text
//! z <= U u        z <= x - L (1 - u)
//! z >= L u        z >= x - U (1 - u)
//! ```
//!
//! Single-variable rows with constant structure fold into column bounds.

use std::collections::HashMap;

use super::linprog::{Column, Lp, LpError, LpRow, PVar, ParamLp, Sense, UParam};

/// Envelope rows for one linearized product, as (coeffs on [z, u, x],
/// sense, rhs) tuples. Exposed for direct use and testing.
pub fn linearize_product(lo: f64, hi: f64) -> [([f64; 3], Sense, f64); 4] {
    [
        ([1.0, -hi, 0.0], Sense::Le, 0.0),   // z <= U u
        ([1.0, -lo, 0.0], Sense::Ge, 0.0),   // z >= L u
        ([1.0, -lo, -1.0], Sense::Le, -lo),  // z <= x - L(1-u)
        ([1.0, -hi, -1.0], Sense::Ge, -hi),  // z >= x - U(1-u)
    ]
}

/// Maximized investment objective over placement binaries, system
/// variables and their products.
#[derive(Debug, Clone, Default)]
pub struct MilpObjective {
    pub constant: f64,
    pub u_lin: Vec<(UParam, f64)>,
    pub var_lin: Vec<(PVar, f64)>,
    pub products: Vec<(UParam, PVar, f64)>,
}

/// Pure placement row, e.g. the one-node-per-project rule.
#[derive(Debug, Clone)]
pub struct PlacementRow {
    pub name: String,
    pub terms: Vec<(UParam, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct ProductVar {
    pub u: UParam,
    pub x: PVar,
    pub col: usize,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug)]
pub struct MilpArtifacts {
    pub lp: Lp,
    /// Placement parameter -> binary column.
    pub u_cols: Vec<usize>,
    /// System variable -> continuous column.
    pub var_cols: Vec<usize>,
    pub products: Vec<ProductVar>,
}

impl MilpArtifacts {
    pub fn value(&self, primal: &[f64], v: PVar) -> f64 {
        primal[self.var_cols[v.0 as usize]]
    }

    pub fn u_value(&self, primal: &[f64], u: UParam) -> f64 {
        primal[self.u_cols[u.0 as usize]]
    }

    /// Variables sitting at an artificial envelope bound, within
    /// `tol * max(1, |bound|)`. A hit means the big-M was too tight and
    /// the model should be rebuilt with wider hints.
    pub fn hint_violations(&self, primal: &[f64], tol: f64) -> Vec<String> {
        let mut seen: HashMap<u32, ()> = HashMap::new();
        let mut out = Vec::new();
        for p in &self.products {
            if seen.insert(p.x.0, ()).is_some() {
                continue;
            }
            let x = primal[self.var_cols[p.x.0 as usize]];
            for bound in [p.lo, p.hi] {
                if (x - bound).abs() <= tol * bound.abs().max(1.0) {
                    out.push(format!(
                        "{} = {x} at envelope bound {bound}",
                        self.lp.cols[self.var_cols[p.x.0 as usize]].name
                    ));
                }
            }
        }
        out
    }
}

/// Scale factor applied to hints on rebuild after an envelope-bound hit.
pub const HINT_GROWTH: f64 = 2.0;

pub fn lower_to_milp(
    sys: &ParamLp,
    u_names: &[String],
    placement_rows: &[PlacementRow],
    objective: &MilpObjective,
    hint_scale: f64,
) -> Result<MilpArtifacts, LpError> {
    let n_u = u_names.len();
    let mut lp = Lp {
        cols: Vec::with_capacity(n_u + sys.vars.len()),
        rows: Vec::new(),
        maximize: true,
        offset: objective.constant,
    };
    let u_cols: Vec<usize> = u_names
        .iter()
        .map(|name| {
            lp.cols.push(Column {
                name: format!("u.{name}"),
                lower: 0.0,
                upper: 1.0,
                cost: 0.0,
                integer: true,
            });
            lp.cols.len() - 1
        })
        .collect();
    let var_cols: Vec<usize> = sys
        .vars
        .iter()
        .map(|v| {
            lp.cols.push(Column {
                name: v.name.clone(),
                lower: f64::NEG_INFINITY,
                upper: f64::INFINITY,
                cost: 0.0,
                integer: false,
            });
            lp.cols.len() - 1
        })
        .collect();

    // widened-hint lookup shared by products and envelope emission
    let hint = |v: PVar| -> Result<(f64, f64), LpError> {
        match sys.vars[v.0 as usize].hint {
            Some((lo, hi)) if lo.is_finite() && hi.is_finite() => {
                Ok((lo * hint_scale, hi * hint_scale))
            }
            _ => Err(LpError::MissingBounds(sys.vars[v.0 as usize].name.clone())),
        }
    };

    let mut products: Vec<ProductVar> = Vec::new();
    let mut product_col: HashMap<(u32, u32), usize> = HashMap::new();
    let mut get_product = |lp: &mut Lp,
                           products: &mut Vec<ProductVar>,
                           product_col: &mut HashMap<(u32, u32), usize>,
                           u: UParam,
                           x: PVar|
     -> Result<usize, LpError> {
        if let Some(&col) = product_col.get(&(u.0, x.0)) {
            return Ok(col);
        }
        let (lo, hi) = hint(x)?;
        let z = lp.cols.len();
        lp.cols.push(Column {
            name: format!("z.{}*{}", u_names[u.0 as usize], sys.vars[x.0 as usize].name),
            lower: lo.min(0.0),
            upper: hi.max(0.0),
            cost: 0.0,
            integer: false,
        });
        // the hint box also bounds x itself; envelopes assume it
        let xcol = var_cols[x.0 as usize];
        lp.cols[xcol].lower = lp.cols[xcol].lower.max(lo);
        lp.cols[xcol].upper = lp.cols[xcol].upper.min(hi);
        for (k, (coef, sense, rhs)) in linearize_product(lo, hi).into_iter().enumerate() {
            let coeffs = vec![
                (z, coef[0]),
                (u_cols[u.0 as usize], coef[1]),
                (xcol, coef[2]),
            ]
            .into_iter()
            .filter(|&(_, a)| a != 0.0)
            .collect();
            let (lo_r, hi_r) = match sense {
                Sense::Le => (f64::NEG_INFINITY, rhs),
                Sense::Ge => (rhs, f64::INFINITY),
                Sense::Eq => (rhs, rhs),
            };
            lp.rows.push(LpRow {
                name: format!("env{k}.{}", lp.cols[z].name),
                lower: lo_r,
                upper: hi_r,
                coeffs,
            });
        }
        product_col.insert((u.0, x.0), z);
        products.push(ProductVar {
            u,
            x,
            col: z,
            lo,
            hi,
        });
        Ok(z)
    };

    for row in &sys.rows {
        // constant-structure single-variable rows become column bounds
        if row.terms.len() == 1 && row.terms[0].1.is_constant() && row.rhs.is_constant() {
            let (v, a) = (&row.terms[0].0, row.terms[0].1.k);
            if a != 0.0 {
                let col = &mut lp.cols[var_cols[v.0 as usize]];
                let bound = row.rhs.k / a;
                let tighten_upper = (row.sense == Sense::Le) == (a > 0.0);
                match row.sense {
                    Sense::Eq => {
                        col.lower = col.lower.max(bound);
                        col.upper = col.upper.min(bound);
                    }
                    _ if tighten_upper => col.upper = col.upper.min(bound),
                    _ => col.lower = col.lower.max(bound),
                }
                continue;
            }
        }
        let mut coeffs: Vec<(usize, f64)> = Vec::with_capacity(row.terms.len() + 2);
        for (v, a) in &row.terms {
            if a.k != 0.0 {
                coeffs.push((var_cols[v.0 as usize], a.k));
            }
            for &(m, c) in &a.u {
                let z = get_product(&mut lp, &mut products, &mut product_col, m, *v)?;
                coeffs.push((z, c));
            }
        }
        for &(m, c) in &row.rhs.u {
            coeffs.push((u_cols[m.0 as usize], -c));
        }
        let (lo_r, hi_r) = match row.sense {
            Sense::Le => (f64::NEG_INFINITY, row.rhs.k),
            Sense::Ge => (row.rhs.k, f64::INFINITY),
            Sense::Eq => (row.rhs.k, row.rhs.k),
        };
        lp.rows.push(LpRow {
            name: row.name.clone(),
            lower: lo_r,
            upper: hi_r,
            coeffs,
        });
    }

    for prow in placement_rows {
        let coeffs = prow
            .terms
            .iter()
            .map(|&(m, c)| (u_cols[m.0 as usize], c))
            .collect();
        let (lo_r, hi_r) = match prow.sense {
            Sense::Le => (f64::NEG_INFINITY, prow.rhs),
            Sense::Ge => (prow.rhs, f64::INFINITY),
            Sense::Eq => (prow.rhs, prow.rhs),
        };
        lp.rows.push(LpRow {
            name: prow.name.clone(),
            lower: lo_r,
            upper: hi_r,
            coeffs,
        });
    }

    for &(m, c) in &objective.u_lin {
        lp.cols[u_cols[m.0 as usize]].cost += c;
    }
    for &(v, c) in &objective.var_lin {
        lp.cols[var_cols[v.0 as usize]].cost += c;
    }
    for &(m, v, c) in &objective.products {
        let z = get_product(&mut lp, &mut products, &mut product_col, m, v)?;
        lp.cols[z].cost += c;
    }

    Ok(MilpArtifacts {
        lp,
        u_cols,
        var_cols,
        products,
    })
}
