//! Backend-neutral linear-program representations.
//!
//! [`ParamLp`] is a minimization LP whose coefficients and right-hand
//! sides are affine in a set of external binary parameters (the placement
//! variables). With the parameters fixed it instantiates to a concrete
//! [`Lp`]; kept symbolic it can be dualized mechanically, which is how the
//! embedded market-clearing problems become constraint systems of the
//! investment MILPs.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("variable `{0}` has no finite bounds for product linearization; an explicit big-M is required")]
    MissingBounds(String),
    #[error("variable `{0}` has a cost but appears in no row; the LP is unbounded")]
    UnboundedFreeVariable(String),
    #[error("placement parameter count mismatch: expected {expected}, got {got}")]
    ParamCount { expected: usize, got: usize },
}

/// Index of a variable within a [`ParamLp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PVar(pub u32);

/// Index of a binary placement parameter (one per admissible
/// project-node pair).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UParam(pub u32);

/// `k + sum(c_m * u_m)` over placement parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Affine {
    pub k: f64,
    pub u: Vec<(UParam, f64)>,
}

impl Affine {
    pub fn constant(k: f64) -> Self {
        Affine { k, u: Vec::new() }
    }

    pub fn term(k: f64, u: UParam, coef: f64) -> Self {
        Affine {
            k,
            u: vec![(u, coef)],
        }
    }

    pub fn is_constant(&self) -> bool {
        self.u.is_empty()
    }

    pub fn add_u(&mut self, u: UParam, coef: f64) {
        if coef != 0.0 {
            self.u.push((u, coef));
        }
    }

    pub fn eval(&self, u_values: &[f64]) -> f64 {
        self.k
            + self
                .u
                .iter()
                .map(|(m, c)| c * u_values[m.0 as usize])
                .sum::<f64>()
    }

    pub fn scaled(&self, t: f64) -> Affine {
        Affine {
            k: self.k * t,
            u: self.u.iter().map(|&(m, c)| (m, c * t)).collect(),
        }
    }
}

impl From<f64> for Affine {
    fn from(k: f64) -> Self {
        Affine::constant(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct PRow {
    pub name: String,
    pub terms: Vec<(PVar, Affine)>,
    pub sense: Sense,
    pub rhs: Affine,
}

#[derive(Debug, Clone)]
pub struct PVarInfo {
    pub name: String,
    /// Finite interval used to build product envelopes when this variable
    /// multiplies a placement binary. `None` means no products allowed.
    pub hint: Option<(f64, f64)>,
}

/// Minimization LP, affine in the placement parameters. All structural
/// restrictions (including variable bounds) are rows, so that dualization
/// emits one dual variable per restriction.
#[derive(Debug, Clone, Default)]
pub struct ParamLp {
    pub vars: Vec<PVarInfo>,
    pub rows: Vec<PRow>,
    /// Objective terms; coefficients may carry placement terms.
    pub objective: Vec<(PVar, Affine)>,
    pub obj_offset: Affine,
}

impl ParamLp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> PVar {
        self.vars.push(PVarInfo {
            name: name.into(),
            hint: None,
        });
        PVar(self.vars.len() as u32 - 1)
    }

    pub fn set_hint(&mut self, var: PVar, lo: f64, hi: f64) {
        self.vars[var.0 as usize].hint = Some((lo, hi));
    }

    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(PVar, Affine)>,
        sense: Sense,
        rhs: impl Into<Affine>,
    ) -> usize {
        self.rows.push(PRow {
            name: name.into(),
            terms,
            sense,
            rhs: rhs.into(),
        });
        self.rows.len() - 1
    }

    pub fn add_objective(&mut self, var: PVar, coef: impl Into<Affine>) {
        self.objective.push((var, coef.into()));
    }

    /// Appends `other`'s variables and rows, returning the variable-index
    /// offset. `other`'s objective is dropped; callers compose objectives
    /// explicitly.
    pub fn absorb(&mut self, other: ParamLp) -> u32 {
        let offset = self.vars.len() as u32;
        self.vars.extend(other.vars);
        for mut row in other.rows {
            for (v, _) in row.terms.iter_mut() {
                v.0 += offset;
            }
            self.rows.push(row);
        }
        offset
    }

    /// Fixes the placement parameters and produces a concrete LP.
    /// Single-variable rows with unit structure are folded into column
    /// bounds; `row_map[i]` gives the solver row of retained row `i`.
    pub fn instantiate(&self, u_values: &[f64]) -> Instantiated {
        let mut lp = Lp {
            maximize: false,
            offset: self.obj_offset.eval(u_values),
            cols: self
                .vars
                .iter()
                .map(|v| Column {
                    name: v.name.clone(),
                    lower: f64::NEG_INFINITY,
                    upper: f64::INFINITY,
                    cost: 0.0,
                    integer: false,
                })
                .collect(),
            rows: Vec::new(),
        };
        for (v, c) in &self.objective {
            lp.cols[v.0 as usize].cost += c.eval(u_values);
        }
        let mut row_map = vec![None; self.rows.len()];
        for (i, row) in self.rows.iter().enumerate() {
            let rhs = row.rhs.eval(u_values);
            // fold `a * x {sense} rhs` with a single term into column bounds
            if row.terms.len() == 1 {
                let (v, a) = &row.terms[0];
                let a = a.eval(u_values);
                if a != 0.0 {
                    let col = &mut lp.cols[v.0 as usize];
                    let bound = rhs / a;
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
            if row.terms.is_empty() {
                continue; // pure placement row: no content once u is fixed
            }
            let coeffs = row
                .terms
                .iter()
                .map(|(v, a)| (v.0 as usize, a.eval(u_values)))
                .collect();
            let (lower, upper) = match row.sense {
                Sense::Le => (f64::NEG_INFINITY, rhs),
                Sense::Ge => (rhs, f64::INFINITY),
                Sense::Eq => (rhs, rhs),
            };
            row_map[i] = Some(lp.rows.len());
            lp.rows.push(LpRow {
                name: row.name.clone(),
                lower,
                upper,
                coeffs,
            });
        }
        Instantiated { lp, row_map }
    }
}

pub struct Instantiated {
    pub lp: Lp,
    /// Original row index -> solver row index (None if folded into bounds).
    pub row_map: Vec<Option<usize>>,
}

/// Concrete program in solver form: ranged rows, bounded columns,
/// optional integrality.
#[derive(Debug, Clone)]
pub struct Lp {
    pub cols: Vec<Column>,
    pub rows: Vec<LpRow>,
    pub maximize: bool,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct Column {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub cost: f64,
    pub integer: bool,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub coeffs: Vec<(usize, f64)>,
}

impl Lp {
    pub fn n_integer(&self) -> usize {
        self.cols.iter().filter(|c| c.integer).count()
    }

    /// Objective value of a primal point, including the offset.
    pub fn objective_of(&self, x: &[f64]) -> f64 {
        // Neumaier-compensated sum: settlement identities are checked to
        // 1e-6 on $-scale values, so naive summation noise matters.
        let mut sum = self.offset;
        let mut comp = 0.0;
        for (col, &xi) in self.cols.iter().zip(x) {
            let term = col.cost * xi;
            let t = sum + term;
            comp += if sum.abs() >= term.abs() {
                (sum - t) + term
            } else {
                (term - t) + sum
            };
            sum = t;
        }
        sum + comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_eval_and_scale() {
        let mut a = Affine::constant(2.0);
        a.add_u(UParam(0), 3.0);
        a.add_u(UParam(2), -1.0);
        assert_eq!(a.eval(&[1.0, 9.0, 0.5]), 2.0 + 3.0 - 0.5);
        let b = a.scaled(-2.0);
        assert_eq!(b.eval(&[1.0, 9.0, 0.5]), -2.0 * (2.0 + 3.0 - 0.5));
    }

    #[test]
    fn instantiate_folds_bounds_and_maps_rows() {
        let mut p = ParamLp::new();
        let x = p.add_var("x");
        let y = p.add_var("y");
        p.add_objective(x, 1.0);
        p.add_objective(y, Affine::term(2.0, UParam(0), 1.0));
        p.add_row("xlo", vec![(x, 1.0.into())], Sense::Ge, 0.0);
        p.add_row(
            "xhi",
            vec![(x, 1.0.into())],
            Sense::Le,
            Affine::term(1.0, UParam(0), 4.0),
        );
        p.add_row(
            "link",
            vec![(x, 1.0.into()), (y, 2.0.into())],
            Sense::Eq,
            3.0,
        );
        let inst = p.instantiate(&[1.0]);
        assert_eq!(inst.lp.rows.len(), 1);
        assert_eq!(inst.row_map, vec![None, None, Some(0)]);
        assert_eq!(inst.lp.cols[0].lower, 0.0);
        assert_eq!(inst.lp.cols[0].upper, 5.0);
        assert_eq!(inst.lp.cols[1].cost, 3.0);

        let inst0 = p.instantiate(&[0.0]);
        assert_eq!(inst0.lp.cols[0].upper, 1.0);
        assert_eq!(inst0.lp.cols[1].cost, 2.0);
    }

    #[test]
    fn negative_coefficient_fold_flips_side() {
        let mut p = ParamLp::new();
        let x = p.add_var("x");
        // -2x <= -6  <=>  x >= 3
        p.add_row("r", vec![(x, (-2.0).into())], Sense::Le, -6.0);
        let inst = p.instantiate(&[]);
        assert_eq!(inst.lp.cols[0].lower, 3.0);
        assert_eq!(inst.lp.cols[0].upper, f64::INFINITY);
    }

    #[test]
    fn compensated_objective() {
        let lp = Lp {
            cols: vec![
                Column {
                    name: "a".into(),
                    lower: 0.0,
                    upper: 1.0,
                    cost: 1e16,
                    integer: false,
                },
                Column {
                    name: "b".into(),
                    lower: 0.0,
                    upper: 1.0,
                    cost: 1.0,
                    integer: false,
                },
                Column {
                    name: "c".into(),
                    lower: 0.0,
                    upper: 1.0,
                    cost: -1e16,
                    integer: false,
                },
            ],
            rows: vec![],
            maximize: false,
            offset: 0.0,
        };
        assert_eq!(lp.objective_of(&[1.0, 1.0, 1.0]), 1.0);
    }
}
