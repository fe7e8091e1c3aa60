//! Reformulation engine: turns the bilevel/trilevel investment problems
//! into single-level mixed-integer linear programs.
//!
//! The pipeline is mechanical. Each embedded market-clearing LP (built by
//! [`crate::clearing`] with coefficients affine in the placement binaries)
//! is replaced by its primal rows, its dual-feasibility rows and the
//! strong-duality equality ([`dual::dualize`]); the conventional-clearing
//! model applies this twice, with the first problem's duals becoming
//! primal variables of the second. Lowering ([`lower`]) then replaces
//! every remaining product of a placement binary and a continuous
//! variable with an exact envelope and emits a concrete MILP.

pub mod dual;
pub mod linprog;
pub mod lower;
pub mod models;
pub mod recover;

pub use dual::{dualize, Dualized};
pub use linprog::{Affine, Lp, LpError, PVar, ParamLp, Sense, UParam};
pub use lower::{linearize_product, lower_to_milp, MilpArtifacts, MilpObjective};
pub use models::{
    build_convmc_milp, build_single_stage_milp, build_stocmc_milp, solve_investment,
    InvestmentModel, MarketDesign,
};
pub use recover::{recover_outcomes, InvestmentSolution, ProfitBreakdown, SystemBreakdown};
