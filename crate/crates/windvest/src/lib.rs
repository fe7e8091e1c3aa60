//! Siting and sizing of wind capacity under two electricity-market designs.
//!
//! The library models a profit-maximizing producer that decides where to
//! build new wind farms in a DC network, given that market outcomes react
//! to its decisions. Day-ahead and balancing markets are cleared either
//! sequentially (conventional clearing, `ConvMC`) or jointly as a two-stage
//! stochastic program (`StocMC`). The producer's bilevel problem is reduced
//! to a single-level mixed-integer linear program by replacing each embedded
//! clearing LP with its primal constraints, dual constraints and the
//! strong-duality equality, then linearizing the remaining products of
//! binary placement variables and continuous variables.
//!
//! Modules:
//! - [`grid`]: DC network data model and flow computation.
//! - [`scenarios`]: two-layer scenario tree (day-ahead layer, nested
//!   balancing layer), forecast-error laws and fast-forward reduction.
//! - [`market`], [`clearing`]: market data and the three clearing LPs
//!   (day-ahead, balancing-after-the-fact, two-stage), plus settlement.
//! - [`mpec`]: the reformulation engine (dualization, product
//!   linearization, MILP assembly, solution recovery).
//! - [`solver`]: backend-neutral LP/MILP solve contract (HiGHS bundled).
//! - [`oracle`]: brute-force enumeration of placements, evaluated by
//!   simulation; ground truth for the MILPs on small instances.
//! - [`io`], [`config`], [`report`]: file formats, run configuration and
//!   report assembly.

pub mod clearing;
pub mod config;
pub mod grid;
pub mod io;
pub mod market;
pub mod mpec;
pub mod oracle;
pub mod report;
pub mod scenarios;
pub mod solver;

/// Hours in the target year; scenario trees describe the distribution of
/// hourly system states, so yearly money is expected hourly money times this.
pub const HOURS_PER_YEAR: f64 = 8760.0;
