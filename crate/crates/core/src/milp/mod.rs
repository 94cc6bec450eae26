//! Mixed binary linear programming: model container, bounded primal simplex,
//! best-bound branch and bound, an independent solution checker, and LP text
//! format export/import.

mod bnb;
mod check;
mod lpfile;
mod model;
mod simplex;

pub use bnb::{solve_milp, solve_milp_with, MilpSolution, SolveOptions, SolveStats, SolveStatus};
pub use check::{check_solution, CheckViolation};
pub use lpfile::{emit_lp_file, parse_lp_file, parse_solution_listing, DUMMY_VAR};
pub use model::{Constraint, MilpModel, Relation, VarId, VarKind, Variable};
pub use simplex::{solve_lp, DENSE_ENTRY_LIMIT};

/// Feasibility tolerance on constraint rows.
pub const FEAS_TOL: f64 = 1e-6;
/// Integrality tolerance on binary variables.
pub const INT_TOL: f64 = 1e-6;
