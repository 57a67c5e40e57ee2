//! Small dense linear and integer programming: model container, simplex
//! relaxation, exact branch and bound, and a text exchange format.

mod bnb;
mod model;
mod simplex;
mod text;

pub use bnb::{solve_ilp, solve_ilp_with, IlpOptions, SolveMode};
pub use model::{
    Constraint, IlpSolution, LinearModel, Objective, Relation, Sense, SolveStatus, Variable,
    FEASIBILITY_TOLERANCE,
};
pub use simplex::solve_lp;
pub use text::{export_model, parse_model};
