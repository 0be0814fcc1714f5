//! Instance generation: the linear `delbar` boundary-value problem and the
//! nonlinear equation `delbar u = eps V(u)`.

mod boundary;
mod linear;
mod nonlinear;

pub use boundary::{BoundaryEntry, Side, SpectralBoundaryData};
pub use linear::{homogeneous, solve_linear, LinearSolver};
pub use nonlinear::{
    coefficient_sup, make_instance, pde_residual, solve_nonlinear, sup_norm, NonlinearTerm, SolveReport,
    BALL_SLACK, CONTRACTION_LIMIT, DEFAULT_TOL, MAX_ITERATIONS,
};
