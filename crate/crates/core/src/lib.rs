//! Numerical laboratory for perturbed holomorphic cylinders
//! `d_s u + J_0 d_t u = eps V(u)` on `[-r-1, r+1] x R/Z -> C^n`.
//!
//! * [`cylinder`], [`field`], [`calculus`]: grids, spectral fields and the
//!   `delbar` calculus.
//! * [`vfield`]: vector-field models, the RK4 flow oracle and mean-value matrices.
//! * [`solve`]: the mode-split linear solver and the Newton/Picard nonlinear solver.
//! * [`estimates`]: center of mass, the `gamma` differential inequality and the
//!   exponential decay checks.
//! * [`degeneration`]: families of long cylinders, end disks and flow-line extraction.

pub mod calculus;
pub mod cylinder;
pub mod degeneration;
pub mod error;
pub mod estimates;
pub mod field;
pub mod io;
pub mod solve;
pub mod stencil;
pub mod vfield;

pub use calculus::{apply_delbar, poincare_check, sup_derivative_norm, window_sobolev_sq, C_PC};
pub use cylinder::{Cylinder, Window, PADDING};
pub use degeneration::{run_family, DegenerationReport, FamilyGrid, FamilyOptions, FamilySchedule, SampleRule};
pub use error::{CylError, Result};
pub use field::{FourierLoop, PhysicalGrid, SpectralField};
pub use num_complex::Complex64;
pub use solve::{
    homogeneous, make_instance, solve_linear, solve_nonlinear, BoundaryEntry, Side, SolveReport, SpectralBoundaryData,
};
pub use vfield::{
    flow_ode, FlowSegment, ModelKind, VectorFieldModel, VectorFieldSequence, WeightSchedule,
};
