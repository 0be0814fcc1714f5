//! Degeneration of long cylinders: end plates converge to disks, and the
//! rescaled neck to a flow line of the limit field.

mod ends;
mod family;
mod schedule;
mod trace;

pub use ends::{cauchy_profile, end_pieces, estimate_endpoints, neck_oscillation, piece_distance, EndLimits, EndPiece};
pub use family::{
    run_family, DegenerationReport, EntryReport, FamilyGrid, FamilyOptions, FamilyRun, FamilySummary, MemberData,
    Monotonicity, NeckDecomposition, SampleRule, TraceSummary, AUTOSCALE_TARGET,
};
pub use schedule::{select_rho, FamilyEntry, FamilySchedule};
pub use trace::{compare_flowline, rescale_trace, FlowComparison, RescaledTrace};
