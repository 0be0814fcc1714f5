//! Fixtures shared by the benchmarks.

use cyllab_core::degeneration::{FamilyGrid, FamilyOptions, FamilySchedule, SampleRule};
use cyllab_core::{Complex64, Cylinder, SpectralBoundaryData, VectorFieldModel, VectorFieldSequence, WeightSchedule};

/// Three modes per side on `C^2`, well inside the unit ball.
pub fn boundary_data() -> SpectralBoundaryData {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    SpectralBoundaryData::from_modes(&[
        (0, vec![c(0.2, 0.1), c(0.0, -0.1)]),
        (-1, vec![c(0.1, 0.0), c(0.0, 0.05)]),
        (-2, vec![c(0.02, 0.0), c(0.01, 0.0)]),
        (1, vec![c(0.05, 0.05), c(0.1, 0.0)]),
        (2, vec![c(0.02, 0.0), c(0.0, 0.02)]),
    ])
    .expect("valid data")
}

pub fn cylinder(r: f64, s_samples: usize, t_modes: usize) -> Cylinder {
    Cylinder::new(r, s_samples, t_modes, 2).expect("valid grid")
}

/// `V_i = l_i x_i + k_i x_i^2`: not affine, so the pseudo-spectral path runs.
pub fn nonlinear_model() -> VectorFieldModel {
    VectorFieldModel::new(cyllab_core::ModelKind::Gradient {
        quadratic: vec![0.5, -0.3, 0.2, 0.4],
        cubic: vec![0.2, 0.1, -0.15, 0.05],
        quartic: vec![0.0; 4],
    })
    .expect("valid model")
}

pub fn sequence() -> VectorFieldSequence {
    VectorFieldSequence::new(
        VectorFieldModel::scalar(0.5, 4),
        VectorFieldModel::rotation(0.005, 4).expect("even dimension"),
        WeightSchedule::Harmonic,
    )
    .expect("matching dimensions")
}

/// Two-entry family on the quick grid.
pub fn quick_family() -> (FamilySchedule, FamilyOptions) {
    let schedule = FamilySchedule::from_radii(0.5, &[10.0, 20.0]).expect("valid schedule");
    let opts = FamilyOptions::new(FamilyGrid { samples: SampleRule::Fixed { s_samples: 512 }, t_modes: 32 });
    (schedule, opts)
}
