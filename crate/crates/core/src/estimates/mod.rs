//! Numerical checks of the a priori estimates: the center-of-mass equation,
//! the differential inequality for `gamma`, exponential decay of `u - q` and
//! the bump-function convolution argument.

mod bump;
mod com;
mod decay;
mod elliptic;
mod gamma;

pub use bump::{build_bump, convolution_window_check, BumpFunction, ConvolutionCheck, BUMP_MOLLIFIER_RADIUS};
pub use com::{center_of_mass, com_residual, CenterOfMassCurve, ComResidual};
pub use decay::{pointwise_decay_check, window_decay_check, DecayCheck};
pub use elliptic::{elliptic_constant_probe, sobolev_norm_sq};
pub use gamma::{
    check_diff_inequality, default_slack, diff_inequality_precondition, exp_bound_check, gamma_profile, DiffInequalityCheck,
    ExpBoundCheck, GammaProfile, Precondition,
};

use serde::{Deserialize, Serialize};

use crate::calculus::C_PC;

/// `delta = (4 c_pc)^{-1/2} = pi`.
pub const DELTA: f64 = std::f64::consts::PI;
/// Pointwise decay rate `c = delta / 2`.
pub const DECAY_C: f64 = DELTA / 2.0;
/// Default ratio allowed between a fitted constant and its boundary scale.
pub const DEFAULT_KAPPA: f64 = 4.0;
/// Relative slack on the differential inequality: `1e-6 max gamma`.
pub const RELATIVE_SLACK: f64 = 1e-6;

/// `e^{-rate (r + s)} + e^{-rate (r - s)}`.
pub fn two_sided_decay(rate: f64, r: f64, s: f64) -> f64 {
    (-rate * (r + s)).exp() + (-rate * (r - s)).exp()
}

/// Analytic constants together with the measured ones of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateConstants {
    pub c_pc: f64,
    pub delta: f64,
    pub c: f64,
    pub bump_l1: f64,
    pub bump_dd_l1: f64,
    /// Measured `sup |nabla^k u|` on `[-r, r]`, `k = 0, 1, ..`.
    pub c_k: Vec<f64>,
    /// Fitted pointwise decay constants `M_k`.
    pub m_k: Vec<f64>,
    /// Empirical elliptic constant, when probed.
    pub c_ell: Option<f64>,
}

impl EstimateConstants {
    pub fn analytic(bump: &BumpFunction) -> Self {
        EstimateConstants {
            c_pc: C_PC,
            delta: DELTA,
            c: DECAY_C,
            bump_l1: bump.l1,
            bump_dd_l1: bump.dd_l1,
            c_k: Vec::new(),
            m_k: Vec::new(),
            c_ell: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_consistent() {
        assert!((DELTA * DELTA - 1.0 / (4.0 * C_PC)).abs() < 1e-12);
        assert_eq!(DECAY_C, DELTA / 2.0);
        let k = EstimateConstants::analytic(&build_bump());
        assert!(k.bump_l1 <= 2.0 && k.bump_dd_l1 <= 40.0);
    }
}
